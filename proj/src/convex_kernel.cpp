// SPDX-License-Identifier: Apache-2.0
//
// stipt - RIS-aided terahertz information and power transfer simulator
// Copyright (C) 2026 The stipt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "stipt/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

namespace stipt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierGrowth = 20.0;
constexpr int kNewtonPerCentering = 100;
constexpr double kCenteringTol = 1e-10;
constexpr int kBlockMinDim = 48;

RVec gather(const RVec& x, const std::vector<int>& support) {
  RVec xs(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) xs[j] = x[support[j]];
  return xs;
}

void scatter_add(RVec& g, const std::vector<int>& support, const RVec& gs) {
  for (std::size_t j = 0; j < support.size(); ++j) g[support[j]] += gs[j];
}

void scatter_add(RMat& H, const std::vector<int>& support, const RMat& Hs) {
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = 0; b < support.size(); ++b) H(support[a], support[b]) += Hs(a, b);
}

double max_abs(const RMat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const RVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

bool psd(const RMat& M) {
  if (M.size() == 0) return true;
  const double scale = max_abs(M);
  if (scale == 0.0) return true;
  RMat S = 0.5 * (M + M.transpose());
  S.diagonal().array() += 1e-9 * scale;
  return Eigen::LLT<RMat>(S).info() == Eigen::Success;
}

int barrier_degree(const Constraint& c) { return std::holds_alternative<ConeConstraint>(c) ? 2 : 1; }

// Adds -log(-g) (or the cone barrier) at x. Returns false outside the domain.
bool add_barrier(const Constraint& con, const RVec& x, double& val, RVec* grad, RMat* hess) {
  if (const auto* c = std::get_if<AffineConstraint>(&con)) {
    const double g = c->a.dot(x) - c->b;
    if (!(g < 0.0)) return false;
    val -= std::log(-g);
    if (grad) *grad -= c->a / g;
    if (hess) hess->noalias() += (c->a / g) * (c->a / g).transpose();
    return true;
  }
  if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
    const RVec xs = gather(x, c->support);
    const RVec Qx = c->Q * xs;
    const double g = xs.dot(Qx) + c->a.dot(xs) - c->b;
    if (!(g < 0.0)) return false;
    val -= std::log(-g);
    const RVec dg = 2.0 * Qx + c->a;
    if (grad) scatter_add(*grad, c->support, RVec(-dg / g));
    if (hess) scatter_add(*hess, c->support, RMat((dg / g) * (dg / g).transpose() - (2.0 / g) * c->Q));
    return true;
  }
  const auto& c = std::get<ConeConstraint>(con);
  const RVec xs = gather(x, c.support);
  const RVec y = c.A * xs + c.b;
  const double tau = c.c.dot(xs) + c.d;
  const double psi = tau * tau - y.squaredNorm();
  if (!(tau > 0.0) || !(psi > 0.0)) return false;
  val -= std::log(psi);
  const RVec dpsi = 2.0 * tau * c.c - 2.0 * c.A.transpose() * y;
  if (grad) scatter_add(*grad, c.support, RVec(-dpsi / psi));
  if (hess) {
    const RMat d2psi = 2.0 * c.c * c.c.transpose() - 2.0 * c.A.transpose() * c.A;
    scatter_add(*hess, c.support, RMat((dpsi / psi) * (dpsi / psi).transpose() - d2psi / psi));
  }
  return true;
}

// Rescales a constraint so its data is O(1); the feasible set is unchanged.
// Returns false for an empty affine row that can never hold.
bool normalize(Constraint& con, bool& drop) {
  drop = false;
  if (auto* c = std::get_if<AffineConstraint>(&con)) {
    const double n = c->a.norm();
    if (n == 0.0) {
      drop = c->b >= 0.0;
      return c->b >= 0.0;
    }
    c->a /= n;
    c->b /= n;
    return true;
  }
  if (auto* c = std::get_if<QuadraticConstraint>(&con)) {
    const double s = std::max({max_abs(c->Q), max_abs(c->a), std::abs(c->b)});
    if (s > 0.0) {
      c->Q /= s;
      c->a /= s;
      c->b /= s;
    }
    return true;
  }
  auto& c = std::get<ConeConstraint>(con);
  const double s = std::max(max_abs(c.A), max_abs(c.c));
  if (s > 0.0) {
    c.A /= s;
    c.b /= s;
    c.c /= s;
    c.d /= s;
  }
  return true;
}

void check_program(const ConvexProgram& p) {
  const auto n = static_cast<Eigen::Index>(p.dim);
  if (p.dim < 0) throw KernelError("negative dimension");
  if (p.P.size() && (p.P.rows() != n || p.P.cols() != n)) throw KernelError("objective matrix has wrong shape");
  if (p.q.size() && p.q.size() != n) throw KernelError("linear term has wrong length");
  if (p.P.size() && !p.P.allFinite()) throw KernelError("objective matrix is not finite");
  if (p.q.size() && !p.q.allFinite()) throw KernelError("linear term is not finite");
  if (!psd(p.P)) throw KernelError("objective Hessian is not positive semidefinite");
  auto check_support = [&](const std::vector<int>& s) {
    for (int j : s)
      if (j < 0 || j >= p.dim) throw KernelError("support index out of range");
  };
  for (const auto& term : p.smooth) {
    check_support(term.support);
    if (!term.eval) throw KernelError("smooth term without evaluator");
  }
  for (const auto& con : p.constraints) {
    if (const auto* c = std::get_if<AffineConstraint>(&con)) {
      if (c->a.size() != n || !c->a.allFinite() || !std::isfinite(c->b)) throw KernelError("malformed affine constraint");
    } else if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
      check_support(c->support);
      const auto m = static_cast<Eigen::Index>(c->support.size());
      if (c->Q.rows() != m || c->Q.cols() != m || c->a.size() != m) throw KernelError("malformed quadratic constraint");
      if (!c->Q.allFinite() || !c->a.allFinite() || !std::isfinite(c->b))
        throw KernelError("quadratic constraint is not finite");
      if (!psd(c->Q)) throw KernelError("quadratic constraint matrix is not positive semidefinite");
    } else {
      const auto& k = std::get<ConeConstraint>(con);
      check_support(k.support);
      const auto m = static_cast<Eigen::Index>(k.support.size());
      if (k.A.cols() != m || k.b.size() != k.A.rows() || k.c.size() != m) throw KernelError("malformed cone constraint");
      if (!k.A.allFinite() || !k.b.allFinite() || !k.c.allFinite() || !std::isfinite(k.d))
        throw KernelError("cone constraint is not finite");
    }
  }
}

struct Eval {
  double value = 0.0;
  RVec grad;
  RMat hess;
};

// Objective with optional derivatives; nullopt outside a smooth term's domain.
std::optional<double> eval_objective(const ConvexProgram& p, const RVec& x, RVec* grad, RMat* hess) {
  double v = p.constant;
  if (p.P.size()) {
    const RVec Px = p.P * x;
    v += 0.5 * x.dot(Px);
    if (grad) *grad += Px;
    if (hess) *hess += p.P;
  }
  if (p.q.size()) {
    v += p.q.dot(x);
    if (grad) *grad += p.q;
  }
  for (const auto& term : p.smooth) {
    const auto r = term.eval(gather(x, term.support));
    if (!r || !std::isfinite(r->value)) return std::nullopt;
    v += r->value;
    if (grad) scatter_add(*grad, term.support, r->grad);
    if (hess) scatter_add(*hess, term.support, r->hess);
  }
  return v;
}

// Connected components of the Hessian sparsity pattern. Rank-one barrier
// terms are left out; they are handled by the Woodbury identity.
std::vector<std::vector<int>> hessian_blocks(const ConvexProgram& p) {
  const int n = p.dim;
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  auto unite_all = [&](const std::vector<int>& s) {
    for (std::size_t j = 1; j < s.size(); ++j) unite(s[0], s[j]);
  };
  if (p.P.size())
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i)
        if (p.P(i, j) != 0.0 || p.P(j, i) != 0.0) unite(i, j);
  for (const auto& term : p.smooth) unite_all(term.support);
  for (const auto& con : p.constraints) {
    if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
      for (std::size_t a = 0; a < c->support.size(); ++a)
        for (std::size_t b = a + 1; b < c->support.size(); ++b)
          if (c->Q(a, b) != 0.0 || c->Q(b, a) != 0.0) unite(c->support[a], c->support[b]);
    } else if (const auto* c = std::get_if<ConeConstraint>(&con)) {
      unite_all(c->support);
    }
  }
  std::vector<int> id(n, -1);
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (id[r] < 0) {
      id[r] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[id[r]].push_back(i);
  }
  return blocks;
}

struct CoreResult {
  RVec x;
  bool converged = false;
  bool stopped = false;
  double kkt = kInf;
  int steps = 0;
};

class BarrierSolver {
 public:
  BarrierSolver(const ConvexProgram& p, double tol, int max_iter) : p_(p), tol_(tol), max_iter_(max_iter) {
    for (const auto& c : p_.constraints) m_ += barrier_degree(c);
    if (p_.dim < kBlockMinDim) return;
    blocks_ = hessian_blocks(p_);
    std::size_t largest = 0;
    for (const auto& b : blocks_) largest = std::max(largest, b.size());
    if (2 * largest > static_cast<std::size_t>(p_.dim)) {
      blocks_.clear();
      return;
    }
    block_of_.assign(p_.dim, 0);
    local_.assign(p_.dim, 0);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t j = 0; j < blocks_[b].size(); ++j) {
        block_of_[blocks_[b][j]] = static_cast<int>(b);
        local_[blocks_[b][j]] = static_cast<int>(j);
      }
    for (const auto& b : blocks_) {
      const auto k = static_cast<Eigen::Index>(b.size());
      RMat Pb = RMat::Zero(k, k);
      if (p_.P.size())
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j) Pb(i, j) = p_.P(b[i], b[j]);
      P_blocks_.push_back(std::move(Pb));
    }
  }

  template <typename Stop>
  CoreResult run(RVec x, Stop stop) {
    CoreResult res;
    double t = initial_t(x);
    for (int outer = 0; outer <= max_iter_; ++outer) {
      const double lambda2 = center(x, t, res, stop);
      res.x = x;
      if (res.stopped) return res;
      const double f = *eval_objective(p_, x, nullptr, nullptr);
      // f is normalized, so the floor keeps the test scale-free.
      res.kkt = (m_ + 0.5 * lambda2) / t / std::max(std::abs(f), 1e-9);
      if (res.kkt <= tol_) {
        res.converged = true;
        return res;
      }
      if (m_ == 0) break;
      t *= kBarrierGrowth;
    }
    return res;
  }

 private:
  bool in_domain(const RVec& x, double t, double& F) const {
    double phi = 0.0;
    for (const auto& c : p_.constraints)
      if (!add_barrier(c, x, phi, nullptr, nullptr)) return false;
    const auto f = eval_objective(p_, x, nullptr, nullptr);
    if (!f) return false;
    F = t * *f + phi;
    return std::isfinite(F);
  }

  double initial_t(const RVec& x) const {
    if (m_ == 0) return 1.0;
    const auto n = static_cast<Eigen::Index>(p_.dim);
    RVec gf = RVec::Zero(n), gp = RVec::Zero(n);
    eval_objective(p_, x, &gf, nullptr);
    double phi = 0.0;
    for (const auto& c : p_.constraints) add_barrier(c, x, phi, &gp, nullptr);
    const double ff = gf.squaredNorm();
    if (!(ff > 0.0)) return 1.0;
    const double t = -gf.dot(gp) / ff;
    return std::clamp(std::isfinite(t) ? t : 1.0, 1e-3, 1e3);
  }

  template <typename Stop>
  double center(RVec& x, double t, CoreResult& res, Stop stop) {
    const auto n = static_cast<Eigen::Index>(p_.dim);
    double lambda2 = 0.0;
    for (int it = 0; it < kNewtonPerCentering; ++it) {
      RVec g = RVec::Zero(n);
      double F = 0.0;
      std::optional<RVec> structured;
      if (!blocks_.empty()) structured = block_newton(x, t, g, F);
      RVec dx;
      if (structured) {
        dx = std::move(*structured);
      } else {
        g.setZero();
        RMat H = RMat::Zero(n, n);
        const double f = *eval_objective(p_, x, &g, &H);
        g *= t;
        H *= t;
        double phi = 0.0;
        for (const auto& c : p_.constraints) add_barrier(c, x, phi, &g, &H);
        F = t * f + phi;
        dx = newton_direction(H, g);
      }
      lambda2 = -g.dot(dx);
      if (!std::isfinite(lambda2) || lambda2 < 0.0) {
        lambda2 = 0.0;
        break;
      }
      if (0.5 * lambda2 <= kCenteringTol) break;

      double step = 1.0;
      double F_new = kInf;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
        const RVec trial = x + step * dx;
        if (in_domain(trial, t, F_new) &&
            F_new <= F - 0.01 * step * lambda2 + 1e-13 * std::abs(F)) {
          x = trial;
          moved = true;
          break;
        }
      }
      ++res.steps;
      if (!moved) break;
      if (stop(x)) {
        res.stopped = true;
        return lambda2;
      }
    }
    return lambda2;
  }

  // Newton step for H = blockdiag(B) + sum_c u_c u_c^T via Woodbury. Fills
  // the gradient and barrier value; nullopt if a block is not positive definite.
  std::optional<RVec> block_newton(const RVec& x, double t, RVec& g, double& F) const {
    const auto n = static_cast<Eigen::Index>(p_.dim);
    std::vector<RMat> B;
    B.reserve(blocks_.size());
    for (const auto& Pb : P_blocks_) B.push_back(t * Pb);
    auto add_block = [&](const std::vector<int>& support, const RMat& Hs) {
      const int b = block_of_[support[0]];
      for (std::size_t i = 0; i < support.size(); ++i)
        for (std::size_t j = 0; j < support.size(); ++j) B[b](local_[support[i]], local_[support[j]]) += Hs(i, j);
    };

    double f = p_.constant;
    if (p_.P.size()) {
      const RVec Px = p_.P * x;
      f += 0.5 * x.dot(Px);
      g += t * Px;
    }
    if (p_.q.size()) {
      f += p_.q.dot(x);
      g += t * p_.q;
    }
    for (const auto& term : p_.smooth) {
      const auto r = term.eval(gather(x, term.support));
      if (!r) return std::nullopt;
      f += r->value;
      scatter_add(g, term.support, RVec(t * r->grad));
      if (!term.support.empty()) add_block(term.support, t * r->hess);
    }

    std::vector<RVec> U;
    double phi = 0.0;
    for (const auto& con : p_.constraints) {
      if (const auto* c = std::get_if<AffineConstraint>(&con)) {
        const double gv = c->a.dot(x) - c->b;
        phi -= std::log(-gv);
        g -= c->a / gv;
        U.push_back(c->a / gv);
      } else if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
        const RVec xs = gather(x, c->support);
        const RVec Qx = c->Q * xs;
        const double gv = xs.dot(Qx) + c->a.dot(xs) - c->b;
        phi -= std::log(-gv);
        const RVec dg = 2.0 * Qx + c->a;
        scatter_add(g, c->support, RVec(-dg / gv));
        RVec u = RVec::Zero(n);
        scatter_add(u, c->support, RVec(dg / gv));
        U.push_back(std::move(u));
        // -2 Q / g is block diagonal: Q only couples indices inside one block.
        for (std::size_t a = 0; a < c->support.size(); ++a)
          for (std::size_t b = 0; b < c->support.size(); ++b) {
            const double q = c->Q(a, b);
            if (q != 0.0) B[block_of_[c->support[a]]](local_[c->support[a]], local_[c->support[b]]) -= 2.0 * q / gv;
          }
      } else {
        // Barrier of the cone restricted to its own support.
        const auto& cone = std::get<ConeConstraint>(con);
        ConeConstraint local = cone;
        std::iota(local.support.begin(), local.support.end(), 0);
        const auto k = static_cast<Eigen::Index>(cone.support.size());
        RVec gs = RVec::Zero(k);
        RMat Hs = RMat::Zero(k, k);
        add_barrier(local, gather(x, cone.support), phi, &gs, &Hs);
        scatter_add(g, cone.support, gs);
        add_block(cone.support, Hs);
      }
    }
    F = t * f + phi;

    std::vector<Eigen::LLT<RMat>> llt;
    llt.reserve(B.size());
    for (const auto& Bb : B) {
      llt.emplace_back(Bb);
      if (llt.back().info() != Eigen::Success) return std::nullopt;
    }
    auto solve_blocks = [&](const RVec& r) {
      RVec out(n);
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const RVec sol = llt[b].solve(gather(r, blocks_[b]));
        for (std::size_t j = 0; j < blocks_[b].size(); ++j) out[blocks_[b][j]] = sol[j];
      }
      return out;
    };
    RVec dx = solve_blocks(-g);
    if (!U.empty()) {
      const auto m = static_cast<Eigen::Index>(U.size());
      RMat Um(n, m), Y(n, m);
      for (Eigen::Index c = 0; c < m; ++c) {
        Um.col(c) = U[c];
        Y.col(c) = solve_blocks(U[c]);
      }
      const RMat cap = RMat::Identity(m, m) + Um.transpose() * Y;
      dx -= Y * cap.ldlt().solve(Um.transpose() * dx);
    }
    if (!dx.allFinite()) return std::nullopt;
    return dx;
  }

  static RVec newton_direction(RMat& H, const RVec& g) {
    Eigen::LLT<RMat> llt(H);
    if (llt.info() == Eigen::Success) return -llt.solve(g);
    const double scale = std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (double jitter = 1e-12; jitter < 1.0; jitter *= 100.0) {
      RMat J = H;
      J.diagonal().array() += jitter * scale;
      llt.compute(J);
      if (llt.info() == Eigen::Success) return -llt.solve(g);
    }
    return -Eigen::LDLT<RMat>(H).solve(g);
  }

  const ConvexProgram& p_;
  double tol_;
  int max_iter_;
  int m_ = 0;
  std::vector<std::vector<int>> blocks_;  // empty: dense Newton steps
  std::vector<int> block_of_, local_;
  std::vector<RMat> P_blocks_;
};

// Constraint in the coordinates d = x - x0.
Constraint shifted(const Constraint& con, const RVec& x0) {
  if (const auto* c = std::get_if<AffineConstraint>(&con)) return AffineConstraint{c->a, c->b - c->a.dot(x0)};
  if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
    const RVec xs = gather(x0, c->support);
    const RVec Qx = c->Q * xs;
    return QuadraticConstraint{c->support, c->Q, c->a + 2.0 * Qx, c->b - xs.dot(Qx) - c->a.dot(xs)};
  }
  const auto& c = std::get<ConeConstraint>(con);
  const RVec xs = gather(x0, c.support);
  return ConeConstraint{c.support, c.A, c.b + c.A * xs, c.c, c.d + c.c.dot(xs)};
}

// Builds min s s.t. g_i(x) <= s, s >= -1 over z = (x, s).
ConvexProgram phase_one(const ConvexProgram& p) {
  const int n = p.dim;
  ConvexProgram aux(n + 1);
  aux.q = RVec::Zero(n + 1);
  aux.q[n] = 1.0;
  for (const auto& con : p.constraints) {
    if (const auto* c = std::get_if<AffineConstraint>(&con)) {
      RVec a(n + 1);
      a << c->a, -1.0;
      aux.constraints.push_back(AffineConstraint{a, c->b});
    } else if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
      QuadraticConstraint q;
      q.support = c->support;
      q.support.push_back(n);
      const auto m = static_cast<Eigen::Index>(c->support.size());
      q.Q = RMat::Zero(m + 1, m + 1);
      q.Q.topLeftCorner(m, m) = c->Q;
      q.a.resize(m + 1);
      q.a << c->a, -1.0;
      q.b = c->b;
      aux.constraints.push_back(q);
    } else {
      const auto& k = std::get<ConeConstraint>(con);
      ConeConstraint e;
      e.support = k.support;
      e.support.push_back(n);
      e.A.resize(k.A.rows(), k.A.cols() + 1);
      e.A << k.A, RVec::Zero(k.A.rows());
      e.b = k.b;
      e.c.resize(k.c.size() + 1);
      e.c << k.c, 1.0;
      e.d = k.d;
      aux.constraints.push_back(e);
    }
  }
  RVec lower = RVec::Zero(n + 1);
  lower[n] = -1.0;
  aux.constraints.push_back(AffineConstraint{lower, 1.0});
  return aux;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIter: return "max-iter";
  }
  return "unknown";
}

double constraint_value(const Constraint& con, const RVec& x) {
  if (const auto* c = std::get_if<AffineConstraint>(&con)) return c->a.dot(x) - c->b;
  if (const auto* c = std::get_if<QuadraticConstraint>(&con)) {
    const RVec xs = gather(x, c->support);
    return xs.dot(c->Q * xs) + c->a.dot(xs) - c->b;
  }
  const auto& c = std::get<ConeConstraint>(con);
  const RVec xs = gather(x, c.support);
  return (c.A * xs + c.b).norm() - (c.c.dot(xs) + c.d);
}

double ConvexProgram::objective(const RVec& x) const {
  const auto v = eval_objective(*this, x, nullptr, nullptr);
  return v ? *v : kInf;
}

double ConvexProgram::max_violation(const RVec& x) const {
  double worst = -kInf;
  for (const auto& c : constraints) worst = std::max(worst, constraint_value(c, x));
  return worst;
}

KernelSolution solve(const ConvexProgram& program, const KernelOptions& options) {
  check_program(program);
  const auto n = static_cast<Eigen::Index>(program.dim);

  ConvexProgram work(program.dim);
  work.smooth = program.smooth;
  for (auto con : program.constraints) {
    bool drop = false;
    if (!normalize(con, drop)) {
      KernelSolution out;
      out.x = options.initial_point.value_or(RVec::Zero(n));
      out.status = SolveStatus::kInfeasible;
      out.objective = program.objective(out.x);
      return out;
    }
    if (!drop) work.constraints.push_back(std::move(con));
  }

  RVec x = options.initial_point.value_or(RVec::Zero(n));
  if (x.size() != n) throw KernelError("initial point has wrong length");
  KernelSolution out;

  // Phase 1: find a strictly feasible point unless the hint already is one.
  double worst = -kInf;
  for (const auto& c : work.constraints) worst = std::max(worst, constraint_value(c, x));
  if (!(worst < 0.0)) {
    const ConvexProgram aux = phase_one(work);
    RVec z(n + 1);
    z << x, std::max(worst, 0.0) + 1.0;
    BarrierSolver ph1(aux, options.tol, options.max_iter);
    const auto r = ph1.run(z, [n](const RVec& zz) { return zz[n] < 0.0; });
    out.newton_steps += r.steps;
    x = r.x.head(n);
    if (!r.stopped) {
      out.x = x;
      out.status = SolveStatus::kInfeasible;
      out.objective = program.objective(x);
      out.kkt_residual = kInf;
      return out;
    }
  }

  // Phase 2 runs in d = x - x0 so that objective differences near x0 keep
  // their precision when the quadratic itself is large.
  const RVec x0 = x;
  double base = program.constant;
  RVec lin = RVec::Zero(n);
  if (program.P.size()) {
    const RVec Px = program.P * x0;
    base += 0.5 * x0.dot(Px);
    lin += Px;
  }
  if (program.q.size()) {
    base += program.q.dot(x0);
    lin += program.q;
  }
  RVec g0 = lin;
  for (const auto& term : program.smooth) {
    const RVec xs = gather(x0, term.support);
    const auto r = term.eval(xs);
    if (!r || !std::isfinite(r->value)) {
      out.x = x;
      out.status = SolveStatus::kInfeasible;
      out.objective = kInf;
      out.kkt_residual = kInf;
      return out;
    }
    scatter_add(g0, term.support, r->grad);
  }

  // Scale the objective to O(1) around the starting point.
  const double xs = std::max(1.0, max_abs(x0));
  double scale = std::max(max_abs(g0) * xs, max_abs(program.P) * xs * xs);
  for (const auto& term : program.smooth) {
    const auto r = term.eval(gather(x0, term.support));
    scale = std::max({scale, std::abs(r->value), max_abs(r->grad) * xs, max_abs(r->hess) * xs * xs});
  }
  if (!(scale > 1e-300) || !std::isfinite(scale)) scale = 1.0;
  const double inv = 1.0 / scale;
  work.constant = base * inv;
  if (program.P.size()) work.P = program.P * inv;
  work.q = lin * inv;
  work.smooth.clear();
  for (const auto& term : program.smooth) {
    const RVec base = gather(x0, term.support);
    work.smooth.push_back(SmoothTerm{term.support, [eval = term.eval, inv, base](const RVec& v) -> std::optional<SmoothValue> {
                                       auto r = eval(v + base);
                                       if (!r) return r;
                                       r->value *= inv;
                                       r->grad *= inv;
                                       r->hess *= inv;
                                       return r;
                                     }});
  }
  for (auto& con : work.constraints) con = shifted(con, x0);

  BarrierSolver ph2(work, options.tol, options.max_iter);
  const auto r = ph2.run(RVec::Zero(n), [](const RVec&) { return false; });
  out.newton_steps += r.steps;
  out.x = x0 + r.x;
  out.kkt_residual = r.kkt;
  out.status = r.converged ? SolveStatus::kOptimal : SolveStatus::kMaxIter;
  out.objective = program.objective(out.x);
  return out;
}

}  // namespace stipt
