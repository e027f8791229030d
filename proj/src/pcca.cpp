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

#include "stipt/pcca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stipt {

namespace {

constexpr Complex kJ{0.0, 1.0};

// Variable layout of the coordinate program: free axes of L, then r_u, then d0.
struct CoordLayout {
  std::vector<int> free_axes;
  Vec3 fixed = Vec3::Zero();
  int r_offset = 0;
  int d0_index = 0;
  int dim = 0;
};

CoordLayout make_layout(const Scenario& s, const Vec3& L, const std::optional<RisBox>& box) {
  CoordLayout lay;
  lay.fixed = L;
  for (int a = 0; a < 3; ++a) {
    if (box && (*box)[a].pinned()) {
      lay.fixed[a] = (*box)[a].min;
    } else {
      lay.free_axes.push_back(a);
    }
  }
  lay.r_offset = static_cast<int>(lay.free_axes.size());
  lay.d0_index = lay.r_offset + s.user_count();
  lay.dim = lay.d0_index + 1;
  return lay;
}

// ||L - target|| <= x[aux]
ConeConstraint distance_cone(const CoordLayout& lay, const Vec3& target, int aux) {
  ConeConstraint c;
  const int nf = static_cast<int>(lay.free_axes.size());
  c.support.reserve(nf + 1);
  for (int j = 0; j < nf; ++j) c.support.push_back(j);
  c.support.push_back(aux);
  c.A = RMat::Zero(3, nf + 1);
  c.b = lay.fixed - target;
  for (int j = 0; j < nf; ++j) {
    c.A(lay.free_axes[j], j) = 1.0;
    c.b[lay.free_axes[j]] = -target[lay.free_axes[j]];
  }
  c.c = RVec::Zero(nf + 1);
  c.c[nf] = 1.0;
  c.d = 0.0;
  return c;
}

AffineConstraint single_bound(int dim, int index, double sign, double bound) {
  RVec a = RVec::Zero(dim);
  a[index] = sign;
  return AffineConstraint{a, bound};
}

}  // namespace

Scalar2 f_ku(double r, double d0, double mu, double Kk) {
  if (!(r > 0.0) || !(d0 > 0.0)) throw std::invalid_argument("f_ku: distances must be positive");
  Scalar2 out;
  out.value = mu * std::exp(-Kk * (r + d0)) / (r * d0);
  const Eigen::Vector2d dlog(-Kk - 1.0 / r, -Kk - 1.0 / d0);
  out.grad = out.value * dlog;
  Eigen::Matrix2d d2log = Eigen::Matrix2d::Zero();
  d2log(0, 0) = 1.0 / (r * r);
  d2log(1, 1) = 1.0 / (d0 * d0);
  out.hess = out.value * (dlog * dlog.transpose() + d2log);
  return out;
}

Scalar2 f_ku_squared(double r, double d0, double mu, double Kk) {
  const Scalar2 f = f_ku(r, d0, mu, Kk);
  Scalar2 out;
  out.value = f.value * f.value;
  out.grad = 2.0 * f.value * f.grad;
  out.hess = 2.0 * (f.grad * f.grad.transpose() + f.value * f.hess);
  return out;
}

Scalar1 h_k(double d0, double rho, double Kk) {
  if (!(d0 > 0.0)) throw std::invalid_argument("h_k: distance must be positive");
  Scalar1 out;
  const double e = std::exp(-2.0 * Kk * d0);
  out.value = rho * e / (d0 * d0);
  out.deriv = -rho * (2.0 * Kk * d0 + 2.0) * e / (d0 * d0 * d0);
  out.second = rho * e * (4.0 * Kk * Kk * d0 * d0 + 8.0 * Kk * d0 + 6.0) / (d0 * d0 * d0 * d0);
  return out;
}

double mu_k(const RadioConfig& radio, int k) {
  return radio.g_t * radio.g_r * radio.wavelengths[k] / (8.0 * std::sqrt(kPi * kPi * kPi));
}

double rho_k(const RadioConfig& radio, int k) {
  const double a = radio.g_t * radio.wavelengths[k] / (4.0 * kPi);
  return a * a;
}

double half_absorption(const RadioConfig& radio, int k) { return 0.5 * radio.absorption[k]; }

double CoordSurrogate::objective_value(const std::vector<double>& r, double d0) const {
  double v = 0.0;
  for (const auto& t : objective) {
    const double ru = r[t.user];
    v += t.E * f_ku_squared(ru, d0, t.mu, t.Kk).value + t.F * (t.grad_f_tilde[0] * ru + t.grad_f_tilde[1] * d0);
  }
  return v;
}

double CoordSurrogate::eu_power(int m, double r_m, double d0) const {
  double p = eta_q[m];
  for (std::size_t k = 0; k < lambda[m].size(); ++k) {
    const double f = f_ku(r_m, d0, mu[k], Kk[k]).value;
    p += lambda[m][k] * f * f + chi[m][k] * f;
  }
  return p;
}

double CoordSurrogate::ris_power(double d0) const {
  double p = 0.0;
  for (std::size_t k = 0; k < D.size(); ++k) p += D[k] * h_k(d0, rho[k], Kk[k]).value;
  return p;
}

CoordSurrogate freeze_surrogate(const Scenario& s, const ChannelSet& ch, const PrecoderSet& F,
                                const IterationState& state) {
  const auto& radio = s.radio;
  const int K = ch.subbands();
  const int M = static_cast<int>(ch.eu.size());
  CoordSurrogate sur;
  sur.L = ch.ris_position;
  sur.d0_tilde = ch.ap_ris_distance;
  sur.eu_users = ch.eu;
  for (int u = 0; u < s.user_count(); ++u) sur.r_tilde.push_back(ch.link(0, u).ris_distance);
  sur.lambda.assign(M, std::vector<double>(K, 0.0));
  sur.chi.assign(M, std::vector<double>(K, 0.0));
  sur.eta_q.assign(M, 0.0);
  const double dark = static_cast<double>(ch.phi.size()) - ch.phi.squaredNorm();

  for (int k = 0; k < K; ++k) {
    const auto& band = ch.bands[k];
    sur.mu.push_back(mu_k(radio, k));
    sur.Kk.push_back(half_absorption(radio, k));
    sur.rho.push_back(rho_k(radio, k));
    CMat Fs = CMat::Zero(band.v.size(), band.v.size());
    double capture = 0.0;
    for (const auto& Fi : F[k]) {
      Fs.noalias() += Fi * Fi.adjoint();
      capture += (Fi.adjoint() * band.v).squaredNorm();
    }
    sur.D.push_back(radio.eta[k] * capture * dark);
    const CVec Fs_v = Fs * band.v;
    const double vFv = band.v.dot(Fs_v).real();
    const double lam = band.wavelength;

    for (std::size_t i = 0; i < ch.iu.size(); ++i) {
      const int user = ch.iu[i];
      const auto& link = ch.link(k, user);
      const CMat& U = state.U[k][i];
      const CMat& W = state.W[k][i];
      const CMat Ubar = U * W * U.adjoint();
      const CVec Ur = Ubar * link.r;
      const double A_ki = vFv * link.r.dot(Ur).real();
      const Complex xi_ki = Fs_v.dot(link.H.adjoint() * Ur) - band.v.dot(F[k][i] * W * U.adjoint() * link.r);
      const Complex up = link.u.cwiseProduct(ch.phi).sum();
      const Complex phase = std::exp(-kJ * (2.0 * kPi * (link.ris_distance + sur.d0_tilde) / lam));
      CoordSurrogate::ObjectiveTerm t;
      t.user = user;
      t.k = k;
      t.E = A_ki * std::norm(up);
      t.F = (phase * 2.0 * xi_ki * up).real();
      t.mu = sur.mu[k];
      t.Kk = sur.Kk[k];
      t.grad_f_tilde = f_ku(link.ris_distance, sur.d0_tilde, t.mu, t.Kk).grad;
      sur.objective.push_back(t);
    }
    for (int m = 0; m < M; ++m) {
      const auto& link = ch.eu_link(k, m);
      const Complex up = link.u.cwiseProduct(ch.phi).sum();
      const Complex w = Fs_v.dot(link.H.adjoint() * link.r);
      const Complex phase = std::exp(-kJ * (2.0 * kPi * (link.ris_distance + sur.d0_tilde) / lam));
      sur.lambda[m][k] = radio.eta[k] * static_cast<double>(link.r.size()) * vFv * std::norm(up);
      sur.chi[m][k] = (phase * 2.0 * radio.eta[k] * w * up).real();
      sur.eta_q[m] += radio.eta[k] * (link.H * Fs * link.H.adjoint()).trace().real();
    }
  }

  sur.A_eu.assign(M, 0.0);
  sur.B_eu.assign(M, 0.0);
  sur.C_eu.assign(M, 0.0);
  for (int m = 0; m < M; ++m) {
    const double rt = sur.r_tilde[ch.eu[m]];
    double value = 0.0;
    for (int k = 0; k < K; ++k) {
      const Scalar2 f = f_ku(rt, sur.d0_tilde, sur.mu[k], sur.Kk[k]);
      const Scalar2 f2 = f_ku_squared(rt, sur.d0_tilde, sur.mu[k], sur.Kk[k]);
      sur.A_eu[m] += sur.lambda[m][k] * f2.grad[0] + sur.chi[m][k] * f.grad[0];
      sur.B_eu[m] += sur.lambda[m][k] * f2.grad[1] + sur.chi[m][k] * f.grad[1];
      value += sur.lambda[m][k] * f2.value + sur.chi[m][k] * f.value;
    }
    sur.C_eu[m] = value - sur.A_eu[m] * rt - sur.B_eu[m] * sur.d0_tilde + sur.eta_q[m];
  }
  for (int k = 0; k < K; ++k) {
    const Scalar1 h = h_k(sur.d0_tilde, sur.rho[k], sur.Kk[k]);
    sur.A_ris += sur.D[k] * h.deriv;
    sur.B_ris += sur.D[k] * (h.value - sur.d0_tilde * h.deriv);
  }
  return sur;
}

double coordinate_radius_bound(const Scenario& s, const Vec3& L) {
  std::vector<Vec3> pts{s.ap.reference, L};
  for (const auto& u : s.users) pts.push_back(u.geometry.reference);
  if (s.ris_box) {
    Vec3 lo, hi;
    for (int a = 0; a < 3; ++a) {
      lo[a] = (*s.ris_box)[a].min;
      hi[a] = (*s.ris_box)[a].max;
    }
    pts.push_back(lo);
    pts.push_back(hi);
  }
  double span = 0.0;
  for (const auto& p : pts)
    for (const auto& q : pts) span = std::max(span, (p - q).norm());
  return 2.0 * span + 1.0;
}

ConvexProgram build_coord_program(const Scenario& s, const CoordSurrogate& sur, const PowerTargets& working,
                                  const std::optional<RisBox>& box) {
  const CoordLayout lay = make_layout(s, sur.L, box);
  ConvexProgram prog(lay.dim);
  prog.q = RVec::Zero(lay.dim);

  // Smooth part: sum E f^2, grouped per IU over sub-bands.
  for (int user : s.information_users()) {
    std::vector<CoordSurrogate::ObjectiveTerm> terms;
    for (const auto& t : sur.objective) {
      if (t.user != user) continue;
      terms.push_back(t);
      prog.q[lay.r_offset + user] += t.F * t.grad_f_tilde[0];
      prog.q[lay.d0_index] += t.F * t.grad_f_tilde[1];
    }
    SmoothTerm term;
    term.support = {lay.r_offset + user, lay.d0_index};
    term.eval = [terms](const RVec& x) -> std::optional<SmoothValue> {
      if (!(x[0] > 0.0) || !(x[1] > 0.0)) return std::nullopt;
      SmoothValue v;
      v.grad = RVec::Zero(2);
      v.hess = RMat::Zero(2, 2);
      for (const auto& t : terms) {
        const Scalar2 f2 = f_ku_squared(x[0], x[1], t.mu, t.Kk);
        v.value += t.E * f2.value;
        v.grad += t.E * f2.grad;
        v.hess += t.E * f2.hess;
      }
      return v;
    };
    prog.smooth.push_back(std::move(term));
  }

  for (int u = 0; u < s.user_count(); ++u)
    prog.constraints.push_back(distance_cone(lay, s.users[u].geometry.reference, lay.r_offset + u));
  prog.constraints.push_back(distance_cone(lay, s.ap.reference, lay.d0_index));

  for (std::size_t m = 0; m < sur.eu_users.size(); ++m) {
    if (!(working.eu[m] > 0.0)) continue;
    RVec a = RVec::Zero(lay.dim);
    a[lay.r_offset + sur.eu_users[m]] = -sur.A_eu[m];
    a[lay.d0_index] = -sur.B_eu[m];
    prog.constraints.push_back(AffineConstraint{a, sur.C_eu[m] - working.eu[m]});
  }
  if (working.ris > 0.0) {
    RVec a = RVec::Zero(lay.dim);
    a[lay.d0_index] = -sur.A_ris;
    prog.constraints.push_back(AffineConstraint{a, sur.B_ris - working.ris});
  }

  if (box) {
    for (std::size_t j = 0; j < lay.free_axes.size(); ++j) {
      const auto& b = (*box)[lay.free_axes[j]];
      prog.constraints.push_back(single_bound(lay.dim, static_cast<int>(j), 1.0, b.max));
      prog.constraints.push_back(single_bound(lay.dim, static_cast<int>(j), -1.0, -b.min));
    }
  }
  const double rmax = coordinate_radius_bound(s, sur.L);
  for (int j = lay.r_offset; j < lay.dim; ++j) prog.constraints.push_back(single_bound(lay.dim, j, 1.0, rmax));
  return prog;
}

CoordSolution solve_coord_program(const Scenario& s, const CoordSurrogate& sur, const PowerTargets& working,
                                  const std::optional<RisBox>& box, const KernelOptions& kernel) {
  const CoordLayout lay = make_layout(s, sur.L, box);
  const ConvexProgram prog = build_coord_program(s, sur, working, box);

  Vec3 L0 = lay.fixed;
  RVec x0(lay.dim);
  for (std::size_t j = 0; j < lay.free_axes.size(); ++j) x0[j] = L0[lay.free_axes[j]];
  for (int u = 0; u < s.user_count(); ++u)
    x0[lay.r_offset + u] = (L0 - s.users[u].geometry.reference).norm() + 1e-6;
  x0[lay.d0_index] = (L0 - s.ap.reference).norm() + 1e-6;

  KernelOptions opt = kernel;
  opt.initial_point = x0;
  const KernelSolution sol = solve(prog, opt);

  CoordSolution out;
  out.status = sol.status;
  out.L = lay.fixed;
  for (std::size_t j = 0; j < lay.free_axes.size(); ++j) out.L[lay.free_axes[j]] = sol.x[j];
  for (int u = 0; u < s.user_count(); ++u) out.r.push_back(sol.x[lay.r_offset + u]);
  out.d0 = sol.x[lay.d0_index];
  return out;
}

PenaltyLedger make_ledger(const PowerTargets& targets, double penalty_fraction) {
  PenaltyLedger l;
  l.original = targets;
  l.working = targets;
  l.epsilon = penalty_fraction * targets.ris;
  for (double p : targets.eu) l.epsilon_m.push_back(penalty_fraction * p);
  l.alpha_m.assign(targets.eu.size(), 0.0);
  return l;
}

void evaluate_indicators(PenaltyLedger& ledger, const CoordSurrogate& at_candidate, const std::vector<double>& r,
                         double d0) {
  ledger.alpha = at_candidate.ris_power(d0) - ledger.original.ris;
  for (std::size_t m = 0; m < ledger.alpha_m.size(); ++m) {
    const int user = at_candidate.eu_users[m];
    ledger.alpha_m[m] = at_candidate.eu_power(static_cast<int>(m), r[user], d0) - ledger.original.eu[m];
  }
}

bool penalty_step(PenaltyLedger& ledger) {
  bool accept = true;
  if (ledger.alpha < 0.0) {
    ledger.working.ris += ledger.epsilon;
    accept = false;
  }
  for (std::size_t m = 0; m < ledger.alpha_m.size(); ++m) {
    if (ledger.alpha_m[m] < 0.0) {
      ledger.working.eu[m] += ledger.epsilon_m[m];
      accept = false;
    }
  }
  return accept;
}

bool objective_improves(const ObjectiveParts& c, const ObjectiveParts& b, AcceptanceRule rule, double slack) {
  if (!(c.total() < b.total())) return false;
  if (rule == AcceptanceRule::kTotal) return true;
  return c.weighted_mse <= b.weighted_mse + slack * std::abs(b.weighted_mse) &&
         c.neg_logdet <= b.neg_logdet + slack * std::abs(b.neg_logdet);
}

PccaResult pcca(const Scenario& s, const PrecoderSet& F, const CVec& phi, const Vec3& L0, const PccaOptions& options) {
  const double noise = s.radio.noise_power;
  const PowerTargets targets = scenario_targets(s);

  PccaResult res;
  res.L = L0;
  ChannelSet ch = build_channels(s, L0, phi);
  res.state = refresh_state(ch, F, noise);
  res.baseline = objective_parts(ch, F, res.state.U, res.state.W, noise);
  res.parts = res.baseline;

  PenaltyLedger ledger = make_ledger(targets, s.penalty_fraction);
  IterationState expansion_state = res.state;
  double best = res.baseline.total();

  for (int n = 0; n < options.max_iterations; ++n) {
    PccaRecord rec;
    rec.iteration = n;
    const CoordSurrogate sur = freeze_surrogate(s, ch, F, expansion_state);
    const CoordSolution sol = solve_coord_program(s, sur, ledger.working, s.ris_box, options.kernel);
    rec.L = sol.L;
    if (!sol.ok()) {
      rec.status = "infeasible";
      rec.working = ledger.working;
      res.trace.push_back(rec);
      break;
    }

    std::optional<ChannelSet> cand;
    try {
      cand = build_channels(s, sol.L, phi);
    } catch (const std::invalid_argument&) {
      rec.status = "degenerate";
      rec.working = ledger.working;
      res.trace.push_back(rec);
      break;
    }
    evaluate_indicators(ledger, freeze_surrogate(s, *cand, F, expansion_state), sol.r, sol.d0);
    bool accept = penalty_step(ledger);
    if (accept) {
      // Guard against surrogate optimism: re-check C3/C4 on the real channel.
      const auto harvested = harvested_powers(*cand, F, s.radio);
      if (harvested.ris < targets.ris - 1e-8) {
        ledger.alpha = harvested.ris - targets.ris;
        ledger.working.ris += ledger.epsilon;
        accept = false;
      }
      for (std::size_t m = 0; m < harvested.eu.size(); ++m) {
        if (harvested.eu[m] < targets.eu[m] - 1e-8) {
          ledger.alpha_m[m] = harvested.eu[m] - targets.eu[m];
          ledger.working.eu[m] += ledger.epsilon_m[m];
          accept = false;
        }
      }
    }
    rec.alpha = ledger.alpha;
    rec.alpha_m = ledger.alpha_m;
    rec.working = ledger.working;

    if (!accept) {
      rec.status = "rejected";
      res.trace.push_back(rec);
      continue;
    }
    ch = std::move(*cand);
    expansion_state = refresh_state(ch, F, noise);
    rec.parts = objective_parts(ch, F, expansion_state.U, expansion_state.W, noise);
    rec.status = "accepted";
    if (objective_improves(rec.parts, res.baseline, options.rule, options.part_slack) && rec.parts.total() < best) {
      best = rec.parts.total();
      res.L = sol.L;
      res.state = expansion_state;
      res.parts = rec.parts;
      res.moved = true;
      rec.status = "improved";
    }
    res.trace.push_back(rec);
  }
  return res;
}

}  // namespace stipt
