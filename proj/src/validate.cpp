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

#include "stipt/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "stipt/bcd.hpp"
#include "stipt/convex_kernel.hpp"
#include "stipt/pcca.hpp"
#include "stipt/precoder_sca.hpp"
#include "stipt/ris_coeff_sca.hpp"
#include "stipt/scenario.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/wmmse.hpp"

namespace stipt {

namespace {

using Rng = std::mt19937_64;

constexpr double kGradTol = 1e-6;
constexpr int kMinorantDraws = 1000;

struct Outcome {
  bool passed = true;
  std::string detail;
};

double rel_diff(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

Scenario small_scenario(std::uint64_t seed, int ap_rows, int ap_cols, int iu, int eu, int ris_rows, int ris_cols,
                        double noise) {
  Scenario base = full_scale_scenario();
  base.radio.noise_power = noise;
  LayoutOptions l = desk_layout();
  l.ap_rows = ap_rows;
  l.ap_cols = ap_cols;
  l.iu_count = iu;
  l.eu_count = eu;
  l.ris_rows = ris_rows;
  l.ris_cols = ris_cols;
  return realize_layout(base, l, seed);
}

CMat random_cmat(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMat M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = Complex(n(rng), n(rng));
  return M;
}

PrecoderSet random_precoders(const Scenario& s, Rng& rng, double power) {
  PrecoderSet F(s.subbands());
  double total = 0.0;
  for (auto& band : F)
    for (int u : s.information_users()) {
      band.push_back(random_cmat(rng, s.ap_antennas(), s.streams(u)));
      total += band.back().squaredNorm();
    }
  for (auto& band : F)
    for (auto& Fi : band) Fi *= std::sqrt(power / total);
  return F;
}

CVec random_phi(Rng& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec phi(n);
  for (int i = 0; i < n; ++i) phi[i] = std::polar(std::sqrt(u(rng)), 2.0 * kPi * u(rng));
  return phi;
}

Vec3 random_position(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  return Vec3(u(rng), u(rng), u(rng));
}

// Central difference of a scalar function of (r, d0) along one axis.
double central(const std::function<double(double, double)>& f, double r, double d, int axis) {
  const double h = 1e-5 * (axis == 0 ? r : d);
  if (axis == 0) return (f(r + h, d) - f(r - h, d)) / (2.0 * h);
  return (f(r, d + h) - f(r, d - h)) / (2.0 * h);
}

Outcome gradient_suite(Rng& rng, const std::function<Scalar2(double, double)>& analytic, bool corrupt) {
  std::uniform_real_distribution<double> dist(0.3, 4.0);
  double worst = 0.0;
  auto value = [&](double r, double d) { return analytic(r, d).value; };
  for (int t = 0; t < 50; ++t) {
    const double r = dist(rng), d = dist(rng);
    Scalar2 a = analytic(r, d);
    if (corrupt) a.grad *= 1.0 + 1e-3;
    for (int axis = 0; axis < 2; ++axis) worst = std::max(worst, rel_diff(a.grad[axis], central(value, r, d, axis)));
    // Hessian rows from differences of the analytic gradient.
    for (int axis = 0; axis < 2; ++axis)
      for (int row = 0; row < 2; ++row) {
        auto g = [&](double rr, double dd) { return analytic(rr, dd).grad[row]; };
        worst = std::max(worst, rel_diff(a.hess(row, axis), central(g, r, d, axis)));
      }
  }
  return {worst <= kGradTol, "max rel err " + fmt(worst)};
}

Outcome minorant_suite(Rng& rng, const std::function<Scalar2(double, double)>& f) {
  std::uniform_real_distribution<double> dist(0.2, 5.0);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < kMinorantDraws; ++t) {
    const double rb = dist(rng), db = dist(rng), r = dist(rng), d = dist(rng);
    const Scalar2 at = f(rb, db);
    const double lin = at.value + at.grad[0] * (r - rb) + at.grad[1] * (d - db);
    const double exact = f(r, d).value;
    const double excess = (lin - exact) / std::max(std::abs(exact), 1e-300);
    if (excess > 1e-12) {
      ++bad;
      worst = std::max(worst, excess);
    }
  }
  return {bad == 0, std::to_string(kMinorantDraws - bad) + "/" + std::to_string(kMinorantDraws) + " draws" +
                        (bad ? ", worst excess " + fmt(worst) : "")};
}

// --- channel ---------------------------------------------------------------

Outcome check_array_vectors(Rng& rng) {
  double worst = 0.0;
  bool first_ok = true;
  for (int t = 0; t < 100; ++t) {
    const auto offsets = upa_offsets(3, 5, 1e-4 * (1 + t % 5), Vec3::UnitY(), Vec3::UnitZ());
    const CVec a = array_vector(random_position(rng) - Vec3(0.0, 1.5, 2.0), offsets, 1e-3);
    worst = std::max(worst, (a.cwiseAbs().array() - 1.0).abs().maxCoeff());
    first_ok = first_ok && std::abs(a[0] - Complex(1.0, 0.0)) < 1e-15;
  }
  return {worst < 1e-12 && first_ok, "max | |a_n| - 1 | = " + fmt(worst)};
}

Outcome check_absorbed(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 2, 2, 1, 1, 4, 4, 1e-11);
  int bad = 0;
  for (int t = 0; t < kMinorantDraws; ++t) {
    const CVec phi = random_phi(rng, s.ris_elements());
    const ChannelSet ch = build_channels(s, s.ris.reference, phi);
    const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
    for (int k = 0; k < s.subbands(); ++k) {
      const CMat HF_in = ch.bands[k].ris_matrix() * F[k][0];
      const double q_in = HF_in.squaredNorm();
      const double q_out = (phi.asDiagonal() * HF_in).squaredNorm();
      if (q_in - q_out < -1e-14 * q_in) ++bad;
    }
  }
  return {bad == 0, std::to_string(bad) + " violations in " + std::to_string(kMinorantDraws) + " draws"};
}

Outcome check_capture_rebuild(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 4, 4, 2, 1, 8, 8, 1e-11);
  const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  double worst = 0.0;
  for (int k = 0; k < s.subbands(); ++k) {
    const CMat H = ch.bands[k].ris_matrix();
    for (const auto& Fi : F[k]) {
      const double matrixwise = (Fi.adjoint() * H.adjoint() * H * Fi).trace().real();
      const double scalar =
          std::norm(ch.bands[k].H_gain) * s.ris_elements() * (ch.bands[k].v.adjoint() * Fi).squaredNorm();
      worst = std::max(worst, rel_diff(matrixwise, scalar));
    }
  }
  return {worst <= 1e-10, "max rel err " + fmt(worst)};
}

Outcome check_cascade_gradient(Rng& rng, bool corrupt) {
  const RadioConfig radio = default_radio();
  // |g| itself must match the closed form used by the coordinate step.
  std::uniform_real_distribution<double> dist(0.3, 4.0);
  double worst_value = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double r = dist(rng), d = dist(rng);
    const double g = std::abs(cascade_gain(r, d, radio.wavelengths[0], radio.absorption[0], radio.g_t, radio.g_r));
    worst_value = std::max(worst_value, rel_diff(g, f_ku(r, d, mu_k(radio, 0), half_absorption(radio, 0)).value));
  }
  Outcome o = gradient_suite(
      rng, [&](double r, double d) { return f_ku(r, d, mu_k(radio, 0), half_absorption(radio, 0)); }, corrupt);
  o.passed = o.passed && worst_value <= 1e-12;
  o.detail += ", |g| closed form " + fmt(worst_value);
  return o;
}

// --- wmmse -----------------------------------------------------------------

Outcome check_bridge(Rng& rng, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const bool big = t % 2 == 0;
    const int iu = 1 + (t / 2) % 2;
    const Scenario s = small_scenario(seed + t, big ? 4 : 2, big ? 4 : 2, iu, 1, 4, 4, 1e-11);
    const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
    const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
    // W* = E_min^{-1} through the MSE path, independent of the rate formula.
    double logdet = 0.0;
    for (int k = 0; k < s.subbands(); ++k)
      for (int i = 0; i < iu; ++i) {
        const CMat U = mmse_receiver(ch, F, k, i, s.radio.noise_power);
        const CMat W = optimal_weight(mse_matrix(ch, F, U, k, i, s.radio.noise_power));
        logdet += hermitian_logdet(W) / std::log(2.0);
      }
    worst = std::max(worst, rel_diff(logdet, rates(ch, F, s.radio.noise_power).sum));
  }
  return {worst <= 1e-9, "max rel err " + fmt(worst)};
}

Outcome check_mmse_stationarity(Rng& rng, std::uint64_t seed, bool corrupt) {
  const Scenario s = small_scenario(seed, 2, 2, 2, 1, 4, 4, 1e-6);
  const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  double worst = 0.0;
  for (int k = 0; k < s.subbands(); ++k)
    for (int i = 0; i < static_cast<int>(F[k].size()); ++i) {
      CMat U = mmse_receiver(ch, F, k, i, s.radio.noise_power);
      if (corrupt) U *= 1.0 + 1e-3;
      const CMat W = random_cmat(rng, U.cols(), U.cols());
      const CMat Wh = W * W.adjoint() + CMat::Identity(U.cols(), U.cols());
      auto g = [&](const CMat& V) { return (Wh * mse_matrix(ch, F, V, k, i, s.radio.noise_power)).trace().real(); };
      for (int t = 0; t < 5; ++t) {
        const CMat D = random_cmat(rng, U.rows(), U.cols());
        const double h = 1e-6 * U.norm() / D.norm();
        const double deriv = (g(U + h * D) - g(U - h * D)) / (2.0 * h);
        const double scale = std::abs(g(U)) * D.norm() / U.norm();
        worst = std::max(worst, std::abs(deriv) / scale);
      }
    }
  return {worst <= kGradTol, "max |dO/dU| / scale " + fmt(worst)};
}

Outcome check_weight_optimality(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 2, 2, 2, 1, 4, 4, 1e-6);
  const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  const IterationState st = refresh_state(ch, F, s.radio.noise_power);
  double worst = 0.0;
  for (int k = 0; k < s.subbands(); ++k)
    for (int i = 0; i < static_cast<int>(F[k].size()); ++i) {
      const CMat E = mse_matrix(ch, F, st.U[k][i], k, i, s.radio.noise_power);
      const CMat& W = st.W[k][i];
      auto g = [&](const CMat& V) { return (V * E).trace().real() - hermitian_logdet(V); };
      for (int t = 0; t < 5; ++t) {
        CMat D = random_cmat(rng, W.rows(), W.cols());
        D = 0.5 * (D + D.adjoint()).eval();
        const double h = 1e-6 * W.norm() / D.norm();
        const double deriv = (g(W + h * D) - g(W - h * D)) / (2.0 * h);
        const double scale = (D * E).norm() + (W.inverse() * D).norm();
        worst = std::max(worst, std::abs(deriv) / scale);
      }
    }
  return {worst <= kGradTol, "max |dO/dW| / scale " + fmt(worst)};
}

// --- kernel ----------------------------------------------------------------

Outcome check_kernel_projection(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int dim = 6;
    RVec c(dim);
    for (int j = 0; j < dim; ++j) c[j] = 3.0 * n(rng);
    if (c.norm() <= 1.0) c *= 2.0 / c.norm();
    ConvexProgram p(dim);
    p.P = 2.0 * RMat::Identity(dim, dim);
    p.q = -2.0 * c;
    QuadraticConstraint ball;
    for (int j = 0; j < dim; ++j) ball.support.push_back(j);
    ball.Q = RMat::Identity(dim, dim);
    ball.a = RVec::Zero(dim);
    ball.b = 1.0;
    p.constraints.push_back(ball);
    const KernelSolution sol = solve(p);
    if (sol.status != SolveStatus::kOptimal) return {false, "status " + std::string(to_string(sol.status))};
    worst = std::max(worst, (sol.x - c / c.norm()).norm());
  }
  return {worst <= 1e-6, "max distance to projection " + fmt(worst)};
}

Outcome check_kernel_infeasible() {
  ConvexProgram p(2);
  RVec a(2);
  a << 1.0, 0.0;
  p.constraints.push_back(AffineConstraint{a, -1.0});
  p.constraints.push_back(AffineConstraint{-a, -1.0});
  const KernelSolution sol = solve(p);
  return {sol.status == SolveStatus::kInfeasible, std::string("status ") + to_string(sol.status)};
}

// --- precoder / reflection -------------------------------------------------

Outcome check_precoder_minorant(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 2, 2, 1, 1, 4, 4, 1e-11);
  const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet Fb = random_precoders(s, rng, s.p_t_max);
  int bad = 0;
  for (int t = 0; t < kMinorantDraws; ++t) {
    const PrecoderSet F = random_precoders(s, rng, s.p_t_max * (0.1 + (t % 10) / 5.0));
    for (int k = 0; k < s.subbands(); ++k) {
      const CMat H = ch.bands[k].ris_matrix();
      const CMat B = H.adjoint() * (CVec::Ones(s.ris_elements()) - ch.phi.cwiseAbs2().cast<Complex>()).asDiagonal() * H;
      const double lin = 2.0 * (Fb[k][0].adjoint() * B * F[k][0]).trace().real() -
                         (Fb[k][0].adjoint() * B * Fb[k][0]).trace().real();
      const double exact = (F[k][0].adjoint() * B * F[k][0]).trace().real();
      if (lin > exact + 1e-12 * std::abs(exact)) ++bad;
    }
  }
  return {bad == 0, std::to_string(bad) + " violations"};
}

Outcome check_phi_objective(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 2, 2, 2, 1, 4, 4, 1e-6);
  ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  const IterationState st = refresh_state(ch, F, s.radio.noise_power);
  const PhiCoeffs c = build_phi_coeffs(ch, F, st, s.radio, scenario_targets(s));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const CVec phi = random_phi(rng, s.ris_elements());
    set_reflection(ch, phi);
    worst = std::max(worst, rel_diff(c.objective(phi), objective_o_tot(ch, F, st.U, st.W, s.radio.noise_power)));
  }
  return {worst <= 1e-8, "max rel err " + fmt(worst)};
}

Outcome check_phi_minorant(Rng& rng, std::uint64_t seed) {
  const Scenario s = small_scenario(seed, 2, 2, 1, 2, 4, 4, 1e-11);
  const ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, s.ris_elements()));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  const IterationState st = refresh_state(ch, F, s.radio.noise_power);
  const PhiCoeffs c = build_phi_coeffs(ch, F, st, s.radio, scenario_targets(s));
  int bad = 0;
  for (int t = 0; t < kMinorantDraws; ++t) {
    const CVec pb = random_phi(rng, s.ris_elements());
    const CVec p = random_phi(rng, s.ris_elements());
    for (const auto& L : c.Lambda) {
      const double lin = 2.0 * pb.dot(L * p).real() - pb.dot(L * pb).real();
      const double exact = p.dot(L * p).real();
      if (lin > exact + 1e-12 * std::max(std::abs(exact), 1e-300)) ++bad;
    }
  }
  return {bad == 0, std::to_string(bad) + " violations"};
}

Outcome check_distance_minorant(Rng& rng) {
  int bad = 0;
  for (int t = 0; t < kMinorantDraws; ++t) {
    const Vec3 s = random_position(rng), Lb = random_position(rng), L = random_position(rng);
    const double nb = (Lb - s).norm();
    const double lin = nb + (Lb - s).dot(L - Lb) / nb;
    if (lin > (L - s).norm() + 1e-12) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " violations"};
}

// --- full level ------------------------------------------------------------

Outcome check_bcd_run(std::uint64_t seed) {
  const Scenario s = desk_scenario(seed);
  const SolveReport rep = run(s, Mode::kPropBCD);
  double worst = 0.0;
  bool feasible = true;
  for (std::size_t j = 0; j < rep.trace.size(); ++j) {
    feasible = feasible && rep.trace[j].feasible();
    if (j > 0) {
      const double prev = rep.trace[j - 1].o_tot;
      worst = std::max(worst, (rep.trace[j].o_tot - prev) / std::max(1.0, std::abs(prev)));
    }
  }
  return {feasible && worst <= 1e-6,
          std::string(feasible ? "feasible" : "infeasible iterate") + ", worst relative increase " + fmt(worst)};
}

Outcome check_phi_grid(Rng& rng, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    Scenario s = small_scenario(seed + t, 2, 2, 1, 0, 1, 1, 1e-6);
    s.p_ris_req = 0.0;
    ChannelSet ch = build_channels(s, s.ris.reference, random_phi(rng, 1));
    const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
    const IterationState st = refresh_state(ch, F, s.radio.noise_power);
    const PhiCoeffs c = build_phi_coeffs(ch, F, st, s.radio, scenario_targets(s));
    const PhiResult res = solve_phi(c, ch.phi);
    double grid = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= 10; ++a)
      for (int p = 0; p < 72; ++p) {
        CVec phi(1);
        phi[0] = std::polar(a / 10.0, 2.0 * kPi * p / 72.0);
        grid = std::min(grid, c.objective(phi));
      }
    worst = std::max(worst, (c.objective(res.phi) - grid) / std::max(1.0, std::abs(grid)));
  }
  return {worst <= 1e-3, "max excess over grid " + fmt(worst)};
}

// Surrogate objective of the coordinate step written out from its constants:
// sum E f^2(r, d0) + F grad f~ . (r, d0).
double surrogate_value(const CoordSurrogate& sur, int user, double r, double d0) {
  double v = 0.0;
  for (const auto& t : sur.objective) {
    if (t.user != user) continue;
    const double f = t.mu * std::exp(-t.Kk * (r + d0)) / (r * d0);
    v += t.E * f * f + t.F * (t.grad_f_tilde[0] * r + t.grad_f_tilde[1] * d0);
  }
  return v;
}

template <class Fn>
double golden_min(const Fn& fn, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 80; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fn(d);
    }
  }
  return std::min({fn(lo), fn(hi), fc, fd});
}

// Value of the coordinate program with L held fixed: the auxiliary distances
// range over [|L - s|, rmax] and the objective is convex in them.
double placement_value(const Scenario& s, const CoordSurrogate& sur, const Vec3& L, double rmax) {
  const double d_lo = std::max((L - s.ap.reference).norm(), 1e-9);
  if (d_lo > rmax) return std::numeric_limits<double>::infinity();
  auto inner = [&](double d0) {
    double total = 0.0;
    for (int user : s.information_users()) {
      const double r_lo = std::max((L - s.users[user].geometry.reference).norm(), 1e-9);
      if (r_lo > rmax) return std::numeric_limits<double>::infinity();
      total += golden_min([&](double r) { return surrogate_value(sur, user, r, d0); }, r_lo, rmax);
    }
    return total;
  };
  return golden_min(inner, d_lo, rmax);
}

Outcome check_coordinate_grid(Rng& rng, std::uint64_t seed) {
  Scenario s = small_scenario(seed, 2, 2, 1, 0, 2, 2, 1e-11);
  s.p_ris_req = 0.0;
  s.ris_box = RisBox{AxisBounds{0.0, 3.0}, AxisBounds{0.0, 3.0}, AxisBounds{0.0, 3.0}};
  const CVec phi = CVec::Constant(s.ris_elements(), Complex(0.9, 0.0));
  const PrecoderSet F = random_precoders(s, rng, s.p_t_max);
  const ChannelSet ch = build_channels(s, s.ris.reference, phi);
  const CoordSurrogate sur = freeze_surrogate(s, ch, F, refresh_state(ch, F, s.radio.noise_power));
  const CoordSolution sol = solve_coord_program(s, sur, scenario_targets(s), s.ris_box);
  if (!sol.ok()) return {false, "coordinate program reported infeasible"};
  double solved = 0.0;
  for (int user : s.information_users()) solved += surrogate_value(sur, user, sol.r[user], sol.d0);

  const double rmax = coordinate_radius_bound(s, sur.L);
  double best = std::numeric_limits<double>::infinity();
  Vec3 arg = Vec3::Zero();
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b)
      for (int c = 0; c <= 20; ++c) {
        const Vec3 L(0.15 * a, 0.15 * b, 0.15 * c);
        const double v = placement_value(s, sur, L, rmax);
        if (v < best) {
          best = v;
          arg = L;
        }
      }
  // Worst value within 1 cm of the grid optimum.
  double envelope = best;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Vec3 d(u(rng), u(rng), u(rng));
    if (d.norm() > 1.0) continue;
    envelope = std::max(envelope, placement_value(s, sur, arg + 1e-2 * d, rmax));
  }
  std::ostringstream os;
  os << "solver " << fmt(solved) << ", grid " << fmt(best) << ", 1 cm envelope " << fmt(envelope)
     << ", |L - grid argmin| " << fmt((sol.L - arg).norm()) << " m";
  return {solved <= envelope, os.str()};
}

}  // namespace

std::vector<std::string> fault_names() { return {"f_ku", "f_ku_squared", "h_k", "mmse_receiver"}; }

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  std::vector<CheckResult> out;
  Rng rng(options.seed);
  const auto seed = options.seed;
  const auto& fault = options.fault;
  auto add = [&](const char* suite, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.suite = suite;
    r.name = name;
    try {
      const Outcome o = body();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };

  const RadioConfig radio = default_radio();
  const double mu = mu_k(radio, 0), Kk = half_absorption(radio, 0), rho = rho_k(radio, 0);
  auto h_as_scalar2 = [&](double, double d) {
    const Scalar1 h = h_k(d, rho, Kk);
    Scalar2 s;
    s.value = h.value;
    s.grad = Eigen::Vector2d(0.0, h.deriv);
    s.hess(1, 1) = h.second;
    return s;
  };

  add("channel", "array_unit_modulus", [&] { return check_array_vectors(rng); });
  add("channel", "ris_absorbs_nonnegative", [&] { return check_absorbed(rng, seed); });
  add("channel", "capture_rebuild", [&] { return check_capture_rebuild(rng, seed); });
  add("channel", "cascade_gain_gradient", [&] { return check_cascade_gradient(rng, fault == "f_ku"); });
  add("wmmse", "logdet_rate_bridge", [&] { return check_bridge(rng, seed); });
  add("wmmse", "mmse_stationarity", [&] { return check_mmse_stationarity(rng, seed, fault == "mmse_receiver"); });
  add("wmmse", "weight_optimality", [&] { return check_weight_optimality(rng, seed); });
  add("kernel", "ball_projection", [&] { return check_kernel_projection(rng); });
  add("kernel", "infeasible_detection", [&] { return check_kernel_infeasible(); });
  add("precoder", "harvest_minorant", [&] { return check_precoder_minorant(rng, seed); });
  add("reflection", "objective_matches_o_tot", [&] { return check_phi_objective(rng, seed); });
  add("reflection", "eu_harvest_minorant", [&] { return check_phi_minorant(rng, seed); });
  add("coordinate", "f_gradient",
      [&] { return gradient_suite(rng, [&](double r, double d) { return f_ku(r, d, mu, Kk); }, fault == "f_ku"); });
  add("coordinate", "f_squared_gradient", [&] {
    return gradient_suite(rng, [&](double r, double d) { return f_ku_squared(r, d, mu, Kk); },
                          fault == "f_ku_squared");
  });
  add("coordinate", "h_gradient", [&] { return gradient_suite(rng, h_as_scalar2, fault == "h_k"); });
  add("coordinate", "f_minorant",
      [&] { return minorant_suite(rng, [&](double r, double d) { return f_ku(r, d, mu, Kk); }); });
  add("coordinate", "f_squared_minorant",
      [&] { return minorant_suite(rng, [&](double r, double d) { return f_ku_squared(r, d, mu, Kk); }); });
  add("coordinate", "h_minorant", [&] { return minorant_suite(rng, h_as_scalar2); });
  add("coordinate", "distance_minorant", [&] { return check_distance_minorant(rng); });

  if (options.full) {
    add("bcd", "monotone_and_feasible", [&] { return check_bcd_run(seed); });
    add("oracle", "reflection_grid_720", [&] { return check_phi_grid(rng, seed); });
    add("oracle", "coordinate_grid_21x21x21", [&] { return check_coordinate_grid(rng, seed); });
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string format_checks(const std::vector<CheckResult>& results) {
  std::size_t w = 0;
  for (const auto& r : results) w = std::max(w, r.suite.size() + 1 + r.name.size());
  std::ostringstream os;
  for (const auto& r : results) {
    const std::string id = r.suite + "/" + r.name;
    os << (r.passed ? "PASS  " : "FAIL  ") << id << std::string(w - id.size() + 2, ' ') << std::fixed
       << std::setprecision(2) << std::setw(7) << r.seconds << " s  " << r.detail << '\n';
  }
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  os << results.size() - failed << "/" << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace stipt
