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

#include "stipt/ris_coeff_sca.hpp"

#include <cmath>

#include "stipt/complex_embedding.hpp"

namespace stipt {

namespace {

double feasibility_tol(double scale) { return 1e-8 + 1e-12 * std::abs(scale); }

CVec row_times(const CVec& row, Complex s) { return s * row; }

}  // namespace

double PhiCoeffs::objective(const CVec& phi) const {
  return phi.dot(A * phi).real() + (xi.transpose() * phi)(0).real() + offset;
}

double PhiCoeffs::eu_harvest(int m, const CVec& phi) const {
  return phi.dot(Lambda[m] * phi).real() + (omega[m].transpose() * phi)(0).real() + (eu_req[m] - p_tilde[m]);
}

double PhiCoeffs::ris_harvest(const CVec& phi) const { return (elements - phi.squaredNorm()) * c_ris; }

double ris_capture(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio) {
  double c = 0.0;
  for (int k = 0; k < ch.subbands(); ++k) {
    const auto& band = ch.bands[k];
    double s = 0.0;
    for (const auto& Fi : F[k]) s += (Fi.adjoint() * band.v).squaredNorm();
    c += radio.eta[k] * std::norm(band.H_gain) * s;
  }
  return c;
}

PhiCoeffs build_phi_coeffs(const ChannelSet& ch, const PrecoderSet& F, const IterationState& state,
                           const RadioConfig& radio, const PowerTargets& targets) {
  PhiCoeffs c;
  const int N = static_cast<int>(ch.phi.size());
  const int K = ch.subbands();
  const int I = static_cast<int>(ch.iu.size());
  const int M = static_cast<int>(ch.eu.size());
  c.elements = N;
  c.A = CMat::Zero(N, N);
  c.xi = CVec::Zero(N);
  c.Lambda.assign(M, CMat::Zero(N, N));
  c.omega.assign(M, CVec::Zero(N));
  c.eu_req = targets.eu;
  c.p_tilde = targets.eu;
  c.ris_req = targets.ris;

  for (int k = 0; k < K; ++k) {
    const auto& band = ch.bands[k];
    CMat Fs = CMat::Zero(band.v.size(), band.v.size());
    for (const auto& Fi : F[k]) Fs.noalias() += Fi * Fi.adjoint();
    const CVec Fs_v = Fs * band.v;
    const double vFv = band.v.dot(Fs_v).real();

    for (int i = 0; i < I; ++i) {
      const auto& link = ch.iu_link(k, i);
      const CMat Ubar = state.U[k][i] * state.W[k][i] * state.U[k][i].adjoint();
      const CMat Fbar = F[k][i] * state.W[k][i] * state.U[k][i].adjoint();
      const CVec Ur = Ubar * link.r;
      const double A_ki = vFv * link.r.dot(Ur).real();
      // xi_ki = v^H F^s H^H Ubar r - v^H Fbar r
      const Complex xi_ki = Fs_v.dot(link.H.adjoint() * Ur) - band.v.dot(Fbar * link.r);
      c.A.noalias() += (A_ki * std::norm(link.g)) * (link.u.conjugate() * link.u.transpose());
      c.xi += row_times(link.u, 2.0 * link.g * xi_ki);
    }
    for (int m = 0; m < M; ++m) {
      const auto& link = ch.eu_link(k, m);
      const double Lambda_km = static_cast<double>(link.r.size()) * vFv;
      const Complex w_km = Fs_v.dot(link.H.adjoint() * link.r);
      const double Q_km = (link.H * Fs * link.H.adjoint()).trace().real();
      c.Lambda[m].noalias() +=
          (radio.eta[k] * std::norm(link.g) * Lambda_km) * (link.u.conjugate() * link.u.transpose());
      c.omega[m] += row_times(link.u, 2.0 * radio.eta[k] * link.g * w_km);
      c.p_tilde[m] -= radio.eta[k] * Q_km;
    }
  }
  c.A = 0.5 * (c.A + c.A.adjoint()).eval();
  for (auto& L : c.Lambda) L = 0.5 * (L + L.adjoint()).eval();
  c.c_ris = ris_capture(ch, F, radio);
  c.offset = objective_o_tot(ch, F, state.U, state.W, radio.noise_power) - c.objective(ch.phi);
  return c;
}

ConvexProgram build_phi_program(const PhiCoeffs& c, const CVec& phi_bar) {
  const int N = c.elements;
  ConvexProgram prog(2 * N);
  prog.P = 2.0 * embed_hermitian(c.A);
  prog.q = embed_linear(c.xi);
  prog.constant = c.offset;

  for (int n = 0; n < N; ++n) {
    ConeConstraint cone;
    cone.support = {2 * n, 2 * n + 1};
    cone.A = RMat::Identity(2, 2);
    cone.b = RVec::Zero(2);
    cone.c = RVec::Zero(2);
    cone.d = 1.0;
    prog.constraints.push_back(std::move(cone));
  }

  if (c.ris_req > 0.0) {
    const double radius2 = c.c_ris > 0.0 ? N - c.ris_req / c.c_ris : -1.0;
    if (radius2 < N) {
      QuadraticConstraint ball;
      ball.support.resize(2 * N);
      for (int j = 0; j < 2 * N; ++j) ball.support[j] = j;
      ball.Q = RMat::Identity(2 * N, 2 * N);
      ball.a = RVec::Zero(2 * N);
      ball.b = radius2;
      prog.constraints.push_back(std::move(ball));
    }
  }

  for (std::size_t m = 0; m < c.Lambda.size(); ++m) {
    if (!(c.eu_req[m] > 0.0)) continue;
    // 2 Re(phi^H Lambda phi_bar) - phi_bar^H Lambda phi_bar + Re(omega phi) >= p_tilde
    const CVec Lp = c.Lambda[m] * phi_bar;
    const CVec row = 2.0 * Lp.conjugate() + c.omega[m];
    prog.constraints.push_back(
        AffineConstraint{-embed_linear(row), -(c.p_tilde[m] + phi_bar.dot(Lp).real())});
  }
  return prog;
}

CVec initial_phi(int elements, double c_ris, double ris_req) {
  double beta = 0.0;
  if (c_ris > 0.0) beta = 0.95 * std::sqrt(std::max(0.0, 1.0 - ris_req / (elements * c_ris)));
  else if (!(ris_req > 0.0)) beta = 0.95;
  return CVec::Constant(elements, Complex(beta, 0.0));
}

PhiResult solve_phi(const PhiCoeffs& c, const CVec& phi_init, const PhiOptions& options,
                    const std::function<bool(const CVec&)>& verify) {
  PhiResult res;
  res.phi = phi_init;
  double incumbent = c.objective(res.phi);
  res.objective_trace.push_back(incumbent);
  const int N = c.elements;

  auto feasible = [&](const CVec& phi) {
    if (phi.size() && phi.cwiseAbs().maxCoeff() > 1.0 + 1e-12) return false;
    if (c.ris_harvest(phi) < c.ris_req - feasibility_tol(c.ris_req)) return false;
    for (std::size_t m = 0; m < c.Lambda.size(); ++m)
      if (c.eu_harvest(static_cast<int>(m), phi) < c.eu_req[m] - feasibility_tol(c.eu_req[m])) return false;
    return !verify || verify(phi);
  };

  // A ball of zero radius pins phi to 0.
  if (c.ris_req > 0.0 && c.c_ris > 0.0) {
    const double radius2 = N - c.ris_req / c.c_ris;
    if (std::abs(radius2) <= 1e-12 * N) {
      const CVec zero = CVec::Zero(N);
      if (feasible(zero)) {
        res.phi = zero;
        res.objective_trace.push_back(c.objective(zero));
      } else {
        res.kernel_failed = true;
        res.last_status = SolveStatus::kInfeasible;
      }
      return res;
    }
  }

  for (int it = 0; it < options.inner_iterations; ++it) {
    const ConvexProgram prog = build_phi_program(c, res.phi);
    KernelOptions kopt = options.kernel;
    kopt.initial_point = embed(res.phi);
    const KernelSolution sol = solve(prog, kopt);
    res.last_status = sol.status;
    ++res.inner_iterations;
    if (sol.status == SolveStatus::kInfeasible) {
      res.kernel_failed = true;
      break;
    }
    const CVec cand = unembed(sol.x);
    const double value = c.objective(cand);
    if (!feasible(cand) || !(value <= incumbent)) break;
    const double change = std::abs(incumbent - value) / std::max(1.0, std::abs(incumbent));
    res.phi = cand;
    incumbent = value;
    res.objective_trace.push_back(incumbent);
    if (change < options.early_exit) break;
  }
  return res;
}

}  // namespace stipt
