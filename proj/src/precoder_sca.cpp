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

#include "stipt/precoder_sca.hpp"

#include <cmath>

#include "stipt/complex_embedding.hpp"

namespace stipt {

PowerTargets scenario_targets(const Scenario& s) {
  PowerTargets t;
  t.ris = s.p_ris_req;
  for (int u : s.energy_users()) t.eu.push_back(*s.users[u].power_req);
  return t;
}

FeasibilityReport check_feasibility(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio,
                                    const PowerTargets& targets, double p_t_max, double tol_w) {
  FeasibilityReport r;
  r.transmit_power = transmit_power(F);
  r.harvested = harvested_powers(ch, F, radio);
  r.power = r.transmit_power <= p_t_max + tol_w;
  r.ris_harvest = r.harvested.ris >= targets.ris - tol_w;
  for (std::size_t m = 0; m < r.harvested.eu.size(); ++m)
    r.eu_harvest = r.eu_harvest && r.harvested.eu[m] >= targets.eu[m] - tol_w;
  r.modulus = ch.phi.size() == 0 || ch.phi.cwiseAbs().maxCoeff() <= 1.0 + 1e-12;
  return r;
}

PrecoderCoeffs precoder_coeffs(const ChannelSet& ch, const IterationState& state, const RadioConfig& radio) {
  PrecoderCoeffs c;
  const int K = ch.subbands();
  const int I = static_cast<int>(ch.iu.size());
  const RVec absorb = (1.0 - ch.phi.array().abs2()).matrix();
  c.W_bar.resize(K);
  c.Z_bar.resize(K);
  c.B.resize(K);
  c.C.resize(K);
  for (int k = 0; k < K; ++k) {
    const int nt = static_cast<int>(ch.bands[k].v.size());
    c.W_bar[k] = CMat::Zero(nt, nt);
    for (int i = 0; i < I; ++i) {
      const CMat& Z = ch.iu_link(k, i).Z;
      const CMat UZ = state.U[k][i].adjoint() * Z;
      const CMat& W = state.W[k][i];
      c.W_bar[k].noalias() += UZ.adjoint() * W * UZ;
      c.offset += W.trace().real() + radio.noise_power * (W * state.U[k][i].adjoint() * state.U[k][i]).trace().real() -
                  hermitian_logdet(W);
      c.Z_bar[k].push_back(state.W[k][i] * UZ);
    }
    c.W_bar[k] = 0.5 * (c.W_bar[k] + c.W_bar[k].adjoint()).eval();
    const CMat Hk = ch.bands[k].ris_matrix();
    c.B[k] = radio.eta[k] * (Hk.adjoint() * absorb.cast<Complex>().asDiagonal() * Hk);
    for (std::size_t m = 0; m < ch.eu.size(); ++m) {
      const CMat& Z = ch.eu_link(k, static_cast<int>(m)).Z;
      c.C[k].push_back(radio.eta[k] * (Z.adjoint() * Z));
    }
  }
  return c;
}

double precoder_objective(const PrecoderCoeffs& c, const PrecoderSet& F) {
  double v = c.offset;
  for (std::size_t k = 0; k < F.size(); ++k)
    for (std::size_t i = 0; i < F[k].size(); ++i)
      v += (F[k][i].adjoint() * c.W_bar[k] * F[k][i]).trace().real() - 2.0 * (c.Z_bar[k][i] * F[k][i]).trace().real();
  return v;
}

RVec vectorize(const PrecoderSet& F) {
  Eigen::Index total = 0;
  for (const auto& band : F)
    for (const auto& Fi : band) total += Fi.size();
  CVec z(total);
  Eigen::Index off = 0;
  for (const auto& band : F) {
    for (const auto& Fi : band) {
      z.segment(off, Fi.size()) = Fi.reshaped();
      off += Fi.size();
    }
  }
  return embed(z);
}

PrecoderSet devectorize(const RVec& x, const PrecoderSet& shape) {
  const CVec z = unembed(x);
  PrecoderSet F = shape;
  Eigen::Index off = 0;
  for (auto& band : F) {
    for (auto& Fi : band) {
      Fi = z.segment(off, Fi.size()).reshaped(Fi.rows(), Fi.cols());
      off += Fi.size();
    }
  }
  return F;
}

namespace {

// Stacked coefficients c with Re sum_n c_n vec(F)_n = sum_k,i Re tr(F_bar^H M_k F_ki).
CVec hermitian_form_row(const std::vector<const CMat*>& M, const PrecoderSet& F_bar) {
  std::vector<CMat> blocks;
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < F_bar.size(); ++k) {
    for (const auto& Fb : F_bar[k]) {
      blocks.push_back((*M[k] * Fb).conjugate());
      total += Fb.size();
    }
  }
  CVec out(total);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.segment(off, b.size()) = b.reshaped();
    off += b.size();
  }
  return out;
}

double hermitian_form_value(const std::vector<const CMat*>& M, const PrecoderSet& F) {
  double v = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k)
    for (const auto& Fi : F[k]) v += (Fi.adjoint() * *M[k] * Fi).trace().real();
  return v;
}

AffineConstraint linearized_harvest(const std::vector<const CMat*>& M, const PrecoderSet& F_bar, double target) {
  // 2 Re tr(F_bar^H M F) >= tr(F_bar^H M F_bar) + target, written as a^T x <= b.
  return AffineConstraint{-2.0 * embed_linear(hermitian_form_row(M, F_bar)),
                          -(hermitian_form_value(M, F_bar) + target)};
}

}  // namespace

ConvexProgram build_precoder_program(const PrecoderCoeffs& c, const PrecoderSet& F_bar, const PowerTargets& targets,
                                     double p_t_max) {
  const int K = static_cast<int>(F_bar.size());
  Eigen::Index n = 0;
  for (const auto& band : F_bar)
    for (const auto& Fi : band) n += 2 * Fi.size();
  ConvexProgram prog(static_cast<int>(n));
  prog.P = RMat::Zero(n, n);
  CVec lin(n / 2);
  Eigen::Index off = 0;
  for (int k = 0; k < K; ++k) {
    const RMat Wk = 2.0 * embed_hermitian(c.W_bar[k]);
    for (std::size_t i = 0; i < F_bar[k].size(); ++i) {
      const auto& Fi = F_bar[k][i];
      for (Eigen::Index col = 0; col < Fi.cols(); ++col)
        prog.P.block(2 * (off + col * Fi.rows()), 2 * (off + col * Fi.rows()), Wk.rows(), Wk.cols()) = Wk;
      lin.segment(off, Fi.size()) = c.Z_bar[k][i].transpose().reshaped();
      off += Fi.size();
    }
  }
  prog.q = -2.0 * embed_linear(lin);
  prog.constant = c.offset;

  QuadraticConstraint ball;
  ball.support.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) ball.support[j] = static_cast<int>(j);
  ball.Q = RMat::Identity(n, n);
  ball.a = RVec::Zero(n);
  ball.b = p_t_max;
  prog.constraints.push_back(std::move(ball));

  if (targets.ris > 0.0) {
    std::vector<const CMat*> M;
    for (int k = 0; k < K; ++k) M.push_back(&c.B[k]);
    prog.constraints.push_back(linearized_harvest(M, F_bar, targets.ris));
  }
  for (std::size_t m = 0; m < targets.eu.size(); ++m) {
    if (!(targets.eu[m] > 0.0)) continue;
    std::vector<const CMat*> M;
    for (int k = 0; k < K; ++k) M.push_back(&c.C[k][m]);
    prog.constraints.push_back(linearized_harvest(M, F_bar, targets.eu[m]));
  }
  return prog;
}

PrecoderResult solve_precoders(const ChannelSet& ch, const IterationState& state, const PrecoderSet& F_init,
                               const PowerTargets& targets, double p_t_max, const RadioConfig& radio,
                               const PrecoderOptions& options) {
  PrecoderResult res;
  res.F = F_init;
  const PrecoderCoeffs coeffs = precoder_coeffs(ch, state, radio);
  double incumbent = precoder_objective(coeffs, res.F);
  res.objective_trace.push_back(incumbent);

  if (!(p_t_max > 0.0)) {
    for (auto& band : res.F)
      for (auto& Fi : band) Fi.setZero();
    res.objective_trace.push_back(precoder_objective(coeffs, res.F));
    return res;
  }

  for (int it = 0; it < options.inner_iterations; ++it) {
    const ConvexProgram prog = build_precoder_program(coeffs, res.F, targets, p_t_max);
    KernelOptions kopt = options.kernel;
    kopt.initial_point = vectorize(res.F);
    const KernelSolution sol = solve(prog, kopt);
    res.last_status = sol.status;
    ++res.inner_iterations;
    if (sol.status == SolveStatus::kInfeasible) {
      res.kernel_failed = true;
      break;
    }
    const PrecoderSet cand = devectorize(sol.x, res.F);
    const double value = precoder_objective(coeffs, cand);
    const bool feasible = check_feasibility(ch, cand, radio, targets, p_t_max).all();
    if (!feasible || !(value <= incumbent)) break;
    const double change = std::abs(incumbent - value) / std::max(1.0, std::abs(incumbent));
    res.F = cand;
    incumbent = value;
    res.objective_trace.push_back(incumbent);
    if (change < options.early_exit) break;
  }
  return res;
}

}  // namespace stipt
