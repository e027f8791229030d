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

#include "stipt/bcd.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

namespace stipt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

PrecoderSet zero_precoders(const Scenario& s) {
  PrecoderSet F(s.subbands());
  for (int k = 0; k < s.subbands(); ++k)
    for (int u : s.information_users()) F[k].push_back(CMat::Zero(s.ap_antennas(), s.streams(u)));
  return F;
}

void scale_to_power(PrecoderSet& F, double power) {
  const double p = transmit_power(F);
  if (!(p > 0.0)) return;
  const double a = std::sqrt(power / p);
  for (auto& band : F)
    for (auto& Fi : band) Fi *= a;
}

// Each IU gets its own run of AP antennas, one per stream.
PrecoderSet information_start(const Scenario& s, double power) {
  PrecoderSet F = zero_precoders(s);
  const int nt = s.ap_antennas();
  for (auto& band : F) {
    int next = 0;
    for (auto& Fi : band)
      for (int c = 0; c < Fi.cols(); ++c) Fi(next++ % nt, c) = 1.0;
  }
  scale_to_power(F, power);
  return F;
}

// Dominant eigenvector of the requirement-weighted harvest matrices.
PrecoderSet energy_start(const Scenario& s, const ChannelSet& ch, const PowerTargets& t, double power) {
  PrecoderSet F = zero_precoders(s);
  const int K = s.subbands();
  const int nt = s.ap_antennas();
  std::vector<double> top(K, 0.0);
  std::vector<CVec> beam(K);
  for (int k = 0; k < K; ++k) {
    CMat M = CMat::Zero(nt, nt);
    if (t.ris > 0.0) {
      const CMat Hk = ch.bands[k].ris_matrix();
      M += Hk.adjoint() * Hk / t.ris;
    }
    for (std::size_t m = 0; m < t.eu.size(); ++m) {
      if (!(t.eu[m] > 0.0)) continue;
      const CMat& Z = ch.eu_link(k, static_cast<int>(m)).Z;
      M += Z.adjoint() * Z / t.eu[m];
    }
    M *= s.radio.eta[k];
    Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (M + M.adjoint()));
    top[k] = std::max(0.0, eig.eigenvalues()[nt - 1]);
    beam[k] = eig.eigenvectors().col(nt - 1);
  }
  double total = 0.0;
  for (double v : top) total += v;
  for (int k = 0; k < K; ++k) {
    const double share = total > 0.0 ? top[k] / total : 1.0 / K;
    const int I = static_cast<int>(F[k].size());
    for (auto& Fi : F[k]) Fi.col(0) = std::sqrt(share * power / I) * beam[k];
  }
  return F;
}

PrecoderSet mix(const PrecoderSet& info, const PrecoderSet& energy, double tau, double power) {
  PrecoderSet F = info;
  for (std::size_t k = 0; k < F.size(); ++k)
    for (std::size_t i = 0; i < F[k].size(); ++i)
      F[k][i] = std::sqrt(1.0 - tau) * info[k][i] + std::sqrt(tau) * energy[k][i];
  scale_to_power(F, power);
  return F;
}

std::string reach_diagnostic(const Scenario& s, const ChannelSet& ch) {
  const double nt = s.ap_antennas();
  const double n = s.ris_elements();
  double ris = 0.0;
  std::vector<double> eu(ch.eu.size(), 0.0);
  for (int k = 0; k < ch.subbands(); ++k) {
    const double eta = s.radio.eta[k];
    ris = std::max(ris, eta * n * std::norm(ch.bands[k].H_gain) * nt);
    for (std::size_t m = 0; m < ch.eu.size(); ++m) {
      const auto& link = ch.eu_link(k, static_cast<int>(m));
      const double nr = static_cast<double>(link.r.size());
      const double amp = (std::abs(link.h) + std::abs(link.g) * n) * std::sqrt(nr * nt);
      eu[m] = std::max(eu[m], eta * amp * amp);
    }
  }
  std::ostringstream os;
  os << "no feasible initial point; reachable at full power: P_RIS <= " << ris * s.p_t_max << " W";
  for (std::size_t m = 0; m < eu.size(); ++m) os << ", P_EU[" << m << "] <= " << eu[m] * s.p_t_max << " W";
  return os.str();
}

IterationRecord make_record(int it, const Scenario& s, const ChannelSet& ch, const PrecoderSet& F,
                            const IterationState& st, const PowerTargets& targets) {
  IterationRecord r;
  r.iteration = it;
  r.sum_rate = st.sum_rate;
  r.o_tot = st.o_tot;
  const FeasibilityReport f = check_feasibility(ch, F, s.radio, targets, s.p_t_max);
  r.transmit_power = f.transmit_power;
  r.p_ris = f.harvested.ris;
  r.p_eu = f.harvested.eu;
  r.L = ch.ris_position;
  r.c1 = f.modulus;
  r.c2 = f.power;
  r.c3 = f.ris_harvest;
  r.c4 = f.eu_harvest;
  return r;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kPropBCD: return "PropBCD";
    case Mode::kFixedLoc: return "FixedLoc";
    case Mode::kBeamOpt: return "BeamOpt";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  if (name == "PropBCD") return Mode::kPropBCD;
  if (name == "FixedLoc") return Mode::kFixedLoc;
  if (name == "BeamOpt") return Mode::kBeamOpt;
  throw std::invalid_argument("unknown mode \"" + std::string(name) + "\"");
}

Initialization initialize(const Scenario& s) {
  validate(s);
  const PowerTargets targets = scenario_targets(s);
  const double power = 0.9 * s.p_t_max;
  const int N = s.ris_elements();
  const Vec3 L0 = s.ris.reference;

  ChannelSet ch = build_channels(s, L0, CVec::Constant(N, Complex(0.95, 0.0)));
  const PrecoderSet info = information_start(s, power);
  const PrecoderSet energy = energy_start(s, ch, targets, power);

  auto attempt = [&](double tau, double margin, Initialization& out) {
    PrecoderSet F = mix(info, energy, tau, power);
    const CVec phi = initial_phi(N, ris_capture(ch, F, s.radio), targets.ris);
    set_reflection(ch, phi);
    PowerTargets strict = targets;
    strict.ris *= margin;
    for (auto& p : strict.eu) p *= margin;
    if (!check_feasibility(ch, F, s.radio, strict, s.p_t_max).all()) return false;
    if (!check_feasibility(ch, F, s.radio, targets, s.p_t_max).all()) return false;
    out.vars.F = std::move(F);
    out.vars.phi = phi;
    out.vars.L = L0;
    out.power_split = tau;
    return true;
  };

  Initialization init;
  bool found = false;
  for (double margin : {1.05, 1.0}) {
    if (attempt(0.0, margin, init)) {
      found = true;
      break;
    }
    if (!attempt(1.0, margin, init)) continue;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      Initialization trial;
      if (attempt(mid, margin, trial)) hi = mid;
      else lo = mid;
    }
    found = attempt(hi, margin, init);
    if (found) break;
  }
  if (!found) throw InitializationError(reach_diagnostic(s, ch));

  set_reflection(ch, init.vars.phi);
  init.state = refresh_state(ch, init.vars.F, s.radio.noise_power);
  return init;
}

SolveReport run(const Scenario& s, Mode mode, const BcdOptions& options) {
  SolveReport rep;
  rep.mode = mode;
  const double noise = s.radio.noise_power;
  const PowerTargets targets = scenario_targets(s);

  auto t0 = Clock::now();
  Initialization init = initialize(s);
  rep.timings.initialize_s = seconds_since(t0);
  rep.power_split = init.power_split;
  DesignVariables x = init.vars;
  IterationState st = init.state;
  ChannelSet ch = build_channels(s, x.L, x.phi);
  rep.trace.push_back(make_record(0, s, ch, x.F, st, targets));

  for (int it = 1; it <= options.max_outer; ++it) {
    const double previous = st.o_tot;

    t0 = Clock::now();
    for (int round = 0; round < std::max(1, options.precoder_rounds); ++round) {
      const PrecoderResult pres = solve_precoders(ch, st, x.F, targets, s.p_t_max, s.radio, options.precoder);
      if (pres.kernel_failed) {
        rep.events.push_back("iteration " + std::to_string(it) + ": precoder subproblem infeasible, kept previous F");
        spdlog::info("{}", rep.events.back());
      }
      x.F = pres.F;
      st = refresh_state(ch, x.F, noise);
      if (pres.kernel_failed) break;
    }
    rep.timings.precoder_s += seconds_since(t0);

    if (mode != Mode::kBeamOpt) {
      t0 = Clock::now();
      const PhiCoeffs coeffs = build_phi_coeffs(ch, x.F, st, s.radio, targets);
      ChannelSet probe = ch;
      auto verify = [&](const CVec& phi) {
        set_reflection(probe, phi);
        return check_feasibility(probe, x.F, s.radio, targets, s.p_t_max).all();
      };
      const PhiResult phres = solve_phi(coeffs, x.phi, options.phi, verify);
      if (phres.kernel_failed) {
        rep.events.push_back("iteration " + std::to_string(it) + ": reflection subproblem infeasible, kept previous phi");
        spdlog::info("{}", rep.events.back());
      }
      x.phi = phres.phi;
      set_reflection(ch, x.phi);
      st = refresh_state(ch, x.F, noise);
      rep.timings.phi_s += seconds_since(t0);
    }

    if (mode == Mode::kPropBCD) {
      t0 = Clock::now();
      PccaResult pr = pcca(s, x.F, x.phi, x.L, options.pcca);
      rep.pcca.push_back(pr.trace);
      if (pr.moved) {
        x.L = pr.L;
        ch = build_channels(s, x.L, x.phi);
        st = pr.state;
      }
      rep.timings.coordinate_s += seconds_since(t0);
    }

    rep.trace.push_back(make_record(it, s, ch, x.F, st, targets));
    const double change = std::abs(previous - st.o_tot) / std::max(1.0, std::abs(previous));
    if (change < options.early_stop) {
      rep.converged = true;
      break;
    }
  }
  rep.final = x;
  rep.final_state = st;
  return rep;
}

}  // namespace stipt
