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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "helpers.hpp"
#include "stipt/bcd.hpp"
#include "stipt/precoder_sca.hpp"
#include "stipt/wmmse.hpp"

using namespace stipt;
using namespace stipt::test;

namespace {

struct Instance {
  Scenario s;
  ChannelSet ch;
  PrecoderSet F;
  IterationState st;
};

Instance instance(std::uint64_t seed, double power) {
  Rng rng(seed);
  Instance in{desk_scenario(seed), {}, {}, {}};
  in.ch = build_channels(in.s, in.s.ris.reference, random_phi(rng, in.s.ris_elements()));
  in.F = random_precoders(in.s, rng, power);
  in.st = refresh_state(in.ch, in.F, in.s.radio.noise_power);
  return in;
}

double quad(const PrecoderSet& F, const PrecoderSet& G, const std::vector<CMat>& M) {
  double v = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k)
    for (std::size_t i = 0; i < F[k].size(); ++i) v += (F[k][i].adjoint() * M[k] * G[k][i]).trace().real();
  return v;
}

}  // namespace

TEST_SUITE("precoder_sca") {
  TEST_CASE("objective equals O_tot at fixed (U, W)") {
    Instance in = instance(3, 6.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
      const PrecoderSet G = random_precoders(in.s, rng, 0.5 + t);
      CHECK(precoder_objective(c, G) ==
            doctest::Approx(objective_o_tot(in.ch, G, in.st.U, in.st.W, in.s.radio.noise_power)).epsilon(1e-9));
    }
  }

  TEST_CASE("vectorize round trip and program objective") {
    Instance in = instance(4, 4.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    const RVec x = vectorize(in.F);
    const PrecoderSet back = devectorize(x, in.F);
    for (std::size_t k = 0; k < in.F.size(); ++k)
      for (std::size_t i = 0; i < in.F[k].size(); ++i) CHECK((back[k][i] - in.F[k][i]).norm() == 0.0);
    const ConvexProgram prog = build_precoder_program(c, in.F, scenario_targets(in.s), in.s.p_t_max);
    CHECK(prog.objective(x) == doctest::Approx(precoder_objective(c, in.F)).epsilon(1e-10));
    CHECK(constraint_value(prog.constraints[0], x) == doctest::Approx(transmit_power(in.F) - in.s.p_t_max));
  }

  TEST_CASE("harvest coefficient matrices are PSD and reproduce harvested power") {
    Instance in = instance(5, 8.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    for (int k = 0; k < in.s.subbands(); ++k) {
      CHECK(Eigen::SelfAdjointEigenSolver<CMat>(c.B[k]).eigenvalues().minCoeff() >= -1e-12 * c.B[k].norm());
      CHECK(Eigen::SelfAdjointEigenSolver<CMat>(c.W_bar[k]).eigenvalues().minCoeff() >= -1e-9 * c.W_bar[k].norm());
    }
    const auto hp = harvested_powers(in.ch, in.F, in.s.radio);
    CHECK(quad(in.F, in.F, c.B) == doctest::Approx(hp.ris).epsilon(1e-10));
    for (std::size_t m = 0; m < hp.eu.size(); ++m) {
      std::vector<CMat> Cm;
      for (int k = 0; k < in.s.subbands(); ++k) Cm.push_back(c.C[k][m]);
      CHECK(quad(in.F, in.F, Cm) == doctest::Approx(hp.eu[m]).epsilon(1e-10));
    }
  }

  TEST_CASE("linearized harvest is exact at the expansion point") {
    Instance in = instance(6, 8.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    const PowerTargets tg = scenario_targets(in.s);
    const ConvexProgram prog = build_precoder_program(c, in.F, tg, in.s.p_t_max);
    REQUIRE(prog.constraints.size() == 2 + tg.eu.size());
    const RVec x = vectorize(in.F);
    const auto hp = harvested_powers(in.ch, in.F, in.s.radio);
    const double scale = std::max(std::abs(hp.ris), tg.ris);
    CHECK(std::abs(constraint_value(prog.constraints[1], x) - (tg.ris - hp.ris)) <= 1e-9 * scale);
    for (std::size_t m = 0; m < tg.eu.size(); ++m)
      CHECK(std::abs(constraint_value(prog.constraints[2 + m], x) - (tg.eu[m] - hp.eu[m])) <=
            1e-9 * std::max(hp.eu[m], tg.eu[m]));
  }

  TEST_CASE("linearized harvest never exceeds the quadratic") {
    Instance in = instance(7, 8.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    Rng rng(2);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      const PrecoderSet F = random_precoders(in.s, rng, 0.01 + 0.02 * t);
      const double exact = quad(F, F, c.B);
      const double lin = 2.0 * quad(in.F, F, c.B) - quad(in.F, in.F, c.B);
      if (lin > exact + 1e-12 * std::abs(exact)) ++bad;
    }
    CHECK(bad == 0);
  }

  TEST_CASE("zero efficiencies turn positive targets infeasible and zero targets vacuous") {
    Instance in = instance(8, 5.0);
    RadioConfig radio = in.s.radio;
    radio.eta.assign(radio.eta.size(), 0.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, radio);
    const PowerTargets tg = scenario_targets(in.s);
    const ConvexProgram prog = build_precoder_program(c, in.F, tg, in.s.p_t_max);
    const RVec x = vectorize(in.F);
    CHECK(constraint_value(prog.constraints[1], x) == doctest::Approx(tg.ris));
    CHECK(solve(prog).status == SolveStatus::kInfeasible);
    PowerTargets none;
    none.eu.assign(tg.eu.size(), 0.0);
    CHECK(build_precoder_program(c, in.F, none, in.s.p_t_max).constraints.size() == 1);
  }

  TEST_CASE("zero budget gives zero precoders") {
    Instance in = instance(9, 5.0);
    PowerTargets none;
    none.eu.assign(in.s.energy_users().size(), 0.0);
    PrecoderSet zero = in.F;
    for (auto& band : zero)
      for (auto& Fi : band) Fi.setZero();
    const PrecoderResult r = solve_precoders(in.ch, in.st, zero, none, 0.0, in.s.radio);
    CHECK(transmit_power(r.F) == 0.0);
    const PrecoderCoeffs c = precoder_coeffs(in.ch, in.st, in.s.radio);
    CHECK(r.objective_trace.back() == doctest::Approx(c.offset));
  }

  TEST_CASE("single-stream user converges to eigen-beamforming") {
    Rng rng(12);
    const int nt = 4;
    ChannelSet ch;
    ch.bands.resize(1);
    ch.bands[0].v = CVec::Ones(nt);
    ch.bands[0].e = CVec::Ones(1);
    ch.bands[0].H_gain = 0.0;
    ch.phi = CVec::Ones(1);
    UserLink link;
    link.Z = random_cmat(rng, 2, nt);
    ch.bands[0].links.push_back(link);
    ch.iu = {0};
    RadioConfig radio = default_radio();
    radio.eta = {0.5};
    radio.noise_power = 1.0;
    const double P = 2.0;

    PrecoderSet F{{random_cmat(rng, nt, 1)}};
    F[0][0] *= std::sqrt(0.5 * P) / F[0][0].norm();
    PowerTargets none;
    for (int round = 0; round < 60; ++round) {
      const IterationState st = refresh_state(ch, F, 1.0);
      const PrecoderResult r = solve_precoders(ch, st, F, none, P, radio);
      for (std::size_t j = 1; j < r.objective_trace.size(); ++j)
        CHECK(r.objective_trace[j] <= r.objective_trace[j - 1] + 1e-9 * std::abs(r.objective_trace[j - 1]));
      F = r.F;
    }
    const double smax = Eigen::JacobiSVD<CMat>(link.Z).singularValues()[0];
    const double o_oracle = 1.0 - std::log(1.0 + P * smax * smax);
    const double o_found = refresh_state(ch, F, 1.0).o_tot;
    CHECK(std::abs(o_found - o_oracle) <= 1e-3);
  }

  TEST_CASE("output respects the 10 W budget and the harvest targets") {
    for (std::uint64_t seed : {1, 2}) {
      const Scenario s = desk_scenario(seed);
      const Initialization init = initialize(s);
      const ChannelSet ch = build_channels(s, init.vars.L, init.vars.phi);
      const PowerTargets tg = scenario_targets(s);
      REQUIRE(check_feasibility(ch, init.vars.F, s.radio, tg, s.p_t_max).all());
      const PrecoderResult r = solve_precoders(ch, init.state, init.vars.F, tg, s.p_t_max, s.radio);
      CHECK(transmit_power(r.F) <= 10.0 + 1e-8);
      CHECK(check_feasibility(ch, r.F, s.radio, tg, s.p_t_max).all());
      CHECK(r.objective_trace.size() >= 2);
      for (std::size_t j = 1; j < r.objective_trace.size(); ++j)
        CHECK(r.objective_trace[j] <= r.objective_trace[j - 1]);
    }
  }
}
