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

#pragma once

#include <vector>

#include "stipt/convex_kernel.hpp"
#include "stipt/scenario.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/wmmse.hpp"

namespace stipt {

/// Harvesting requirements: RIS (P^I) and one per EU (P^U_m), in W.
struct PowerTargets {
  double ris = 0.0;
  std::vector<double> eu;
};

PowerTargets scenario_targets(const Scenario& s);

/// Checks C1-C4 by direct evaluation on the channel.
struct FeasibilityReport {
  bool power = true;       // C2
  bool ris_harvest = true; // C3
  bool eu_harvest = true;  // C4
  bool modulus = true;     // C1
  double transmit_power = 0.0;
  HarvestedPower harvested;

  bool all() const { return power && ris_harvest && eu_harvest && modulus; }
};

FeasibilityReport check_feasibility(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio,
                                    const PowerTargets& targets, double p_t_max, double tol_w = 1e-8);

struct PrecoderCoeffs {
  std::vector<CMat> W_bar;          // [k], N_t x N_t
  MatrixGrid Z_bar;                 // [k][i], d x N_t
  std::vector<CMat> B;              // [k], eta_k H_k^H (I - Phi^H Phi) H_k
  std::vector<std::vector<CMat>> C; // [k][m], eta_k Z_{k,m}^H Z_{k,m}
  double offset = 0.0;              // sum tr(W) + sigma^2 tr(W U^H U) - log|W|
};

PrecoderCoeffs precoder_coeffs(const ChannelSet& ch, const IterationState& state, const RadioConfig& radio);

/// O_tot at fixed (U, W): sum tr(F^H W_bar F) - 2 Re sum tr(Z_bar F) + offset.
double precoder_objective(const PrecoderCoeffs& c, const PrecoderSet& F);

/// Stacks F[k][i] column-major, k outer, i inner, then embeds to reals.
RVec vectorize(const PrecoderSet& F);
PrecoderSet devectorize(const RVec& x, const PrecoderSet& shape);

/// Convex program in vectorize(F) with the harvesting constraints linearized
/// at F_bar. Requirements <= 0 hold for every F and are left out.
ConvexProgram build_precoder_program(const PrecoderCoeffs& c, const PrecoderSet& F_bar, const PowerTargets& targets,
                                     double p_t_max);

struct PrecoderResult {
  PrecoderSet F;
  std::vector<double> objective_trace;  // incumbent objective per inner step, starting at F_init
  int inner_iterations = 0;
  bool kernel_failed = false;
  SolveStatus last_status = SolveStatus::kOptimal;
};

struct PrecoderOptions {
  int inner_iterations = 3;
  double early_exit = 1e-6;
  KernelOptions kernel;
};

/// Inner SCA loop. A candidate replaces the incumbent only if it satisfies
/// the original C2-C4 and does not increase the objective.
PrecoderResult solve_precoders(const ChannelSet& ch, const IterationState& state, const PrecoderSet& F_init,
                               const PowerTargets& targets, double p_t_max, const RadioConfig& radio,
                               const PrecoderOptions& options = {});

}  // namespace stipt
