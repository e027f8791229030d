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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stipt/pcca.hpp"
#include "stipt/precoder_sca.hpp"
#include "stipt/ris_coeff_sca.hpp"
#include "stipt/scenario.hpp"
#include "stipt/wmmse.hpp"

namespace stipt {

/// PropBCD optimizes F, phi and L; FixedLoc keeps L; BeamOpt keeps phi and L.
enum class Mode { kPropBCD, kFixedLoc, kBeamOpt };

const char* to_string(Mode m);
/// Accepts "PropBCD", "FixedLoc", "BeamOpt". Throws std::invalid_argument.
Mode parse_mode(std::string_view name);

struct DesignVariables {
  PrecoderSet F;
  CVec phi;
  Vec3 L = Vec3::Zero();
};

struct IterationRecord {
  int iteration = 0;
  double sum_rate = 0.0;
  double o_tot = 0.0;
  double transmit_power = 0.0;
  double p_ris = 0.0;
  std::vector<double> p_eu;
  Vec3 L = Vec3::Zero();
  bool c1 = true;
  bool c2 = true;
  bool c3 = true;
  bool c4 = true;
  bool feasible() const { return c1 && c2 && c3 && c4; }
};

struct StageTimings {
  double initialize_s = 0.0;
  double precoder_s = 0.0;
  double phi_s = 0.0;
  double coordinate_s = 0.0;
};

struct SolveReport {
  Mode mode = Mode::kPropBCD;
  std::vector<IterationRecord> trace;
  DesignVariables final;
  IterationState final_state;
  double power_split = 0.0;  // energy share tau of the initial precoders
  bool converged = false;
  std::vector<std::string> events;        // block failures, in order
  std::vector<std::vector<PccaRecord>> pcca;  // per outer iteration (PropBCD)
  StageTimings timings;
};

/// Thrown when no feasible starting point exists. The message carries the
/// largest RIS and EU harvest reachable at full power.
class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Initialization {
  DesignVariables vars;
  IterationState state;
  double power_split = 0.0;
};

/// Identity-like information precoders mixed with an energy beam, total
/// power 0.9 P_t^max, energy share found by bisection so that C1-C4 hold.
Initialization initialize(const Scenario& s);

struct BcdOptions {
  int max_outer = 15;
  double early_stop = 1e-6;
  int precoder_rounds = 3;  // (F, then U/W refresh) passes per outer iteration
  PrecoderOptions precoder;
  PhiOptions phi;
  PccaOptions pcca;
};

SolveReport run(const Scenario& s, Mode mode, const BcdOptions& options = {});

}  // namespace stipt
