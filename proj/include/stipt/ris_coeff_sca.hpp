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

#include <functional>
#include <vector>

#include "stipt/convex_kernel.hpp"
#include "stipt/precoder_sca.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/wmmse.hpp"

namespace stipt {

/// Reflecting-coefficient subproblem: min phi^H A phi + Re(xi phi) subject to
/// |phi_n| <= 1, (N - phi^H phi) C_RIS >= P^I and, per EU,
/// phi^H Lambda_m phi + Re(omega_m phi) >= p_tilde_m.
struct PhiCoeffs {
  CMat A;
  CVec xi;  // row vector stored as a column
  std::vector<CMat> Lambda;
  std::vector<CVec> omega;
  std::vector<double> p_tilde;   // P^U_m - sum_k eta_k Q_{k,m}
  std::vector<double> eu_req;    // P^U_m
  double c_ris = 0.0;
  double ris_req = 0.0;          // P^I
  int elements = 0;
  double offset = 0.0;  // makes objective() equal O_tot at fixed (U, W)

  double objective(const CVec& phi) const;
  double eu_harvest(int m, const CVec& phi) const;  // phi^H Lambda phi + Re(omega phi) + sum eta Q
  double ris_harvest(const CVec& phi) const;        // (N - phi^H phi) C_RIS
};

PhiCoeffs build_phi_coeffs(const ChannelSet& ch, const PrecoderSet& F, const IterationState& state,
                           const RadioConfig& radio, const PowerTargets& targets);

/// sum_k eta_k |H_k|^2 sum_i ||v_k^H F_ki||^2.
double ris_capture(const ChannelSet& ch, const PrecoderSet& F, const RadioConfig& radio);

/// Real-embedded program with the EU constraints linearized at phi_bar.
ConvexProgram build_phi_program(const PhiCoeffs& c, const CVec& phi_bar);

/// Uniform real start 0.95 sqrt(max(0, 1 - P^I / (N C_RIS))).
CVec initial_phi(int elements, double c_ris, double ris_req);

struct PhiOptions {
  int inner_iterations = 3;
  double early_exit = 1e-6;
  KernelOptions kernel;
};

struct PhiResult {
  CVec phi;
  std::vector<double> objective_trace;
  int inner_iterations = 0;
  bool kernel_failed = false;
  SolveStatus last_status = SolveStatus::kOptimal;
};

/// Inner SCA loop. `verify`, when given, is an extra acceptance test on the
/// candidate (the BCD driver passes a direct channel re-evaluation).
PhiResult solve_phi(const PhiCoeffs& c, const CVec& phi_init, const PhiOptions& options = {},
                    const std::function<bool(const CVec&)>& verify = {});

}  // namespace stipt
