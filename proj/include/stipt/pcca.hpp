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

#include <optional>
#include <string>
#include <vector>

#include "stipt/convex_kernel.hpp"
#include "stipt/precoder_sca.hpp"
#include "stipt/scenario.hpp"
#include "stipt/thz_channel.hpp"
#include "stipt/wmmse.hpp"

namespace stipt {

struct Scalar2 {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();  // d/dr, d/dd0
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

/// Cascaded-gain magnitude mu exp(-Kk (r + d0)) / (r d0) with gradient and
/// Hessian. Throws std::invalid_argument for r <= 0 or d0 <= 0.
Scalar2 f_ku(double r, double d0, double mu, double Kk);
/// f_ku squared.
Scalar2 f_ku_squared(double r, double d0, double mu, double Kk);

struct Scalar1 {
  double value = 0.0;
  double deriv = 0.0;
  double second = 0.0;
};

/// rho exp(-2 Kk d0) / d0^2. Throws std::invalid_argument for d0 <= 0.
Scalar1 h_k(double d0, double rho, double Kk);

double mu_k(const RadioConfig& radio, int k);   // g_t g_r lambda / (8 sqrt(pi^3))
double rho_k(const RadioConfig& radio, int k);  // (g_t lambda / 4 pi)^2, equals |H_k|^2 d0^2 e^{K d0}
double half_absorption(const RadioConfig& radio, int k);

/// Constants of the coordinate surrogate frozen at one RIS coordinate.
struct CoordSurrogate {
  Vec3 L = Vec3::Zero();
  double d0_tilde = 0.0;
  std::vector<double> r_tilde;  // per scenario user

  struct ObjectiveTerm {
    int user = 0;  // scenario index of the IU
    int k = 0;
    double E = 0.0;   // A_ki |u phi|^2
    double F = 0.0;   // Re(exp(-j 2 pi (r~ + d~) / lambda) 2 xi_ki u phi)
    double mu = 0.0;
    double Kk = 0.0;
    Eigen::Vector2d grad_f_tilde = Eigen::Vector2d::Zero();
  };
  std::vector<ObjectiveTerm> objective;

  // [m][k]
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<double>> chi;
  std::vector<double> eta_q;  // sum_k eta_k Q_km per EU
  std::vector<double> A_eu, B_eu, C_eu;

  std::vector<double> D;  // per sub-band
  std::vector<double> rho;
  std::vector<double> Kk;
  std::vector<double> mu;
  double A_ris = 0.0;
  double B_ris = 0.0;

  std::vector<int> eu_users;  // scenario indices

  /// Surrogate objective at auxiliary distances (r per scenario user, d0).
  double objective_value(const std::vector<double>& r, double d0) const;
  /// sum_k (lambda f^2 + chi f) + sum eta Q at (r_m, d0), exact functions.
  double eu_power(int m, double r_m, double d0) const;
  /// sum_k D_k h_k(d0).
  double ris_power(double d0) const;
};

CoordSurrogate freeze_surrogate(const Scenario& s, const ChannelSet& ch, const PrecoderSet& F,
                                const IterationState& state);

struct CoordSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  Vec3 L = Vec3::Zero();
  std::vector<double> r;  // per scenario user
  double d0 = 0.0;
  bool ok() const { return status != SolveStatus::kInfeasible; }
};

/// Largest admissible auxiliary distance; keeps the surrogate bounded.
double coordinate_radius_bound(const Scenario& s, const Vec3& L);

/// Convex surrogate over (free axes of L, r_u, d0) with the working targets.
ConvexProgram build_coord_program(const Scenario& s, const CoordSurrogate& sur, const PowerTargets& working,
                                  const std::optional<RisBox>& box);
CoordSolution solve_coord_program(const Scenario& s, const CoordSurrogate& sur, const PowerTargets& working,
                                  const std::optional<RisBox>& box, const KernelOptions& kernel = {});

struct PenaltyLedger {
  PowerTargets original;
  PowerTargets working;
  double epsilon = 0.0;
  std::vector<double> epsilon_m;
  double alpha = 0.0;
  std::vector<double> alpha_m;
};

PenaltyLedger make_ledger(const PowerTargets& targets, double penalty_fraction);

/// Signed slacks against the original targets, evaluated with the surrogate
/// frozen at the candidate coordinate and expanded at (r, d0).
void evaluate_indicators(PenaltyLedger& ledger, const CoordSurrogate& at_candidate, const std::vector<double>& r,
                         double d0);

/// Raises the working targets whose indicator is negative; returns the accept flag.
bool penalty_step(PenaltyLedger& ledger);

enum class AcceptanceRule { kBothParts, kTotal };

struct PccaOptions {
  int max_iterations = 10;
  AcceptanceRule rule = AcceptanceRule::kBothParts;
  double part_slack = 1e-9;
  KernelOptions kernel;
};

struct PccaRecord {
  int iteration = 0;
  std::string status;  // solved, infeasible, rejected, accepted, improved
  Vec3 L = Vec3::Zero();
  double alpha = 0.0;
  std::vector<double> alpha_m;
  PowerTargets working;
  ObjectiveParts parts;
};

struct PccaResult {
  Vec3 L = Vec3::Zero();
  IterationState state;
  ObjectiveParts baseline;
  ObjectiveParts parts;
  bool moved = false;
  std::vector<PccaRecord> trace;
};

/// Penalty constrained convex approximation. Returns the best accepted
/// coordinate whose refreshed objective beats the one at L0, or L0 itself.
PccaResult pcca(const Scenario& s, const PrecoderSet& F, const CVec& phi, const Vec3& L0,
                const PccaOptions& options = {});

bool objective_improves(const ObjectiveParts& candidate, const ObjectiveParts& baseline, AcceptanceRule rule,
                        double slack);

}  // namespace stipt
