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
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stipt/types.hpp"

namespace stipt {

/// a^T x <= b
struct AffineConstraint {
  RVec a;
  double b = 0.0;
};

/// x_S^T Q x_S + a^T x_S <= b with Q positive semidefinite.
struct QuadraticConstraint {
  std::vector<int> support;
  RMat Q;
  RVec a;
  double b = 0.0;
};

/// ||A x_S + b|| <= c^T x_S + d
struct ConeConstraint {
  std::vector<int> support;
  RMat A;
  RVec b;
  RVec c;
  double d = 0.0;
};

using Constraint = std::variant<AffineConstraint, QuadraticConstraint, ConeConstraint>;

struct SmoothValue {
  double value = 0.0;
  RVec grad;
  RMat hess;
};

/// Convex twice-differentiable term of the objective restricted to `support`.
/// `eval` returns nullopt outside the term's domain.
struct SmoothTerm {
  std::vector<int> support;
  std::function<std::optional<SmoothValue>(const RVec& xs)> eval;
};

/// minimize 1/2 x^T P x + q^T x + constant + sum(smooth) subject to constraints.
struct ConvexProgram {
  int dim = 0;
  RMat P;  // empty means zero
  RVec q;  // empty means zero
  double constant = 0.0;
  std::vector<SmoothTerm> smooth;
  std::vector<Constraint> constraints;

  explicit ConvexProgram(int n = 0) : dim(n) {}

  /// Objective value, +inf outside the domain of a smooth term.
  double objective(const RVec& x) const;
  /// Largest constraint value g_i(x) (feasible iff <= 0); -inf without constraints.
  double max_violation(const RVec& x) const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter };

const char* to_string(SolveStatus s);

struct KernelOptions {
  double tol = 1e-8;
  int max_iter = 200;  // barrier-parameter updates per phase
  std::optional<RVec> initial_point;
};

struct KernelSolution {
  RVec x;
  SolveStatus status = SolveStatus::kMaxIter;
  double kkt_residual = 0.0;  // relative suboptimality bound of the final iterate
  double objective = 0.0;
  int newton_steps = 0;
};

/// Raised for malformed programs: wrong dimensions, non-finite data or an
/// indefinite quadratic.
class KernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Log-barrier interior point method with a phase-1 feasibility search.
/// Deterministic: identical inputs give bit-identical output.
KernelSolution solve(const ConvexProgram& program, const KernelOptions& options = {});

double constraint_value(const Constraint& c, const RVec& x);

}  // namespace stipt
