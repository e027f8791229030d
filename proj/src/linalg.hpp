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

#include <cmath>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "stipt/types.hpp"

namespace stipt::detail {

/// Solves A X = B for Hermitian positive definite A. If the Cholesky
/// factorization fails, retries once with 1e-12 relative diagonal jitter.
template <typename Mat, typename Rhs>
Rhs hpd_solve(const Mat& A, const Rhs& B, const char* where) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() == Eigen::Success) return llt.solve(B);
  const double scale = std::max(A.diagonal().real().cwiseAbs().maxCoeff(), 1e-300);
  spdlog::warn("{}: Cholesky failed, retrying with diagonal jitter", where);
  Mat J = A;
  J.diagonal().array() += 1e-12 * scale;
  llt.compute(J);
  if (llt.info() != Eigen::Success) {
    Eigen::LDLT<Mat> ldlt(J);
    return ldlt.solve(B);
  }
  return llt.solve(B);
}

template <typename Mat>
Mat hermitian_part(const Mat& A) {
  return (A + A.adjoint()) * 0.5;
}

}  // namespace stipt::detail
