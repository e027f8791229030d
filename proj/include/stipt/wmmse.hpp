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

#include "stipt/thz_channel.hpp"
#include "stipt/types.hpp"

namespace stipt {

/// MMSE receivers and WMMSE weights for every (k, i), plus the objective and
/// sum rate they induce.
struct IterationState {
  MatrixGrid U;
  MatrixGrid W;
  double o_tot = 0.0;
  double sum_rate = 0.0;  // bits/s/Hz, summed over sub-bands and IUs
};

struct RateReport {
  std::vector<std::vector<double>> per_link;  // [k][i], bits
  double sum = 0.0;
};

/// The two parts of O^tot: sum tr(W E) and -sum ln|W|.
struct ObjectiveParts {
  double weighted_mse = 0.0;
  double neg_logdet = 0.0;
  double total() const { return weighted_mse + neg_logdet; }
};

/// J_{k,i}: interference from the other IUs plus noise.
CMat interference_plus_noise(const ChannelSet& ch, const PrecoderSet& F, int k, int i, double noise_power);

/// log2 |I + F^H Z^H J^{-1} Z F| per link and summed.
RateReport rates(const ChannelSet& ch, const PrecoderSet& F, double noise_power);

/// (U^H Z F - I)(U^H Z F - I)^H + sum_{u != i} U^H Z F_u F_u^H Z^H U + noise U^H U.
CMat mse_matrix(const ChannelSet& ch, const PrecoderSet& F, const CMat& U, int k, int i, double noise_power);

/// (Z F F^H Z^H + J)^{-1} Z F.
CMat mmse_receiver(const ChannelSet& ch, const PrecoderSet& F, int k, int i, double noise_power);

/// E_min^{-1}. Throws std::domain_error if E_min is not Hermitian positive definite.
CMat optimal_weight(const CMat& e_min);

/// Sum over (k, i) of tr(W E) - ln|W|, natural log. Throws std::domain_error
/// if some W is not Hermitian positive definite.
double objective_o_tot(const ChannelSet& ch, const PrecoderSet& F, const MatrixGrid& U, const MatrixGrid& W,
                       double noise_power);
ObjectiveParts objective_parts(const ChannelSet& ch, const PrecoderSet& F, const MatrixGrid& U, const MatrixGrid& W,
                               double noise_power);

/// Optimal U and W at the current channel and precoders. Uses the
/// matrix-inversion-lemma form W = I + F^H Z^H J^{-1} Z F, which stays
/// accurate when E_min is tiny (high SNR).
IterationState refresh_state(const ChannelSet& ch, const PrecoderSet& F, double noise_power);

/// Natural log determinant of a Hermitian positive definite matrix.
double hermitian_logdet(const CMat& A);

}  // namespace stipt
