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

#include "stipt/wmmse.hpp"

#include <cmath>
#include <stdexcept>

#include "linalg.hpp"

namespace stipt {

using detail::hermitian_part;
using detail::hpd_solve;

double hermitian_logdet(const CMat& A) {
  Eigen::LLT<CMat> llt(hermitian_part(A));
  if (llt.info() != Eigen::Success) throw std::domain_error("hermitian_logdet: matrix is not positive definite");
  double s = 0.0;
  for (Eigen::Index j = 0; j < A.rows(); ++j) s += std::log(llt.matrixLLT()(j, j).real());
  return 2.0 * s;
}

CMat interference_plus_noise(const ChannelSet& ch, const PrecoderSet& F, int k, int i, double noise_power) {
  const CMat& Z = ch.iu_link(k, i).Z;
  CMat J = noise_power * CMat::Identity(Z.rows(), Z.rows());
  for (std::size_t u = 0; u < F[k].size(); ++u) {
    if (static_cast<int>(u) == i) continue;
    const CMat ZF = Z * F[k][u];
    J.noalias() += ZF * ZF.adjoint();
  }
  return J;
}

namespace {

// S = F^H Z^H J^{-1} Z F and T = J^{-1} Z F.
void snr_matrices(const ChannelSet& ch, const PrecoderSet& F, int k, int i, double noise_power, CMat& S, CMat& T) {
  const CMat ZF = ch.iu_link(k, i).Z * F[k][i];
  const CMat J = interference_plus_noise(ch, F, k, i, noise_power);
  T = hpd_solve(J, ZF, "interference covariance");
  S = hermitian_part(CMat(ZF.adjoint() * T));
}

}  // namespace

RateReport rates(const ChannelSet& ch, const PrecoderSet& F, double noise_power) {
  RateReport out;
  out.per_link.resize(ch.subbands());
  for (int k = 0; k < ch.subbands(); ++k) {
    for (int i = 0; i < static_cast<int>(F[k].size()); ++i) {
      CMat S, T;
      snr_matrices(ch, F, k, i, noise_power, S, T);
      const double r = hermitian_logdet(CMat::Identity(S.rows(), S.cols()) + S) / std::log(2.0);
      out.per_link[k].push_back(r);
      out.sum += r;
    }
  }
  return out;
}

CMat mse_matrix(const ChannelSet& ch, const PrecoderSet& F, const CMat& U, int k, int i, double noise_power) {
  const CMat& Z = ch.iu_link(k, i).Z;
  const CMat UZ = U.adjoint() * Z;
  const CMat X = UZ * F[k][i] - CMat::Identity(U.cols(), U.cols());
  CMat E = X * X.adjoint() + noise_power * (U.adjoint() * U);
  for (std::size_t u = 0; u < F[k].size(); ++u) {
    if (static_cast<int>(u) == i) continue;
    const CMat Y = UZ * F[k][u];
    E.noalias() += Y * Y.adjoint();
  }
  return E;
}

CMat mmse_receiver(const ChannelSet& ch, const PrecoderSet& F, int k, int i, double noise_power) {
  const CMat ZF = ch.iu_link(k, i).Z * F[k][i];
  const CMat C = ZF * ZF.adjoint() + interference_plus_noise(ch, F, k, i, noise_power);
  return hpd_solve(hermitian_part(C), ZF, "receive covariance");
}

CMat optimal_weight(const CMat& e_min) {
  Eigen::LLT<CMat> llt(hermitian_part(e_min));
  if (llt.info() != Eigen::Success) throw std::domain_error("optimal_weight: E_min is not positive definite");
  return hermitian_part(CMat(llt.solve(CMat::Identity(e_min.rows(), e_min.cols()))));
}

ObjectiveParts objective_parts(const ChannelSet& ch, const PrecoderSet& F, const MatrixGrid& U, const MatrixGrid& W,
                               double noise_power) {
  ObjectiveParts p;
  for (int k = 0; k < ch.subbands(); ++k) {
    for (int i = 0; i < static_cast<int>(F[k].size()); ++i) {
      const CMat E = mse_matrix(ch, F, U[k][i], k, i, noise_power);
      p.weighted_mse += (W[k][i] * E).trace().real();
      p.neg_logdet -= hermitian_logdet(W[k][i]);
    }
  }
  return p;
}

double objective_o_tot(const ChannelSet& ch, const PrecoderSet& F, const MatrixGrid& U, const MatrixGrid& W,
                       double noise_power) {
  return objective_parts(ch, F, U, W, noise_power).total();
}

IterationState refresh_state(const ChannelSet& ch, const PrecoderSet& F, double noise_power) {
  IterationState st;
  st.U.resize(ch.subbands());
  st.W.resize(ch.subbands());
  double logdet = 0.0;
  for (int k = 0; k < ch.subbands(); ++k) {
    for (int i = 0; i < static_cast<int>(F[k].size()); ++i) {
      CMat S, T;
      snr_matrices(ch, F, k, i, noise_power, S, T);
      const CMat M = CMat::Identity(S.rows(), S.cols()) + S;
      const CMat Minv = hpd_solve(M, CMat(CMat::Identity(S.rows(), S.cols())), "WMMSE weight");
      st.U[k].push_back(T * Minv);
      st.W[k].push_back(M);
      logdet += hermitian_logdet(M);
    }
  }
  st.sum_rate = logdet / std::log(2.0);
  st.o_tot = objective_o_tot(ch, F, st.U, st.W, noise_power);
  return st;
}

}  // namespace stipt
