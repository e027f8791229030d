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

#include "stipt/complex_embedding.hpp"

namespace stipt {

RVec embed(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index n = 0; n < z.size(); ++n) {
    x[2 * n] = z[n].real();
    x[2 * n + 1] = z[n].imag();
  }
  return x;
}

CVec unembed(const RVec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index n = 0; n < z.size(); ++n) z[n] = Complex(x[2 * n], x[2 * n + 1]);
  return z;
}

RMat embed_hermitian(const CMat& M) {
  const Eigen::Index n = M.rows();
  RMat R(2 * n, 2 * n);
  for (Eigen::Index q = 0; q < n; ++q) {
    for (Eigen::Index p = 0; p < n; ++p) {
      const double a = M(p, q).real();
      const double b = M(p, q).imag();
      R(2 * p, 2 * q) = a;
      R(2 * p, 2 * q + 1) = -b;
      R(2 * p + 1, 2 * q) = b;
      R(2 * p + 1, 2 * q + 1) = a;
    }
  }
  return R;
}

RVec embed_linear(const CVec& c) {
  RVec a(2 * c.size());
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    a[2 * n] = c[n].real();
    a[2 * n + 1] = -c[n].imag();
  }
  return a;
}

}  // namespace stipt
