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

#include "stipt/types.hpp"

namespace stipt {

// Complex vectors map to reals as [Re z0, Im z0, Re z1, Im z1, ...].

RVec embed(const CVec& z);
CVec unembed(const RVec& x);

/// Real matrix M~ with x^T M~ x = Re(z^H M z); exact z^H M z for Hermitian M.
RMat embed_hermitian(const CMat& M);

/// Real vector a with a^T x = Re(sum_n c_n z_n).
RVec embed_linear(const CVec& c);

}  // namespace stipt
