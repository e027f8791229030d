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

#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "stipt/complex_embedding.hpp"
#include "stipt/convex_kernel.hpp"

using namespace stipt;
using namespace stipt::test;

namespace {

RVec random_rvec(Rng& rng, int n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

RMat random_psd(Rng& rng, int n, int rank) {
  RMat A(n, rank);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) A(i, j) = g(rng);
  return A * A.transpose();
}

QuadraticConstraint ball(int dim, double radius) {
  QuadraticConstraint c;
  for (int j = 0; j < dim; ++j) c.support.push_back(j);
  c.Q = RMat::Identity(dim, dim);
  c.a = RVec::Zero(dim);
  c.b = radius * radius;
  return c;
}

// Box-constrained QP by projected gradient with step 1 / L, run far past
// convergence.
RVec projected_gradient(const RMat& P, const RVec& q, const RVec& lo, const RVec& hi) {
  const double L = P.norm() + 1e-12;
  RVec x = (0.5 * (lo + hi)).eval();
  for (int it = 0; it < 200000; ++it) {
    const RVec next = (x - (P * x + q) / L).cwiseMax(lo).cwiseMin(hi);
    if ((next - x).norm() < 1e-15) break;
    x = next;
  }
  return x;
}

}  // namespace

TEST_SUITE("convex_kernel") {
  TEST_CASE("ball projection") {
    ConvexProgram p(3);
    const RVec c = (RVec(3) << 2.0, 0.0, 0.0).finished();
    p.P = 2.0 * RMat::Identity(3, 3);
    p.q = -2.0 * c;
    p.constraints.push_back(ball(3, 1.0));
    const KernelSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK((sol.x - c / 2.0).norm() < 1e-7);
    CHECK(p.max_violation(sol.x) <= 1e-8);
  }

  TEST_CASE("active affine constraint") {
    ConvexProgram p(1);
    p.P = 2.0 * RMat::Identity(1, 1);
    p.constraints.push_back(AffineConstraint{-RVec::Ones(1), -1.0});  // x >= 1
    const KernelSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("random box QPs match projected gradient") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
      const int n = 6;
      ConvexProgram p(n);
      p.P = random_psd(rng, n, n) + 0.1 * RMat::Identity(n, n);
      p.q = random_rvec(rng, n, 3.0);
      const RVec lo = -RVec::Ones(n) - random_rvec(rng, n).cwiseAbs();
      const RVec hi = RVec::Ones(n) + random_rvec(rng, n).cwiseAbs();
      for (int j = 0; j < n; ++j) {
        RVec e = RVec::Zero(n);
        e[j] = 1.0;
        p.constraints.push_back(AffineConstraint{e, hi[j]});
        p.constraints.push_back(AffineConstraint{-e, -lo[j]});
      }
      const KernelSolution sol = solve(p);
      REQUIRE(sol.status == SolveStatus::kOptimal);
      const RVec xo = projected_gradient(p.P, p.q, lo, hi);
      const double fo = 0.5 * xo.dot(p.P * xo) + p.q.dot(xo);
      CHECK(rel_diff(sol.objective, fo) <= 1e-5);
      CHECK(sol.objective <= fo + 1e-7 * std::abs(fo));
    }
  }

  TEST_CASE("second-order cone constraint") {
    // min x0 + x1 s.t. ||x|| <= 1.
    ConvexProgram p(2);
    p.q = RVec::Ones(2);
    ConeConstraint c;
    c.support = {0, 1};
    c.A = RMat::Identity(2, 2);
    c.b = RVec::Zero(2);
    c.c = RVec::Zero(2);
    c.d = 1.0;
    p.constraints.push_back(c);
    const KernelSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-7));
    CHECK(sol.x[1] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-7));
  }

  TEST_CASE("smooth term") {
    // min exp(x) - 2x has its minimum at ln 2.
    ConvexProgram p(1);
    p.q = -2.0 * RVec::Ones(1);
    SmoothTerm term;
    term.support = {0};
    term.eval = [](const RVec& x) -> std::optional<SmoothValue> {
      SmoothValue v;
      v.value = std::exp(x[0]);
      v.grad = RVec::Constant(1, v.value);
      v.hess = RMat::Constant(1, 1, v.value);
      return v;
    };
    p.smooth.push_back(term);
    p.constraints.push_back(AffineConstraint{RVec::Ones(1), 10.0});
    const KernelSolution sol = solve(p);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x[0] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  }

  TEST_CASE("infeasible programs are reported") {
    ConvexProgram p(2);
    p.P = RMat::Identity(2, 2);
    p.constraints.push_back(ball(2, 1.0));
    p.constraints.push_back(AffineConstraint{-RVec::Ones(2), -3.0});  // x0 + x1 >= 3
    CHECK(solve(p).status == SolveStatus::kInfeasible);
  }

  TEST_CASE("indefinite objectives are rejected") {
    ConvexProgram p(2);
    p.P = RMat::Identity(2, 2);
    p.P(1, 1) = -1.0;
    CHECK_THROWS_AS(solve(p), KernelError);
    ConvexProgram q(2);
    q.q = RVec::Ones(3);
    CHECK_THROWS_AS(solve(q), KernelError);
  }

  TEST_CASE("identical programs give identical bits") {
    Rng rng(4);
    ConvexProgram p(5);
    p.P = random_psd(rng, 5, 3);
    p.q = random_rvec(rng, 5);
    p.constraints.push_back(ball(5, 2.0));
    const KernelSolution a = solve(p), b = solve(p);
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
    CHECK(a.newton_steps == b.newton_steps);
  }

  TEST_CASE("scaling the objective keeps the argmin") {
    Rng rng(5);
    ConvexProgram p(4);
    p.P = random_psd(rng, 4, 4);
    p.q = random_rvec(rng, 4, 4.0);
    p.constraints.push_back(ball(4, 1.0));
    const KernelSolution a = solve(p);
    for (double alpha : {1e-6, 1e3, 1e8}) {
      ConvexProgram s = p;
      s.P *= alpha;
      s.q *= alpha;
      const KernelSolution b = solve(s);
      REQUIRE(b.status == SolveStatus::kOptimal);
      CHECK((a.x - b.x).norm() <= 1e-6);
    }
  }

  TEST_CASE("complex embedding round trip") {
    Rng rng(6);
    const CMat A = random_cmat(rng, 4, 4);
    const CMat M = A * A.adjoint();
    const CVec z = random_cmat(rng, 4, 1);
    const CVec c = random_cmat(rng, 4, 1);
    const RVec x = embed(z);
    CHECK((unembed(x) - z).norm() == 0.0);
    CHECK(x.dot(embed_hermitian(M) * x) == doctest::Approx(z.dot(M * z).real()).epsilon(1e-12));
    CHECK(embed_linear(c).dot(x) == doctest::Approx((c.transpose() * z)(0).real()).epsilon(1e-12));
  }

  TEST_CASE("iteration budget") {
    ConvexProgram p(2);
    p.P = RMat::Identity(2, 2);
    p.q = -RVec::Ones(2) * 4.0;
    p.constraints.push_back(ball(2, 1.0));
    KernelOptions opt;
    opt.max_iter = 1;
    const KernelSolution sol = solve(p, opt);
    CHECK(sol.status == SolveStatus::kMaxIter);
    CHECK(p.max_violation(sol.x) <= 0.0);
  }

  TEST_CASE("block-separable programs agree with the dense factorization") {
    // 16 blocks of 4 coupled only through affine rows. A 1e-300 coupling in P
    // merges the blocks and forces the dense Newton path on the same problem.
    Rng rng(11);
    const int blocks = 16, k = 4, n = blocks * k;
    ConvexProgram p(n);
    p.P = RMat::Zero(n, n);
    for (int b = 0; b < blocks; ++b) p.P.block(b * k, b * k, k, k) = random_psd(rng, k, 2);
    p.q = random_rvec(rng, n);
    for (int b = 0; b < blocks; ++b) {
      if (b % 2 == 0) {
        ConeConstraint c;
        for (int j = 0; j < k; ++j) c.support.push_back(b * k + j);
        c.A = RMat::Identity(k, k);
        c.b = RVec::Zero(k);
        c.c = RVec::Zero(k);
        c.d = 1.0;
        p.constraints.push_back(c);
      } else {
        QuadraticConstraint c;
        for (int j = 0; j < k; ++j) c.support.push_back(b * k + j);
        c.Q = random_psd(rng, k, k) + RMat::Identity(k, k);
        c.a = RVec::Zero(k);
        c.b = 1.0;
        p.constraints.push_back(c);
      }
    }
    for (int r = 0; r < 3; ++r) p.constraints.push_back(AffineConstraint{random_rvec(rng, n), 0.5});

    ConvexProgram dense = p;
    dense.P(0, n - 1) = dense.P(n - 1, 0) = 1e-300;
    const KernelSolution a = solve(p);
    const KernelSolution b = solve(dense);
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    CHECK(p.max_violation(a.x) <= 0.0);
    CHECK((a.x - b.x).norm() < 1e-5);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-8));
  }
}
