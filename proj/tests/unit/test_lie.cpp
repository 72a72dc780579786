#include "doctest.h"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

TEST_CASE("su(2) basis and structure constants") {
  auto b = build_su(2);
  REQUIRE(b->dim() == 3);
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs((b->E(a) * b->E(c)).trace() - cplx(a == c ? -0.5 : 0.0, 0.0)) < 1e-15);
      CHECK((b->E(a) + b->E(a).adjoint()).norm() < 1e-15);
    }
  // C_ab^c = epsilon_abc
  CHECK(b->C(0, 1, 2) == doctest::Approx(1.0));
  CHECK(b->C(1, 2, 0) == doctest::Approx(1.0));
  CHECK(b->C(1, 0, 2) == doctest::Approx(-1.0));
  CHECK(b->C(0, 0, 1) == 0.0);
  CHECK(b->bracket_residual() < 1e-14);
  CHECK(b->jacobi_residual() < 1e-14);
  CHECK((killing_metric(*b) + 2.0 * RMat::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("su(n) brackets close and the fundamental Casimir is -(n^2-1)/(2n)") {
  for (int n : {2, 3, 4}) {
    auto b = build_su(n);
    CHECK(b->dim() == n * n - 1);
    CHECK(b->bracket_residual() < 1e-13);
    CHECK(b->jacobi_residual() < 1e-13);
    Mat cas = Mat::Zero(n, n);
    for (int a = 0; a < b->dim(); ++a) cas += b->E(a) * b->E(a);
    CHECK((cas + (n * n - 1.0) / (2.0 * n) * Mat::Identity(n, n)).norm() < 1e-13);
  }
  CHECK_THROWS_AS(build_su(1), Error);
}

TEST_CASE("coordinates invert combine") {
  auto b = build_su(3);
  std::vector<double> x(8);
  for (int i = 0; i < 8; ++i) x[static_cast<std::size_t>(i)] = 0.1 * i - 0.3;
  const CVec c = b->coordinates(b->combine(x));
  for (int i = 0; i < 8; ++i) CHECK(std::abs(c(i) - x[static_cast<std::size_t>(i)]) < 1e-14);
}

TEST_CASE("representations satisfy the bracket relations") {
  auto b2 = build_su(2);
  for (double j : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    RepSpec s{RepKind::spin, 1, j, {}};
    auto r = build_representation(b2, s);
    CHECK(r->k() == static_cast<int>(2 * j + 1));
    CHECK(r->commutator_residual() < 1e-13);
    Mat cas = Mat::Zero(r->k(), r->k());
    for (int a = 0; a < 3; ++a) cas += r->R(a) * r->R(a);
    CHECK((cas + j * (j + 1) * Mat::Identity(r->k(), r->k())).norm() < 1e-12);
  }
  auto adj = build_representation(build_su(3), RepSpec{RepKind::adjoint, 1, 0.5, {}});
  CHECK(adj->k() == 8);
  CHECK(adj->commutator_residual() < 1e-13);
  auto triv = build_representation(b2, RepSpec{RepKind::trivial, 3, 0.5, {}});
  CHECK(triv->k() == 3);
  for (int a = 0; a < 3; ++a) CHECK(triv->R(a).norm() == 0.0);
  RepSpec sum{RepKind::direct_sum, 1, 0.5, {RepSpec{RepKind::trivial, 1, 0.5, {}}, RepSpec{RepKind::fundamental, 1, 0.5, {}}}};
  auto ds = build_representation(b2, sum);
  CHECK(ds->k() == 3);
  CHECK(ds->commutator_residual() < 1e-14);
  CHECK_THROWS_AS(build_representation(build_su(3), RepSpec{RepKind::spin, 1, 1.0, {}}), Error);
  CHECK_THROWS_AS(build_representation(b2, RepSpec{RepKind::spin, 1, 0.7, {}}), Error);
}

TEST_CASE("symmetrized trace is symmetric and ad-invariant") {
  auto b = build_su(2);
  std::mt19937_64 rng(5);
  std::vector<Mat> Y;
  for (int i = 0; i < 3; ++i) Y.push_back(b->combine(std::vector<double>{0.3 * i - 0.2, 0.5, -0.1 * i}));
  const cplx v = invariant_polynomial(*b, Y);
  std::vector<Mat> swapped{Y[2], Y[0], Y[1]};
  CHECK(std::abs(invariant_polynomial(*b, swapped) - v) < 1e-15);
  const Mat X = b->combine(std::vector<double>{0.7, -0.2, 0.4});
  cplx tot = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto args = Y;
    args[static_cast<std::size_t>(i)] = commutator(X, Y[static_cast<std::size_t>(i)]);
    tot += invariant_polynomial(*b, args);
  }
  CHECK(std::abs(tot) < 1e-15);
  std::vector<Mat> two{Y[0], Y[1]};
  CHECK(std::abs(invariant_polynomial(*b, two) - (Y[0] * Y[1]).trace()) < 1e-15);
}

TEST_CASE("exp and log of unitary matrices") {
  std::mt19937_64 rng(9);
  for (int k : {2, 3}) {
    const Mat X = 0.8 * random_antiherm(rng, k);
    const Mat U = exp_antihermitian(X);
    CHECK((U.adjoint() * U - Mat::Identity(k, k)).norm() < 1e-14);
    CHECK((exp_antihermitian(log_unitary(U)) - U).norm() < 1e-13);
  }
  auto b = build_su(2);
  auto spin1 = build_representation(b, RepSpec{RepKind::spin, 1, 1.0, {}});
  const Mat X = b->combine(std::vector<double>{1.1, -0.4, 0.9});
  const Mat U = exp_antihermitian(X);
  const Mat L = log_special_unitary(U);
  CHECK(std::abs(L.trace()) < 1e-13);
  // the same branch lifts to every representation
  CHECK((exp_antihermitian(spin1->image_of(L)) - represent_group_element(U, *spin1)).norm() < 1e-12);
  auto fund = build_representation(b, {});
  CHECK((represent_group_element(U, *fund) - U).norm() < 1e-13);
}
