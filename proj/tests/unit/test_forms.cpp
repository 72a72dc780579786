#include "doctest.h"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

TEST_CASE("hodge star squares to the graded sign") {
  ExactSetup s(2, 4, 11);
  std::mt19937_64 rng(3);
  const int D = 5;
  for (int r = 0; r <= D; ++r) {
    const MixedForm w = random_constant_form(s.ref, s.rep, r, rng);
    MixedForm ss = hodge_star(hodge_star(w, *s.riem), *s.riem);
    MixedForm expect = w;
    if ((r * (D - r)) % 2) expect *= -1.0;
    CHECK(max_diff(ss, expect) < 1e-10);
    CHECK(max_diff(hodge_star_inverse(hodge_star(w, *s.riem), *s.riem), w) < 1e-10);
  }
}

TEST_CASE("d-hat squares to zero on constant data") {
  ExactSetup s(2, 4, 12);
  std::mt19937_64 rng(4);
  for (int r = 0; r <= 3; ++r) {
    const MixedForm w = random_constant_form(s.ref, s.rep, r, rng);
    CHECK(differential(differential(w)).max_abs() < 1e-10);
  }
}

TEST_CASE("d-hat squares to zero on smooth x-dependent data up to discretization") {
  auto geo = build_torus(2, 24, 1.0, 4);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto ref = random_connection(geo.manifold, basis, 7, 0.5);
  auto c = random_constant_ncc(ref, rep, 9, 0.5);
  const MixedForm w = to_omega(c);
  CHECK(differential(differential(w)).max_abs() < 1e-3);
}

TEST_CASE("pairing equals star of wedge with star") {
  ExactSetup s(2, 4, 13);
  std::mt19937_64 rng(5);
  for (int r = 0; r <= 5; ++r) {
    const MixedForm w = random_constant_form(s.ref, s.rep, r, rng);
    const MixedForm v = random_constant_form(s.ref, s.rep, r, rng);
    const MatrixField h = metric_pairing(w, v, *s.riem);
    const MixedForm top = hodge_star_inverse(wedge(w, hodge_star(v, *s.riem)), *s.riem);
    const MatrixField* t = top.find(0);
    REQUIRE(t != nullptr);
    CHECK(max_diff(h, *t) < 1e-10);
  }
}

TEST_CASE("wedge is associative and graded") {
  ExactSetup s(2, 4, 14);
  std::mt19937_64 rng(6);
  const MixedForm a = random_constant_form(s.ref, s.rep, 1, rng);
  const MixedForm b = random_constant_form(s.ref, s.rep, 2, rng);
  const MixedForm c = random_constant_form(s.ref, s.rep, 1, rng);
  CHECK(max_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-10);
  // Leibniz: d(ab) = (da) b + (-1)^|a| a db
  const MixedForm lhs = differential(wedge(a, b));
  const MixedForm rhs = wedge(differential(a), b) - wedge(a, differential(b));
  CHECK(max_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("vertical condition and curvature cross-check") {
  ExactSetup s(2, 4, 15);
  CHECK(vertical_condition_residual(alpha_form(s.ref, s.rep)) < 1e-14);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NCConnection c = random_constant_ncc(s.ref, s.rep, seed, 0.8);
    CHECK(max_diff(nc_curvature(c), nc_curvature_via_forms(c)) < 1e-10);
    const RelationDd r = relation_Dd(c);
    CHECK(max_diff(r.lhs, r.rhs) < 1e-10);
  }
}

TEST_CASE("curvature components agree with forms on x-dependent data") {
  auto geo = build_torus(2, 12, 1.0);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto ref = random_connection(geo.manifold, basis, 3, 0.5);
  const NCConnection c = random_field_ncc(ref, rep, 4, 0.5);
  CHECK(max_diff(nc_curvature(c), nc_curvature_via_forms(c)) < 1e-10);
  const RelationDd r = relation_Dd(c);
  CHECK(max_diff(r.lhs, r.rhs) < 1e-10);
}

TEST_CASE("canonical vacuum has zero curvature on flat reference") {
  ExactSetup s(2, 4, 16);
  auto flat = zero_connection(s.geo.manifold.lattice, s.basis);
  const NCConnection c = scaled_ncc(flat, s.rep, 1.0);
  CHECK(nc_curvature(c).max_abs() < 1e-14);
  CHECK(to_omega(c).max_abs() < 1e-14);
}

TEST_CASE("gauge transformations") {
  ExactSetup s(2, 4, 17);
  std::mt19937_64 rng(8);
  const NCConnection c = random_constant_ncc(s.ref, s.rep, 1, 0.5);
  const Mat U = exp_antihermitian(random_antiherm(rng, 2));
  const MatrixField Uf = MatrixField::constant(s.ref->lattice_ptr(), U);
  const NCConnection cu = gauge_transform(c, Uf);
  // curvature is covariant
  const MixedForm W = nc_curvature(c);
  const MixedForm Wu = nc_curvature(cu);
  double worst = 0.0;
  for (const auto& [key, f] : W.components()) {
    const MatrixField* g = Wu.find(key);
    REQUIRE(g != nullptr);
    for (std::size_t p = 0; p < f.points(); ++p) worst = std::max(worst, (U.adjoint() * f.at(p) * U - g->at(p)).norm());
  }
  CHECK(worst < 1e-10);

  Mat bad = U;
  bad(0, 0) *= 1.01;
  CHECK_THROWS_AS(gauge_transform(c, MatrixField::constant(s.ref->lattice_ptr(), bad)), Error);

  // first-order agreement with the infinitesimal action
  const Mat gamma = random_antiherm(rng, 2);
  const double eps = 1e-6;
  NCConnection moved = gauge_transform(c, MatrixField::constant(s.ref->lattice_ptr(), exp_antihermitian(eps * gamma)));
  moved.axpy(-1.0, c);
  moved *= 1.0 / eps;
  NCConnection tangent = infinitesimal_gauge(c, MatrixField::constant(s.ref->lattice_ptr(), gamma));
  tangent.axpy(-1.0, moved);
  CHECK(tangent.norm() < 1e-4 * std::max(1.0, moved.norm()));
}

TEST_CASE("geometric gauge action on alpha is the covariant derivative of gamma") {
  auto geo = build_torus(2, 16, 1.0, 4);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto ref = random_connection(geo.manifold, basis, 5, 0.4);
  const std::size_t n = geo.manifold.lattice->size();
  std::vector<std::vector<double>> gamma(3, std::vector<double>(n));
  for (std::size_t p = 0; p < n; ++p) {
    const auto& lat = *geo.manifold.lattice;
    double x[2];
    lat.coords(p, x);
    for (int a = 0; a < 3; ++a) gamma[a][p] = std::sin(2 * M_PI * (x[0] + a * x[1])) + 0.3 * a;
  }
  const MixedForm alpha = alpha_form(ref, rep);
  const MixedForm delta = geometric_gauge_action(alpha, gamma);
  MatrixField Rg(geo.manifold.lattice, 2);
  for (std::size_t p = 0; p < n; ++p) {
    double g[3] = {gamma[0][p], gamma[1][p], gamma[2][p]};
    Rg.at(p) = rep->image(std::span<const double>(g, 3));
  }
  const MixedForm dg = differential(scalar_form(ref, rep, Rg));
  // delta alpha = D gamma on horizontal slots, zero on vertical ones
  double plus = 0.0, vert = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    const MatrixField* a = delta.find(Key{1} << mu);
    const MatrixField* b = dg.find(Key{1} << mu);
    REQUIRE(b != nullptr);
    MatrixField za(geo.manifold.lattice, 2);
    const MatrixField& A = a ? *a : za;
    plus = std::max(plus, max_diff(A, *b));
  }
  for (int b = 0; b < 3; ++b)
    if (const MatrixField* f = delta.find(Key{1} << (2 + b))) vert = std::max(vert, f->max_abs());
  CHECK(plus < 1e-12);
  CHECK(vert < 1e-12);
}
