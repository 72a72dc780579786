#include "doctest.h"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

namespace {

double max_deriv_error(int N, int order) {
  auto g = build_torus(1, N, 1.0, order);
  const Lattice& lat = *g.manifold.lattice;
  std::vector<double> f(lat.size()), df(lat.size());
  for (std::size_t p = 0; p < lat.size(); ++p) f[p] = std::sin(2 * M_PI * lat.coords(p)[0]);
  lat.derivative(f.data(), df.data(), 1, 0);
  double e = 0.0;
  for (std::size_t p = 0; p < lat.size(); ++p) e = std::max(e, std::abs(df[p] - 2 * M_PI * std::cos(2 * M_PI * lat.coords(p)[0])));
  return e;
}

}  // namespace

TEST_CASE("periodic stencils converge at their order") {
  CHECK(max_deriv_error(16, 2) / max_deriv_error(32, 2) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(max_deriv_error(16, 4) / max_deriv_error(32, 4) == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("bounded-axis stencils are exact on quadratics") {
  auto geo = build_sphere_two_charts(2, 12, 1.0);
  const Lattice& lat = *geo.manifold.lattice;
  std::vector<double> f(lat.size()), df(lat.size());
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const auto x = lat.coords(p);
    f[p] = 1.0 + 2.0 * x[0] - 0.5 * x[0] * x[0] + x[1];
  }
  lat.derivative(f.data(), df.data(), 1, 0);
  double worst = 0.0;
  for (std::size_t p = 0; p < lat.size(); ++p) worst = std::max(worst, std::abs(df[p] - (2.0 - lat.coords(p)[0])));
  CHECK(worst < 1e-12);
}

TEST_CASE("adjoint derivative is the transpose") {
  for (int order : {2, 4}) {
    auto geo = build_sphere_two_charts(2, 10, 1.0, "trivial", order);
    const Lattice& lat = *geo.manifold.lattice;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> u(lat.size()), v(lat.size()), Du(lat.size()), Dtv(lat.size());
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    for (int axis = 0; axis < 2; ++axis) {
      lat.derivative(u.data(), Du.data(), 1, axis);
      lat.derivative(v.data(), Dtv.data(), 1, axis, true);
      double a = 0.0, b = 0.0;
      for (std::size_t p = 0; p < lat.size(); ++p) {
        a += v[p] * Du[p];
        b += u[p] * Dtv[p];
      }
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
  auto t = build_torus(2, 6, 1.0);
  std::vector<double> u(t.manifold.lattice->size()), out(u.size());
  CHECK_THROWS_AS(t.manifold.lattice->derivative(u.data(), out.data(), 1, 2), Error);
}

TEST_CASE("torus and sphere volumes") {
  auto t = build_torus({6, 8, 5}, {1.0, 2.0, 0.5});
  std::vector<double> ones(t.manifold.lattice->size(), 1.0);
  CHECK(integrate(t.manifold, t.metric, ones) == doctest::Approx(1.0).epsilon(1e-14));
  auto s2 = build_sphere_two_charts(2, 33, 1.5);
  ones.assign(s2.manifold.lattice->size(), 1.0);
  CHECK(integrate(s2.manifold, s2.metric, ones) / (4 * M_PI * 1.5 * 1.5) == doctest::Approx(1.0).epsilon(1e-3));
  auto s4 = build_sphere_two_charts(4, 16, 1.0);
  ones.assign(s4.manifold.lattice->size(), 1.0);
  CHECK(integrate(s4.manifold, s4.metric, ones) / (8 * M_PI * M_PI / 3) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(build_sphere_two_charts(3, 16, 1.0), Error);
  CHECK_THROWS_AS(build_sphere_two_charts(2, 16, 1.0, "instanton"), Error);
}

TEST_CASE("partition of unity and chart maps") {
  for (double s = 0.05; s < 5.0; s += 0.07) CHECK(std::abs(sphere_bump(s) + sphere_bump(1.0 / s) - 1.0) < 1e-14);
  CHECK(sphere_bump(0.3) == 1.0);
  CHECK(sphere_bump(2.5) == 0.0);
  const double x[4] = {0.3, -0.7, 0.2, 1.1};
  double y[4], z[4], J[16];
  sphere_point_map(4, 1.3, x, y);
  sphere_point_map(4, 1.3, y, z);
  for (int i = 0; i < 4; ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-14));
  sphere_point_map_jacobian(4, 1.3, x, J);
  const double h = 1e-6;
  for (int j = 0; j < 4; ++j) {
    double xp[4], xm[4], yp[4], ym[4];
    std::copy(x, x + 4, xp);
    std::copy(x, x + 4, xm);
    xp[j] += h;
    xm[j] -= h;
    sphere_point_map(4, 1.3, xp, yp);
    sphere_point_map(4, 1.3, xm, ym);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(J[i * 4 + j] - (yp[i] - ym[i]) / (2 * h)) < 1e-8);
  }
  const Mat t = instanton_transition(x);
  CHECK((t.adjoint() * t - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK(std::abs(t.determinant() - 1.0) < 1e-14);
}

TEST_CASE("interpolation reproduces polynomials of its order") {
  auto geo = build_sphere_two_charts(2, 12, 1.0);
  const Lattice& lat = *geo.manifold.lattice;
  std::vector<double> lin(lat.size()), cub(lat.size());
  const auto flin = [](double a, double b) { return 0.5 + 2 * a - b + 0.3 * a * b; };
  const auto fcub = [](double a, double b) { return a * a * a - 2 * a * b * b + b; };
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const auto x = lat.coords(p);
    lin[p] = flin(x[0], x[1]);
    cub[p] = fcub(x[0], x[1]);
  }
  const double pt[2] = {0.37, -1.21};
  double v = 0.0;
  REQUIRE(interpolate(lat, 0, lin.data(), 1, pt, &v, 1));
  CHECK(v == doctest::Approx(flin(pt[0], pt[1])).epsilon(1e-13));
  REQUIRE(interpolate(lat, 0, cub.data(), 1, pt, &v, 3));
  CHECK(v == doctest::Approx(fcub(pt[0], pt[1])).epsilon(1e-12));
  const double far[2] = {10.0, 0.0};
  CHECK_FALSE(interpolate(lat, 0, lin.data(), 1, far, &v, 1));
}

TEST_CASE("matrix field arithmetic and serialization") {
  auto geo = build_torus(2, 4, 1.0);
  std::mt19937_64 rng(1);
  MatrixField a = MatrixField::constant(geo.manifold.lattice, random_antiherm(rng, 2));
  MatrixField b = MatrixField::constant(geo.manifold.lattice, random_antiherm(rng, 2));
  MatrixField c = a + b;
  c -= b;
  CHECK(max_diff(a, c) < 1e-15);
  const MatrixField back = field_from_json(field_to_json(a), geo.manifold.lattice);
  CHECK(max_diff(a, back) == 0.0);
  MatrixField other(geo.manifold.lattice, 3);
  CHECK_THROWS_AS(a += other, Error);
}

TEST_CASE("instanton transition conjugation in representations") {
  auto geo = build_sphere_two_charts(4, 8, 1.0, "instanton");
  auto b = build_su(2);
  auto spin1 = build_representation(b, RepSpec{RepKind::spin, 1, 1.0, {}});
  const double x[4] = {0.4, 0.1, -0.3, 0.8};
  const Mat t = instanton_transition(x);
  const Mat R = represent_group_element(t, *spin1);
  CHECK((R.adjoint() * R - Mat::Identity(3, 3)).norm() < 1e-13);
  // representation property on the algebra: rho(t) R(X) rho(t)^-1 = R(t X t^-1)
  const Mat X = b->combine(std::vector<double>{0.2, -0.5, 0.9});
  CHECK((R * spin1->image_of(X) * R.adjoint() - spin1->image_of(t * X * t.adjoint())).norm() < 1e-12);
}
