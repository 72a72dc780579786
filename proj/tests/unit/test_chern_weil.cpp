#include "doctest.h"
#include "ncym/chern_weil.hpp"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

namespace {

// su(2) connection on T^5 depending on the first three coordinates only.
std::shared_ptr<const OrdinaryConnection> t5_connection(int N) {
  auto geo = build_torus({N, N, N, 4, 4}, {1.0, 1.0, 1.0, 1.0, 1.0});
  auto basis = build_su(2);
  const Lattice& lat = *geo.manifold.lattice;
  std::vector<double> A(lat.size() * 5 * 3);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const auto x = lat.coords(p);
    for (int mu = 0; mu < 5; ++mu)
      for (int a = 0; a < 3; ++a) {
        const double ph = 0.7 * mu + 1.3 * a;
        A[(p * 5 + mu) * 3 + a] = 0.6 * std::sin(2 * M_PI * x[(mu + a) % 3] + ph) +
                                  0.4 * std::cos(2 * M_PI * (x[0] - x[(a + 1) % 3 + 0]) + ph) + 0.3 * (mu == 3 || mu == 4);
      }
  }
  return std::make_shared<const OrdinaryConnection>(geo.manifold.lattice, basis, std::move(A), "t5");
}

}  // namespace

TEST_CASE("first Chern form of su(2) vanishes") {
  auto geo = build_torus(2, 8, 1.0);
  auto conn = random_connection(geo.manifold, build_su(2), 3, 0.8);
  const ChernForm cf = chern_form(*conn, 1);
  double worst = 0.0;
  for (const auto& [k, v] : cf.comps)
    for (double x : v) worst = std::max(worst, std::abs(x));
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(chern_form(*conn, 2), Error);
}

TEST_CASE("flat and trivial connections have zero Chern number") {
  auto geo = build_torus(4, 6, 1.0);
  auto conn = zero_connection(geo.manifold.lattice, build_su(2));
  CHECK(std::abs(chern_number(*conn, 2, geo.manifold).value) < 1e-14);
  auto cst = constant_connection(geo.manifold, build_su(2), std::vector<double>(12, 0.3));
  CHECK(std::abs(chern_number(*cst, 2, geo.manifold).value) < 1e-12);
}

TEST_CASE("Chern form is gauge invariant under constant rotations") {
  auto geo = build_torus(4, 6, 1.0);
  auto basis = build_su(2);
  auto conn = random_connection(geo.manifold, basis, 4, 0.6);
  std::mt19937_64 rng(2);
  const Mat U = exp_antihermitian(random_antiherm(rng, 2));
  std::vector<double> A2(conn->A_data().size());
  for (std::size_t p = 0; p < geo.manifold.lattice->size(); ++p)
    for (int mu = 0; mu < 4; ++mu) {
      const CVec c = basis->coordinates(U.adjoint() * conn->A_matrix(p, mu) * U);
      for (int a = 0; a < 3; ++a) A2[(p * 4 + mu) * 3 + a] = c(a).real();
    }
  OrdinaryConnection conn2(geo.manifold.lattice, basis, A2, "rotated");
  const ChernForm f1 = chern_form(*conn, 2), f2 = chern_form(conn2, 2);
  double worst = 0.0;
  for (const auto& [k, v] : f1.comps)
    for (std::size_t p = 0; p < v.size(); ++p) worst = std::max(worst, std::abs(v[p] - f2.comps.at(k)[p]));
  CHECK(worst < 1e-10);
}

TEST_CASE("second Chern form is closed to second order") {
  const double r12 = closedness_residual(chern_form(*t5_connection(12), 2));
  const double r24 = closedness_residual(chern_form(*t5_connection(24), 2));
  MESSAGE("closedness " << r12 << " -> " << r24);
  CHECK(r12 / r24 > 3.2);
  CHECK(r12 / r24 < 4.8);
}

TEST_CASE("BPST density profile and gluing") {
  auto geo = build_sphere_two_charts(4, 16, 1.0, "instanton", 4);
  auto conn = bpst_connection(geo.manifold, build_su(2), 1.0);
  const ChernForm cf = chern_form(*conn, 2);
  CHECK(gluing_residual(cf, geo.manifold) < 0.02);
  const RadialProfile prof = radial_profile(cf, geo.manifold, 0, 8, 2.0);
  std::vector<double> filled;
  for (std::size_t i = 0; i < prof.density.size(); ++i)
    if (prof.count[i] > 0) filled.push_back(prof.density[i]);
  REQUIRE(filled.size() >= 5);
  for (std::size_t i = 1; i < filled.size(); ++i) CHECK(filled[i] < filled[i - 1]);
  // closed-form density 6 rho^4 / (pi^2 (|x|^2 + rho^2)^4) inside the unit ball
  const Lattice& lat = *geo.manifold.lattice;
  double x[4];
  double worst = 0.0;
  for (std::size_t p = lat.chart_begin(0); p < lat.chart_end(0); ++p) {
    lat.coords(p, x);
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    if (r2 > 1.0) continue;
    const double ex = 6.0 / (M_PI * M_PI * std::pow(r2 + 1.0, 4));
    worst = std::max(worst, std::abs(cf.comps.at(15)[p] - ex) / (6.0 / (M_PI * M_PI)));
  }
  MESSAGE("BPST density max relative error in |x| < 1: " << worst);
  CHECK(worst < 0.02);
}
