#include "doctest.h"
#include "ncym/yang_mills.hpp"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

namespace {

struct FlatTorus {
  Geometry geo;
  std::shared_ptr<const LieBasis> basis = build_su(2);
  std::shared_ptr<const Representation> rep;
  std::shared_ptr<const OrdinaryConnection> ref;
  std::shared_ptr<const RiemannianStructure> riem;
  explicit FlatTorus(int N, RepSpec spec = {}) : geo(build_torus(2, N, 1.0)) {
    rep = build_representation(basis, spec);
    ref = zero_connection(geo.manifold.lattice, basis);
    riem = assemble(geo.metric, {}, ref);
  }
};

}  // namespace

TEST_CASE("double well along phi = t R") {
  FlatTorus t(8);
  for (double s : {-0.3, 0.0, 0.4, 1.0, 1.7}) {
    const NCConnection c = scaled_ncc(t.ref, t.rep, s);
    const ActionBreakdown a = action(c, t.geo.manifold, *t.riem);
    const double expect = 1.5 * std::pow(s * s - s, 2);
    CHECK(a.S_total == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(a.S_horizontal) < 1e-14);
    CHECK(std::abs(a.S_mixed) < 1e-14);
  }
  const PotentialSlice sl = potential_slice(t.ref, t.rep, t.geo.manifold, *t.riem, -0.5, 1.5, 41);
  REQUIRE(sl.minima.size() == 2);
  CHECK(std::abs(sl.minima[0]) < 1e-6);
  CHECK(std::abs(sl.minima[1] - 1.0) < 1e-6);
}

TEST_CASE("action pipelines agree and terms are nonnegative") {
  ExactSetup s(2, 6, 21);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const NCConnection c = random_constant_ncc(s.ref, s.rep, seed, 0.7);
    const ActionBreakdown a = action(c, s.geo.manifold, *s.riem);
    const double cyc = action_via_cycle(c, s.geo.manifold, *s.riem);
    CHECK(std::abs(a.S_total - cyc) < 1e-10 * std::max(1.0, a.S_total));
    CHECK(a.S_horizontal >= 0.0);
    CHECK(a.S_mixed >= 0.0);
    CHECK(a.S_vertical >= 0.0);
    CHECK(std::abs(a.S_total - (a.S_horizontal + a.S_mixed + a.S_vertical)) < 1e-12 * std::max(1.0, a.S_total));
  }
}

TEST_CASE("action refuses a mismatched reference connection") {
  FlatTorus t(4);
  auto other = zero_connection(t.geo.manifold.lattice, t.basis);
  const NCConnection c = scaled_ncc(other, t.rep, 1.0);
  CHECK_THROWS_AS(action(c, t.geo.manifold, *t.riem), Error);
}

TEST_CASE("gradient matches finite differences of the action") {
  auto geo = build_torus(2, 8, 1.0);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto ref = random_connection(geo.manifold, basis, 2, 0.5);
  std::mt19937_64 rng(1);
  auto riem = assemble_constant(geo.metric, random_spd(rng, 3), ref);
  const NCConnection c = random_field_ncc(ref, rep, 3, 0.6);
  const NCConnection g = gradient(c, geo.manifold, *riem);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const NCConnection v = random_field_ncc(ref, rep, 100 + k, 1.0);
    const double h = 1e-5;
    NCConnection xp = c, xm = c;
    xp.axpy(h, v);
    xm.axpy(-h, v);
    const double fd = (action(xp, geo.manifold, *riem).S_total - action(xm, geo.manifold, *riem).S_total) / (2 * h);
    const double an = g.dot(v);
    CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("gradient vanishes at the canonical vacuum") {
  FlatTorus t(8);
  const NCConnection c = scaled_ncc(t.ref, t.rep, 1.0);
  CHECK(gradient(c, t.geo.manifold, *t.riem).norm() < 1e-12);
}

TEST_CASE("classification fingerprints") {
  FlatTorus t(4);
  const VacuumClass z = classify_vacuum(zero_ncc(t.ref, t.rep), *t.riem);
  CHECK(z.label == "trivial");
  CHECK(z.commutant_dim == 4);
  const VacuumClass f = classify_vacuum(scaled_ncc(t.ref, t.rep, 1.0), *t.riem);
  CHECK(f.label == "fundamental");
  CHECK(f.commutant_dim == 1);
  CHECK(f.casimir_spectrum[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(classify_vacuum(scaled_ncc(t.ref, t.rep, 0.5), *t.riem), Error);

  RepSpec half_plus_one{RepKind::direct_sum, 1, 0.5, {RepSpec{RepKind::spin, 1, 0.5, {}}, RepSpec{RepKind::trivial, 1, 0.0, {}}}};
  RepSpec one{RepKind::spin, 1, 1.0, {}};
  FlatTorus a(4, half_plus_one), b(4, one);
  const VacuumClass ca = classify_vacuum(scaled_ncc(a.ref, a.rep, 1.0), *a.riem);
  const VacuumClass cb = classify_vacuum(scaled_ncc(b.ref, b.rep, 1.0), *b.riem);
  CHECK(!same_class(ca, cb));
  CHECK(ca.label == "trivial + spin-1/2");
  CHECK(cb.label == "spin-1");
}

TEST_CASE("solver reaches a classified vacuum") {
  FlatTorus t(8);
  auto init = scaled_ncc(t.ref, t.rep, 0.8);
  init.axpy(1.0, random_constant_ncc(t.ref, t.rep, 5, 0.1));
  const SolveResult r = solve_vacuum(init, t.geo.manifold, *t.riem);
  CHECK(r.report.converged);
  CHECK(r.report.action.S_total < 1e-10);
  REQUIRE(r.report.classified);
  CHECK(r.report.classification.label == "fundamental");
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].action <= r.trace[i - 1].action);
}
