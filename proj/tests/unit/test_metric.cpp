#include "doctest.h"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;

TEST_CASE("block assembly matches the closed form") {
  std::mt19937_64 rng(1);
  const RMat gM = random_spd(rng, 2), gi = random_spd(rng, 3);
  RMat A(3, 2);
  A << 0.3, -0.1, 0.7, 0.2, -0.4, 0.5;
  const RMat g = assemble_block(gM, gi, A);
  CHECK((g.topLeftCorner(2, 2) - (gM + A.transpose() * gi * A)).norm() < 1e-14);
  CHECK((g.topRightCorner(2, 3) + A.transpose() * gi).norm() < 1e-14);
  CHECK((g.bottomRightCorner(3, 3) - gi).norm() < 1e-14);
  CHECK((inverse_block(gM, gi, A) - g.inverse()).norm() < 1e-12);
  // nabla_mu = d_mu + A^a_mu ad_a is orthogonal to every ad_b
  CHECK(orthogonality_residual(g, A) < 1e-14);
}

TEST_CASE("extraction round trip and inverse identities") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 4;
    const RMat gM = random_spd(rng, d), gi = random_spd(rng, 8);
    RMat A(8, d);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < d; ++c) A(r, c) = nd(rng);
    const MetricBlocks b = extract_block(assemble_block(gM, gi, A), d);
    CHECK((b.gM - gM).norm() < 1e-12);
    CHECK((b.g_int - gi).norm() < 1e-12);
    CHECK((b.A - A).norm() < 1e-12);
    const InverseIdentities ii = inverse_identities(gM, gi, A);
    CHECK(std::max({ii.h_int, ii.A_from_h, ii.g_base, ii.brute_force, ii.product}) < 1e-12);
  }
}

TEST_CASE("assembled structures on lattices") {
  auto geo = build_torus(2, 8, 1.0);
  auto basis = build_su(2);
  auto ref = random_connection(geo.manifold, basis, 5, 0.5);
  auto riem = assemble(smooth_base_metric(geo.manifold, 6, 0.2), smooth_internal_metric(geo.manifold, 3, 7, 0.2), ref);
  const InverseIdentities ii = invert(*riem);
  CHECK(std::max({ii.h_int, ii.A_from_h, ii.g_base, ii.brute_force, ii.product}) < 1e-12);
  for (std::size_t p = 0; p < geo.manifold.lattice->size(); p += 7) {
    CHECK((riem->g_B(p) * riem->h_B(p) - RMat::Identity(5, 5)).norm() < 1e-12);
    CHECK(riem->gInt(p).llt().info() == Eigen::Success);
  }
  // the extracted connection reproduces the reference potential
  std::vector<double> full;
  for (std::size_t p = 0; p < geo.manifold.lattice->size(); ++p) {
    const RMat g = riem->g_B(p);
    full.insert(full.end(), g.data(), g.data() + g.size());
  }
  auto back = extract_connection(geo.manifold.lattice, basis, full);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref->A_data().size(); ++i) worst = std::max(worst, std::abs(back->A_data()[i] - ref->A_data()[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("invalid metrics are rejected") {
  auto geo = build_torus(2, 4, 1.0);
  auto ref = zero_connection(geo.manifold.lattice, build_su(2));
  RMat bad = RMat::Identity(3, 3);
  bad(2, 2) = -1.0;
  CHECK_THROWS_AS(assemble_constant(geo.metric, bad, ref), Error);
  std::vector<double> wrong(5, 1.0);
  CHECK_THROWS_AS(assemble(geo.metric, wrong, ref), Error);
  BaseMetric gM = geo.metric;
  gM.g[1] = 5.0;
  CHECK_THROWS_AS(gM.finalize(), Error);
}
