#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <random>

#include "ncym/forms.hpp"
#include "ncym/metric.hpp"
#include "ncym/nc_connection.hpp"

namespace ncym::testing {

inline Mat random_antiherm(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat X(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) X(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (X - X.adjoint());
}

inline RMat random_spd(std::mt19937_64& rng, int n, double spread = 0.3) {
  std::normal_distribution<double> g(0.0, 1.0);
  RMat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = spread * g(rng);
  return RMat::Identity(n, n) + B * B.transpose();
}

/// x-independent random form of the given degree with every component filled.
inline MixedForm random_constant_form(std::shared_ptr<const OrdinaryConnection> ref,
                                      std::shared_ptr<const Representation> rep, int degree, std::mt19937_64& rng) {
  MixedForm w(ref, rep, degree);
  const int D = w.D();
  std::normal_distribution<double> g(0.0, 1.0);
  for (Key S = 0; S < (Key{1} << D); ++S) {
    if (std::popcount(S) != degree) continue;
    Mat m(rep->k(), rep->k());
    for (int i = 0; i < rep->k(); ++i)
      for (int j = 0; j < rep->k(); ++j) m(i, j) = cplx(g(rng), g(rng));
    w.set(S, MatrixField::constant(ref->lattice_ptr(), m));
  }
  return w;
}

/// Flat T^d with an x-independent random reference connection and internal metric.
struct ExactSetup {
  Geometry geo;
  std::shared_ptr<const LieBasis> basis;
  std::shared_ptr<const Representation> rep;
  std::shared_ptr<const OrdinaryConnection> ref;
  std::shared_ptr<const RiemannianStructure> riem;

  ExactSetup(int d, int N, std::uint64_t seed, bool random_internal = true, RepSpec spec = {}) {
    geo = build_torus(d, N, 1.0);
    basis = build_su(2);
    rep = build_representation(basis, spec);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> A(static_cast<std::size_t>(d * basis->dim()));
    for (auto& v : A) v = 0.7 * g(rng);
    ref = constant_connection(geo.manifold, basis, A);
    const RMat gi = random_internal ? random_spd(rng, basis->dim()) : RMat::Identity(basis->dim(), basis->dim());
    riem = assemble_constant(geo.metric, gi, ref);
  }
};

}  // namespace ncym::testing
