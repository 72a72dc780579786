#pragma once

// Riemannian structures on the derivations. In the coordinate basis
// B = (d_mu, ad_{E_a}) the metric has blocks
//   g_{mu nu} = g^M_{mu nu} + A^a_mu A^b_nu g_ab,  g_{mu b} = -A^a_mu g_ab,  g_ab,
// and in the adapted basis B' = (nabla_mu, ad_{E_a}) it is diag(g^M, g_ab).

#include <cstdint>
#include <memory>
#include <vector>

#include "ncym/connection.hpp"
#include "ncym/geometry.hpp"

namespace ncym {

struct RiemannianStructure {
  BaseMetric base;
  std::shared_ptr<const OrdinaryConnection> conn;
  std::vector<double> g_int;         // N*N per point
  std::vector<double> h_base;        // d*d per point, (g^M)^{-1}
  std::vector<double> h_int;         // N*N per point, (g_ab)^{-1}
  std::vector<double> sqrt_det_int;  // per point

  int d() const { return conn->d(); }
  int N() const { return conn->N(); }
  RMat gM(std::size_t p) const;
  RMat gInt(std::size_t p) const;
  RMat hM(std::size_t p) const;
  RMat hInt(std::size_t p) const;
  /// A as an N x d matrix, A(a, mu) = A^a_mu.
  RMat A(std::size_t p) const;
  /// Full blocks in basis B, (d + N) x (d + N).
  RMat g_B(std::size_t p) const;
  RMat h_B(std::size_t p) const;
};

/// g_int holds N*N values per point; pass an empty vector for the constant delta.
std::shared_ptr<const RiemannianStructure> assemble(const BaseMetric& base, std::vector<double> g_int,
                                                    std::shared_ptr<const OrdinaryConnection> conn);
std::shared_ptr<const RiemannianStructure> assemble_constant(const BaseMetric& base, const RMat& g_int,
                                                             std::shared_ptr<const OrdinaryConnection> conn);

/// Pointwise block formulas. A is N x d.
RMat assemble_block(const RMat& gM, const RMat& g_int, const RMat& A);
/// (h)_B = [[h^M, h^M A^T], [A h^M, A h^M A^T + h_Int]].
RMat inverse_block(const RMat& gM, const RMat& g_int, const RMat& A);

struct MetricBlocks {
  RMat gM;
  RMat g_int;
  RMat A;  // N x d
};
/// A^a_mu = -h_Int^{ab} g_{b mu}, g^M = g_{mu nu} - A^a_mu A^b_nu g_ab.
MetricBlocks extract_block(const RMat& g_full, int d);
/// max_{mu,b} |g(nabla_mu, ad_{E_b})| for a full metric and a candidate A.
double orthogonality_residual(const RMat& g_full, const RMat& A);

/// Extraction over a lattice; g_full holds (d+N)^2 values per point.
std::shared_ptr<const OrdinaryConnection> extract_connection(std::shared_ptr<const Lattice> lattice,
                                                             std::shared_ptr<const LieBasis> basis,
                                                             const std::vector<double>& g_full);

struct InverseIdentities {
  double h_int;        // h_Int - (h^{ab} - h^{mu nu} A^a_mu A^b_nu)
  double A_from_h;     // A^a_mu - g^M_{mu nu} h^{a nu}
  double g_base;       // g^M - (h^{mu nu})^{-1}
  double brute_force;  // block formula vs dense inverse
  double product;      // (g)_B (h)_B - Id
};
/// Max residuals of the inverse-block identities over all points.
InverseIdentities invert(const RiemannianStructure& riem);
InverseIdentities inverse_identities(const RMat& gM, const RMat& g_int, const RMat& A);

/// Smooth periodic SPD fields on a torus, g = B B^T with B = I + amplitude * (low Fourier modes).
BaseMetric smooth_base_metric(const Manifold& man, std::uint64_t seed, double amplitude);
std::vector<double> smooth_internal_metric(const Manifold& man, int N, std::uint64_t seed, double amplitude);

}  // namespace ncym
