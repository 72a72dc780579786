#pragma once

// Ordinary connections A = A^a_mu E_a dx^mu on the charts of a lattice and
// their curvature F. The connection fixes the adapted derivation frame
// (nabla_mu = partial_mu + ad_{A_mu}, ad_{E_a}) used by all forms.

#include <cstdint>
#include <memory>
#include <vector>

#include "ncym/geometry.hpp"
#include "ncym/lie.hpp"

namespace ncym {

class OrdinaryConnection {
 public:
  /// A holds d*N reals per point, laid out A[(p*d + mu)*N + a].
  OrdinaryConnection(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const LieBasis> basis, std::vector<double> A,
                     std::string label = "custom");

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }
  const LieBasis& basis() const { return *basis_; }
  const std::shared_ptr<const LieBasis>& basis_ptr() const { return basis_; }
  const std::string& label() const { return label_; }
  int d() const { return d_; }
  int N() const { return N_; }

  double A(std::size_t p, int mu, int a) const { return A_[(p * d_ + mu) * N_ + a]; }
  const double* A_ptr(std::size_t p, int mu) const { return A_.data() + (p * d_ + mu) * N_; }
  const std::vector<double>& A_data() const { return A_; }

  /// F^a_{mu nu}, antisymmetric in (mu, nu).
  double F(std::size_t p, int mu, int nu, int a) const;
  /// Packed storage over pairs mu < nu: F[(p*P + pair)*N + a].
  const std::vector<double>& F_data() const { return F_; }
  static int pair_index(int mu, int nu, int d);

  /// A_mu and F_{mu nu} as n x n matrices in the span of E_a.
  Mat A_matrix(std::size_t p, int mu) const;
  Mat F_matrix(std::size_t p, int mu, int nu) const;

  /// Identity check for shared reference frames.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::shared_ptr<const Lattice> lattice_;
  std::shared_ptr<const LieBasis> basis_;
  std::vector<double> A_;
  std::vector<double> F_;
  std::string label_;
  int d_ = 0;
  int N_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// F^a_{mu nu} = d_mu A^a_nu - d_nu A^a_mu + C_bc^a A^b_mu A^c_nu, packed as in F_data().
std::vector<double> curvature_F(const Lattice& lattice, const LieBasis& basis, const std::vector<double>& A);

std::shared_ptr<const OrdinaryConnection> zero_connection(std::shared_ptr<const Lattice> lattice,
                                                          std::shared_ptr<const LieBasis> basis);
/// Same A^a_mu at every point (values[mu*N + a]); tori only.
std::shared_ptr<const OrdinaryConnection> constant_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                              const std::vector<double>& values);
/// Smooth random low-mode Fourier potential on a torus.
std::shared_ptr<const OrdinaryConnection> random_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                            std::uint64_t seed, double amplitude);
/// Charge-one instanton of scale rho on the two-chart S^4 with the instanton bundle.
std::shared_ptr<const OrdinaryConnection> bpst_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                          double rho);

/// Closed-form BPST potential in north coordinates (n x n, anti-hermitian).
Mat bpst_north_potential(const double* x, int mu, double rho);
/// Closed-form BPST potential in south coordinates (gauge-transformed, regular at y = 0).
Mat bpst_south_potential(const double* y, int mu, double rho, double radius);

/// Max over overlap points of ||F_b - J^T t F_a t^{-1} J|| with chart-a data
/// interpolated at the mapped point, relative to max ||F_b|| on the overlap.
double overlap_curvature_residual(const OrdinaryConnection& conn, const Manifold& man);

}  // namespace ncym
