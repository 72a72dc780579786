#pragma once

// Noncommutative connections on F = P x_R V, written against a reference
// ordinary connection as fields (a_mu, phi_a) with k x k anti-hermitian values.
// The connection 1-form in the adapted basis has components
//   omega(nabla_mu) = a_mu,   omega(ad_{E_b}) = phi_b - R_b,
// so the canonical vacuum phi = R, a = 0 is omega = 0.

#include <cstdint>
#include <memory>
#include <vector>

#include "ncym/connection.hpp"
#include "ncym/forms.hpp"
#include "ncym/geometry.hpp"
#include "ncym/lie.hpp"

namespace ncym {

struct NCConnection {
  std::shared_ptr<const OrdinaryConnection> ref;
  std::shared_ptr<const Representation> rep;
  std::vector<MatrixField> a;    // d fields
  std::vector<MatrixField> phi;  // N fields

  int d() const { return ref->d(); }
  int N() const { return ref->N(); }
  int k() const { return rep->k(); }
  std::size_t points() const { return ref->lattice().size(); }

  NCConnection& operator+=(const NCConnection& o);
  NCConnection& operator*=(double s);
  void axpy(double s, const NCConnection& o);
  /// Real inner product sum over fields and points of Re tr(x^dagger y).
  double dot(const NCConnection& o) const;
  double norm() const { return std::sqrt(dot(*this)); }
  bool all_finite() const;
  /// Replace every value by its anti-hermitian part.
  void project_antihermitian();
};

/// a = 0, phi = 0.
NCConnection zero_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep);
/// a = 0, phi_a = t R_a.
NCConnection scaled_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep, double t);
/// x-independent random anti-hermitian a and phi with entries of size amplitude.
NCConnection random_constant_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                                 std::uint64_t seed, double amplitude, double phi_scale = 1.0);
/// Same, with independent random anti-hermitian values at every point.
NCConnection random_field_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                              std::uint64_t seed, double amplitude);

MixedForm to_omega(const NCConnection& c);
NCConnection from_omega(const MixedForm& w, std::shared_ptr<const OrdinaryConnection> ref);

/// Curvature from the local component formulas.
MixedForm nc_curvature(const NCConnection& c);
/// Curvature as d-hat omega + omega omega.
MixedForm nc_curvature_via_forms(const NCConnection& c);

/// omega^U = U^{-1} omega U + U^{-1} d-hat U; U must be unitary to 1e-10.
NCConnection gauge_transform(const NCConnection& c, const MatrixField& U);
/// Tangent d-hat gamma + [omega, gamma] split into (a, phi) components.
NCConnection infinitesimal_gauge(const NCConnection& c, const MatrixField& gamma);

/// -(i_X d-hat + d-hat i_X) w for X = ad_gamma, gamma = gamma^a E_a with N real fields.
MixedForm geometric_gauge_action(const MixedForm& w, const std::vector<std::vector<double>>& gamma);

/// The 1-form alpha with alpha(nabla_mu) = 0, alpha(ad_{E_a}) = -R_a.
MixedForm alpha_form(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep);
/// Max over frame slots a of ||alpha(ad_{E_a}) + R_a||.
double vertical_condition_residual(const MixedForm& alpha);

/// Pieces of d-hat w = D w - [alpha, w] - phi o alpha^2 + rho*(nabla phi) o alpha for the
/// tensorial 1-form w with w(nabla_mu) = a_mu, w(ad_b) = phi_b.
struct RelationDd {
  MixedForm lhs;  // d-hat w
  MixedForm rhs;
};
RelationDd relation_Dd(const NCConnection& c);

/// Unitary check and polar re-projection (W V^dagger from the SVD).
MatrixField project_unitary(const MatrixField& U, double tol = 1e-10);

}  // namespace ncym
