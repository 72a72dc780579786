#pragma once

// Noncommutative differential forms with values in End(F), stored in the
// dual adapted basis (dx^mu, theta^a = -alpha^a). A component key is a bit
// mask over D = d + N frame slots: bit mu is nabla_mu, bit d + a is ad_{E_a}.
// The component for mask S is omega(X_{s_1}, ..., X_{s_r}) with s sorted, so
// omega = sum_S omega_S dx^{I} theta^{J}.

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "ncym/connection.hpp"
#include "ncym/geometry.hpp"
#include "ncym/lie.hpp"
#include "ncym/metric.hpp"

namespace ncym {

using Key = std::uint64_t;

class MixedForm {
 public:
  MixedForm(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep, int degree);

  int degree() const { return degree_; }
  int d() const { return ref_->d(); }
  int N() const { return ref_->N(); }
  int D() const { return d() + N(); }
  int k() const { return rep_->k(); }
  const OrdinaryConnection& ref() const { return *ref_; }
  const std::shared_ptr<const OrdinaryConnection>& ref_ptr() const { return ref_; }
  const Representation& rep() const { return *rep_; }
  const std::shared_ptr<const Representation>& rep_ptr() const { return rep_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return ref_->lattice_ptr(); }

  const MatrixField* find(Key key) const;
  /// Component for key, created as zero if absent.
  MatrixField& at(Key key);
  void set(Key key, MatrixField f);
  const std::map<Key, MatrixField>& components() const { return comps_; }

  Key horizontal_mask() const { return (Key{1} << d()) - 1; }
  Key vertical_mask() const { return ((Key{1} << D()) - 1) & ~horizontal_mask(); }
  static Key key(const std::vector<int>& I, const std::vector<int>& J, int d);

  MixedForm& operator+=(const MixedForm& o);
  MixedForm& operator-=(const MixedForm& o);
  MixedForm& operator*=(cplx s);
  double max_abs() const;

 private:
  std::shared_ptr<const OrdinaryConnection> ref_;
  std::shared_ptr<const Representation> rep_;
  int degree_;
  std::map<Key, MatrixField> comps_;
};

MixedForm operator+(MixedForm a, const MixedForm& b);
MixedForm operator-(MixedForm a, const MixedForm& b);
/// max over components and points of the Frobenius norm of a - b.
double max_diff(const MixedForm& a, const MixedForm& b);

/// Degree-0 form with value m.
MixedForm scalar_form(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                      const MatrixField& m);

/// Frame commutator coefficient f_{AB}^{C} at a point (zero unless C is vertical).
double frame_structure(const OrdinaryConnection& ref, std::size_t p, int A, int B, int C);

MixedForm wedge(const MixedForm& a, const MixedForm& b);
/// Graded commutator [a, b] = a b - (-1)^{|a||b|} b a.
MixedForm graded_commutator(const MixedForm& a, const MixedForm& b);
MixedForm differential(const MixedForm& w);
/// d-hat evaluated on horizontal arguments only.
MixedForm covariant_differential(const MixedForm& w);
MixedForm dagger(const MixedForm& w);
/// Interior product with X = sum_A c^A X_A, c given as D real per-point fields.
MixedForm interior(const MixedForm& w, const std::vector<std::vector<double>>& c);

MixedForm hodge_star(const MixedForm& w, const RiemannianStructure& riem);
MixedForm hodge_star_inverse(const MixedForm& w, const RiemannianStructure& riem);
/// sum_{S,T} det(h[S,T]) w_S v_T; zero field for unequal degrees.
MatrixField metric_pairing(const MixedForm& w, const MixedForm& v, const RiemannianStructure& riem);

/// Horizontal components of the fiber integral: sqrt(det g_ab) tr(w_{I, top}).
struct BaseForm {
  int degree = 0;
  std::map<Key, std::vector<cplx>> comps;
};
BaseForm fiber_integrate(const MixedForm& w, const RiemannianStructure& riem);
cplx total_integral(const MixedForm& w, const Manifold& man, const RiemannianStructure& riem);
cplx scalar_product(const MixedForm& w, const MixedForm& v, const Manifold& man, const RiemannianStructure& riem);

nlohmann::json form_to_json(const MixedForm& w);

}  // namespace ncym
