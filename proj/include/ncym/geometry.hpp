#pragma once

// Discretized base manifolds. A Lattice concatenates the grid points of all
// charts (row-major within a chart, last axis fastest); every field in the
// library is a flat per-point array over one Lattice.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ncym/common.hpp"
#include "ncym/lie.hpp"

namespace ncym {

enum class Boundary { periodic, bounded };

struct ChartGrid {
  int id = 0;
  int d = 0;
  std::vector<int> shape;
  std::vector<double> spacing;
  std::vector<double> origin;  // coordinate of index 0 along each axis
  std::vector<Boundary> boundary;
  std::string coordinate_map = "cartesian";

  std::size_t size() const;
  std::vector<std::size_t> strides() const;
  void coords(std::size_t local, double* x) const;
  void multi_index(std::size_t local, int* idx) const;
};

class Lattice {
 public:
  /// fd_order is 2 (default) or 4.
  Lattice(std::vector<ChartGrid> charts, int fd_order = 2);

  int dim() const { return d_; }
  std::size_t size() const { return total_; }
  int num_charts() const { return static_cast<int>(charts_.size()); }
  const ChartGrid& chart(int c) const;
  std::size_t chart_begin(int c) const { return offsets_[static_cast<std::size_t>(c)]; }
  std::size_t chart_end(int c) const { return offsets_[static_cast<std::size_t>(c) + 1]; }
  int chart_of(std::size_t p) const;
  void coords(std::size_t p, double* x) const;
  std::vector<double> coords(std::size_t p) const;
  double cell_volume(int c) const;
  int fd_order() const { return fd_order_; }

  /// out = D_axis in, acting on `block` interleaved values per point.
  /// With adjoint = true applies the transpose of the stencil matrix.
  void derivative(const double* in, double* out, std::size_t block, int axis, bool adjoint = false) const;
  void derivative(const cplx* in, cplx* out, std::size_t block, int axis, bool adjoint = false) const;

  /// Stencil row i of chart c along axis: (offset index, coefficient) pairs.
  const std::vector<std::pair<int, double>>& stencil_row(int c, int axis, int i) const;

 private:
  template <class T>
  void apply(const T* in, T* out, std::size_t block, int axis, bool adjoint) const;

  using Stencil = std::vector<std::vector<std::pair<int, double>>>;
  std::vector<ChartGrid> charts_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
  int d_ = 0;
  int fd_order_ = 2;
  std::vector<std::vector<Stencil>> stencils_;  // [chart][axis]
};

class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(std::shared_ptr<const Lattice> lattice, int k);

  static MatrixField constant(std::shared_ptr<const Lattice> lattice, const Mat& m);

  int k() const { return k_; }
  std::size_t points() const { return lattice_ ? lattice_->size() : 0; }
  bool empty() const { return !lattice_; }
  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }

  Eigen::Map<Mat> at(std::size_t p) { return {data_.data() + p * stride(), k_, k_}; }
  Eigen::Map<const Mat> at(std::size_t p) const { return {data_.data() + p * stride(), k_, k_}; }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::size_t stride() const { return static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_); }

  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator-=(const MatrixField& o);
  MatrixField& operator*=(cplx s);
  void axpy(cplx s, const MatrixField& o);
  void set_zero();

  double max_abs() const;
  bool all_finite() const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  int k_ = 0;
  std::vector<cplx> data_;
};

MatrixField operator+(MatrixField a, const MatrixField& b);
MatrixField operator-(MatrixField a, const MatrixField& b);
MatrixField operator*(cplx s, MatrixField a);

/// Max over points of the Frobenius norm of a - b.
double max_diff(const MatrixField& a, const MatrixField& b);

MatrixField partial_derivative(const MatrixField& f, int mu);
/// Transpose of the discrete partial derivative (summation by parts).
MatrixField partial_derivative_adjoint(const MatrixField& f, int mu);

struct BaseMetric {
  std::shared_ptr<const Lattice> lattice;
  std::vector<double> g;         // d*d per point
  std::vector<double> sqrt_det;  // per point

  int dim() const { return lattice->dim(); }
  RMat at(std::size_t p) const;
  /// Validates symmetry and positive-definiteness and fills sqrt_det.
  void finalize();
};

struct Overlap {
  int chart_a = 0;
  int chart_b = 1;
  /// Coordinates in chart a -> coordinates in chart b.
  std::function<void(const double* x, double* y)> map;
  /// Structure-group transition t(x) on chart-a coordinates: sections glue
  /// as s_b = t s_a t^{-1}. Identity for trivial bundles.
  std::function<Mat(const double* x)> transition;
};

struct Manifold {
  std::shared_ptr<const Lattice> lattice;
  std::vector<double> weights;  // partition of unity, per point
  std::vector<Overlap> overlaps;
  std::string kind;    // "torus" | "sphere"
  std::string bundle = "trivial";
  double radius = 0.0;
  std::vector<double> lengths;  // torus side lengths
};

struct Geometry {
  Manifold manifold;
  BaseMetric metric;
};

Geometry build_torus(int d, int N, double L, int fd_order = 2);
Geometry build_torus(const std::vector<int>& shape, const std::vector<double>& lengths, int fd_order = 2);
/// Two stereographic charts over the box [-2r, 2r]^dim with N points per
/// axis. bundle = "instanton" (dim 4 only) attaches the charge-one SU(2)
/// transition function.
Geometry build_sphere_two_charts(int dim, int N, double radius = 1.0, const std::string& bundle = "trivial",
                                 int fd_order = 2);

/// Partition-of-unity profile: 1 for s <= 1/2, 0 for s >= 2, chi(s) + chi(1/s) = 1.
double sphere_bump(double s);
/// Inversion with one reflected axis: y = r^2 P x / |x|^2.
void sphere_point_map(int dim, double r, const double* x, double* y);
/// J(i, j) = dy^i / dx^j of the point map (row-major dim x dim).
void sphere_point_map_jacobian(int dim, double r, const double* x, double* J);
/// Round metric conformal factor 4 r^4 / (r^2 + |x|^2)^2.
double sphere_conformal_factor(double r, const double* x, int dim);

/// Charge-one SU(2) transition on the S^4 overlap, t(x) = (x4 - i x.sigma)/|x| in north coordinates.
Mat instanton_transition(const double* x);

/// Tensor-product Lagrange interpolation of per-point data (block values per
/// point) at coordinates x of chart c; order 1 is multilinear, 3 is cubic.
/// Returns false when x lies outside the grid.
bool interpolate(const Lattice& lat, int c, const double* values, std::size_t block, const double* x, double* out,
                 int order = 1);

/// Sum_x w(x) f(x) sqrt(det g^M(x)) prod h over all charts.
double integrate(const Manifold& man, const BaseMetric& g, std::span<const double> f);
/// Same without the metric density (for top-degree forms).
double integrate_density(const Manifold& man, std::span<const double> f);

/// s -> rho_R(t) s rho_R(t)^{-1} pointwise; t is an n x n group-valued field.
MatrixField transition_conjugate(const MatrixField& field, const MatrixField& t, const Representation& rep);
/// rho_R(t) for a single group element.
Mat represent_group_element(const Mat& t, const Representation& rep);

nlohmann::json lattice_to_json(const Lattice& lat);
nlohmann::json field_to_json(const MatrixField& f);
MatrixField field_from_json(const nlohmann::json& j, std::shared_ptr<const Lattice> lat);

}  // namespace ncym
