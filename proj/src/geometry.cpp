#include "ncym/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncym {

std::size_t ChartGrid::size() const {
  std::size_t s = 1;
  for (int n : shape) s *= static_cast<std::size_t>(n);
  return s;
}

std::vector<std::size_t> ChartGrid::strides() const {
  std::vector<std::size_t> st(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) st[i] = st[i + 1] * static_cast<std::size_t>(shape[i + 1]);
  return st;
}

void ChartGrid::multi_index(std::size_t local, int* idx) const {
  for (int i = d - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(local % static_cast<std::size_t>(shape[i]));
    local /= static_cast<std::size_t>(shape[i]);
  }
}

void ChartGrid::coords(std::size_t local, double* x) const {
  for (int i = d - 1; i >= 0; --i) {
    const auto j = static_cast<int>(local % static_cast<std::size_t>(shape[i]));
    local /= static_cast<std::size_t>(shape[i]);
    x[i] = origin[i] + j * spacing[i];
  }
}

namespace {

using Row = std::vector<std::pair<int, double>>;

std::vector<Row> make_stencil(int N, double h, Boundary b, int order) {
  std::vector<Row> rows(static_cast<std::size_t>(N));
  auto wrap = [N](int i) { return ((i % N) + N) % N; };
  for (int i = 0; i < N; ++i) {
    Row& r = rows[static_cast<std::size_t>(i)];
    if (b == Boundary::periodic) {
      if (order == 4) {
        r = {{wrap(i - 2), 1.0 / (12 * h)}, {wrap(i - 1), -8.0 / (12 * h)},
             {wrap(i + 1), 8.0 / (12 * h)}, {wrap(i + 2), -1.0 / (12 * h)}};
      } else {
        r = {{wrap(i - 1), -0.5 / h}, {wrap(i + 1), 0.5 / h}};
      }
      continue;
    }
    if (order == 4) {
      static const double e0[5] = {-25, 48, -36, 16, -3};
      static const double e1[5] = {-3, -10, 18, -6, 1};
      if (i <= 1 || i >= N - 2) {
        const double* e = (i == 0 || i == N - 1) ? e0 : e1;
        const bool left = i <= 1;
        for (int j = 0; j < 5; ++j) {
          const int idx = left ? j : N - 1 - j;
          r.emplace_back(idx, (left ? 1.0 : -1.0) * e[j] / (12 * h));
        }
      } else {
        r = {{i - 2, 1.0 / (12 * h)}, {i - 1, -8.0 / (12 * h)}, {i + 1, 8.0 / (12 * h)}, {i + 2, -1.0 / (12 * h)}};
      }
    } else {
      if (i == 0) {
        r = {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
      } else if (i == N - 1) {
        r = {{N - 1, 1.5 / h}, {N - 2, -2.0 / h}, {N - 3, 0.5 / h}};
      } else {
        r = {{i - 1, -0.5 / h}, {i + 1, 0.5 / h}};
      }
    }
  }
  return rows;
}

}  // namespace

Lattice::Lattice(std::vector<ChartGrid> charts, int fd_order) : charts_(std::move(charts)), fd_order_(fd_order) {
  if (charts_.empty()) throw Error(ErrorCode::missing_chart, "lattice needs at least one chart");
  if (fd_order_ != 2 && fd_order_ != 4) throw Error(ErrorCode::validation, "finite-difference order must be 2 or 4");
  d_ = charts_[0].d;
  offsets_.push_back(0);
  for (const auto& c : charts_) {
    if (c.d != d_) throw Error(ErrorCode::shape, "all charts must share the base dimension");
    if (static_cast<int>(c.shape.size()) != d_ || static_cast<int>(c.spacing.size()) != d_ ||
        static_cast<int>(c.origin.size()) != d_ || static_cast<int>(c.boundary.size()) != d_)
      throw Error(ErrorCode::shape, "chart metadata must have one entry per axis");
    std::vector<Stencil> per_axis;
    for (int i = 0; i < d_; ++i) {
      if (c.shape[i] < 4) throw Error(ErrorCode::shape, "chart shape must be >= 4 per axis");
      if (!(c.spacing[i] > 0.0)) throw Error(ErrorCode::shape, "chart spacing must be positive");
      if (fd_order_ == 4 && c.shape[i] < 5) throw Error(ErrorCode::shape, "4th-order stencils need >= 5 points per axis");
      per_axis.push_back(make_stencil(c.shape[i], c.spacing[i], c.boundary[i], fd_order_));
    }
    stencils_.push_back(std::move(per_axis));
    total_ += c.size();
    offsets_.push_back(total_);
  }
}

const ChartGrid& Lattice::chart(int c) const {
  if (c < 0 || c >= num_charts()) throw Error(ErrorCode::missing_chart, "no chart with id " + std::to_string(c));
  return charts_[static_cast<std::size_t>(c)];
}

int Lattice::chart_of(std::size_t p) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), p);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

void Lattice::coords(std::size_t p, double* x) const {
  const int c = chart_of(p);
  charts_[static_cast<std::size_t>(c)].coords(p - chart_begin(c), x);
}

std::vector<double> Lattice::coords(std::size_t p) const {
  std::vector<double> x(static_cast<std::size_t>(d_));
  coords(p, x.data());
  return x;
}

double Lattice::cell_volume(int c) const {
  double v = 1.0;
  for (double h : chart(c).spacing) v *= h;
  return v;
}

const std::vector<std::pair<int, double>>& Lattice::stencil_row(int c, int axis, int i) const {
  return stencils_[static_cast<std::size_t>(c)][static_cast<std::size_t>(axis)][static_cast<std::size_t>(i)];
}

template <class T>
void Lattice::apply(const T* in, T* out, std::size_t block, int axis, bool adjoint) const {
  if (axis < 0 || axis >= d_)
    throw Error(ErrorCode::axis_out_of_range, "axis " + std::to_string(axis) + " out of range for d = " + std::to_string(d_));
  std::fill(out, out + total_ * block, T{});
  for (int c = 0; c < num_charts(); ++c) {
    const ChartGrid& ch = charts_[static_cast<std::size_t>(c)];
    const auto st = ch.strides()[static_cast<std::size_t>(axis)];
    const auto n = static_cast<std::size_t>(ch.shape[static_cast<std::size_t>(axis)]);
    const std::size_t lines = ch.size() / n;
    const Stencil& S = stencils_[static_cast<std::size_t>(c)][static_cast<std::size_t>(axis)];
    const std::size_t off = chart_begin(c);
    parallel_for(lines, [&](std::size_t l) {
      const std::size_t base = off + (l / st) * st * n + (l % st);
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : S[i]) {
          const std::size_t src = base + (adjoint ? i : static_cast<std::size_t>(j)) * st;
          const std::size_t dst = base + (adjoint ? static_cast<std::size_t>(j) : i) * st;
          for (std::size_t b = 0; b < block; ++b) out[dst * block + b] += w * in[src * block + b];
        }
      }
    });
  }
}

void Lattice::derivative(const double* in, double* out, std::size_t block, int axis, bool adjoint) const {
  apply(in, out, block, axis, adjoint);
}
void Lattice::derivative(const cplx* in, cplx* out, std::size_t block, int axis, bool adjoint) const {
  apply(in, out, block, axis, adjoint);
}

MatrixField::MatrixField(std::shared_ptr<const Lattice> lattice, int k)
    : lattice_(std::move(lattice)), k_(k), data_(lattice_->size() * stride(), cplx(0.0, 0.0)) {
  if (k < 1) throw Error(ErrorCode::shape, "matrix fields need k >= 1");
}

MatrixField MatrixField::constant(std::shared_ptr<const Lattice> lattice, const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::shape, "constant field value must be square");
  MatrixField f(std::move(lattice), static_cast<int>(m.rows()));
  for (std::size_t p = 0; p < f.points(); ++p) f.at(p) = m;
  return f;
}

namespace {
void check_same(const MatrixField& a, const MatrixField& b) {
  if (a.lattice_ptr() != b.lattice_ptr() || a.k() != b.k())
    throw Error(ErrorCode::shape, "matrix fields live on different lattices or have different k");
}
}  // namespace

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

void MatrixField::axpy(cplx s, const MatrixField& o) {
  check_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
}

void MatrixField::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

double MatrixField::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool MatrixField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
MatrixField operator*(cplx s, MatrixField a) { return a *= s; }

double max_diff(const MatrixField& a, const MatrixField& b) {
  check_same(a, b);
  double m = 0.0;
  for (std::size_t p = 0; p < a.points(); ++p) m = std::max(m, (a.at(p) - b.at(p)).norm());
  return m;
}

MatrixField partial_derivative(const MatrixField& f, int mu) {
  MatrixField out(f.lattice_ptr(), f.k());
  f.lattice().derivative(f.data(), out.data(), f.stride(), mu, false);
  return out;
}

MatrixField partial_derivative_adjoint(const MatrixField& f, int mu) {
  MatrixField out(f.lattice_ptr(), f.k());
  f.lattice().derivative(f.data(), out.data(), f.stride(), mu, true);
  return out;
}

RMat BaseMetric::at(std::size_t p) const {
  const int d = dim();
  RMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g[(p * d + i) * d + j];
  return m;
}

void BaseMetric::finalize() {
  const int d = dim();
  if (g.size() != lattice->size() * static_cast<std::size_t>(d * d))
    throw Error(ErrorCode::shape, "base metric needs d*d entries per point");
  sqrt_det.assign(lattice->size(), 0.0);
  for (std::size_t p = 0; p < lattice->size(); ++p) {
    const RMat m = at(p);
    if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm()))
      throw Error(ErrorCode::not_spd, "base metric not symmetric at point " + std::to_string(p));
    Eigen::LLT<RMat> llt(m);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::not_spd, "base metric not positive-definite at point " + std::to_string(p));
    double s = 1.0;
    const RMat L = llt.matrixL();
    for (int i = 0; i < d; ++i) s *= L(i, i);
    sqrt_det[p] = s;
  }
}

Geometry build_torus(int d, int N, double L, int fd_order) {
  if (d < 1) throw Error(ErrorCode::unsupported_dim, "torus dimension must be >= 1");
  return build_torus(std::vector<int>(static_cast<std::size_t>(d), N), std::vector<double>(static_cast<std::size_t>(d), L),
                     fd_order);
}

Geometry build_torus(const std::vector<int>& shape, const std::vector<double>& lengths, int fd_order) {
  const int d = static_cast<int>(shape.size());
  if (d < 1) throw Error(ErrorCode::unsupported_dim, "torus dimension must be >= 1");
  if (lengths.size() != shape.size()) throw Error(ErrorCode::shape, "torus needs one length per axis");
  ChartGrid ch;
  ch.id = 0;
  ch.d = d;
  ch.shape = shape;
  for (int i = 0; i < d; ++i) {
    if (!(lengths[i] > 0.0)) throw Error(ErrorCode::shape, "torus side lengths must be positive");
    ch.spacing.push_back(lengths[i] / shape[i]);
  }
  ch.origin.assign(static_cast<std::size_t>(d), 0.0);
  ch.boundary.assign(static_cast<std::size_t>(d), Boundary::periodic);
  auto lat = std::make_shared<const Lattice>(std::vector<ChartGrid>{ch}, fd_order);

  Geometry geo;
  geo.manifold.lattice = lat;
  geo.manifold.weights.assign(lat->size(), 1.0);
  geo.manifold.kind = "torus";
  geo.manifold.lengths = lengths;
  geo.metric.lattice = lat;
  geo.metric.g.assign(lat->size() * static_cast<std::size_t>(d * d), 0.0);
  for (std::size_t p = 0; p < lat->size(); ++p)
    for (int i = 0; i < d; ++i) geo.metric.g[(p * d + i) * d + i] = 1.0;
  geo.metric.finalize();
  return geo;
}

double sphere_bump(double s) {
  if (s <= 0.0) return 1.0;
  const double u0 = std::log(2.0);
  const double t = (std::log(s) + u0) / (2.0 * u0);
  auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = f(t);
  const double b = f(1.0 - t);
  return 1.0 - a / (a + b);
}

void sphere_point_map(int dim, double r, const double* x, double* y) {
  double n2 = 0.0;
  for (int i = 0; i < dim; ++i) n2 += x[i] * x[i];
  for (int i = 0; i < dim; ++i) y[i] = r * r * x[i] / n2;
  y[0] = -y[0];
}

void sphere_point_map_jacobian(int dim, double r, const double* x, double* J) {
  double n2 = 0.0;
  for (int i = 0; i < dim; ++i) n2 += x[i] * x[i];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double v = r * r * ((i == j ? 1.0 : 0.0) / n2 - 2.0 * x[i] * x[j] / (n2 * n2));
      J[i * dim + j] = i == 0 ? -v : v;
    }
}

double sphere_conformal_factor(double r, const double* x, int dim) {
  double n2 = 0.0;
  for (int i = 0; i < dim; ++i) n2 += x[i] * x[i];
  const double den = r * r + n2;
  return 4.0 * r * r * r * r / (den * den);
}

Mat instanton_transition(const double* x) {
  const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  Mat q(2, 2);
  // x4 - i (x1 s1 + x2 s2 + x3 s3)
  q(0, 0) = cplx(x[3], -x[2]);
  q(0, 1) = cplx(-x[1], -x[0]);
  q(1, 0) = cplx(x[1], -x[0]);
  q(1, 1) = cplx(x[3], x[2]);
  return q / n;
}

Geometry build_sphere_two_charts(int dim, int N, double radius, const std::string& bundle, int fd_order) {
  if (dim != 2 && dim != 4) throw Error(ErrorCode::unsupported_dim, "two-chart spheres exist for dim 2 and 4 only");
  if (N < 8) throw Error(ErrorCode::shape, "sphere grids need N >= 8");
  if (!(radius > 0.0)) throw Error(ErrorCode::shape, "sphere radius must be positive");
  if (bundle != "trivial" && bundle != "instanton") throw Error(ErrorCode::validation, "unknown bundle '" + bundle + "'");
  if (bundle == "instanton" && dim != 4) throw Error(ErrorCode::unsupported_dim, "the instanton bundle needs dim 4");

  const double L = 2.0 * radius;
  std::vector<ChartGrid> charts;
  for (int c = 0; c < 2; ++c) {
    ChartGrid ch;
    ch.id = c;
    ch.d = dim;
    ch.shape.assign(static_cast<std::size_t>(dim), N);
    ch.spacing.assign(static_cast<std::size_t>(dim), 2.0 * L / (N - 1));
    ch.origin.assign(static_cast<std::size_t>(dim), -L);
    ch.boundary.assign(static_cast<std::size_t>(dim), Boundary::bounded);
    ch.coordinate_map = c == 0 ? "stereographic-north" : "stereographic-south";
    charts.push_back(ch);
  }
  auto lat = std::make_shared<const Lattice>(std::move(charts), fd_order);

  Geometry geo;
  Manifold& man = geo.manifold;
  man.lattice = lat;
  man.kind = "sphere";
  man.bundle = bundle;
  man.radius = radius;
  man.weights.assign(lat->size(), 0.0);
  geo.metric.lattice = lat;
  geo.metric.g.assign(lat->size() * static_cast<std::size_t>(dim * dim), 0.0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t p = 0; p < lat->size(); ++p) {
    lat->coords(p, x.data());
    double n2 = 0.0;
    for (double v : x) n2 += v * v;
    man.weights[p] = sphere_bump(std::sqrt(n2) / radius);
    const double cf = sphere_conformal_factor(radius, x.data(), dim);
    for (int i = 0; i < dim; ++i) geo.metric.g[(p * dim + i) * dim + i] = cf;
  }
  geo.metric.finalize();

  auto map = [dim, radius](const double* a, double* b) { sphere_point_map(dim, radius, a, b); };
  Overlap ns{0, 1, map, nullptr};
  Overlap sn{1, 0, map, nullptr};
  if (bundle == "instanton") {
    ns.transition = [](const double* xn) { return instanton_transition(xn); };
    sn.transition = [radius](const double* ys) {
      double xn[4];
      sphere_point_map(4, radius, ys, xn);
      return Mat(instanton_transition(xn).adjoint());
    };
  } else {
    ns.transition = [](const double*) { return Mat(Mat::Identity(1, 1)); };
    sn.transition = ns.transition;
  }
  man.overlaps = {ns, sn};
  return geo;
}

bool interpolate(const Lattice& lat, int c, const double* values, std::size_t block, const double* x, double* out,
                 int order) {
  if (order != 1 && order != 3) throw Error(ErrorCode::validation, "interpolation order must be 1 or 3");
  const ChartGrid& ch = lat.chart(c);
  const int d = ch.d;
  const int m = order + 1;
  // per axis: m (index, weight) pairs
  std::vector<int> idx(static_cast<std::size_t>(d * m));
  std::vector<double> wt(static_cast<std::size_t>(d * m));
  for (int i = 0; i < d; ++i) {
    const double t = (x[i] - ch.origin[i]) / ch.spacing[i];
    const int n = ch.shape[i];
    int first;
    if (ch.boundary[i] == Boundary::periodic) {
      first = static_cast<int>(std::floor(t)) - (m / 2 - 1);
    } else {
      if (t < -1e-12 || t > n - 1 + 1e-12) return false;
      first = std::clamp(static_cast<int>(std::floor(t)) - (m / 2 - 1), 0, n - m);
    }
    for (int a = 0; a < m; ++a) {
      // Lagrange weight of node first + a at t
      double w = 1.0;
      for (int b = 0; b < m; ++b)
        if (b != a) w *= (t - (first + b)) / static_cast<double>(a - b);
      const int j = ch.boundary[i] == Boundary::periodic ? ((first + a) % n + n) % n : first + a;
      idx[static_cast<std::size_t>(i * m + a)] = j;
      wt[static_cast<std::size_t>(i * m + a)] = w;
    }
  }
  const auto st = ch.strides();
  std::fill(out, out + block, 0.0);
  const std::size_t total = static_cast<std::size_t>(std::pow(m, d));
  for (std::size_t corner = 0; corner < total; ++corner) {
    std::size_t rem = corner;
    double w = 1.0;
    std::size_t off = 0;
    for (int i = 0; i < d; ++i) {
      const int a = static_cast<int>(rem % static_cast<std::size_t>(m));
      rem /= static_cast<std::size_t>(m);
      w *= wt[static_cast<std::size_t>(i * m + a)];
      off += static_cast<std::size_t>(idx[static_cast<std::size_t>(i * m + a)]) * st[i];
    }
    if (w == 0.0) continue;
    const double* v = values + (lat.chart_begin(c) + off) * block;
    for (std::size_t b = 0; b < block; ++b) out[b] += w * v[b];
  }
  return true;
}

namespace {

double integrate_impl(const Manifold& man, const BaseMetric* g, std::span<const double> f) {
  const Lattice& lat = *man.lattice;
  if (f.size() != lat.size())
    throw Error(ErrorCode::missing_chart, "integrand must be defined on every chart point");
  std::vector<double> vals(lat.size());
  for (int c = 0; c < lat.num_charts(); ++c) {
    const double cv = lat.cell_volume(c);
    for (std::size_t p = lat.chart_begin(c); p < lat.chart_end(c); ++p)
      vals[p] = man.weights[p] * f[p] * (g ? g->sqrt_det[p] : 1.0) * cv;
  }
  return pairwise_sum(vals);
}

}  // namespace

double integrate(const Manifold& man, const BaseMetric& g, std::span<const double> f) {
  if (g.lattice != man.lattice) throw Error(ErrorCode::shape, "metric and manifold use different lattices");
  return integrate_impl(man, &g, f);
}

double integrate_density(const Manifold& man, std::span<const double> f) { return integrate_impl(man, nullptr, f); }

Mat represent_group_element(const Mat& t, const Representation& rep) {
  const int n = rep.basis().n();
  if (t.rows() != n || t.cols() != n) throw Error(ErrorCode::shape, "group element must be n x n");
  if ((t.adjoint() * t - Mat::Identity(n, n)).norm() > 1e-10)
    throw Error(ErrorCode::non_unitary, "transition value is not unitary");
  if (rep.kind() == "fundamental") return t;
  if (rep.kind().rfind("trivial", 0) == 0) return Mat::Identity(rep.k(), rep.k());
  const CVec x = rep.basis().coordinates(log_special_unitary(t));
  std::vector<double> xr(static_cast<std::size_t>(x.size()));
  for (Eigen::Index a = 0; a < x.size(); ++a) xr[static_cast<std::size_t>(a)] = x(a).real();
  return exp_antihermitian(rep.image(xr));
}

MatrixField transition_conjugate(const MatrixField& field, const MatrixField& t, const Representation& rep) {
  if (field.k() != rep.k()) throw Error(ErrorCode::shape, "field rank does not match the representation");
  if (t.k() != rep.basis().n()) throw Error(ErrorCode::shape, "transition field must be n x n");
  if (field.lattice_ptr() != t.lattice_ptr()) throw Error(ErrorCode::shape, "field and transition on different lattices");
  MatrixField out(field.lattice_ptr(), field.k());
  parallel_for(field.points(), [&](std::size_t p) {
    const Mat r = represent_group_element(t.at(p), rep);
    out.at(p) = r * field.at(p) * r.adjoint();
  });
  return out;
}

nlohmann::json lattice_to_json(const Lattice& lat) {
  nlohmann::json charts = nlohmann::json::array();
  for (int c = 0; c < lat.num_charts(); ++c) {
    const ChartGrid& ch = lat.chart(c);
    nlohmann::json b = nlohmann::json::array();
    for (auto k : ch.boundary) b.push_back(k == Boundary::periodic ? "periodic" : "bounded");
    charts.push_back({{"id", ch.id},
                      {"d", ch.d},
                      {"shape", ch.shape},
                      {"spacing", ch.spacing},
                      {"origin", ch.origin},
                      {"boundary", b},
                      {"coordinate_map", ch.coordinate_map}});
  }
  return {{"fd_order", lat.fd_order()}, {"charts", charts}};
}

nlohmann::json field_to_json(const MatrixField& f) {
  nlohmann::json data = nlohmann::json::array();
  for (std::size_t p = 0; p < f.points(); ++p) {
    const auto m = f.at(p);
    for (int i = 0; i < f.k(); ++i)
      for (int j = 0; j < f.k(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return {{"k", f.k()}, {"lattice", lattice_to_json(f.lattice())}, {"layout", "point-major, row-major k x k, [re, im]"}, {"data", data}};
}

MatrixField field_from_json(const nlohmann::json& j, std::shared_ptr<const Lattice> lat) {
  const int k = j.at("k").get<int>();
  MatrixField f(std::move(lat), k);
  const auto& data = j.at("data");
  if (data.size() != f.points() * f.stride()) throw Error(ErrorCode::shape, "field snapshot size does not match lattice");
  std::size_t i = 0;
  for (std::size_t p = 0; p < f.points(); ++p) {
    auto m = f.at(p);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c, ++i) m(r, c) = cplx(data[i][0].get<double>(), data[i][1].get<double>());
  }
  return f;
}

}  // namespace ncym
