#include "ncym/connection.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace ncym {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

int OrdinaryConnection::pair_index(int mu, int nu, int d) {
  // rank of (mu, nu), mu < nu, in lexicographic order
  return mu * d - mu * (mu + 1) / 2 + (nu - mu - 1);
}

OrdinaryConnection::OrdinaryConnection(std::shared_ptr<const Lattice> lattice, std::shared_ptr<const LieBasis> basis,
                                       std::vector<double> A, std::string label)
    : lattice_(std::move(lattice)), basis_(std::move(basis)), A_(std::move(A)), label_(std::move(label)) {
  d_ = lattice_->dim();
  N_ = basis_->dim();
  if (A_.size() != lattice_->size() * static_cast<std::size_t>(d_ * N_))
    throw Error(ErrorCode::shape, "connection needs d*(n^2-1) values per point");
  for (double v : A_)
    if (!std::isfinite(v)) throw Error(ErrorCode::validation, "connection has non-finite entries");
  F_ = curvature_F(*lattice_, *basis_, A_);
  fingerprint_ = fnv1a(A_.data(), A_.size() * sizeof(double), fnv1a(label_.data(), label_.size()));
}

double OrdinaryConnection::F(std::size_t p, int mu, int nu, int a) const {
  if (mu == nu) return 0.0;
  const int P = d_ * (d_ - 1) / 2;
  if (mu < nu) return F_[(p * P + pair_index(mu, nu, d_)) * N_ + a];
  return -F_[(p * P + pair_index(nu, mu, d_)) * N_ + a];
}

Mat OrdinaryConnection::A_matrix(std::size_t p, int mu) const {
  return basis_->combine(std::span<const double>(A_ptr(p, mu), static_cast<std::size_t>(N_)));
}

Mat OrdinaryConnection::F_matrix(std::size_t p, int mu, int nu) const {
  std::vector<double> f(static_cast<std::size_t>(N_));
  for (int a = 0; a < N_; ++a) f[a] = F(p, mu, nu, a);
  return basis_->combine(f);
}

std::vector<double> curvature_F(const Lattice& lattice, const LieBasis& basis, const std::vector<double>& A) {
  const int d = lattice.dim();
  const int N = basis.dim();
  const std::size_t block = static_cast<std::size_t>(d * N);
  const int P = d * (d - 1) / 2;
  std::vector<double> F(lattice.size() * static_cast<std::size_t>(P * N), 0.0);
  if (P == 0) return F;
  std::vector<std::vector<double>> dA(static_cast<std::size_t>(d), std::vector<double>(A.size()));
  for (int mu = 0; mu < d; ++mu) lattice.derivative(A.data(), dA[mu].data(), block, mu);
  parallel_for(lattice.size(), [&](std::size_t p) {
    const double* Ap = A.data() + p * block;
    for (int mu = 0; mu < d; ++mu)
      for (int nu = mu + 1; nu < d; ++nu) {
        double* out = F.data() + (p * P + OrdinaryConnection::pair_index(mu, nu, d)) * N;
        for (int a = 0; a < N; ++a) out[a] = dA[mu][p * block + nu * N + a] - dA[nu][p * block + mu * N + a];
        for (int b = 0; b < N; ++b) {
          const double Ab = Ap[mu * N + b];
          if (Ab == 0.0) continue;
          for (int c = 0; c < N; ++c) {
            const double Ac = Ap[nu * N + c];
            if (Ac == 0.0) continue;
            for (int a = 0; a < N; ++a) out[a] += basis.C(b, c, a) * Ab * Ac;
          }
        }
      }
  });
  return F;
}

std::shared_ptr<const OrdinaryConnection> zero_connection(std::shared_ptr<const Lattice> lattice,
                                                          std::shared_ptr<const LieBasis> basis) {
  const std::size_t n = lattice->size() * static_cast<std::size_t>(lattice->dim() * basis->dim());
  return std::make_shared<const OrdinaryConnection>(std::move(lattice), std::move(basis), std::vector<double>(n, 0.0), "zero");
}

std::shared_ptr<const OrdinaryConnection> constant_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                              const std::vector<double>& values) {
  const int d = man.lattice->dim();
  const int N = basis->dim();
  if (man.kind != "torus") throw Error(ErrorCode::validation, "constant connections are only defined on tori");
  if (values.size() != static_cast<std::size_t>(d * N)) throw Error(ErrorCode::shape, "constant connection needs d*(n^2-1) values");
  std::vector<double> A;
  A.reserve(man.lattice->size() * values.size());
  for (std::size_t p = 0; p < man.lattice->size(); ++p) A.insert(A.end(), values.begin(), values.end());
  return std::make_shared<const OrdinaryConnection>(man.lattice, std::move(basis), std::move(A), "constant");
}

std::shared_ptr<const OrdinaryConnection> random_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                            std::uint64_t seed, double amplitude) {
  if (man.kind != "torus") throw Error(ErrorCode::validation, "random connections are only defined on tori");
  const Lattice& lat = *man.lattice;
  const int d = lat.dim();
  const int N = basis->dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> wave(-1, 1);
  struct Mode {
    std::vector<int> k;
    double c, phase;
  };
  std::vector<Mode> modes;
  for (int i = 0; i < d * N * 3; ++i) {
    Mode m;
    m.k.resize(static_cast<std::size_t>(d));
    bool nonzero = false;
    while (!nonzero) {
      for (auto& kk : m.k) kk = wave(rng);
      for (int kk : m.k) nonzero = nonzero || kk != 0;
    }
    m.c = coef(rng);
    m.phase = M_PI * coef(rng);
    modes.push_back(std::move(m));
  }
  std::vector<double> A(lat.size() * static_cast<std::size_t>(d * N));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < lat.size(); ++p) {
    lat.coords(p, x.data());
    for (int j = 0; j < d * N; ++j) {
      double v = 0.0;
      for (int r = 0; r < 3; ++r) {
        const Mode& m = modes[static_cast<std::size_t>(3 * j + r)];
        double arg = m.phase;
        for (int i = 0; i < d; ++i) arg += 2.0 * M_PI * m.k[i] * x[i] / man.lengths[i];
        v += m.c * std::sin(arg);
      }
      A[p * d * N + j] = amplitude * v;
    }
  }
  return std::make_shared<const OrdinaryConnection>(man.lattice, std::move(basis), std::move(A), "random");
}

namespace {

// x4 - i x.sigma
Mat quaternion(const double* x) {
  Mat q(2, 2);
  q(0, 0) = cplx(x[3], -x[2]);
  q(0, 1) = cplx(-x[1], -x[0]);
  q(1, 0) = cplx(x[1], -x[0]);
  q(1, 1) = cplx(x[3], x[2]);
  return q;
}

Mat quaternion_derivative(int mu) {
  double e[4] = {0.0, 0.0, 0.0, 0.0};
  e[mu] = 1.0;
  return quaternion(e);
}

}  // namespace

Mat bpst_north_potential(const double* x, int mu, double rho) {
  // (|x|^2 / (|x|^2 + rho^2)) g^{-1} d_mu g with g = q / |x|
  const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  const Mat q = quaternion(x);
  return (q.adjoint() * quaternion_derivative(mu) - x[mu] * Mat::Identity(2, 2)) / (n2 + rho * rho);
}

Mat bpst_south_potential(const double* y, int mu, double rho, double radius) {
  const double ny2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
  if (ny2 == 0.0) return Mat::Zero(2, 2);
  double x[4];
  double J[16];
  sphere_point_map(4, radius, y, x);
  sphere_point_map_jacobian(4, radius, y, J);  // dx^nu / dy^mu
  const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
  const Mat q = quaternion(x);
  Mat out = Mat::Zero(2, 2);
  for (int nu = 0; nu < 4; ++nu) {
    // g A g^{-1} - dg g^{-1} = -(rho^2 / (|x|^2 + rho^2)) dg g^{-1}
    const Mat dgg = (quaternion_derivative(nu) * q.adjoint() - x[nu] * Mat::Identity(2, 2)) / n2;
    out += J[nu * 4 + mu] * (-rho * rho / (n2 + rho * rho)) * dgg;
  }
  return out;
}

std::shared_ptr<const OrdinaryConnection> bpst_connection(const Manifold& man, std::shared_ptr<const LieBasis> basis,
                                                          double rho) {
  if (man.kind != "sphere" || man.lattice->dim() != 4 || man.bundle != "instanton")
    throw Error(ErrorCode::validation, "BPST connection needs the two-chart S^4 with the instanton bundle");
  if (basis->n() != 2) throw Error(ErrorCode::invalid_rank, "BPST connection needs su(2)");
  if (!(rho > 0.0)) throw Error(ErrorCode::validation, "BPST scale must be positive");
  const Lattice& lat = *man.lattice;
  const int N = basis->dim();
  std::vector<double> A(lat.size() * static_cast<std::size_t>(4 * N));
  parallel_for(lat.size(), [&](std::size_t p) {
    double x[4];
    lat.coords(p, x);
    const bool north = lat.chart_of(p) == 0;
    for (int mu = 0; mu < 4; ++mu) {
      const Mat m = north ? bpst_north_potential(x, mu, rho) : bpst_south_potential(x, mu, rho, man.radius);
      const CVec c = basis->coordinates(m);
      for (int a = 0; a < N; ++a) A[(p * 4 + mu) * N + a] = c(a).real();
    }
  });
  return std::make_shared<const OrdinaryConnection>(man.lattice, std::move(basis), std::move(A), "bpst");
}

double overlap_curvature_residual(const OrdinaryConnection& conn, const Manifold& man) {
  const Lattice& lat = conn.lattice();
  const int d = lat.dim();
  const int N = conn.N();
  const int P = d * (d - 1) / 2;
  double worst = 0.0;
  double scale = 0.0;
  std::vector<double> y(static_cast<std::size_t>(d)), x(static_cast<std::size_t>(d)), J(static_cast<std::size_t>(d * d));
  std::vector<double> Fa(static_cast<std::size_t>(P * N));
  for (const Overlap& ov : man.overlaps) {
    for (std::size_t p = lat.chart_begin(ov.chart_b); p < lat.chart_end(ov.chart_b); ++p) {
      const double w = man.weights[p];
      if (w <= 0.0 || w >= 1.0) continue;
      lat.coords(p, y.data());
      ov.map(y.data(), x.data());
      if (!interpolate(lat, ov.chart_a, conn.F_data().data(), static_cast<std::size_t>(P * N), x.data(), Fa.data(), 3)) continue;
      sphere_point_map_jacobian(d, man.radius, y.data(), J.data());
      const Mat t = ov.transition(x.data());
      const bool trivial = t.rows() != conn.basis().n();
      std::vector<Mat> Fm(static_cast<std::size_t>(P));
      for (int mu = 0; mu < d; ++mu)
        for (int nu = mu + 1; nu < d; ++nu) {
          const int k = OrdinaryConnection::pair_index(mu, nu, d);
          const Mat f = conn.basis().combine(std::span<const double>(Fa.data() + k * N, static_cast<std::size_t>(N)));
          Fm[k] = trivial ? f : Mat(t * f * t.adjoint());
        }
      for (int r = 0; r < d; ++r)
        for (int s = r + 1; s < d; ++s) {
          Mat pred = Mat::Zero(conn.basis().n(), conn.basis().n());
          for (int mu = 0; mu < d; ++mu)
            for (int nu = mu + 1; nu < d; ++nu) {
              const double c = J[mu * d + r] * J[nu * d + s] - J[nu * d + r] * J[mu * d + s];
              pred += c * Fm[OrdinaryConnection::pair_index(mu, nu, d)];
            }
          const Mat fb = conn.F_matrix(p, r, s);
          worst = std::max(worst, (fb - pred).norm());
          scale = std::max(scale, fb.norm());
        }
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace ncym
