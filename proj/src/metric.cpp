#include "ncym/metric.hpp"

#include <cmath>
#include <random>

namespace ncym {

namespace {

RMat read_block(const std::vector<double>& v, std::size_t p, int n) {
  RMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[(p * n + i) * n + j];
  return m;
}

RMat spd_inverse(const RMat& m, ErrorCode code, const char* what, std::size_t p, double* cond) {
  if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm()))
    throw Error(code, std::string(what) + " not symmetric at point " + std::to_string(p));
  Eigen::SelfAdjointEigenSolver<RMat> es(m);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw Error(code, std::string(what) + " not positive-definite at point " + std::to_string(p));
  if (cond) *cond = std::max(*cond, hi / lo);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

RMat RiemannianStructure::gM(std::size_t p) const { return base.at(p); }
RMat RiemannianStructure::gInt(std::size_t p) const { return read_block(g_int, p, N()); }
RMat RiemannianStructure::hM(std::size_t p) const { return read_block(h_base, p, d()); }
RMat RiemannianStructure::hInt(std::size_t p) const { return read_block(h_int, p, N()); }

RMat RiemannianStructure::A(std::size_t p) const {
  RMat a(N(), d());
  for (int mu = 0; mu < d(); ++mu)
    for (int b = 0; b < N(); ++b) a(b, mu) = conn->A(p, mu, b);
  return a;
}

RMat RiemannianStructure::g_B(std::size_t p) const { return assemble_block(gM(p), gInt(p), A(p)); }
RMat RiemannianStructure::h_B(std::size_t p) const { return inverse_block(gM(p), gInt(p), A(p)); }

std::shared_ptr<const RiemannianStructure> assemble(const BaseMetric& base, std::vector<double> g_int,
                                                    std::shared_ptr<const OrdinaryConnection> conn) {
  if (base.lattice != conn->lattice_ptr()) throw Error(ErrorCode::shape, "metric and connection use different lattices");
  const int d = conn->d();
  const int N = conn->N();
  const std::size_t n = base.lattice->size();
  if (g_int.empty()) {
    g_int.assign(n * static_cast<std::size_t>(N * N), 0.0);
    for (std::size_t p = 0; p < n; ++p)
      for (int a = 0; a < N; ++a) g_int[(p * N + a) * N + a] = 1.0;
  }
  if (g_int.size() != n * static_cast<std::size_t>(N * N)) throw Error(ErrorCode::shape, "internal metric needs N*N values per point");
  auto r = std::make_shared<RiemannianStructure>();
  r->base = base;
  r->conn = std::move(conn);
  r->g_int = std::move(g_int);
  r->h_base.resize(n * static_cast<std::size_t>(d * d));
  r->h_int.resize(n * static_cast<std::size_t>(N * N));
  r->sqrt_det_int.resize(n);
  double cond = 1.0;
  for (std::size_t p = 0; p < n; ++p) {
    const RMat hM = spd_inverse(base.at(p), ErrorCode::singular_metric, "base metric", p, &cond);
    const RMat gi = r->gInt(p);
    const RMat hI = spd_inverse(gi, ErrorCode::singular_fiber_metric, "internal metric", p, &cond);
    std::copy(hM.data(), hM.data() + d * d, r->h_base.begin() + static_cast<std::ptrdiff_t>(p * d * d));
    std::copy(hI.data(), hI.data() + N * N, r->h_int.begin() + static_cast<std::ptrdiff_t>(p * N * N));
    r->sqrt_det_int[p] = std::sqrt(gi.determinant());
  }
  if (cond > 1e8) warn("metric condition number " + std::to_string(cond) + " exceeds 1e8");
  return r;
}

std::shared_ptr<const RiemannianStructure> assemble_constant(const BaseMetric& base, const RMat& g_int,
                                                             std::shared_ptr<const OrdinaryConnection> conn) {
  const int N = conn->N();
  if (g_int.rows() != N || g_int.cols() != N) throw Error(ErrorCode::shape, "internal metric must be N x N");
  std::vector<double> v;
  v.reserve(base.lattice->size() * static_cast<std::size_t>(N * N));
  for (std::size_t p = 0; p < base.lattice->size(); ++p)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) v.push_back(g_int(i, j));
  return assemble(base, std::move(v), std::move(conn));
}

RMat assemble_block(const RMat& gM, const RMat& g_int, const RMat& A) {
  const auto d = gM.rows();
  const auto N = g_int.rows();
  RMat g(d + N, d + N);
  g.topLeftCorner(d, d) = gM + A.transpose() * g_int * A;
  g.topRightCorner(d, N) = -A.transpose() * g_int;
  g.bottomLeftCorner(N, d) = -g_int * A;
  g.bottomRightCorner(N, N) = g_int;
  return g;
}

RMat inverse_block(const RMat& gM, const RMat& g_int, const RMat& A) {
  const auto d = gM.rows();
  const auto N = g_int.rows();
  const RMat hM = gM.inverse();
  const RMat hI = g_int.inverse();
  RMat h(d + N, d + N);
  h.topLeftCorner(d, d) = hM;
  h.topRightCorner(d, N) = hM * A.transpose();
  h.bottomLeftCorner(N, d) = A * hM;
  h.bottomRightCorner(N, N) = A * hM * A.transpose() + hI;
  return h;
}

MetricBlocks extract_block(const RMat& g_full, int d) {
  const auto D = g_full.rows();
  const auto N = D - d;
  const RMat gi = g_full.bottomRightCorner(N, N);
  Eigen::FullPivLU<RMat> lu(gi);
  if (!lu.isInvertible() || std::abs(gi.determinant()) < 1e-300)
    throw Error(ErrorCode::singular_fiber_metric, "fiber block of the metric is degenerate");
  MetricBlocks out;
  out.g_int = gi;
  out.A = -lu.solve(RMat(g_full.bottomLeftCorner(N, d)));
  out.gM = g_full.topLeftCorner(d, d) - out.A.transpose() * gi * out.A;
  return out;
}

double orthogonality_residual(const RMat& g_full, const RMat& A) {
  const auto N = A.rows();
  const auto d = A.cols();
  // nabla_mu = d_mu + A^a_mu ad_a in basis B
  RMat nab = RMat::Zero(d + N, d);
  nab.topRows(d) = RMat::Identity(d, d);
  nab.bottomRows(N) = A;
  const RMat cross = nab.transpose() * g_full.rightCols(N);
  return cross.cwiseAbs().maxCoeff();
}

std::shared_ptr<const OrdinaryConnection> extract_connection(std::shared_ptr<const Lattice> lattice,
                                                             std::shared_ptr<const LieBasis> basis,
                                                             const std::vector<double>& g_full) {
  const int d = lattice->dim();
  const int N = basis->dim();
  const int D = d + N;
  if (g_full.size() != lattice->size() * static_cast<std::size_t>(D * D))
    throw Error(ErrorCode::shape, "full metric needs (d+N)^2 values per point");
  std::vector<double> A(lattice->size() * static_cast<std::size_t>(d * N));
  for (std::size_t p = 0; p < lattice->size(); ++p) {
    MetricBlocks b;
    try {
      b = extract_block(read_block(g_full, p, D), d);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at point " + std::to_string(p));
    }
    for (int mu = 0; mu < d; ++mu)
      for (int a = 0; a < N; ++a) A[(p * d + mu) * N + a] = b.A(a, mu);
  }
  return std::make_shared<const OrdinaryConnection>(std::move(lattice), std::move(basis), std::move(A), "extracted");
}

InverseIdentities inverse_identities(const RMat& gM, const RMat& g_int, const RMat& A) {
  const auto d = gM.rows();
  const auto N = g_int.rows();
  const RMat h = inverse_block(gM, g_int, A);
  const RMat g = assemble_block(gM, g_int, A);
  const RMat hMM = h.topLeftCorner(d, d);
  const RMat haN = h.bottomLeftCorner(N, d);
  const RMat hab = h.bottomRightCorner(N, N);
  InverseIdentities r;
  r.h_int = (g_int.inverse() - (hab - A * hMM * A.transpose())).cwiseAbs().maxCoeff();
  r.A_from_h = (A - haN * gM).cwiseAbs().maxCoeff();
  r.g_base = (gM - hMM.inverse()).cwiseAbs().maxCoeff();
  r.brute_force = (h - g.inverse()).cwiseAbs().maxCoeff();
  r.product = (g * h - RMat::Identity(d + N, d + N)).cwiseAbs().maxCoeff();
  return r;
}

InverseIdentities invert(const RiemannianStructure& riem) {
  InverseIdentities worst{0, 0, 0, 0, 0};
  for (std::size_t p = 0; p < riem.base.lattice->size(); ++p) {
    const auto r = inverse_identities(riem.gM(p), riem.gInt(p), riem.A(p));
    worst.h_int = std::max(worst.h_int, r.h_int);
    worst.A_from_h = std::max(worst.A_from_h, r.A_from_h);
    worst.g_base = std::max(worst.g_base, r.g_base);
    worst.brute_force = std::max(worst.brute_force, r.brute_force);
    worst.product = std::max(worst.product, r.product);
  }
  return worst;
}

namespace {

// n x n matrix field I + amplitude * sum of random low modes, one per entry.
std::vector<double> smooth_spd_field(const Manifold& man, int n, std::uint64_t seed, double amplitude) {
  if (man.kind != "torus") throw Error(ErrorCode::unsupported_dim, "smooth metrics are defined on tori only");
  const Lattice& lat = *man.lattice;
  const int d = lat.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-1, 1);
  struct Mode {
    std::vector<int> kv;
    double amp, phase;
  };
  std::vector<std::vector<Mode>> modes(static_cast<std::size_t>(n * n));
  for (auto& ms : modes)
    for (int m = 0; m < 2; ++m) {
      Mode md;
      for (int i = 0; i < d; ++i) md.kv.push_back(k(rng));
      md.amp = u(rng);
      md.phase = M_PI * u(rng);
      ms.push_back(md);
    }
  std::vector<double> out(lat.size() * static_cast<std::size_t>(n * n));
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const auto x = lat.coords(p);
    RMat B = RMat::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (const Mode& md : modes[static_cast<std::size_t>(i * n + j)]) {
          double arg = md.phase;
          for (int a = 0; a < d; ++a) arg += 2.0 * M_PI * md.kv[a] * x[a] / man.lengths[a];
          B(i, j) += amplitude * md.amp * std::sin(arg);
        }
    const RMat g = B * B.transpose();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[(p * n + i) * n + j] = g(i, j);
  }
  return out;
}

}  // namespace

BaseMetric smooth_base_metric(const Manifold& man, std::uint64_t seed, double amplitude) {
  BaseMetric g;
  g.lattice = man.lattice;
  g.g = smooth_spd_field(man, man.lattice->dim(), seed, amplitude);
  g.finalize();
  return g;
}

std::vector<double> smooth_internal_metric(const Manifold& man, int N, std::uint64_t seed, double amplitude) {
  return smooth_spd_field(man, N, seed, amplitude);
}

}  // namespace ncym
