#include "ncym/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncym {

LieBasis::LieBasis(int n, std::vector<Mat> basis, RMat internal_metric)
    : n_(n), basis_(std::move(basis)), g_int_(std::move(internal_metric)) {
  const int N = dim();
  Mat gram(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) gram(a, b) = (basis_[a].adjoint() * basis_[b]).trace();
  gram_.compute(gram);

  C_.assign(static_cast<std::size_t>(N * N * N), 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const CVec x = coordinates(commutator(basis_[a], basis_[b]));
      for (int c = 0; c < N; ++c) C_[static_cast<std::size_t>((a * N + b) * N + c)] = x(c).real();
    }
}

CVec LieBasis::coordinates(const Mat& X) const {
  const int N = dim();
  CVec rhs(N);
  for (int a = 0; a < N; ++a) rhs(a) = (basis_[a].adjoint() * X).trace();
  return gram_.solve(rhs);
}

Mat LieBasis::combine(std::span<const double> x) const {
  Mat out = Mat::Zero(n_, n_);
  for (int a = 0; a < dim(); ++a) out += x[static_cast<std::size_t>(a)] * basis_[a];
  return out;
}

double LieBasis::jacobi_residual() const {
  const int N = dim();
  double worst = 0.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double s = 0.0;
          for (int e = 0; e < N; ++e)
            s += C(a, b, e) * C(e, c, d) + C(b, c, e) * C(e, a, d) + C(c, a, e) * C(e, b, d);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double LieBasis::bracket_residual() const {
  const int N = dim();
  double worst = 0.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      Mat r = commutator(basis_[a], basis_[b]);
      for (int c = 0; c < N; ++c) r -= C(a, b, c) * basis_[c];
      worst = std::max(worst, r.norm());
    }
  return worst;
}

std::shared_ptr<const LieBasis> build_su(int n) {
  if (n < 2) throw Error(ErrorCode::invalid_rank, "su(n) requires n >= 2, got " + std::to_string(n));
  std::vector<Mat> lambdas;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Mat sym = Mat::Zero(n, n);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      Mat asym = Mat::Zero(n, n);
      asym(j, k) = -I_unit;
      asym(k, j) = I_unit;
      lambdas.push_back(sym);
      lambdas.push_back(asym);
    }
  for (int l = 1; l < n; ++l) {
    Mat diag = Mat::Zero(n, n);
    const double s = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int m = 0; m < l; ++m) diag(m, m) = s;
    diag(l, l) = -l * s;
    lambdas.push_back(diag);
  }
  std::vector<Mat> basis;
  basis.reserve(lambdas.size());
  for (auto& lam : lambdas) basis.push_back(cplx(0.0, -0.5) * lam);
  const int N = n * n - 1;
  return std::make_shared<const LieBasis>(n, std::move(basis), RMat::Identity(N, N));
}

std::shared_ptr<const LieBasis> with_internal_metric(const LieBasis& basis, const RMat& g_int) {
  if (g_int.rows() != basis.dim() || g_int.cols() != basis.dim())
    throw Error(ErrorCode::shape, "internal metric must be (n^2-1) x (n^2-1)");
  return std::make_shared<const LieBasis>(basis.n(), basis.basis(), g_int);
}

RMat killing_metric(const LieBasis& basis) {
  const int N = basis.dim();
  RMat K = RMat::Zero(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      double s = 0.0;
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) s += basis.C(a, c, d) * basis.C(b, d, c);
      K(a, b) = s;
    }
  return K;
}

Representation::Representation(std::shared_ptr<const LieBasis> basis, std::vector<Mat> R, std::string kind)
    : basis_(std::move(basis)), R_(std::move(R)), k_(R_.empty() ? 0 : static_cast<int>(R_[0].rows())),
      kind_(std::move(kind)) {
  if (static_cast<int>(R_.size()) != basis_->dim())
    throw Error(ErrorCode::shape, "representation needs one matrix per basis element");
  for (const auto& r : R_)
    if (r.rows() != k_ || r.cols() != k_) throw Error(ErrorCode::shape, "representation matrices must be k x k");
}

Mat Representation::image(std::span<const double> x) const {
  Mat out = Mat::Zero(k_, k_);
  for (int a = 0; a < basis_->dim(); ++a) {
    const double xa = x[static_cast<std::size_t>(a)];
    if (xa != 0.0) out += xa * R_[a];
  }
  return out;
}

Mat Representation::image_of(const Mat& X) const {
  const CVec x = basis_->coordinates(X);
  Mat out = Mat::Zero(k_, k_);
  for (int a = 0; a < basis_->dim(); ++a) out += x(a) * R_[a];
  return out;
}

double Representation::commutator_residual() const {
  const int N = basis_->dim();
  double worst = 0.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      Mat r = commutator(R_[a], R_[b]);
      for (int c = 0; c < N; ++c) r -= basis_->C(a, b, c) * R_[c];
      worst = std::max(worst, r.norm());
    }
  return worst;
}

std::vector<Mat> spin_matrices(double j) {
  const double twoj = 2.0 * j;
  if (j < 0.0 || std::abs(twoj - std::round(twoj)) > 1e-12)
    throw Error(ErrorCode::unsupported_rep, "spin must be a non-negative half-integer");
  const int d = static_cast<int>(std::lround(twoj)) + 1;
  Mat Jp = Mat::Zero(d, d);  // raising operator in the basis m = j, j-1, ..., -j
  for (int i = 1; i < d; ++i) {
    const double m = j - i;  // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
    Jp(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Mat Jm = Jp.adjoint();
  Mat Jx = 0.5 * (Jp + Jm);
  Mat Jy = cplx(0.0, -0.5) * (Jp - Jm);
  Mat Jz = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) Jz(i, i) = j - i;
  return {-I_unit * Jx, -I_unit * Jy, -I_unit * Jz};
}

namespace {

std::vector<Mat> build_matrices(const LieBasis& basis, const RepSpec& spec, std::string& label) {
  const int N = basis.dim();
  switch (spec.kind) {
    case RepKind::trivial: {
      if (spec.trivial_dim < 1) throw Error(ErrorCode::shape, "trivial representation needs k >= 1");
      label = "trivial(" + std::to_string(spec.trivial_dim) + ")";
      return std::vector<Mat>(static_cast<std::size_t>(N), Mat::Zero(spec.trivial_dim, spec.trivial_dim));
    }
    case RepKind::fundamental:
      label = "fundamental";
      return basis.basis();
    case RepKind::adjoint: {
      label = "adjoint";
      std::vector<Mat> R;
      for (int a = 0; a < N; ++a) {
        Mat m = Mat::Zero(N, N);
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c) m(c, b) = basis.C(a, b, c);
        R.push_back(m);
      }
      return R;
    }
    case RepKind::spin: {
      if (basis.n() != 2) throw Error(ErrorCode::unsupported_rep, "spin-j representations exist only for n = 2");
      std::ostringstream os;
      os << "spin-" << spec.spin;
      label = os.str();
      return spin_matrices(spec.spin);
    }
    case RepKind::direct_sum: {
      if (spec.parts.empty()) throw Error(ErrorCode::shape, "direct sum needs at least one part");
      std::vector<std::vector<Mat>> blocks;
      label = "direct-sum(";
      int k = 0;
      for (std::size_t i = 0; i < spec.parts.size(); ++i) {
        std::string sub;
        blocks.push_back(build_matrices(basis, spec.parts[i], sub));
        k += static_cast<int>(blocks.back()[0].rows());
        label += (i ? "+" : "") + sub;
      }
      label += ")";
      std::vector<Mat> R(static_cast<std::size_t>(N), Mat::Zero(k, k));
      int off = 0;
      for (const auto& blk : blocks) {
        const auto kb = blk[0].rows();
        for (int a = 0; a < N; ++a) R[a].block(off, off, kb, kb) = blk[a];
        off += static_cast<int>(kb);
      }
      return R;
    }
  }
  throw Error(ErrorCode::unsupported_rep, "unknown representation kind");
}

}  // namespace

std::shared_ptr<const Representation> build_representation(std::shared_ptr<const LieBasis> basis,
                                                           const RepSpec& spec) {
  std::string label;
  auto R = build_matrices(*basis, spec, label);
  return std::make_shared<const Representation>(std::move(basis), std::move(R), label);
}

cplx invariant_polynomial(const LieBasis& basis, std::span<const Mat> args) {
  const int n = basis.n();
  for (const auto& m : args)
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCode::shape, "invariant polynomial arguments must be n x n");
  const std::size_t q = args.size();
  if (q == 0) return cplx(static_cast<double>(n), 0.0);
  std::vector<std::size_t> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  cplx sum = 0.0;
  std::size_t count = 0;
  do {
    Mat prod = args[perm[0]];
    for (std::size_t i = 1; i < q; ++i) prod = prod * args[perm[i]];
    sum += prod.trace();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

Mat exp_antihermitian(const Mat& X) {
  // X = -i H with H hermitian; exp(X) = V exp(-i lambda) V^dagger.
  const Mat H = I_unit * X;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.adjoint()));
  const auto& lam = es.eigenvalues();
  CVec ph(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) ph(i) = std::exp(-I_unit * lam(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Mat log_unitary(const Mat& U) {
  Eigen::ComplexEigenSolver<Mat> es(U);
  // Unitary matrices are normal, so Q^dagger U Q is diagonal for the
  // orthonormalized eigenvector basis Q.
  Eigen::HouseholderQR<Mat> qr(es.eigenvectors());
  const Mat Q = qr.householderQ();
  const Mat D = Q.adjoint() * U * Q;
  CVec l2(U.rows());
  for (Eigen::Index i = 0; i < U.rows(); ++i) l2(i) = I_unit * std::arg(D(i, i));
  return Q * l2.asDiagonal() * Q.adjoint();
}

Mat log_special_unitary(const Mat& U) {
  Eigen::ComplexEigenSolver<Mat> es(U);
  Eigen::HouseholderQR<Mat> qr(es.eigenvectors());
  const Mat Q = qr.householderQ();
  const Mat D = Q.adjoint() * U * Q;
  const auto n = U.rows();
  std::vector<double> th(static_cast<std::size_t>(n));
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += th[static_cast<std::size_t>(i)] = std::arg(D(i, i));
  // det U = 1 forces the phases to sum to 2 pi m; move m of the largest down one branch.
  const long m = std::lround(total / (2.0 * M_PI));
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return th[a] > th[b]; });
  for (long i = 0; i < std::abs(m) && i < n; ++i) th[order[static_cast<std::size_t>(m > 0 ? i : n - 1 - i)]] -= (m > 0 ? 2.0 : -2.0) * M_PI;
  CVec l2(n);
  for (Eigen::Index i = 0; i < n; ++i) l2(i) = I_unit * th[static_cast<std::size_t>(i)];
  return Q * l2.asDiagonal() * Q.adjoint();
}

}  // namespace ncym
