#pragma once

// Structure Lie algebra su(n) and its finite-dimensional representations.
//
// Basis convention: the E_a are anti-hermitian and traceless, with real
// structure constants [E_a, E_b] = C_ab^c E_c. A hermitian basis T_a is
// related by T_a = i E_a, so formulas written with a "hermitian basis" and
// real brackets read the same here with no stray factors of i.
// For n = 2, E_a = -(i/2) sigma_a and C_ab^c = epsilon_abc.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncym/common.hpp"

namespace ncym {

class LieBasis {
 public:
  LieBasis(int n, std::vector<Mat> basis, RMat internal_metric);

  int n() const { return n_; }
  /// n^2 - 1
  int dim() const { return static_cast<int>(basis_.size()); }
  const Mat& E(int a) const { return basis_[static_cast<std::size_t>(a)]; }
  const std::vector<Mat>& basis() const { return basis_; }

  /// C_ab^c
  double C(int a, int b, int c) const { return C_[static_cast<std::size_t>((a * dim() + b) * dim() + c)]; }
  const RMat& internal_metric() const { return g_int_; }

  /// Coefficients x^c with X = x^c E_c for X in the complex span of the basis.
  CVec coordinates(const Mat& X) const;
  /// Sum_c x^c E_c.
  Mat combine(std::span<const double> x) const;

  /// max_{a,b,c,d} |Jacobi(a,b,c)^d|
  double jacobi_residual() const;
  /// max_{a,b} || [E_a,E_b] - C_ab^c E_c ||_F
  double bracket_residual() const;

 private:
  int n_;
  std::vector<Mat> basis_;
  std::vector<double> C_;
  RMat g_int_;
  Eigen::LDLT<Eigen::MatrixXcd> gram_;  // tr(E_a^dagger E_b)
};

/// Generalized Gell-Mann basis scaled to E_a = -(i/2) lambda_a, so that
/// tr(E_a E_b) = -(1/2) delta_ab. Internal metric defaults to delta.
std::shared_ptr<const LieBasis> build_su(int n);

/// Same algebra with a different constant internal metric g_ab.
std::shared_ptr<const LieBasis> with_internal_metric(const LieBasis& basis, const RMat& g_int);

/// K_ab = sum_{c,d} C_ac^d C_bd^c, without normalization.
RMat killing_metric(const LieBasis& basis);

enum class RepKind { trivial, fundamental, adjoint, spin, direct_sum };

struct RepSpec {
  RepKind kind = RepKind::fundamental;
  int trivial_dim = 1;        // trivial(k)
  double spin = 0.5;          // spin-j, n = 2 only
  std::vector<RepSpec> parts; // direct-sum
};

class Representation {
 public:
  Representation(std::shared_ptr<const LieBasis> basis, std::vector<Mat> R, std::string kind);

  int k() const { return k_; }
  const Mat& R(int a) const { return R_[static_cast<std::size_t>(a)]; }
  const std::vector<Mat>& matrices() const { return R_; }
  const std::string& kind() const { return kind_; }
  const LieBasis& basis() const { return *basis_; }
  const std::shared_ptr<const LieBasis>& basis_ptr() const { return basis_; }

  /// Sum_a x^a R_a for real coefficients.
  Mat image(std::span<const double> x) const;
  /// Image of an algebra element given as an n x n matrix in the span of E_a.
  Mat image_of(const Mat& X) const;

  /// max_{a,b} || [R_a,R_b] - C_ab^c R_c ||_F
  double commutator_residual() const;

 private:
  std::shared_ptr<const LieBasis> basis_;
  std::vector<Mat> R_;
  int k_;
  std::string kind_;
};

std::shared_ptr<const Representation> build_representation(std::shared_ptr<const LieBasis> basis,
                                                           const RepSpec& spec);

/// Symmetrized trace (1/q!) sum_sigma tr(X_sigma(1) ... X_sigma(q)).
cplx invariant_polynomial(const LieBasis& basis, std::span<const Mat> args);

/// Anti-hermitian generators of the spin-j irrep of su(2): R_a = -i J_a.
std::vector<Mat> spin_matrices(double j);

/// exp of an anti-hermitian matrix via the hermitian eigendecomposition of iX.
Mat exp_antihermitian(const Mat& X);
/// Principal log of a unitary matrix (anti-hermitian result).
Mat log_unitary(const Mat& U);
/// Traceless log of a special unitary matrix; branch chosen so exp(R(X)) = rho(U) in every representation.
Mat log_special_unitary(const Mat& U);

}  // namespace ncym
