#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncym {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Error categories surfaced through the C API as status codes.
enum class ErrorCode : int {
  ok = 0,
  invalid_rank = 1,
  unsupported_rep = 2,
  shape = 3,
  axis_out_of_range = 4,
  missing_chart = 5,
  unsupported_dim = 6,
  singular_metric = 7,
  singular_fiber_metric = 8,
  not_spd = 9,
  non_unitary = 10,
  reference_mismatch = 11,
  classification_refused = 12,
  degree = 13,
  validation = 14,
  io = 15,
  missing_artifact = 16,
  internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode c) noexcept;

/// Warning sink; defaults to stderr. Replaceable for tests and the C API.
void warn(const std::string& msg);
void set_warning_handler(std::function<void(const std::string&)> handler);

/// Worker-count hint. Never changes numerical results: all reductions go
/// through pairwise_sum over per-point arrays.
void set_threads(int n);
int threads();

/// Runs fn(i) for i in [0, n). Iterations must write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Deterministic pairwise (cascade) summation, independent of thread count.
double pairwise_sum(const double* x, std::size_t n);
cplx pairwise_sum(const cplx* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }
inline cplx pairwise_sum(const std::vector<cplx>& v) { return pairwise_sum(v.data(), v.size()); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

}  // namespace ncym
