#pragma once

// Chern-Weil forms of ordinary connections,
//   f = (1/q!) (i/2pi)^q (1/2^q) sum_sigma sign(sigma) Str(F_{s1 s2}, ..., F_{s(2q-1) s(2q)})
// on every sorted 2q-index set, so that the top form integrates to the
// instanton number.

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "json.hpp"
#include "ncym/connection.hpp"
#include "ncym/geometry.hpp"

namespace ncym {

struct ChernForm {
  int q = 0;
  int d = 0;
  std::shared_ptr<const Lattice> lattice;
  std::map<std::uint64_t, std::vector<double>> comps;  // bit mask over base indices -> per point
};

ChernForm chern_form(const OrdinaryConnection& conn, int q);
/// Max norm of the finite-difference exterior derivative; 0 for top-degree forms.
double closedness_residual(const ChernForm& cf);
/// Integral of a top-degree form with the partition of unity.
double chern_integral(const ChernForm& cf, const Manifold& man);
/// Relative mismatch of the top density across chart overlaps (pullback with the Jacobian).
double gluing_residual(const ChernForm& cf, const Manifold& man);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> density;
  std::vector<int> count;
};
/// Bin-averaged top density of one chart against |x|.
RadialProfile radial_profile(const ChernForm& cf, const Manifold& man, int chart, int bins, double r_max);

struct ChernNumber {
  int q = 0;
  double value = 0.0;
  int grid = 0;
  int fd_order = 2;
  double estimated_error = -1.0;  // negative when no refinement partner was computed
  int coarse_grid = 0;
  double coarse_value = 0.0;
  double gluing = 0.0;
};

/// Value on one manifold; requires 2q = d.
ChernNumber chern_number(const OrdinaryConnection& conn, int q, const Manifold& man);

/// Builds the problem at N and at about 3N/4 and reports the Richardson-type error
/// |v_N - v_coarse| / ((h_coarse / h_N)^p - 1) with p the stencil order.
using ChernProblem = std::function<std::pair<Manifold, std::shared_ptr<const OrdinaryConnection>>(int N)>;
ChernNumber chern_number_refined(const ChernProblem& build, int N, int q);

nlohmann::json to_json(const ChernNumber& c);

}  // namespace ncym
