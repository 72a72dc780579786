#pragma once

// Yang-Mills action of a noncommutative connection, its analytic gradient,
// vacuum diagnostics and a deterministic gradient-descent solver.
//
// S = int_M sqrt(g^M) det(g_ab) sum_{S,T} det(h[S,T]) tr(Omega_S^dagger Omega_T)
// splits by the adapted block structure into a horizontal (mu nu), a mixed
// (mu b) and a vertical (a b) term.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncym/metric.hpp"
#include "ncym/nc_connection.hpp"

namespace ncym {

struct ActionBreakdown {
  double S_total = 0.0;
  double S_horizontal = 0.0;
  double S_mixed = 0.0;
  double S_vertical = 0.0;
  std::vector<double> chart_totals;  // per chart, partition-of-unity weighted
  std::vector<double> density;       // per point, sum of the three integrands
};

ActionBreakdown action(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem);
/// Same quantity through the scalar product of the curvature form with itself.
double action_via_cycle(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem);
/// dS/d(a, phi) with respect to the real inner product Re tr(x^dagger y) summed over points.
NCConnection gradient(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem);

/// Integrated norms of the three vacuum equations: phi is a representation,
/// phi is covariantly constant, R(F) + nabla a + a^2 = phi(F).
struct VacuumResiduals {
  double representation = 0.0;
  double covariant_constancy = 0.0;
  double curvature = 0.0;
};
VacuumResiduals vacuum_residuals(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem);

struct ClassifyOptions {
  double residual_tol = 1e-6;
  double spectrum_tol = 1e-4;
};

struct VacuumClass {
  std::string label;
  std::vector<double> casimir_spectrum;  // mean over points, ascending
  double casimir_deviation = 0.0;        // max spatial deviation from the mean spectrum
  int commutant_dim = 0;
  double representation_residual = 0.0;  // max over points and pairs
};
/// Gauge-invariant fingerprint of phi; refuses when phi is not a representation to tolerance.
VacuumClass classify_vacuum(const NCConnection& c, const RiemannianStructure& riem, const ClassifyOptions& opts = {});
bool same_class(const VacuumClass& x, const VacuumClass& y, double spectrum_tol = 1e-4);

struct SolverOptions {
  int max_iter = 5000;
  double grad_tol = 1e-8;
  double initial_step = 0.1;
  double max_step = 10.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  double grow = 2.0;
  double momentum = 0.9;
  int max_backtracks = 60;
  bool project_antihermitian = true;
};

struct TraceRow {
  int iteration = 0;
  double action = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct VacuumReport {
  VacuumResiduals residuals;
  ActionBreakdown action;
  double grad_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  bool classified = false;
  VacuumClass classification;
  std::string classification_error;
};

struct SolveResult {
  NCConnection state;
  VacuumReport report;
  std::vector<TraceRow> trace;
};

SolveResult solve_vacuum(NCConnection init, const Manifold& man, const RiemannianStructure& riem,
                         const SolverOptions& opts = {}, const ClassifyOptions& copts = {});

VacuumReport make_report(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem,
                         const ClassifyOptions& copts = {});

/// Finite-difference second directional derivatives of S along random unit directions.
struct SecondOrderProbe {
  double min_curvature = 0.0;
  double max_curvature = 0.0;
  int directions = 0;
};
SecondOrderProbe second_order_probe(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem,
                                    int directions, std::uint64_t seed, double eps = 1e-4);

/// S(t) along phi_a = t R_a, a = 0.
struct PotentialSlice {
  std::vector<double> t;
  std::vector<double> S;
  std::vector<double> minima;  // located by golden-section search
};
PotentialSlice potential_slice(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                               const Manifold& man, const RiemannianStructure& riem, double t_min, double t_max,
                               int samples, double tol = 1e-10);

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);

nlohmann::json to_json(const ActionBreakdown& a, bool with_density = false);
nlohmann::json to_json(const VacuumResiduals& r);
nlohmann::json to_json(const VacuumClass& v);
nlohmann::json to_json(const VacuumReport& r);

}  // namespace ncym
