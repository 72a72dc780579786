#pragma once

// Levi-Civita connection on the derivations in the adapted basis
// X = (nabla_mu, ad_{E_a}). Coefficients are stored as D_{X_A} X_B = G_AB^C X_C,
// split into the Christoffel part and the fixed pieces
//   D_{nabla_mu} nabla_nu  ~ 1/2 ad_{F_mu nu},
//   D_{nabla_mu} ad_{E_b}  ~ ad_{nabla_mu E_b},
//   D_{ad_a} ad_{E_b}      ~ 1/2 ad_{[E_a, E_b]}.

#include <vector>

#include "json.hpp"
#include "ncym/metric.hpp"

namespace ncym {

struct ChristoffelTable {
  int d = 0;
  int N = 0;
  std::size_t points = 0;
  std::vector<double> christoffel;  // D^3 per point, [(p*D + A)*D + B]*D + C
  std::vector<double> extra;        // same layout, non-Christoffel pieces

  int D() const { return d + N; }
  std::size_t index(std::size_t p, int A, int B, int C) const {
    const auto D_ = static_cast<std::size_t>(D());
    return ((p * D_ + static_cast<std::size_t>(A)) * D_ + static_cast<std::size_t>(B)) * D_ + static_cast<std::size_t>(C);
  }
  double gamma(std::size_t p, int A, int B, int C) const { return christoffel[index(p, A, B, C)]; }
  double total(std::size_t p, int A, int B, int C) const { return christoffel[index(p, A, B, C)] + extra[index(p, A, B, C)]; }
};

/// Closed-form coefficients; base derivatives of g^M and g_ab by finite differences.
/// Throws internal if any Gamma^d_{mu nu} is nonzero.
ChristoffelTable christoffel(const RiemannianStructure& riem);

/// max |D_A X_B - D_B X_A - [X_A, X_B]| over frame pairs and points.
double torsion_residual(const ChristoffelTable& t, const RiemannianStructure& riem);
/// max |X g(Y, Z) - g(D_X Y, Z) - g(Y, D_X Z)| over coordinate-basis triples
/// (d_mu, ad_a), with X g(Y, Z) by finite differences of the assembled metric.
double metricity_residual(const ChristoffelTable& t, const RiemannianStructure& riem);
/// max |g(D_A X_B, X_C) - Koszul_ABC| over frame triples, the Koszul side
/// evaluated from the metric and frame commutators directly.
double koszul_residual(const ChristoffelTable& t, const RiemannianStructure& riem);
/// max |D_{ad_a} ad_b - 1/2 ad_{[E_a,E_b]}|, the vertical-sector check.
double vertical_sector_residual(const ChristoffelTable& t);
/// max |Gamma^d_{mu nu}|.
double horizontal_vertical_max(const ChristoffelTable& t);

struct LCReport {
  double torsion = 0.0;
  double metricity = 0.0;
  double koszul = 0.0;
  double vertical_sector = 0.0;
  double gamma_d_mu_nu = 0.0;
};
LCReport lc_check(const RiemannianStructure& riem);
nlohmann::json to_json(const LCReport& r);

}  // namespace ncym
