#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "ncym/experiment.hpp"

namespace ncym {

namespace {

Mat random_antiherm(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat X(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) X(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (X - X.adjoint());
}

RMat random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  RMat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = 0.3 * g(rng);
  return RMat::Identity(n, n) + B * B.transpose();
}

MixedForm random_constant_form(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                               int degree, std::mt19937_64& rng) {
  MixedForm w(ref, rep, degree);
  std::normal_distribution<double> g(0.0, 1.0);
  for (Key S = 0; S < (Key{1} << w.D()); ++S) {
    if (std::popcount(S) != degree) continue;
    Mat m(rep->k(), rep->k());
    for (int i = 0; i < rep->k(); ++i)
      for (int j = 0; j < rep->k(); ++j) m(i, j) = cplx(g(rng), g(rng));
    w.set(S, MatrixField::constant(ref->lattice_ptr(), m));
  }
  return w;
}

// flat T^2, x-independent random reference connection and internal metric
struct Exact {
  Geometry geo;
  std::shared_ptr<const LieBasis> basis = build_su(2);
  std::shared_ptr<const Representation> rep;
  std::shared_ptr<const OrdinaryConnection> ref;
  std::shared_ptr<const RiemannianStructure> riem;
  explicit Exact(std::uint64_t seed, int N = 4) : geo(build_torus(2, N, 1.0)) {
    rep = build_representation(basis, {});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> A(6);
    for (double& v : A) v = 0.7 * g(rng);
    ref = constant_connection(geo.manifold, basis, A);
    riem = assemble_constant(geo.metric, random_spd(rng, 3), ref);
  }
};

class Suite {
 public:
  explicit Suite(std::string filter) : filter_(std::move(filter)) {}
  bool wants(const std::string& module) const { return filter_.empty() || filter_ == module; }
  void below(const std::string& module, const std::string& name, double value, double tol, std::string note = "") {
    rows_.push_back({module, name, value, tol, std::isfinite(value) && value <= tol, std::move(note)});
  }
  std::vector<CheckRow> rows() && { return std::move(rows_); }

 private:
  std::string filter_;
  std::vector<CheckRow> rows_;
};

void lie_checks(Suite& s) {
  const std::string m = "lie_core";
  for (int n : {2, 3}) {
    auto b = build_su(n);
    s.below(m, "su(" + std::to_string(n) + ") bracket", b->bracket_residual(), 1e-12);
    s.below(m, "su(" + std::to_string(n) + ") Jacobi", b->jacobi_residual(), 1e-12);
  }
  auto su2 = build_su(2);
  RepSpec adj{RepKind::adjoint, 1, 0.5, {}};
  RepSpec s1{RepKind::spin, 1, 1.0, {}};
  RepSpec s32{RepKind::spin, 1, 1.5, {}};
  double worst = build_representation(build_su(3), {})->commutator_residual();
  for (const RepSpec& r : {adj, s1, s32}) worst = std::max(worst, build_representation(su2, r)->commutator_residual());
  s.below(m, "representation brackets", worst, 1e-12);

  // ad-invariance of the symmetrized trace
  std::mt19937_64 rng(11);
  double inv = 0.0;
  for (int q : {2, 3}) {
    std::vector<Mat> Y;
    for (int i = 0; i < q; ++i) Y.push_back(su2->combine(std::vector<double>{rng() % 7 * 0.1, rng() % 5 * 0.2, rng() % 3 * 0.3}));
    const Mat X = su2->combine(std::vector<double>{0.3, -0.4, 0.8});
    cplx tot = 0.0;
    for (int i = 0; i < q; ++i) {
      std::vector<Mat> args = Y;
      args[static_cast<std::size_t>(i)] = commutator(X, Y[static_cast<std::size_t>(i)]);
      tot += invariant_polynomial(*su2, args);
    }
    inv = std::max(inv, std::abs(tot));
  }
  s.below(m, "Str ad-invariance", inv, 1e-12);
}

void geometry_checks(Suite& s) {
  const std::string m = "geometry";
  {
    auto g = build_torus(3, 6, 1.3);
    const std::vector<double> ones(g.manifold.lattice->size(), 1.0);
    s.below(m, "torus volume", std::abs(integrate(g.manifold, g.metric, ones) - std::pow(1.3, 3)), 1e-12);
  }
  {
    auto g = build_sphere_two_charts(2, 33, 1.0);
    const std::vector<double> ones(g.manifold.lattice->size(), 1.0);
    s.below(m, "S^2 area (N=33)", std::abs(integrate(g.manifold, g.metric, ones) / (4 * M_PI) - 1.0), 1e-3, "relative");
  }
  {
    double worst = 0.0;
    for (double x = 0.05; x < 4.0; x += 0.05) worst = std::max(worst, std::abs(sphere_bump(x) + sphere_bump(1.0 / x) - 1.0));
    s.below(m, "partition of unity", worst, 1e-14);
  }
  // second-order convergence of the periodic stencil
  std::vector<double> err;
  for (int N : {16, 32}) {
    auto g = build_torus(1, N, 1.0);
    const Lattice& lat = *g.manifold.lattice;
    std::vector<double> f(lat.size()), df(lat.size());
    for (std::size_t p = 0; p < lat.size(); ++p) f[p] = std::sin(2 * M_PI * lat.coords(p)[0]);
    lat.derivative(f.data(), df.data(), 1, 0);
    double e = 0.0;
    for (std::size_t p = 0; p < lat.size(); ++p) e = std::max(e, std::abs(df[p] - 2 * M_PI * std::cos(2 * M_PI * lat.coords(p)[0])));
    err.push_back(e);
  }
  s.below(m, "derivative order 2 (|ratio - 4|)", std::abs(err[0] / err[1] - 4.0), 0.8);
}

void metric_checks(Suite& s) {
  const std::string m = "metric";
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  double rt = 0.0, orth = 0.0, inv = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 3;
    const RMat gM = random_spd(rng, d), gi = random_spd(rng, 3);
    RMat A(3, d);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < d; ++c) A(r, c) = g(rng);
    const RMat full = assemble_block(gM, gi, A);
    const MetricBlocks b = extract_block(full, d);
    rt = std::max({rt, (b.gM - gM).cwiseAbs().maxCoeff(), (b.g_int - gi).cwiseAbs().maxCoeff(), (b.A - A).cwiseAbs().maxCoeff()});
    orth = std::max(orth, orthogonality_residual(full, b.A));
    const InverseIdentities ii = inverse_identities(gM, gi, A);
    inv = std::max({inv, ii.h_int, ii.A_from_h, ii.g_base, ii.brute_force, ii.product});
  }
  s.below(m, "block round trip", rt, 1e-12);
  s.below(m, "orthogonality", orth, 1e-12);
  s.below(m, "inverse identities", inv, 1e-12);
}

void forms_checks(Suite& s) {
  const std::string m = "nc_forms";
  Exact e(31);
  std::mt19937_64 rng(32);
  double star = 0.0, dd = 0.0, pair = 0.0;
  for (int r = 0; r <= 5; ++r) {
    const MixedForm w = random_constant_form(e.ref, e.rep, r, rng);
    MixedForm expect = w;
    if ((r * (5 - r)) % 2) expect *= -1.0;
    star = std::max(star, max_diff(hodge_star(hodge_star(w, *e.riem), *e.riem), expect));
    if (r <= 3) dd = std::max(dd, differential(differential(w)).max_abs());
    const MixedForm v = random_constant_form(e.ref, e.rep, r, rng);
    const MixedForm top = hodge_star_inverse(wedge(w, hodge_star(v, *e.riem)), *e.riem);
    const MatrixField* t = top.find(0);
    pair = std::max(pair, t ? max_diff(metric_pairing(w, v, *e.riem), *t) : 1.0);
  }
  s.below(m, "star star sign", star, 1e-10);
  s.below(m, "d-hat d-hat", dd, 1e-10);
  s.below(m, "pairing vs star", pair, 1e-10);
  const MixedForm a = random_constant_form(e.ref, e.rep, 1, rng);
  const MixedForm b = random_constant_form(e.ref, e.rep, 2, rng);
  s.below(m, "Leibniz", max_diff(differential(wedge(a, b)), wedge(differential(a), b) - wedge(a, differential(b))), 1e-10);
}

void connection_checks(Suite& s) {
  const std::string m = "connections";
  Exact e(41);
  s.below(m, "vertical condition", vertical_condition_residual(alpha_form(e.ref, e.rep)), 1e-12);
  double cross = 0.0, dd = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const NCConnection c = random_constant_ncc(e.ref, e.rep, seed, 0.8);
    cross = std::max(cross, max_diff(nc_curvature(c), nc_curvature_via_forms(c)));
    const RelationDd r = relation_Dd(c);
    dd = std::max(dd, max_diff(r.lhs, r.rhs));
  }
  s.below(m, "curvature cross-check", cross, 1e-10);
  s.below(m, "relation D vs d-hat", dd, 1e-10);

  std::mt19937_64 rng(42);
  const NCConnection c = random_constant_ncc(e.ref, e.rep, 7, 0.5);
  const Mat U = exp_antihermitian(random_antiherm(rng, 2));
  const MixedForm W = nc_curvature(c), Wu = nc_curvature(gauge_transform(c, MatrixField::constant(e.ref->lattice_ptr(), U)));
  double cov = 0.0;
  for (const auto& [key, f] : W.components()) {
    const MatrixField* g = Wu.find(key);
    for (std::size_t p = 0; p < f.points(); ++p) cov = std::max(cov, g ? (U.adjoint() * f.at(p) * U - g->at(p)).norm() : 1.0);
  }
  s.below(m, "curvature covariance", cov, 1e-10);

  // geometric gauge action on alpha reproduces D gamma on an x-dependent reference
  auto geo = build_torus(2, 12, 1.0);
  auto ref = random_connection(geo.manifold, e.basis, 5, 0.4);
  const Lattice& lat = *geo.manifold.lattice;
  std::vector<std::vector<double>> gamma(3, std::vector<double>(lat.size()));
  MatrixField Rg(geo.manifold.lattice, 2);
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const auto x = lat.coords(p);
    double gv[3];
    for (int a = 0; a < 3; ++a) gv[a] = gamma[static_cast<std::size_t>(a)][p] = std::sin(2 * M_PI * (x[0] + a * x[1])) + 0.3 * a;
    Rg.at(p) = e.rep->image(std::span<const double>(gv, 3));
  }
  const MixedForm delta = geometric_gauge_action(alpha_form(ref, e.rep), gamma);
  const MixedForm dg = differential(scalar_form(ref, e.rep, Rg));
  double hor = 0.0, vert = 0.0;
  const MatrixField zero(geo.manifold.lattice, 2);
  for (int mu = 0; mu < 2; ++mu) {
    const MatrixField* x = delta.find(Key{1} << mu);
    const MatrixField* y = dg.find(Key{1} << mu);
    hor = std::max(hor, max_diff(x ? *x : zero, y ? *y : zero));
  }
  for (int a = 0; a < 3; ++a)
    if (const MatrixField* f = delta.find(Key{1} << (2 + a))) vert = std::max(vert, f->max_abs());
  s.below(m, "geometric gauge action", std::max(hor, vert), 1e-12, "horizontal D gamma, vertical 0");
}

void ym_checks(Suite& s) {
  const std::string m = "yang_mills";
  {
    auto geo = build_torus(2, 6, 1.0);
    auto basis = build_su(2);
    auto rep = build_representation(basis, {});
    auto ref = zero_connection(geo.manifold.lattice, basis);
    auto riem = assemble(geo.metric, {}, ref);
    double well = 0.0;
    for (double t : {-0.3, 0.4, 1.7}) well = std::max(well, std::abs(action(scaled_ncc(ref, rep, t), geo.manifold, *riem).S_total - 1.5 * std::pow(t * t - t, 2)));
    s.below(m, "double well S(t)", well, 1e-12);
    const NCConnection vac = scaled_ncc(ref, rep, 1.0);
    s.below(m, "canonical vacuum gradient", gradient(vac, geo.manifold, *riem).norm(), 1e-12);
    const PotentialSlice sl = potential_slice(ref, rep, geo.manifold, *riem, -0.5, 1.5, 41);
    const double loc = sl.minima.size() == 2 ? std::max(std::abs(sl.minima[0]), std::abs(sl.minima[1] - 1.0)) : 1.0;
    s.below(m, "slice minima at 0 and 1", loc, 1e-6);
  }
  Exact e(51, 6);
  double pipe = 0.0;
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    const NCConnection c = random_constant_ncc(e.ref, e.rep, seed, 0.7);
    const double S = action(c, e.geo.manifold, *e.riem).S_total;
    pipe = std::max(pipe, std::abs(S - action_via_cycle(c, e.geo.manifold, *e.riem)) / std::max(1.0, S));
  }
  s.below(m, "action via cycle", pipe, 1e-10, "relative");

  auto geo = build_torus(2, 6, 1.0);
  auto ref = random_connection(geo.manifold, e.basis, 2, 0.5);
  std::mt19937_64 rng(52);
  auto riem = assemble_constant(geo.metric, random_spd(rng, 3), ref);
  const NCConnection c = random_field_ncc(ref, e.rep, 3, 0.6);
  const NCConnection g = gradient(c, geo.manifold, *riem);
  double rel = 0.0;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const NCConnection v = random_field_ncc(ref, e.rep, 100 + k, 1.0);
    const double h = 1e-5;
    NCConnection xp = c, xm = c;
    xp.axpy(h, v);
    xm.axpy(-h, v);
    const double fd = (action(xp, geo.manifold, *riem).S_total - action(xm, geo.manifold, *riem).S_total) / (2 * h);
    rel = std::max(rel, std::abs(fd - g.dot(v)) / std::max(1.0, std::abs(fd)));
  }
  s.below(m, "gradient vs finite differences", rel, 1e-6, "relative");

  const NCConnection cc = random_constant_ncc(e.ref, e.rep, 9, 0.6);
  const double S0 = action(cc, e.geo.manifold, *e.riem).S_total;
  double gi = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Mat U = exp_antihermitian(random_antiherm(rng, 2));
    gi = std::max(gi, std::abs(action(gauge_transform(cc, MatrixField::constant(e.ref->lattice_ptr(), U)), e.geo.manifold, *e.riem).S_total - S0));
  }
  s.below(m, "gauge invariance of S", gi, 1e-10);
}

void lc_checks(Suite& s) {
  const std::string m = "levi_civita";
  Exact e(61, 6);
  const LCReport r = lc_check(*e.riem);
  s.below(m, "torsion (constant regime)", r.torsion, 1e-12);
  s.below(m, "metricity (constant regime)", r.metricity, 1e-12);
  s.below(m, "Koszul formula", r.koszul, 1e-12);
  s.below(m, "Gamma^d_mu_nu", r.gamma_d_mu_nu, 0.0);
  auto riem = assemble_constant(e.geo.metric, 2.5 * RMat::Identity(3, 3), e.ref);
  s.below(m, "bi-invariant vertical sector", vertical_sector_residual(christoffel(*riem)), 1e-14);
}

void chern_checks(Suite& s) {
  const std::string m = "chern_weil";
  auto basis = build_su(2);
  {
    auto geo = build_torus(2, 8, 1.0);
    const ChernForm cf = chern_form(*random_connection(geo.manifold, basis, 3, 0.8), 1);
    double worst = 0.0;
    for (const auto& [k, v] : cf.comps)
      for (double x : v) worst = std::max(worst, std::abs(x));
    s.below(m, "first Chern form of su(2)", worst, 1e-12);
  }
  {
    auto geo = build_torus(4, 6, 1.0);
    auto conn = random_connection(geo.manifold, basis, 4, 0.6);
    std::mt19937_64 rng(71);
    const Mat U = exp_antihermitian(random_antiherm(rng, 2));
    std::vector<double> A2(conn->A_data().size());
    for (std::size_t p = 0; p < geo.manifold.lattice->size(); ++p)
      for (int mu = 0; mu < 4; ++mu) {
        const CVec c = basis->coordinates(U.adjoint() * conn->A_matrix(p, mu) * U);
        for (int a = 0; a < 3; ++a) A2[(p * 4 + static_cast<std::size_t>(mu)) * 3 + static_cast<std::size_t>(a)] = c(a).real();
      }
    const ChernForm f1 = chern_form(*conn, 2), f2 = chern_form(OrdinaryConnection(geo.manifold.lattice, basis, A2), 2);
    double worst = 0.0;
    for (const auto& [k, v] : f1.comps)
      for (std::size_t p = 0; p < v.size(); ++p) worst = std::max(worst, std::abs(v[p] - f2.comps.at(k)[p]));
    s.below(m, "gauge invariance", worst, 1e-10);
  }
  {
    auto geo = build_sphere_two_charts(4, 12, 1.0, "instanton", 4);
    const ChernNumber c = chern_number(*bpst_connection(geo.manifold, basis, 1.0), 2, geo.manifold);
    s.below(m, "BPST charge (N=12, fd4)", std::abs(c.value - 1.0), 0.05);
  }
}

}  // namespace

std::vector<CheckRow> run_selfcheck(const std::string& filter) {
  static const char* modules[] = {"lie_core", "geometry", "metric", "nc_forms", "connections", "yang_mills", "levi_civita", "chern_weil"};
  if (!filter.empty() && std::find(std::begin(modules), std::end(modules), filter) == std::end(modules))
    throw Error(ErrorCode::validation, "unknown selfcheck module '" + filter + "'");
  Suite s(filter);
  if (s.wants("lie_core")) lie_checks(s);
  if (s.wants("geometry")) geometry_checks(s);
  if (s.wants("metric")) metric_checks(s);
  if (s.wants("nc_forms")) forms_checks(s);
  if (s.wants("connections")) connection_checks(s);
  if (s.wants("yang_mills")) ym_checks(s);
  if (s.wants("levi_civita")) lc_checks(s);
  if (s.wants("chern_weil")) chern_checks(s);
  return std::move(s).rows();
}

}  // namespace ncym
