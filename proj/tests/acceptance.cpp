// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "ncym/experiment.hpp"
#include "support.hpp"

using namespace ncym;
using namespace ncym::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json load_config(const std::string& name) {
  std::ifstream in(std::string(NCYM_SOURCE_DIR) + "/configs/" + name);
  if (!in) throw Error(ErrorCode::io, "missing config " + name);
  return json::parse(in);
}

// 1. algebraic identities on x-independent data
Outcome criterion1() {
  double worst = 0.0;
  for (std::uint64_t seed : {101, 102, 103}) {
    ExactSetup s(2, 4, seed);
    std::mt19937_64 rng(seed);
    worst = std::max(worst, vertical_condition_residual(alpha_form(s.ref, s.rep)));
    const int D = 5;
    for (int r = 0; r <= D; ++r) {
      const MixedForm w = random_constant_form(s.ref, s.rep, r, rng);
      MixedForm sign = w;
      if ((r * (D - r)) % 2) sign *= -1.0;
      worst = std::max(worst, max_diff(hodge_star(hodge_star(w, *s.riem), *s.riem), sign));
      if (r + 2 <= D) worst = std::max(worst, differential(differential(w)).max_abs());
      const MixedForm v = random_constant_form(s.ref, s.rep, r, rng);
      const MixedForm top = hodge_star_inverse(wedge(w, hodge_star(v, *s.riem)), *s.riem);
      const MatrixField* t = top.find(0);
      worst = std::max(worst, t ? max_diff(metric_pairing(w, v, *s.riem), *t) : 1.0);
    }
    for (std::uint64_t k = 0; k < 3; ++k) {
      const NCConnection c = random_constant_ncc(s.ref, s.rep, seed * 10 + k, 0.8);
      const RelationDd rel = relation_Dd(c);
      worst = std::max({worst, max_diff(rel.lhs, rel.rhs), max_diff(nc_curvature(c), nc_curvature_via_forms(c))});
    }
  }
  return {worst < 1e-10, "max residual " + sci(worst) + " (tol 1e-10)"};
}

// 2. metric block structure on random instances
Outcome criterion2() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 1.0);
  double rt = 0.0, orth = 0.0, inv = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 4;
    const int N = i % 2 ? 3 : 8;
    const RMat gM = random_spd(rng, d), gi = random_spd(rng, N);
    RMat A(N, d);
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < d; ++c) A(r, c) = g(rng);
    const RMat full = assemble_block(gM, gi, A);
    const MetricBlocks b = extract_block(full, d);
    rt = std::max({rt, (b.gM - gM).cwiseAbs().maxCoeff(), (b.g_int - gi).cwiseAbs().maxCoeff(), (b.A - A).cwiseAbs().maxCoeff()});
    orth = std::max(orth, orthogonality_residual(full, b.A));
    const InverseIdentities ii = inverse_identities(gM, gi, A);
    inv = std::max({inv, ii.h_int, ii.A_from_h, ii.g_base, ii.brute_force, ii.product});
  }
  return {rt < 1e-12 && orth < 1e-12 && inv < 1e-12,
          "round trip " + sci(rt) + ", orthogonality " + sci(orth) + ", inverse identities " + sci(inv) + " (tol 1e-12, 200 instances)"};
}

// 3. analytic gradient against central differences
Outcome criterion3() {
  auto geo = build_torus(2, 16, 1.0);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  double worst = 0.0;
  const double h = 1e-4;
  for (std::uint64_t cfg = 0; cfg < 5; ++cfg) {
    auto ref = random_connection(geo.manifold, basis, 300 + cfg, 0.5);
    std::mt19937_64 rng(310 + cfg);
    auto riem = assemble_constant(geo.metric, random_spd(rng, 3), ref);
    const NCConnection c = random_field_ncc(ref, rep, 320 + cfg, 0.6);
    const NCConnection grad = gradient(c, geo.manifold, *riem);
    for (std::uint64_t k = 0; k < 20; ++k) {
      NCConnection v = random_field_ncc(ref, rep, 1000 * cfg + k, 1.0);
      v *= 1.0 / v.norm();
      NCConnection xp = c, xm = c;
      xp.axpy(h, v);
      xm.axpy(-h, v);
      const double fd = (action(xp, geo.manifold, *riem).S_total - action(xm, geo.manifold, *riem).S_total) / (2 * h);
      const double an = grad.dot(v);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
  }
  return {worst < 1e-5, "max relative error " + sci(worst) + " over 5 configurations x 20 directions (tol 1e-5)"};
}

// 4. vacua of the trivial bundle and the double well
Outcome criterion4(std::string& report_out) {
  const RunOutcome solve = run_experiment(load_config("torus_vacuum.json"));
  report_out = solve.report.dump();
  if (solve.exit_code != exit_ok) return {false, "solve exit code " + std::to_string(solve.exit_code)};
  bool ok = true;
  double worstS = 0.0, worstR = 0.0;
  int trivial = 0, fundamental = 0;
  for (const json& run : solve.report.at("result").at("runs")) {
    worstS = std::max(worstS, run.at("action").at("S_total").get<double>());
    const json& r = run.at("residuals");
    worstR = std::max({worstR, r.at("representation").get<double>(), r.at("covariant_constancy").get<double>(), r.at("curvature").get<double>()});
    ok = ok && run.at("converged").get<bool>() && run.at("classified").get<bool>();
    const std::string label = run.contains("classification") ? run.at("classification").at("label").get<std::string>() : "";
    trivial += label == "trivial";
    fundamental += label == "fundamental";
  }
  const int runs = static_cast<int>(solve.report.at("result").at("runs").size());
  ok = ok && worstS < 1e-8 && worstR < 1e-6 && trivial + fundamental == runs;

  const RunOutcome slice = run_experiment(load_config("torus_slice.json"));
  const json& sl = slice.report.at("result");
  const auto minima = sl.at("minima").get<std::vector<double>>();
  double shape = 0.0;
  const auto t = sl.at("t").get<std::vector<double>>(), S = sl.at("S").get<std::vector<double>>();
  for (std::size_t i = 0; i < t.size(); ++i) shape = std::max(shape, std::abs(S[i] - 1.5 * std::pow(t[i] * t[i] - t[i], 2)));
  const bool well = minima.size() == 2 && std::abs(minima[0]) < 1e-6 && std::abs(minima[1] - 1.0) < 1e-6 && shape < 1e-12;
  return {ok && well, std::to_string(runs) + " restarts: " + std::to_string(trivial) + " trivial, " + std::to_string(fundamental) +
                          " fundamental; max S " + sci(worstS) + " (tol 1e-8), max residual " + sci(worstR) +
                          " (tol 1e-6); slice minima " + (minima.size() == 2 ? sci(minima[0]) + ", " + fixed(minima[1], 9) : "missing") +
                          " (tol 1e-6), shape deviation " + sci(shape)};
}

// 5. canonical vacuum on the instanton bundle, and phi = 0 is not a vacuum
Outcome criterion5() {
  auto geo = build_sphere_two_charts(4, 16, 1.0, "instanton");
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto conn = bpst_connection(geo.manifold, basis, 1.0);
  auto riem = assemble(geo.metric, {}, conn);
  const Manifold& man = geo.manifold;

  const NCConnection vac = scaled_ncc(conn, rep, 1.0);
  const VacuumResiduals rv = vacuum_residuals(vac, man, *riem);
  const double gv = gradient(vac, man, *riem).norm();
  const bool a_ok = rv.representation < 1e-6 && rv.covariant_constancy < 1e-6 && rv.curvature < 1e-6 && gv < 1e-6;

  const NCConnection zero = zero_ncc(conn, rep);
  const VacuumResiduals rz = vacuum_residuals(zero, man, *riem);
  const double gz = gradient(zero, man, *riem).norm();

  // |R(F)| with the same weights: partition of unity, cell volume, sqrt(g^M), det(g_ab)
  const Lattice& lat = *man.lattice;
  std::vector<double> dens(lat.size(), 0.0);
  for (int ch = 0; ch < lat.num_charts(); ++ch)
    for (std::size_t p = lat.chart_begin(ch); p < lat.chart_end(ch); ++p) {
      const RMat h = riem->hM(p);
      std::vector<std::pair<int, int>> pairs;
      std::vector<Mat> RF;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
          pairs.emplace_back(mu, nu);
          RF.push_back(rep->image_of(conn->F_matrix(p, mu, nu)));
        }
      double acc = 0.0;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
          const auto [m, n] = pairs[i];
          const auto [r, s] = pairs[j];
          const double minor = h(m, r) * h(n, s) - h(m, s) * h(n, r);
          acc += minor * (RF[i].adjoint() * RF[j]).trace().real();
        }
      dens[p] = man.weights[p] * lat.cell_volume(ch) * riem->base.sqrt_det[p] * riem->gInt(p).determinant() * acc;
    }
  const double RFnorm = std::sqrt(pairwise_sum(dens));
  const double rel = std::abs(rz.curvature - RFnorm) / RFnorm;
  const bool b_ok = rel < 1e-10 && RFnorm > 0.1 && gz > 1e-2;
  return {a_ok && b_ok, "(a) residuals " + sci(rv.representation) + ", " + sci(rv.covariant_constancy) + ", " + sci(rv.curvature) +
                            ", |grad| " + sci(gv) + " (tol 1e-6); (b) curvature residual " + fixed(rz.curvature) + " vs |R(F)| " +
                            fixed(RFnorm) + " (rel diff " + sci(rel) + "), |grad| " + fixed(gz) + " (> 1e-2)"};
}

// 6. Chern-Weil numbers
Outcome criterion6() {
  auto basis = build_su(2);
  const auto problem = [&](double rho) {
    return ChernProblem([rho, basis](int N) {
      auto geo = build_sphere_two_charts(4, N, 1.0, "instanton", 4);
      auto conn = bpst_connection(geo.manifold, basis, rho);
      return std::make_pair(geo.manifold, conn);
    });
  };
  const ChernNumber a16 = chern_number_refined(problem(1.0), 16, 2);
  const ChernNumber a24 = chern_number_refined(problem(1.0), 24, 2);
  const ChernNumber b16 = chern_number_refined(problem(1.5), 16, 2);
  const ChernNumber b24 = chern_number_refined(problem(1.5), 24, 2);
  const double e16 = std::abs(a16.value - 1.0), e24 = std::abs(a24.value - 1.0);
  const double d16 = std::abs(a16.value - b16.value), d24 = std::abs(a24.value - b24.value);
  const bool cls = d16 <= a16.estimated_error + b16.estimated_error && d24 <= a24.estimated_error + b24.estimated_error;

  double q1 = 0.0;
  {
    auto geo = build_sphere_two_charts(4, 12, 1.0, "instanton");
    for (const auto& [k, v] : chern_form(*bpst_connection(geo.manifold, basis, 1.0), 1).comps)
      for (double x : v) q1 = std::max(q1, std::abs(x));
    auto tor = build_torus(2, 16, 1.0);
    for (const auto& [k, v] : chern_form(*random_connection(tor.manifold, basis, 606, 0.8), 1).comps)
      for (double x : v) q1 = std::max(q1, std::abs(x));
  }
  return {e16 < 0.05 && e24 < 0.015 && cls && q1 < 1e-12,
          "c2 = " + fixed(a16.value) + " (N=16, tol 5%), " + fixed(a24.value) + " (N=24, tol 1.5%); rho=1 vs 1.5: |diff| " + sci(d16) +
              " <= " + sci(a16.estimated_error + b16.estimated_error) + " (N=16), " + sci(d24) + " <= " +
              sci(a24.estimated_error + b24.estimated_error) + " (N=24); q=1 form max " + sci(q1) + " (tol 1e-12)"};
}

// 7. Levi-Civita residuals
Outcome criterion7() {
  double exact_t = 0.0, exact_m = 0.0;
  for (std::uint64_t seed : {701, 702, 703}) {
    ExactSetup s(2, 6, seed);
    const LCReport r = lc_check(*s.riem);
    exact_t = std::max(exact_t, r.torsion);
    exact_m = std::max(exact_m, r.metricity);
  }
  std::vector<LCReport> smooth;
  for (int N : {32, 64}) {
    auto geo = build_torus(2, N, 1.0);
    auto basis = build_su(2);
    auto ref = random_connection(geo.manifold, basis, 711, 0.4);
    auto riem = assemble(smooth_base_metric(geo.manifold, 712, 0.15), smooth_internal_metric(geo.manifold, 3, 713, 0.15), ref);
    smooth.push_back(lc_check(*riem));
  }
  const double ratio = smooth[0].metricity / smooth[1].metricity;
  const bool torsion_exact = smooth[0].torsion < 1e-12 && smooth[1].torsion < 1e-12;
  const bool gamma_zero = smooth[0].gamma_d_mu_nu == 0.0 && smooth[1].gamma_d_mu_nu == 0.0;
  return {exact_t < 1e-12 && exact_m < 1e-12 && ratio > 3.2 && ratio < 4.8 && torsion_exact && gamma_zero,
          "constant regime torsion " + sci(exact_t) + ", metricity " + sci(exact_m) + " (tol 1e-12); smooth metricity " +
              sci(smooth[0].metricity) + " -> " + sci(smooth[1].metricity) + ", ratio " + fixed(ratio, 3) +
              " (4 +- 20%); smooth torsion " + sci(std::max(smooth[0].torsion, smooth[1].torsion)) +
              " at both grids (vanishes identically, no ratio); Gamma^d_mu_nu = 0"};
}

// 8. gauge invariance of the action
Outcome criterion8() {
  auto geo = build_torus(2, 16, 1.0);
  auto basis = build_su(2);
  auto rep = build_representation(basis, {});
  auto ref = random_connection(geo.manifold, basis, 801, 0.5);
  std::mt19937_64 rng(802);
  auto riem = assemble_constant(geo.metric, random_spd(rng, 3), ref);
  const NCConnection c = random_field_ncc(ref, rep, 803, 0.6);
  const double S = action(c, geo.manifold, *riem).S_total;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    // U(2): special unitary factor times a phase
    const Mat U = std::exp(cplx(0.0, 0.37 * i)) * exp_antihermitian(random_antiherm(rng, 2));
    const NCConnection cu = gauge_transform(c, MatrixField::constant(ref->lattice_ptr(), U));
    worst = std::max(worst, std::abs(action(cu, geo.manifold, *riem).S_total - S));
  }
  return {worst < 1e-10, "max |S[U] - S| " + sci(worst) + " over 20 unitaries, S = " + fixed(S) + " (tol 1e-10)"};
}

// 9. bitwise reproducibility of the criterion 4 report, also across thread counts
Outcome criterion9(const std::string& first) {
  const int before = threads();
  set_threads(4);
  const RunOutcome again = run_experiment(load_config("torus_vacuum.json"));
  set_threads(before);
  const std::string second = again.report.dump();
  const bool same = !first.empty() && first == second;
  return {same, same ? "reports identical (" + std::to_string(first.size()) + " bytes; second run with 4 workers)" : "reports differ"};
}

}  // namespace

int main() {
  int failures = 0;
  std::string report4;
  const std::vector<std::tuple<int, std::string, double, std::function<Outcome()>>> criteria = {
      {1, "algebraic identities, exact regime", 30, criterion1},
      {2, "metric block structure", 10, criterion2},
      {3, "gradient vs finite differences", 120, criterion3},
      {4, "trivial-bundle vacua and double well", 600, [&] { return criterion4(report4); }},
      {5, "instanton-bundle vacuum structure", 900, criterion5},
      {6, "Chern-Weil numbers", 600, criterion6},
      {7, "Levi-Civita connection", 300, criterion7},
      {8, "gauge invariance of the action", 60, criterion8},
      {9, "determinism", 600, [&] { return criterion9(report4); }},
  };
  for (const auto& [id, name, limit, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= limit;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] criterion %d: %s: %s; %.1f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs,
                limit, in_time ? "" : " exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
