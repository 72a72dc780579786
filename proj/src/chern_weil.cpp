#include "ncym/chern_weil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace ncym {

namespace {

std::vector<int> bits_of(std::uint64_t S) {
  std::vector<int> out;
  for (int i = 0; S; ++i, S >>= 1)
    if (S & 1) out.push_back(i);
  return out;
}

int perm_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

double factorial(int q) {
  double f = 1.0;
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}

}  // namespace

ChernForm chern_form(const OrdinaryConnection& conn, int q) {
  const int d = conn.d();
  if (q < 1) throw Error(ErrorCode::degree, "Chern-Weil degree must be at least 1");
  if (2 * q > d) throw Error(ErrorCode::degree, "Chern-Weil form of degree " + std::to_string(2 * q) + " exceeds dim " + std::to_string(d));
  ChernForm cf;
  cf.q = q;
  cf.d = d;
  cf.lattice = conn.lattice_ptr();
  const std::size_t n = conn.lattice().size();

  // (i/2pi)^q / (q! 2^q), real part taken at the end
  const cplx norm = std::pow(cplx(0.0, 1.0 / (2.0 * M_PI)), q) / (factorial(q) * std::pow(2.0, q));

  std::vector<std::uint64_t> keys;
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << d); ++S)
    if (std::popcount(S) == 2 * q) keys.push_back(S);

  for (std::uint64_t S : keys) {
    const std::vector<int> idx = bits_of(S);
    std::vector<std::vector<int>> perms;
    std::vector<int> signs;
    std::vector<int> perm(idx.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      perms.push_back(perm);
      signs.push_back(perm_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> vals(n);
    parallel_for(n, [&](std::size_t p) {
      // F matrices for every ordered pair of the index set
      const int m = static_cast<int>(idx.size());
      std::vector<Mat> F(static_cast<std::size_t>(m * m));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          F[static_cast<std::size_t>(i * m + j)] = i == j ? Mat::Zero(conn.basis().n(), conn.basis().n()) : conn.F_matrix(p, idx[i], idx[j]);
      cplx acc = 0.0;
      std::vector<Mat> args(static_cast<std::size_t>(q));
      for (std::size_t s = 0; s < perms.size(); ++s) {
        for (int k = 0; k < q; ++k)
          args[static_cast<std::size_t>(k)] = F[static_cast<std::size_t>(perms[s][2 * k] * m + perms[s][2 * k + 1])];
        acc += static_cast<double>(signs[s]) * invariant_polynomial(conn.basis(), args);
      }
      vals[p] = (norm * acc).real();
    });
    cf.comps.emplace(S, std::move(vals));
  }
  return cf;
}

double closedness_residual(const ChernForm& cf) {
  const int d = cf.d;
  const int deg = 2 * cf.q;
  if (deg >= d) return 0.0;
  const Lattice& lat = *cf.lattice;
  const std::size_t n = lat.size();
  // derivatives of every component along every axis
  std::map<std::pair<std::uint64_t, int>, std::vector<double>> der;
  for (const auto& [S, v] : cf.comps)
    for (int mu = 0; mu < d; ++mu) {
      std::vector<double> out(n);
      lat.derivative(v.data(), out.data(), 1, mu);
      der.emplace(std::make_pair(S, mu), std::move(out));
    }
  double worst = 0.0;
  for (std::uint64_t J = 0; J < (std::uint64_t{1} << d); ++J) {
    if (std::popcount(J) != deg + 1) continue;
    const auto idx = bits_of(J);
    for (std::size_t p = 0; p < n; ++p) {
      double v = 0.0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::uint64_t rest = J & ~(std::uint64_t{1} << idx[i]);
        const auto it = der.find({rest, idx[i]});
        if (it == der.end()) continue;
        v += (i % 2 ? -1.0 : 1.0) * it->second[p];
      }
      worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

double chern_integral(const ChernForm& cf, const Manifold& man) {
  if (2 * cf.q != cf.d) throw Error(ErrorCode::degree, "Chern number needs a top-degree form (2q = d)");
  const auto it = cf.comps.find((std::uint64_t{1} << cf.d) - 1);
  const Lattice& lat = *man.lattice;
  std::vector<double> vals(lat.size(), 0.0);
  for (int c = 0; c < lat.num_charts(); ++c) {
    const double cv = lat.cell_volume(c);
    for (std::size_t p = lat.chart_begin(c); p < lat.chart_end(c); ++p) vals[p] = man.weights[p] * cv * it->second[p];
  }
  return pairwise_sum(vals);
}

double gluing_residual(const ChernForm& cf, const Manifold& man) {
  if (2 * cf.q != cf.d || man.overlaps.empty()) return 0.0;
  const Lattice& lat = *man.lattice;
  const int d = cf.d;
  const std::vector<double>& rho = cf.comps.at((std::uint64_t{1} << d) - 1);
  double worst = 0.0, scale = 0.0;
  std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
  RMat J(d, d);
  for (const Overlap& ov : man.overlaps)
    for (std::size_t p = lat.chart_begin(ov.chart_b); p < lat.chart_end(ov.chart_b); ++p) {
      const double w = man.weights[p];
      if (w <= 0.0 || w >= 1.0) continue;
      lat.coords(p, y.data());
      ov.map(y.data(), x.data());
      double ra = 0.0;
      if (!interpolate(lat, ov.chart_a, rho.data(), 1, x.data(), &ra, 3)) continue;
      std::vector<double> Jv(static_cast<std::size_t>(d * d));
      sphere_point_map_jacobian(d, man.radius, y.data(), Jv.data());
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) J(i, j) = Jv[static_cast<std::size_t>(i * d + j)];
      const double pred = ra * J.determinant();
      worst = std::max(worst, std::abs(rho[p] - pred));
      scale = std::max(scale, std::abs(rho[p]));
    }
  return scale > 0.0 ? worst / scale : worst;
}

RadialProfile radial_profile(const ChernForm& cf, const Manifold& man, int chart, int bins, double r_max) {
  if (2 * cf.q != cf.d) throw Error(ErrorCode::degree, "radial profile needs a top-degree form");
  if (bins < 1) throw Error(ErrorCode::validation, "radial profile needs at least one bin");
  const Lattice& lat = *man.lattice;
  const std::vector<double>& rho = cf.comps.at((std::uint64_t{1} << cf.d) - 1);
  RadialProfile out;
  out.r.resize(static_cast<std::size_t>(bins));
  out.density.assign(static_cast<std::size_t>(bins), 0.0);
  out.count.assign(static_cast<std::size_t>(bins), 0);
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(bins));
  std::vector<double> x(static_cast<std::size_t>(cf.d));
  for (std::size_t p = lat.chart_begin(chart); p < lat.chart_end(chart); ++p) {
    lat.coords(p, x.data());
    double r = 0.0;
    for (double v : x) r += v * v;
    r = std::sqrt(r);
    const int b = static_cast<int>(r / r_max * bins);
    if (b < 0 || b >= bins) continue;
    acc[static_cast<std::size_t>(b)].push_back(rho[p]);
  }
  for (int b = 0; b < bins; ++b) {
    const auto& a = acc[static_cast<std::size_t>(b)];
    out.r[static_cast<std::size_t>(b)] = (b + 0.5) * r_max / bins;
    out.count[static_cast<std::size_t>(b)] = static_cast<int>(a.size());
    out.density[static_cast<std::size_t>(b)] = a.empty() ? 0.0 : pairwise_sum(a) / static_cast<double>(a.size());
  }
  return out;
}

ChernNumber chern_number(const OrdinaryConnection& conn, int q, const Manifold& man) {
  const ChernForm cf = chern_form(conn, q);
  ChernNumber out;
  out.q = q;
  out.value = chern_integral(cf, man);
  out.grid = man.lattice->chart(0).shape[0];
  out.fd_order = man.lattice->fd_order();
  out.gluing = gluing_residual(cf, man);
  return out;
}

ChernNumber chern_number_refined(const ChernProblem& build, int N, int q) {
  const auto [man, conn] = build(N);
  ChernNumber out = chern_number(*conn, q, man);
  const int Nc = std::max(4, static_cast<int>(std::lround(0.75 * N)));
  const auto [man_c, conn_c] = build(Nc);
  const ChernNumber coarse = chern_number(*conn_c, q, man_c);
  const double ratio = man_c.lattice->chart(0).spacing[0] / man.lattice->chart(0).spacing[0];
  out.coarse_grid = Nc;
  out.coarse_value = coarse.value;
  out.estimated_error = std::abs(out.value - coarse.value) / (std::pow(ratio, out.fd_order) - 1.0);
  return out;
}

nlohmann::json to_json(const ChernNumber& c) {
  nlohmann::json j{{"q", c.q}, {"value", c.value}, {"grid", c.grid}, {"fd_order", c.fd_order}, {"gluing_residual", c.gluing}};
  if (c.estimated_error >= 0.0) {
    j["estimated_error"] = c.estimated_error;
    j["coarse_grid"] = c.coarse_grid;
    j["coarse_value"] = c.coarse_value;
  } else {
    j["estimated_error"] = nullptr;
  }
  return j;
}

}  // namespace ncym
