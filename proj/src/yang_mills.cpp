#include "ncym/yang_mills.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace ncym {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Key hkey(int mu) { return Key{1} << mu; }
Key vkey(int d, int a) { return Key{1} << (d + a); }

enum Sector { horizontal = 0, mixed = 1, vertical = 2 };

struct Block {
  std::vector<Key> keys;
  // slot pairs (s0 < s1) of each key, frame indices
  std::vector<std::pair<int, int>> slots;
};

std::array<Block, 3> sector_blocks(int d, int N) {
  std::array<Block, 3> b;
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      b[horizontal].keys.push_back(hkey(m) | hkey(n));
      b[horizontal].slots.push_back({m, n});
    }
  for (int m = 0; m < d; ++m)
    for (int a = 0; a < N; ++a) {
      b[mixed].keys.push_back(hkey(m) | vkey(d, a));
      b[mixed].slots.push_back({m, d + a});
    }
  for (int a = 0; a < N; ++a)
    for (int c = a + 1; c < N; ++c) {
      b[vertical].keys.push_back(vkey(d, a) | vkey(d, c));
      b[vertical].slots.push_back({d + a, d + c});
    }
  return b;
}

void check_reference(const NCConnection& c, const RiemannianStructure& riem) {
  if (riem.conn != c.ref)
    throw Error(ErrorCode::reference_mismatch,
                "connection and metric were built from different reference connections (" + c.ref->label() + " vs " +
                    riem.conn->label() + ")");
}

// Integration weight: partition of unity, cell volume, sqrt(g^M), and the
// fiber factor sqrt(det g_ab) from the Hodge star times the one from the
// fiber integral.
std::vector<double> point_weights(const Manifold& man, const RiemannianStructure& riem) {
  const Lattice& lat = *man.lattice;
  std::vector<double> W(lat.size());
  for (int c = 0; c < lat.num_charts(); ++c) {
    const double cv = lat.cell_volume(c);
    for (std::size_t p = lat.chart_begin(c); p < lat.chart_end(c); ++p) {
      const double s = riem.sqrt_det_int[p];
      W[p] = man.weights[p] * cv * riem.base.sqrt_det[p] * s * s;
    }
  }
  return W;
}

// Frame inverse metric entry in the adapted basis: block diagonal.
double h_entry(const RiemannianStructure& riem, std::size_t p, int A, int B) {
  const int d = riem.d();
  const int N = riem.N();
  if (A < d && B < d) return riem.h_base[(p * d + A) * d + B];
  if (A >= d && B >= d) return riem.h_int[(p * N + (A - d)) * N + (B - d)];
  return 0.0;
}

struct Lambda {
  MixedForm form;
  std::array<std::vector<double>, 3> dens;  // per sector, per point (weighted)
};

// Lambda_T = W sum_S P_ST Omega_S with P_ST = det h[S, T].
Lambda make_lambda(const MixedForm& Omega, const Manifold& man, const RiemannianStructure& riem) {
  const int d = riem.d();
  const int N = riem.N();
  const auto blocks = sector_blocks(d, N);
  const std::vector<double> W = point_weights(man, riem);
  const std::size_t n = man.lattice->size();
  Lambda L{MixedForm(Omega.ref_ptr(), Omega.rep_ptr(), 2), {}};
  for (int s = 0; s < 3; ++s) {
    const Block& b = blocks[static_cast<std::size_t>(s)];
    const std::size_t m = b.keys.size();
    L.dens[static_cast<std::size_t>(s)].assign(n, 0.0);
    if (m == 0) continue;
    std::vector<const MatrixField*> om(m);
    std::vector<MatrixField*> out(m);
    for (std::size_t i = 0; i < m; ++i) {
      om[i] = Omega.find(b.keys[i]);
      out[i] = &L.form.at(b.keys[i]);
    }
    auto& dens = L.dens[static_cast<std::size_t>(s)];
    parallel_for(n, [&](std::size_t p) {
      RMat P(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const auto [a0, a1] = b.slots[i];
          const auto [b0, b1] = b.slots[j];
          P(i, j) = h_entry(riem, p, a0, b0) * h_entry(riem, p, a1, b1) - h_entry(riem, p, a0, b1) * h_entry(riem, p, a1, b0);
        }
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        Mat l = Mat::Zero(Omega.k(), Omega.k());
        for (std::size_t i = 0; i < m; ++i)
          if (P(i, j) != 0.0 && om[i]) l += P(i, j) * om[i]->at(p);
        l *= W[p];
        if (om[j]) acc += (om[j]->at(p).adjoint() * l).trace().real();
        out[j]->at(p) = l;
      }
      dens[p] = acc;
    });
  }
  return L;
}

std::vector<MatrixField> rep_potential(const NCConnection& c) {
  std::vector<MatrixField> RA;
  const auto lat = c.ref->lattice_ptr();
  for (int mu = 0; mu < c.d(); ++mu) {
    MatrixField f(lat, c.k());
    parallel_for(lat->size(), [&](std::size_t p) {
      f.at(p) = c.rep->image(std::span<const double>(c.ref->A_ptr(p, mu), static_cast<std::size_t>(c.N())));
    });
    RA.push_back(std::move(f));
  }
  return RA;
}

}  // namespace

ActionBreakdown action(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem) {
  check_reference(c, riem);
  const Lambda L = make_lambda(nc_curvature(c), man, riem);
  ActionBreakdown out;
  out.S_horizontal = pairwise_sum(L.dens[horizontal]);
  out.S_mixed = pairwise_sum(L.dens[mixed]);
  out.S_vertical = pairwise_sum(L.dens[vertical]);
  out.S_total = out.S_horizontal + out.S_mixed + out.S_vertical;
  const Lattice& lat = *man.lattice;
  out.density.resize(lat.size());
  for (std::size_t p = 0; p < lat.size(); ++p) out.density[p] = L.dens[0][p] + L.dens[1][p] + L.dens[2][p];
  for (int ch = 0; ch < lat.num_charts(); ++ch)
    out.chart_totals.push_back(pairwise_sum(std::vector<double>(out.density.begin() + static_cast<std::ptrdiff_t>(lat.chart_begin(ch)),
                                                                out.density.begin() + static_cast<std::ptrdiff_t>(lat.chart_end(ch)))));
  // report the integrand without the cell volume and partition weight
  for (int ch = 0; ch < lat.num_charts(); ++ch) {
    const double cv = lat.cell_volume(ch);
    for (std::size_t p = lat.chart_begin(ch); p < lat.chart_end(ch); ++p) {
      const double w = man.weights[p] * cv;
      out.density[p] = w > 0.0 ? out.density[p] / w : 0.0;
    }
  }
  return out;
}

double action_via_cycle(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem) {
  check_reference(c, riem);
  const MixedForm W = nc_curvature(c);
  return scalar_product(W, W, man, riem).real();
}

NCConnection gradient(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem) {
  check_reference(c, riem);
  const int d = c.d();
  const int N = c.N();
  const std::size_t n = c.points();
  const OrdinaryConnection& ref = *c.ref;
  const LieBasis& Lb = ref.basis();
  const Lambda L = make_lambda(nc_curvature(c), man, riem);
  const auto RA = rep_potential(c);
  NCConnection G = zero_ncc(c.ref, c.rep);

  auto comm = [](const auto& x, const auto& y) -> Mat { return x * y - y * x; };

  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) {
      const MatrixField& Lm = *L.form.find(hkey(mu) | hkey(nu));
      // phi_c: -F^c Lambda
      for (int e = 0; e < N; ++e)
        parallel_for(n, [&](std::size_t p) { G.phi[e].at(p) -= ref.F(p, mu, nu, e) * Lm.at(p); });
      const MatrixField Dm = partial_derivative_adjoint(Lm, mu);
      const MatrixField Dn = partial_derivative_adjoint(Lm, nu);
      parallel_for(n, [&](std::size_t p) {
        const auto l = Lm.at(p);
        const Mat rm = RA[mu].at(p).adjoint();
        const Mat rn = RA[nu].at(p).adjoint();
        const Mat am = c.a[mu].at(p).adjoint();
        const Mat an = c.a[nu].at(p).adjoint();
        G.a[nu].at(p) += Dm.at(p) + comm(rm, l) + comm(am, l);
        G.a[mu].at(p) -= Dn.at(p) + comm(rn, l);
        G.a[mu].at(p) += comm(l, an);
      });
    }

  for (int mu = 0; mu < d; ++mu)
    for (int b = 0; b < N; ++b) {
      const MatrixField& Lm = *L.form.find(hkey(mu) | vkey(d, b));
      const MatrixField Dm = partial_derivative_adjoint(Lm, mu);
      parallel_for(n, [&](std::size_t p) {
        const auto l = Lm.at(p);
        const Mat rm = RA[mu].at(p).adjoint();
        const Mat am = c.a[mu].at(p).adjoint();
        G.phi[b].at(p) += Dm.at(p) + comm(rm, l) + comm(am, l);
        G.a[mu].at(p) += comm(l, Mat(c.phi[b].at(p).adjoint()));
        const double* Ap = ref.A_ptr(p, mu);
        for (int e = 0; e < N; ++e) {
          if (Ap[e] == 0.0) continue;
          for (int cc = 0; cc < N; ++cc) {
            const double s = Ap[e] * Lb.C(e, b, cc);
            if (s != 0.0) G.phi[cc].at(p) -= s * l;
          }
        }
      });
    }

  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b) {
      const MatrixField& Lm = *L.form.find(vkey(d, a) | vkey(d, b));
      parallel_for(n, [&](std::size_t p) {
        const auto l = Lm.at(p);
        G.phi[a].at(p) += comm(l, Mat(c.phi[b].at(p).adjoint()));
        G.phi[b].at(p) += comm(Mat(c.phi[a].at(p).adjoint()), l);
        for (int cc = 0; cc < N; ++cc) {
          const double s = Lb.C(a, b, cc);
          if (s != 0.0) G.phi[cc].at(p) -= s * l;
        }
      });
    }
  G *= 2.0;
  return G;
}

VacuumResiduals vacuum_residuals(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem) {
  const ActionBreakdown a = action(c, man, riem);
  VacuumResiduals r;
  r.representation = std::sqrt(std::max(0.0, a.S_vertical));
  r.covariant_constancy = std::sqrt(std::max(0.0, a.S_mixed));
  r.curvature = std::sqrt(std::max(0.0, a.S_horizontal));
  return r;
}

VacuumClass classify_vacuum(const NCConnection& c, const RiemannianStructure& riem, const ClassifyOptions& opts) {
  const int N = c.N();
  const int k = c.k();
  const std::size_t n = c.points();
  const LieBasis& Lb = c.ref->basis();
  VacuumClass out;

  std::vector<double> resid(n, 0.0);
  parallel_for(n, [&](std::size_t p) {
    double worst = 0.0;
    for (int a = 0; a < N; ++a)
      for (int b = a + 1; b < N; ++b) {
        Mat v = c.phi[a].at(p) * c.phi[b].at(p) - c.phi[b].at(p) * c.phi[a].at(p);
        for (int e = 0; e < N; ++e)
          if (Lb.C(a, b, e) != 0.0) v -= Lb.C(a, b, e) * c.phi[e].at(p);
        worst = std::max(worst, v.norm());
      }
    resid[p] = worst;
  });
  out.representation_residual = *std::max_element(resid.begin(), resid.end());
  if (!(out.representation_residual <= opts.residual_tol))
    throw Error(ErrorCode::classification_refused,
                "phi is not a representation: residual " + sci(out.representation_residual) + " exceeds " + sci(opts.residual_tol));

  // Casimir spectrum per point
  std::vector<std::vector<double>> spec(n);
  parallel_for(n, [&](std::size_t p) {
    Mat K = Mat::Zero(k, k);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        const double h = riem.h_int[(p * N + a) * N + b];
        if (h != 0.0) K -= h * c.phi[a].at(p) * c.phi[b].at(p);
      }
    const Mat H = 0.5 * (K + K.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    spec[p].assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  });
  out.casimir_spectrum.assign(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    std::vector<double> col(n);
    for (std::size_t p = 0; p < n; ++p) col[p] = spec[p][static_cast<std::size_t>(i)];
    out.casimir_spectrum[static_cast<std::size_t>(i)] = pairwise_sum(col) / static_cast<double>(n);
  }
  for (std::size_t p = 0; p < n; ++p)
    for (int i = 0; i < k; ++i)
      out.casimir_deviation =
          std::max(out.casimir_deviation, std::abs(spec[p][static_cast<std::size_t>(i)] - out.casimir_spectrum[static_cast<std::size_t>(i)]));

  // commutant: null space of X -> ([X, phi_a])_a at every point, smallest dimension reported
  int comm_dim = k * k;
  const std::size_t probe = std::max<std::size_t>(1, n / 7);
  for (std::size_t p = 0; p < n; p += probe) {
    Mat M(N * k * k, k * k);
    for (int col = 0; col < k * k; ++col) {
      Mat X = Mat::Zero(k, k);
      X(col % k, col / k) = 1.0;
      for (int a = 0; a < N; ++a) {
        const Mat v = X * c.phi[a].at(p) - c.phi[a].at(p) * X;
        M.block(a * k * k, col, k * k, 1) = Eigen::Map<const CVec>(v.data(), k * k);
      }
    }
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
    int null = k * k - static_cast<int>(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) < 1e-6 * scale) ++null;
    comm_dim = std::min(comm_dim, null);
  }
  out.commutant_dim = comm_dim;

  // labels
  const double tol = opts.spectrum_tol;
  const int n_alg = Lb.n();
  const bool all_zero = std::all_of(out.casimir_spectrum.begin(), out.casimir_spectrum.end(),
                                    [&](double v) { return std::abs(v) <= tol; });
  const double cf = (n_alg * n_alg - 1.0) / (2.0 * n_alg);
  const bool fund = k == n_alg && comm_dim == 1 &&
                    std::all_of(out.casimir_spectrum.begin(), out.casimir_spectrum.end(),
                                [&](double v) { return std::abs(v - cf) <= tol; });
  if (all_zero) {
    out.label = "trivial";
  } else if (fund) {
    out.label = "fundamental";
  } else if (n_alg == 2) {
    // group eigenvalues j(j+1); multiplicity (2j+1) per copy
    std::vector<std::string> parts;
    std::size_t i = 0;
    bool ok = true;
    while (i < out.casimir_spectrum.size()) {
      const double lam = out.casimir_spectrum[i];
      std::size_t j = i;
      while (j < out.casimir_spectrum.size() && std::abs(out.casimir_spectrum[j] - lam) <= tol) ++j;
      const std::size_t mult = j - i;
      const double spin = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::max(0.0, lam)));
      const double twice = std::round(2.0 * spin);
      const std::size_t dim = static_cast<std::size_t>(twice) + 1;
      if (std::abs(2.0 * spin - twice) > 1e-3 || mult % dim != 0) {
        ok = false;
        break;
      }
      const std::size_t copies = mult / dim;
      std::string name = twice == 0 ? "trivial" : (static_cast<int>(twice) % 2 ? "spin-" + std::to_string(static_cast<int>(twice)) + "/2"
                                                                                    : "spin-" + std::to_string(static_cast<int>(twice) / 2));
      parts.push_back(copies > 1 ? std::to_string(copies) + "x" + name : name);
      i = j;
    }
    if (ok) {
      out.label = parts[0];
      for (std::size_t q = 1; q < parts.size(); ++q) out.label += " + " + parts[q];
    } else {
      out.label = "unlabeled";
    }
  } else {
    out.label = "unlabeled";
  }
  return out;
}

bool same_class(const VacuumClass& x, const VacuumClass& y, double spectrum_tol) {
  if (x.commutant_dim != y.commutant_dim || x.casimir_spectrum.size() != y.casimir_spectrum.size()) return false;
  for (std::size_t i = 0; i < x.casimir_spectrum.size(); ++i)
    if (std::abs(x.casimir_spectrum[i] - y.casimir_spectrum[i]) > spectrum_tol) return false;
  return true;
}

VacuumReport make_report(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem,
                         const ClassifyOptions& copts) {
  VacuumReport r;
  r.action = action(c, man, riem);
  r.residuals = vacuum_residuals(c, man, riem);
  r.grad_norm = gradient(c, man, riem).norm();
  try {
    r.classification = classify_vacuum(c, riem, copts);
    r.classified = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::classification_refused) throw;
    r.classification_error = e.what();
  }
  return r;
}

SolveResult solve_vacuum(NCConnection x, const Manifold& man, const RiemannianStructure& riem, const SolverOptions& opts,
                         const ClassifyOptions& copts) {
  check_reference(x, riem);
  if (opts.project_antihermitian) x.project_antihermitian();
  SolveResult res{x, {}, {}};
  auto grad_of = [&](const NCConnection& y) {
    NCConnection g = gradient(y, man, riem);
    if (opts.project_antihermitian) g.project_antihermitian();
    return g;
  };
  double S = action(x, man, riem).S_total;
  NCConnection g = grad_of(x);
  double gn = g.norm();
  NCConnection dir = g;
  dir *= -1.0;
  double step = opts.initial_step;
  res.trace.push_back({0, S, gn, 0.0});
  bool converged = gn < opts.grad_tol;
  bool steepest = true;
  int it = 0;
  while (!converged && it < opts.max_iter) {
    ++it;
    double slope = dir.dot(g);
    if (!(slope < 0.0)) {
      dir = g;
      dir *= -1.0;
      slope = -gn * gn;
      steepest = true;
    }
    double s = std::min(step * opts.grow, opts.max_step);
    bool accepted = false;
    NCConnection trial = x;
    double St = S;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      trial = x;
      trial.axpy(s, dir);
      St = action(trial, man, riem).S_total;
      if (std::isfinite(St) && St <= S + opts.armijo * s * slope) {
        accepted = true;
        break;
      }
      s *= opts.shrink;
    }
    if (!accepted) {
      // momentum direction failed: retry once along steepest descent before giving up
      if (!steepest) {
        dir = g;
        dir *= -1.0;
        steepest = true;
        continue;
      }
      break;
    }
    x = std::move(trial);
    S = St;
    step = s;
    NCConnection gnew = grad_of(x);
    gn = gnew.norm();
    dir *= opts.momentum;
    dir.axpy(-1.0, gnew);
    steepest = false;
    g = std::move(gnew);
    res.trace.push_back({it, S, gn, s});
    converged = gn < opts.grad_tol;
  }
  res.state = std::move(x);
  res.report = make_report(res.state, man, riem, copts);
  res.report.converged = converged;
  res.report.iterations = it;
  return res;
}

SecondOrderProbe second_order_probe(const NCConnection& c, const Manifold& man, const RiemannianStructure& riem,
                                    int directions, std::uint64_t seed, double eps) {
  SecondOrderProbe out;
  out.directions = directions;
  out.min_curvature = std::numeric_limits<double>::infinity();
  out.max_curvature = -std::numeric_limits<double>::infinity();
  const double S0 = action(c, man, riem).S_total;
  for (int i = 0; i < directions; ++i) {
    NCConnection v = random_field_ncc(c.ref, c.rep, seed + static_cast<std::uint64_t>(i), 1.0);
    v *= 1.0 / v.norm();
    NCConnection xp = c, xm = c;
    xp.axpy(eps, v);
    xm.axpy(-eps, v);
    const double q = (action(xp, man, riem).S_total - 2.0 * S0 + action(xm, man, riem).S_total) / (eps * eps);
    out.min_curvature = std::min(out.min_curvature, q);
    out.max_curvature = std::max(out.max_curvature, q);
  }
  return out;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

PotentialSlice potential_slice(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                               const Manifold& man, const RiemannianStructure& riem, double t_min, double t_max,
                               int samples, double tol) {
  if (samples < 3) throw Error(ErrorCode::validation, "potential slice needs at least 3 samples");
  auto S = [&](double t) { return action(scaled_ncc(ref, rep, t), man, riem).S_total; };
  PotentialSlice out;
  for (int i = 0; i < samples; ++i) {
    const double t = t_min + (t_max - t_min) * i / (samples - 1);
    out.t.push_back(t);
    out.S.push_back(S(t));
  }
  // bracket each interior local minimum of the samples and refine
  for (int i = 1; i + 1 < samples; ++i)
    if (out.S[i] <= out.S[i - 1] && out.S[i] < out.S[i + 1])
      out.minima.push_back(golden_section_minimize(S, out.t[i - 1], out.t[i + 1], tol));
  return out;
}

nlohmann::json to_json(const ActionBreakdown& a, bool with_density) {
  nlohmann::json j{{"S_total", a.S_total},
                   {"S_horizontal", a.S_horizontal},
                   {"S_mixed", a.S_mixed},
                   {"S_vertical", a.S_vertical},
                   {"chart_totals", a.chart_totals}};
  if (with_density) j["density"] = a.density;
  return j;
}

nlohmann::json to_json(const VacuumResiduals& r) {
  return {{"representation", r.representation}, {"covariant_constancy", r.covariant_constancy}, {"curvature", r.curvature}};
}

nlohmann::json to_json(const VacuumClass& v) {
  return {{"label", v.label},
          {"casimir_spectrum", v.casimir_spectrum},
          {"casimir_deviation", v.casimir_deviation},
          {"commutant_dim", v.commutant_dim},
          {"representation_residual", v.representation_residual}};
}

nlohmann::json to_json(const VacuumReport& r) {
  nlohmann::json j{{"residuals", to_json(r.residuals)},
                   {"action", to_json(r.action)},
                   {"grad_norm", r.grad_norm},
                   {"converged", r.converged},
                   {"iterations", r.iterations},
                   {"classified", r.classified}};
  if (r.classified)
    j["classification"] = to_json(r.classification);
  else
    j["classification_error"] = r.classification_error;
  return j;
}

}  // namespace ncym
