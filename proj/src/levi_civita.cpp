#include "ncym/levi_civita.hpp"

#include <cmath>

#include "ncym/forms.hpp"

namespace ncym {

namespace {

struct Derivs {
  std::vector<std::vector<double>> gM;  // [mu] d*d per point
  std::vector<std::vector<double>> gI;  // [mu] N*N per point
  std::vector<std::vector<double>> A;   // [mu] d*N per point
};

Derivs base_derivatives(const RiemannianStructure& riem) {
  const Lattice& lat = *riem.base.lattice;
  const int d = riem.d();
  const int N = riem.N();
  Derivs D;
  for (int mu = 0; mu < d; ++mu) {
    std::vector<double> a(riem.base.g.size()), b(riem.g_int.size()), c(riem.conn->A_data().size());
    lat.derivative(riem.base.g.data(), a.data(), static_cast<std::size_t>(d * d), mu);
    lat.derivative(riem.g_int.data(), b.data(), static_cast<std::size_t>(N * N), mu);
    lat.derivative(riem.conn->A_data().data(), c.data(), static_cast<std::size_t>(d * N), mu);
    D.gM.push_back(std::move(a));
    D.gI.push_back(std::move(b));
    D.A.push_back(std::move(c));
  }
  return D;
}

// Frame metric diag(g^M, g_ab).
RMat frame_metric(const RiemannianStructure& riem, std::size_t p) {
  const int d = riem.d();
  const int N = riem.N();
  RMat g = RMat::Zero(d + N, d + N);
  g.topLeftCorner(d, d) = riem.gM(p);
  g.bottomRightCorner(N, N) = riem.gInt(p);
  return g;
}

// X_A g_BC in the frame: base derivative for horizontal A, zero for vertical.
double frame_derivative(const Derivs& Dv, const RiemannianStructure& riem, std::size_t p, int A, int B, int C) {
  const int d = riem.d();
  const int N = riem.N();
  if (A >= d) return 0.0;
  if (B < d && C < d) return Dv.gM[A][(p * d + B) * d + C];
  if (B >= d && C >= d) return Dv.gI[A][(p * N + (B - d)) * N + (C - d)];
  return 0.0;
}

}  // namespace

ChristoffelTable christoffel(const RiemannianStructure& riem) {
  const int d = riem.d();
  const int N = riem.N();
  const int D = d + N;
  const std::size_t n = riem.base.lattice->size();
  const OrdinaryConnection& ref = *riem.conn;
  const LieBasis& L = ref.basis();
  const Derivs Dv = base_derivatives(riem);

  ChristoffelTable t;
  t.d = d;
  t.N = N;
  t.points = n;
  t.christoffel.assign(n * static_cast<std::size_t>(D * D * D), 0.0);
  t.extra.assign(t.christoffel.size(), 0.0);

  parallel_for(n, [&](std::size_t p) {
    const RMat hM = riem.hM(p);
    const RMat hI = riem.hInt(p);
    const RMat gI = riem.gInt(p);
    auto dgM = [&](int mu, int a, int b) { return Dv.gM[mu][(p * d + a) * d + b]; };
    // nabla_mu g_ab
    auto nab_g = [&](int mu, int a, int b) {
      double v = Dv.gI[mu][(p * N + a) * N + b];
      for (int e = 0; e < N; ++e) {
        const double Ae = ref.A(p, mu, e);
        if (Ae == 0.0) continue;
        for (int f = 0; f < N; ++f) v -= Ae * (L.C(e, a, f) * gI(f, b) + L.C(e, b, f) * gI(a, f));
      }
      return v;
    };
    // L_{ad_c} g_ab
    auto lie_g = [&](int c, int a, int b) {
      double v = 0.0;
      for (int e = 0; e < N; ++e) v -= L.C(c, a, e) * gI(e, b) + L.C(c, b, e) * gI(a, e);
      return v;
    };
    // F^c_{mu rho} g_cb
    auto Fg = [&](int mu, int rho, int b) {
      double v = 0.0;
      for (int c = 0; c < N; ++c) v += ref.F(p, mu, rho, c) * gI(c, b);
      return v;
    };

    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) {
        for (int s = 0; s < d; ++s) {
          double v = 0.0;
          for (int r = 0; r < d; ++r) v += hM(s, r) * (dgM(mu, nu, r) + dgM(nu, mu, r) - dgM(r, mu, nu));
          t.christoffel[t.index(p, mu, nu, s)] = 0.5 * v;
        }
        for (int c = 0; c < N; ++c) t.extra[t.index(p, mu, nu, d + c)] = 0.5 * ref.F(p, mu, nu, c);
      }

    for (int mu = 0; mu < d; ++mu)
      for (int b = 0; b < N; ++b) {
        for (int s = 0; s < d; ++s) {
          double v = 0.0;
          for (int r = 0; r < d; ++r) v += hM(s, r) * Fg(mu, r, b);
          t.christoffel[t.index(p, mu, d + b, s)] = -0.5 * v;
          t.christoffel[t.index(p, d + b, mu, s)] = -0.5 * v;
        }
        for (int dd = 0; dd < N; ++dd) {
          double v = 0.0;
          for (int c = 0; c < N; ++c) v += hI(dd, c) * nab_g(mu, b, c);
          t.christoffel[t.index(p, mu, d + b, d + dd)] = 0.5 * v;
          t.christoffel[t.index(p, d + b, mu, d + dd)] = 0.5 * v;
          double w = 0.0;
          for (int e = 0; e < N; ++e) w += ref.A(p, mu, e) * L.C(e, b, dd);
          t.extra[t.index(p, mu, d + b, d + dd)] = w;
        }
      }

    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        for (int s = 0; s < d; ++s) {
          double v = 0.0;
          for (int r = 0; r < d; ++r) v += hM(s, r) * nab_g(r, a, b);
          t.christoffel[t.index(p, d + a, d + b, s)] = -0.5 * v;
        }
        for (int dd = 0; dd < N; ++dd) {
          double v = 0.0;
          for (int c = 0; c < N; ++c) v += hI(dd, c) * lie_g(c, a, b);
          t.christoffel[t.index(p, d + a, d + b, d + dd)] = -0.5 * v;
          t.extra[t.index(p, d + a, d + b, d + dd)] = 0.5 * L.C(a, b, dd);
        }
      }
  });

  const double gdm = horizontal_vertical_max(t);
  if (gdm != 0.0) throw Error(ErrorCode::internal, "Gamma^d_{mu nu} is nonzero: " + std::to_string(gdm));
  return t;
}

double horizontal_vertical_max(const ChristoffelTable& t) {
  double worst = 0.0;
  for (std::size_t p = 0; p < t.points; ++p)
    for (int mu = 0; mu < t.d; ++mu)
      for (int nu = 0; nu < t.d; ++nu)
        for (int c = 0; c < t.N; ++c) worst = std::max(worst, std::abs(t.gamma(p, mu, nu, t.d + c)));
  return worst;
}

double torsion_residual(const ChristoffelTable& t, const RiemannianStructure& riem) {
  const int D = t.D();
  std::vector<double> worst(t.points, 0.0);
  parallel_for(t.points, [&](std::size_t p) {
    double w = 0.0;
    for (int A = 0; A < D; ++A)
      for (int B = A + 1; B < D; ++B)
        for (int C = 0; C < D; ++C) {
          const double v = t.total(p, A, B, C) - t.total(p, B, A, C) - frame_structure(*riem.conn, p, A, B, C);
          w = std::max(w, std::abs(v));
        }
    worst[p] = w;
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double koszul_residual(const ChristoffelTable& t, const RiemannianStructure& riem) {
  const int D = t.D();
  const Derivs Dv = base_derivatives(riem);
  std::vector<double> worst(t.points, 0.0);
  parallel_for(t.points, [&](std::size_t p) {
    const RMat g = frame_metric(riem, p);
    RMat f(D * D, D);  // f(A*D + B, C)
    for (int A = 0; A < D; ++A)
      for (int B = 0; B < D; ++B)
        for (int C = 0; C < D; ++C) f(A * D + B, C) = frame_structure(*riem.conn, p, A, B, C);
    auto gf = [&](int A, int B, int C) {
      double v = 0.0;
      for (int E = 0; E < D; ++E) v += f(A * D + B, E) * g(E, C);
      return v;
    };
    double w = 0.0;
    for (int A = 0; A < D; ++A)
      for (int B = 0; B < D; ++B)
        for (int C = 0; C < D; ++C) {
          const double kz = 0.5 * (frame_derivative(Dv, riem, p, A, B, C) + frame_derivative(Dv, riem, p, B, A, C) -
                                   frame_derivative(Dv, riem, p, C, A, B) + gf(A, B, C) - gf(A, C, B) - gf(B, C, A));
          double lhs = 0.0;
          for (int E = 0; E < D; ++E) lhs += t.total(p, A, B, E) * g(E, C);
          w = std::max(w, std::abs(lhs - kz));
        }
    worst[p] = w;
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double metricity_residual(const ChristoffelTable& t, const RiemannianStructure& riem) {
  const int d = t.d;
  const int N = t.N;
  const int D = t.D();
  const Lattice& lat = *riem.base.lattice;
  const std::size_t n = t.points;
  const Derivs Dv = base_derivatives(riem);

  // assembled coordinate-basis metric and its finite-difference derivatives
  std::vector<double> gB(n * static_cast<std::size_t>(D * D));
  for (std::size_t p = 0; p < n; ++p) {
    const RMat g = riem.g_B(p);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) gB[(p * D + i) * D + j] = g(i, j);
  }
  std::vector<std::vector<double>> dgB(static_cast<std::size_t>(d), std::vector<double>(gB.size()));
  for (int mu = 0; mu < d; ++mu) lat.derivative(gB.data(), dgB[mu].data(), static_cast<std::size_t>(D * D), mu);

  std::vector<double> worst(n, 0.0);
  parallel_for(n, [&](std::size_t p) {
    const RMat A = riem.A(p);  // N x d
    // columns: coordinate vectors in adapted components, d_mu = nabla_mu - A^a_mu ad_a
    RMat Minv = RMat::Identity(D, D);
    Minv.bottomLeftCorner(N, d) = -A;
    RMat M = RMat::Identity(D, D);
    M.bottomLeftCorner(N, d) = A;
    RMat g(D, D);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) g(i, j) = gB[(p * D + i) * D + j];

    // D_X Y in coordinate components for coordinate basis vectors X, Y
    std::vector<RVec> DXY(static_cast<std::size_t>(D * D));
    for (int X = 0; X < D; ++X)
      for (int Y = 0; Y < D; ++Y) {
        RVec v = RVec::Zero(D);
        // derivative of Y's adapted coefficients along X
        if (X < d && Y < d)
          for (int b = 0; b < N; ++b) v(d + b) -= Dv.A[X][(p * d + Y) * N + b];
        for (int Ap = 0; Ap < D; ++Ap) {
          const double x = Minv(Ap, X);
          if (x == 0.0) continue;
          for (int Bp = 0; Bp < D; ++Bp) {
            const double y = Minv(Bp, Y);
            if (y == 0.0) continue;
            for (int C = 0; C < D; ++C) v(C) += x * y * t.total(p, Ap, Bp, C);
          }
        }
        DXY[static_cast<std::size_t>(X * D + Y)] = M * v;
      }

    double w = 0.0;
    for (int X = 0; X < D; ++X)
      for (int Y = 0; Y < D; ++Y)
        for (int Z = 0; Z < D; ++Z) {
          const double xg = X < d ? dgB[X][(p * D + Y) * D + Z] : 0.0;
          const double r = xg - DXY[static_cast<std::size_t>(X * D + Y)].dot(g.col(Z)) -
                           DXY[static_cast<std::size_t>(X * D + Z)].dot(g.col(Y));
          w = std::max(w, std::abs(r));
        }
    worst[p] = w;
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double vertical_sector_residual(const ChristoffelTable& t) {
  double worst = 0.0;
  for (std::size_t p = 0; p < t.points; ++p)
    for (int a = 0; a < t.N; ++a)
      for (int b = 0; b < t.N; ++b)
        for (int C = 0; C < t.D(); ++C) {
          const double expect = C >= t.d ? t.extra[t.index(p, t.d + a, t.d + b, C)] : 0.0;
          worst = std::max(worst, std::abs(t.total(p, t.d + a, t.d + b, C) - expect));
        }
  return worst;
}

LCReport lc_check(const RiemannianStructure& riem) {
  const ChristoffelTable t = christoffel(riem);
  LCReport r;
  r.torsion = torsion_residual(t, riem);
  r.metricity = metricity_residual(t, riem);
  r.koszul = koszul_residual(t, riem);
  r.vertical_sector = vertical_sector_residual(t);
  r.gamma_d_mu_nu = horizontal_vertical_max(t);
  return r;
}

nlohmann::json to_json(const LCReport& r) {
  return {{"torsion", r.torsion},
          {"metricity", r.metricity},
          {"koszul", r.koszul},
          {"vertical_sector", r.vertical_sector},
          {"gamma_d_mu_nu", r.gamma_d_mu_nu}};
}

}  // namespace ncym
