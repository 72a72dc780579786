#include "ncym/nc_connection.hpp"

#include <cmath>
#include <random>

namespace ncym {

namespace {

void check_like(const NCConnection& x, const NCConnection& y) {
  if (x.a.size() != y.a.size() || x.phi.size() != y.phi.size())
    throw Error(ErrorCode::shape, "connection fields have different layouts");
}

Key hkey(int mu) { return Key{1} << mu; }
Key vkey(int d, int a) { return Key{1} << (d + a); }

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

Mat random_antihermitian(std::mt19937_64& rng, int k, double amplitude) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat X(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) X(i, j) = cplx(g(rng), g(rng));
  return 0.5 * amplitude * (X - X.adjoint());
}

}  // namespace

NCConnection& NCConnection::operator+=(const NCConnection& o) {
  check_like(*this, o);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += o.phi[i];
  return *this;
}

NCConnection& NCConnection::operator*=(double s) {
  for (auto& f : a) f *= s;
  for (auto& f : phi) f *= s;
  return *this;
}

void NCConnection::axpy(double s, const NCConnection& o) {
  check_like(*this, o);
  for (std::size_t i = 0; i < a.size(); ++i) a[i].axpy(s, o.a[i]);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i].axpy(s, o.phi[i]);
}

double NCConnection::dot(const NCConnection& o) const {
  check_like(*this, o);
  std::vector<double> parts;
  auto add = [&](const MatrixField& x, const MatrixField& y) {
    std::vector<double> v(x.points() * x.stride());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (std::conj(x.data()[i]) * y.data()[i]).real();
    parts.push_back(pairwise_sum(v));
  };
  for (std::size_t i = 0; i < a.size(); ++i) add(a[i], o.a[i]);
  for (std::size_t i = 0; i < phi.size(); ++i) add(phi[i], o.phi[i]);
  return pairwise_sum(parts);
}

bool NCConnection::all_finite() const {
  for (const auto& f : a)
    if (!f.all_finite()) return false;
  for (const auto& f : phi)
    if (!f.all_finite()) return false;
  return true;
}

void NCConnection::project_antihermitian() {
  auto proj = [](MatrixField& f) {
    for (std::size_t p = 0; p < f.points(); ++p) {
      const Mat m = f.at(p);
      f.at(p) = 0.5 * (m - m.adjoint());
    }
  };
  for (auto& f : a) proj(f);
  for (auto& f : phi) proj(f);
}

NCConnection zero_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep) {
  if (rep->basis().dim() != ref->N()) throw Error(ErrorCode::shape, "representation and connection use different algebras");
  NCConnection c;
  c.ref = std::move(ref);
  c.rep = std::move(rep);
  const auto lat = c.ref->lattice_ptr();
  for (int mu = 0; mu < c.d(); ++mu) c.a.emplace_back(lat, c.k());
  for (int b = 0; b < c.N(); ++b) c.phi.emplace_back(lat, c.k());
  return c;
}

NCConnection scaled_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep, double t) {
  NCConnection c = zero_ncc(std::move(ref), std::move(rep));
  for (int b = 0; b < c.N(); ++b) c.phi[b] = MatrixField::constant(c.ref->lattice_ptr(), t * c.rep->R(b));
  return c;
}

NCConnection random_constant_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                                 std::uint64_t seed, double amplitude, double phi_scale) {
  NCConnection c = zero_ncc(std::move(ref), std::move(rep));
  std::mt19937_64 rng(seed);
  const auto lat = c.ref->lattice_ptr();
  for (int mu = 0; mu < c.d(); ++mu) c.a[mu] = MatrixField::constant(lat, random_antihermitian(rng, c.k(), amplitude));
  for (int b = 0; b < c.N(); ++b)
    c.phi[b] = MatrixField::constant(lat, phi_scale * random_antihermitian(rng, c.k(), amplitude));
  return c;
}

NCConnection random_field_ncc(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                              std::uint64_t seed, double amplitude) {
  NCConnection c = zero_ncc(std::move(ref), std::move(rep));
  std::mt19937_64 rng(seed);
  auto fill = [&](MatrixField& f) {
    for (std::size_t p = 0; p < f.points(); ++p) f.at(p) = random_antihermitian(rng, c.k(), amplitude);
  };
  for (auto& f : c.a) fill(f);
  for (auto& f : c.phi) fill(f);
  return c;
}

MixedForm to_omega(const NCConnection& c) {
  MixedForm w(c.ref, c.rep, 1);
  const int d = c.d();
  for (int mu = 0; mu < d; ++mu) w.set(hkey(mu), c.a[mu]);
  for (int b = 0; b < c.N(); ++b) {
    MatrixField f = c.phi[b];
    const Mat& R = c.rep->R(b);
    for (std::size_t p = 0; p < f.points(); ++p) f.at(p) -= R;
    w.set(vkey(d, b), std::move(f));
  }
  return w;
}

NCConnection from_omega(const MixedForm& w, std::shared_ptr<const OrdinaryConnection> ref) {
  if (w.degree() != 1) throw Error(ErrorCode::degree, "connection forms have degree 1");
  if (w.ref_ptr() != ref) throw Error(ErrorCode::reference_mismatch, "form and requested reference connection differ");
  NCConnection c = zero_ncc(std::move(ref), w.rep_ptr());
  const int d = c.d();
  for (int mu = 0; mu < d; ++mu)
    if (const MatrixField* f = w.find(hkey(mu))) c.a[mu] = *f;
  for (int b = 0; b < c.N(); ++b) {
    const Mat& R = c.rep->R(b);
    if (const MatrixField* f = w.find(vkey(d, b))) c.phi[b] = *f;
    for (std::size_t p = 0; p < c.points(); ++p) c.phi[b].at(p) += R;
  }
  return c;
}

MixedForm nc_curvature(const NCConnection& c) {
  const int d = c.d();
  const int N = c.N();
  const OrdinaryConnection& ref = *c.ref;
  const LieBasis& L = ref.basis();
  const auto RA = rep_potential(c);
  MixedForm W(c.ref, c.rep, 2);
  const std::size_t n = c.points();

  std::vector<std::vector<MatrixField>> da(static_cast<std::size_t>(d));
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) da[mu].push_back(partial_derivative(c.a[nu], mu));

  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu + 1; nu < d; ++nu) {
      MatrixField& o = W.at(hkey(mu) | hkey(nu));
      parallel_for(n, [&](std::size_t p) {
        std::vector<double> f(static_cast<std::size_t>(N));
        for (int e = 0; e < N; ++e) f[e] = ref.F(p, mu, nu, e);
        Mat v = c.rep->image(f);
        for (int e = 0; e < N; ++e) v -= f[e] * c.phi[e].at(p);
        const auto am = c.a[mu].at(p);
        const auto an = c.a[nu].at(p);
        const auto rm = RA[mu].at(p);
        const auto rn = RA[nu].at(p);
        v += da[mu][nu].at(p) + rm * an - an * rm;
        v -= da[nu][mu].at(p) + rn * am - am * rn;
        v += am * an - an * am;
        o.at(p) = v;
      });
    }

  for (int mu = 0; mu < d; ++mu)
    for (int b = 0; b < N; ++b) {
      const MatrixField dphi = partial_derivative(c.phi[b], mu);
      MatrixField& o = W.at(hkey(mu) | vkey(d, b));
      parallel_for(n, [&](std::size_t p) {
        const auto ph = c.phi[b].at(p);
        const auto rm = RA[mu].at(p);
        const auto am = c.a[mu].at(p);
        Mat v = dphi.at(p) + rm * ph - ph * rm + am * ph - ph * am;
        const double* Ap = ref.A_ptr(p, mu);
        for (int e = 0; e < N; ++e) {
          if (Ap[e] == 0.0) continue;
          for (int cc = 0; cc < N; ++cc) {
            const double s = Ap[e] * L.C(e, b, cc);
            if (s != 0.0) v -= s * c.phi[cc].at(p);
          }
        }
        o.at(p) = v;
      });
    }

  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b) {
      MatrixField& o = W.at(vkey(d, a) | vkey(d, b));
      parallel_for(n, [&](std::size_t p) {
        const auto pa = c.phi[a].at(p);
        const auto pb = c.phi[b].at(p);
        Mat v = pa * pb - pb * pa;
        for (int cc = 0; cc < N; ++cc) {
          const double s = L.C(a, b, cc);
          if (s != 0.0) v -= s * c.phi[cc].at(p);
        }
        o.at(p) = v;
      });
    }
  return W;
}

MixedForm nc_curvature_via_forms(const NCConnection& c) {
  const MixedForm w = to_omega(c);
  return differential(w) + wedge(w, w);
}

MatrixField project_unitary(const MatrixField& U, double tol) {
  MatrixField out(U.lattice_ptr(), U.k());
  const Mat I = Mat::Identity(U.k(), U.k());
  for (std::size_t p = 0; p < U.points(); ++p) {
    const Mat u = U.at(p);
    const double dev = (u.adjoint() * u - I).norm();
    if (!(dev <= tol))
      throw Error(ErrorCode::non_unitary, "gauge field is not unitary at point " + std::to_string(p) + " (deviation " +
                                              std::to_string(dev) + ")");
    Eigen::JacobiSVD<Mat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.at(p) = svd.matrixU() * svd.matrixV().adjoint();
  }
  return out;
}

NCConnection gauge_transform(const NCConnection& c, const MatrixField& Uin) {
  if (Uin.k() != c.k() || Uin.lattice_ptr() != c.ref->lattice_ptr())
    throw Error(ErrorCode::shape, "gauge field must be k x k on the connection lattice");
  const MatrixField U = project_unitary(Uin);
  const MixedForm w = to_omega(c);
  const auto RA = rep_potential(c);
  const int d = c.d();
  const std::size_t n = c.points();
  MixedForm wu(c.ref, c.rep, 1);
  for (int mu = 0; mu < d; ++mu) {
    const MatrixField dU = partial_derivative(U, mu);
    const MatrixField& om = *w.find(hkey(mu));
    MatrixField& o = wu.at(hkey(mu));
    parallel_for(n, [&](std::size_t p) {
      const auto u = U.at(p);
      const Mat ui = u.adjoint();
      const auto r = RA[mu].at(p);
      o.at(p) = ui * om.at(p) * u + ui * (dU.at(p) + r * u - u * r);
    });
  }
  for (int b = 0; b < c.N(); ++b) {
    const MatrixField& om = *w.find(vkey(d, b));
    const Mat& R = c.rep->R(b);
    MatrixField& o = wu.at(vkey(d, b));
    parallel_for(n, [&](std::size_t p) {
      const auto u = U.at(p);
      const Mat ui = u.adjoint();
      o.at(p) = ui * om.at(p) * u + ui * (R * u - u * R);
    });
  }
  return from_omega(wu, c.ref);
}

NCConnection infinitesimal_gauge(const NCConnection& c, const MatrixField& gamma) {
  if (gamma.k() != c.k()) throw Error(ErrorCode::shape, "gauge parameter must be k x k");
  const auto RA = rep_potential(c);
  NCConnection t = zero_ncc(c.ref, c.rep);
  const std::size_t n = c.points();
  for (int mu = 0; mu < c.d(); ++mu) {
    const MatrixField dg = partial_derivative(gamma, mu);
    parallel_for(n, [&](std::size_t p) {
      const auto g = gamma.at(p);
      const auto r = RA[mu].at(p);
      const auto am = c.a[mu].at(p);
      t.a[mu].at(p) = dg.at(p) + r * g - g * r + am * g - g * am;
    });
  }
  for (int b = 0; b < c.N(); ++b)
    parallel_for(n, [&](std::size_t p) {
      const auto g = gamma.at(p);
      const auto ph = c.phi[b].at(p);
      t.phi[b].at(p) = ph * g - g * ph;
    });
  return t;
}

MixedForm geometric_gauge_action(const MixedForm& w, const std::vector<std::vector<double>>& gamma) {
  if (static_cast<int>(gamma.size()) != w.N()) throw Error(ErrorCode::shape, "gauge parameter needs N real fields");
  std::vector<std::vector<double>> X(static_cast<std::size_t>(w.D()));
  for (int a = 0; a < w.N(); ++a) X[static_cast<std::size_t>(w.d() + a)] = gamma[static_cast<std::size_t>(a)];
  MixedForm out = interior(differential(w), X);
  if (w.degree() > 0) out += differential(interior(w, X));
  out *= -1.0;
  return out;
}

MixedForm alpha_form(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep) {
  MixedForm w(ref, rep, 1);
  for (int b = 0; b < ref->N(); ++b) w.set(vkey(ref->d(), b), MatrixField::constant(ref->lattice_ptr(), -rep->R(b)));
  return w;
}

double vertical_condition_residual(const MixedForm& alpha) {
  double worst = 0.0;
  for (int mu = 0; mu < alpha.d(); ++mu)
    if (const MatrixField* f = alpha.find(hkey(mu))) worst = std::max(worst, f->max_abs());
  for (int b = 0; b < alpha.N(); ++b) {
    const MatrixField* f = alpha.find(vkey(alpha.d(), b));
    const Mat& R = alpha.rep().R(b);
    for (std::size_t p = 0; p < alpha.ref().lattice().size(); ++p)
      worst = std::max(worst, ((f ? Mat(f->at(p)) : Mat::Zero(R.rows(), R.cols())) + R).norm());
  }
  return worst;
}

RelationDd relation_Dd(const NCConnection& c) {
  const int d = c.d();
  const int N = c.N();
  MixedForm w(c.ref, c.rep, 1);
  for (int mu = 0; mu < d; ++mu) w.set(hkey(mu), c.a[mu]);
  for (int b = 0; b < N; ++b) w.set(vkey(d, b), c.phi[b]);

  RelationDd r{differential(w), covariant_differential(w)};
  const MixedForm alpha = alpha_form(c.ref, c.rep);
  r.rhs -= graded_commutator(alpha, w);

  const LieBasis& L = c.ref->basis();
  const std::size_t n = c.points();
  MixedForm phi_alpha2(c.ref, c.rep, 2);
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b) {
      MatrixField& o = phi_alpha2.at(vkey(d, a) | vkey(d, b));
      for (int e = 0; e < N; ++e)
        if (L.C(a, b, e) != 0.0) o.axpy(L.C(a, b, e), c.phi[e]);
    }
  r.rhs -= phi_alpha2;

  // rho*(nabla phi) o alpha: (nabla_mu, ad_b) -> nabla_mu phi_b
  const auto RA = rep_potential(c);
  MixedForm T(c.ref, c.rep, 2);
  for (int mu = 0; mu < d; ++mu)
    for (int b = 0; b < N; ++b) {
      const MatrixField dphi = partial_derivative(c.phi[b], mu);
      MatrixField& o = T.at(hkey(mu) | vkey(d, b));
      parallel_for(n, [&](std::size_t p) {
        const auto ph = c.phi[b].at(p);
        const auto rm = RA[mu].at(p);
        Mat v = dphi.at(p) + rm * ph - ph * rm;
        const double* Ap = c.ref->A_ptr(p, mu);
        for (int e = 0; e < N; ++e)
          for (int cc = 0; cc < N; ++cc) {
            const double s = Ap[e] * L.C(e, b, cc);
            if (s != 0.0) v -= s * c.phi[cc].at(p);
          }
        o.at(p) = v;
      });
    }
  r.rhs += T;
  return r;
}

}  // namespace ncym
