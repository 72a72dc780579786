#include "ncym/forms.hpp"

#include <bit>
#include <cmath>

namespace ncym {

namespace {

int popcount(Key k) { return std::popcount(k); }

std::vector<int> bits(Key k) {
  std::vector<int> out;
  for (int i = 0; k; ++i, k >>= 1)
    if (k & 1) out.push_back(i);
  return out;
}

// (-1)^{number of pairs (p in P, q in Q) with p > q}: sign of sorting P followed by Q.
int shuffle_sign(Key P, Key Q) {
  int inv = 0;
  for (int q : bits(Q)) inv += popcount(P >> (q + 1));
  return (inv & 1) ? -1 : 1;
}

std::vector<Key> subsets(int D, int r) {
  std::vector<Key> out;
  if (r < 0 || r > D) return out;
  if (r == 0) return {Key{0}};
  Key s = (Key{1} << r) - 1;
  const Key limit = Key{1} << D;
  while (s < limit) {
    out.push_back(s);
    const Key c = s & (~s + 1);
    const Key rr = s + c;
    s = (((rr ^ s) >> 2) / c) | rr;
  }
  return out;
}

void check_compatible(const MixedForm& a, const MixedForm& b) {
  if (a.ref_ptr() != b.ref_ptr()) throw Error(ErrorCode::reference_mismatch, "forms use different reference connections");
  if (a.rep_ptr() != b.rep_ptr() && a.k() != b.k()) throw Error(ErrorCode::shape, "forms take values of different rank");
}

// det of the |S| x |T| submatrix of a row-major n x n matrix.
double minor_det(const double* m, int n, Key S, Key T) {
  const auto r = bits(S);
  const auto c = bits(T);
  const int k = static_cast<int>(r.size());
  if (k == 0) return 1.0;
  if (k == 1) return m[r[0] * n + c[0]];
  if (k == 2) return m[r[0] * n + c[0]] * m[r[1] * n + c[1]] - m[r[0] * n + c[1]] * m[r[1] * n + c[0]];
  RMat sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m[r[i] * n + c[j]];
  return sub.determinant();
}

}  // namespace

MixedForm::MixedForm(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep, int degree)
    : ref_(std::move(ref)), rep_(std::move(rep)), degree_(degree) {
  if (ref_->lattice().dim() + ref_->N() > 63) throw Error(ErrorCode::shape, "too many frame directions for mask storage");
  if (rep_->basis_ptr() != ref_->basis_ptr() && rep_->basis().dim() != ref_->N())
    throw Error(ErrorCode::shape, "representation and reference connection use different algebras");
  if (degree < 0 || degree > d() + N()) throw Error(ErrorCode::degree, "form degree out of range");
}

const MatrixField* MixedForm::find(Key key) const {
  const auto it = comps_.find(key);
  return it == comps_.end() ? nullptr : &it->second;
}

MatrixField& MixedForm::at(Key key) {
  if (popcount(key) != degree_) throw Error(ErrorCode::degree, "component key does not match the form degree");
  auto it = comps_.find(key);
  if (it == comps_.end()) it = comps_.emplace(key, MatrixField(lattice_ptr(), k())).first;
  return it->second;
}

void MixedForm::set(Key key, MatrixField f) {
  if (popcount(key) != degree_) throw Error(ErrorCode::degree, "component key does not match the form degree");
  if (f.k() != k() || f.lattice_ptr() != lattice_ptr()) throw Error(ErrorCode::shape, "component field has wrong shape");
  comps_.insert_or_assign(key, std::move(f));
}

Key MixedForm::key(const std::vector<int>& I, const std::vector<int>& J, int d) {
  Key k = 0;
  for (int i : I) k |= Key{1} << i;
  for (int j : J) k |= Key{1} << (d + j);
  return k;
}

MixedForm& MixedForm::operator+=(const MixedForm& o) {
  check_compatible(*this, o);
  if (o.degree_ != degree_) throw Error(ErrorCode::degree, "adding forms of different degree");
  for (const auto& [k, f] : o.comps_) at(k) += f;
  return *this;
}

MixedForm& MixedForm::operator-=(const MixedForm& o) {
  check_compatible(*this, o);
  if (o.degree_ != degree_) throw Error(ErrorCode::degree, "subtracting forms of different degree");
  for (const auto& [k, f] : o.comps_) at(k) -= f;
  return *this;
}

MixedForm& MixedForm::operator*=(cplx s) {
  for (auto& [k, f] : comps_) f *= s;
  return *this;
}

double MixedForm::max_abs() const {
  double m = 0.0;
  for (const auto& [k, f] : comps_)
    for (std::size_t p = 0; p < f.points(); ++p) m = std::max(m, f.at(p).norm());
  return m;
}

MixedForm operator+(MixedForm a, const MixedForm& b) { return a += b; }
MixedForm operator-(MixedForm a, const MixedForm& b) { return a -= b; }

double max_diff(const MixedForm& a, const MixedForm& b) { return (a - b).max_abs(); }

MixedForm scalar_form(std::shared_ptr<const OrdinaryConnection> ref, std::shared_ptr<const Representation> rep,
                      const MatrixField& m) {
  MixedForm w(std::move(ref), std::move(rep), 0);
  w.set(0, m);
  return w;
}

double frame_structure(const OrdinaryConnection& ref, std::size_t p, int A, int B, int C) {
  const int d = ref.d();
  if (C < d) return 0.0;
  const int c = C - d;
  if (A < d && B < d) return ref.F(p, A, B, c);
  if (A >= d && B >= d) return ref.basis().C(A - d, B - d, c);
  // [nabla_mu, ad_a] = ad_{[A_mu, E_a]}
  const int mu = A < d ? A : B;
  const int a = A < d ? B - d : A - d;
  const double s = A < d ? 1.0 : -1.0;
  double v = 0.0;
  const double* Ap = ref.A_ptr(p, mu);
  for (int e = 0; e < ref.N(); ++e) v += Ap[e] * ref.basis().C(e, a, c);
  return s * v;
}

MixedForm wedge(const MixedForm& a, const MixedForm& b) {
  check_compatible(a, b);
  if (a.degree() + b.degree() > a.D()) return MixedForm(a.ref_ptr(), a.rep_ptr(), a.D());
  MixedForm out(a.ref_ptr(), a.rep_ptr(), a.degree() + b.degree());
  for (const auto& [P, fa] : a.components())
    for (const auto& [Q, fb] : b.components()) {
      if (P & Q) continue;
      const double s = shuffle_sign(P, Q);
      MatrixField& o = out.at(P | Q);
      parallel_for(o.points(), [&](std::size_t p) { o.at(p).noalias() += s * (fa.at(p) * fb.at(p)); });
    }
  return out;
}

MixedForm graded_commutator(const MixedForm& a, const MixedForm& b) {
  MixedForm ab = wedge(a, b);
  MixedForm ba = wedge(b, a);
  const double s = ((a.degree() * b.degree()) & 1) ? -1.0 : 1.0;
  ba *= s;
  return ab - ba;
}

MixedForm differential(const MixedForm& w) {
  const int d = w.d();
  const int D = w.D();
  const int r = w.degree();
  MixedForm out(w.ref_ptr(), w.rep_ptr(), std::min(r + 1, D));
  if (r + 1 > D) return out;
  const OrdinaryConnection& ref = w.ref();
  const Representation& rep = w.rep();
  const auto lat = w.lattice_ptr();
  const int k = w.k();

  // R(A_mu) per point, and partial derivatives of every input component.
  std::vector<MatrixField> RA;
  for (int mu = 0; mu < d; ++mu) {
    MatrixField f(lat, k);
    parallel_for(lat->size(), [&](std::size_t p) {
      f.at(p) = rep.image(std::span<const double>(ref.A_ptr(p, mu), static_cast<std::size_t>(ref.N())));
    });
    RA.push_back(std::move(f));
  }
  std::map<std::pair<Key, int>, MatrixField> dcomp;
  for (const auto& [S, f] : w.components())
    for (int mu = 0; mu < d; ++mu) dcomp.emplace(std::make_pair(S, mu), partial_derivative(f, mu));

  struct DerivTerm {
    int A;
    double sign;
    const MatrixField* val;
    const MatrixField* dval;
  };
  struct StructTerm {
    int A, B, C;
    double sign;
    const MatrixField* val;
  };

  for (Key S : subsets(D, r + 1)) {
    const auto idx = bits(S);
    std::vector<DerivTerm> dt;
    std::vector<StructTerm> st;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const Key sub = S & ~(Key{1} << idx[i]);
      const MatrixField* v = w.find(sub);
      if (!v) continue;
      const double s = (i & 1) ? -1.0 : 1.0;
      const MatrixField* dv = idx[i] < d ? &dcomp.at({sub, idx[i]}) : nullptr;
      dt.push_back({idx[i], s, v, dv});
    }
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        const Key rest = S & ~(Key{1} << idx[i]) & ~(Key{1} << idx[j]);
        const double s = ((i + j) & 1) ? -1.0 : 1.0;
        for (int C = d; C < D; ++C) {
          if (rest & (Key{1} << C)) continue;
          const Key target = rest | (Key{1} << C);
          const MatrixField* v = w.find(target);
          if (!v) continue;
          const double s2 = (popcount(rest & ((Key{1} << C) - 1)) & 1) ? -1.0 : 1.0;
          st.push_back({idx[i], idx[j], C, s * s2, v});
        }
      }
    if (dt.empty() && st.empty()) continue;
    MatrixField& o = out.at(S);
    parallel_for(lat->size(), [&](std::size_t p) {
      auto op = o.at(p);
      for (const auto& t : dt) {
        const auto m = t.val->at(p);
        if (t.A < d) {
          const auto ra = RA[t.A].at(p);
          op += t.sign * (t.dval->at(p) + ra * m - m * ra);
        } else {
          const Mat& Ra = rep.R(t.A - d);
          op += t.sign * (Ra * m - m * Ra);
        }
      }
      for (const auto& t : st) {
        const double f = frame_structure(ref, p, t.A, t.B, t.C);
        if (f != 0.0) op += t.sign * f * t.val->at(p);
      }
    });
  }
  return out;
}

MixedForm covariant_differential(const MixedForm& w) {
  MixedForm full = differential(w);
  MixedForm out(w.ref_ptr(), w.rep_ptr(), full.degree());
  for (const auto& [S, f] : full.components())
    if ((S & full.vertical_mask()) == 0) out.set(S, f);
  return out;
}

MixedForm dagger(const MixedForm& w) {
  MixedForm out(w.ref_ptr(), w.rep_ptr(), w.degree());
  for (const auto& [S, f] : w.components()) {
    MatrixField g(f.lattice_ptr(), f.k());
    for (std::size_t p = 0; p < f.points(); ++p) g.at(p) = f.at(p).adjoint();
    out.set(S, std::move(g));
  }
  return out;
}

MixedForm interior(const MixedForm& w, const std::vector<std::vector<double>>& c) {
  const int D = w.D();
  if (static_cast<int>(c.size()) != D) throw Error(ErrorCode::shape, "interior product needs one coefficient field per frame slot");
  if (w.degree() == 0) return MixedForm(w.ref_ptr(), w.rep_ptr(), 0);
  MixedForm out(w.ref_ptr(), w.rep_ptr(), w.degree() - 1);
  for (const auto& [T, f] : w.components()) {
    // (i_X w)_S = sum_A c^A w(X_A, X_S): T = S + {A}
    for (int A : bits(T)) {
      const std::vector<double>& cA = c[static_cast<std::size_t>(A)];
      if (cA.empty()) continue;
      const Key S = T & ~(Key{1} << A);
      const double s = (popcount(S & ((Key{1} << A) - 1)) & 1) ? -1.0 : 1.0;
      MatrixField& o = out.at(S);
      parallel_for(f.points(), [&](std::size_t p) { o.at(p) += (s * cA[p]) * f.at(p); });
    }
  }
  return out;
}

MixedForm hodge_star(const MixedForm& w, const RiemannianStructure& riem) {
  if (riem.conn != w.ref_ptr()) throw Error(ErrorCode::reference_mismatch, "metric and form use different reference connections");
  const int d = w.d();
  const int N = w.N();
  const int D = d + N;
  const Key H = w.horizontal_mask();
  MixedForm out(w.ref_ptr(), w.rep_ptr(), D - w.degree());
  const auto lat = w.lattice_ptr();
  for (const auto& [S, f] : w.components()) {
    const Key I = S & H;
    const Key J = (S >> d);
    const int nI = popcount(I);
    const int nJ = popcount(J);
    for (Key Kc : subsets(d, nI))
      for (Key Lc : subsets(N, nJ)) {
        const Key K = H & ~Kc;
        const Key L = ((Key{1} << N) - 1) & ~Lc;
        const double sgn = ((nJ * popcount(K)) & 1 ? -1.0 : 1.0) * shuffle_sign(Kc, K) * shuffle_sign(Lc, L);
        std::vector<double> coef(lat->size());
        bool any = false;
        for (std::size_t p = 0; p < lat->size(); ++p) {
          const double c = sgn * riem.base.sqrt_det[p] * riem.sqrt_det_int[p] *
                           minor_det(riem.h_base.data() + p * d * d, d, I, Kc) *
                           minor_det(riem.h_int.data() + p * N * N, N, J, Lc);
          coef[p] = c;
          any = any || c != 0.0;
        }
        if (!any) continue;
        MatrixField& o = out.at(K | (L << d));
        parallel_for(lat->size(), [&](std::size_t p) {
          if (coef[p] != 0.0) o.at(p) += coef[p] * f.at(p);
        });
      }
  }
  return out;
}

MixedForm hodge_star_inverse(const MixedForm& w, const RiemannianStructure& riem) {
  MixedForm out = hodge_star(w, riem);
  const int s = w.degree();
  if ((s * (w.D() - s)) & 1) out *= -1.0;
  return out;
}

MatrixField metric_pairing(const MixedForm& w, const MixedForm& v, const RiemannianStructure& riem) {
  check_compatible(w, v);
  MatrixField out(w.lattice_ptr(), w.k());
  if (w.degree() != v.degree()) return out;
  const int d = w.d();
  const int N = w.N();
  const Key H = w.horizontal_mask();
  for (const auto& [S, fw] : w.components())
    for (const auto& [T, fv] : v.components()) {
      if (popcount(S & H) != popcount(T & H)) continue;
      parallel_for(out.points(), [&](std::size_t p) {
        const double c = minor_det(riem.h_base.data() + p * d * d, d, S & H, T & H) *
                         minor_det(riem.h_int.data() + p * N * N, N, S >> d, T >> d);
        if (c != 0.0) out.at(p).noalias() += c * (fw.at(p) * fv.at(p));
      });
    }
  return out;
}

BaseForm fiber_integrate(const MixedForm& w, const RiemannianStructure& riem) {
  BaseForm out;
  out.degree = w.degree() - w.N();
  const Key V = w.vertical_mask();
  for (const auto& [S, f] : w.components()) {
    if ((S & V) != V) continue;
    std::vector<cplx> vals(f.points());
    for (std::size_t p = 0; p < f.points(); ++p) vals[p] = riem.sqrt_det_int[p] * f.at(p).trace();
    out.comps.emplace(S & w.horizontal_mask(), std::move(vals));
  }
  return out;
}

cplx total_integral(const MixedForm& w, const Manifold& man, const RiemannianStructure& riem) {
  if (w.degree() != w.D()) return 0.0;
  const BaseForm b = fiber_integrate(w, riem);
  const auto it = b.comps.find(w.horizontal_mask());
  if (it == b.comps.end()) return 0.0;
  const Lattice& lat = *man.lattice;
  std::vector<cplx> vals(lat.size());
  for (int c = 0; c < lat.num_charts(); ++c) {
    const double cv = lat.cell_volume(c);
    for (std::size_t p = lat.chart_begin(c); p < lat.chart_end(c); ++p) vals[p] = man.weights[p] * cv * it->second[p];
  }
  return pairwise_sum(vals);
}

cplx scalar_product(const MixedForm& w, const MixedForm& v, const Manifold& man, const RiemannianStructure& riem) {
  if (w.degree() != v.degree()) return 0.0;
  return total_integral(wedge(dagger(w), hodge_star(v, riem)), man, riem);
}

nlohmann::json form_to_json(const MixedForm& w) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& [S, f] : w.components()) {
    std::vector<int> I, J;
    for (int b : bits(S)) (b < w.d() ? I : J).push_back(b < w.d() ? b : b - w.d());
    nlohmann::json jf = field_to_json(f);
    jf.erase("lattice");
    comps.push_back({{"horizontal", I}, {"vertical", J}, {"field", jf}});
  }
  return {{"degree", w.degree()}, {"d", w.d()}, {"N", w.N()}, {"k", w.k()}, {"lattice", lattice_to_json(w.ref().lattice())},
          {"components", comps}};
}

}  // namespace ncym
