#include "ncym/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace ncym {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::validation, (path.empty() ? std::string("config") : path) + ": " + msg);
}

// Reads one JSON object, records every resolved value and rejects unknown keys.
class Section {
 public:
  Section(const json& in, std::string path) : in_(in), path_(std::move(path)) {
    if (!in_.is_object()) invalid(path_, "expected an object");
  }

  double number(const char* key, double def, double lo, double hi) {
    double v = def;
    if (const json* j = take(key)) {
      if (!j->is_number()) invalid(at(key), "expected a number");
      v = j->get<double>();
    }
    if (!std::isfinite(v) || v < lo || v > hi) invalid(at(key), "value " + fmt(v) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
    out_[key] = v;
    return v;
  }

  long long integer(const char* key, long long def, long long lo, long long hi) {
    long long v = def;
    if (const json* j = take(key)) {
      if (!j->is_number_integer()) invalid(at(key), "expected an integer");
      v = j->get<long long>();
    }
    if (v < lo || v > hi) invalid(at(key), "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out_[key] = v;
    return v;
  }

  std::string choice(const char* key, const std::string& def, std::initializer_list<const char*> options) {
    std::string v = def;
    if (const json* j = take(key)) {
      if (!j->is_string()) invalid(at(key), "expected a string");
      v = j->get<std::string>();
    } else if (def.empty()) {
      invalid(at(key), "required");
    }
    bool ok = false;
    std::string list;
    for (const char* o : options) {
      ok = ok || v == o;
      list += (list.empty() ? "" : ", ") + std::string(o);
    }
    if (!ok) invalid(at(key), "'" + v + "' is not one of {" + list + "}");
    out_[key] = v;
    return v;
  }

  std::string text(const char* key, const std::string& def) {
    std::string v = def;
    if (const json* j = take(key)) {
      if (!j->is_string()) invalid(at(key), "expected a string");
      v = j->get<std::string>();
    }
    out_[key] = v;
    return v;
  }

  bool flag(const char* key, bool def) {
    bool v = def;
    if (const json* j = take(key)) {
      if (!j->is_boolean()) invalid(at(key), "expected true or false");
      v = j->get<bool>();
    }
    out_[key] = v;
    return v;
  }

  /// Raw value, copied to the output unchanged; nullptr when absent.
  const json* raw(const char* key) {
    const json* j = take(key);
    if (j) out_[key] = *j;
    return j;
  }

  void put(const char* key, json v) {
    seen_.insert(key);
    out_[key] = std::move(v);
  }
  bool has(const char* key) const { return in_.contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  json finish() {
    for (const auto& [k, v] : in_.items())
      if (!seen_.count(k)) invalid(at(k), "unknown key");
    return out_;
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = in_.find(key);
    return it == in_.end() || it->is_null() ? nullptr : &*it;
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  const json& in_;
  std::string path_;
  std::set<std::string> seen_;
  json out_ = json::object();
};

const json& member(const json& cfg, const char* key) {
  static const json empty = json::object();
  const auto it = cfg.find(key);
  return it == cfg.end() || it->is_null() ? empty : *it;
}

json resolve_rep(const json& in, const std::string& path) {
  Section s(in, path);
  const std::string kind = s.choice("kind", "fundamental", {"trivial", "fundamental", "adjoint", "spin", "direct-sum"});
  if (kind == "trivial") s.integer("dim", 1, 1, 64);
  if (kind == "spin") {
    const double j = s.number("spin", 0.5, 0.0, 16.0);
    if (std::abs(2.0 * j - std::round(2.0 * j)) > 1e-12) invalid(s.at("spin"), "must be a multiple of 1/2");
  }
  if (kind == "direct-sum") {
    const json* parts = s.raw("parts");
    if (!parts || !parts->is_array() || parts->empty()) invalid(s.at("parts"), "expected a nonempty array");
    json resolved = json::array();
    for (std::size_t i = 0; i < parts->size(); ++i) resolved.push_back(resolve_rep((*parts)[i], s.at("parts[" + std::to_string(i) + "]")));
    s.put("parts", resolved);
  }
  return s.finish();
}

RepSpec rep_spec(const json& r) {
  RepSpec spec;
  const std::string kind = r.at("kind");
  if (kind == "trivial") {
    spec.kind = RepKind::trivial;
    spec.trivial_dim = r.at("dim").get<int>();
  } else if (kind == "fundamental") {
    spec.kind = RepKind::fundamental;
  } else if (kind == "adjoint") {
    spec.kind = RepKind::adjoint;
  } else if (kind == "spin") {
    spec.kind = RepKind::spin;
    spec.spin = r.at("spin").get<double>();
  } else {
    spec.kind = RepKind::direct_sum;
    for (const json& p : r.at("parts")) spec.parts.push_back(rep_spec(p));
  }
  return spec;
}

std::string indexed_name(const std::string& name, int i, int count) {
  if (count <= 1) return name;
  const auto dot = name.rfind('.');
  const std::string tag = "_" + std::to_string(i);
  return dot == std::string::npos ? name + tag : name.substr(0, dot) + tag + name.substr(dot);
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json resolve_config(const json& config) {
  Section top(config, "");
  const std::string task =
      top.choice("task", "", {"eval", "solve", "classify", "chern", "lc-check", "geom-check", "selfcheck", "slice"});
  const long long seed = top.integer("seed", 0, 0, (1LL << 53));
  top.text("name", "");

  // manifold
  Section m(member(config, "manifold"), "manifold");
  const std::string kind = m.choice("kind", "torus", {"torus", "sphere"});
  const int dim = static_cast<int>(m.integer("dim", kind == "torus" ? 2 : 4, 1, 6));
  m.integer("N", 16, 4, 512);
  if (m.integer("fd_order", 2, 2, 4) == 3) invalid("manifold.fd_order", "must be 2 or 4");
  std::string bundle = "trivial";
  if (kind == "torus") {
    m.number("length", 1.0, 1e-6, 1e6);
  } else {
    if (dim != 2 && dim != 4) invalid("manifold.dim", "two-chart spheres exist for dim 2 and 4");
    m.integer("N", 16, 8, 512);
    m.number("radius", 1.0, 1e-6, 1e6);
    bundle = m.choice("bundle", "trivial", {"trivial", "instanton"});
    if (bundle == "instanton" && dim != 4) invalid("manifold.bundle", "the instanton bundle needs dim 4");
  }
  top.put("manifold", m.finish());

  // structure algebra and internal metric
  Section al(member(config, "algebra"), "algebra");
  const int n = static_cast<int>(al.integer("n", 2, 2, 6));
  if (bundle == "instanton" && n != 2) invalid("algebra.n", "the instanton bundle needs su(2)");
  Section im(member(member(config, "algebra"), "internal_metric"), "algebra.internal_metric");
  const std::string ik = im.choice("kind", "delta", {"delta", "killing", "smooth", "matrix"});
  im.number("scale", 1.0, 1e-6, 1e6);
  if (ik == "smooth") {
    if (kind != "torus") invalid("algebra.internal_metric.kind", "smooth internal metrics need a torus");
    im.number("amplitude", 0.15, 0.0, 10.0);
    im.integer("seed", seed + 3, 0, (1LL << 53));
  }
  if (ik == "matrix") {
    const json* v = im.raw("values");
    const std::size_t N = static_cast<std::size_t>(n * n - 1);
    if (!v || !v->is_array() || v->size() != N) invalid("algebra.internal_metric.values", "expected an " + std::to_string(N) + "x" + std::to_string(N) + " array");
    for (const json& row : *v) {
      if (!row.is_array() || row.size() != N) invalid("algebra.internal_metric.values", "rows must have " + std::to_string(N) + " numbers");
      for (const json& x : row)
        if (!x.is_number()) invalid("algebra.internal_metric.values", "entries must be numbers");
    }
  }
  al.put("internal_metric", im.finish());
  top.put("algebra", al.finish());

  // base metric
  Section bm(member(config, "base_metric"), "base_metric");
  const std::string bk = bm.choice("kind", "standard", {"standard", "smooth"});
  if (bk == "smooth") {
    if (kind != "torus") invalid("base_metric.kind", "smooth base metrics need a torus");
    bm.number("amplitude", 0.15, 0.0, 10.0);
    bm.integer("seed", seed + 2, 0, (1LL << 53));
  }
  top.put("base_metric", bm.finish());

  // reference connection
  Section cn(member(config, "connection"), "connection");
  const std::string ck = cn.choice("kind", bundle == "instanton" ? "bpst" : "zero", {"zero", "constant", "random", "bpst"});
  if (ck == "bpst") {
    if (bundle != "instanton") invalid("connection.kind", "bpst needs the instanton bundle on a 4-sphere");
    cn.number("rho", 1.0, 1e-3, 1e3);
  } else if (bundle == "instanton") {
    invalid("connection.kind", "the instanton bundle needs the bpst connection");
  }
  if (ck == "random") {
    if (kind != "torus") invalid("connection.kind", "random connections need a torus");
    cn.number("amplitude", 0.5, 0.0, 100.0);
    cn.integer("seed", seed + 1, 0, (1LL << 53));
  }
  if (ck == "constant") {
    if (kind != "torus") invalid("connection.kind", "constant connections need a torus");
    const json* v = cn.raw("values");
    const std::size_t want = static_cast<std::size_t>(dim * (n * n - 1));
    if (!v || !v->is_array() || v->size() != want) invalid("connection.values", "expected " + std::to_string(want) + " numbers (dim x (n^2-1))");
    for (const json& x : *v)
      if (!x.is_number()) invalid("connection.values", "entries must be numbers");
  }
  top.put("connection", cn.finish());

  const json rep = resolve_rep(member(config, "representation"), "representation");
  if (n != 2) {
    std::function<void(const json&)> check = [&](const json& r) {
      if (r.at("kind") == "spin") invalid("representation.kind", "spin representations need su(2)");
      if (r.at("kind") == "direct-sum")
        for (const json& p : r.at("parts")) check(p);
    };
    check(rep);
  }
  top.put("representation", rep);

  // initial condition
  Section in(member(config, "initial"), "initial");
  const std::string ink = in.choice("kind", "canonical", {"canonical", "zero", "scaled", "random-constant", "random-field"});
  if (ink == "scaled") in.number("t", 1.0, -1e3, 1e3);
  if (ink == "random-constant" || ink == "random-field") {
    in.number("amplitude", 0.5, 0.0, 100.0);
    in.integer("seed", seed, 0, (1LL << 53));
    if (ink == "random-constant") in.number("phi_scale", 1.0, 0.0, 100.0);
  }
  in.integer("restarts", 1, 1, 1000);
  if (ink != "random-constant" && ink != "random-field" && member(config, "initial").contains("restarts") &&
      member(config, "initial")["restarts"] != 1)
    invalid("initial.restarts", "restarts need a random initial condition");
  top.put("initial", in.finish());

  const SolverOptions so;
  Section op(member(config, "optimizer"), "optimizer");
  op.integer("max_iter", so.max_iter, 0, 10000000);
  op.number("grad_tol", so.grad_tol, 0.0, 1e6);
  op.number("initial_step", so.initial_step, 1e-12, 1e6);
  op.number("max_step", so.max_step, 1e-12, 1e9);
  op.number("armijo", so.armijo, 0.0, 0.5);
  op.number("shrink", so.shrink, 1e-3, 0.999);
  op.number("grow", so.grow, 1.0, 100.0);
  op.number("momentum", so.momentum, 0.0, 0.999);
  op.integer("max_backtracks", so.max_backtracks, 1, 1000);
  op.flag("project_antihermitian", so.project_antihermitian);
  top.put("optimizer", op.finish());

  const ClassifyOptions co;
  Section cl(member(config, "classify"), "classify");
  cl.number("residual_tol", co.residual_tol, 0.0, 1.0);
  cl.number("spectrum_tol", co.spectrum_tol, 0.0, 1.0);
  top.put("classify", cl.finish());

  Section ch(member(config, "chern"), "chern");
  const int q = static_cast<int>(ch.integer("q", std::max(1, dim / 2), 1, 3));
  if (task == "chern" && 2 * q > dim) invalid("chern.q", "degree 2q exceeds the dimension");
  ch.flag("refine", false);
  ch.integer("profile_bins", 12, 1, 10000);
  top.put("chern", ch.finish());

  Section sl(member(config, "slice"), "slice");
  const double t_min = sl.number("t_min", -0.5, -1e3, 1e3);
  sl.number("t_max", 1.5, t_min + 1e-9, 1e3);
  sl.integer("samples", 81, 3, 100000);
  sl.number("tol", 1e-10, 1e-15, 1.0);
  top.put("slice", sl.finish());

  Section pr(member(config, "probe"), "probe");
  pr.integer("directions", 0, 0, 10000);
  pr.number("eps", 1e-4, 1e-10, 1.0);
  top.put("probe", pr.finish());

  Section sc(member(config, "selfcheck"), "selfcheck");
  sc.choice("filter", "all", {"all", "lie_core", "geometry", "metric", "nc_forms", "connections", "yang_mills", "levi_civita", "chern_weil"});
  top.put("selfcheck", sc.finish());

  Section out(member(config, "output"), "output");
  out.text("report", "report.json");
  out.text("trace", "trace.csv");
  out.flag("snapshot", task == "solve");
  out.flag("density_slice", task == "eval" || task == "solve");
  top.put("output", out.finish());

  return top.finish();
}

Problem build_problem(const json& r) { return build_problem(r, r.at("manifold").at("N").get<int>()); }

Problem build_problem(const json& r, int N) {
  const json& m = r.at("manifold");
  const int dim = m.at("dim");
  const int fd = m.at("fd_order");
  Problem pb;
  if (m.at("kind") == "torus")
    pb.geo = build_torus(dim, N, m.at("length").get<double>(), fd);
  else
    pb.geo = build_sphere_two_charts(dim, N, m.at("radius").get<double>(), m.at("bundle").get<std::string>(), fd);
  const Manifold& man = pb.geo.manifold;

  const json& al = r.at("algebra");
  const int n = al.at("n");
  const json& im = al.at("internal_metric");
  const std::string ik = im.at("kind");
  const double scale = im.at("scale");
  auto base = build_su(n);
  const int Nalg = base->dim();
  RMat gconst = RMat::Identity(Nalg, Nalg);
  if (ik == "killing") gconst = -killing_metric(*base);
  if (ik == "matrix")
    for (int i = 0; i < Nalg; ++i)
      for (int j = 0; j < Nalg; ++j) gconst(i, j) = im.at("values")[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  gconst *= scale;
  pb.basis = ik == "delta" && scale == 1.0 ? base : with_internal_metric(*base, gconst);

  BaseMetric gM = pb.geo.metric;
  const json& bm = r.at("base_metric");
  if (bm.at("kind") == "smooth") gM = smooth_base_metric(man, bm.at("seed").get<std::uint64_t>(), bm.at("amplitude").get<double>());

  const json& cn = r.at("connection");
  const std::string ck = cn.at("kind");
  if (ck == "zero")
    pb.conn = zero_connection(man.lattice, pb.basis);
  else if (ck == "constant")
    pb.conn = constant_connection(man, pb.basis, cn.at("values").get<std::vector<double>>());
  else if (ck == "random")
    pb.conn = random_connection(man, pb.basis, cn.at("seed").get<std::uint64_t>(), cn.at("amplitude").get<double>());
  else
    pb.conn = bpst_connection(man, pb.basis, cn.at("rho").get<double>());

  if (ik == "smooth") {
    std::vector<double> g = smooth_internal_metric(man, Nalg, im.at("seed").get<std::uint64_t>(), im.at("amplitude").get<double>());
    for (double& v : g) v *= scale;
    pb.riem = assemble(gM, std::move(g), pb.conn);
  } else {
    pb.riem = assemble_constant(gM, gconst, pb.conn);
  }
  pb.rep = build_representation(pb.basis, rep_spec(r.at("representation")));
  return pb;
}

NCConnection initial_condition(const Problem& pb, const json& r, int restart) {
  const json& in = r.at("initial");
  const std::string k = in.at("kind");
  if (k == "canonical") return scaled_ncc(pb.conn, pb.rep, 1.0);
  if (k == "zero") return zero_ncc(pb.conn, pb.rep);
  if (k == "scaled") return scaled_ncc(pb.conn, pb.rep, in.at("t").get<double>());
  const std::uint64_t seed = in.at("seed").get<std::uint64_t>() + static_cast<std::uint64_t>(restart);
  if (k == "random-constant")
    return random_constant_ncc(pb.conn, pb.rep, seed, in.at("amplitude").get<double>(), in.at("phi_scale").get<double>());
  return random_field_ncc(pb.conn, pb.rep, seed, in.at("amplitude").get<double>());
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string s = "iteration,S,grad_norm,step\n";
  for (const TraceRow& t : trace)
    s += std::to_string(t.iteration) + "," + csv_number(t.action) + "," + csv_number(t.grad_norm) + "," + csv_number(t.step) + "\n";
  return s;
}

namespace {

SolverOptions solver_options(const json& o) {
  SolverOptions s;
  s.max_iter = o.at("max_iter");
  s.grad_tol = o.at("grad_tol");
  s.initial_step = o.at("initial_step");
  s.max_step = o.at("max_step");
  s.armijo = o.at("armijo");
  s.shrink = o.at("shrink");
  s.grow = o.at("grow");
  s.momentum = o.at("momentum");
  s.max_backtracks = o.at("max_backtracks");
  s.project_antihermitian = o.at("project_antihermitian");
  return s;
}

ClassifyOptions classify_options(const json& o) {
  ClassifyOptions c;
  c.residual_tol = o.at("residual_tol");
  c.spectrum_tol = o.at("spectrum_tol");
  return c;
}

json trace_json(const std::vector<TraceRow>& trace) {
  json it = json::array(), S = json::array(), g = json::array(), st = json::array();
  for (const TraceRow& t : trace) {
    it.push_back(t.iteration);
    S.push_back(t.action);
    g.push_back(t.grad_norm);
    st.push_back(t.step);
  }
  return {{"iteration", it}, {"S", S}, {"grad_norm", g}, {"step", st}};
}

json snapshot_json(const NCConnection& c) {
  json a = json::array(), phi = json::array();
  for (const MatrixField& f : c.a) a.push_back(field_to_json(f));
  for (const MatrixField& f : c.phi) phi.push_back(field_to_json(f));
  return {{"lattice", lattice_to_json(c.ref->lattice())}, {"representation", c.rep->kind()}, {"a", a}, {"phi", phi}};
}

// Action density on the plane of the first two axes of chart 0, other axes at their middle index.
std::string density_slice_csv(const Lattice& lat, const std::vector<double>& density) {
  const ChartGrid& g = lat.chart(0);
  const int d = g.d;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = g.shape[static_cast<std::size_t>(i)] / 2;
  const auto strides = g.strides();
  std::string s = d >= 2 ? "x0,x1,density\n" : "x0,density\n";
  const int n0 = g.shape[0], n1 = d >= 2 ? g.shape[1] : 1;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      idx[0] = i;
      if (d >= 2) idx[1] = j;
      std::size_t local = 0;
      for (int k = 0; k < d; ++k) local += static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]) * strides[static_cast<std::size_t>(k)];
      const std::size_t p = lat.chart_begin(0) + local;
      lat.coords(p, x.data());
      s += csv_number(x[0]) + ",";
      if (d >= 2) s += csv_number(x[1]) + ",";
      s += csv_number(density[p]) + "\n";
    }
  return s;
}

double sphere_area(int d, double r) { return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1)) * std::pow(r, d); }

json run_task(const json& r, RunOutcome& out) {
  const std::string task = r.at("task");
  const json& o = r.at("output");

  if (task == "selfcheck") {
    const std::string f = r.at("selfcheck").at("filter");
    const auto rows = run_selfcheck(f == "all" ? "" : f);
    bool all = true;
    for (const CheckRow& row : rows) all = all && row.passed;
    if (!all) out.exit_code = exit_error;
    return {{"checks", to_json(rows)}, {"all_passed", all}};
  }

  const Problem pb = build_problem(r);
  const Manifold& man = pb.geo.manifold;
  const RiemannianStructure& riem = *pb.riem;
  const ClassifyOptions copts = classify_options(r.at("classify"));

  if (task == "eval") {
    const NCConnection c = initial_condition(pb, r);
    const VacuumReport rep = make_report(c, man, riem, copts);
    json res = to_json(rep);
    res["action_via_cycle"] = action_via_cycle(c, man, riem);
    if (o.at("density_slice")) out.files["density_slice.csv"] = density_slice_csv(*man.lattice, rep.action.density);
    return res;
  }

  if (task == "solve") {
    const SolverOptions so = solver_options(r.at("optimizer"));
    const int restarts = r.at("initial").at("restarts");
    const int probe_dirs = r.at("probe").at("directions");
    json runs = json::array();
    std::map<std::string, int> classes;
    int converged = 0;
    for (int i = 0; i < restarts; ++i) {
      const SolveResult sr = solve_vacuum(initial_condition(pb, r, i), man, riem, so, copts);
      json run = to_json(sr.report);
      if (r.at("initial").contains("seed")) run["seed"] = r.at("initial").at("seed").get<std::uint64_t>() + static_cast<std::uint64_t>(i);
      run["trace"] = trace_json(sr.trace);
      if (probe_dirs > 0) {
        const SecondOrderProbe sp = second_order_probe(sr.state, man, riem, probe_dirs, 1000 + static_cast<std::uint64_t>(i),
                                                       r.at("probe").at("eps").get<double>());
        run["second_order"] = {{"min_curvature", sp.min_curvature}, {"max_curvature", sp.max_curvature}, {"directions", sp.directions}};
      }
      runs.push_back(run);
      converged += sr.report.converged;
      ++classes[sr.report.classified ? sr.report.classification.label : "unclassified"];
      out.files[indexed_name(o.at("trace").get<std::string>(), i, restarts)] = trace_csv(sr.trace);
      if (o.at("snapshot")) out.files[indexed_name("state.json", i, restarts)] = snapshot_json(sr.state).dump(1);
      if (o.at("density_slice"))
        out.files[indexed_name("density_slice.csv", i, restarts)] = density_slice_csv(*man.lattice, sr.report.action.density);
    }
    if (converged < restarts) out.exit_code = exit_nonconvergence;
    return {{"runs", runs}, {"summary", {{"restarts", restarts}, {"converged", converged}, {"classes", classes}}}};
  }

  if (task == "classify") {
    const NCConnection c = initial_condition(pb, r);
    return {{"classification", to_json(classify_vacuum(c, riem, copts))}};
  }

  if (task == "slice") {
    const json& s = r.at("slice");
    const PotentialSlice ps = potential_slice(pb.conn, pb.rep, man, riem, s.at("t_min"), s.at("t_max"), s.at("samples"), s.at("tol"));
    std::string csv = "t,S\n";
    for (std::size_t i = 0; i < ps.t.size(); ++i) csv += csv_number(ps.t[i]) + "," + csv_number(ps.S[i]) + "\n";
    out.files["slice.csv"] = csv;
    return {{"t", ps.t}, {"S", ps.S}, {"minima", ps.minima}};
  }

  if (task == "chern") {
    const json& ch = r.at("chern");
    const int q = ch.at("q");
    json res;
    if (2 * q < man.lattice->dim()) {
      res["q"] = q;
      res["closedness_residual"] = closedness_residual(chern_form(*pb.conn, q));
      res["grid"] = man.lattice->chart(0).shape[0];
      return res;
    }
    ChernNumber cnum;
    if (ch.at("refine")) {
      const ChernProblem build = [&r](int N) {
        Problem p = build_problem(r, N);
        return std::make_pair(p.geo.manifold, p.conn);
      };
      cnum = chern_number_refined(build, r.at("manifold").at("N"), q);
    } else {
      cnum = chern_number(*pb.conn, q, man);
    }
    res = to_json(cnum);
    if (man.kind == "sphere") {
      const ChernForm cf = chern_form(*pb.conn, q);
      const RadialProfile prof = radial_profile(cf, man, 0, ch.at("profile_bins"), 2.0 * man.radius);
      res["profile"] = {{"r", prof.r}, {"density", prof.density}, {"count", prof.count}};
      std::string csv = "r,density,count\n";
      for (std::size_t i = 0; i < prof.r.size(); ++i)
        csv += csv_number(prof.r[i]) + "," + csv_number(prof.density[i]) + "," + std::to_string(prof.count[i]) + "\n";
      out.files["profile.csv"] = csv;
    }
    return res;
  }

  if (task == "lc-check") {
    json res = to_json(lc_check(riem));
    res["gamma_d_mu_nu_asserted_zero"] = true;
    return res;
  }

  // geom-check
  json res;
  const std::vector<double> ones(man.lattice->size(), 1.0);
  const double vol = integrate(man, riem.base, ones);
  double exact = 1.0;
  if (man.kind == "torus")
    for (double L : man.lengths) exact *= L;
  else
    exact = sphere_area(man.lattice->dim(), man.radius);
  res["volume"] = vol;
  res["volume_exact"] = r.at("base_metric").at("kind") == "standard" ? json(exact) : json(nullptr);
  const InverseIdentities ii = invert(riem);
  res["inverse_identities"] = {{"h_int", ii.h_int}, {"A_from_h", ii.A_from_h}, {"g_base", ii.g_base}, {"brute_force", ii.brute_force}, {"product", ii.product}};
  double round_trip = 0.0, ortho = 0.0;
  for (std::size_t p = 0; p < man.lattice->size(); ++p) {
    const RMat gB = riem.g_B(p);
    const MetricBlocks mb = extract_block(gB, riem.d());
    round_trip = std::max({round_trip, (mb.gM - riem.gM(p)).cwiseAbs().maxCoeff(), (mb.g_int - riem.gInt(p)).cwiseAbs().maxCoeff(),
                           (mb.A - riem.A(p)).cwiseAbs().maxCoeff()});
    ortho = std::max(ortho, orthogonality_residual(gB, mb.A));
  }
  res["round_trip"] = round_trip;
  res["orthogonality"] = ortho;
  if (!man.overlaps.empty()) res["overlap_curvature_residual"] = overlap_curvature_residual(*pb.conn, man);
  return res;
}

}  // namespace

RunOutcome run_experiment(const json& config) {
  RunOutcome out;
  json resolved;
  try {
    resolved = resolve_config(config);
  } catch (const Error& e) {
    out.exit_code = exit_validation;
    out.report = {{"config", config}, {"status", "validation_error"}, {"error", e.what()}};
    return out;
  }
  out.report = {{"config", resolved}, {"task", resolved.at("task")}};
  try {
    out.report["result"] = run_task(resolved, out);
    out.report["status"] = out.exit_code == exit_ok ? "ok" : out.exit_code == exit_nonconvergence ? "not_converged" : "failed";
  } catch (const Error& e) {
    const bool config_level = e.code() == ErrorCode::validation || e.code() == ErrorCode::unsupported_dim ||
                              e.code() == ErrorCode::unsupported_rep || e.code() == ErrorCode::invalid_rank ||
                              e.code() == ErrorCode::not_spd || e.code() == ErrorCode::degree;
    out.exit_code = config_level ? exit_validation : exit_error;
    out.report["status"] = config_level ? "validation_error" : "error";
    out.report["error"] = e.what();
    out.report["error_code"] = error_code_name(e.code());
    out.files.clear();
  }
  out.files[resolved.at("output").at("report").get<std::string>()] = out.report.dump(2) + "\n";
  return out;
}

std::string plot_csv(const json& report, const std::string& kind) {
  const auto missing = [&]() -> std::string { throw Error(ErrorCode::missing_artifact, "report has no " + kind + " data"); };
  if (!report.contains("result")) return missing();
  const json& res = report.at("result");
  std::string s;
  if (kind == "trace") {
    if (!res.contains("runs") || res.at("runs").empty()) return missing();
    s = "run,iteration,S,grad_norm,step\n";
    int i = 0;
    for (const json& run : res.at("runs")) {
      const json& t = run.at("trace");
      for (std::size_t k = 0; k < t.at("iteration").size(); ++k)
        s += std::to_string(i) + "," + std::to_string(t.at("iteration")[k].get<int>()) + "," + csv_number(t.at("S")[k]) + "," +
             csv_number(t.at("grad_norm")[k]) + "," + csv_number(t.at("step")[k]) + "\n";
      ++i;
    }
    return s;
  }
  if (kind == "slice") {
    if (!res.contains("t")) return missing();
    s = "t,S\n";
    for (std::size_t k = 0; k < res.at("t").size(); ++k) s += csv_number(res.at("t")[k]) + "," + csv_number(res.at("S")[k]) + "\n";
    return s;
  }
  if (kind == "profile") {
    if (!res.contains("profile")) return missing();
    const json& p = res.at("profile");
    s = "r,density,count\n";
    for (std::size_t k = 0; k < p.at("r").size(); ++k)
      s += csv_number(p.at("r")[k]) + "," + csv_number(p.at("density")[k]) + "," + std::to_string(p.at("count")[k].get<int>()) + "\n";
    return s;
  }
  throw Error(ErrorCode::validation, "unknown plot kind '" + kind + "' (trace, slice, profile)");
}

json to_json(const std::vector<CheckRow>& rows) {
  json a = json::array();
  for (const CheckRow& r : rows)
    a.push_back({{"module", r.module}, {"name", r.name}, {"value", r.value}, {"tolerance", r.tolerance}, {"passed", r.passed}, {"note", r.note}});
  return a;
}

std::string format_table(const std::vector<CheckRow>& rows) {
  std::size_t wm = 6, wn = 5;
  for (const CheckRow& r : rows) {
    wm = std::max(wm, r.module.size());
    wn = std::max(wn, r.name.size());
  }
  std::ostringstream os;
  char buf[64];
  const auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  os << pad("module", wm) << "  " << pad("check", wn) << "  value        tolerance    result\n";
  int failed = 0;
  for (const CheckRow& r : rows) {
    os << pad(r.module, wm) << "  " << pad(r.name, wn) << "  ";
    std::snprintf(buf, sizeof buf, "%-11.3e  %-11.3e  %s", r.value, r.tolerance, r.passed ? "PASS" : "FAIL");
    os << buf;
    if (!r.note.empty()) os << "  (" << r.note << ")";
    os << "\n";
    failed += !r.passed;
  }
  os << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size() << " checks passed\n";
  return os.str();
}

}  // namespace ncym
