#include "ncym/ncym.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncym/experiment.hpp"

using nlohmann::json;

struct ncym_run {
  int exit_code = 0;
  std::string report;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> files;
};

struct ncym_problem {
  ncym::Problem pb;
  ncym::NCConnection init;
};

namespace {

thread_local std::string last_error;

ncym_status fail(ncym_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
ncym_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const ncym::Error& e) {
    return fail(static_cast<ncym_status>(static_cast<int>(e.code())), e.what());
  } catch (const json::exception& e) {
    return fail(NCYM_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NCYM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NCYM_ERR_INTERNAL, e.what());
  }
}

std::string run_summary(const json& report) {
  std::ostringstream os;
  os << "status: " << report.value("status", "unknown") << "\n";
  if (report.contains("error")) os << "error: " << report.at("error").get<std::string>() << "\n";
  if (!report.contains("result")) return os.str();
  const json& r = report.at("result");
  const std::string task = report.value("task", "");
  if (task == "solve") {
    const json& s = r.at("summary");
    os << "converged " << s.at("converged") << "/" << s.at("restarts") << ", classes " << s.at("classes").dump() << "\n";
    for (const json& run : r.at("runs"))
      os << "  S = " << run.at("action").at("S_total").get<double>() << ", |grad| = " << run.at("grad_norm").get<double>()
         << ", iterations " << run.at("iterations") << "\n";
  } else if (task == "chern" && r.contains("value")) {
    os << "c_" << r.at("q") << " = " << r.at("value").get<double>() << " (grid " << r.at("grid") << ")\n";
  } else if (task == "slice") {
    os << "minima at t = " << r.at("minima").dump() << "\n";
  } else {
    const std::string text = r.dump(2);
    if (text.size() < 4000) os << text << "\n";
  }
  return os.str();
}

ncym_run* make_run(const ncym::RunOutcome& o) {
  auto* run = new ncym_run;
  run->exit_code = o.exit_code;
  run->report = o.report.dump(2) + "\n";
  run->summary = run_summary(o.report);
  for (const auto& [name, data] : o.files) run->files.emplace_back(name, data);
  return run;
}

ncym_status run_parsed(json cfg, int64_t seed, ncym_run** out) {
  if (seed >= 0 && cfg.is_object()) cfg["seed"] = seed;
  *out = make_run(ncym::run_experiment(cfg));
  return NCYM_OK;
}

}  // namespace

extern "C" {

const char* ncym_version(void) { return "1.0.0"; }

const char* ncym_last_error(void) { return last_error.c_str(); }

const char* ncym_status_name(ncym_status s) {
  switch (s) {
    case NCYM_ERR_NULL_ARGUMENT:
      return "null-argument";
    case NCYM_ERR_PARSE:
      return "parse";
    default:
      return ncym::error_code_name(static_cast<ncym::ErrorCode>(static_cast<int>(s)));
  }
}

void ncym_set_threads(int n) { ncym::set_threads(n); }

int ncym_get_threads(void) { return ncym::threads(); }

ncym_status ncym_run_json(const char* config_json, int64_t seed, ncym_run** out) {
  if (!config_json || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return run_parsed(json::parse(config_json), seed, out); });
}

ncym_status ncym_run_file(const char* path, int64_t seed, ncym_run** out) {
  if (!path || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path);
    if (!in) return fail(NCYM_ERR_IO, std::string("cannot read config '") + path + "'");
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      return fail(NCYM_ERR_PARSE, std::string(path) + ": " + e.what());
    }
    return run_parsed(std::move(cfg), seed, out);
  });
}

ncym_status ncym_selfcheck(const char* filter, ncym_run** out) {
  if (!out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto rows = ncym::run_selfcheck(filter ? filter : "");
    bool all = true;
    for (const auto& r : rows) all = all && r.passed;
    auto* run = new ncym_run;
    run->exit_code = all ? NCYM_EXIT_OK : NCYM_EXIT_ERROR;
    run->report = json{{"task", "selfcheck"}, {"filter", filter ? filter : ""}, {"checks", ncym::to_json(rows)}, {"all_passed", all}}.dump(2) + "\n";
    run->summary = ncym::format_table(rows);
    run->files.emplace_back("selfcheck.json", run->report);
    *out = run;
    return NCYM_OK;
  });
}

int ncym_run_exit_code(const ncym_run* run) { return run ? run->exit_code : NCYM_EXIT_ERROR; }

const char* ncym_run_report(const ncym_run* run) { return run ? run->report.c_str() : ""; }

const char* ncym_run_summary(const ncym_run* run) { return run ? run->summary.c_str() : ""; }

size_t ncym_run_file_count(const ncym_run* run) { return run ? run->files.size() : 0; }

const char* ncym_run_file_name(const ncym_run* run, size_t i) {
  return run && i < run->files.size() ? run->files[i].first.c_str() : nullptr;
}

const char* ncym_run_file_data(const ncym_run* run, size_t i) {
  return run && i < run->files.size() ? run->files[i].second.c_str() : nullptr;
}

ncym_status ncym_run_write(const ncym_run* run, const char* dir) {
  if (!run || !dir) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) return fail(NCYM_ERR_IO, std::string("cannot create '") + dir + "': " + ec.message());
    for (const auto& [name, data] : run->files) {
      const fs::path p = fs::path(dir) / name;
      std::ofstream f(p, std::ios::binary);
      f << data;
      if (!f) return fail(NCYM_ERR_IO, "cannot write '" + p.string() + "'");
    }
    return NCYM_OK;
  });
}

void ncym_run_free(ncym_run* run) { delete run; }

ncym_status ncym_plot_csv(const char* report_json, const char* kind, char** out_csv) {
  if (!report_json || !kind || !out_csv) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  *out_csv = nullptr;
  return guarded([&] {
    const std::string csv = ncym::plot_csv(json::parse(report_json), kind);
    char* buf = static_cast<char*>(std::malloc(csv.size() + 1));
    if (!buf) return fail(NCYM_ERR_INTERNAL, "out of memory");
    std::memcpy(buf, csv.c_str(), csv.size() + 1);
    *out_csv = buf;
    return NCYM_OK;
  });
}

void ncym_string_free(char* s) { std::free(s); }

ncym_status ncym_problem_create(const char* config_json, ncym_problem** out) {
  if (!config_json || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const json r = ncym::resolve_config(json::parse(config_json));
    ncym::Problem pb = ncym::build_problem(r);
    ncym::NCConnection init = ncym::initial_condition(pb, r);
    *out = new ncym_problem{std::move(pb), std::move(init)};
    return NCYM_OK;
  });
}

ncym_status ncym_problem_action(const ncym_problem* p, double out[4]) {
  if (!p || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    const ncym::ActionBreakdown a = ncym::action(p->init, p->pb.geo.manifold, *p->pb.riem);
    out[0] = a.S_total;
    out[1] = a.S_horizontal;
    out[2] = a.S_mixed;
    out[3] = a.S_vertical;
    return NCYM_OK;
  });
}

ncym_status ncym_problem_gradient_norm(const ncym_problem* p, double* out) {
  if (!p || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    *out = ncym::gradient(p->init, p->pb.geo.manifold, *p->pb.riem).norm();
    return NCYM_OK;
  });
}

ncym_status ncym_problem_chern(const ncym_problem* p, int q, double* out) {
  if (!p || !out) return fail(NCYM_ERR_NULL_ARGUMENT, "null argument");
  return guarded([&] {
    *out = ncym::chern_number(*p->pb.conn, q, p->pb.geo.manifold).value;
    return NCYM_OK;
  });
}

void ncym_problem_free(ncym_problem* p) { delete p; }

}  // extern "C"
