#include "doctest.h"
#include "ncym/experiment.hpp"

using namespace ncym;
using nlohmann::json;

TEST_CASE("config defaults are resolved and recorded") {
  const json r = resolve_config({{"task", "eval"}});
  CHECK(r.at("manifold").at("kind") == "torus");
  CHECK(r.at("manifold").at("N") == 16);
  CHECK(r.at("representation").at("kind") == "fundamental");
  CHECK(r.at("initial").at("kind") == "canonical");
  CHECK(r.at("optimizer").at("grad_tol").get<double>() == 1e-8);
  CHECK(resolve_config(r) == r);
}

TEST_CASE("config validation rejects bad input") {
  const auto bad = [](const json& j) {
    try {
      resolve_config(j);
    } catch (const Error& e) {
      return e.code() == ErrorCode::validation;
    }
    return false;
  };
  CHECK(bad(json::array()));
  CHECK(bad({{"manifold", {{"kind", "torus"}}}}));
  CHECK(bad({{"task", "fly"}}));
  CHECK(bad({{"task", "eval"}, {"extra", 1}}));
  CHECK(bad({{"task", "eval"}, {"manifold", {{"N", 2}}}}));
  CHECK(bad({{"task", "eval"}, {"manifold", {{"fd_order", 3}}}}));
  CHECK(bad({{"task", "eval"}, {"manifold", {{"kind", "sphere"}, {"dim", 3}}}}));
  CHECK(bad({{"task", "eval"}, {"manifold", {{"N", "16"}}}}));
  CHECK(bad({{"task", "eval"}, {"connection", {{"kind", "bpst"}}}}));
  CHECK(bad({{"task", "eval"}, {"connection", {{"kind", "constant"}, {"values", {1, 2}}}}}));
  CHECK(bad({{"task", "eval"}, {"algebra", {{"n", 3}}}, {"representation", {{"kind", "spin"}, {"spin", 1}}}}));
  CHECK(bad({{"task", "eval"}, {"representation", {{"kind", "spin"}, {"spin", 0.3}}}}));
  CHECK(bad({{"task", "solve"}, {"initial", {{"kind", "zero"}, {"restarts", 3}}}}));
  CHECK(bad({{"task", "chern"}, {"chern", {{"q", 2}}}}));
  CHECK(bad({{"task", "eval"}, {"representation", {{"kind", "direct-sum"}, {"parts", {{{"kind", "nope"}}}}}}}));
}

TEST_CASE("run exit codes") {
  CHECK(run_experiment({{"task", "eval"}, {"bogus", true}}).exit_code == exit_validation);
  const RunOutcome ok = run_experiment({{"task", "eval"}, {"manifold", {{"N", 6}}}});
  CHECK(ok.exit_code == exit_ok);
  CHECK(ok.report.at("result").at("action").at("S_total").get<double>() == 0.0);
  CHECK(ok.report.at("result").at("classification").at("label") == "fundamental");
  CHECK(ok.files.count("report.json") == 1);
  CHECK(ok.files.count("density_slice.csv") == 1);

  const RunOutcome nc = run_experiment({{"task", "solve"},
                                        {"manifold", {{"N", 6}}},
                                        {"initial", {{"kind", "random-constant"}, {"seed", 3}}},
                                        {"optimizer", {{"max_iter", 3}}}});
  CHECK(nc.exit_code == exit_nonconvergence);
  CHECK(nc.files.count("trace.csv") == 1);
  CHECK(nc.files.count("state.json") == 1);

  const RunOutcome refused = run_experiment({{"task", "classify"}, {"manifold", {{"N", 6}}}, {"initial", {{"kind", "scaled"}, {"t", 0.5}}}});
  CHECK(refused.exit_code == exit_error);
  CHECK(refused.report.at("error_code") == "classification-refused");
}

TEST_CASE("solve trace is monotone and reruns are identical") {
  const json cfg = {{"task", "solve"},
                    {"seed", 4},
                    {"manifold", {{"N", 6}}},
                    {"initial", {{"kind", "random-constant"}, {"amplitude", 0.5}, {"restarts", 2}}}};
  const RunOutcome a = run_experiment(cfg);
  const RunOutcome b = run_experiment(cfg);
  REQUIRE(a.exit_code == exit_ok);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.files == b.files);
  for (const json& run : a.report.at("result").at("runs")) {
    const auto S = run.at("trace").at("S").get<std::vector<double>>();
    for (std::size_t i = 1; i < S.size(); ++i) CHECK(S[i] <= S[i - 1]);
    CHECK(run.at("action").at("S_total").get<double>() < 1e-8);
  }
  const std::string csv = plot_csv(a.report, "trace");
  CHECK(csv.rfind("run,iteration,S,grad_norm,step\n", 0) == 0);
  CHECK_THROWS_AS(plot_csv(a.report, "profile"), Error);
  CHECK_THROWS_AS(plot_csv(a.report, "heatmap"), Error);
}

TEST_CASE("slice, geometry and Levi-Civita tasks") {
  const RunOutcome s = run_experiment({{"task", "slice"}, {"manifold", {{"N", 6}}}});
  REQUIRE(s.exit_code == exit_ok);
  const auto minima = s.report.at("result").at("minima").get<std::vector<double>>();
  REQUIRE(minima.size() == 2);
  CHECK(std::abs(minima[0]) < 1e-6);
  CHECK(std::abs(minima[1] - 1.0) < 1e-6);
  CHECK(plot_csv(s.report, "slice").rfind("t,S\n", 0) == 0);

  const RunOutcome g = run_experiment({{"task", "geom-check"}, {"manifold", {{"kind", "sphere"}, {"dim", 2}, {"N", 17}}}});
  REQUIRE(g.exit_code == exit_ok);
  const json& gr = g.report.at("result");
  CHECK(gr.at("volume").get<double>() == doctest::Approx(gr.at("volume_exact").get<double>()).epsilon(1e-2));
  CHECK(gr.at("round_trip").get<double>() < 1e-12);

  const RunOutcome lc = run_experiment({{"task", "lc-check"}, {"connection", {{"kind", "random"}}}, {"manifold", {{"N", 8}}}});
  REQUIRE(lc.exit_code == exit_ok);
  CHECK(lc.report.at("result").at("torsion").get<double>() < 1e-12);
}

TEST_CASE("selfcheck filter") {
  const auto rows = run_selfcheck("metric");
  REQUIRE(!rows.empty());
  for (const CheckRow& r : rows) {
    CHECK(r.module == "metric");
    CHECK(r.passed);
  }
  CHECK_THROWS_AS(run_selfcheck("astrology"), Error);
  CHECK(format_table(rows).find("checks passed") != std::string::npos);
}
