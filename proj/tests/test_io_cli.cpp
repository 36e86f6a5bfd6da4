#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "symdens/cli.hpp"
#include "symdens/decomposition.hpp"
#include "symdens/errors.hpp"
#include "symdens/io.hpp"
#include "symdens/iterative.hpp"

using namespace symdens;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("symdens_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto file = path / name;
    std::ofstream(file) << text;
    return file.string();
  }
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("instance, refinement and decomposition JSON round trips") {
  for (const Instance& g : test::random_instances(81, 30)) {
    const Instance back = instance_from_json(parse_json(instance_to_json(g).dump()));
    CHECK(back == g);
    const Refinement alpha = exact_maximin_refinement(g, Side::zero);
    CHECK(refinement_from_json(g, parse_json(refinement_to_json(g, alpha).dump())) == alpha);
    for (Side ground : {Side::zero, Side::one}) {
      const DensityDecomposition d = density_decomposition(g, ground);
      CHECK(decomposition_from_json(g, parse_json(decomposition_to_json(g, d).dump())) == d);
    }
  }
}

TEST_CASE("curve and market JSON round trips") {
  Rng rng(82);
  for (int k = 0; k < 30; ++k) {
    const PowerFunction g = random_curve(rng, uniform_index(rng, 1, 8));
    CHECK(curve_from_json(parse_json(curve_to_json(g).dump())) == g);
    const FisherMarket m = random_fisher_market(rng, 3, 4);
    const FisherMarket mb = market_from_json(parse_json(market_to_json(m).dump()));
    CHECK(mb.buyers == m.buyers);
    CHECK(mb.budgets == m.budgets);
    CHECK(mb.valuation == m.valuation);
    FisherAllocation a{true, DenseMatrix(3, 4)};
    a.fractions(0, 1) = 0.25;
    a.fractions(2, 3) = 1.0;
    const FisherAllocation ab = fisher_allocation_from_json(m, parse_json(fisher_allocation_to_json(m, a).dump()));
    CHECK(ab.buyers_to_sellers);
    CHECK(ab.fractions == a.fractions);
  }
}

TEST_CASE("refinement JSON validation") {
  const Instance g = counterexample_instance(0.25);
  CHECK_THROWS_AS(refinement_from_json(g, parse_json(R"({"source_side":0,"values":[["i1","j3",2]]})")), InputError);
  CHECK_THROWS_AS(refinement_from_json(g, parse_json(R"({"source_side":2,"values":[]})")), InputError);
  CHECK_THROWS_AS(refinement_from_json(g, parse_json(R"({"source_side":0,"values":[["i1","j1",1]]})")),
                  RefinementError);
}

TEST_CASE("trace CSV columns") {
  ConvergenceTrace t;
  t.rows.push_back({0, 1.5, 0.25, 0.1, 0.2, std::nan(""), std::nan(""), std::nan(""), std::nullopt});
  std::ostringstream out;
  write_trace_csv(out, t);
  CHECK(out.str() == "iter,Q,abs_err_w,eta,eta_bar,bound_abs,bound_mult\n0,1.5,0.25,0.10000000000000001,0.20000000000000001,nan,nan\n");
}

TEST_CASE("cli decompose on the counterexample") {
  TempDir dir;
  const std::string input = dir.write("g.json", instance_to_json(counterexample_instance(0.25)).dump());
  const CliRun r = run({"decompose", "--ground", "1", input});
  CHECK(r.code == 0);
  const Json doc = parse_json(r.out);
  REQUIRE(doc["levels"].size() == 2);
  CHECK(doc["levels"][0]["density"] == 1.0);
  CHECK(doc["levels"][1]["density"] == 0.3125);
  const Instance g = counterexample_instance(0.25);
  CHECK(decomposition_from_json(g, doc) == density_decomposition(g, Side::one));
  CHECK(run({"decompose", "--ground", "1", input}).out == r.out);
}

TEST_CASE("cli power reproduces the reference value") {
  TempDir dir;
  const std::string input = dir.write("d.json", R"({"P":[0,0.1,0.14,0.11,0.41,0.24],"Q":[0.15,0.3,0.2,0.1,0.25,0]})");
  const std::string csv = (dir.path / "curve.csv").string();
  const CliRun r = run({"power", "--gamma", "1.2", "--curve-out", csv, "--tau", "0.1", input});
  REQUIRE(r.code == 0);
  const Json doc = parse_json(r.out);
  CHECK(std::abs(doc["divergences"]["hockey_stick"][0]["value"].get<double>() - 0.362) < 1e-12);
  CHECK(doc["divergences"]["reverse_kl"] == "inf");
  CHECK(read_file(csv).rfind("x,y\n0,0.14999999999999999\n", 0) == 0);
  const CliRun grid = run({"power", "--gamma-grid", input});
  CHECK(parse_json(grid.out)["divergences"]["hockey_stick"].size() == 81);
  CHECK(run({"power", "--gamma", "1", "--gamma-grid", input}).code == 2);
}

TEST_CASE("cli refine with zero rounds emits the initial pair") {
  TempDir dir;
  const Instance g = counterexample_instance(0.25);
  const std::string input = dir.write("g.json", instance_to_json(g).dump());
  const CliRun r = run({"refine", "--method", "pr", "--iters", "0", input});
  REQUIRE(r.code == 0);
  const Json doc = parse_json(r.out);
  CHECK(doc["alpha0"]["values"][0][2] == 2.0 / 3.0);
  CHECK(doc["off_edge_mass"]["i1"] == 2.0 / 3.0);
  const Refinement back = refinement_from_json(g, doc["alpha1"]);
  CHECK(back.source == Side::one);
}

TEST_CASE("cli refine writes traces for iterative methods") {
  TempDir dir;
  const std::string input = dir.write("g.json", instance_to_json(counterexample_instance(0.25)).dump());
  for (const char* method : {"pr", "fw", "fista"}) {
    const std::string trace = (dir.path / (std::string(method) + ".csv")).string();
    const CliRun r = run({"refine", "--method", method, "--iters", "20", "--trace-out", trace, input});
    CHECK(r.code == 0);
    const std::string csv = read_file(trace);
    CHECK(csv.rfind("iter,Q,abs_err_w,eta,eta_bar,bound_abs,bound_mult\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  }
  const CliRun exact = run({"refine", "--method", "exact", input});
  CHECK(exact.code == 0);
  const Instance g = counterexample_instance(0.25);
  CHECK(refinement_from_json(g, parse_json(exact.out)["alpha0"]) == exact_maximin_refinement(g, Side::zero));
}

TEST_CASE("cli match, bounds, market and verify") {
  TempDir dir;
  const std::string input = dir.write("g.json", instance_to_json(counterexample_instance(0.25)).dump());
  const Json match = parse_json(run({"match", "--c", "1", "1", input}).out);
  CHECK(match["value"] == 3.25);
  CHECK(match["dual_objective"] == 3.25);
  CHECK(match["ratio_vs_oracle"] == 1.0);
  const Json bounds = parse_json(run({"bounds", input}).out);
  CHECK(bounds["delta_w"] == 2.0);

  const std::string market = dir.write("m.json", R"({"buyers":[{"id":"b1","budget":1},{"id":"b2","budget":2}],
    "sellers":[{"id":"s1"},{"id":"s2"}],"valuations":[["b1","s1",2],["b1","s2",1],["b2","s2",1]]})");
  const CliRun m = run({"market", market});
  REQUIRE(m.code == 0);
  CHECK(parse_json(m.out)["checks"]["equilibrium"] == true);
  const Json ce = parse_json(run({"market", "--counterexample"}).out);
  CHECK(ce["locally_maximin"] == true);
  CHECK(ce["equilibrium"] == false);

  const CliRun v = run({"verify", "--seed", "42", "--count", "5"});
  CHECK(v.code == 0);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(run({"verify", "--seed", "42", "--count", "5"}).out == v.out);
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  CHECK(run({}).code == 2);
  CHECK(run({"unknown"}).code == 2);
  CHECK(run({"decompose", (dir.path / "missing.json").string()}).code == 2);
  const std::string bad = dir.write("bad.json", R"({"side0":[{"id":"a","w":0}],"side1":[],"edges":[]})");
  CHECK(run({"decompose", bad}).code == 2);
  CHECK(run({"decompose", "--ground", "3", bad}).code == 2);
  RandomInstanceOptions big;
  big.min_side = big.max_side0 = big.max_side1 = 14;
  const std::string large = dir.write("large.json", instance_to_json(test::random_instances(83, 1, big)[0]).dump());
  CHECK(run({"verify", large}).code == 2);
  CHECK(run({"match", "--c", "0", "0", bad}).code == 2);
}
