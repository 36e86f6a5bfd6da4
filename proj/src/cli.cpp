#include "symdens/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "symdens/decomposition.hpp"
#include "symdens/errors.hpp"
#include "symdens/fixtures.hpp"
#include "symdens/io.hpp"
#include "symdens/iterative.hpp"
#include "symdens/market.hpp"
#include "symdens/matching.hpp"
#include "symdens/oracles.hpp"
#include "symdens/power.hpp"

namespace symdens {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

struct Options {
  std::string input;
  std::string output;
  int ground = 1;
  int side = 0;
  std::string method = "exact";
  std::size_t iters = 100;
  std::optional<double> gamma;
  bool gamma_grid = false;
  std::vector<double> c = {1.0, 1.0};
  std::optional<double> tau;
  std::string trace_out;
  std::string curve_out;
  std::uint64_t seed = 42;
  std::size_t count = 20;
  std::size_t max_ground = 12;
  std::optional<double> renyi;
  double tol = 1e-10;
  std::string allocation;
  bool counterexample = false;
};

void emit(const Options& opt, std::ostream& out, const std::string& text) {
  if (opt.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.output);
  if (!file) throw InputError("cannot write '" + opt.output + "'");
  file << text;
}

void emit_json(const Options& opt, std::ostream& out, const Json& doc) { emit(opt, out, doc.dump(2) + "\n"); }

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  body(file);
}

Instance read_instance(const Options& opt) {
  if (opt.input.empty()) throw InputError("an input file is required");
  return instance_from_json(read_json_file(opt.input));
}

Method parse_method(const std::string& name) {
  if (name == "pr") return Method::proportional_response;
  if (name == "fw") return Method::frank_wolfe;
  if (name == "fista") return Method::fista;
  if (name == "exact") return Method::exact;
  throw InputError("unknown method '" + name + "'");
}

RefinementPair exact_pair(const Instance& instance) {
  const Refinement alpha0 = exact_maximin_refinement(instance, Side::zero);
  return {alpha0, proportional_response(instance, alpha0)};
}

int cmd_decompose(const Options& opt, std::ostream& out) {
  const Instance instance = read_instance(opt);
  emit_json(opt, out, decomposition_to_json(instance, density_decomposition(instance, side_from_int(opt.ground))));
  return kExitOk;
}

int cmd_refine(const Options& opt, std::ostream& out) {
  const Instance instance = read_instance(opt);
  const Method method = parse_method(opt.method);
  SolverConfig config;
  config.method = method;
  config.iterations = opt.iters;
  config.source = side_from_int(opt.side);
  config.record_trace = !opt.trace_out.empty();

  Json doc{{"method", opt.method}};
  ConvergenceTrace trace;
  if (method == Method::exact) {
    const Refinement alpha = exact_maximin_refinement(instance, config.source);
    const Refinement back = proportional_response(instance, alpha);
    doc["alpha0"] = refinement_to_json(instance, alpha.source == Side::zero ? alpha : back);
    doc["alpha1"] = refinement_to_json(instance, alpha.source == Side::one ? alpha : back);
  } else {
    std::optional<DensityDecomposition> exact;
    if (config.record_trace) exact = density_decomposition(instance, Side::one);
    const DensityDecomposition* exact_ptr = exact ? &*exact : nullptr;
    doc["iterations"] = opt.iters;
    if (method == Method::proportional_response) {
      PrResult result = run_proportional_response(instance, config, exact_ptr);
      doc["source_side"] = opt.side;
      doc["alpha0"] = refinement_to_json(instance, result.pair.alpha0);
      doc["alpha1"] = refinement_to_json(instance, result.pair.alpha1);
      if (opt.iters == 0) {
        const SuperRefinement init = initial_super_refinement(instance, config.source);
        Json off = Json::object();
        for (std::size_t v = 0; v < instance.size(config.source); ++v) {
          off[instance.id(config.source, v)] = init.off_edge_mass[v];
        }
        doc["off_edge_mass"] = off;
      }
      trace = std::move(result.trace);
    } else {
      ConvexResult result = method == Method::frank_wolfe ? run_frank_wolfe(instance, config, exact_ptr)
                                                          : run_fista(instance, config, exact_ptr);
      doc["alpha0"] = refinement_to_json(instance, result.alpha);
      doc["objective"] = quadratic_objective(instance, result.alpha.values);
      trace = std::move(result.trace);
    }
  }
  if (!opt.trace_out.empty()) {
    if (method == Method::exact) throw InputError("--trace-out needs an iterative method");
    write_file(opt.trace_out, [&](std::ostream& f) { write_trace_csv(f, trace); });
  }
  emit_json(opt, out, doc);
  return kExitOk;
}

int cmd_match(const Options& opt, std::ostream& out) {
  const Instance instance = read_instance(opt);
  const CapacityPair c{opt.c[0], opt.c[1]};
  validate_capacity(c);
  const DensityDecomposition decomp = density_decomposition(instance, Side::one);
  const double optimum = optimal_matching_value(decomp, c);
  const DualCertificate dual = dual_certificate(instance, decomp, c);
  const FractionalMatching flow = maxflow_matching_oracle(instance, c);

  RefinementPair pair;
  const Method method = parse_method(opt.method);
  if (method == Method::exact) {
    pair = exact_pair(instance);
  } else if (method == Method::proportional_response) {
    SolverConfig config;
    config.iterations = opt.iters;
    config.record_trace = false;
    pair = run_proportional_response(instance, config).pair;
  } else {
    throw InputError("match supports --method exact or pr");
  }
  const FractionalMatching meet = meet_matching(instance, pair, c);
  Json values = Json::array();
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const Edge& edge = instance.edges()[e];
    values.push_back({instance.id(Side::zero, edge.v0), instance.id(Side::one, edge.v1), meet.values[e]});
  }
  Json doc{{"c", {c.c0, c.c1}},
           {"method", opt.method},
           {"value", meet.total_weight},
           {"optimum", optimum},
           {"dual_objective", dual.objective},
           {"max_flow_value", flow.total_weight},
           {"ratio_vs_oracle", flow.total_weight > 0.0 ? meet.total_weight / flow.total_weight : 1.0},
           {"matching", values}};
  emit_json(opt, out, doc);
  return kExitOk;
}

std::vector<double> read_distribution(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) throw InputError(std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const Json& v : doc.at(key)) {
    if (!v.is_number()) throw InputError(std::string("entries of '") + key + "' must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> gamma_grid() {
  std::vector<double> out;
  for (int k = 0; k <= 80; ++k) out.push_back(k * 0.05);
  return out;
}

int cmd_power(const Options& opt, std::ostream& out) {
  if (opt.input.empty()) throw InputError("an input file is required");
  const Json input = read_json_file(opt.input);
  PowerFunction curve;
  if (input.is_object() && input.contains("P")) {
    curve = power_function(read_distribution(input, "P"), read_distribution(input, "Q"));
  } else {
    curve = optimal_power(DistributionInstance::normalize(instance_from_json(input)));
  }
  Json divergences{{"total_variation", number_or_string(f_divergence_from_curve(curve, total_variation()))},
                   {"kl", number_or_string(f_divergence_from_curve(curve, kl_divergence()))},
                   {"reverse_kl", number_or_string(f_divergence_from_curve(curve, reverse_kl_divergence()))}};
  std::vector<double> gammas;
  if (opt.gamma) gammas.push_back(*opt.gamma);
  if (opt.gamma_grid) gammas = gamma_grid();
  Json hockey = Json::array();
  for (double g : gammas) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("gamma must be a finite nonnegative number");
    hockey.push_back({{"gamma", g}, {"value", hockey_stick_from_curve(curve, g)}});
  }
  divergences["hockey_stick"] = hockey;
  if (opt.renyi) {
    if (!(*opt.renyi > 0.0)) throw InputError("Renyi order must be positive");
    divergences["renyi"] = {{"order", *opt.renyi}, {"value", number_or_string(renyi_from_curve(curve, *opt.renyi))}};
  }
  Json doc{{"curve", curve_to_json(curve)}, {"divergences", divergences}};
  if (opt.tau) {
    if (!(*opt.tau >= 0.0 && *opt.tau <= 0.5)) throw InputError("--tau must lie in [0, 0.5]");
    doc["stretched"] = {{"gamma", 1.0 + 2.0 * *opt.tau}, {"curve", curve_to_json(gamma_approx(curve, 1.0 + 2.0 * *opt.tau))}};
  }
  if (!opt.curve_out.empty()) write_file(opt.curve_out, [&](std::ostream& f) { write_curve_csv(f, curve); });
  emit_json(opt, out, doc);
  return kExitOk;
}

Json per_agent(const std::vector<std::string>& ids, const std::vector<double>& values) {
  Json doc = Json::object();
  for (std::size_t k = 0; k < ids.size(); ++k) doc[ids[k]] = values[k];
  return doc;
}

int cmd_market(const Options& opt, std::ostream& out) {
  if (opt.counterexample) {
    const ArrowDebreuCounterexample ce = arrow_debreu_counterexample();
    std::vector<double> u = utilities(ce.market, ce.exchange);
    emit_json(opt, out,
              Json{{"agents", ce.market.agents},
                   {"exchange_utilities", u},
                   {"locally_maximin", ce.report.locally_maximin},
                   {"equilibrium", ce.report.equilibrium},
                   {"pr_involution", ce.report.pr_involution}});
    return kExitOk;
  }
  if (opt.input.empty()) throw InputError("an input file is required");
  const FisherMarket market = market_from_json(read_json_file(opt.input));
  DenseMatrix spending, goods;
  Json doc;
  if (!opt.allocation.empty()) {
    const FisherAllocation given = fisher_allocation_from_json(market, read_json_file(opt.allocation));
    if (given.buyers_to_sellers) {
      spending = DenseMatrix(market.buyers.size(), market.sellers.size());
      for (std::size_t i = 0; i < market.buyers.size(); ++i) {
        for (std::size_t j = 0; j < market.sellers.size(); ++j) spending(i, j) = given.fractions(i, j) * market.budgets[i];
      }
      goods = goods_from_spending(market, spending);
    } else {
      goods = given.fractions;
      spending = spending_from_goods(market, goods);
    }
  } else {
    const FisherDynamics dyn = run_fisher_dynamics(market, opt.iters, opt.tol);
    spending = dyn.spending;
    goods = dyn.goods;
    doc["rounds"] = dyn.rounds;
    doc["converged"] = dyn.converged;
  }
  const double check_tol = 1e-6;
  const BuyerCheck buyers = check_fisher_equilibrium_buyers(market, spending, check_tol);
  const SellerCheck sellers = check_fisher_equilibrium_sellers(market, goods, check_tol);
  FisherAllocation spend_alloc{true, DenseMatrix(market.buyers.size(), market.sellers.size())};
  for (std::size_t i = 0; i < market.buyers.size(); ++i) {
    for (std::size_t j = 0; j < market.sellers.size(); ++j) spend_alloc.fractions(i, j) = spending(i, j) / market.budgets[i];
  }
  doc["prices"] = per_agent(market.sellers, prices(spending));
  doc["utilities"] = per_agent(market.buyers, buyer_utilities(market, goods));
  doc["spending"] = fisher_allocation_to_json(market, spend_alloc);
  doc["goods"] = fisher_allocation_to_json(market, FisherAllocation{false, goods});
  doc["checks"] = {{"buyers_best_ratio", buyers.best_ratio},
                   {"buyers_locally_maximin", buyers.locally_maximin},
                   {"sellers_locally_maximin", sellers.sellers_maximin},
                   {"equilibrium", buyers.equilibrium()}};
  emit_json(opt, out, doc);
  return kExitOk;
}

Json bounds_to_json(const BoundReport& b) {
  Json preds = Json::array();
  for (const IterationPrediction& p : b.predictions) {
    preds.push_back({{"target", p.target},
                     {"pr_rounds_eta_bar", number_or_string(p.pr_rounds_eta_bar)},
                     {"pr_rounds_eta", number_or_string(p.pr_rounds_eta)},
                     {"frank_wolfe_steps", number_or_string(p.frank_wolfe_steps)},
                     {"fista_steps", number_or_string(p.fista_steps)}});
  }
  return {{"source_side", index_of(b.source)},
          {"degenerate", b.degenerate},
          {"n", b.n},
          {"n_bar", b.n_bar},
          {"u_min", number_or_string(b.u_min)},
          {"u_bar_min", number_or_string(b.u_bar_min)},
          {"delta_w", number_or_string(b.delta_w)},
          {"sum_sq_weights", b.sum_sq_weights},
          {"diameter_sq_bound", number_or_string(b.diameter_sq_bound)},
          {"lipschitz_bound", number_or_string(b.lipschitz_bound)},
          {"predictions", preds}};
}

int cmd_bounds(const Options& opt, std::ostream& out) {
  const Instance instance = read_instance(opt);
  emit_json(opt, out, bounds_to_json(compute_bounds(instance, side_from_int(opt.side))));
  return kExitOk;
}

// Cross-oracle checks shared by the random suite and single-file runs.
struct VerifyTally {
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> rows;
  void record(const std::string& name, bool ok) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.first == name; });
    if (it == rows.end()) {
      rows.push_back({name, {0, 0}});
      it = rows.end() - 1;
    }
    it->second.second += 1;
    if (ok) it->second.first += 1;
  }
};

bool same_decomposition(const DensityDecomposition& a, const DensityDecomposition& b) {
  if (a.levels.size() != b.levels.size()) return false;
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    if (a.levels[k].side0 != b.levels[k].side0 || a.levels[k].side1 != b.levels[k].side1) return false;
    if (!approx_equal(a.levels[k].density, b.levels[k].density, kRelTol)) return false;
  }
  return true;
}

void verify_instance(const Instance& instance, const OracleBudget& budget, VerifyTally& tally) {
  for (Side ground : {Side::zero, Side::one}) {
    const DensestSubset flow = maximal_densest_subset(instance, ground);
    const DensestSubset brute = brute_densest(instance, ground, budget);
    tally.record("densest_subset", flow.ground == brute.ground && approx_equal(flow.density, brute.density, kRelTol));
    tally.record("decomposition", same_decomposition(density_decomposition(instance, ground),
                                                     brute_decomposition(instance, ground, budget)));
  }
  tally.record("symmetry", verify_symmetry(instance));
  const DensityDecomposition decomp = density_decomposition(instance, Side::one);
  const Refinement alpha = exact_maximin_refinement(instance, Side::zero);
  const PayloadVector pay = payload_of(instance, alpha);
  bool dens_ok = true;
  for (std::size_t j = 0; j < instance.size(Side::one); ++j) {
    dens_ok = dens_ok && approx_equal(pay.density[j], decomp.density(Side::one)[j], kRelTol, kRelTol);
  }
  tally.record("maximin_refinement", dens_ok && is_locally_maximin(instance, alpha).ok);
  const RefinementPair pair{alpha, proportional_response(instance, alpha)};
  bool match_ok = true;
  for (const CapacityPair& c : default_capacity_grid()) {
    const double meet = meet_matching(instance, pair, c).total_weight;
    const double dual = dual_certificate(instance, decomp, c).objective;
    const double flow = maxflow_matching_oracle(instance, c).total_weight;
    const double scale = 1.0 + std::max({std::abs(meet), std::abs(dual), std::abs(flow)});
    match_ok = match_ok && std::abs(meet - dual) <= 1e-9 * scale && std::abs(meet - flow) <= 1e-9 * scale;
  }
  tally.record("universal_matching", match_ok);
}

int cmd_verify(const Options& opt, std::ostream& out) {
  OracleBudget budget;
  budget.max_ground_vertices = opt.max_ground;
  VerifyTally tally;
  if (!opt.input.empty()) {
    const Instance instance = read_instance(opt);
    if (instance.size(Side::zero) > budget.max_ground_vertices || instance.size(Side::one) > budget.max_ground_vertices) {
      throw BudgetError("instance exceeds the enumeration budget of " + std::to_string(budget.max_ground_vertices) +
                        " vertices per side");
    }
    verify_instance(instance, budget, tally);
  } else {
    Rng rng(opt.seed);
    RandomInstanceOptions shape;
    shape.max_side0 = shape.max_side1 = std::min<std::size_t>(budget.max_ground_vertices, 12);
    for (std::size_t k = 0; k < opt.count; ++k) verify_instance(random_instance(rng, shape), budget, tally);
    for (std::size_t k = 0; k < opt.count; ++k) {
      const std::size_t atoms = uniform_index(rng, 1, std::min<std::size_t>(budget.max_atoms, 10));
      const auto p = random_distribution(rng, atoms);
      const auto q = random_distribution(rng, atoms);
      const PowerFunction curve = power_function(p, q);
      bool ok = true;
      for (double g : {0.0, 0.5, 1.0, 1.2, 2.0, 5.0}) {
        const double a = hockey_stick_from_curve(curve, g), b = hockey_stick_direct(p, q, g);
        const double c = brute_hockey_stick(p, q, g, budget);
        ok = ok && std::abs(a - b) <= 1e-12 && std::abs(a - c) <= 1e-12;
      }
      tally.record("hockey_stick", ok);
    }
  }
  std::ostringstream table;
  bool all = true;
  for (const auto& [name, counts] : tally.rows) {
    const bool ok = counts.first == counts.second;
    all = all && ok;
    table << name << ' ' << counts.first << '/' << counts.second << ' ' << (ok ? "PASS" : "FAIL") << '\n';
  }
  emit(opt, out, table.str());
  return all ? kExitOk : kExitInternal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Symmetric density decomposition toolkit", "symdens"};
  app.require_subcommand(1);
  auto add_io = [&](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("input", opt.input, "Input JSON file");
    if (input_required) in->required();
    sub->add_option("-o,--output", opt.output, "Write the result here instead of stdout");
  };

  auto* decompose = app.add_subcommand("decompose", "Density decomposition of an instance");
  add_io(decompose, true);
  decompose->add_option("--ground", opt.ground, "Ground side")->check(CLI::IsMember({0, 1}));

  auto* refine = app.add_subcommand("refine", "Exact or iterative refinements");
  add_io(refine, true);
  refine->add_option("--method", opt.method, "exact, pr, fw or fista")->check(CLI::IsMember({"exact", "pr", "fw", "fista"}));
  refine->add_option("--iters", opt.iters, "Iterations");
  refine->add_option("--side", opt.side, "Source side of the refinement")->check(CLI::IsMember({0, 1}));
  refine->add_option("--trace-out", opt.trace_out, "Convergence trace CSV");

  auto* match = app.add_subcommand("match", "Capacitated fractional matching");
  add_io(match, true);
  match->add_option("--c", opt.c, "Capacity scales C0 C1")->expected(2);
  match->add_option("--method", opt.method, "Refinement pair: exact or pr")->check(CLI::IsMember({"exact", "pr"}));
  match->add_option("--iters", opt.iters, "Proportional response rounds");

  auto* power = app.add_subcommand("power", "Power curve and divergences");
  add_io(power, true);
  auto* gamma_opt = power->add_option("--gamma", opt.gamma, "Hockey-stick parameter");
  auto* grid_opt = power->add_flag("--gamma-grid", opt.gamma_grid, "Hockey-stick sweep over gamma in [0, 4]");
  gamma_opt->excludes(grid_opt);
  power->add_option("--tau", opt.tau, "Add the stretched curve for approximation error tau");
  power->add_option("--renyi", opt.renyi, "Renyi divergence order");
  power->add_option("--curve-out", opt.curve_out, "Curve breakpoints as CSV");

  auto* market = app.add_subcommand("market", "Fisher market equilibrium");
  add_io(market, false);
  market->add_option("--iters", opt.iters, "Maximum proportional response rounds");
  market->add_option("--tol", opt.tol, "Convergence tolerance relative to budgets");
  market->add_option("--allocation", opt.allocation, "Check this allocation instead of running dynamics");
  market->add_flag("--counterexample", opt.counterexample, "Report on the four-agent exchange market");

  auto* verify = app.add_subcommand("verify", "Cross-check against brute-force oracles");
  add_io(verify, false);
  verify->add_option("--seed", opt.seed, "Random seed");
  verify->add_option("--count", opt.count, "Random instances");
  verify->add_option("--max-ground", opt.max_ground, "Enumeration budget per side");

  auto* bounds = app.add_subcommand("bounds", "Convergence bounds and iteration predictions");
  add_io(bounds, true);
  bounds->add_option("--side", opt.side, "Source side")->check(CLI::IsMember({0, 1}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  try {
    if (decompose->parsed()) return cmd_decompose(opt, out);
    if (refine->parsed()) return cmd_refine(opt, out);
    if (match->parsed()) return cmd_match(opt, out);
    if (power->parsed()) return cmd_power(opt, out);
    if (market->parsed()) {
      if (market->count("--iters") == 0) opt.iters = 100000;
      return cmd_market(opt, out);
    }
    if (verify->parsed()) return cmd_verify(opt, out);
    if (bounds->parsed()) return cmd_bounds(opt, out);
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const RefinementError& e) {
    err << "invalid refinement: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DomainError& e) {
    err << "outside the supported domain: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ZeroPayloadError& e) {
    err << "zero payload: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace symdens
