#include "symdens/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "symdens/errors.hpp"

namespace symdens {

namespace {

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

const Json& array_field(const Json& doc, const char* key) {
  const Json& v = field(doc, key);
  if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
  return v;
}

std::string string_of(const Json& v, const char* what) {
  if (!v.is_string()) throw InputError(std::string(what) + " must be a string");
  return v.get<std::string>();
}

double real_of(const Json& v, const char* what) {
  if (!v.is_number()) throw InputError(std::string(what) + " must be a number");
  return v.get<double>();
}

std::vector<VertexSpec> read_side(const Json& doc, const char* key) {
  std::vector<VertexSpec> out;
  for (const Json& v : array_field(doc, key)) {
    out.push_back({string_of(field(v, "id"), "vertex id"), real_of(field(v, "w"), "vertex weight")});
  }
  return out;
}

std::size_t vertex_on(const Instance& instance, Side s, const Json& id) {
  const std::string name = string_of(id, "vertex id");
  const auto hit = instance.find(name);
  if (!hit || hit->first != s) {
    throw InputError("unknown vertex '" + name + "' on side " + std::to_string(index_of(s)));
  }
  return hit->second;
}

std::vector<std::string> names(const Instance& instance, Side s, const std::vector<std::size_t>& set) {
  std::vector<std::string> out;
  for (std::size_t v : set) out.push_back(instance.id(s, v));
  return out;
}

std::vector<std::size_t> indices(const Instance& instance, Side s, const Json& list) {
  if (!list.is_array()) throw InputError("level members must be an array");
  std::vector<std::size_t> out;
  for (const Json& id : list) out.push_back(vertex_on(instance, s, id));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str());
}

Instance instance_from_json(const Json& doc) {
  std::vector<VertexSpec> side0 = read_side(doc, "side0");
  std::vector<VertexSpec> side1 = read_side(doc, "side1");
  std::map<std::string, std::size_t> pos0, pos1;
  for (std::size_t k = 0; k < side0.size(); ++k) pos0.emplace(side0[k].id, k);
  for (std::size_t k = 0; k < side1.size(); ++k) pos1.emplace(side1[k].id, k);
  std::vector<Edge> edges;
  for (const Json& e : array_field(doc, "edges")) {
    if (!e.is_array() || e.size() != 2) throw InputError("edge must be a pair of vertex ids");
    const std::string a = string_of(e[0], "edge endpoint"), b = string_of(e[1], "edge endpoint");
    auto ia = pos0.find(a);
    auto ib = pos1.find(b);
    if (ia == pos0.end() || ib == pos1.end()) {
      throw InputError("edge references unknown vertex ('" + a + "', '" + b + "')");
    }
    edges.push_back({ia->second, ib->second});
  }
  return Instance(std::move(side0), std::move(side1), std::move(edges));
}

Json instance_to_json(const Instance& instance) {
  Json doc;
  for (Side s : {Side::zero, Side::one}) {
    Json side = Json::array();
    for (std::size_t v = 0; v < instance.size(s); ++v) {
      side.push_back({{"id", instance.id(s, v)}, {"w", instance.weight(s, v)}});
    }
    doc[s == Side::zero ? "side0" : "side1"] = side;
  }
  Json edges = Json::array();
  for (const Edge& e : instance.edges()) edges.push_back({instance.id(Side::zero, e.v0), instance.id(Side::one, e.v1)});
  doc["edges"] = edges;
  return doc;
}

Instance load_instance(std::string_view text) { return instance_from_json(parse_json(text)); }

Refinement refinement_from_json(const Instance& instance, const Json& doc) {
  const Json& side = field(doc, "source_side");
  if (!side.is_number_integer()) throw InputError("source_side must be 0 or 1");
  Refinement alpha{side_from_int(side.get<int>()), std::vector<double>(instance.edge_count(), 0.0)};
  std::set<std::size_t> seen;
  for (const Json& row : array_field(doc, "values")) {
    if (!row.is_array() || row.size() != 3) throw InputError("refinement value must be [i, j, value]");
    const std::size_t i = vertex_on(instance, Side::zero, row[0]);
    const std::size_t j = vertex_on(instance, Side::one, row[1]);
    const auto e = instance.find_edge(i, j);
    if (!e) throw InputError("refinement value on a non-edge");
    if (!seen.insert(*e).second) throw InputError("duplicate refinement value");
    alpha.values[*e] = real_of(row[2], "refinement value");
  }
  validate_refinement(instance, alpha);
  return alpha;
}

Json refinement_to_json(const Instance& instance, const Refinement& alpha) {
  Json values = Json::array();
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const Edge& edge = instance.edges()[e];
    values.push_back({instance.id(Side::zero, edge.v0), instance.id(Side::one, edge.v1), alpha.values[e]});
  }
  return {{"source_side", index_of(alpha.source)}, {"values", values}};
}

Json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  throw InputError("expected a number");
}

Json decomposition_to_json(const Instance& instance, const DensityDecomposition& decomp) {
  Json levels = Json::array();
  for (const Level& level : decomp.levels) {
    levels.push_back({{"S0", names(instance, Side::zero, level.side0)},
                      {"S1", names(instance, Side::one, level.side1)},
                      {"density", number_or_string(level.density)}});
  }
  Json rho;
  for (Side s : {Side::zero, Side::one}) {
    Json side = Json::object();
    for (std::size_t v = 0; v < instance.size(s); ++v) side[instance.id(s, v)] = number_or_string(decomp.density(s)[v]);
    rho[s == Side::zero ? "side0" : "side1"] = side;
  }
  return {{"ground_side", index_of(decomp.ground)}, {"levels", levels}, {"rho_star", rho}};
}

DensityDecomposition decomposition_from_json(const Instance& instance, const Json& doc) {
  const Json& g = field(doc, "ground_side");
  if (!g.is_number_integer()) throw InputError("ground_side must be 0 or 1");
  DensityDecomposition out;
  out.ground = side_from_int(g.get<int>());
  for (const Json& level : array_field(doc, "levels")) {
    out.levels.push_back({indices(instance, Side::zero, field(level, "S0")), indices(instance, Side::one, field(level, "S1")),
                          number_from_json(field(level, "density"))});
  }
  const Json& rho = field(doc, "rho_star");
  for (Side s : {Side::zero, Side::one}) {
    const Json& side = field(rho, s == Side::zero ? "side0" : "side1");
    auto& dens = out.rho_star[index_of(s)];
    auto& pay = out.payload_star[index_of(s)];
    dens.assign(instance.size(s), 0.0);
    pay.assign(instance.size(s), 0.0);
    for (std::size_t v = 0; v < instance.size(s); ++v) {
      dens[v] = number_from_json(field(side, instance.id(s, v).c_str()));
      pay[v] = dens[v] * instance.weight(s, v);
    }
  }
  return out;
}

Json curve_to_json(const PowerFunction& g) {
  Json pts = Json::array();
  for (const Point& p : g.breakpoints()) pts.push_back({p.x, p.y});
  return {{"breakpoints", pts}};
}

PowerFunction curve_from_json(const Json& doc) {
  std::vector<Point> pts;
  for (const Json& p : array_field(doc, "breakpoints")) {
    if (!p.is_array() || p.size() != 2) throw InputError("breakpoint must be [x, y]");
    pts.push_back({real_of(p[0], "x"), real_of(p[1], "y")});
  }
  try {
    return PowerFunction(std::move(pts));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(std::ostream& out, const PowerFunction& g) {
  out << "x,y\n";
  for (const Point& p : g.breakpoints()) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

FisherMarket market_from_json(const Json& doc) {
  FisherMarket m;
  for (const Json& b : array_field(doc, "buyers")) {
    m.buyers.push_back(string_of(field(b, "id"), "buyer id"));
    m.budgets.push_back(real_of(field(b, "budget"), "budget"));
  }
  for (const Json& s : array_field(doc, "sellers")) m.sellers.push_back(string_of(field(s, "id"), "seller id"));
  std::map<std::string, std::size_t> bpos, spos;
  for (std::size_t k = 0; k < m.buyers.size(); ++k) bpos.emplace(m.buyers[k], k);
  for (std::size_t k = 0; k < m.sellers.size(); ++k) spos.emplace(m.sellers[k], k);
  m.valuation = DenseMatrix(m.buyers.size(), m.sellers.size());
  for (const Json& row : array_field(doc, "valuations")) {
    if (!row.is_array() || row.size() != 3) throw InputError("valuation must be [buyer, seller, value]");
    auto b = bpos.find(string_of(row[0], "buyer id"));
    auto s = spos.find(string_of(row[1], "seller id"));
    if (b == bpos.end() || s == spos.end()) throw InputError("valuation references unknown agent");
    m.valuation(b->second, s->second) = real_of(row[2], "valuation");
  }
  validate_market(m);
  return m;
}

Json market_to_json(const FisherMarket& market) {
  Json buyers = Json::array(), sellers = Json::array(), vals = Json::array();
  for (std::size_t i = 0; i < market.buyers.size(); ++i) buyers.push_back({{"id", market.buyers[i]}, {"budget", market.budgets[i]}});
  for (const auto& s : market.sellers) sellers.push_back({{"id", s}});
  for (std::size_t i = 0; i < market.buyers.size(); ++i) {
    for (std::size_t j = 0; j < market.sellers.size(); ++j) {
      if (market.valuation(i, j) > 0.0) vals.push_back({market.buyers[i], market.sellers[j], market.valuation(i, j)});
    }
  }
  return {{"buyers", buyers}, {"sellers", sellers}, {"valuations", vals}};
}

FisherAllocation fisher_allocation_from_json(const FisherMarket& market, const Json& doc) {
  const std::string direction = string_of(field(doc, "direction"), "direction");
  FisherAllocation out;
  if (direction == "buyers_to_sellers") {
    out.buyers_to_sellers = true;
  } else if (direction == "sellers_to_buyers") {
    out.buyers_to_sellers = false;
  } else {
    throw InputError("direction must be buyers_to_sellers or sellers_to_buyers");
  }
  const auto& owners = out.buyers_to_sellers ? market.buyers : market.sellers;
  const auto& recipients = out.buyers_to_sellers ? market.sellers : market.buyers;
  std::map<std::string, std::size_t> opos, rpos;
  for (std::size_t k = 0; k < owners.size(); ++k) opos.emplace(owners[k], k);
  for (std::size_t k = 0; k < recipients.size(); ++k) rpos.emplace(recipients[k], k);
  out.fractions = DenseMatrix(owners.size(), recipients.size());
  for (const Json& row : array_field(doc, "values")) {
    if (!row.is_array() || row.size() != 3) throw InputError("allocation value must be [owner, recipient, value]");
    auto o = opos.find(string_of(row[0], "owner id"));
    auto r = rpos.find(string_of(row[1], "recipient id"));
    if (o == opos.end() || r == rpos.end()) throw InputError("allocation references unknown agent");
    out.fractions(o->second, r->second) = real_of(row[2], "allocation value");
  }
  return out;
}

Json fisher_allocation_to_json(const FisherMarket& market, const FisherAllocation& allocation) {
  const auto& owners = allocation.buyers_to_sellers ? market.buyers : market.sellers;
  const auto& recipients = allocation.buyers_to_sellers ? market.sellers : market.buyers;
  Json values = Json::array();
  for (std::size_t o = 0; o < owners.size(); ++o) {
    for (std::size_t r = 0; r < recipients.size(); ++r) {
      if (allocation.fractions(o, r) != 0.0) values.push_back({owners[o], recipients[r], allocation.fractions(o, r)});
    }
  }
  return {{"direction", allocation.buyers_to_sellers ? "buyers_to_sellers" : "sellers_to_buyers"}, {"values", values}};
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  bool with_kl = false;
  for (const TraceRow& row : trace.rows) with_kl = with_kl || row.kl.has_value();
  out << "iter,Q,abs_err_w,eta,eta_bar,bound_abs,bound_mult" << (with_kl ? ",kl" : "") << '\n';
  for (const TraceRow& row : trace.rows) {
    out << row.iter << ',' << format_double(row.objective) << ',' << format_double(row.abs_err_w) << ','
        << format_double(row.eta) << ',' << format_double(row.eta_bar) << ',' << format_double(row.bound_abs) << ','
        << format_double(row.bound_mult);
    if (with_kl) out << ',' << (row.kl ? format_double(*row.kl) : std::string("nan"));
    out << '\n';
  }
}

}  // namespace symdens
