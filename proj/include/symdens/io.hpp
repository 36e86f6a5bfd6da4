#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symdens/decomposition.hpp"
#include "symdens/instance.hpp"
#include "symdens/iterative.hpp"
#include "symdens/market.hpp"
#include "symdens/power.hpp"

namespace symdens {

using Json = nlohmann::json;

// Parses text as JSON; syntax errors become InputError.
Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);

Instance instance_from_json(const Json& doc);
Json instance_to_json(const Instance& instance);
Instance load_instance(std::string_view text);

Refinement refinement_from_json(const Instance& instance, const Json& doc);
Json refinement_to_json(const Instance& instance, const Refinement& alpha);

// Infinite densities are written as the string "inf".
Json decomposition_to_json(const Instance& instance, const DensityDecomposition& decomp);
DensityDecomposition decomposition_from_json(const Instance& instance, const Json& doc);

Json curve_to_json(const PowerFunction& g);
PowerFunction curve_from_json(const Json& doc);
void write_curve_csv(std::ostream& out, const PowerFunction& g);

FisherMarket market_from_json(const Json& doc);
Json market_to_json(const FisherMarket& market);

// Fisher allocations: "buyers_to_sellers" holds buyer spending fractions
// b(i, j) / B_i, "sellers_to_buyers" holds goods fractions x(j, i).
struct FisherAllocation {
  bool buyers_to_sellers = true;
  DenseMatrix fractions;  // owner x recipient
};
FisherAllocation fisher_allocation_from_json(const FisherMarket& market, const Json& doc);
Json fisher_allocation_to_json(const FisherMarket& market, const FisherAllocation& allocation);

// Numbers that may be infinite or NaN are written as strings.
Json number_or_string(double v);
double number_from_json(const Json& v);

std::string format_double(double v);
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

}  // namespace symdens
