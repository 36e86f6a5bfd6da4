#include "symdens/market.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "linear_feasibility.hpp"
#include "symdens/errors.hpp"

namespace symdens {

namespace {

void require_finite_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be finite and nonnegative");
}

void validate_allocation(const ArrowDebreuMarket& market, const Allocation& allocation) {
  const std::size_t n = market.agents.size();
  if (allocation.share.rows() != n || allocation.share.cols() != n) {
    throw InputError("allocation does not match the market's agents");
  }
  std::set<std::size_t> seen;
  for (std::size_t owner : allocation.owners) {
    if (owner >= n || !seen.insert(owner).second) throw InputError("allocation owners are invalid");
    KahanSum row;
    for (std::size_t k = 0; k < n; ++k) {
      require_finite_nonnegative(allocation.share(owner, k), "allocation share");
      row.add(allocation.share(owner, k));
    }
    if (std::abs(row.value() - 1.0) > kRelTol) {
      throw InputError("allocation of '" + market.agents[owner] + "' is incomplete");
    }
  }
}

// Mutual-interest ratio u_k / (w_k(i) w_i(k)), +inf without mutual interest.
double interest_ratio(const ArrowDebreuMarket& market, const std::vector<double>& u, std::size_t i, std::size_t k) {
  const double product = market.valuation(k, i) * market.valuation(i, k);
  return product > 0.0 ? u[k] / product : kInfinity;
}

void validate_spending(const FisherMarket& market, const DenseMatrix& spending) {
  if (spending.rows() != market.buyers.size() || spending.cols() != market.sellers.size()) {
    throw InputError("spending matrix does not match the market");
  }
  for (std::size_t i = 0; i < spending.rows(); ++i) {
    KahanSum row;
    for (std::size_t j = 0; j < spending.cols(); ++j) {
      require_finite_nonnegative(spending(i, j), "spending");
      row.add(spending(i, j));
    }
    if (std::abs(row.value() - market.budgets[i]) > kRelTol * market.budgets[i]) {
      throw InputError("buyer '" + market.buyers[i] + "' does not spend exactly its budget");
    }
  }
}

void validate_goods(const FisherMarket& market, const DenseMatrix& goods) {
  if (goods.rows() != market.sellers.size() || goods.cols() != market.buyers.size()) {
    throw InputError("goods matrix does not match the market");
  }
  for (std::size_t j = 0; j < goods.rows(); ++j) {
    KahanSum row;
    for (std::size_t i = 0; i < goods.cols(); ++i) {
      require_finite_nonnegative(goods(j, i), "goods share");
      row.add(goods(j, i));
    }
    if (std::abs(row.value() - 1.0) > kRelTol) {
      throw InputError("good of seller '" + market.sellers[j] + "' is not fully allocated");
    }
  }
}

}  // namespace

void validate_market(const ArrowDebreuMarket& market) {
  const std::size_t n = market.agents.size();
  if (market.valuation.rows() != n || market.valuation.cols() != n) throw InputError("valuation matrix size mismatch");
  if (market.labels && market.labels->size() != n) throw InputError("label count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (market.valuation(i, i) != 0.0) throw InputError("agents must not value their own good");
    for (std::size_t j = 0; j < n; ++j) {
      require_finite_nonnegative(market.valuation(i, j), "valuation");
      if (market.labels && market.valuation(i, j) > 0.0 && (*market.labels)[i] == (*market.labels)[j]) {
        throw InputError("labeled market has a valuation inside one side");
      }
    }
  }
}

std::vector<double> utilities(const ArrowDebreuMarket& market, const Allocation& allocation) {
  validate_market(market);
  validate_allocation(market, allocation);
  const std::size_t n = market.agents.size();
  std::vector<double> u(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    KahanSum sum;
    for (std::size_t owner : allocation.owners) sum.add(market.valuation(k, owner) * allocation.share(owner, k));
    u[k] = sum.value();
  }
  return u;
}

MarketMaximinReport is_locally_maximin_allocation(const ArrowDebreuMarket& market, const Allocation& allocation,
                                                  double tol) {
  const std::vector<double> u = utilities(market, allocation);
  const std::size_t n = market.agents.size();
  MarketMaximinReport report;
  for (std::size_t i : allocation.owners) {
    std::size_t best = i;
    double lowest = kInfinity;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double r = interest_ratio(market, u, i, k);
      if (r < lowest) {
        lowest = r;
        best = k;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || !(allocation.share(i, k) > tol)) continue;
      const double r = interest_ratio(market, u, i, k);
      if (r > lowest * (1.0 + tol)) {
        report.ok = false;
        report.violations.push_back({i, k, best});
      }
    }
  }
  return report;
}

bool is_arrow_debreu_equilibrium(const ArrowDebreuMarket& market, const Allocation& allocation, double tol) {
  validate_market(market);
  validate_allocation(market, allocation);
  const std::size_t n = market.agents.size();
  if (allocation.owners.size() != n) throw InputError("equilibrium check needs every agent's good allocated");

  // Prices p = q + 1 with q >= 0; constraints are homogeneous in p.
  std::vector<detail::LinearConstraint> rows;
  auto add = [&](std::vector<double> coeff, detail::Relation rel) {
    double shift = 0.0;
    for (double c : coeff) shift += c;
    rows.push_back({std::move(coeff), rel, -shift});
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> coeff(n, 0.0);
    coeff[i] += 1.0;
    for (std::size_t j = 0; j < n; ++j) coeff[j] -= allocation.share(j, i);
    add(std::move(coeff), detail::Relation::equal);
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(allocation.share(j, i) > tol)) continue;
      // Good j must give agent i the best value per price.
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        std::vector<double> coeff(n, 0.0);
        coeff[k] += market.valuation(i, j) * (1.0 + tol);
        coeff[j] -= market.valuation(i, k);
        add(std::move(coeff), detail::Relation::at_least);
      }
    }
  }
  return detail::feasible(rows, n);
}

Allocation allocation_proportional_response(const ArrowDebreuMarket& market, const Allocation& allocation) {
  validate_market(market);
  validate_allocation(market, allocation);
  if (!market.labels) throw InputError("proportional response needs a bipartite-labeled market");
  const auto& labels = *market.labels;
  if (allocation.owners.empty()) throw InputError("allocation has no owners");
  const Side from = labels[allocation.owners.front()];
  for (std::size_t owner : allocation.owners) {
    if (labels[owner] != from) throw InputError("allocation owners span both sides");
  }
  const std::vector<double> u = utilities(market, allocation);
  const std::size_t n = market.agents.size();
  Allocation out;
  out.share = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (labels[j] == from) continue;
    if (!(u[j] > 0.0)) throw ZeroPayloadError("agent '" + market.agents[j] + "' has zero utility");
    out.owners.push_back(j);
    for (std::size_t i : allocation.owners) {
      out.share(j, i) = market.valuation(j, i) * allocation.share(i, j) / u[j];
    }
  }
  return out;
}

void validate_market(const FisherMarket& market) {
  const std::size_t nb = market.buyers.size(), ns = market.sellers.size();
  if (market.budgets.size() != nb) throw InputError("budget count mismatch");
  if (market.valuation.rows() != nb || market.valuation.cols() != ns) throw InputError("valuation matrix size mismatch");
  std::set<std::string> ids;
  for (const auto& id : market.buyers) {
    if (!ids.insert(id).second) throw InputError("duplicate agent id '" + id + "'");
  }
  for (const auto& id : market.sellers) {
    if (!ids.insert(id).second) throw InputError("duplicate agent id '" + id + "'");
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (!(market.budgets[i] > 0.0) || !std::isfinite(market.budgets[i])) {
      throw InputError("budget of '" + market.buyers[i] + "' must be positive");
    }
    bool likes_something = false;
    for (std::size_t j = 0; j < ns; ++j) {
      require_finite_nonnegative(market.valuation(i, j), "valuation");
      likes_something = likes_something || market.valuation(i, j) > 0.0;
    }
    if (!likes_something) throw InputError("buyer '" + market.buyers[i] + "' values no good");
  }
}

ArrowDebreuMarket to_arrow_debreu(const FisherMarket& market) {
  validate_market(market);
  const std::size_t nb = market.buyers.size(), ns = market.sellers.size();
  ArrowDebreuMarket out;
  out.agents = market.buyers;
  out.agents.insert(out.agents.end(), market.sellers.begin(), market.sellers.end());
  out.valuation = DenseMatrix(nb + ns, nb + ns);
  std::vector<Side> labels(nb, Side::zero);
  labels.resize(nb + ns, Side::one);
  out.labels = std::move(labels);
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      out.valuation(i, nb + j) = market.valuation(i, j);
      out.valuation(nb + j, i) = market.seller_value(j, i);
    }
  }
  return out;
}

FisherMarket symmetric_fisher_market(const Instance& instance, Side buyers) {
  const Side sellers = other(buyers);
  FisherMarket m;
  m.buyers = instance.ids(buyers);
  m.budgets = instance.weights(buyers);
  m.sellers = instance.ids(sellers);
  m.valuation = DenseMatrix(m.buyers.size(), m.sellers.size());
  for (std::size_t e = 0; e < instance.edge_count(); ++e) {
    const std::size_t j = instance.endpoint(e, sellers);
    m.valuation(instance.endpoint(e, buyers), j) = instance.weight(sellers, j);
  }
  validate_market(m);
  return m;
}

std::vector<double> prices(const DenseMatrix& spending) {
  std::vector<double> p(spending.cols(), 0.0);
  for (std::size_t j = 0; j < spending.cols(); ++j) {
    KahanSum sum;
    for (std::size_t i = 0; i < spending.rows(); ++i) sum.add(spending(i, j));
    p[j] = sum.value();
  }
  return p;
}

std::vector<double> buyer_utilities(const FisherMarket& market, const DenseMatrix& goods) {
  validate_goods(market, goods);
  std::vector<double> u(market.buyers.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    KahanSum sum;
    for (std::size_t j = 0; j < market.sellers.size(); ++j) sum.add(market.valuation(i, j) * goods(j, i));
    u[i] = sum.value();
  }
  return u;
}

DenseMatrix goods_from_spending(const FisherMarket& market, const DenseMatrix& spending) {
  validate_spending(market, spending);
  const std::vector<double> p = prices(spending);
  DenseMatrix goods(market.sellers.size(), market.buyers.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(p[j] > 0.0)) throw ZeroPayloadError("seller '" + market.sellers[j] + "' receives no spending");
    for (std::size_t i = 0; i < market.buyers.size(); ++i) goods(j, i) = spending(i, j) / p[j];
  }
  return goods;
}

DenseMatrix spending_from_goods(const FisherMarket& market, const DenseMatrix& goods) {
  const std::vector<double> u = buyer_utilities(market, goods);
  DenseMatrix spending(market.buyers.size(), market.sellers.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw ZeroPayloadError("buyer '" + market.buyers[i] + "' has zero utility");
    for (std::size_t j = 0; j < market.sellers.size(); ++j) {
      spending(i, j) = market.valuation(i, j) * goods(j, i) / u[i] * market.budgets[i];
    }
  }
  return spending;
}

BuyerCheck check_fisher_equilibrium_buyers(const FisherMarket& market, const DenseMatrix& spending, double tol) {
  validate_market(market);
  validate_spending(market, spending);
  const std::size_t nb = market.buyers.size(), ns = market.sellers.size();
  const std::vector<double> p = prices(spending);

  // Seller utilities from the buyers' goods: w_j(i) * b(i, j) / B_i.
  std::vector<double> seller_u(ns, 0.0);
  for (std::size_t j = 0; j < ns; ++j) {
    KahanSum sum;
    for (std::size_t i = 0; i < nb; ++i) sum.add(market.seller_value(j, i) * spending(i, j) / market.budgets[i]);
    seller_u[j] = sum.value();
  }

  BuyerCheck check;
  check.best_ratio = true;
  check.locally_maximin = true;
  for (std::size_t i = 0; i < nb; ++i) {
    double best_bang = 0.0;
    double lowest = kInfinity;
    for (std::size_t k = 0; k < ns; ++k) {
      const double w = market.valuation(i, k);
      if (w > 0.0) {
        best_bang = std::max(best_bang, p[k] > 0.0 ? w / p[k] : kInfinity);
        lowest = std::min(lowest, seller_u[k] / (market.budgets[i] * w));
      }
    }
    for (std::size_t j = 0; j < ns; ++j) {
      if (!(spending(i, j) > tol * market.budgets[i])) continue;
      const double w = market.valuation(i, j);
      if ((w / p[j]) * (1.0 + tol) < best_bang) check.best_ratio = false;
      const double ratio = w > 0.0 ? seller_u[j] / (market.budgets[i] * w) : kInfinity;
      if (ratio > lowest * (1.0 + tol)) check.locally_maximin = false;
    }
  }
  check.agree = check.best_ratio == check.locally_maximin;
  return check;
}

SellerCheck check_fisher_equilibrium_sellers(const FisherMarket& market, const DenseMatrix& goods, double tol) {
  validate_market(market);
  const std::vector<double> u = buyer_utilities(market, goods);
  const std::size_t nb = market.buyers.size(), ns = market.sellers.size();
  SellerCheck check;
  check.sellers_maximin = true;
  for (std::size_t j = 0; j < ns; ++j) {
    double lowest = kInfinity;
    for (std::size_t k = 0; k < nb; ++k) {
      const double w = market.valuation(k, j);
      if (w > 0.0) lowest = std::min(lowest, u[k] / (market.budgets[k] * w));
    }
    for (std::size_t i = 0; i < nb; ++i) {
      const double w = market.valuation(i, j);
      // Same support as the buyer check: share of i's utility (and budget) from j.
      const bool held = w > 0.0 ? w * goods(j, i) > tol * u[i] : goods(j, i) > tol;
      if (!held) continue;
      const double ratio = w > 0.0 ? u[i] / (market.budgets[i] * w) : kInfinity;
      if (ratio > lowest * (1.0 + tol)) check.sellers_maximin = false;
    }
  }
  const bool all_positive = std::all_of(u.begin(), u.end(), [](double v) { return v > 0.0; });
  check.buyers_equilibrium =
      all_positive && check_fisher_equilibrium_buyers(market, spending_from_goods(market, goods), tol).equilibrium();
  check.agree = check.sellers_maximin == check.buyers_equilibrium;
  return check;
}

FisherDynamics run_fisher_dynamics(const FisherMarket& market, std::size_t max_rounds, double tol) {
  validate_market(market);
  const std::size_t nb = market.buyers.size(), ns = market.sellers.size();
  FisherDynamics out;
  out.spending = DenseMatrix(nb, ns);
  for (std::size_t i = 0; i < nb; ++i) {
    double liked = 0.0;
    for (std::size_t j = 0; j < ns; ++j) liked += market.valuation(i, j) > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
      if (market.valuation(i, j) > 0.0) out.spending(i, j) = market.budgets[i] / liked;
    }
  }
  for (out.rounds = 0; out.rounds < max_rounds;) {
    const DenseMatrix next = spending_from_goods(market, goods_from_spending(market, out.spending));
    ++out.rounds;
    double delta = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = 0; j < ns; ++j) {
        delta = std::max(delta, std::abs(next(i, j) - out.spending(i, j)) / market.budgets[i]);
      }
    }
    out.spending = next;
    if (delta <= tol) {
      out.converged = true;
      break;
    }
  }
  out.goods = goods_from_spending(market, out.spending);
  return out;
}

ArrowDebreuCounterexample arrow_debreu_counterexample() {
  ArrowDebreuCounterexample out;
  const std::size_t n = 4;
  out.market.agents = {"a0", "a1", "a2", "a3"};
  out.market.valuation = DenseMatrix(n, n);
  std::vector<Side> labels;
  for (std::size_t i = 0; i < n; ++i) {
    out.market.valuation(i, (i + 1) % n) = 2.0;
    out.market.valuation(i, (i + n - 1) % n) = 1.0;
    labels.push_back(i % 2 == 0 ? Side::zero : Side::one);
  }
  out.market.labels = labels;

  out.exchange.owners = {0, 1, 2, 3};
  out.exchange.share = DenseMatrix(n, n);
  out.exchange.share(0, 1) = out.exchange.share(1, 0) = 1.0;
  out.exchange.share(2, 3) = out.exchange.share(3, 2) = 1.0;

  out.equilibrium.owners = {0, 1, 2, 3};
  out.equilibrium.share = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) out.equilibrium.share((i + 1) % n, i) = 1.0;

  out.report.locally_maximin = is_locally_maximin_allocation(out.market, out.exchange).ok;
  out.report.equilibrium = is_arrow_debreu_equilibrium(out.market, out.exchange);

  Allocation even_side{{0, 2}, out.exchange.share};
  for (std::size_t r : {1, 3}) {
    for (std::size_t c = 0; c < n; ++c) even_side.share(r, c) = 0.0;
  }
  const Allocation odd_side = allocation_proportional_response(out.market, even_side);
  const Allocation back = allocation_proportional_response(out.market, odd_side);
  bool same = true;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double expected = out.exchange.share(r, c);
      const double got = labels[r] == Side::zero ? back.share(r, c) : odd_side.share(r, c);
      same = same && std::abs(expected - got) <= kRelTol;
    }
  }
  out.report.pr_involution = same;
  return out;
}

}  // namespace symdens
