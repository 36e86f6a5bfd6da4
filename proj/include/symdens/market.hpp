#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "symdens/instance.hpp"

namespace symdens {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Linear exchange market; valuation(i, j) is agent i's value per unit of
// agent j's good.
struct ArrowDebreuMarket {
  std::vector<std::string> agents;
  DenseMatrix valuation;
  std::optional<std::vector<Side>> labels;
};

void validate_market(const ArrowDebreuMarket& market);

// share(owner, recipient) is the fraction of the owner's good given away.
// Only rows listed in `owners` are meaningful.
struct Allocation {
  std::vector<std::size_t> owners;
  DenseMatrix share;
};

std::vector<double> utilities(const ArrowDebreuMarket& market, const Allocation& allocation);

struct MarketViolation {
  std::size_t owner = 0;
  std::size_t recipient = 0;
  std::size_t best = 0;
};

struct MarketMaximinReport {
  bool ok = true;
  std::vector<MarketViolation> violations;
};

// Shares above `tol` count as positive; argmin membership is within `tol`
// relative.
MarketMaximinReport is_locally_maximin_allocation(const ArrowDebreuMarket& market, const Allocation& allocation,
                                                  double tol = kRelTol);

// Whether positive prices support the complete allocation as an equilibrium.
bool is_arrow_debreu_equilibrium(const ArrowDebreuMarket& market, const Allocation& allocation, double tol = kRelTol);

// Response of the other side of a bipartite-labeled market.
Allocation allocation_proportional_response(const ArrowDebreuMarket& market, const Allocation& allocation);

struct FisherMarket {
  std::vector<std::string> buyers;
  std::vector<double> budgets;
  std::vector<std::string> sellers;
  DenseMatrix valuation;  // buyers x sellers

  double seller_value(std::size_t seller, std::size_t buyer) const {
    return valuation(buyer, seller) > 0.0 ? budgets[buyer] : 0.0;
  }
};

void validate_market(const FisherMarket& market);

// Buyers become agents 0..B-1 (side 0), sellers follow (side 1).
ArrowDebreuMarket to_arrow_debreu(const FisherMarket& market);

// Buyers are the chosen side with budgets w(i); buyer i values seller j at
// w(j) when ij is an edge.
FisherMarket symmetric_fisher_market(const Instance& instance, Side buyers);

struct BuyerCheck {
  bool best_ratio = false;       // spending only on maximal value per price
  bool locally_maximin = false;  // local maximin on the buyers' goods
  bool agree = false;
  bool equilibrium() const { return best_ratio && locally_maximin; }
};

// b(i, j) is buyer i's spending on seller j.
BuyerCheck check_fisher_equilibrium_buyers(const FisherMarket& market, const DenseMatrix& spending,
                                           double tol = kRelTol);

struct SellerCheck {
  bool sellers_maximin = false;
  bool buyers_equilibrium = false;  // buyer check on the derived spending
  bool agree = false;
  bool equilibrium() const { return sellers_maximin; }
};

// x(j, i) is the fraction of seller j's good held by buyer i.
SellerCheck check_fisher_equilibrium_sellers(const FisherMarket& market, const DenseMatrix& goods,
                                             double tol = kRelTol);

std::vector<double> buyer_utilities(const FisherMarket& market, const DenseMatrix& goods);
std::vector<double> prices(const DenseMatrix& spending);

// Proportional responses between spending and goods.
DenseMatrix goods_from_spending(const FisherMarket& market, const DenseMatrix& spending);
DenseMatrix spending_from_goods(const FisherMarket& market, const DenseMatrix& goods);

struct FisherDynamics {
  DenseMatrix spending;
  DenseMatrix goods;
  std::size_t rounds = 0;
  bool converged = false;
};

// Alternating proportional response from an even split of each budget over
// positively valued goods; stops once spending moves by at most tol * B_i.
FisherDynamics run_fisher_dynamics(const FisherMarket& market, std::size_t max_rounds, double tol);

struct CounterexampleReport {
  bool locally_maximin = false;
  bool equilibrium = false;
  bool pr_involution = false;
};

struct ArrowDebreuCounterexample {
  ArrowDebreuMarket market;
  Allocation exchange;     // 0 <-> 1 and 2 <-> 3
  Allocation equilibrium;  // agent i receives all of good i+1
  CounterexampleReport report;
};

// Four agents on a cycle with w_i(i+1) = 2 and w_i(i-1) = 1.
ArrowDebreuCounterexample arrow_debreu_counterexample();

}  // namespace symdens
