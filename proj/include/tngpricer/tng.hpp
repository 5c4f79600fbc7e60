#pragma once

#include <string>
#include <vector>

#include "tngpricer/analytic_pricing.hpp"
#include "tngpricer/market_model.hpp"

namespace tngpricer {

/// A tax-advance agreement: the guarantor pays `tax_amount` of the obligor's
/// tax bill at `initiation`; the obligor repays the advance, accrued at
/// `contract_rate`, as a single bullet at `maturity`. Times are in years.
struct TNGContract {
    std::string id;
    std::string obligor_id;
    std::string guarantor_id;
    double tax_amount = 0.0;
    double initiation = 0.0;
    double maturity = 0.0;
    double contract_rate = 0.0;
};

void validate(const TNGContract& contract, const std::string& prefix = "contract");

/// Repayment owed at maturity: T1 exp(r_c (T - t0)).
double tng_face(const TNGContract& contract);

/// The contract as a Merton zero-coupon bond on the obligor, valued at
/// `valuation_time` in [initiation, maturity) with V = firm.v0.
double tng_price(const TNGContract& contract, const Firm& firm, const FlatCurve& curve, double valuation_time);

struct PoolEntry {
    TNGContract contract;
    Firm firm;
    double face = 0.0;
};

/// Matched contract/obligor pairs, in contract order.
class Pool {
public:
    explicit Pool(std::vector<PoolEntry> entries);

    const std::vector<PoolEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double notional() const noexcept { return notional_; }

    /// Obligor firms in pool order (the simulation's firm order).
    std::vector<Firm> firms() const;

private:
    std::vector<PoolEntry> entries_;
    double notional_ = 0.0;
};

/// Resolves each contract's obligor. Rejects an empty pool, duplicate firm ids,
/// unknown obligors, and two contracts on the same obligor.
Pool build_pool(const std::vector<TNGContract>& contracts, const std::vector<Firm>& firms);

}  // namespace tngpricer
