#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tngpricer/first_passage.hpp"
#include "tngpricer/market_model.hpp"
#include "tngpricer/tng.hpp"

namespace tngpricer {

enum class TrancheLabel { equity, mezzanine, senior };

std::string_view to_string(TrancheLabel label) noexcept;
/// Throws DomainError for anything other than equity | mezzanine | senior.
TrancheLabel parse_tranche_label(std::string_view text);

/// Slice [attachment, detachment) of pool notional, as fractions.
struct Tranche {
    double attachment = 0.0;
    double detachment = 1.0;
    TrancheLabel label = TrancheLabel::equity;

    double width() const noexcept { return detachment - attachment; }
};

struct CDOSpec {
    Pool pool;
    std::vector<Tranche> tranches;  // contiguous, ascending, covering [0, 1]
    double recovery = 0.4;
    double maturity = 0.0;
    double premium_frequency = 4.0;
};

void validate(const CDOSpec& spec, const std::string& prefix = "cdo");

/// Waterfall: min(max(L - a, 0), d - a) / (d - a).
double tranche_loss(double pool_loss_fraction, const Tranche& tranche) noexcept;

/// Sum over contracts defaulted by t of (1 - R) face / pool notional.
double pool_loss_path(const DefaultTable& table, std::size_t path, const CDOSpec& spec, double t);

struct TrancheReport {
    Tranche tranche;
    double expected_loss = 0.0;           // discounted, fraction of tranche notional
    double standard_error = 0.0;          // of expected_loss
    double terminal_loss = 0.0;           // undiscounted mean loss fraction at maturity
    double premium_leg = 0.0;             // risky annuity per unit spread
    std::optional<double> fair_spread;    // empty when the tranche cannot be priced
    double spread_standard_error = 0.0;
};

/// Monte Carlo tranche valuation over a completed simulation.
///
/// Protection leg: each default's incremental tranche loss discounted from its
/// default time. Premium leg: sum over premium dates of accrual x discount x
/// outstanding tranche notional. Paths are accumulated in path-id order.
std::vector<TrancheReport> price_tranches(const DefaultTable& table, const CDOSpec& spec, const FlatCurve& curve);

struct LossEstimate {
    double expected_loss = 0.0;
    double standard_error = 0.0;
};

std::vector<LossEstimate> expected_tranche_loss(const DefaultTable& table, const CDOSpec& spec,
                                                const FlatCurve& curve);

/// Spread equating premium and protection legs; 0 when no loss is possible and
/// empty when the premium leg vanishes while protection does not.
std::vector<std::optional<double>> tranche_fair_spread(const DefaultTable& table, const CDOSpec& spec,
                                                       const FlatCurve& curve);

/// Standard equity / mezzanine / senior labels for a list of cut points
/// 0 = c0 < c1 < ... < cn = 1.
std::vector<Tranche> tranches_from_cuts(const std::vector<double>& cuts);

}  // namespace tngpricer
