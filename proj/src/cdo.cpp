#include "tngpricer/cdo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tngpricer/errors.hpp"

namespace tngpricer {

std::string_view to_string(TrancheLabel label) noexcept {
    switch (label) {
        case TrancheLabel::equity: return "equity";
        case TrancheLabel::mezzanine: return "mezzanine";
        case TrancheLabel::senior: return "senior";
    }
    return "unknown";
}

TrancheLabel parse_tranche_label(std::string_view text) {
    if (text == "equity") return TrancheLabel::equity;
    if (text == "mezzanine") return TrancheLabel::mezzanine;
    if (text == "senior") return TrancheLabel::senior;
    throw DomainError("unknown tranche label '" + std::string(text) + "'");
}

void validate(const CDOSpec& spec, const std::string& prefix) {
    if (spec.tranches.empty()) throw SchemaError(prefix + ".tranches", "at least one tranche is required");
    double expected_attachment = 0.0;
    for (std::size_t k = 0; k < spec.tranches.size(); ++k) {
        const Tranche& tranche = spec.tranches[k];
        const std::string field = prefix + ".tranches[" + std::to_string(k) + "]";
        if (!(tranche.attachment >= 0.0 && tranche.attachment < tranche.detachment && tranche.detachment <= 1.0))
            throw SchemaError(field, "need 0 <= attachment < detachment <= 1");
        if (tranche.attachment != expected_attachment)
            throw SchemaError(field + ".attachment", "tranches must be contiguous and start at 0");
        expected_attachment = tranche.detachment;
    }
    if (expected_attachment != 1.0) throw SchemaError(prefix + ".tranches", "tranches must cover [0, 1]");
    if (!(spec.recovery >= 0.0 && spec.recovery <= 1.0)) throw SchemaError(prefix + ".recovery", "must lie in [0, 1]");
    if (!std::isfinite(spec.maturity) || spec.maturity <= 0.0) throw SchemaError(prefix + ".maturity", "must be positive");
    if (!std::isfinite(spec.premium_frequency) || spec.premium_frequency <= 0.0)
        throw SchemaError(prefix + ".premium_frequency", "must be positive");
}

double tranche_loss(double pool_loss_fraction, const Tranche& tranche) noexcept {
    const double width = tranche.width();
    return std::min(std::max(pool_loss_fraction - tranche.attachment, 0.0), width) / width;
}

namespace {

void check_alignment(const DefaultTable& table, const CDOSpec& spec) {
    if (table.n_firms() != spec.pool.size()) throw DomainError("simulation firms do not match the pool");
    for (std::size_t i = 0; i < table.n_firms(); ++i)
        if (table.firm_ids()[i] != spec.pool.entries()[i].firm.id)
            throw DomainError("simulation firm order does not match the pool at position " + std::to_string(i));
}

std::vector<double> loss_weights(const CDOSpec& spec) {
    std::vector<double> weights;
    weights.reserve(spec.pool.size());
    for (const auto& entry : spec.pool.entries())
        weights.push_back((1.0 - spec.recovery) * entry.face / spec.pool.notional());
    return weights;
}

struct PremiumDate {
    double time;
    double accrual;
};

std::vector<PremiumDate> premium_schedule(const CDOSpec& spec) {
    const auto count = static_cast<std::size_t>(std::ceil(spec.maturity * spec.premium_frequency - 1e-9));
    std::vector<PremiumDate> dates;
    double previous = 0.0;
    for (std::size_t j = 1; j <= count; ++j) {
        const double t = std::min(static_cast<double>(j) / spec.premium_frequency, spec.maturity);
        dates.push_back({t, t - previous});
        previous = t;
    }
    if (dates.empty() || dates.back().time < spec.maturity) dates.push_back({spec.maturity, spec.maturity - previous});
    return dates;
}

struct Moments {
    double prot = 0.0, prot2 = 0.0, prem = 0.0, prem2 = 0.0, cross = 0.0, terminal = 0.0;
};

}  // namespace

double pool_loss_path(const DefaultTable& table, std::size_t path, const CDOSpec& spec, double t) {
    check_alignment(table, spec);
    if (path >= table.n_paths()) throw DomainError("pool_loss_path: path out of range");
    const auto weights = loss_weights(spec);
    double loss = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (table.defaulted_by(path, i, t)) loss += weights[i];
    return std::min(loss, 1.0);
}

std::vector<TrancheReport> price_tranches(const DefaultTable& table, const CDOSpec& spec, const FlatCurve& curve) {
    validate(spec);
    check_alignment(table, spec);
    if (table.horizon() < spec.maturity) {
        std::ostringstream msg;
        msg << "simulation horizon " << table.horizon() << " is shorter than the CDO maturity " << spec.maturity;
        throw DomainError(msg.str());
    }

    const auto weights = loss_weights(spec);
    const auto schedule = premium_schedule(spec);
    std::vector<double> schedule_discount;
    for (const auto& date : schedule) schedule_discount.push_back(riskless_discount(curve, date.time));

    const std::size_t n_tranches = spec.tranches.size();
    std::vector<Moments> moments(n_tranches);
    std::vector<std::pair<double, std::size_t>> events;
    std::vector<double> protection(n_tranches), premium(n_tranches);

    for (std::size_t p = 0; p < table.n_paths(); ++p) {
        events.clear();
        for (std::size_t i = 0; i < table.n_firms(); ++i)
            if (const auto t = table.default_time(p, i); t && *t <= spec.maturity) events.emplace_back(*t, i);
        std::sort(events.begin(), events.end());

        std::fill(protection.begin(), protection.end(), 0.0);
        std::fill(premium.begin(), premium.end(), 0.0);
        double pool_loss = 0.0;
        for (const auto& [t, firm] : events) {
            const double next = std::min(pool_loss + weights[firm], 1.0);
            const double discount = riskless_discount(curve, t);
            for (std::size_t k = 0; k < n_tranches; ++k)
                protection[k] += discount * (tranche_loss(next, spec.tranches[k]) - tranche_loss(pool_loss, spec.tranches[k]));
            pool_loss = next;
        }

        // Outstanding notional at each premium date; events are sorted so walk them once.
        std::size_t cursor = 0;
        double loss_at_date = 0.0;
        for (std::size_t j = 0; j < schedule.size(); ++j) {
            while (cursor < events.size() && events[cursor].first <= schedule[j].time) {
                loss_at_date = std::min(loss_at_date + weights[events[cursor].second], 1.0);
                ++cursor;
            }
            for (std::size_t k = 0; k < n_tranches; ++k)
                premium[k] += schedule[j].accrual * schedule_discount[j] *
                              (1.0 - tranche_loss(loss_at_date, spec.tranches[k]));
        }

        for (std::size_t k = 0; k < n_tranches; ++k) {
            Moments& m = moments[k];
            m.prot += protection[k];
            m.prot2 += protection[k] * protection[k];
            m.prem += premium[k];
            m.prem2 += premium[k] * premium[k];
            m.cross += protection[k] * premium[k];
            m.terminal += tranche_loss(pool_loss, spec.tranches[k]);
        }
    }

    const double n = static_cast<double>(table.n_paths());
    std::vector<TrancheReport> reports;
    reports.reserve(n_tranches);
    for (std::size_t k = 0; k < n_tranches; ++k) {
        const Moments& m = moments[k];
        TrancheReport report;
        report.tranche = spec.tranches[k];
        report.expected_loss = m.prot / n;
        report.terminal_loss = m.terminal / n;
        report.premium_leg = m.prem / n;
        const double bessel = n > 1.0 ? n / (n - 1.0) : 0.0;
        const double var_prot = std::max(0.0, m.prot2 / n - report.expected_loss * report.expected_loss) * bessel;
        report.standard_error = std::sqrt(var_prot / n);

        if (report.expected_loss == 0.0) {
            report.fair_spread = 0.0;
        } else if (report.premium_leg > 0.0) {
            const double s = report.expected_loss / report.premium_leg;
            report.fair_spread = s;
            // delta method on the ratio of means: Var(prot - s prem) / (n premium_leg^2)
            const double var_prem = m.prem2 / n - report.premium_leg * report.premium_leg;
            const double cov = m.cross / n - report.expected_loss * report.premium_leg;
            const double var_lin = std::max(0.0, (var_prot / bessel - 2.0 * s * cov + s * s * var_prem) * bessel);
            report.spread_standard_error = std::sqrt(var_lin / n) / report.premium_leg;
        }
        reports.push_back(report);
    }
    return reports;
}

std::vector<LossEstimate> expected_tranche_loss(const DefaultTable& table, const CDOSpec& spec,
                                                const FlatCurve& curve) {
    std::vector<LossEstimate> out;
    for (const auto& report : price_tranches(table, spec, curve))
        out.push_back({report.expected_loss, report.standard_error});
    return out;
}

std::vector<std::optional<double>> tranche_fair_spread(const DefaultTable& table, const CDOSpec& spec,
                                                       const FlatCurve& curve) {
    std::vector<std::optional<double>> out;
    for (const auto& report : price_tranches(table, spec, curve)) out.push_back(report.fair_spread);
    return out;
}

std::vector<Tranche> tranches_from_cuts(const std::vector<double>& cuts) {
    if (cuts.size() < 2) throw DomainError("tranches_from_cuts: need at least two cut points");
    std::vector<Tranche> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        TrancheLabel label = TrancheLabel::mezzanine;
        if (k == 0) label = TrancheLabel::equity;
        else if (k + 2 == cuts.size()) label = TrancheLabel::senior;
        out.push_back({cuts[k], cuts[k + 1], label});
    }
    return out;
}

}  // namespace tngpricer
