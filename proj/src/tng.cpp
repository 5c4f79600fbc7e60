#include "tngpricer/tng.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tngpricer/errors.hpp"

namespace tngpricer {

void validate(const TNGContract& contract, const std::string& prefix) {
    auto fail = [&](const char* field, const char* what) { throw SchemaError(prefix + "." + field, what); };
    if (contract.obligor_id.empty()) fail("obligor_id", "must name a firm");
    if (!std::isfinite(contract.tax_amount) || contract.tax_amount <= 0.0) fail("tax_amount", "must be positive");
    if (!std::isfinite(contract.initiation) || contract.initiation < 0.0) fail("initiation", "must be nonnegative");
    if (!std::isfinite(contract.maturity) || contract.maturity <= contract.initiation)
        fail("maturity", "must be later than initiation");
    if (!std::isfinite(contract.contract_rate)) fail("contract_rate", "must be finite");
}

double tng_face(const TNGContract& contract) {
    return contract.tax_amount * std::exp(contract.contract_rate * (contract.maturity - contract.initiation));
}

double tng_price(const TNGContract& contract, const Firm& firm, const FlatCurve& curve, double valuation_time) {
    if (firm.id != contract.obligor_id)
        throw DomainError("tng_price: firm '" + firm.id + "' is not the obligor '" + contract.obligor_id + "'");
    if (!(valuation_time >= contract.initiation && valuation_time < contract.maturity)) {
        std::ostringstream msg;
        msg << "tng_price: valuation time " << valuation_time << " outside [" << contract.initiation << ", "
            << contract.maturity << ")";
        throw DomainError(msg.str());
    }
    const DiscountBondSpec bond{tng_face(contract), contract.maturity - valuation_time};
    return merton_discount_bond(firm.v0, bond, curve, firm.sigma);
}

Pool::Pool(std::vector<PoolEntry> entries) : entries_(std::move(entries)) {
    for (const auto& entry : entries_) notional_ += entry.face;
}

std::vector<Firm> Pool::firms() const {
    std::vector<Firm> out;
    out.reserve(entries_.size());
    for (const auto& entry : entries_) out.push_back(entry.firm);
    return out;
}

Pool build_pool(const std::vector<TNGContract>& contracts, const std::vector<Firm>& firms) {
    if (contracts.empty()) throw DomainError("build_pool: pool is empty");
    std::unordered_map<std::string, const Firm*> by_id;
    for (const auto& firm : firms) {
        if (!by_id.emplace(firm.id, &firm).second) throw ReferenceError("build_pool: duplicate firm id '" + firm.id + "'");
    }
    std::unordered_set<std::string> used;
    std::vector<PoolEntry> entries;
    entries.reserve(contracts.size());
    for (const auto& contract : contracts) {
        const auto it = by_id.find(contract.obligor_id);
        if (it == by_id.end())
            throw ReferenceError("build_pool: unknown obligor_id '" + contract.obligor_id + "'");
        if (!used.insert(contract.obligor_id).second)
            throw ReferenceError("build_pool: obligor '" + contract.obligor_id + "' carries more than one contract");
        entries.push_back({contract, *it->second, tng_face(contract)});
    }
    return Pool(std::move(entries));
}

}  // namespace tngpricer
