#include "tngpricer/scenario.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "tngpricer/errors.hpp"

namespace tngpricer {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& prefix) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(join(prefix, key), "is required");
    return *it;
}

double as_number(const json& value, const std::string& field) {
    if (!value.is_number()) throw SchemaError(field, "must be a number");
    return value.get<double>();
}

double number(const json& obj, const std::string& key, const std::string& prefix) {
    return as_number(require(obj, key, prefix), join(prefix, key));
}

double number_or(const json& obj, const std::string& key, const std::string& prefix, double fallback) {
    return obj.contains(key) ? number(obj, key, prefix) : fallback;
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, key, prefix);
}

std::optional<std::size_t> optional_count(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) return std::nullopt;
    const json& value = obj.at(key);
    if (!value.is_number_integer() || value.get<long long>() < 1) throw SchemaError(join(prefix, key), "must be a positive integer");
    return value.get<std::size_t>();
}

std::string text(const json& obj, const std::string& key, const std::string& prefix) {
    const json& value = require(obj, key, prefix);
    if (!value.is_string()) throw SchemaError(join(prefix, key), "must be a string");
    return value.get<std::string>();
}

std::string text_or(const json& obj, const std::string& key, const std::string& prefix, std::string fallback) {
    return obj.contains(key) ? text(obj, key, prefix) : fallback;
}

const json& object(const json& obj, const std::string& key, const std::string& prefix) {
    const json& value = require(obj, key, prefix);
    if (!value.is_object()) throw SchemaError(join(prefix, key), "must be an object");
    return value;
}

const json& array(const json& obj, const std::string& key, const std::string& prefix) {
    const json& value = require(obj, key, prefix);
    if (!value.is_array()) throw SchemaError(join(prefix, key), "must be an array");
    return value;
}

std::string indexed(const std::string& name, std::size_t k) { return name + "[" + std::to_string(k) + "]"; }

Firm parse_firm(const json& obj, const std::string& prefix, const FlatCurve& curve) {
    if (!obj.is_object()) throw SchemaError(prefix, "must be an object");
    Firm firm;
    firm.id = text(obj, "id", prefix);
    firm.v0 = number(obj, "v0", prefix);
    firm.sigma = number(obj, "sigma", prefix);
    firm.barrier = number(obj, "barrier", prefix);
    firm.alpha = number_or(obj, "alpha", prefix, 0.0);
    firm.mu = number_or(obj, "mu", prefix, curve.r);  // risk-neutral drift unless overridden
    validate(firm, prefix);
    return firm;
}

TNGContract parse_contract(const json& obj, const std::string& prefix, std::size_t k) {
    if (!obj.is_object()) throw SchemaError(prefix, "must be an object");
    TNGContract contract;
    contract.id = text_or(obj, "id", prefix, "tng-" + std::to_string(k));
    contract.obligor_id = text(obj, "obligor_id", prefix);
    contract.guarantor_id = text_or(obj, "guarantor_id", prefix, "");
    contract.tax_amount = number(obj, "tax_amount", prefix);
    contract.initiation = number_or(obj, "initiation", prefix, 0.0);
    contract.maturity = number(obj, "maturity", prefix);
    contract.contract_rate = number_or(obj, "contract_rate", prefix, 0.0);
    validate(contract, prefix);
    return contract;
}

CdoParams parse_cdo(const json& obj, const std::string& prefix) {
    CdoParams cdo;
    const json& tranches = array(obj, "tranches", prefix);
    for (std::size_t k = 0; k < tranches.size(); ++k) {
        const std::string at = indexed(join(prefix, "tranches"), k);
        const json& t = tranches[k];
        if (!t.is_object()) throw SchemaError(at, "must be an object");
        Tranche tranche;
        tranche.attachment = number(t, "attachment", at);
        tranche.detachment = number(t, "detachment", at);
        const std::string fallback = k == 0 ? "equity" : (k + 1 == tranches.size() ? "senior" : "mezzanine");
        const std::string label = text_or(t, "label", at, fallback);
        try {
            tranche.label = parse_tranche_label(label);
        } catch (const DomainError&) {
            throw SchemaError(join(at, "label"), "must be one of equity | mezzanine | senior");
        }
        cdo.tranches.push_back(tranche);
    }
    cdo.recovery = optional_number(obj, "recovery", prefix);
    cdo.maturity = number(obj, "maturity", prefix);
    cdo.premium_frequency = number_or(obj, "premium_frequency", prefix, 4.0);

    // Structural checks mirror CDOSpec validation; the pool is attached later.
    CDOSpec probe{Pool(std::vector<PoolEntry>{}), cdo.tranches, cdo.recovery.value_or(0.4), cdo.maturity, cdo.premium_frequency};
    validate(probe, prefix);
    return cdo;
}

}  // namespace

const Firm& Scenario::firm(const std::string& id) const {
    for (const auto& f : firms)
        if (f.id == id) return f;
    throw ReferenceError("unknown firm id '" + id + "'");
}

Scenario parse_scenario(const std::string& source, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw SchemaError("(root)", "must be a JSON object");
    if (root.contains("schema") && root["schema"] != kScenarioSchema)
        throw SchemaError("schema", std::string("unsupported schema, expected ") + kScenarioSchema);

    Scenario scenario;
    const json& curve = object(root, "curve", "");
    scenario.curve.r = number(curve, "r", "curve");
    validate(scenario.curve);

    const json& firms = array(root, "firms", "");
    std::unordered_set<std::string> firm_ids;
    for (std::size_t k = 0; k < firms.size(); ++k) {
        Firm firm = parse_firm(firms[k], indexed("firms", k), scenario.curve);
        if (!firm_ids.insert(firm.id).second)
            throw SchemaError(indexed("firms", k) + ".id", "duplicate firm id '" + firm.id + "'");
        scenario.firms.push_back(std::move(firm));
    }

    if (root.contains("contracts")) {
        const json& contracts = array(root, "contracts", "");
        std::unordered_set<std::string> obligors;
        for (std::size_t k = 0; k < contracts.size(); ++k) {
            const std::string at = indexed("contracts", k);
            TNGContract contract = parse_contract(contracts[k], at, k);
            if (!firm_ids.contains(contract.obligor_id))
                throw ReferenceError(at + ".obligor_id: unknown obligor_id '" + contract.obligor_id + "'");
            if (!obligors.insert(contract.obligor_id).second)
                throw ReferenceError(at + ".obligor_id: obligor '" + contract.obligor_id + "' already carries a contract");
            scenario.contracts.push_back(std::move(contract));
        }
    }

    scenario.valuation_time = optional_number(root, "valuation_time", "");
    if (scenario.valuation_time && *scenario.valuation_time < 0.0)
        throw SchemaError("valuation_time", "must be nonnegative");

    if (root.contains("perpetual")) {
        const json& perpetual = array(root, "perpetual", "");
        for (std::size_t k = 0; k < perpetual.size(); ++k) {
            const std::string at = indexed("perpetual", k);
            PerpetualRequest request{text(perpetual[k], "firm_id", at), number(perpetual[k], "coupon_rate", at)};
            if (!firm_ids.contains(request.firm_id))
                throw ReferenceError(at + ".firm_id: unknown firm id '" + request.firm_id + "'");
            if (!(request.coupon_rate > 0.0)) throw SchemaError(at + ".coupon_rate", "must be positive");
            scenario.perpetual.push_back(std::move(request));
        }
    }

    if (root.contains("pde")) {
        const json& pde = object(root, "pde", "");
        PdeRequest request;
        request.face = number_or(pde, "face", "pde", request.face);
        if (pde.contains("firm_id")) {
            const std::string id = text(pde, "firm_id", "pde");
            if (!firm_ids.contains(id)) throw ReferenceError("pde.firm_id: unknown firm id '" + id + "'");
            request.sigma = scenario.firm(id).sigma;
        }
        request.sigma = number_or(pde, "sigma", "pde", request.sigma);
        request.v_min = number_or(pde, "v_min", "pde", request.v_min);
        request.v_max = number_or(pde, "v_max", "pde", request.v_max);
        request.dv = number_or(pde, "dv", "pde", request.dv);
        request.tau_min = number_or(pde, "tau_min", "pde", request.tau_min);
        request.tau_max = number_or(pde, "tau_max", "pde", request.tau_max);
        request.dtau = number_or(pde, "dtau", "pde", request.dtau);
        if (!(request.face > 0.0)) throw SchemaError("pde.face", "must be positive");
        if (!(request.sigma > 0.0)) throw SchemaError("pde.sigma", "must be positive");
        if (!(request.v_min > 0.0 && request.v_max > request.v_min)) throw SchemaError("pde.v_max", "need 0 < v_min < v_max");
        if (!(request.tau_min >= 0.0 && request.tau_max > request.tau_min))
            throw SchemaError("pde.tau_max", "need 0 <= tau_min < tau_max");
        if (!(request.dv > 0.0)) throw SchemaError("pde.dv", "must be positive");
        if (!(request.dtau > 0.0)) throw SchemaError("pde.dtau", "must be positive");
        scenario.pde = request;
    }

    if (root.contains("cdo")) scenario.cdo = parse_cdo(object(root, "cdo", ""), "cdo");

    if (root.contains("sim")) {
        const json& sim = object(root, "sim", "");
        scenario.sim.paths = optional_count(sim, "paths", "sim");
        scenario.sim.steps = optional_count(sim, "steps", "sim");
        scenario.sim.horizon = optional_number(sim, "horizon", "sim");
        if (scenario.sim.horizon && !(*scenario.sim.horizon > 0.0)) throw SchemaError("sim.horizon", "must be positive");
        if (sim.contains("bridge")) {
            if (!sim["bridge"].is_boolean()) throw SchemaError("sim.bridge", "must be a boolean");
            scenario.sim.bridge = sim["bridge"].get<bool>();
        }
    }

    if (root.contains("calibration")) {
        const json& calibration = object(root, "calibration", "");
        scenario.correlation_matrix = base_dir / text(calibration, "matrix", "calibration");
    }
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.parent_path());
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open correlation matrix " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw ParseError(path.string() + ": empty matrix");
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw SchemaError("matrix row " + std::to_string(i), "expected " + std::to_string(n) + " columns");
        for (std::size_t j = 0; j < n; ++j) out(i, j) = rows[i][j];
    }
    return out;
}

}  // namespace tngpricer
