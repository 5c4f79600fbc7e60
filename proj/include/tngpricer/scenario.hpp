#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tngpricer/analytic_pricing.hpp"
#include "tngpricer/cdo.hpp"
#include "tngpricer/market_model.hpp"
#include "tngpricer/tng.hpp"

namespace tngpricer {

inline constexpr const char* kScenarioSchema = "tngpricer.scenario/1";

struct PerpetualRequest {
    std::string firm_id;
    double coupon_rate = 0.0;
};

/// Grid for the PDE residual check of the discount-bond surface.
struct PdeRequest {
    double face = 100.0;
    double sigma = 0.2;
    double v_min = 50.0;
    double v_max = 200.0;
    double dv = 0.25;
    double tau_min = 0.5;
    double tau_max = 2.0;
    double dtau = 1.0 / 512.0;
};

struct CdoParams {
    std::vector<Tranche> tranches;
    std::optional<double> recovery;
    double maturity = 0.0;
    double premium_frequency = 4.0;
};

struct SimParams {
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<double> horizon;
    std::optional<bool> bridge;
};

struct Scenario {
    FlatCurve curve;
    std::vector<Firm> firms;
    std::vector<TNGContract> contracts;
    std::optional<double> valuation_time;
    std::vector<PerpetualRequest> perpetual;
    std::optional<PdeRequest> pde;
    std::optional<CdoParams> cdo;
    SimParams sim;
    std::optional<std::filesystem::path> correlation_matrix;  // resolved against the scenario's directory

    const Firm& firm(const std::string& id) const;
};

/// Reads and fully validates a scenario file. Throws IoError (unreadable),
/// ParseError (malformed JSON), SchemaError (field path + reason) or
/// ReferenceError (dangling obligor / firm id).
Scenario load_scenario(const std::filesystem::path& path);

/// Same as load_scenario on in-memory text; relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});

/// Square correlation matrix from CSV (comma separated, '#' comment lines allowed).
Matrix load_matrix_csv(const std::filesystem::path& path);

}  // namespace tngpricer
