#include "tngpricer/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "tngpricer/errors.hpp"
#include "tngpricer/first_passage.hpp"

namespace tngpricer {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultPaths = 100000;
constexpr std::size_t kDefaultSteps = 252;
constexpr double kDefaultRecovery = 0.4;

// Shortest round-trip representation; identical bits give identical text.
std::string fmt(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const char* schema, const json& params,
              const std::vector<std::string>& columns)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot write " + path.string());
        out_ << "# schema: " << schema << "\n# params: " << params.dump() << "\n";
        row(columns);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

json firm_json(const Firm& f) {
    return {{"id", f.id}, {"v0", f.v0}, {"mu", f.mu}, {"sigma", f.sigma}, {"barrier", f.barrier}, {"alpha", f.alpha}};
}

json contract_json(const TNGContract& c) {
    return {{"id", c.id},           {"obligor_id", c.obligor_id}, {"guarantor_id", c.guarantor_id},
            {"tax_amount", c.tax_amount}, {"initiation", c.initiation}, {"maturity", c.maturity},
            {"contract_rate", c.contract_rate}};
}

json base_params(const std::string& command, const Scenario& scenario) {
    json params;
    params["command"] = command;
    params["curve"] = {{"r", scenario.curve.r}};
    params["firms"] = json::array();
    for (const auto& f : scenario.firms) params["firms"].push_back(firm_json(f));
    params["contracts"] = json::array();
    for (const auto& c : scenario.contracts) params["contracts"].push_back(contract_json(c));
    return params;
}

json sim_json(const SimConfig& config) {
    return {{"seed", config.seed},
            {"paths", config.n_paths},
            {"steps", config.n_steps},
            {"horizon", config.horizon},
            {"bridge", config.bridge_correction}};
}

const Scenario& need_scenario(const std::optional<Scenario>& scenario, const std::string& command) {
    if (!scenario) throw SchemaError("--scenario", "command '" + command + "' needs a scenario file");
    return *scenario;
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

SimConfig sim_config(const Scenario& scenario, const RunFlags& flags, double default_horizon) {
    SimConfig config;
    config.seed = *flags.seed;
    config.n_paths = flags.paths.value_or(scenario.sim.paths.value_or(kDefaultPaths));
    config.n_steps = flags.steps.value_or(scenario.sim.steps.value_or(kDefaultSteps));
    config.horizon = scenario.sim.horizon.value_or(default_horizon);
    config.bridge_correction = flags.bridge.value_or(scenario.sim.bridge.value_or(true));
    config.threads = flags.threads;
    validate(config);
    return config;
}

void price_bond(const Scenario& scenario, const RunFlags& flags) {
    if (scenario.contracts.empty()) throw SchemaError("contracts", "price-bond needs at least one contract");
    json params = base_params("price-bond", scenario);
    if (scenario.valuation_time) params["valuation_time"] = *scenario.valuation_time;

    CsvWriter csv(flags.out_dir / "prices.csv", kPricesSchema, params,
                  {"contract_id", "obligor_id", "face", "tau", "firm_value", "sigma", "riskless_value", "price", "spread"});
    json rows = json::array();
    for (const auto& contract : scenario.contracts) {
        const Firm& firm = scenario.firm(contract.obligor_id);
        const double valuation = scenario.valuation_time.value_or(contract.initiation);
        const double price = tng_price(contract, firm, scenario.curve, valuation);
        const DiscountBondSpec bond{tng_face(contract), contract.maturity - valuation};
        const double riskless = bond.face * riskless_discount(scenario.curve, bond.maturity);
        const double spread = credit_spread(price, bond, scenario.curve);
        csv.row({contract.id, contract.obligor_id, fmt(bond.face), fmt(bond.maturity), fmt(firm.v0), fmt(firm.sigma),
                 fmt(riskless), fmt(price), fmt(spread)});
        rows.push_back({{"contract_id", contract.id}, {"price", price}, {"spread", spread}});
    }
    csv.close();
    write_json(flags.out_dir / "summary.json", {{"schema", kSummarySchema}, {"params", params}, {"prices", rows}});
}

void price_perpetual(const Scenario& scenario, const RunFlags& flags) {
    if (scenario.perpetual.empty()) throw SchemaError("perpetual", "price-perpetual needs at least one request");
    json params = base_params("price-perpetual", scenario);
    params["perpetual"] = json::array();
    for (const auto& req : scenario.perpetual)
        params["perpetual"].push_back({{"firm_id", req.firm_id}, {"coupon_rate", req.coupon_rate}});

    CsvWriter csv(flags.out_dir / "prices.csv", kPerpetualSchema, params,
                  {"firm_id", "coupon_rate", "firm_value", "sigma", "riskless_value", "price"});
    json rows = json::array();
    for (const auto& req : scenario.perpetual) {
        const Firm& firm = scenario.firm(req.firm_id);
        const double price = perpetual_coupon_bond(firm.v0, {req.coupon_rate}, scenario.curve, firm.sigma);
        csv.row({req.firm_id, fmt(req.coupon_rate), fmt(firm.v0), fmt(firm.sigma), fmt(req.coupon_rate / scenario.curve.r),
                 fmt(price)});
        rows.push_back({{"firm_id", req.firm_id}, {"price", price}});
    }
    csv.close();
    write_json(flags.out_dir / "summary.json", {{"schema", kSummarySchema}, {"params", params}, {"prices", rows}});
}

void check_pde(const Scenario& scenario, const RunFlags& flags) {
    const PdeRequest request = scenario.pde.value_or(PdeRequest{});
    json params = base_params("check-pde", scenario);
    params["pde"] = {{"face", request.face},   {"sigma", request.sigma},     {"v_min", request.v_min},
                     {"v_max", request.v_max}, {"dv", request.dv},           {"tau_min", request.tau_min},
                     {"tau_max", request.tau_max}, {"dtau", request.dtau}};

    auto run = [&](double dv, double dtau) {
        auto bond = [&](double v, double tau) {
            if (tau == 0.0) return std::min(v, request.face);
            return merton_discount_bond(v, {request.face, tau}, scenario.curve, request.sigma);
        };
        GridSurface surface = sample_surface(bond, uniform_grid(request.v_min, request.v_max, dv),
                                             uniform_grid(request.tau_min, request.tau_max, dtau));
        Matrix residual = pde_residual(surface, scenario.curve, request.sigma);
        return std::pair{std::move(surface), std::move(residual)};
    };

    const auto [surface, residual] = run(request.dv, request.dtau);
    const auto [fine_surface, fine_residual] = run(request.dv / 2, request.dtau / 2);
    const double coarse = max_relative_residual(surface, residual);
    const double fine = max_relative_residual(fine_surface, fine_residual);

    CsvWriter csv(flags.out_dir / "pde_residuals.csv", kPdeSchema, params,
                  {"tau", "max_abs_residual", "max_relative_residual"});
    double max_abs = 0.0;
    for (std::size_t j = 0; j < residual.cols(); ++j) {
        double col_abs = 0.0, col_rel = 0.0;
        for (std::size_t i = 0; i < residual.rows(); ++i) {
            col_abs = std::max(col_abs, std::abs(residual(i, j)));
            col_rel = std::max(col_rel, std::abs(residual(i, j)) / std::abs(surface.values(i + 1, j + 1)));
        }
        max_abs = std::max(max_abs, col_abs);
        csv.row({fmt(surface.tau_grid[j + 1]), fmt(col_abs), fmt(col_rel)});
    }
    csv.close();
    write_json(flags.out_dir / "summary.json",
               {{"schema", kSummarySchema},
                {"params", params},
                {"max_abs_residual", max_abs},
                {"max_relative_residual", coarse},
                {"max_relative_residual_halved", fine},
                {"refinement_ratio", fine > 0.0 ? coarse / fine : 0.0}});
}

std::vector<Firm> simulated_firms(const Scenario& scenario) {
    if (scenario.contracts.empty()) return scenario.firms;
    return build_pool(scenario.contracts, scenario.firms).firms();
}

void simulate(const Scenario& scenario, const RunFlags& flags) {
    if (scenario.firms.empty()) throw SchemaError("firms", "simulate needs at least one firm");
    const std::vector<Firm> firms = simulated_firms(scenario);
    double default_horizon = 1.0;
    if (!scenario.contracts.empty()) {
        default_horizon = 0.0;
        for (const auto& c : scenario.contracts) default_horizon = std::max(default_horizon, c.maturity - c.initiation);
    }
    const SimConfig config = sim_config(scenario, flags, default_horizon);
    json params = base_params("simulate", scenario);
    params["sim"] = sim_json(config);

    const DefaultTable table = simulate_defaults(firms, config);
    std::vector<double> times(config.n_steps);
    for (std::size_t k = 0; k < config.n_steps; ++k)
        times[k] = config.horizon * static_cast<double>(k + 1) / static_cast<double>(config.n_steps);

    const double n = static_cast<double>(config.n_paths);
    CsvWriter csv(flags.out_dir / "survival.csv", kSurvivalSchema, params,
                  {"firm_id", "time", "survival", "standard_error", "analytic_survival"});
    json firm_stats = json::array();
    for (const auto& firm : firms) {
        const auto curve = survival_curve(table, firm.id, times);
        const BarrierParams barrier = barrier_params(firm);
        for (std::size_t k = 0; k < times.size(); ++k) {
            csv.row({firm.id, fmt(times[k]), fmt(curve[k]), fmt(std::sqrt(curve[k] * (1.0 - curve[k]) / n)),
                     fmt(1.0 - first_passage_probability(barrier, times[k]))});
        }
        const double pd = 1.0 - curve.back();
        firm_stats.push_back({{"firm_id", firm.id},
                              {"default_probability", pd},
                              {"standard_error", std::sqrt(pd * (1.0 - pd) / n)},
                              {"analytic_default_probability", first_passage_probability(barrier, config.horizon)}});
    }
    csv.close();

    json correlations = json::array();
    for (std::size_t a = 0; a < firms.size(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < firms.size(); ++b) {
            const auto rho = pairwise_default_correlation(table, firms[a].id, firms[b].id, config.horizon);
            row.push_back(rho ? json(*rho) : json(nullptr));
        }
        correlations.push_back(row);
    }
    write_json(flags.out_dir / "summary.json", {{"schema", kSummarySchema},
                                                {"params", params},
                                                {"firms", firm_stats},
                                                {"default_correlation", correlations}});
}

void price_cdo(const Scenario& scenario, const RunFlags& flags) {
    if (!scenario.cdo) throw SchemaError("cdo", "price-cdo needs a cdo block");
    const CdoParams& cdo = *scenario.cdo;
    CDOSpec spec{build_pool(scenario.contracts, scenario.firms), cdo.tranches,
                 flags.recovery.value_or(cdo.recovery.value_or(kDefaultRecovery)), cdo.maturity, cdo.premium_frequency};
    validate(spec);
    const SimConfig config = sim_config(scenario, flags, cdo.maturity);
    if (config.horizon < spec.maturity) throw SchemaError("sim.horizon", "must not be shorter than cdo.maturity");

    json params = base_params("price-cdo", scenario);
    params["sim"] = sim_json(config);
    json tranches = json::array();
    for (const auto& t : spec.tranches)
        tranches.push_back({{"label", to_string(t.label)}, {"attachment", t.attachment}, {"detachment", t.detachment}});
    params["cdo"] = {{"tranches", tranches},
                     {"recovery", spec.recovery},
                     {"maturity", spec.maturity},
                     {"premium_frequency", spec.premium_frequency},
                     {"pool_notional", spec.pool.notional()}};

    const DefaultTable table = simulate_defaults(spec.pool.firms(), config);
    const auto reports = price_tranches(table, spec, scenario.curve);

    CsvWriter csv(flags.out_dir / "tranches.csv", kTranchesSchema, params,
                  {"label", "attachment", "detachment", "expected_loss", "standard_error", "terminal_loss", "premium_leg",
                   "fair_spread", "spread_standard_error"});
    json rows = json::array();
    for (const auto& r : reports) {
        csv.row({std::string(to_string(r.tranche.label)), fmt(r.tranche.attachment), fmt(r.tranche.detachment),
                 fmt(r.expected_loss), fmt(r.standard_error), fmt(r.terminal_loss), fmt(r.premium_leg),
                 r.fair_spread ? fmt(*r.fair_spread) : "unpriceable", fmt(r.spread_standard_error)});
        rows.push_back({{"label", to_string(r.tranche.label)},
                        {"expected_loss", r.expected_loss},
                        {"standard_error", r.standard_error},
                        {"fair_spread", r.fair_spread ? json(*r.fair_spread) : json(nullptr)}});
    }
    csv.close();

    std::vector<std::string> columns{"path_id", "pool_loss"};
    for (std::size_t k = 0; k < spec.tranches.size(); ++k) columns.push_back("tranche_" + std::to_string(k) + "_loss");
    CsvWriter losses(flags.out_dir / "path_losses.csv", kPathLossesSchema, params, columns);
    for (std::size_t p = 0; p < table.n_paths(); ++p) {
        const double pool_loss = pool_loss_path(table, p, spec, spec.maturity);
        std::vector<std::string> cells{std::to_string(p), fmt(pool_loss)};
        for (const auto& t : spec.tranches) cells.push_back(fmt(tranche_loss(pool_loss, t)));
        losses.row(cells);
    }
    losses.close();
    write_json(flags.out_dir / "summary.json", {{"schema", kSummarySchema}, {"params", params}, {"tranches", rows}});
}

void calibrate(const std::optional<Scenario>& scenario, const RunFlags& flags) {
    std::optional<std::filesystem::path> source = flags.matrix;
    if (!source && scenario) source = scenario->correlation_matrix;
    if (!source) throw SchemaError("--matrix", "calibrate needs a correlation matrix file");
    const Matrix target = load_matrix_csv(*source);
    const CalibrationResult fit = calibrate_alphas(target);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < fit.alphas.size(); ++i) {
        const bool named = scenario && scenario->firms.size() == fit.alphas.size();
        names.push_back(named ? scenario->firms[i].id : std::to_string(i));
    }
    json matrix = json::array();
    for (std::size_t i = 0; i < target.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < target.cols(); ++j) row.push_back(target(i, j));
        matrix.push_back(row);
    }
    json params = {{"command", "calibrate"}, {"target", matrix}, {"names", names}};
    CsvWriter csv(flags.out_dir / "alphas.csv", kAlphasSchema, params, {"name", "alpha"});
    for (std::size_t i = 0; i < fit.alphas.size(); ++i) csv.row({names[i], fmt(fit.alphas[i])});
    csv.close();
    write_json(flags.out_dir / "summary.json", {{"schema", kSummarySchema},
                                                {"params", params},
                                                {"alphas", fit.alphas},
                                                {"objective", fit.objective},
                                                {"sweeps", fit.sweeps}});
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"price-bond", "price-perpetual", "check-pde",
                                                "simulate",   "price-cdo",       "calibrate"};
    return names;
}

bool is_randomized(const std::string& command) { return command == "simulate" || command == "price-cdo"; }

void run_command(const std::string& command, const std::optional<Scenario>& scenario, const RunFlags& flags) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end())
        throw DomainError("unknown command '" + command + "'");
    if (is_randomized(command) && !flags.seed) throw DomainError("command '" + command + "' requires an explicit --seed");
    if (flags.recovery && !(*flags.recovery >= 0.0 && *flags.recovery <= 1.0))
        throw SchemaError("--recovery", "must lie in [0, 1]");
    ensure_out_dir(flags.out_dir);

    if (command == "calibrate") return calibrate(scenario, flags);
    const Scenario& s = need_scenario(scenario, command);
    if (command == "price-bond") return price_bond(s, flags);
    if (command == "price-perpetual") return price_perpetual(s, flags);
    if (command == "check-pde") return check_pde(s, flags);
    if (command == "simulate") return simulate(s, flags);
    price_cdo(s, flags);
}

int exit_status(const Error& error) noexcept {
    switch (error.category()) {
        case ErrorCategory::validation: return kExitValidation;
        case ErrorCategory::numeric: return kExitNumeric;
        case ErrorCategory::io: return kExitIo;
    }
    return 1;
}

}  // namespace tngpricer
