#include "tngpricer/first_passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <thread>

#include "tngpricer/errors.hpp"
#include "tngpricer/numerics.hpp"

namespace tngpricer {

namespace {

constexpr double kSurvived = std::numeric_limits<double>::infinity();

struct PreparedFirm {
    double common_weight;
    double idiosyncratic_weight;
    BarrierParams barrier;
    int factor_sign;  // +-1 when |alpha| = 1: the firm's bridge is the common factor's bridge
};

std::vector<PreparedFirm> prepare(const std::vector<Firm>& firms) {
    std::vector<PreparedFirm> out;
    out.reserve(firms.size());
    for (std::size_t i = 0; i < firms.size(); ++i) {
        validate(firms[i], "firms[" + std::to_string(i) + "]");
        const double alpha = firms[i].alpha;
        const double idio = std::abs(alpha) == 1.0 ? 0.0 : std::sqrt(1.0 - alpha * alpha);
        const int sign = std::abs(alpha) == 1.0 ? (alpha > 0.0 ? 1 : -1) : 0;
        out.push_back({alpha, idio, barrier_params(firms[i]), sign});
    }
    return out;
}

double grid_time(const SimConfig& config, std::size_t k) {
    return config.horizon * static_cast<double>(k) / static_cast<double>(config.n_steps);
}

// Runs path `path_id`. default_times must hold one slot per firm, preset to kSurvived.
// When `trace` is given, row k receives X at grid time k.
void run_path(const std::vector<PreparedFirm>& firms, const SimConfig& config, std::size_t path_id,
              std::span<double> default_times, Matrix* trace) {
    RandomStream stream(config.seed, path_id);
    const double dt = config.horizon / static_cast<double>(config.n_steps);
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> x(firms.size(), 0.0);

    for (std::size_t k = 1; k <= config.n_steps; ++k) {
        const double t_prev = grid_time(config, k - 1);
        const double t = grid_time(config, k);
        const double z_common = stream.normal();
        const double u_common = stream.uniform();
        for (std::size_t i = 0; i < firms.size(); ++i) {
            const double z_idio = stream.normal();
            const double u_own = stream.uniform();
            const PreparedFirm& firm = firms[i];
            const double u = firm.factor_sign == 0 ? u_own : firm.factor_sign > 0 ? u_common : 1.0 - u_common;
            const double x_prev = x[i];
            x[i] = x_prev + sqrt_dt * (firm.common_weight * z_common + firm.idiosyncratic_weight * z_idio);
            if (trace) (*trace)(k, i) = x[i];
            if (default_times[i] != kSurvived) continue;

            const double b = firm.barrier.beta + firm.barrier.gamma * t;
            if (x[i] <= b) {
                default_times[i] = config.bridge_correction ? t_prev + 0.5 * dt : t;
            } else if (config.bridge_correction) {
                const double b_prev = firm.barrier.beta + firm.barrier.gamma * t_prev;
                // exp(-40) is below the smallest uniform the stream can emit
                const double exponent = 2.0 * (x_prev - b_prev) * (x[i] - b) / dt;
                if (exponent < 40.0 && u < std::exp(-exponent)) default_times[i] = t_prev + 0.5 * dt;
            }
        }
    }
}

unsigned resolve_threads(unsigned requested, std::size_t n_paths) {
    unsigned threads = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n_paths)));
}

}  // namespace

void validate(const SimConfig& config, const std::string& prefix) {
    if (config.n_paths < 1) throw SchemaError(prefix + ".paths", "must be at least 1");
    if (config.n_steps < 1) throw SchemaError(prefix + ".steps", "must be at least 1");
    if (!std::isfinite(config.horizon) || config.horizon <= 0.0) throw SchemaError(prefix + ".horizon", "must be positive");
}

double first_passage_probability(const BarrierParams& barrier, double t) {
    if (!(t >= 0.0)) throw DomainError("first_passage_probability: t must be nonnegative");
    if (barrier.beta >= 0.0) return 1.0;
    if (t == 0.0) return 0.0;
    // W_s - gamma s first reaching beta < 0
    const double drift = -barrier.gamma;
    const double root_t = std::sqrt(t);
    return norm_cdf((barrier.beta - drift * t) / root_t) +
           std::exp(2.0 * drift * barrier.beta) * norm_cdf((barrier.beta + drift * t) / root_t);
}

DefaultTable::DefaultTable(std::vector<std::string> firm_ids, std::size_t n_paths, double horizon)
    : firm_ids_(std::move(firm_ids)), n_paths_(n_paths), horizon_(horizon),
      times_(n_paths * firm_ids_.size(), kSurvived) {}

std::size_t DefaultTable::firm_index(const std::string& firm_id) const {
    const auto it = std::find(firm_ids_.begin(), firm_ids_.end(), firm_id);
    if (it == firm_ids_.end()) throw DomainError("unknown firm id '" + firm_id + "'");
    return static_cast<std::size_t>(it - firm_ids_.begin());
}

std::optional<double> DefaultTable::default_time(std::size_t path, std::size_t firm) const {
    const double t = times_[path * firm_ids_.size() + firm];
    if (t == kSurvived) return std::nullopt;
    return t;
}

DefaultRecord DefaultTable::record(std::size_t path, std::size_t firm) const {
    return {path, firm_ids_[firm], default_time(path, firm)};
}

std::vector<DefaultRecord> DefaultTable::records() const {
    std::vector<DefaultRecord> out;
    out.reserve(times_.size());
    for (std::size_t p = 0; p < n_paths_; ++p)
        for (std::size_t i = 0; i < firm_ids_.size(); ++i) out.push_back(record(p, i));
    return out;
}

double bridge_crossing_probability(double x_start, double x_end, double b_start, double b_end, double dt) {
    if (!(dt > 0.0)) throw DomainError("bridge_crossing_probability: dt must be positive");
    const double start_gap = x_start - b_start;
    const double end_gap = x_end - b_end;
    if (!(start_gap > 0.0) || !(end_gap > 0.0))
        throw DomainError("bridge_crossing_probability: endpoint at or below the barrier");
    return std::exp(-2.0 * start_gap * end_gap / dt);
}

DefaultTable simulate_defaults(const std::vector<Firm>& firms, const SimConfig& config) {
    validate(config);
    if (firms.empty()) throw DomainError("simulate_defaults: no firms");
    const auto prepared = prepare(firms);

    std::vector<std::string> ids;
    ids.reserve(firms.size());
    for (const auto& firm : firms) ids.push_back(firm.id);
    DefaultTable table(std::move(ids), config.n_paths, config.horizon);

    const std::size_t n_firms = firms.size();
    auto& slots = table.raw();
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p)
            run_path(prepared, config, p, std::span<double>(slots.data() + p * n_firms, n_firms), nullptr);
    };

    const unsigned threads = resolve_threads(config.threads, config.n_paths);
    if (threads == 1) {
        run_range(0, config.n_paths);
        return table;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = config.n_paths * w / threads;
        const std::size_t end = config.n_paths * (w + 1) / threads;
        workers.emplace_back(run_range, begin, end);
    }
    return table;
}

PathTrace trace_path(const std::vector<Firm>& firms, const SimConfig& config, std::size_t path_id) {
    validate(config);
    const auto prepared = prepare(firms);
    PathTrace trace;
    trace.times.resize(config.n_steps + 1);
    for (std::size_t k = 0; k <= config.n_steps; ++k) trace.times[k] = grid_time(config, k);
    trace.x = Matrix(config.n_steps + 1, firms.size());
    std::vector<double> defaults(firms.size(), kSurvived);
    run_path(prepared, config, path_id, defaults, &trace.x);
    for (double t : defaults) trace.default_time.push_back(t == kSurvived ? std::nullopt : std::optional<double>(t));
    return trace;
}

std::vector<double> survival_curve(const DefaultTable& table, const std::string& firm_id,
                                   const std::vector<double>& times) {
    const std::size_t firm = table.firm_index(firm_id);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0 && times[k] <= table.horizon()))
            throw DomainError("survival_curve: times must lie in (0, horizon]");
        if (k > 0 && times[k] < times[k - 1]) throw DomainError("survival_curve: times must be ascending");
    }
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        std::size_t alive = 0;
        for (std::size_t p = 0; p < table.n_paths(); ++p)
            if (!table.defaulted_by(p, firm, t)) ++alive;
        out.push_back(static_cast<double>(alive) / static_cast<double>(table.n_paths()));
    }
    return out;
}

std::optional<double> pairwise_default_correlation(const DefaultTable& table, const std::string& firm_a,
                                                   const std::string& firm_b, double t) {
    const std::size_t a = table.firm_index(firm_a);
    const std::size_t b = table.firm_index(firm_b);
    std::size_t count_a = 0, count_b = 0, count_ab = 0;
    for (std::size_t p = 0; p < table.n_paths(); ++p) {
        const bool da = table.defaulted_by(p, a, t);
        const bool db = table.defaulted_by(p, b, t);
        count_a += da;
        count_b += db;
        count_ab += da && db;
    }
    const double n = static_cast<double>(table.n_paths());
    const double pa = count_a / n;
    const double pb = count_b / n;
    const double var_a = pa * (1.0 - pa);
    const double var_b = pb * (1.0 - pb);
    if (var_a <= 0.0 || var_b <= 0.0) return std::nullopt;
    return std::clamp((count_ab / n - pa * pb) / std::sqrt(var_a * var_b), -1.0, 1.0);
}

Matrix process_increment_correlation(const std::vector<Firm>& firms, const SimConfig& config) {
    if (firms.size() < 2) throw DomainError("process_increment_correlation: need at least two firms");
    const std::size_t n = firms.size();
    std::vector<double> sum(n, 0.0);
    Matrix cross(n, n);
    double samples = 0.0;
    for (std::size_t p = 0; p < config.n_paths; ++p) {
        const PathTrace trace = trace_path(firms, config, p);
        for (std::size_t k = 1; k <= config.n_steps; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double di = trace.x(k, i) - trace.x(k - 1, i);
                sum[i] += di;
                for (std::size_t j = 0; j <= i; ++j) cross(i, j) += di * (trace.x(k, j) - trace.x(k - 1, j));
            }
            samples += 1.0;
        }
    }
    Matrix corr(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double cov_ij = cross(i, j) / samples - sum[i] * sum[j] / (samples * samples);
            const double var_i = cross(i, i) / samples - sum[i] * sum[i] / (samples * samples);
            const double var_j = cross(j, j) / samples - sum[j] * sum[j] / (samples * samples);
            corr(i, j) = corr(j, i) = i == j ? 1.0 : cov_ij / std::sqrt(var_i * var_j);
        }
    }
    return corr;
}

}  // namespace tngpricer
