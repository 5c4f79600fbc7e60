#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tngpricer/market_model.hpp"
#include "tngpricer/matrix.hpp"

namespace tngpricer {

/// Continuous-monitoring probability that a standard Brownian motion started
/// at 0 has touched beta + gamma s for some s <= t.
double first_passage_probability(const BarrierParams& barrier, double t);

/// Monte Carlo controls. `threads` only affects wall time, never results;
/// 0 selects the hardware concurrency.
struct SimConfig {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    bool bridge_correction = true;
    unsigned threads = 1;
};

void validate(const SimConfig& config, const std::string& prefix = "sim");

struct DefaultRecord {
    std::size_t path_id = 0;
    std::string firm_id;
    std::optional<double> default_time;
};

/// First-passage times for every (path, firm) pair of one simulation.
class DefaultTable {
public:
    DefaultTable(std::vector<std::string> firm_ids, std::size_t n_paths, double horizon);

    std::size_t n_paths() const noexcept { return n_paths_; }
    std::size_t n_firms() const noexcept { return firm_ids_.size(); }
    double horizon() const noexcept { return horizon_; }
    const std::vector<std::string>& firm_ids() const noexcept { return firm_ids_; }

    /// Throws DomainError for an unknown id.
    std::size_t firm_index(const std::string& firm_id) const;

    std::optional<double> default_time(std::size_t path, std::size_t firm) const;
    bool defaulted_by(std::size_t path, std::size_t firm, double t) const noexcept {
        return times_[path * firm_ids_.size() + firm] <= t;
    }
    DefaultRecord record(std::size_t path, std::size_t firm) const;
    std::vector<DefaultRecord> records() const;

    /// Raw storage, path-major; +infinity marks survival past the horizon.
    std::vector<double>& raw() noexcept { return times_; }
    const std::vector<double>& raw() const noexcept { return times_; }

private:
    std::vector<std::string> firm_ids_;
    std::size_t n_paths_;
    double horizon_;
    std::vector<double> times_;
};

/// Probability that a Brownian bridge from x_start to x_end over dt touched
/// the straight barrier joining b_start to b_end. Both endpoints must lie
/// strictly above the barrier.
double bridge_crossing_probability(double x_start, double x_end, double b_start, double b_end, double dt);

/// Simulates the standardized processes dX_i = alpha_i dF + sqrt(1 - alpha_i^2) dU_i
/// on a uniform grid and records the first step at which X_i <= beta_i + gamma_i t.
///
/// Path p draws from RandomStream(seed, p) in a fixed order: per step one
/// common normal and one common uniform, then for each firm an idiosyncratic
/// normal and a uniform. All draws are consumed whether or not the firm is
/// alive, |alpha| = 1, or bridge correction is on. A firm with |alpha| = 1
/// follows the factor exactly, so its bridge test uses the common uniform
/// (reflected when alpha = -1). With bridge correction every default is dated at
/// the midpoint of its step; otherwise at the step end.
DefaultTable simulate_defaults(const std::vector<Firm>& firms, const SimConfig& config);

/// One path of the simulation, kept in full: x(k, i) is X_i at grid time k
/// (not stopped at default).
struct PathTrace {
    std::vector<double> times;
    Matrix x;
    std::vector<std::optional<double>> default_time;
};

PathTrace trace_path(const std::vector<Firm>& firms, const SimConfig& config, std::size_t path_id);

/// Fraction of paths on which `firm_id` has not defaulted by each time.
std::vector<double> survival_curve(const DefaultTable& table, const std::string& firm_id,
                                   const std::vector<double>& times);

/// Sample correlation of the default-by-t indicators of two firms; empty when
/// either marginal is degenerate (all default or all survive).
std::optional<double> pairwise_default_correlation(const DefaultTable& table, const std::string& firm_a,
                                                   const std::string& firm_b, double t);

/// Sample correlation matrix of the per-step increments dX_i over all paths and steps.
Matrix process_increment_correlation(const std::vector<Firm>& firms, const SimConfig& config);

struct CalibrationResult {
    std::vector<double> alphas;
    double objective = 0.0;
    std::size_t sweeps = 0;
};

/// Fits loadings so that alpha_i alpha_j approximates target(i, j) for i != j,
/// minimizing sum_{i<j} (target_ij - alpha_i alpha_j)^2 by coordinate descent
/// started from the leading eigenvector. Loadings are clamped to [-1, 1].
CalibrationResult calibrate_alphas(const Matrix& target);

}  // namespace tngpricer
