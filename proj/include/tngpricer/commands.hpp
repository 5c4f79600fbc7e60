#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tngpricer/errors.hpp"
#include "tngpricer/scenario.hpp"

namespace tngpricer {

/// Process exit statuses of the tngpricer executable.
enum ExitStatus : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3, kExitIo = 4 };

/// Version tags written into every CSV header comment.
inline constexpr const char* kPricesSchema = "tngpricer.prices/1";
inline constexpr const char* kPerpetualSchema = "tngpricer.perpetual/1";
inline constexpr const char* kPdeSchema = "tngpricer.pde_residuals/1";
inline constexpr const char* kSurvivalSchema = "tngpricer.survival/1";
inline constexpr const char* kTranchesSchema = "tngpricer.tranches/1";
inline constexpr const char* kPathLossesSchema = "tngpricer.path_losses/1";
inline constexpr const char* kAlphasSchema = "tngpricer.alphas/1";
inline constexpr const char* kSummarySchema = "tngpricer.summary/1";

struct RunFlags {
    std::optional<std::uint64_t> seed;
    std::filesystem::path out_dir = ".";
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<bool> bridge;
    std::optional<double> recovery;
    std::optional<std::filesystem::path> matrix;
    unsigned threads = 0;
};

const std::vector<std::string>& command_names();

bool is_randomized(const std::string& command);

/// Runs one command and writes its reports under flags.out_dir. Throws the
/// library's Error hierarchy; `exit_status` maps those onto exit codes.
void run_command(const std::string& command, const std::optional<Scenario>& scenario, const RunFlags& flags);

int exit_status(const Error& error) noexcept;

}  // namespace tngpricer
