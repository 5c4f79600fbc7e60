#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tngpricer/errors.hpp"
#include "tngpricer/first_passage.hpp"

namespace tngpricer {

namespace {

double objective(const Matrix& target, const std::vector<double>& alphas) {
    double total = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = i + 1; j < alphas.size(); ++j) {
            const double gap = target(i, j) - alphas[i] * alphas[j];
            total += gap * gap;
        }
    return total;
}

// Leading eigenpair of the target with its diagonal replaced by the largest
// off-diagonal magnitude in each row (a rough communality guess).
std::vector<double> initial_loadings(const Matrix& target) {
    const auto n = static_cast<Eigen::Index>(target.rows());
    Eigen::MatrixXd reduced(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double communality = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            reduced(i, j) = target(i, j);
            if (i != j) communality = std::max(communality, std::abs(target(i, j)));
        }
        reduced(i, i) = communality;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    const double lambda = solver.eigenvalues()(n - 1);
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1);
    if (v.sum() < 0.0) v = -v;
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (lambda <= 0.0) return out;
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::clamp(std::sqrt(lambda) * v(i), -1.0, 1.0);
    return out;
}

}  // namespace

CalibrationResult calibrate_alphas(const Matrix& target) {
    const std::size_t n = target.rows();
    if (n == 0 || target.cols() != n) throw DomainError("calibrate_alphas: target must be a nonempty square matrix");
    for (std::size_t i = 0; i < n; ++i) {
        if (target(i, i) != 1.0) throw DomainError("calibrate_alphas: diagonal entry " + std::to_string(i) + " is not 1");
        for (std::size_t j = 0; j < n; ++j) {
            const double value = target(i, j);
            if (!std::isfinite(value) || std::abs(value) > 1.0)
                throw DomainError("calibrate_alphas: entries must lie in [-1, 1]");
            if (std::abs(value - target(j, i)) > 1e-12) throw DomainError("calibrate_alphas: target is not symmetric");
        }
    }

    CalibrationResult result;
    result.alphas = initial_loadings(target);
    if (n == 1) return result;

    constexpr std::size_t kMaxSweeps = 100000;
    double previous = objective(target, result.alphas);
    for (result.sweeps = 1; result.sweeps <= kMaxSweeps; ++result.sweeps) {
        for (std::size_t i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                num += target(i, j) * result.alphas[j];
                den += result.alphas[j] * result.alphas[j];
            }
            result.alphas[i] = den > 0.0 ? std::clamp(num / den, -1.0, 1.0) : 0.0;
        }
        const double current = objective(target, result.alphas);
        if (current < 1e-28 || previous - current <= 1e-16 * previous) {
            previous = current;
            break;
        }
        previous = current;
    }
    result.objective = previous;
    return result;
}

}  // namespace tngpricer
