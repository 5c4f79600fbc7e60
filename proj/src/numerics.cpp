#include "tngpricer/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tngpricer/errors.hpp"

namespace tngpricer {

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_ln_gamma(double x) {
    // x >= 0.5 here
    const double xm1 = x - 1.0;
    double series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (xm1 + static_cast<double>(i));
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace

double ln_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        std::ostringstream msg;
        msg << "ln_gamma: argument must be positive and finite, got " << x;
        throw DomainError(msg.str());
    }
    if (x == 1.0 || x == 2.0) return 0.0;
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_ln_gamma(1.0 - x);
    }
    return lanczos_ln_gamma(x);
}

double kummer_m(double a, double b, double z) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z)) throw DomainError("kummer_m: arguments must be finite");
    if (b <= 0.0 && b == std::floor(b)) {
        std::ostringstream msg;
        msg << "kummer_m: b must not be a nonpositive integer, got " << b;
        throw DomainError(msg.str());
    }
    if (z < 0.0) throw DomainError("kummer_m: z must be nonnegative");
    if (z > kKummerMaxArgument) {
        std::ostringstream msg;
        msg << "kummer_m: z = " << z << " exceeds the series range (" << kKummerMaxArgument << ")";
        throw NumericError(msg.str());
    }

    constexpr int kMaxTerms = 200000;
    double sum = 1.0;
    double term = 1.0;
    int small_run = 0;
    for (int n = 0; n < kMaxTerms; ++n) {
        term *= (a + n) / (b + n) * z / (n + 1);
        sum += term;
        if (!std::isfinite(sum)) throw NumericError("kummer_m: series overflow");
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            if (++small_run == 3) return sum;
        } else {
            small_run = 0;
        }
    }
    throw NumericError("kummer_m: series did not converge");
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint64_t kM0 = 0xD2511F53;
    constexpr std::uint64_t kM1 = 0xCD9E8D57;
    constexpr std::uint32_t kW0 = 0x9E3779B9;
    constexpr std::uint32_t kW1 = 0xBB67AE85;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = kM0 * ctr[0];
        const std::uint64_t p1 = kM1 * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {}

std::uint32_t RandomStream::next_word() noexcept {
    if (buffered_ == 0) {
        buffer_ = philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        ++block_;
        buffered_ = 4;
    }
    return buffer_[4 - buffered_--];
}

double RandomStream::uniform() noexcept {
    const std::uint64_t hi = next_word();
    const std::uint64_t lo = next_word();
    const std::uint64_t bits = (hi << 21) ^ (lo >> 11);  // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

}  // namespace tngpricer
