#pragma once

#include <array>
#include <cstdint>

namespace tngpricer {

/// Standard normal CDF, computed as 0.5 * erfc(-x / sqrt(2)) with the libm
/// erfc (fdlibm rational approximations, accurate to about 1 ulp).
double norm_cdf(double x) noexcept;

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7, 9 terms).
/// Throws DomainError for x <= 0 or non-finite x.
double ln_gamma(double x);

/// Kummer's confluent hypergeometric function M(a, b, z) = sum (a)_n z^n / ((b)_n n!).
///
/// Summed directly; stops once three consecutive terms fall below 1e-16 of the
/// partial sum. Requires z >= 0 and b not a nonpositive integer (DomainError).
/// z > 700 is reported as a NumericError rather than saturated.
double kummer_m(double a, double b, double z);

inline constexpr double kKummerMaxArgument = 700.0;

/// One Philox4x32-10 block: a bijection of `counter` keyed by `key`.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. The k-th output block is philox(k, stream_id)
/// under key = seed, so a stream's sequence is a pure function of
/// (seed, stream_id) regardless of which thread evaluates it.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal draw (Box-Muller; the second variate of each pair is cached).
    double normal() noexcept;

private:
    std::uint32_t next_word() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline double standard_normal_draw(RandomStream& stream) noexcept { return stream.normal(); }

}  // namespace tngpricer
