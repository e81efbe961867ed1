#ifndef QMART_DETAIL_RNG_HPP
#define QMART_DETAIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qmart::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic substream keyed by (seed, stream index). Uniform doubles are
/// built from the raw 64-bit output and normals use Box-Muller, so sequences
/// do not depend on standard-library distribution internals.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t stream)
        : eng_(splitmix64(seed ^ splitmix64(stream))) {}

    double uniform() {  // (0, 1)
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    double spare_{};
    bool have_spare_{false};
};

} // namespace qmart::detail

#endif
