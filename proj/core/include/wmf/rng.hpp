#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wmf {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Fixed constants make the
// seed chain reproducible across platforms and compiler versions.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Collision-resistant mix of (master, replicate, draw) into one generator
// seed. Each field passes through the finalizer, so adjacent inputs land far
// apart and schedules with different worker counts see identical streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t draw) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ (replicate + 0x9e3779b97f4a7c15ULL));
    s = splitmix64(s ^ (draw + 0xbf58476d1ce4e5b9ULL));
    return s;
}

// mt19937_64 output is fully specified by the standard; the std distributions
// are not. This wrapper pairs the portable engine with hand-rolled draws so
// every platform produces the same stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound) by rejection, avoiding modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(uniform_below(
                        static_cast<std::uint64_t>(hi - lo) + 1u));
    }

    // Uniform in (0, 1): 53-bit mantissa, offset so log() is always finite.
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller; both values of each pair are used.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace wmf
