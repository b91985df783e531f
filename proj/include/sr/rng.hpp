#ifndef SR_RNG_HPP
#define SR_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace sr {

// Purpose tags for named substreams. Runs that share (seed, replication)
// consume identical randomness per purpose, which keeps paired variant
// comparisons on common random numbers.
enum class StreamPurpose : std::uint64_t {
    init = 1,
    proposal = 2,
    ruler = 3,
    simulation = 4,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

} // namespace detail

// A seedable random stream. Draws are produced by fixed inline algorithms
// (not std::distributions) so that sequences are identical across standard
// library implementations.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream derive(std::uint64_t master_seed, std::uint64_t replication,
                            StreamPurpose purpose) {
        const auto p = static_cast<std::uint64_t>(purpose);
        return RngStream(detail::mix(detail::mix(master_seed, replication), p));
    }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform on {lo, ..., hi} inclusive, via rejection on the top range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return lo + static_cast<std::int64_t>(r % span);
    }

    // Box-Muller without the cached spare, so the draw count per call is fixed.
    double normal(double mean, double stddev) {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    const T& pick(std::span<const T> items) {
        if (items.empty()) throw std::invalid_argument("pick: empty span");
        return items[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(items.size()) - 1))];
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

// The named streams one replication owns.
struct RunStreams {
    RngStream init;
    RngStream proposal;
    RngStream ruler;
    RngStream simulation;

    static RunStreams derive(std::uint64_t master_seed, std::uint64_t replication) {
        return RunStreams{
            RngStream::derive(master_seed, replication, StreamPurpose::init),
            RngStream::derive(master_seed, replication, StreamPurpose::proposal),
            RngStream::derive(master_seed, replication, StreamPurpose::ruler),
            RngStream::derive(master_seed, replication, StreamPurpose::simulation),
        };
    }
};

} // namespace sr

#endif // SR_RNG_HPP
