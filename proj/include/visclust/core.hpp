#ifndef VISCLUST_CORE_HPP
#define VISCLUST_CORE_HPP

// Error types and the deterministic random number generator shared by the
// whole library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace visclust {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller passed something malformed: bad flag value, mismatched lengths,
// unparseable file contents.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Shapes do not line up (projection dim vs data dim, mixed projection sets).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Operation needs more points than were given (variance of one point, ...).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Request can never be met regardless of data (more clusters than points).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Synthetic generator could not place the requested geometry.
class GenerationError : public Error {
public:
    using Error::Error;
};

// Cluster-count scan saw no components at all.
class NoStructureError : public Error {
public:
    using Error::Error;
};

// Backfill was asked to extend a labeling with no labeled points.
class BackfillError : public Error {
public:
    using Error::Error;
};

// Metric has no defined value for these inputs (expected index equals 1).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

// splitmix64 finalizer; used to turn (seed, stream, index) triples into
// decorrelated sub-seeds so every consumer owns an independent stream.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    return mix64(seed ^ mix64(stream ^ mix64(index)));
}

// Deterministic 64-bit generator: a seeded std::mt19937_64 engine with the
// distribution code pinned here (not delegated to <random> distributions) so
// that a given seed replays the identical draw sequence on any build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via Box-Muller; stateless between calls.
    double normal() {
        const double u = uniform01();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u));
        return r * std::cos(6.28318530717958647692 * v);
    }

    // Uniform integer in [0, n); modulo bias removed by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw InvalidInputError("Rng::below: n must be positive");
        if ((n & (n - 1)) == 0) return next() & (n - 1);
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
        const std::uint64_t cut = max - rem;
        std::uint64_t x;
        do {
            x = next();
        } while (x > cut);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

// k distinct indices sampled uniformly from [0, n), returned ascending.
inline std::vector<int> sample_indices(int n, int k, Rng& rng) {
    if (n < 0 || k < 0 || k > n)
        throw InvalidInputError("sample_indices: need 0 <= k <= n");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace visclust

#endif  // VISCLUST_CORE_HPP
