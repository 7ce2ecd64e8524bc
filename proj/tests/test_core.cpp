// Seed derivation, the deterministic generator, and index sampling.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include <visclust/core.hpp>

using namespace visclust;

TEST_CASE("mix64 is deterministic and spreads nearby inputs") {
    REQUIRE(mix64(0) == mix64(0));
    REQUIRE(mix64(1) == mix64(1));
    std::set<std::uint64_t> outs;
    for (std::uint64_t x = 0; x < 4096; ++x) outs.insert(mix64(x));
    REQUIRE(outs.size() == 4096);  // finalizer is a bijection, no collisions
}

TEST_CASE("derive_seed separates streams and indices") {
    REQUIRE(derive_seed(42, 1) == derive_seed(42, 1));
    REQUIRE(derive_seed(42, 1) == derive_seed(42, 1, 0));
    REQUIRE(derive_seed(42, 1) != derive_seed(42, 2));
    REQUIRE(derive_seed(42, 1, 0) != derive_seed(42, 1, 1));
    REQUIRE(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("Rng replays identically per seed") {
    Rng a(7), b(7), c(8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t va = a.next();
        all_equal = all_equal && va == b.next();
        any_diff = any_diff || va != c.next();
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff);
}

TEST_CASE("uniform01 stays in [0,1) and has a sane mean") {
    Rng rng(123);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("uniform maps into the requested interval") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-3.0, 2.0);
        REQUIRE(v >= -3.0);
        REQUIRE(v < 2.0);
    }
}

TEST_CASE("normal has near-zero mean and near-unit variance") {
    Rng rng(99);
    double sum = 0.0, sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        REQUIRE(std::isfinite(v));
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.02);
    REQUIRE(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("below covers the range without bias artifacts") {
    Rng rng(11);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 14000; ++i) {
        const std::uint64_t v = rng.below(7);
        REQUIRE(v < 7);
        ++hits[static_cast<std::size_t>(v)];
    }
    for (int h : hits) REQUIRE(h > 1500);  // each bucket near 2000
    REQUIRE_THROWS_AS(rng.below(0), InvalidInputError);
}

TEST_CASE("below handles powers of two via masking") {
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) REQUIRE(rng.below(8) < 8);
}

TEST_CASE("sample_indices returns sorted distinct indices") {
    Rng rng(21);
    const std::vector<int> idx = sample_indices(100, 30, rng);
    REQUIRE(idx.size() == 30);
    for (std::size_t i = 1; i < idx.size(); ++i) REQUIRE(idx[i - 1] < idx[i]);
    for (int v : idx) {
        REQUIRE(v >= 0);
        REQUIRE(v < 100);
    }
}

TEST_CASE("sample_indices with k = n is the full index range") {
    Rng rng(3);
    const std::vector<int> idx = sample_indices(25, 25, rng);
    REQUIRE(idx.size() == 25);
    for (int i = 0; i < 25; ++i) REQUIRE(idx[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("sample_indices edge cases and validation") {
    Rng rng(4);
    REQUIRE(sample_indices(10, 0, rng).empty());
    REQUIRE(sample_indices(0, 0, rng).empty());
    REQUIRE_THROWS_AS(sample_indices(5, 6, rng), InvalidInputError);
    REQUIRE_THROWS_AS(sample_indices(-1, 0, rng), InvalidInputError);
}

TEST_CASE("sample_indices is unbiased enough to hit every index") {
    Rng rng(77);
    std::vector<int> seen(50, 0);
    for (int rep = 0; rep < 400; ++rep)
        for (int v : sample_indices(50, 10, rng)) ++seen[static_cast<std::size_t>(v)];
    for (int c : seen) REQUIRE(c > 30);  // expectation is 80 per index
}

TEST_CASE("error types share the library base class") {
    REQUIRE_THROWS_AS(throw InvalidInputError("x"), Error);
    REQUIRE_THROWS_AS(throw DimensionError("x"), Error);
    REQUIRE_THROWS_AS(throw InsufficientDataError("x"), Error);
    REQUIRE_THROWS_AS(throw InfeasibleError("x"), Error);
    REQUIRE_THROWS_AS(throw GenerationError("x"), Error);
    REQUIRE_THROWS_AS(throw NoStructureError("x"), Error);
    REQUIRE_THROWS_AS(throw BackfillError("x"), Error);
    REQUIRE_THROWS_AS(throw UndefinedMetricError("x"), Error);
    REQUIRE_THROWS_AS(throw Error("x"), std::runtime_error);
}
