#include <doctest.h>

#include <tabml/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

using namespace tabml;

TEST_CASE("splitmix64 matches the published reference sequence") {
    // Reference outputs for seed 0 from the original splitmix64.c vectors.
    SplitMix64 mix(0);
    CHECK(mix.next() == 0xE220A8397B1DCDAFull);
    CHECK(mix.next() == 0x6E789E6AA1B965F4ull);
    CHECK(mix.next() == 0x06C45D188009454Full);
}

TEST_CASE("deriveSeed is deterministic and separates streams") {
    CHECK(deriveSeed(42, 1) == deriveSeed(42, 1));
    CHECK(deriveSeed(42, 1) != deriveSeed(42, 2));
    CHECK(deriveSeed(42, 1) != deriveSeed(43, 1));

    // A master seed fans out into many distinct per-consumer seeds.
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 1000; ++stream) {
        seen.insert(deriveSeed(7, stream));
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("xorshift streams are deterministic per seed") {
    Xorshift64Star a(123);
    Xorshift64Star b(123);
    Xorshift64Star c(124);
    bool allEqual = true;
    bool anyDiffer = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next();
        if (va != b.next()) allEqual = false;
        if (va != c.next()) anyDiffer = true;
    }
    CHECK(allEqual);
    CHECK(anyDiffer);
}

TEST_CASE("a zero seed still yields a working stream") {
    Xorshift64Star rng(0);
    std::uint64_t previous = rng.next();
    bool advances = false;
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t value = rng.next();
        if (value != previous) advances = true;
        previous = value;
    }
    CHECK(advances);
}

TEST_CASE("nextBelow stays in range and covers small supports") {
    Xorshift64Star rng(9);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t value = rng.nextBelow(5);
        CHECK(value < 5);
        seen.insert(value);
    }
    CHECK(seen.size() == 5);
    CHECK(rng.nextBelow(1) == 0);
}

TEST_CASE("nextDouble lies in [0,1) with a sane mean") {
    Xorshift64Star rng(11);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double value = rng.nextDouble();
        CHECK(value >= 0.0);
        CHECK(value < 1.0);
        sum += value;
    }
    CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("nextUniform respects its bounds") {
    Xorshift64Star rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double value = rng.nextUniform(-2.0, 3.0);
        CHECK(value >= -2.0);
        CHECK(value < 3.0);
    }
}

TEST_CASE("nextBernoulli hits the degenerate probabilities exactly") {
    Xorshift64Star rng(17);
    for (int i = 0; i < 200; ++i) {
        CHECK_FALSE(rng.nextBernoulli(0.0));
        CHECK(rng.nextBernoulli(1.0));
    }
}

TEST_CASE("shuffle permutes in place, deterministically per seed") {
    std::vector<int> items = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Xorshift64Star rng(21);
    shuffle(items, rng);

    std::vector<int> sorted = items;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});

    std::vector<int> again = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Xorshift64Star rng2(21);
    shuffle(again, rng2);
    CHECK(again == items);
}

TEST_CASE("randomPermutation emits every index exactly once") {
    Xorshift64Star rng(33);
    const std::vector<std::size_t> perm = randomPermutation(100, rng);
    CHECK(perm.size() == 100);
    std::set<std::size_t> seen(perm.begin(), perm.end());
    CHECK(seen.size() == 100);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 99);
}
