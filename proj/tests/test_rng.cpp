#include "doctest.h"

#include <numeric>

#include "featsel/rng.hpp"

using featsel::Rng;

TEST_CASE("rng streams are reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("mix_seed separates salts") {
    CHECK(featsel::mix_seed(1, 0) != featsel::mix_seed(1, 1));
    CHECK(featsel::mix_seed(1, 0) != featsel::mix_seed(2, 0));
    CHECK(featsel::mix_seed(7, 3) == featsel::mix_seed(7, 3));
}

TEST_CASE("next_index stays in range and covers all values") {
    Rng rng(3);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 2000; ++i) {
        auto v = rng.next_index(5);
        REQUIRE(v < 5);
        seen[v]++;
    }
    for (int c : seen) CHECK(c > 300);  // roughly uniform
}

TEST_CASE("next_unit lies in [0,1)") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("shuffle is a permutation and seed-stable") {
    std::vector<int> v(20);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    Rng r1(5), r2(5);
    r1.shuffle(v);
    r2.shuffle(w);
    CHECK(v == w);
    std::sort(v.begin(), v.end());
    std::vector<int> sorted(20);
    std::iota(sorted.begin(), sorted.end(), 0);
    CHECK(v == sorted);
}
