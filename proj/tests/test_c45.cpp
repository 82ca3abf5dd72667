#include "doctest.h"

#include <cmath>

#include "featsel/c45.hpp"
#include "featsel/rng.hpp"
#include "test_helpers.hpp"

using namespace featsel;

namespace {

// Quinlan's 14-row weather/play data. outlook: sunny/overcast/rain,
// temperature: hot/mild/cool, humidity: high/normal, wind: weak/strong.
Dataset weather() {
    return testutil::categorical_dataset(
        {3, 3, 2, 2},
        {
            {0, 0, 0, 0, 0}, {0, 0, 0, 1, 0}, {1, 0, 0, 0, 1}, {2, 1, 0, 0, 1},
            {2, 2, 1, 0, 1}, {2, 2, 1, 1, 0}, {1, 2, 1, 1, 1}, {0, 1, 0, 0, 0},
            {0, 2, 1, 0, 1}, {2, 1, 1, 0, 1}, {0, 1, 1, 1, 1}, {1, 1, 0, 1, 1},
            {1, 0, 1, 0, 1}, {2, 1, 0, 1, 0},
        });
}

// Hand oracle: entropy arithmetic from explicit partition counts, written
// independently of the library's split machinery.
double oracle_entropy(const std::vector<std::array<int, 2>>& counts) {
    int total = 0;
    for (auto& c : counts) total += c[0] + c[1];
    double h = 0;
    for (auto& c : counts) {
        for (int v : {c[0], c[1]}) {
            if (v == 0) continue;
            double p = static_cast<double>(v) / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double oracle_gain_ratio(const Dataset& d, int feature) {
    std::map<int, std::array<int, 2>> parts;
    std::array<int, 2> total{};
    for (const Instance& inst : d.instances) {
        parts[static_cast<int>(*inst.values[feature])][label_index(inst.label)]++;
        total[label_index(inst.label)]++;
    }
    const double n = total[0] + total[1];
    double base = oracle_entropy({{total}});
    double remainder = 0, split_info = 0;
    for (auto& [v, c] : parts) {
        double bn = c[0] + c[1];
        remainder += bn / n * oracle_entropy({{c}});
        split_info -= bn / n * std::log2(bn / n);
    }
    return split_info > 0 ? (base - remainder) / split_info : 0.0;
}

bool has_conflicting_twin(const Dataset& d, std::size_t i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (j == i || d.instances[j].label == d.instances[i].label) continue;
        if (d.instances[j].values == d.instances[i].values) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("gain ratio matches the weather hand computation") {
    Dataset d = weather();
    for (int f = 0; f < 4; ++f)
        CHECK(gain_ratio(d, f) == doctest::Approx(oracle_gain_ratio(d, f)).epsilon(1e-9));
    // known value for outlook: gain 0.2467 over split info 1.5774
    CHECK(gain_ratio(d, 0) == doctest::Approx(0.156428).epsilon(1e-4));
}

TEST_CASE("weather root splits on outlook") {
    C45Model m = fit_c45(weather(), 2, 0.25);
    REQUIRE(!m.nodes.empty());
    REQUIRE(!m.nodes[0].leaf);
    CHECK(m.nodes[0].feature == 0);
}

TEST_CASE("gain ratio degenerate cases") {
    // feature identical to the label
    Dataset ident = testutil::categorical_dataset({2}, {{0, 0}, {0, 0}, {1, 1}, {1, 1}, {1, 1}});
    CHECK(gain_ratio(ident, 0) == doctest::Approx(1.0));

    // constant feature: single branch, split info 0
    Dataset constant = testutil::categorical_dataset({2}, {{1, 0}, {1, 1}, {1, 0}});
    CHECK(gain_ratio(constant, 0) == 0.0);

    // continuous feature requires a threshold
    Dataset cont = testutil::continuous_dataset(1, {{1.0, 0}, {2.0, 1}});
    CHECK_THROWS_AS(gain_ratio(cont, 0), Error);
    CHECK(gain_ratio(cont, 0, 1.5) == doctest::Approx(1.0));
}

TEST_CASE("continuous splits use midpoints and respect min_leaf") {
    Dataset d = testutil::continuous_dataset(
        1, {{1.0, 0}, {2.0, 0}, {3.0, 0}, {4.0, 1}, {5.0, 1}, {6.0, 1}});
    C45Model m = fit_c45(d, 2, 1.0);
    REQUIRE(!m.nodes[0].leaf);
    CHECK(m.nodes[0].continuous_split);
    CHECK(m.nodes[0].threshold == doctest::Approx(3.5));
    for (const C45Node& node : m.nodes)
        if (node.leaf) CHECK(node.counts[0] + node.counts[1] >= 2);
}

TEST_CASE("training-set consistency with min_leaf=1 and no pruning") {
    SUBCASE("xor needs forced zero-gain splits") {
        Dataset d = testutil::categorical_dataset({2, 2},
                                                  {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}});
        C45Model m = fit_c45(d, 1, 1.0);
        for (const Instance& inst : d.instances) CHECK(predict(m, inst) == inst.label);
    }

    SUBCASE("random categorical data") {
        Rng rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<int>> rows;
            std::size_t n = 6 + rng.next_index(20);
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back({static_cast<int>(rng.next_index(3)),
                                static_cast<int>(rng.next_index(2)),
                                static_cast<int>(rng.next_index(2)),
                                static_cast<int>(rng.next_index(2))});
            Dataset d = testutil::categorical_dataset({3, 2, 2}, rows);
            if (d.count(Label::positive) == 0 || d.count(Label::negative) == 0) continue;
            C45Model m = fit_c45(d, 1, 1.0);
            for (std::size_t i = 0; i < d.size(); ++i)
                if (!has_conflicting_twin(d, i))
                    CHECK(predict(m, d.instances[i]) == d.instances[i].label);
        }
    }
}

TEST_CASE("pruning") {
    SUBCASE("a single leaf is unchanged") {
        Dataset pure = testutil::categorical_dataset({2}, {{0, 1}, {1, 1}, {0, 1}, {1, 0}});
        C45Model m = fit_c45(pure, 4, 0.25);  // min_leaf forces a leaf-only tree
        REQUIRE(m.node_count() == 1);
        C45Model p = c45_prune(m, 0.25);
        CHECK(p.node_count() == 1);
        CHECK(p.nodes[0].majority == m.nodes[0].majority);
    }

    SUBCASE("confidence 1.0 merges only equal-error same-majority subtrees") {
        // children (3+,1-) and (2+,1-): subtree errors 1+1 equal the merged
        // leaf's 2, so the split collapses
        C45Model merge;
        merge.schema = testutil::categorical_dataset({2}, {{0, 0}}).schema;
        merge.nodes.resize(3);
        merge.nodes[0] = {false, 0, false, 0.0, {{0, 1}, {1, 2}}, -1, -1, {2, 5}, Label::positive};
        merge.nodes[1] = {true, -1, false, 0.0, {}, -1, -1, {1, 3}, Label::positive};
        merge.nodes[2] = {true, -1, false, 0.0, {}, -1, -1, {1, 2}, Label::positive};
        CHECK(c45_prune(merge, 1.0).node_count() == 1);

        // children (3+,1-) and (1+,2-): node majority errors 3 > subtree 2, kept
        C45Model keep = merge;
        keep.nodes[0].counts = {3, 4};
        keep.nodes[2] = {true, -1, false, 0.0, {}, -1, -1, {2, 1}, Label::negative};
        CHECK(c45_prune(keep, 1.0).node_count() == 3);
    }

    SUBCASE("node count never grows") {
        Rng rng(47);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::vector<int>> rows;
            for (std::size_t i = 0; i < 40; ++i)
                rows.push_back({static_cast<int>(rng.next_index(3)),
                                static_cast<int>(rng.next_index(4)),
                                static_cast<int>(rng.next_index(2)),
                                static_cast<int>(rng.next_index(2))});
            Dataset d = testutil::categorical_dataset({3, 4, 2}, rows);
            C45Model m = fit_c45(d, 1, 1.0);
            for (double conf : {0.05, 0.25, 0.5, 1.0})
                CHECK(c45_prune(m, conf).node_count() <= m.node_count());
        }
    }

    SUBCASE("default confidence simplifies noise-grown trees") {
        Rng rng(9);
        std::vector<std::vector<int>> rows;
        for (std::size_t i = 0; i < 60; ++i)
            rows.push_back({static_cast<int>(rng.next_index(3)),
                            static_cast<int>(rng.next_index(2)),
                            static_cast<int>(rng.next_index(2))});
        Dataset d = testutil::categorical_dataset({3, 2}, rows);
        C45Model grown = fit_c45(d, 1, 1.0);
        C45Model pruned = c45_prune(grown, 0.25);
        CHECK(pruned.node_count() < grown.node_count());
    }
}

TEST_CASE("unseen categorical codes fall back to the node majority") {
    Dataset d = testutil::categorical_dataset(
        {3}, {{0, 0}, {0, 0}, {0, 0}, {1, 1}, {1, 1}, {1, 1}});
    C45Model m = fit_c45(d, 1, 1.0);
    REQUIRE(!m.nodes[0].leaf);
    Instance probe;
    probe.values = {2.0};  // never observed during training
    CHECK(predict(m, probe) == m.nodes[0].majority);
}

TEST_CASE("fit validates its arguments") {
    Dataset d = weather();
    CHECK_THROWS_AS(fit_c45(d, 0, 0.25), ValidationError);
    CHECK_THROWS_AS(fit_c45(d, 2, 0.0), ValidationError);
    CHECK_THROWS_AS(fit_c45(d, 2, 1.5), ValidationError);
    Dataset single = testutil::categorical_dataset({2}, {{0, 1}, {1, 1}});
    CHECK_THROWS_AS(fit_c45(single, 1, 0.25), Error);
}
