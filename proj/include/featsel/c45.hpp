#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "featsel/dataset.hpp"

namespace featsel {

namespace detail {

inline double log2_safe(double x) { return x > 0 ? std::log2(x) : 0.0; }

/// Entropy in bits of a two-class count pair.
inline double entropy(double n0, double n1) {
    const double n = n0 + n1;
    if (n == 0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return -(p0 * log2_safe(p0) + p1 * log2_safe(p1));
}

/// Inverse standard normal CDF (Acklam's rational approximation, |eps| < 1.2e-9).
inline double normal_quantile(double p) {
    if (p <= 0.0) return -HUGE_VAL;
    if (p >= 1.0) return HUGE_VAL;
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

/// One-sided upper bound on a binomial error rate (Wilson score interval).
/// `confidence` follows the usual pruning convention: smaller values are more
/// pessimistic; 1.0 collapses the bound to the empirical rate.
inline double pessimistic_error_rate(double errors, double n, double confidence) {
    if (n <= 0) return 0.0;
    const double f = errors / n;
    const double z = confidence >= 1.0 ? 0.0 : std::max(0.0, normal_quantile(1.0 - confidence));
    if (z == 0.0) return f;
    const double z2 = z * z;
    return (f + z2 / (2 * n) + z * std::sqrt(f * (1 - f) / n + z2 / (4 * n * n))) / (1 + z2 / n);
}

}  // namespace detail

/// Decision-tree node stored in a flat arena; nodes[0] is the root. Internal
/// nodes split on one feature: continuous splits are binary around a
/// threshold, categorical splits branch per observed code with the node
/// majority as fallback for unseen codes.
struct C45Node {
    bool leaf = true;
    int feature = -1;
    bool continuous_split = false;
    double threshold = 0.0;
    std::vector<std::pair<int, int>> branches;  // (categorical code, child index)
    int left = -1, right = -1;                  // continuous: <= threshold / > threshold
    std::array<std::size_t, 2> counts{};        // training class counts reaching this node
    Label majority = Label::negative;
};

struct C45Model {
    FeatureSchema schema;
    int min_leaf = 2;
    double confidence = 0.25;
    std::vector<C45Node> nodes;

    std::size_t node_count() const { return nodes.size(); }
};

namespace detail {

struct SplitCandidate {
    int feature = -1;
    bool continuous_split = false;
    double threshold = 0.0;
    double gain = 0.0;
    double gain_ratio = 0.0;
};

struct C45Builder {
    const Dataset& data;
    int min_leaf;

    static Label majority_of(const std::array<std::size_t, 2>& counts) {
        // ties break toward negative
        return counts[1] > counts[0] ? Label::positive : Label::negative;
    }

    std::array<std::size_t, 2> count_labels(const std::vector<std::size_t>& rows) const {
        std::array<std::size_t, 2> c{};
        for (std::size_t r : rows) c[label_index(data.instances[r].label)]++;
        return c;
    }

    // Gain and split info of a categorical partition; empty if some branch
    // falls under min_leaf or fewer than two codes are observed.
    std::optional<SplitCandidate> categorical_candidate(const std::vector<std::size_t>& rows,
                                                        int j) const {
        const int arity = data.schema.features[j].arity;
        std::vector<std::array<double, 2>> branch(arity, {0.0, 0.0});
        for (std::size_t r : rows)
            branch[static_cast<std::size_t>(*data.instances[r].values[j])]
                  [label_index(data.instances[r].label)] += 1.0;

        const double n = static_cast<double>(rows.size());
        double remainder = 0.0, split_info = 0.0;
        int observed = 0;
        for (const auto& b : branch) {
            const double bn = b[0] + b[1];
            if (bn == 0) continue;
            if (bn < min_leaf) return std::nullopt;
            ++observed;
            remainder += bn / n * entropy(b[0], b[1]);
            split_info -= bn / n * log2_safe(bn / n);
        }
        if (observed < 2) return std::nullopt;

        const auto counts = count_labels(rows);
        SplitCandidate c;
        c.feature = j;
        c.gain = entropy(static_cast<double>(counts[0]), static_cast<double>(counts[1])) -
                 remainder;
        c.gain_ratio = split_info > 0 ? c.gain / split_info : 0.0;
        return c;
    }

    // Best binary threshold for a continuous feature, maximizing information
    // gain over midpoints of consecutive distinct values (smaller threshold
    // wins ties).
    std::optional<SplitCandidate> continuous_candidate(const std::vector<std::size_t>& rows,
                                                       int j) const {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (std::size_t r : rows)
            vals.emplace_back(*data.instances[r].values[j],
                              label_index(data.instances[r].label));
        std::sort(vals.begin(), vals.end());

        const double n = static_cast<double>(vals.size());
        std::array<double, 2> total{}, below{};
        for (const auto& [v, c] : vals) total[c] += 1.0;
        const double base = entropy(total[0], total[1]);

        std::optional<SplitCandidate> best;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            below[vals[i].second] += 1.0;
            if (vals[i].first == vals[i + 1].first) continue;
            const double nb = below[0] + below[1];
            if (nb < min_leaf || n - nb < min_leaf) continue;
            const double gain = base - nb / n * entropy(below[0], below[1]) -
                                (n - nb) / n * entropy(total[0] - below[0], total[1] - below[1]);
            if (!best || gain > best->gain + 1e-12) {
                SplitCandidate c;
                c.feature = j;
                c.continuous_split = true;
                c.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                c.gain = gain;
                const double p = nb / n;
                const double split_info = -(p * log2_safe(p) + (1 - p) * log2_safe(1 - p));
                c.gain_ratio = split_info > 0 ? gain / split_info : 0.0;
                best = c;
            }
        }
        return best;
    }

    // Quinlan's selection rule: among splits whose gain reaches the mean gain
    // of all candidates, take the best gain ratio. When no candidate has
    // positive gain but the node is impure, fall back to the first structurally
    // valid split so that distinguishable instances can still be separated.
    std::optional<SplitCandidate> choose_split(const std::vector<std::size_t>& rows,
                                               const std::vector<bool>& usable) const {
        std::vector<SplitCandidate> candidates;
        for (std::size_t j = 0; j < data.schema.size(); ++j) {
            if (!usable[j]) continue;
            auto c = data.schema.features[j].categorical
                         ? categorical_candidate(rows, static_cast<int>(j))
                         : continuous_candidate(rows, static_cast<int>(j));
            if (c) candidates.push_back(*c);
        }
        if (candidates.empty()) return std::nullopt;

        double mean_gain = 0.0;
        for (const auto& c : candidates) mean_gain += c.gain;
        mean_gain /= static_cast<double>(candidates.size());

        const SplitCandidate* best = nullptr;
        for (const auto& c : candidates) {
            if (c.gain <= 1e-12 || c.gain + 1e-12 < mean_gain) continue;
            if (!best || c.gain_ratio > best->gain_ratio + 1e-12) best = &c;
        }
        if (best) return *best;

        const auto counts = count_labels(rows);
        if (counts[0] == 0 || counts[1] == 0) return std::nullopt;
        return candidates.front();  // forced zero-gain split on an impure node
    }

    int build(C45Model& m, std::vector<std::size_t> rows, std::vector<bool> usable) {
        const int id = static_cast<int>(m.nodes.size());
        m.nodes.emplace_back();
        auto counts = count_labels(rows);
        m.nodes[id].counts = counts;
        m.nodes[id].majority = majority_of(counts);
        if (counts[0] == 0 || counts[1] == 0) return id;  // pure leaf

        auto split = choose_split(rows, usable);
        if (!split) return id;

        C45Node& node = m.nodes[id];
        node.leaf = false;
        node.feature = split->feature;
        node.continuous_split = split->continuous_split;
        node.threshold = split->threshold;

        if (split->continuous_split) {
            std::vector<std::size_t> lo, hi;
            for (std::size_t r : rows)
                (*data.instances[r].values[split->feature] <= split->threshold ? lo : hi)
                    .push_back(r);
            const int l = build(m, std::move(lo), usable);
            const int r = build(m, std::move(hi), usable);
            m.nodes[id].left = l;
            m.nodes[id].right = r;
        } else {
            // a used categorical feature carries no further information below
            usable[split->feature] = false;
            std::vector<std::vector<std::size_t>> parts(data.schema.features[split->feature].arity);
            for (std::size_t r : rows)
                parts[static_cast<std::size_t>(*data.instances[r].values[split->feature])]
                    .push_back(r);
            for (int v = 0; v < static_cast<int>(parts.size()); ++v) {
                if (parts[v].empty()) continue;
                const int child = build(m, std::move(parts[v]), usable);
                m.nodes[id].branches.emplace_back(v, child);
            }
        }
        return id;
    }
};

}  // namespace detail

/// Gain ratio of splitting `d` on one feature: information gain divided by
/// split info, 0 for a degenerate single-branch split. Continuous features
/// require a threshold, categorical ones branch per code.
inline double gain_ratio(const Dataset& d, int feature, std::optional<double> threshold = {}) {
    if (feature < 0 || feature >= static_cast<int>(d.schema.size()))
        throw Error("feature index out of range");
    const Feature& f = d.schema.features[feature];
    if (!f.categorical && !threshold) throw Error("continuous feature needs a threshold");
    if (f.categorical && threshold) throw Error("categorical feature takes no threshold");

    std::map<int, std::array<double, 2>> branch;
    std::array<double, 2> total{};
    for (const Instance& inst : d.instances) {
        if (!inst.values[feature]) throw Error("gain_ratio requires complete data");
        const double v = *inst.values[feature];
        const int key = f.categorical ? static_cast<int>(v) : (v <= *threshold ? 0 : 1);
        branch[key][label_index(inst.label)] += 1.0;
        total[label_index(inst.label)] += 1.0;
    }

    const double n = total[0] + total[1];
    double remainder = 0.0, split_info = 0.0;
    for (const auto& [key, b] : branch) {
        const double bn = b[0] + b[1];
        remainder += bn / n * detail::entropy(b[0], b[1]);
        split_info -= bn / n * detail::log2_safe(bn / n);
    }
    if (split_info <= 0.0) return 0.0;
    return (detail::entropy(total[0], total[1]) - remainder) / split_info;
}

/// Grows a tree with gain-ratio splits. `min_leaf` (Quinlan's M) is a
/// pre-pruning floor: every branch of every split keeps at least that many
/// training instances.
inline C45Model fit_c45(const Dataset& train, int min_leaf, double confidence) {
    if (min_leaf < 1) throw ValidationError("c45 min_leaf must be >= 1");
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw ValidationError("c45 confidence must be in (0, 1]");
    if (train.count(Label::positive) == 0 || train.count(Label::negative) == 0)
        throw Error("c45 needs both classes in the training set");

    C45Model m;
    m.schema = train.schema;
    m.min_leaf = min_leaf;
    m.confidence = confidence;

    detail::C45Builder builder{train, min_leaf};
    std::vector<std::size_t> rows(train.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    builder.build(m, std::move(rows), std::vector<bool>(train.schema.size(), true));
    return m;
}

namespace detail {

// Post-order pessimistic-error walk; returns (error estimate, new node index
// in the output arena).
inline std::pair<double, int> prune_walk(const C45Model& in, int node_id, double confidence,
                                         std::vector<C45Node>& out) {
    const C45Node& node = in.nodes[node_id];
    const double n = static_cast<double>(node.counts[0] + node.counts[1]);
    const double errors =
        static_cast<double>(node.counts[label_index(flip(node.majority))]);
    const double as_leaf = n * pessimistic_error_rate(errors, n, confidence);

    if (node.leaf) {
        out.push_back(node);
        return {as_leaf, static_cast<int>(out.size() - 1)};
    }

    std::vector<C45Node> pending;
    double subtree = 0.0;
    C45Node rebuilt = node;
    rebuilt.branches.clear();
    if (node.continuous_split) {
        auto [le, li] = prune_walk(in, node.left, confidence, pending);
        auto [re, ri] = prune_walk(in, node.right, confidence, pending);
        subtree = le + re;
        rebuilt.left = li;
        rebuilt.right = ri;
    } else {
        for (const auto& [code, child] : node.branches) {
            auto [err, idx] = prune_walk(in, child, confidence, pending);
            subtree += err;
            rebuilt.branches.emplace_back(code, idx);
        }
    }

    if (as_leaf <= subtree + 1e-9) {
        C45Node leaf = node;
        leaf.leaf = true;
        leaf.feature = -1;
        leaf.branches.clear();
        leaf.left = leaf.right = -1;
        out.push_back(leaf);
        return {as_leaf, static_cast<int>(out.size() - 1)};
    }

    // keep the subtree: splice the pending children after this node
    const int base = static_cast<int>(out.size()) + 1;
    if (rebuilt.continuous_split) {
        rebuilt.left += base;
        rebuilt.right += base;
    } else {
        for (auto& [code, idx] : rebuilt.branches) idx += base;
    }
    out.push_back(rebuilt);
    const int self = static_cast<int>(out.size() - 1);
    for (auto& child : pending) {
        if (!child.leaf) {
            if (child.continuous_split) {
                child.left += base;
                child.right += base;
            } else {
                for (auto& [code, idx] : child.branches) idx += base;
            }
        }
        out.push_back(std::move(child));
    }
    return {std::min(as_leaf, subtree), self};
}

}  // namespace detail

/// Bottom-up pessimistic pruning: a subtree collapses to a leaf when the
/// leaf's error bound is no worse than the summed bounds of the subtree's
/// leaves. Never increases the node count.
inline C45Model c45_prune(const C45Model& model, double confidence) {
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw ValidationError("c45 confidence must be in (0, 1]");
    if (model.nodes.empty()) return model;
    C45Model out;
    out.schema = model.schema;
    out.min_leaf = model.min_leaf;
    out.confidence = confidence;
    detail::prune_walk(model, 0, confidence, out.nodes);
    return out;
}

/// Ties and unseen categorical codes resolve to the node majority.
inline Label predict(const C45Model& m, const Instance& inst) {
    if (inst.values.size() != m.schema.size())
        throw Error("instance does not match the model schema");
    if (m.nodes.empty()) throw Error("empty tree");
    int id = 0;
    while (!m.nodes[id].leaf) {
        const C45Node& node = m.nodes[id];
        const Cell& c = inst.values[node.feature];
        if (!c) throw Error("cannot predict with missing cells");
        if (node.continuous_split) {
            id = *c <= node.threshold ? node.left : node.right;
        } else {
            const int code = static_cast<int>(*c);
            int next = -1;
            for (const auto& [v, child] : node.branches)
                if (v == code) {
                    next = child;
                    break;
                }
            if (next < 0) return node.majority;  // fallback branch
            id = next;
        }
    }
    return m.nodes[id].majority;
}

}  // namespace featsel
