#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "featsel/dataset.hpp"

namespace featsel {

/// Class-conditional statistics for one feature: a Laplace-smoothed frequency
/// table for categorical features, a Gaussian (mean, variance) per class for
/// continuous ones.
struct NbFeatureStats {
    // categorical: table[class][code] = P(code | class)
    std::array<std::vector<double>, 2> table;
    // continuous
    std::array<double, 2> mean{};
    std::array<double, 2> variance{};
};

struct NaiveBayesModel {
    FeatureSchema schema;
    std::array<double, 2> prior{};  // indexed by label_index
    std::vector<NbFeatureStats> cond;

    // Variances never drop below this floor, which keeps the Gaussian density
    // finite on constant features.
    static constexpr double kVarianceFloor = 1e-9;
};

inline NaiveBayesModel fit_naive_bayes(const Dataset& train) {
    const std::size_t n = train.size();
    const std::size_t p = train.schema.size();
    std::array<std::size_t, 2> n_class{};
    for (const Instance& inst : train.instances) n_class[label_index(inst.label)]++;
    if (n_class[0] == 0 || n_class[1] == 0)
        throw Error("naive Bayes needs both classes in the training set");

    NaiveBayesModel m;
    m.schema = train.schema;
    for (int c = 0; c < 2; ++c)
        m.prior[c] = static_cast<double>(n_class[c]) / static_cast<double>(n);

    m.cond.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const Feature& f = train.schema.features[j];
        NbFeatureStats& st = m.cond[j];
        if (f.categorical) {
            std::array<std::vector<double>, 2> counts;
            for (int c = 0; c < 2; ++c) counts[c].assign(f.arity, 0.0);
            for (const Instance& inst : train.instances)
                counts[label_index(inst.label)][static_cast<std::size_t>(*inst.values[j])]++;
            for (int c = 0; c < 2; ++c) {
                st.table[c].resize(f.arity);
                // add-one smoothing over the declared arity
                const double denom = static_cast<double>(n_class[c] + f.arity);
                for (int v = 0; v < f.arity; ++v)
                    st.table[c][v] = (counts[c][v] + 1.0) / denom;
            }
        } else {
            for (int c = 0; c < 2; ++c) {
                double sum = 0;
                for (const Instance& inst : train.instances)
                    if (label_index(inst.label) == c) sum += *inst.values[j];
                const double mean = sum / static_cast<double>(n_class[c]);
                double ss = 0;
                for (const Instance& inst : train.instances)
                    if (label_index(inst.label) == c) {
                        const double dev = *inst.values[j] - mean;
                        ss += dev * dev;
                    }
                st.mean[c] = mean;
                st.variance[c] =
                    std::max(ss / static_cast<double>(n_class[c]), NaiveBayesModel::kVarianceFloor);
            }
        }
    }
    return m;
}

namespace detail {

inline void nb_check_instance(const NaiveBayesModel& m, const Instance& inst) {
    if (inst.values.size() != m.schema.size())
        throw Error("instance does not match the model schema");
    for (std::size_t j = 0; j < inst.values.size(); ++j) {
        if (!inst.values[j]) throw Error("cannot predict with missing cells");
        const Feature& f = m.schema.features[j];
        if (f.categorical && (*inst.values[j] < 0 || *inst.values[j] >= f.arity))
            throw Error("categorical code outside the model's arity for '" + f.name + "'");
    }
}

}  // namespace detail

/// Per-class posterior probabilities. Scores are accumulated in the log
/// domain with the evidence term dropped (it is constant per instance), then
/// normalized, so the result sums to 1 and the argmax is unaffected.
inline std::array<double, 2> nb_posterior(const NaiveBayesModel& m, const Instance& inst) {
    detail::nb_check_instance(m, inst);
    std::array<double, 2> log_score{};
    for (int c = 0; c < 2; ++c) log_score[c] = std::log(m.prior[c]);
    for (std::size_t j = 0; j < inst.values.size(); ++j) {
        const double v = *inst.values[j];
        const NbFeatureStats& st = m.cond[j];
        for (int c = 0; c < 2; ++c) {
            if (m.schema.features[j].categorical) {
                log_score[c] += std::log(st.table[c][static_cast<std::size_t>(v)]);
            } else {
                const double dev = v - st.mean[c];
                log_score[c] += -0.5 * std::log(2.0 * M_PI * st.variance[c]) -
                                dev * dev / (2.0 * st.variance[c]);
            }
        }
    }
    const double hi = std::max(log_score[0], log_score[1]);
    std::array<double, 2> post{std::exp(log_score[0] - hi), std::exp(log_score[1] - hi)};
    const double z = post[0] + post[1];
    post[0] /= z;
    post[1] /= z;
    return post;
}

/// Ties break toward the negative class.
inline Label predict(const NaiveBayesModel& m, const Instance& inst) {
    const auto post = nb_posterior(m, inst);
    return post[1] > post[0] ? Label::positive : Label::negative;
}

}  // namespace featsel
