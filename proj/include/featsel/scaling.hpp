#pragma once

#include <algorithm>
#include <vector>

#include "featsel/dataset.hpp"

namespace featsel {

/// Per-feature min-max scaling to [0, 1]. Statistics always come from
/// training data; unseen values are clamped into the unit interval so test
/// instances cannot leave the training range. A constant feature maps to 0.
struct MinMaxScaler {
    std::vector<double> min, range;

    static MinMaxScaler fit(const Dataset& train) {
        MinMaxScaler s;
        const std::size_t p = train.schema.size();
        s.min.assign(p, 0.0);
        s.range.assign(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            double lo = 0, hi = 0;
            bool first = true;
            for (const Instance& inst : train.instances) {
                if (!inst.values[j]) throw Error("scaling requires complete data");
                double v = *inst.values[j];
                if (first) {
                    lo = hi = v;
                    first = false;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            s.min[j] = lo;
            s.range[j] = hi - lo;
        }
        return s;
    }

    std::vector<double> transform(const Instance& inst) const {
        std::vector<double> out(min.size());
        for (std::size_t j = 0; j < min.size(); ++j) {
            if (!inst.values[j]) throw Error("cannot scale a missing cell");
            double v = range[j] > 0 ? (*inst.values[j] - min[j]) / range[j] : 0.0;
            out[j] = std::clamp(v, 0.0, 1.0);
        }
        return out;
    }
};

}  // namespace featsel
