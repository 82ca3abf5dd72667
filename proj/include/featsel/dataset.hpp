#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "featsel/error.hpp"
#include "featsel/rng.hpp"

namespace featsel {

enum class Label : int { negative = 0, positive = 1 };

inline int label_index(Label l) { return static_cast<int>(l); }
inline Label flip(Label l) {
    return l == Label::positive ? Label::negative : Label::positive;
}

/// A feature is either continuous or categorical with a fixed arity;
/// categorical cells hold dense codes in [0, arity).
struct Feature {
    std::string name;
    bool categorical = false;
    int arity = 0;
};

struct FeatureSchema {
    std::vector<Feature> features;
    std::string class_name;

    std::size_t size() const { return features.size(); }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i].name == name) return static_cast<int>(i);
        return -1;
    }

    void validate() const {
        for (std::size_t i = 0; i < features.size(); ++i) {
            const Feature& f = features[i];
            if (f.name.empty()) throw Error("feature " + std::to_string(i) + " has an empty name");
            if (f.name.find_first_of(", \t\r\n") != std::string::npos)
                throw Error("feature name '" + f.name + "' contains whitespace or a comma");
            if (f.categorical && f.arity < 2)
                throw Error("categorical feature '" + f.name + "' needs arity >= 2");
            for (std::size_t j = i + 1; j < features.size(); ++j)
                if (features[j].name == f.name)
                    throw Error("duplicate feature name '" + f.name + "'");
        }
    }

    /// The 13 predictors of the UCI Cleveland heart-disease data.
    static FeatureSchema cleveland() {
        FeatureSchema s;
        s.features = {
            {"cp", true, 4},       {"age", false, 0},   {"sex", true, 2},
            {"restbps", false, 0}, {"chol", false, 0},  {"fbs", true, 2},
            {"restecg", true, 3},  {"thalach", false, 0}, {"exang", true, 2},
            {"oldpeak", false, 0}, {"slope", true, 3},  {"ca", true, 4},
            {"thal", true, 3},
        };
        s.class_name = "disease";
        return s;
    }

    friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
        if (a.class_name != b.class_name || a.features.size() != b.features.size()) return false;
        for (std::size_t i = 0; i < a.features.size(); ++i) {
            const Feature &x = a.features[i], &y = b.features[i];
            if (x.name != y.name || x.categorical != y.categorical || x.arity != y.arity)
                return false;
        }
        return true;
    }
};

/// A cell is a number or missing.
using Cell = std::optional<double>;

struct Instance {
    std::vector<Cell> values;
    Label label = Label::negative;

    bool complete() const {
        return std::all_of(values.begin(), values.end(),
                           [](const Cell& c) { return c.has_value(); });
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.label == b.label && a.values == b.values;
    }
};

struct Dataset {
    FeatureSchema schema;
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
    std::size_t feature_count() const { return schema.size(); }

    std::size_t count(Label l) const {
        std::size_t n = 0;
        for (const auto& inst : instances) n += inst.label == l;
        return n;
    }

    bool complete() const {
        return std::all_of(instances.begin(), instances.end(),
                           [](const Instance& i) { return i.complete(); });
    }

    /// Checks the structural invariants: cell counts match the schema and
    /// categorical cells are dense codes in [0, arity).
    void validate() const {
        schema.validate();
        for (std::size_t r = 0; r < instances.size(); ++r) {
            const Instance& inst = instances[r];
            if (inst.values.size() != schema.size())
                throw Error("instance " + std::to_string(r) + " has " +
                            std::to_string(inst.values.size()) + " cells, schema has " +
                            std::to_string(schema.size()));
            for (std::size_t j = 0; j < schema.size(); ++j) {
                const Cell& c = inst.values[j];
                if (!c) continue;
                if (!std::isfinite(*c))
                    throw Error("instance " + std::to_string(r) + ", feature '" +
                                schema.features[j].name + "': non-finite value");
                const Feature& f = schema.features[j];
                if (f.categorical) {
                    double v = *c;
                    if (v != std::floor(v) || v < 0 || v >= f.arity)
                        throw Error("instance " + std::to_string(r) + ", feature '" + f.name +
                                    "': categorical code " + std::to_string(v) +
                                    " outside [0, " + std::to_string(f.arity) + ")");
                }
            }
        }
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.schema == b.schema && a.instances == b.instances;
    }
};

// ---------------------------------------------------------------------------
// Feature masks

/// Fixed-length bit vector over the schema's features: bit i set means
/// feature i is part of the candidate subset.
class FeatureMask {
public:
    FeatureMask() = default;
    explicit FeatureMask(std::size_t n, bool value = false)
        : bits_(n, value ? 1 : 0) {}

    static FeatureMask ones(std::size_t n) { return FeatureMask(n, true); }

    static FeatureMask from_string(std::string_view s) {
        FeatureMask m(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') m.bits_[i] = 1;
            else if (s[i] != '0') throw Error("mask string must contain only 0/1");
        }
        return m;
    }

    std::size_t size() const { return bits_.size(); }
    bool test(std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
    void flip(std::size_t i) { bits_[i] ^= 1; }

    std::size_t count() const {
        std::size_t n = 0;
        for (unsigned char b : bits_) n += b;
        return n;
    }
    bool any() const { return count() > 0; }
    bool none() const { return !any(); }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    FeatureMask& operator&=(const FeatureMask& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
        return *this;
    }
    friend FeatureMask operator&(FeatureMask a, const FeatureMask& b) { return a &= b; }

    friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
    friend bool operator<(const FeatureMask& a, const FeatureMask& b) {
        return a.bits_ < b.bits_;
    }

private:
    std::vector<unsigned char> bits_;
};

struct MaskHash {
    std::size_t operator()(const FeatureMask& m) const {
        std::size_t h = 1469598103934665603ULL;
        for (std::size_t i = 0; i < m.size(); ++i) {
            h ^= static_cast<std::size_t>(m.test(i)) + 0x9e;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

// ---------------------------------------------------------------------------
// UCI Cleveland ingestion

namespace detail {

// File-order column descriptors for processed.cleveland.data. Categorical
// columns list the raw codes used by UCI; the dense code is the position in
// that list. `schema_pos` maps a file column to its schema slot.
struct UciColumn {
    const char* name;
    bool categorical;
    std::vector<int> raw_values;
    int schema_pos;
};

inline const std::vector<UciColumn>& uci_cleveland_columns() {
    static const std::vector<UciColumn> cols = {
        {"age", false, {}, 1},
        {"sex", true, {0, 1}, 2},
        {"cp", true, {1, 2, 3, 4}, 0},
        {"restbps", false, {}, 3},
        {"chol", false, {}, 4},
        {"fbs", true, {0, 1}, 5},
        {"restecg", true, {0, 1, 2}, 6},
        {"thalach", false, {}, 7},
        {"exang", true, {0, 1}, 8},
        {"oldpeak", false, {}, 9},
        {"slope", true, {1, 2, 3}, 10},
        {"ca", true, {0, 1, 2, 3}, 11},
        {"thal", true, {3, 6, 7}, 12},
    };
    return cols;
}

inline double parse_number(const std::string& token, std::size_t line_no) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw ParseError("unparsable token '" + token + "'", line_no);
    }
    if (pos != token.size())
        throw ParseError("unparsable token '" + token + "'", line_no);
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + token + "'", line_no);
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t p = line.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, p - start));
        start = p + 1;
    }
    return out;
}

inline std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t p = text.find('\n', start);
        std::string line(p == std::string_view::npos ? text.substr(start)
                                                     : text.substr(start, p - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace detail

/// Parses the UCI `processed.cleveland.data` text: 13 predictor fields plus a
/// final 0-4 disease grade per line, `?` for missing. Features are reordered
/// into the schema order and categorical raw codes are densified; the class
/// is binarized (grade > 0 means positive).
inline Dataset parse_uci_cleveland(std::string_view text) {
    const auto lines = detail::lines_of(text);
    if (lines.empty()) throw ParseError("empty input");

    const auto& cols = detail::uci_cleveland_columns();
    Dataset d;
    d.schema = FeatureSchema::cleveland();

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (lines[li].empty()) throw ParseError("empty line", line_no);
        const auto fields = detail::split(lines[li], ',');
        if (fields.size() != cols.size() + 1)
            throw ParseError("expected " + std::to_string(cols.size() + 1) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);

        Instance inst;
        inst.values.assign(d.schema.size(), std::nullopt);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& col = cols[c];
            const std::string& tok = fields[c];
            if (tok == "?") continue;  // stays missing
            double v = detail::parse_number(tok, line_no);
            if (col.categorical) {
                long raw = std::lround(v);
                if (static_cast<double>(raw) != v)
                    throw ParseError(std::string("feature '") + col.name +
                                         "': non-integer categorical value '" + tok + "'",
                                     line_no);
                auto it = std::find(col.raw_values.begin(), col.raw_values.end(),
                                    static_cast<int>(raw));
                if (it == col.raw_values.end())
                    throw ParseError(std::string("feature '") + col.name +
                                         "': unknown categorical value '" + tok + "'",
                                     line_no);
                v = static_cast<double>(it - col.raw_values.begin());
            }
            inst.values[col.schema_pos] = v;
        }

        double grade = detail::parse_number(fields.back(), line_no);
        long g = std::lround(grade);
        if (static_cast<double>(g) != grade || g < 0 || g > 4)
            throw ParseError("disease grade must be an integer in 0..4, got '" + fields.back() +
                                 "'",
                             line_no);
        inst.label = g > 0 ? Label::positive : Label::negative;
        d.instances.push_back(std::move(inst));
    }

    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Canonical serialization: CSV body + key-value schema sidecar

namespace detail {

inline std::string format_cell(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace detail

/// Key-value sidecar describing feature kinds, one line per feature.
inline std::string schema_to_text(const FeatureSchema& s) {
    std::string out = "schema v1\n";
    out += "class " + s.class_name + "\n";
    for (const Feature& f : s.features) {
        out += "feature " + f.name;
        out += f.categorical ? " categorical " + std::to_string(f.arity) : " continuous";
        out += "\n";
    }
    return out;
}

inline FeatureSchema schema_from_text(std::string_view text) {
    FeatureSchema s;
    const auto lines = detail::lines_of(text);
    if (lines.empty() || lines[0] != "schema v1")
        throw ParseError("schema sidecar must start with 'schema v1'", 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::istringstream is(lines[i]);
        std::string kw;
        is >> kw;
        if (kw == "class") {
            is >> s.class_name;
        } else if (kw == "feature") {
            Feature f;
            std::string kind;
            is >> f.name >> kind;
            if (kind == "categorical") {
                f.categorical = true;
                is >> f.arity;
            } else if (kind != "continuous") {
                throw ParseError("unknown feature kind '" + kind + "'", i + 1);
            }
            if (is.fail()) throw ParseError("malformed feature line", i + 1);
            s.features.push_back(std::move(f));
        } else {
            throw ParseError("unknown keyword '" + kw + "'", i + 1);
        }
    }
    s.validate();
    return s;
}

/// One-line header, then one row per instance; `?` marks missing cells and
/// the class column holds 0/1. Doubles are printed with round-trip precision.
inline std::string dataset_to_csv(const Dataset& d) {
    std::string out;
    for (const Feature& f : d.schema.features) out += f.name + ",";
    out += d.schema.class_name + "\n";
    for (const Instance& inst : d.instances) {
        for (const Cell& c : inst.values)
            out += (c ? detail::format_cell(*c) : std::string("?")) + ",";
        out += inst.label == Label::positive ? "1\n" : "0\n";
    }
    return out;
}

inline Dataset dataset_from_csv(std::string_view csv, const FeatureSchema& schema) {
    const auto lines = detail::lines_of(csv);
    if (lines.empty()) throw ParseError("empty input");

    std::string header;
    for (const Feature& f : schema.features) header += f.name + ",";
    header += schema.class_name;
    if (lines[0] != header) throw ParseError("header does not match schema", 1);

    Dataset d;
    d.schema = schema;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = detail::split(lines[li], ',');
        if (fields.size() != schema.size() + 1)
            throw ParseError("expected " + std::to_string(schema.size() + 1) + " fields, got " +
                                 std::to_string(fields.size()),
                             li + 1);
        Instance inst;
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (fields[j] == "?") {
                inst.values.push_back(std::nullopt);
            } else {
                inst.values.push_back(detail::parse_number(fields[j], li + 1));
            }
        }
        const std::string& cls = fields.back();
        if (cls == "1") inst.label = Label::positive;
        else if (cls == "0") inst.label = Label::negative;
        else throw ParseError("class column must be 0 or 1, got '" + cls + "'", li + 1);
        d.instances.push_back(std::move(inst));
    }

    d.validate();
    return d;
}

/// FNV-1a over the canonical serialization; identifies dataset content in
/// reports.
inline std::string dataset_fingerprint(const Dataset& d) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    feed(schema_to_text(d.schema));
    feed(dataset_to_csv(d));
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// Missing-value handling

enum class ImputeStrategy { mode_mean, drop_rows };

/// Per-feature fill values learned from a training partition: modal code for
/// categorical features, arithmetic mean for continuous ones.
struct ImputeStats {
    std::vector<double> fill;
};

inline ImputeStats compute_impute_stats(const Dataset& train) {
    ImputeStats st;
    st.fill.resize(train.schema.size());
    for (std::size_t j = 0; j < train.schema.size(); ++j) {
        const Feature& f = train.schema.features[j];
        if (f.categorical) {
            std::vector<std::size_t> counts(f.arity, 0);
            for (const Instance& inst : train.instances)
                if (inst.values[j]) counts[static_cast<std::size_t>(*inst.values[j])]++;
            std::size_t best = 0, best_count = 0, total = 0;
            for (std::size_t v = 0; v < counts.size(); ++v) {
                total += counts[v];
                if (counts[v] > best_count) {  // ties keep the smallest code
                    best_count = counts[v];
                    best = v;
                }
            }
            if (total == 0)
                throw Error("feature '" + f.name + "' is entirely missing");
            st.fill[j] = static_cast<double>(best);
        } else {
            double sum = 0;
            std::size_t n = 0;
            for (const Instance& inst : train.instances)
                if (inst.values[j]) {
                    sum += *inst.values[j];
                    ++n;
                }
            if (n == 0)
                throw Error("feature '" + f.name + "' is entirely missing");
            st.fill[j] = sum / static_cast<double>(n);
        }
    }
    return st;
}

inline Dataset apply_impute(Dataset d, const ImputeStats& st) {
    if (st.fill.size() != d.schema.size())
        throw Error("imputation statistics do not match the schema");
    for (Instance& inst : d.instances)
        for (std::size_t j = 0; j < inst.values.size(); ++j)
            if (!inst.values[j]) inst.values[j] = st.fill[j];
    return d;
}

inline Dataset impute_missing(const Dataset& d, ImputeStrategy strategy) {
    if (strategy == ImputeStrategy::drop_rows) {
        Dataset out;
        out.schema = d.schema;
        for (const Instance& inst : d.instances)
            if (inst.complete()) out.instances.push_back(inst);
        return out;
    }
    return apply_impute(d, compute_impute_stats(d));
}

// ---------------------------------------------------------------------------
// Projection

/// Keeps only the features whose mask bits are set, order preserved.
inline Dataset project(const Dataset& d, const FeatureMask& m) {
    if (m.size() != d.schema.size())
        throw Error("mask length " + std::to_string(m.size()) + " does not match schema size " +
                    std::to_string(d.schema.size()));
    if (m.none()) throw Error("cannot project through an all-zero mask");

    Dataset out;
    out.schema.class_name = d.schema.class_name;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < m.size(); ++j)
        if (m.test(j)) {
            keep.push_back(j);
            out.schema.features.push_back(d.schema.features[j]);
        }
    out.instances.reserve(d.instances.size());
    for (const Instance& inst : d.instances) {
        Instance p;
        p.label = inst.label;
        p.values.reserve(keep.size());
        for (std::size_t j : keep) p.values.push_back(inst.values[j]);
        out.instances.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stratified folds

struct FoldAssignment {
    std::vector<int> fold_of;  // instance index -> fold id
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_indices(int fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] == fold) out.push_back(i);
        return out;
    }
};

/// Deterministic stratified partition: per-class index lists are shuffled by
/// a seeded generator (Fisher-Yates over mt19937_64) and dealt round-robin,
/// with the dealing origin rotating between classes so fold sizes differ by
/// at most one overall and by at most one per class.
inline FoldAssignment stratified_folds(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("fold count must be >= 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < d.instances.size(); ++i)
        by_class[label_index(d.instances[i].label)].push_back(i);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < static_cast<std::size_t>(k))
            throw Error("class " + std::to_string(c) + " has " +
                        std::to_string(by_class[c].size()) + " instances, need at least " +
                        std::to_string(k) + " for " + std::to_string(k) + " folds");

    FoldAssignment fa;
    fa.fold_of.assign(d.instances.size(), -1);
    fa.k = k;
    fa.seed = seed;

    int start = 0;
    for (int c = 0; c < 2; ++c) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        auto idx = by_class[c];
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fa.fold_of[idx[i]] = static_cast<int>((start + i) % static_cast<std::size_t>(k));
        start = static_cast<int>((start + idx.size()) % static_cast<std::size_t>(k));
    }
    return fa;
}

/// Row subset by explicit indices, schema unchanged.
inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.schema = d.schema;
    out.instances.reserve(idx.size());
    for (std::size_t i : idx) out.instances.push_back(d.instances[i]);
    return out;
}

/// Splits into (training, held-out) row index lists for one fold.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_fold(
    const FoldAssignment& fa, int fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < fa.fold_of.size(); ++i)
        (fa.fold_of[i] == fold ? test : train).push_back(i);
    return {std::move(train), std::move(test)};
}

}  // namespace featsel
