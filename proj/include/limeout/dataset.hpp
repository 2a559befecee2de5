#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "limeout/common.hpp"

namespace limeout {

enum class FeatureKind { Categorical, Numerical };

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::Numerical;
};

// Column layout of an encoded dataset. Categorical features carry a bijective
// value<->code map; code c decodes to encodings[feature][c].
struct FeatureSchema {
    std::vector<Feature> features;
    std::string target;
    std::vector<std::vector<std::string>> encodings;  // empty for numerical

    std::size_t size() const { return features.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    bool is_categorical(std::size_t i) const {
        return features[i].kind == FeatureKind::Categorical;
    }
    std::size_t cardinality(std::size_t i) const { return encodings[i].size(); }

    // Throws SchemaError if names collide, the target is listed as a feature,
    // or an encoding map is not bijective.
    void validate() const;
};

// Encoded tabular data: numerical values as-is, categorical values as integer
// codes, labels in {0,1}. Row-major storage.
struct Dataset {
    FeatureSchema schema;
    std::vector<double> values;
    std::vector<int> labels;

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_features() const { return schema.size(); }
    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * schema.size(), schema.size()};
    }
    double at(std::size_t r, std::size_t c) const { return values[r * schema.size() + c]; }

    void validate() const;

    // Decoded raw string for a cell (numerical cells print the stored value).
    std::string decode(std::size_t r, std::size_t c) const;
};

// Column roles used by schema hints; the hint file maps column name to one of
// {categorical, numerical, target}.
struct SchemaHint {
    struct Column {
        std::string name;
        std::string role;  // "categorical" | "numerical" | "target"
    };
    std::vector<Column> columns;
    std::optional<std::string> positive_label;

    static SchemaHint load(const std::string& path);
};

// Loads a CSV (UTF-8, header row, missing marker "?"). Rows containing the
// missing marker are dropped. Without a hint, column kinds are inferred
// (all-numeric parses as numerical) and the last column is the target.
// Target values must be {0,1} or, given hint.positive_label, two strings.
Dataset load_csv(const std::string& path, const std::optional<SchemaHint>& hint = {});

// Same parser over an in-memory buffer; `origin` names the source in errors.
Dataset load_csv_text(const std::string& text, const std::optional<SchemaHint>& hint,
                      const std::string& origin);

// Seeded disjoint partition; test size = round(test_fraction * n_rows).
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

// New dataset without the named columns. Unknown names throw SchemaError.
Dataset drop_columns(const Dataset& d, const std::vector<std::string>& names);

// Row-wise concatenation; schemas must be identical.
Dataset concat_rows(const Dataset& a, const Dataset& b);

}  // namespace limeout
