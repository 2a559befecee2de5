#include "limeout/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "limeout/random.hpp"

namespace limeout {

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i].name == name) return i;
    return std::nullopt;
}

void FeatureSchema::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& f : features) {
        if (!seen.insert(f.name).second)
            throw SchemaError("duplicate feature name: " + f.name);
        if (f.name == target)
            throw SchemaError("target column '" + target + "' listed among features");
    }
    if (encodings.size() != features.size())
        throw SchemaError("encodings/features size mismatch");
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].kind == FeatureKind::Numerical) continue;
        std::unordered_set<std::string> values;
        for (const auto& v : encodings[i])
            if (!values.insert(v).second)
                throw SchemaError("encoding for '" + features[i].name +
                                  "' maps two codes to value '" + v + "'");
    }
}

void Dataset::validate() const {
    schema.validate();
    if (values.size() != labels.size() * schema.size())
        throw SchemaError("row storage does not match label count");
    for (int y : labels)
        if (y != 0 && y != 1) throw SchemaError("label outside {0,1}");
    for (std::size_t r = 0; r < n_rows(); ++r)
        for (std::size_t c = 0; c < schema.size(); ++c)
            if (schema.is_categorical(c)) {
                double v = at(r, c);
                if (v != std::floor(v) || v < 0 || v >= static_cast<double>(schema.cardinality(c)))
                    throw SchemaError("categorical code out of range in column '" +
                                      schema.features[c].name + "'");
            }
}

std::string Dataset::decode(std::size_t r, std::size_t c) const {
    if (schema.is_categorical(c))
        return schema.encodings[c][static_cast<std::size_t>(at(r, c))];
    std::ostringstream os;
    os << at(r, c);
    return os.str();
}

SchemaHint SchemaHint::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schema hint file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema hint " + path + ": " + e.what());
    }
    SchemaHint hint;
    if (!j.contains("columns") || !j["columns"].is_object())
        throw SchemaError("schema hint " + path + ": missing 'columns' object");
    for (const auto& [name, role] : j["columns"].items()) {
        std::string r = role.get<std::string>();
        if (r != "categorical" && r != "numerical" && r != "target")
            throw SchemaError("schema hint " + path + ": column '" + name +
                              "' has unknown role '" + r + "'");
        hint.columns.push_back({name, r});
    }
    if (j.contains("positive_label")) hint.positive_label = j["positive_label"].get<std::string>();
    return hint;
}

namespace {

// Minimal RFC-4180 style row splitter: quoted fields may contain commas and
// doubled quotes.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv_text(const std::string& text, const std::optional<SchemaHint>& hint,
                      const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(origin + ": empty file (no header row)");
    std::vector<std::string> header = split_csv_row(line);
    for (auto& h : header) h = trim(h);
    const std::size_t n_cols = header.size();

    // Resolve column roles.
    std::vector<std::string> roles(n_cols);  // "categorical" | "numerical" | "target" | ""
    std::size_t target_col = n_cols - 1;
    if (hint) {
        std::unordered_map<std::string, std::string> role_by_name;
        for (const auto& c : hint->columns) role_by_name[c.name] = c.role;
        bool target_seen = false;
        for (std::size_t i = 0; i < n_cols; ++i) {
            auto it = role_by_name.find(header[i]);
            if (it == role_by_name.end())
                throw SchemaError(origin + ": column '" + header[i] +
                                  "' has no role in the schema hint");
            roles[i] = it->second;
            if (roles[i] == "target") {
                if (target_seen) throw SchemaError(origin + ": multiple target columns");
                target_col = i;
                target_seen = true;
            }
        }
        if (!target_seen) throw SchemaError(origin + ": schema hint declares no target");
    }

    // First pass: collect raw rows, dropping any containing the missing marker.
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> fields = split_csv_row(line);
        if (fields.size() != n_cols)
            throw ParseError(origin + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(n_cols));
        bool missing = false;
        for (auto& f : fields) {
            f = trim(f);
            if (f == "?") missing = true;
        }
        if (missing) continue;
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw ParseError(origin + ": no data rows");

    // Without a hint, infer kinds: a column where every value parses as a
    // number is numerical.
    if (!hint) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c == target_col) {
                roles[c] = "target";
                continue;
            }
            bool numeric = true;
            double tmp;
            for (const auto& r : rows)
                if (!parse_number(r[c], tmp)) {
                    numeric = false;
                    break;
                }
            roles[c] = numeric ? "numerical" : "categorical";
        }
    }

    Dataset d;
    d.schema.target = header[target_col];
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == target_col) continue;
        feature_cols.push_back(c);
        d.schema.features.push_back({header[c], roles[c] == "categorical"
                                                    ? FeatureKind::Categorical
                                                    : FeatureKind::Numerical});
    }
    d.schema.encodings.resize(d.schema.features.size());

    // Label mapping. {0,1} targets pass through; string targets need a
    // declared positive label to fix which class is 1.
    std::unordered_set<std::string> target_values;
    for (const auto& r : rows) target_values.insert(r[target_col]);
    if (target_values.size() != 2 && !(target_values.size() == 1 &&
                                       (target_values.count("0") || target_values.count("1"))))
        throw SchemaError(origin + ": target column '" + d.schema.target + "' has " +
                          std::to_string(target_values.size()) + " distinct values, need 2");
    bool numeric_target = true;
    for (const auto& v : target_values)
        if (v != "0" && v != "1") numeric_target = false;
    std::string positive;
    if (!numeric_target) {
        if (!hint || !hint->positive_label)
            throw SchemaError(origin + ": target '" + d.schema.target +
                              "' is non-numeric; the schema hint must set positive_label");
        positive = *hint->positive_label;
        if (!target_values.count(positive))
            throw SchemaError(origin + ": positive_label '" + positive +
                              "' never appears in target column");
    }

    // Encode. Categorical codes are assigned in first-appearance order.
    std::vector<std::unordered_map<std::string, int>> code_of(d.schema.features.size());
    d.values.reserve(rows.size() * d.schema.features.size());
    d.labels.reserve(rows.size());
    for (const auto& r : rows) {
        for (std::size_t fi = 0; fi < feature_cols.size(); ++fi) {
            const std::string& raw = r[feature_cols[fi]];
            if (d.schema.features[fi].kind == FeatureKind::Numerical) {
                double v;
                if (!parse_number(raw, v))
                    throw ParseError(origin + ": column '" + d.schema.features[fi].name +
                                     "' has unparseable numeral '" + raw + "'");
                d.values.push_back(v);
            } else {
                auto [it, inserted] =
                    code_of[fi].try_emplace(raw, static_cast<int>(code_of[fi].size()));
                if (inserted) d.schema.encodings[fi].push_back(raw);
                d.values.push_back(static_cast<double>(it->second));
            }
        }
        const std::string& t = r[target_col];
        d.labels.push_back(numeric_target ? (t == "1" ? 1 : 0) : (t == positive ? 1 : 0));
    }
    d.schema.validate();
    return d;
}

Dataset load_csv(const std::string& path, const std::optional<SchemaHint>& hint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), hint, path);
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    if (d.n_rows() == 0) throw ArgumentError("cannot split an empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ArgumentError("test_fraction must be in (0,1)");

    const std::size_t n = d.n_rows();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)  // Fisher-Yates
        std::swap(order[i], order[rng.below(i + 1)]);

    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n_test == 0) n_test = 1;
    if (n_test >= n) n_test = n - 1;

    auto take = [&](std::size_t begin, std::size_t count) {
        Dataset out;
        out.schema = d.schema;
        out.values.reserve(count * d.n_features());
        out.labels.reserve(count);
        for (std::size_t i = begin; i < begin + count; ++i) {
            auto r = d.row(order[i]);
            out.values.insert(out.values.end(), r.begin(), r.end());
            out.labels.push_back(d.labels[order[i]]);
        }
        return out;
    };
    return {take(n_test, n - n_test), take(0, n_test)};
}

Dataset drop_columns(const Dataset& d, const std::vector<std::string>& names) {
    std::vector<bool> drop(d.n_features(), false);
    for (const auto& name : names) {
        auto idx = d.schema.index_of(name);
        if (!idx) throw SchemaError("unknown feature to drop: '" + name + "'");
        drop[*idx] = true;
    }
    Dataset out;
    out.schema.target = d.schema.target;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < d.n_features(); ++c)
        if (!drop[c]) {
            keep.push_back(c);
            out.schema.features.push_back(d.schema.features[c]);
            out.schema.encodings.push_back(d.schema.encodings[c]);
        }
    if (keep.empty()) throw ArgumentError("dropping every feature leaves an empty dataset");
    out.values.reserve(d.n_rows() * keep.size());
    out.labels = d.labels;
    for (std::size_t r = 0; r < d.n_rows(); ++r)
        for (std::size_t c : keep) out.values.push_back(d.at(r, c));
    return out;
}

Dataset concat_rows(const Dataset& a, const Dataset& b) {
    if (a.schema.features.size() != b.schema.features.size())
        throw SchemaError("cannot concatenate datasets with different schemas");
    for (std::size_t i = 0; i < a.schema.features.size(); ++i)
        if (a.schema.features[i].name != b.schema.features[i].name ||
            a.schema.features[i].kind != b.schema.features[i].kind ||
            a.schema.encodings[i] != b.schema.encodings[i])
            throw SchemaError("cannot concatenate datasets with different schemas");
    Dataset out = a;
    out.values.insert(out.values.end(), b.values.begin(), b.values.end());
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

}  // namespace limeout
