#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "mcpsforge/core.hpp"

namespace mcpsforge {

enum class ColumnKind { continuous, categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> categories;  // categorical only, frozen at load

    int category_index(const std::string& v) const {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == v) return static_cast<int>(i);
        return static_cast<int>(categories.size());  // reserved "unknown"
    }
};

// Typed tabular data with a per-cell missing mask. Values are stored as
// doubles; categorical cells hold the category index. Immutable once
// loaded — pipeline components work on copies.
struct Dataset {
    std::string name;
    std::vector<ColumnSpec> columns;
    std::size_t n_rows = 0;
    std::vector<double> cells;           // row-major, n_rows * columns.size()
    std::vector<std::uint8_t> missing;   // same shape
    std::vector<int> labels;             // per-row class index
    std::vector<std::string> class_names;
    std::vector<int> row_ids;            // provenance into the originally loaded file

    // Instrumentation: counts row materializations, so tests can assert a
    // holdout set was untouched during optimization.
    std::shared_ptr<std::atomic<std::uint64_t>> touches =
        std::make_shared<std::atomic<std::uint64_t>>(0);

    std::size_t n_cols() const { return columns.size(); }

    double cell(std::size_t r, std::size_t c) const { return cells[r * n_cols() + c]; }
    bool is_missing(std::size_t r, std::size_t c) const { return missing[r * n_cols() + c] != 0; }

    void set_cell(std::size_t r, std::size_t c, double v, bool miss = false) {
        cells[r * n_cols() + c] = v;
        missing[r * n_cols() + c] = miss ? 1 : 0;
    }

    std::size_t missing_count() const {
        return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), 1));
    }

    void resize(std::size_t rows, std::size_t cols) {
        n_rows = rows;
        cells.assign(rows * cols, 0.0);
        missing.assign(rows * cols, 0);
        labels.assign(rows, 0);
        row_ids.resize(rows);
        std::iota(row_ids.begin(), row_ids.end(), 0);
    }

    std::uint64_t touch_count() const { return touches->load(); }
    void touch(std::uint64_t n = 1) const { touches->fetch_add(n); }

    Dataset subset_rows(const std::vector<int>& rows) const {
        touch(rows.size());
        Dataset out;
        out.name = name;
        out.columns = columns;
        out.class_names = class_names;
        out.n_rows = rows.size();
        const std::size_t c = n_cols();
        out.cells.resize(rows.size() * c);
        out.missing.resize(rows.size() * c);
        out.labels.resize(rows.size());
        out.row_ids.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto r = static_cast<std::size_t>(rows[i]);
            std::copy_n(cells.begin() + r * c, c, out.cells.begin() + i * c);
            std::copy_n(missing.begin() + r * c, c, out.missing.begin() + i * c);
            out.labels[i] = labels[r];
            out.row_ids[i] = row_ids[r];
        }
        return out;
    }

    Dataset select_columns(const std::vector<int>& cols) const {
        Dataset out;
        out.name = name;
        out.n_rows = n_rows;
        out.labels = labels;
        out.class_names = class_names;
        out.row_ids = row_ids;
        out.touches = touches;
        out.columns.reserve(cols.size());
        for (int c : cols) out.columns.push_back(columns[static_cast<std::size_t>(c)]);
        out.cells.resize(n_rows * cols.size());
        out.missing.resize(n_rows * cols.size());
        for (std::size_t r = 0; r < n_rows; ++r)
            for (std::size_t j = 0; j < cols.size(); ++j) {
                const auto c = static_cast<std::size_t>(cols[j]);
                out.cells[r * cols.size() + j] = cell(r, c);
                out.missing[r * cols.size() + j] = missing[r * n_cols() + c];
            }
        return out;
    }

    std::vector<int> rows_of_class(int cls) const {
        std::vector<int> out;
        for (std::size_t r = 0; r < n_rows; ++r)
            if (labels[r] == cls) out.push_back(static_cast<int>(r));
        return out;
    }
};

// ── CSV ingestion ───────────────────────────────────────────────────
//
// UTF-8, comma separated, header row, last column is the class label.
// A cell equal to the missing marker, or empty, is missing.

using Schema = std::map<std::string, ColumnKind>;

inline Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open schema file: " + path);
    Schema schema;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw IngestError("malformed schema line: " + line);
        std::string key = line.substr(0, eq);
        std::string kind = line.substr(eq + 1);
        if (kind == "continuous") schema[key] = ColumnKind::continuous;
        else if (kind == "categorical") schema[key] = ColumnKind::categorical;
        else throw IngestError("unknown column kind '" + kind + "' in schema");
    }
    return schema;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

inline bool parse_real(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && std::isfinite(out);
}

}  // namespace detail

inline Dataset load_csv(const std::string& path, const std::string& missing_marker = "?",
                        const Schema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file: " + path);
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2) throw IngestError("need at least one feature column and a label column");
    const std::size_t n_cols = header.size() - 1;

    std::vector<std::vector<std::string>> raw;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw IngestError("row " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " cells, expected " +
                              std::to_string(header.size()));
        raw.push_back(std::move(fields));
    }
    if (raw.empty()) throw IngestError("no data rows in " + path);

    auto is_missing_text = [&](const std::string& s) { return s.empty() || s == missing_marker; };

    // Column typing: schema wins; otherwise continuous iff every
    // non-missing cell parses as a finite real.
    std::vector<ColumnKind> kinds(n_cols, ColumnKind::continuous);
    for (std::size_t c = 0; c < n_cols; ++c) {
        auto it = schema.find(header[c]);
        if (it != schema.end()) {
            kinds[c] = it->second;
            continue;
        }
        for (const auto& row : raw) {
            double v;
            if (!is_missing_text(row[c]) && !detail::parse_real(row[c], v)) {
                kinds[c] = ColumnKind::categorical;
                break;
            }
        }
    }

    Dataset d;
    d.name = std::filesystem::path(path).stem().string();
    d.columns.resize(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        d.columns[c].name = header[c];
        d.columns[c].kind = kinds[c];
        if (kinds[c] == ColumnKind::categorical) {
            for (const auto& row : raw)
                if (!is_missing_text(row[c]) &&
                    std::find(d.columns[c].categories.begin(), d.columns[c].categories.end(),
                              row[c]) == d.columns[c].categories.end())
                    d.columns[c].categories.push_back(row[c]);
        }
    }

    d.resize(raw.size(), n_cols);
    for (std::size_t r = 0; r < raw.size(); ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            const std::string& text = raw[r][c];
            if (is_missing_text(text)) {
                d.set_cell(r, c, 0.0, true);
            } else if (kinds[c] == ColumnKind::continuous) {
                double v;
                if (!detail::parse_real(text, v))
                    throw IngestError("row " + std::to_string(r + 2) + ", column '" + header[c] +
                                      "': cannot parse '" + text + "' as a real");
                d.set_cell(r, c, v);
            } else {
                d.set_cell(r, c, d.columns[c].category_index(text));
            }
        }
        const std::string& lab = raw[r].back();
        if (is_missing_text(lab))
            throw IngestError("row " + std::to_string(r + 2) + ": missing class label");
        auto it = std::find(d.class_names.begin(), d.class_names.end(), lab);
        if (it == d.class_names.end()) {
            d.class_names.push_back(lab);
            d.labels[r] = static_cast<int>(d.class_names.size()) - 1;
        } else {
            d.labels[r] = static_cast<int>(it - d.class_names.begin());
        }
    }
    return d;
}

inline void save_csv(const Dataset& d, const std::string& path,
                     const std::string& missing_marker = "?") {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write: " + path);
    for (const auto& col : d.columns) out << col.name << ',';
    out << "class\n";
    char buf[40];
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        for (std::size_t c = 0; c < d.n_cols(); ++c) {
            if (d.is_missing(r, c)) {
                out << missing_marker;
            } else if (d.columns[c].kind == ColumnKind::continuous) {
                std::snprintf(buf, sizeof buf, "%.17g", d.cell(r, c));
                out << buf;
            } else {
                const auto idx = static_cast<std::size_t>(d.cell(r, c));
                out << (idx < d.columns[c].categories.size() ? d.columns[c].categories[idx]
                                                             : std::string("unknown"));
            }
            out << ',';
        }
        out << d.class_names[static_cast<std::size_t>(d.labels[r])] << '\n';
    }
}

// ── splits and folds ────────────────────────────────────────────────

inline std::pair<Dataset, Dataset> split_holdout(const Dataset& d, double train_fraction,
                                                 std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw SplitError("train fraction must be in (0, 1)");
    if (d.class_names.size() < 2)
        throw SplitError("cannot stratify a split over fewer than 2 classes");

    std::vector<int> train_rows, test_rows;
    auto rng = make_rng(seed, "holdout");
    for (std::size_t cls = 0; cls < d.class_names.size(); ++cls) {
        auto rows = d.rows_of_class(static_cast<int>(cls));
        if (rows.size() < 2)
            throw SplitError("class '" + d.class_names[cls] + "' has fewer than 2 rows");
        std::shuffle(rows.begin(), rows.end(), rng);
        auto n_train = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(rows.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, rows.size() - 1);
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<long>(n_train));
        test_rows.insert(test_rows.end(), rows.begin() + static_cast<long>(n_train), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    auto train = d.subset_rows(train_rows);
    auto test = d.subset_rows(test_rows);
    train.name = d.name + ".train";
    test.name = d.name + ".test";
    return {std::move(train), std::move(test)};
}

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // per-row fold index in [0, k)

    std::vector<int> rows_in_fold(int fold) const {
        std::vector<int> out;
        for (std::size_t r = 0; r < assignment.size(); ++r)
            if (assignment[r] == fold) out.push_back(static_cast<int>(r));
        return out;
    }
    std::vector<int> rows_outside_fold(int fold) const {
        std::vector<int> out;
        for (std::size_t r = 0; r < assignment.size(); ++r)
            if (assignment[r] != fold) out.push_back(static_cast<int>(r));
        return out;
    }
};

// Stratified k-fold plan: rows of each class are shuffled and dealt
// round-robin, so per-class fold sizes differ by at most one. Classes
// rarer than k simply leave some folds without that class.
inline FoldPlan plan_folds(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) throw SplitError("fold count must be at least 2");
    if (static_cast<std::size_t>(k) > d.n_rows)
        throw SplitError("fold count " + std::to_string(k) + " exceeds row count " +
                         std::to_string(d.n_rows));
    FoldPlan plan;
    plan.k = k;
    plan.assignment.assign(d.n_rows, 0);
    auto rng = make_rng(seed, "folds");
    int next_start = 0;  // rotate the deal start so totals stay balanced
    for (std::size_t cls = 0; cls < d.class_names.size(); ++cls) {
        auto rows = d.rows_of_class(static_cast<int>(cls));
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t i = 0; i < rows.size(); ++i)
            plan.assignment[static_cast<std::size_t>(rows[i])] =
                static_cast<int>((next_start + i) % static_cast<std::size_t>(k));
        next_start = static_cast<int>((next_start + rows.size()) % static_cast<std::size_t>(k));
    }
    return plan;
}

}  // namespace mcpsforge
