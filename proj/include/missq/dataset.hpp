#pragma once

#include "missq/item_set.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace missq {

enum class VariableKind { numerical, categorical };

std::string_view to_string(VariableKind kind) noexcept;

/// One variable: N cells, each Recorded(value) or Missing, held as a value
/// array plus an explicit missing mask. Missing slots in the value arrays are
/// zero and never read.
class VariableColumn {
public:
    static VariableColumn numerical(std::string name, std::span<const std::optional<double>> cells);
    static VariableColumn categorical(std::string name,
                                      std::span<const std::optional<std::string>> cells);

    const std::string& name() const noexcept { return name_; }
    VariableKind kind() const noexcept { return kind_; }
    std::size_t item_count() const noexcept { return missing_.universe(); }

    const ItemSet& missing() const noexcept { return missing_; }
    ItemSet recorded() const { return missing_.complement(); }
    std::size_t missing_count() const noexcept { return missing_count_; }
    std::size_t recorded_count() const noexcept { return item_count() - missing_count_; }
    bool is_missing(std::size_t i) const noexcept { return missing_.contains(i); }

    /// Dense value array, length N. Numerical columns only.
    std::span<const double> numbers() const noexcept { return numbers_; }
    /// Per-item category code into `categories()`, length N. Categorical only.
    std::span<const std::uint32_t> codes() const noexcept { return codes_; }
    /// Distinct recorded labels, sorted ascending (byte order).
    const std::vector<std::string>& categories() const noexcept { return categories_; }

    std::optional<double> number(std::size_t i) const;
    std::optional<std::string> label(std::size_t i) const;

    /// Copy with the given items additionally set Missing.
    VariableColumn with_missing(const ItemSet& extra) const;

    friend bool operator==(const VariableColumn&, const VariableColumn&) = default;

private:
    VariableColumn(std::string name, VariableKind kind, std::size_t n);

    std::string name_;
    VariableKind kind_;
    ItemSet missing_;
    std::size_t missing_count_ = 0;
    std::vector<double> numbers_;
    std::vector<std::uint32_t> codes_;
    std::vector<std::string> categories_;
};

/// K variables over N items. Immutable once built; generators produce new
/// datasets.
class IncompleteDataset {
public:
    IncompleteDataset() = default;
    /// Throws ValidationError on ragged columns or duplicate names.
    IncompleteDataset(std::string name, std::vector<VariableColumn> variables);
    /// Dataset with zero variables and `item_count` items.
    IncompleteDataset(std::string name, std::size_t item_count);

    const std::string& name() const noexcept { return name_; }
    std::size_t variable_count() const noexcept { return variables_.size(); }
    std::size_t item_count() const noexcept { return item_count_; }
    const std::vector<VariableColumn>& variables() const noexcept { return variables_; }

    /// Throws ValidationError when j >= K.
    const VariableColumn& variable(std::size_t j) const;
    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Accepts a variable name or a decimal index.
    std::size_t resolve(std::string_view name_or_index) const;

    /// D_Mj. Throws ValidationError when j >= K.
    const ItemSet& missing_set(std::size_t j) const { return variable(j).missing(); }
    /// D_Rj, the exact complement of D_Mj.
    ItemSet recorded_set(std::size_t j) const { return variable(j).recorded(); }

    std::size_t total_missing() const noexcept;
    bool is_complete() const noexcept { return total_missing() == 0; }

    IncompleteDataset renamed(std::string name) const;

    friend bool operator==(const IncompleteDataset&, const IncompleteDataset&) = default;

private:
    std::string name_;
    std::size_t item_count_ = 0;
    std::vector<VariableColumn> variables_;
};

struct IngestConfig {
    std::set<std::string> missing_tokens{"NaN", "NA", "N/A", "null", ""};
    std::map<std::string, VariableKind> kind_overrides;
    char delimiter = ',';
    bool header = true;

    /// Throws ValidationError when the config cannot be used.
    void validate() const;
};

/// Parses CSV text. `name` becomes the dataset name.
IncompleteDataset read_csv(std::istream& in, const IngestConfig& config, std::string name);
IncompleteDataset read_csv_string(std::string_view text, const IngestConfig& config,
                                  std::string name = "dataset");
IncompleteDataset load_csv(const std::filesystem::path& path, const IngestConfig& config = {});

struct CsvWriteOptions {
    std::string missing_token = "NaN";
    char delimiter = ',';
};

/// Writes a header row then one row per item. Numbers use the shortest
/// representation that round-trips; missing cells use `missing_token`.
void write_csv(std::ostream& out, const IncompleteDataset& d, const CsvWriteOptions& options = {});
std::string to_csv_string(const IncompleteDataset& d, const CsvWriteOptions& options = {});
void save_csv(const std::filesystem::path& path, const IncompleteDataset& d,
              const CsvWriteOptions& options = {});

/// Field text quoted per RFC 4180 when it contains the delimiter, quotes,
/// line breaks or surrounding whitespace.
std::string csv_field(std::string_view s, char delimiter = ',');

/// Shortest round-trip decimal form of a finite double.
std::string format_number(double v);

}  // namespace missq
