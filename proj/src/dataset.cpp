#include "missq/dataset.hpp"

#include "missq/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace missq {

std::string_view to_string(VariableKind kind) noexcept {
    return kind == VariableKind::numerical ? "numerical" : "categorical";
}

// ---------------------------------------------------------------------------
// VariableColumn

VariableColumn::VariableColumn(std::string name, VariableKind kind, std::size_t n)
    : name_(std::move(name)), kind_(kind), missing_(n) {}

VariableColumn VariableColumn::numerical(std::string name, std::span<const std::optional<double>> cells) {
    VariableColumn col(std::move(name), VariableKind::numerical, cells.size());
    col.numbers_.assign(cells.size(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) {
            col.missing_.insert(i);
            ++col.missing_count_;
            continue;
        }
        if (!std::isfinite(*cells[i]))
            throw ValidationError("variable '" + col.name_ + "': non-finite recorded value at item " +
                                  std::to_string(i));
        col.numbers_[i] = *cells[i];
    }
    return col;
}

VariableColumn VariableColumn::categorical(std::string name,
                                           std::span<const std::optional<std::string>> cells) {
    VariableColumn col(std::move(name), VariableKind::categorical, cells.size());
    std::vector<std::string> labels;
    for (const auto& c : cells)
        if (c) labels.push_back(*c);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    col.categories_ = std::move(labels);

    col.codes_.assign(cells.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) {
            col.missing_.insert(i);
            ++col.missing_count_;
            continue;
        }
        auto it = std::lower_bound(col.categories_.begin(), col.categories_.end(), *cells[i]);
        col.codes_[i] = static_cast<std::uint32_t>(it - col.categories_.begin());
    }
    return col;
}

std::optional<double> VariableColumn::number(std::size_t i) const {
    if (kind_ != VariableKind::numerical || i >= item_count() || is_missing(i)) return std::nullopt;
    return numbers_[i];
}

std::optional<std::string> VariableColumn::label(std::size_t i) const {
    if (i >= item_count() || is_missing(i)) return std::nullopt;
    if (kind_ == VariableKind::categorical) return categories_[codes_[i]];
    return format_number(numbers_[i]);
}

VariableColumn VariableColumn::with_missing(const ItemSet& extra) const {
    VariableColumn out = *this;
    out.missing_ |= extra;
    extra.for_each([&](std::size_t i) {
        if (out.kind_ == VariableKind::numerical) out.numbers_[i] = 0.0;
        else out.codes_[i] = 0;
    });
    out.missing_count_ = out.missing_.size();
    if (out.kind_ == VariableKind::categorical) {
        // Labels that no longer occur among recorded cells are dropped so the
        // category list stays the set of recorded labels.
        std::vector<char> used(out.categories_.size(), 0);
        out.missing_.complement().for_each([&](std::size_t i) { used[out.codes_[i]] = 1; });
        std::vector<std::uint32_t> remap(out.categories_.size(), 0);
        std::vector<std::string> kept;
        for (std::size_t c = 0; c < out.categories_.size(); ++c) {
            if (!used[c]) continue;
            remap[c] = static_cast<std::uint32_t>(kept.size());
            kept.push_back(out.categories_[c]);
        }
        if (kept.size() != out.categories_.size()) {
            out.missing_.complement().for_each([&](std::size_t i) { out.codes_[i] = remap[out.codes_[i]]; });
            out.categories_ = std::move(kept);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// IncompleteDataset

IncompleteDataset::IncompleteDataset(std::string name, std::vector<VariableColumn> variables)
    : name_(std::move(name)), variables_(std::move(variables)) {
    item_count_ = variables_.empty() ? 0 : variables_.front().item_count();
    std::unordered_set<std::string> seen;
    for (const auto& v : variables_) {
        if (v.item_count() != item_count_)
            throw ValidationError("variable '" + v.name() + "' has " + std::to_string(v.item_count()) +
                                  " items, expected " + std::to_string(item_count_));
        if (!seen.insert(v.name()).second)
            throw ValidationError("duplicate variable name '" + v.name() + "'");
    }
}

IncompleteDataset::IncompleteDataset(std::string name, std::size_t item_count)
    : name_(std::move(name)), item_count_(item_count) {}

const VariableColumn& IncompleteDataset::variable(std::size_t j) const {
    if (j >= variables_.size())
        throw ValidationError("variable index " + std::to_string(j) + " out of range (K = " +
                              std::to_string(variables_.size()) + ")");
    return variables_[j];
}

std::optional<std::size_t> IncompleteDataset::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < variables_.size(); ++j)
        if (variables_[j].name() == name) return j;
    return std::nullopt;
}

std::size_t IncompleteDataset::resolve(std::string_view name_or_index) const {
    if (auto j = index_of(name_or_index)) return *j;
    std::size_t idx = 0;
    const char* first = name_or_index.data();
    const char* last = first + name_or_index.size();
    auto [ptr, ec] = std::from_chars(first, last, idx);
    if (ec == std::errc{} && ptr == last && !name_or_index.empty()) {
        variable(idx);
        return idx;
    }
    throw ValidationError("unknown variable '" + std::string(name_or_index) + "'");
}

std::size_t IncompleteDataset::total_missing() const noexcept {
    std::size_t total = 0;
    for (const auto& v : variables_) total += v.missing_count();
    return total;
}

IncompleteDataset IncompleteDataset::renamed(std::string name) const {
    IncompleteDataset out = *this;
    out.name_ = std::move(name);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

void IngestConfig::validate() const {
    if (missing_tokens.empty()) throw ValidationError("missing_tokens must not be empty");
    if (delimiter == '"' || delimiter == '\n' || delimiter == '\r' || delimiter == '\0')
        throw ValidationError(std::string("invalid delimiter character (code ") +
                              std::to_string(static_cast<int>(delimiter)) + ")");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Record {
    std::vector<std::string> fields;
    std::size_t line;  // 1-based physical line where the record starts
};

// RFC-4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. Accepts LF or CRLF line endings.
class CsvReader {
public:
    CsvReader(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

    bool next(Record& rec) {
        rec.fields.clear();
        if (pos_ >= text_.size()) return false;
        rec.line = line_;
        std::string field;
        bool quoted = false;
        bool was_quoted = false;
        while (true) {
            if (pos_ >= text_.size()) {
                if (quoted) throw IngestError("unterminated quoted field starting on row " + std::to_string(rec.line), rec.line, rec.fields.size() + 1);
                rec.fields.push_back(std::move(field));
                return true;
            }
            const char c = text_[pos_++];
            if (quoted) {
                if (c == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"' && !was_quoted && trim(field).empty()) {
                field.clear();
                quoted = true;
                was_quoted = true;
            } else if (c == delim_) {
                rec.fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
                ++line_;
                rec.fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(c);
            }
        }
    }

private:
    std::string_view text_;
    char delim_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

bool is_blank(const Record& r) { return r.fields.size() == 1 && trim(r.fields[0]).empty(); }

}  // namespace

IncompleteDataset read_csv_string(std::string_view text, const IngestConfig& config, std::string name) {
    config.validate();
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::unordered_set<std::string> tokens;
    for (const auto& t : config.missing_tokens) tokens.insert(lower(trim(t)));

    CsvReader reader(text, config.delimiter);
    Record rec;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;
    std::size_t width = 0;
    bool have_width = false;

    while (reader.next(rec)) {
        if (is_blank(rec)) continue;
        if (!have_width) {
            width = rec.fields.size();
            have_width = true;
            if (config.header) {
                for (auto& f : rec.fields) names.emplace_back(trim(f));
                continue;
            }
            for (std::size_t j = 0; j < width; ++j) names.push_back("V" + std::to_string(j + 1));
        }
        if (rec.fields.size() != width)
            throw IngestError("row " + std::to_string(rec.line) + " has " + std::to_string(rec.fields.size()) +
                                  " fields, expected " + std::to_string(width),
                              rec.line);
        rows.push_back(std::move(rec.fields));
        row_lines.push_back(rec.line);
    }
    if (!have_width) {
        if (config.header) throw IngestError("empty input: no header row");
        return IncompleteDataset(std::move(name), 0);
    }

    {
        std::unordered_set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw ValidationError("duplicate column header '" + n + "'");
    }
    for (const auto& [var, kind] : config.kind_overrides) {
        (void)kind;
        if (std::find(names.begin(), names.end(), var) == names.end())
            throw ValidationError("kind override for unknown column '" + var + "'");
    }

    const std::size_t n = rows.size();
    std::vector<VariableColumn> columns;
    columns.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
        std::vector<std::optional<std::string>> cells(n);
        std::vector<std::optional<double>> nums(n);
        bool all_numeric = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::string_view cell = trim(rows[i][j]);
            if (tokens.contains(lower(cell))) continue;
            cells[i] = std::string(cell);
            nums[i] = parse_number(cell);
            if (!nums[i]) all_numeric = false;
        }
        VariableKind kind = all_numeric ? VariableKind::numerical : VariableKind::categorical;
        if (auto it = config.kind_overrides.find(names[j]); it != config.kind_overrides.end()) {
            if (it->second == VariableKind::numerical && !all_numeric) {
                for (std::size_t i = 0; i < n; ++i)
                    if (cells[i] && !nums[i])
                        throw IngestError("column '" + names[j] + "' is declared numerical but row " +
                                              std::to_string(row_lines[i]) + " holds '" + *cells[i] + "'",
                                          row_lines[i], j + 1);
            }
            kind = it->second;
        }
        if (kind == VariableKind::numerical) columns.push_back(VariableColumn::numerical(names[j], nums));
        else columns.push_back(VariableColumn::categorical(names[j], cells));
    }
    return IncompleteDataset(std::move(name), std::move(columns));
}

IncompleteDataset read_csv(std::istream& in, const IngestConfig& config, std::string name) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed while reading CSV stream");
    return read_csv_string(text, config, std::move(name));
}

IncompleteDataset load_csv(const std::filesystem::path& path, const IngestConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in, config, path.stem().string());
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_field(std::string_view s, char delim) {
    const bool quote = s.find_first_of(std::string{delim, '"', '\n', '\r'}) != std::string_view::npos ||
                       (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                                       std::isspace(static_cast<unsigned char>(s.back()))));
    if (!quote) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

void write_field(std::ostream& out, std::string_view s, char delim) { out << csv_field(s, delim); }

}  // namespace

void write_csv(std::ostream& out, const IncompleteDataset& d, const CsvWriteOptions& options) {
    const auto& vars = d.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (j) out << options.delimiter;
        write_field(out, vars[j].name(), options.delimiter);
    }
    out << '\n';
    for (std::size_t i = 0; i < d.item_count(); ++i) {
        for (std::size_t j = 0; j < vars.size(); ++j) {
            if (j) out << options.delimiter;
            const auto& v = vars[j];
            if (v.is_missing(i)) {
                write_field(out, options.missing_token, options.delimiter);
            } else if (v.kind() == VariableKind::numerical) {
                out << format_number(v.numbers()[i]);
            } else {
                write_field(out, v.categories()[v.codes()[i]], options.delimiter);
            }
        }
        out << '\n';
    }
}

std::string to_csv_string(const IncompleteDataset& d, const CsvWriteOptions& options) {
    std::ostringstream out;
    write_csv(out, d, options);
    return out.str();
}

void save_csv(const std::filesystem::path& path, const IncompleteDataset& d, const CsvWriteOptions& options) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, d, options);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace missq
