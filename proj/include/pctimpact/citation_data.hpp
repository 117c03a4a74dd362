#ifndef PCTIMPACT_CITATION_DATA_HPP
#define PCTIMPACT_CITATION_DATA_HPP

// Publication records, reference sets, institution samples, and the CSV
// ingestion contract:
//
//   id,institution,pub_year,category,citations[,inv_percentile]
//
// Columns may appear in any order. A paper with several subject categories is
// given either as repeated rows sharing an id or as a "|"-separated category
// list. Malformed rows are collected into a rejects report instead of
// aborting, unless they exceed IngestionConfig::max_reject_fraction.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pctimpact/errors.hpp"

namespace pctimpact {

struct PublicationRecord {
    std::string id;
    std::string institution;
    int pub_year = 0;
    std::vector<std::string> categories;
    std::int64_t citations = 0;
    std::optional<double> inv_percentile;

    bool operator==(const PublicationRecord&) const = default;
};

/// Throws PreconditionError when a record breaks its invariants.
inline void validate_record(const PublicationRecord& r) {
    if (r.citations < 0) throw PreconditionError("record " + r.id + ": negative citation count");
    if (r.categories.empty()) throw PreconditionError("record " + r.id + ": no subject category");
    if (r.inv_percentile && !(*r.inv_percentile >= 0.0 && *r.inv_percentile <= 100.0))
        throw PreconditionError("record " + r.id + ": percentile outside [0, 100]");
}

struct ReferenceSetKey {
    std::string category;
    int pub_year = 0;

    auto operator<=>(const ReferenceSetKey&) const = default;

    std::string label() const { return category + ":" + std::to_string(pub_year); }
};

/// All papers sharing one subject category and publication year.
struct ReferenceSet {
    ReferenceSetKey key;
    std::vector<PublicationRecord> members;

    std::vector<std::int64_t> citations() const {
        std::vector<std::int64_t> out;
        out.reserve(members.size());
        for (const auto& m : members) out.push_back(m.citations);
        return out;
    }
};

struct InstitutionSample {
    std::string institution;
    std::vector<PublicationRecord> records;

    std::size_t n() const { return records.size(); }
};

class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<PublicationRecord> records) : records_(std::move(records)) {
        for (const auto& r : records_) {
            validate_record(r);
            institutions_.insert(r.institution);
            if (years_.first == 0 || r.pub_year < years_.first) years_.first = r.pub_year;
            if (years_.second == 0 || r.pub_year > years_.second) years_.second = r.pub_year;
        }
    }

    const std::vector<PublicationRecord>& records() const { return records_; }
    const std::set<std::string>& institutions() const { return institutions_; }
    /// Inclusive (first, last) publication year; (0, 0) when empty.
    std::pair<int, int> year_range() const { return years_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// True when every record carries a pre-supplied inverted percentile.
    bool has_supplied_percentiles() const {
        return !records_.empty() &&
               std::all_of(records_.begin(), records_.end(), [](const auto& r) { return r.inv_percentile.has_value(); });
    }

private:
    std::vector<PublicationRecord> records_;
    std::set<std::string> institutions_;
    std::pair<int, int> years_{0, 0};
};

struct RejectedRow {
    std::size_t row = 0;  // 1-based line number in the source, header is line 1
    std::string reason;
};

struct IngestionConfig {
    /// Runs abort with a DataError when more than this fraction of data rows reject.
    double max_reject_fraction = 0.10;
    char category_separator = '|';
};

struct ParsedInput {
    Dataset dataset;
    std::vector<RejectedRow> rejects;
    std::size_t data_rows = 0;
};

namespace csv {

/// Splits one CSV line. Fields may be double-quoted; "" inside quotes is a literal quote.
inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    s = trim(s);
    Int value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    double value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

/// Shortest representation that parses back to the same double.
inline std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace csv

inline const std::vector<std::string>& required_columns() {
    static const std::vector<std::string> cols{"id", "institution", "pub_year", "category", "citations"};
    return cols;
}

inline ParsedInput parse_records(std::istream& source, const IngestionConfig& config = {}) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(source, line)) throw ConfigError("input is empty: a header row is required");
    ++line_no;
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::map<std::string, std::size_t> column;
    const auto header = csv::split_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) column[std::string(csv::trim(header[i]))] = i;
    for (const auto& name : required_columns())
        if (!column.contains(name)) throw ConfigError("missing required column '" + name + "'");
    const std::optional<std::size_t> pct_col =
        column.contains("inv_percentile") ? std::optional<std::size_t>(column["inv_percentile"]) : std::nullopt;

    ParsedInput out;
    std::vector<PublicationRecord> records;
    std::unordered_map<std::string, std::size_t> by_id;

    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        ++out.data_rows;
        const auto fields = csv::split_line(line);
        auto reject = [&](std::string reason) { out.rejects.push_back({line_no, std::move(reason)}); };
        auto field = [&](const std::string& name) -> std::string_view {
            const auto idx = column.at(name);
            return idx < fields.size() ? csv::trim(fields[idx]) : std::string_view{};
        };
        if (fields.size() < header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
            continue;
        }

        PublicationRecord rec;
        rec.id = std::string(field("id"));
        rec.institution = std::string(field("institution"));
        if (rec.id.empty()) { reject("empty id"); continue; }
        if (rec.institution.empty()) { reject("empty institution"); continue; }

        const auto year = csv::parse_int<int>(field("pub_year"));
        if (!year) { reject("pub_year is not an integer"); continue; }
        rec.pub_year = *year;

        const auto cites = csv::parse_int<std::int64_t>(field("citations"));
        if (!cites) { reject("citations is not an integer"); continue; }
        if (*cites < 0) { reject("citations is negative"); continue; }
        rec.citations = *cites;

        std::string_view cats = field("category");
        bool bad_category = false;
        while (true) {
            const auto pos = cats.find(config.category_separator);
            const auto cat = csv::trim(cats.substr(0, pos));
            if (cat.empty()) { bad_category = true; break; }
            if (std::find(rec.categories.begin(), rec.categories.end(), cat) == rec.categories.end())
                rec.categories.emplace_back(cat);
            if (pos == std::string_view::npos) break;
            cats.remove_prefix(pos + 1);
        }
        if (bad_category) { reject("empty subject category"); continue; }

        if (pct_col && *pct_col < fields.size() && !csv::trim(fields[*pct_col]).empty()) {
            const auto pct = csv::parse_real(fields[*pct_col]);
            if (!pct) { reject("inv_percentile is not a number"); continue; }
            if (!(*pct >= 0.0 && *pct <= 100.0)) { reject("inv_percentile outside [0, 100]"); continue; }
            rec.inv_percentile = *pct;
        }

        if (auto it = by_id.find(rec.id); it != by_id.end()) {
            auto& prev = records[it->second];
            if (prev.institution != rec.institution || prev.pub_year != rec.pub_year || prev.citations != rec.citations) {
                reject("conflicting repeat of id " + rec.id);
                continue;
            }
            for (auto& c : rec.categories)
                if (std::find(prev.categories.begin(), prev.categories.end(), c) == prev.categories.end())
                    prev.categories.push_back(std::move(c));
            // Best-category rule: keep the lowest inverted percentile.
            if (rec.inv_percentile && (!prev.inv_percentile || *rec.inv_percentile < *prev.inv_percentile))
                prev.inv_percentile = rec.inv_percentile;
            continue;
        }
        by_id.emplace(rec.id, records.size());
        records.push_back(std::move(rec));
    }

    if (out.data_rows > 0 &&
        static_cast<double>(out.rejects.size()) > config.max_reject_fraction * static_cast<double>(out.data_rows)) {
        throw DataError(std::to_string(out.rejects.size()) + " of " + std::to_string(out.data_rows) +
                        " rows rejected, above the configured limit");
    }
    if (records.empty()) throw EmptyDatasetError("input contains no valid records");
    out.dataset = Dataset(std::move(records));
    return out;
}

inline ParsedInput parse_records(std::string_view text, const IngestionConfig& config = {}) {
    std::istringstream in{std::string(text)};
    return parse_records(in, config);
}

/// Canonical CSV form: fixed column order, one row per paper, categories "|"-joined.
inline void write_records(std::ostream& out, const Dataset& d) {
    const bool any_pct = std::any_of(d.records().begin(), d.records().end(),
                                     [](const auto& r) { return r.inv_percentile.has_value(); });
    out << "id,institution,pub_year,category,citations";
    if (any_pct) out << ",inv_percentile";
    out << '\n';
    for (const auto& r : d.records()) {
        std::string cats;
        for (std::size_t i = 0; i < r.categories.size(); ++i) {
            if (i) cats += '|';
            cats += r.categories[i];
        }
        out << csv::quote(r.id) << ',' << csv::quote(r.institution) << ',' << r.pub_year << ',' << csv::quote(cats)
            << ',' << r.citations;
        if (any_pct) out << ',' << (r.inv_percentile ? csv::format_real(*r.inv_percentile) : std::string{});
        out << '\n';
    }
}

inline void write_rejects(std::ostream& out, std::span<const RejectedRow> rejects) {
    out << "row,reason\n";
    for (const auto& r : rejects) out << r.row << ',' << csv::quote(r.reason) << '\n';
}

inline Dataset filter_years(const Dataset& d, int last_year) {
    std::vector<PublicationRecord> kept;
    std::copy_if(d.records().begin(), d.records().end(), std::back_inserter(kept),
                 [last_year](const auto& r) { return r.pub_year <= last_year; });
    if (kept.empty()) throw EmptyDatasetError("no records published in or before " + std::to_string(last_year));
    return Dataset(std::move(kept));
}

/// One reference set per (category, year), ordered by key. A paper listed under
/// k categories is a full member of k sets.
inline std::vector<ReferenceSet> group_reference_sets(const Dataset& d) {
    std::map<ReferenceSetKey, std::vector<PublicationRecord>> groups;
    for (const auto& r : d.records())
        for (const auto& c : r.categories) groups[{c, r.pub_year}].push_back(r);
    std::vector<ReferenceSet> sets;
    sets.reserve(groups.size());
    for (auto& [key, members] : groups) sets.push_back({key, std::move(members)});
    return sets;
}

/// Best-category rule for inverted percentiles: the lowest value wins.
inline double best_category_percentile(std::span<const std::pair<std::string, double>> per_category) {
    if (per_category.empty()) throw PreconditionError("best_category_percentile: no categories given");
    double best = per_category.front().second;
    for (const auto& [category, value] : per_category) {
        if (!(value >= 0.0 && value <= 100.0))
            throw PreconditionError("best_category_percentile: value for " + category + " outside [0, 100]");
        best = std::min(best, value);
    }
    return best;
}

inline InstitutionSample select_institution_sample(const Dataset& d, const std::string& institution) {
    if (!d.institutions().contains(institution)) {
        std::string known;
        for (const auto& i : d.institutions()) known += (known.empty() ? "" : ", ") + i;
        throw LookupError("unknown institution '" + institution + "'; known: " + known);
    }
    InstitutionSample sample{institution, {}};
    std::copy_if(d.records().begin(), d.records().end(), std::back_inserter(sample.records),
                 [&](const auto& r) { return r.institution == institution; });
    return sample;
}

} // namespace pctimpact

#endif
