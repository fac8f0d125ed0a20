#pragma once

// Country-year panel: loading the six source schemas, outer-join merging,
// income filtering, first differencing, wave forward-fill and summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "povkit/csv.hpp"
#include "povkit/error.hpp"

namespace povkit {

enum class IncomeLevel { low, lower_middle, upper_middle, high };

inline constexpr std::array<IncomeLevel, 4> kAllIncomeLevels = {
    IncomeLevel::low, IncomeLevel::lower_middle, IncomeLevel::upper_middle, IncomeLevel::high};

inline std::string_view to_string(IncomeLevel level) {
  switch (level) {
    case IncomeLevel::low: return "low";
    case IncomeLevel::lower_middle: return "lower_middle";
    case IncomeLevel::upper_middle: return "upper_middle";
    case IncomeLevel::high: return "high";
  }
  return "";
}

// Label used in the appendix-style index tables.
inline std::string_view display_name(IncomeLevel level) {
  switch (level) {
    case IncomeLevel::low: return "Low income";
    case IncomeLevel::lower_middle: return "Lower-middle income";
    case IncomeLevel::upper_middle: return "Upper-middle income";
    case IncomeLevel::high: return "High income";
  }
  return "";
}

// Accepts both the snake_case codes and the display labels, case-insensitively.
inline std::optional<IncomeLevel> parse_income_level(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c == ' ' || c == '-' || c == '_') {
      s.push_back('_');
    } else {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s.ends_with("_income")) s.resize(s.size() - 7);
  for (auto level : kAllIncomeLevels)
    if (s == to_string(level)) return level;
  return std::nullopt;
}

inline bool valid_iso3(std::string_view code) {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

using CountryYear = std::pair<std::string, int>;

struct CountryKey {
  std::string iso3;
  std::optional<IncomeLevel> income_level;

  friend bool operator==(const CountryKey&, const CountryKey&) = default;
};

enum class Field {
  headcount,
  poverty_gap,
  poverty_gap_sq,
  watts,
  gini,
  gdp_growth,
  fii,
  outreach,
  usage,
  account_all,
  account_male,
  account_female,
  population,
  branches_per_100k,
  atms_per_100k,
  branches_per_1000km2,
  atms_per_1000km2,
  accounts_per_1000,
};

inline constexpr std::size_t kFieldCount = 18;

inline constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "headcount",         "poverty_gap",   "poverty_gap_sq",       "watts",
    "gini",              "gdp_growth",    "fii",                  "outreach",
    "usage",             "account_all",   "account_male",         "account_female",
    "population",        "branches_per_100k", "atms_per_100k",   "branches_per_1000km2",
    "atms_per_1000km2",  "accounts_per_1000",
};

inline std::string_view field_name(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

inline std::optional<Field> parse_field(std::string_view name) {
  for (std::size_t i = 0; i < kFieldCount; ++i)
    if (kFieldNames[i] == name) return static_cast<Field>(i);
  return std::nullopt;
}

inline Field field_or_throw(std::string_view name) {
  auto f = parse_field(name);
  if (!f) fail(ErrorKind::UnknownField, std::string(name));
  return *f;
}

enum class FieldDomain { fraction, nonnegative, positive, real };

inline FieldDomain field_domain(Field f) {
  switch (f) {
    case Field::gdp_growth: return FieldDomain::real;
    case Field::population: return FieldDomain::positive;
    case Field::watts:
    case Field::branches_per_100k:
    case Field::atms_per_100k:
    case Field::branches_per_1000km2:
    case Field::atms_per_1000km2:
    case Field::accounts_per_1000: return FieldDomain::nonnegative;
    default: return FieldDomain::fraction;
  }
}

inline bool in_domain(Field f, double v) {
  switch (field_domain(f)) {
    case FieldDomain::fraction: return v >= 0.0 && v <= 1.0;
    case FieldDomain::nonnegative: return v >= 0.0;
    case FieldDomain::positive: return v > 0.0;
    case FieldDomain::real: return true;
  }
  return false;
}

inline constexpr int kMinYear = 1981;
inline constexpr int kMaxYear = 2030;

struct PanelRow {
  CountryKey country;
  int year = 0;
  std::array<std::optional<double>, kFieldCount> values{};
  std::optional<bool> gdp_is_forecast;

  std::optional<double>& operator[](Field f) { return values[static_cast<std::size_t>(f)]; }
  const std::optional<double>& operator[](Field f) const {
    return values[static_cast<std::size_t>(f)];
  }
  std::optional<double> get(std::string_view name) const { return (*this)[field_or_throw(name)]; }

  friend bool operator==(const PanelRow&, const PanelRow&) = default;
};

// Returns the offending column, or nothing when the row satisfies every
// range and ordering invariant.
inline std::optional<std::string> row_violation(const PanelRow& row) {
  if (row.year < kMinYear || row.year > kMaxYear) return "year";
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto& v = row.values[i];
    if (v && (!std::isfinite(*v) || !in_domain(static_cast<Field>(i), *v)))
      return std::string(kFieldNames[i]);
  }
  const auto& h = row[Field::headcount];
  const auto& g = row[Field::poverty_gap];
  const auto& s = row[Field::poverty_gap_sq];
  if (h && g && s && !(*h >= *g && *g >= *s)) return "poverty_gap";
  return std::nullopt;
}

struct Diagnostic {
  std::size_t line = 0;
  std::string column;
  ErrorKind kind = ErrorKind::BadNumeric;
  std::string message;
};

// Output of one load_csv call: validated rows plus whatever country metadata
// the file carried, and one diagnostic per rejected row.
struct PanelFragment {
  std::vector<PanelRow> rows;
  std::map<std::string, IncomeLevel> income_levels;
  std::map<std::string, std::string> names;
  std::vector<Diagnostic> diagnostics;

  void throw_if_rejected() const {
    if (diagnostics.empty()) return;
    const auto& d = diagnostics.front();
    fail(d.kind, "line " + std::to_string(d.line) + ", column " + d.column + ": " + d.message);
  }
};

class AnalysisPanel {
 public:
  AnalysisPanel() = default;

  // Sorts by (iso3, year), rejects duplicate keys and invalid rows, and
  // stamps each row's income level from `income_levels` where known.
  static AnalysisPanel from_rows(std::vector<PanelRow> rows,
                                 std::map<std::string, IncomeLevel> income_levels = {},
                                 std::map<std::string, std::string> names = {}) {
    for (auto& r : rows) {
      if (!valid_iso3(r.country.iso3)) fail(ErrorKind::InvalidCountryCode, r.country.iso3);
      auto it = income_levels.find(r.country.iso3);
      if (it != income_levels.end()) {
        if (r.country.income_level && *r.country.income_level != it->second)
          fail(ErrorKind::ConflictingValue, r.country.iso3 + ": income_level");
        r.country.income_level = it->second;
      } else if (r.country.income_level) {
        income_levels.emplace(r.country.iso3, *r.country.income_level);
      }
      if (auto bad = row_violation(r))
        fail(ErrorKind::RangeViolation,
             r.country.iso3 + " " + std::to_string(r.year) + ": " + *bad);
    }
    std::sort(rows.begin(), rows.end(), [](const PanelRow& a, const PanelRow& b) {
      return std::tie(a.country.iso3, a.year) < std::tie(b.country.iso3, b.year);
    });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].country.iso3 == rows[i - 1].country.iso3 && rows[i].year == rows[i - 1].year)
        fail(ErrorKind::DuplicateKey, rows[i].country.iso3 + " " + std::to_string(rows[i].year));
    AnalysisPanel p;
    p.rows_ = std::move(rows);
    p.income_levels_ = std::move(income_levels);
    p.names_ = std::move(names);
    return p;
  }

  const std::vector<PanelRow>& rows() const { return rows_; }
  const std::map<std::string, IncomeLevel>& income_levels() const { return income_levels_; }
  const std::map<std::string, std::string>& names() const { return names_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::string display_name(const std::string& iso3) const {
    auto it = names_.find(iso3);
    return it == names_.end() ? iso3 : it->second;
  }

  std::vector<std::string> countries() const {
    std::vector<std::string> out;
    for (const auto& r : rows_)
      if (out.empty() || out.back() != r.country.iso3) out.push_back(r.country.iso3);
    return out;
  }

  const PanelRow* find(std::string_view iso3, int year) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), std::pair{iso3, year},
                               [](const PanelRow& r, const std::pair<std::string_view, int>& k) {
                                 return std::tie(r.country.iso3, r.year) <
                                        std::tie(k.first, k.second);
                               });
    if (it == rows_.end() || it->country.iso3 != iso3 || it->year != year) return nullptr;
    return &*it;
  }

  PanelFragment to_fragment() const { return {rows_, income_levels_, names_, {}}; }

  friend bool operator==(const AnalysisPanel&, const AnalysisPanel&) = default;

 private:
  std::vector<PanelRow> rows_;
  std::map<std::string, IncomeLevel> income_levels_;
  std::map<std::string, std::string> names_;
};

// ---------------------------------------------------------------------------
// Loading

enum class Schema { fas, povcal, weo, findex, population, income_class, merged };

inline std::optional<Schema> parse_schema(std::string_view s) {
  static const std::map<std::string_view, Schema> kNames = {
      {"fas", Schema::fas},         {"povcal", Schema::povcal},
      {"weo", Schema::weo},         {"findex", Schema::findex},
      {"population", Schema::population}, {"income_class", Schema::income_class},
      {"merged", Schema::merged}};
  auto it = kNames.find(s);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

namespace detail {

struct SchemaLayout {
  std::vector<std::string_view> required_text;  // iso3, year, names, flags
  std::vector<Field> required_fields;
  std::vector<Field> optional_fields;
};

inline SchemaLayout layout_for(Schema schema) {
  using F = Field;
  switch (schema) {
    case Schema::fas:
      return {{"iso3", "country_name", "year"},
              {F::branches_per_100k, F::atms_per_100k, F::branches_per_1000km2,
               F::atms_per_1000km2, F::accounts_per_1000},
              {F::fii, F::outreach, F::usage}};
    case Schema::povcal:
      return {{"iso3", "year"},
              {F::headcount, F::poverty_gap, F::poverty_gap_sq, F::watts, F::gini},
              {}};
    case Schema::weo: return {{"iso3", "year", "is_forecast"}, {F::gdp_growth}, {}};
    case Schema::findex:
      return {{"iso3", "year"}, {F::account_all, F::account_male, F::account_female}, {}};
    case Schema::population: return {{"iso3", "year"}, {F::population}, {}};
    case Schema::income_class: return {{"iso3", "income_level"}, {}, {}};
    case Schema::merged: {
      SchemaLayout l{{"iso3", "country_name", "income_level", "year", "gdp_is_forecast"}, {}, {}};
      for (std::size_t i = 0; i < kFieldCount; ++i) l.required_fields.push_back(static_cast<Field>(i));
      return l;
    }
  }
  return {};
}

}  // namespace detail

// Parses one source file. Structural problems (missing columns) throw;
// row-level problems reject only that row and are recorded as diagnostics.
inline PanelFragment parse_csv(std::string_view text, Schema schema) {
  const auto table = csv::parse_table(text);
  const auto layout = detail::layout_for(schema);
  PanelFragment frag;

  auto require = [&](std::string_view name) {
    auto c = table.column(name);
    if (!c) fail(ErrorKind::MissingColumn, std::string(name));
    return *c;
  };
  std::map<std::string_view, std::size_t> text_cols;
  for (auto name : layout.required_text) text_cols[name] = require(name);
  std::vector<std::pair<Field, std::size_t>> field_cols;
  for (auto f : layout.required_fields) field_cols.emplace_back(f, require(field_name(f)));
  for (auto f : layout.optional_fields)
    if (auto c = table.column(field_name(f))) field_cols.emplace_back(f, *c);

  std::set<std::pair<std::string, int>> seen;
  std::set<std::string> seen_countries;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::size_t line = table.lines[r];
    auto cell = [&](std::size_t c) -> std::string_view {
      return c < cells.size() ? std::string_view(cells[c]) : std::string_view();
    };
    auto reject = [&](std::string_view column, ErrorKind kind, std::string msg) {
      frag.diagnostics.push_back({line, std::string(column), kind, std::move(msg)});
    };

    std::string iso3(cell(text_cols.at("iso3")));
    if (!valid_iso3(iso3)) {
      reject("iso3", ErrorKind::InvalidCountryCode, "'" + iso3 + "' is not a 3-letter upper-case code");
      continue;
    }

    if (schema == Schema::income_class) {
      auto level = parse_income_level(cell(text_cols.at("income_level")));
      if (!level) {
        reject("income_level", ErrorKind::UnknownIncomeLevel,
               "'" + std::string(cell(text_cols.at("income_level"))) + "'");
      } else if (!seen_countries.insert(iso3).second) {
        reject("iso3", ErrorKind::DuplicateKey, iso3);
      } else {
        frag.income_levels[iso3] = *level;
      }
      continue;
    }

    PanelRow row;
    row.country.iso3 = iso3;
    auto year = csv::parse_int(cell(text_cols.at("year")));
    if (!year) {
      reject("year", ErrorKind::BadNumeric, "'" + std::string(cell(text_cols.at("year"))) + "'");
      continue;
    }
    if (*year < kMinYear || *year > kMaxYear) {
      reject("year", ErrorKind::RangeViolation, std::to_string(*year));
      continue;
    }
    row.year = static_cast<int>(*year);

    bool ok = true;
    for (auto [f, c] : field_cols) {
      auto text_value = cell(c);
      if (csv::is_blank(text_value)) continue;
      auto v = csv::parse_double(text_value);
      if (!v) {
        reject(field_name(f), ErrorKind::BadNumeric, "'" + std::string(text_value) + "'");
        ok = false;
        break;
      }
      if (!in_domain(f, *v)) {
        reject(field_name(f), ErrorKind::RangeViolation, std::string(text_value));
        ok = false;
        break;
      }
      row[f] = *v;
    }
    if (!ok) continue;

    auto flag_col = text_cols.find(schema == Schema::merged ? "gdp_is_forecast" : "is_forecast");
    if (flag_col != text_cols.end()) {
      auto flag = cell(flag_col->second);
      if (flag == "1") {
        row.gdp_is_forecast = true;
      } else if (flag == "0") {
        row.gdp_is_forecast = false;
      } else if (!(schema == Schema::merged && csv::is_blank(flag))) {
        reject(flag_col->first, ErrorKind::BadNumeric, "'" + std::string(flag) + "' (expected 0 or 1)");
        continue;
      }
    }

    if (auto bad = row_violation(row)) {
      reject(*bad, ErrorKind::RangeViolation, "headcount >= poverty_gap >= poverty_gap_sq violated");
      continue;
    }
    if (schema == Schema::merged) {
      auto level_text = cell(text_cols.at("income_level"));
      if (!csv::is_blank(level_text)) {
        auto level = parse_income_level(level_text);
        if (!level) {
          reject("income_level", ErrorKind::UnknownIncomeLevel, std::string(level_text));
          continue;
        }
        row.country.income_level = *level;
      }
    }
    if (!seen.emplace(iso3, row.year).second) {
      reject("year", ErrorKind::DuplicateKey, iso3 + " " + std::to_string(row.year));
      continue;
    }
    if (row.country.income_level) frag.income_levels[iso3] = *row.country.income_level;
    if (auto n = text_cols.find("country_name"); n != text_cols.end()) {
      auto name = std::string(cell(n->second));
      if (!name.empty()) {
        auto [it, inserted] = frag.names.emplace(iso3, name);
        if (!inserted && name < it->second) it->second = name;
      }
    }
    frag.rows.push_back(std::move(row));
  }
  return frag;
}

inline PanelFragment load_csv(const std::string& path, Schema schema) {
  return parse_csv(csv::read_file(path), schema);
}

// ---------------------------------------------------------------------------
// Merge / filter

inline AnalysisPanel merge_panels(std::span<const PanelFragment> fragments) {
  std::map<std::pair<std::string, int>, PanelRow> merged;
  std::map<std::string, IncomeLevel> income;
  std::map<std::string, std::string> names;

  for (const auto& frag : fragments) {
    for (const auto& [iso3, level] : frag.income_levels) {
      auto [it, inserted] = income.emplace(iso3, level);
      if (!inserted && it->second != level)
        fail(ErrorKind::ConflictingValue, iso3 + ": income_level");
    }
    // Names are display metadata; the smallest spelling wins so that the
    // result does not depend on fragment order.
    for (const auto& [iso3, name] : frag.names) {
      auto [it, inserted] = names.emplace(iso3, name);
      if (!inserted && name < it->second) it->second = name;
    }
    for (const auto& row : frag.rows) {
      auto key = std::pair{row.country.iso3, row.year};
      auto [it, inserted] = merged.emplace(key, row);
      if (inserted) continue;
      PanelRow& dst = it->second;
      const std::string where = row.country.iso3 + " " + std::to_string(row.year) + ": ";
      for (std::size_t i = 0; i < kFieldCount; ++i) {
        const auto& src = row.values[i];
        if (!src) continue;
        if (dst.values[i] && *dst.values[i] != *src)
          fail(ErrorKind::ConflictingValue, where + std::string(kFieldNames[i]));
        dst.values[i] = src;
      }
      if (row.gdp_is_forecast) {
        if (dst.gdp_is_forecast && *dst.gdp_is_forecast != *row.gdp_is_forecast)
          fail(ErrorKind::ConflictingValue, where + "gdp_is_forecast");
        dst.gdp_is_forecast = row.gdp_is_forecast;
      }
      if (row.country.income_level) {
        if (dst.country.income_level && dst.country.income_level != row.country.income_level)
          fail(ErrorKind::ConflictingValue, where + "income_level");
        dst.country.income_level = row.country.income_level;
      }
    }
  }
  std::vector<PanelRow> rows;
  rows.reserve(merged.size());
  for (auto& [key, row] : merged) rows.push_back(std::move(row));
  return AnalysisPanel::from_rows(std::move(rows), std::move(income), std::move(names));
}

inline AnalysisPanel merge_panels(std::initializer_list<PanelFragment> fragments) {
  return merge_panels(std::span<const PanelFragment>(fragments.begin(), fragments.size()));
}

inline AnalysisPanel filter_income(const AnalysisPanel& panel, const std::set<IncomeLevel>& keep) {
  std::vector<PanelRow> rows;
  for (const auto& r : panel.rows()) {
    if (!r.country.income_level) fail(ErrorKind::UnknownIncomeLevel, r.country.iso3);
    if (keep.contains(*r.country.income_level)) rows.push_back(r);
  }
  return AnalysisPanel::from_rows(std::move(rows), panel.income_levels(), panel.names());
}

inline AnalysisPanel filter_years(const AnalysisPanel& panel, int first, int last) {
  std::vector<PanelRow> rows;
  for (const auto& r : panel.rows())
    if (r.year >= first && r.year <= last) rows.push_back(r);
  return AnalysisPanel::from_rows(std::move(rows), panel.income_levels(), panel.names());
}

// Keeps only rows where every listed field is present.
inline AnalysisPanel complete_cases(const AnalysisPanel& panel, std::span<const Field> fields) {
  std::vector<PanelRow> rows;
  for (const auto& r : panel.rows())
    if (std::all_of(fields.begin(), fields.end(), [&](Field f) { return r[f].has_value(); }))
      rows.push_back(r);
  return AnalysisPanel::from_rows(std::move(rows), panel.income_levels(), panel.names());
}

// ---------------------------------------------------------------------------
// Differencing

struct DiffRow {
  CountryKey country;
  int year = 0;  // the later of the two differenced years
  int gap_years = 0;
  std::map<Field, std::optional<double>> deltas;
  PanelRow levels;  // the later row, for regressors entering in levels

  // "d_<field>" resolves to a delta, a bare field name to the later level.
  std::optional<double> value(std::string_view name) const {
    if (name.starts_with("d_")) {
      auto it = deltas.find(field_or_throw(name.substr(2)));
      return it == deltas.end() ? std::nullopt : it->second;
    }
    return levels.get(name);
  }
};

inline std::vector<DiffRow> first_difference(const AnalysisPanel& panel, std::span<const Field> variables) {
  std::vector<DiffRow> out;
  const auto& rows = panel.rows();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& prev = rows[i - 1];
    const auto& cur = rows[i];
    if (prev.country.iso3 != cur.country.iso3) continue;
    DiffRow d;
    d.country = cur.country;
    d.year = cur.year;
    d.gap_years = cur.year - prev.year;
    for (auto f : variables) {
      const auto &a = prev[f], &b = cur[f];
      d.deltas[f] = (a && b) ? std::optional<double>(*b - *a) : std::nullopt;
    }
    d.levels = cur;
    out.push_back(std::move(d));
  }
  return out;
}

// Countries that contribute no difference rows, i.e. a single observation.
inline std::vector<std::string> undifferenceable_countries(const AnalysisPanel& panel) {
  std::map<std::string, int> counts;
  for (const auto& r : panel.rows()) ++counts[r.country.iso3];
  std::vector<std::string> out;
  for (const auto& [iso3, n] : counts)
    if (n < 2) out.push_back(iso3);
  return out;
}

// Fills absent cells from the most recent earlier survey wave. Wave years
// themselves are never written, which makes the operation idempotent.
inline AnalysisPanel forward_fill_waves(const AnalysisPanel& panel, std::span<const Field> fields,
                                        std::span<const int> wave_years) {
  if (!std::is_sorted(wave_years.begin(), wave_years.end()))
    fail(ErrorKind::InvalidArgument, "wave years must be sorted ascending");
  std::vector<PanelRow> rows = panel.rows();
  const std::set<int> waves(wave_years.begin(), wave_years.end());
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].country.iso3 == rows[begin].country.iso3) ++end;
    for (auto f : fields) {
      for (std::size_t i = begin; i < end; ++i) {
        auto& row = rows[i];
        auto after = waves.upper_bound(row.year);
        if (after == waves.begin() || row[f]) continue;
        int wave = *std::prev(after);
        if (wave == row.year) continue;
        if (const PanelRow* source = panel.find(row.country.iso3, wave)) row[f] = (*source)[f];
      }
    }
    begin = end;
  }
  return AnalysisPanel::from_rows(std::move(rows), panel.income_levels(), panel.names());
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
  std::string variable;
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> sd;  // undefined for a single observation
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

using SummaryTable = std::vector<SummaryRow>;

inline SummaryRow summarize_values(std::string name, std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::EmptyVariable, name);
  std::sort(values.begin(), values.end());
  SummaryRow s;
  s.variable = std::move(name);
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  s.min = values.front();
  s.max = values.back();
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2) ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

inline SummaryTable summarize(const AnalysisPanel& panel, std::span<const std::string> variables) {
  SummaryTable out;
  for (const auto& name : variables) {
    Field f = field_or_throw(name);
    std::vector<double> values;
    for (const auto& r : panel.rows())
      if (r[f]) values.push_back(*r[f]);
    out.push_back(summarize_values(name, std::move(values)));
  }
  return out;
}

inline SummaryTable summarize(std::span<const DiffRow> rows, std::span<const std::string> variables) {
  SummaryTable out;
  for (const auto& name : variables) {
    std::vector<double> values;
    for (const auto& r : rows)
      if (auto v = r.value(name)) values.push_back(*v);
    out.push_back(summarize_values(name, std::move(values)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical merged CSV

inline std::vector<std::string> merged_header() {
  std::vector<std::string> h = {"iso3", "country_name", "income_level", "year"};
  for (auto name : kFieldNames) h.emplace_back(name);
  h.emplace_back("gdp_is_forecast");
  return h;
}

inline std::string write_merged_csv(const AnalysisPanel& panel) {
  std::string out = csv::join(merged_header()) + "\n";
  for (const auto& r : panel.rows()) {
    std::vector<std::string> cells;
    cells.push_back(r.country.iso3);
    auto name = panel.names().find(r.country.iso3);
    cells.push_back(name == panel.names().end() ? "" : name->second);
    cells.emplace_back(r.country.income_level ? to_string(*r.country.income_level) : "");
    cells.push_back(std::to_string(r.year));
    for (const auto& v : r.values) cells.push_back(csv::format_exact(v));
    cells.emplace_back(r.gdp_is_forecast ? (*r.gdp_is_forecast ? "1" : "0") : "");
    out += csv::join(cells) + "\n";
  }
  return out;
}

inline AnalysisPanel read_merged_csv(std::string_view text) {
  auto frag = parse_csv(text, Schema::merged);
  frag.throw_if_rejected();
  return merge_panels({frag});
}

inline AnalysisPanel load_merged(const std::string& path) {
  return read_merged_csv(csv::read_file(path));
}

}  // namespace povkit
