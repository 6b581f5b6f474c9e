#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mining/errors.hpp"

namespace mining {

enum class ColumnKind { Numeric, Categorical, Date, Text };

std::string kind_name(ColumnKind kind);
ColumnKind kind_from_name(const std::string& name);

// Calendar day as days since 1970-01-01 (proleptic Gregorian).
using DateValue = std::int32_t;

struct CivilDate {
  int year;
  int month;  // 1..12
  int day;    // 1..31
};

DateValue days_from_civil(const CivilDate& d);
CivilDate civil_from_days(DateValue days);
// 1 = Monday .. 7 = Sunday.
int weekday_from_days(DateValue days);
int day_of_year(const CivilDate& d);
// ISO-8601 week number (the ISO year may differ from the calendar year).
int iso_week_of_year(DateValue days);

// One typed column with an explicit missing mask. Only the vector matching
// `kind` is populated; missing[i] == true means values[i] is ignored.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> nums;
  std::vector<std::string> cats;
  std::vector<DateValue> dates;
  std::vector<std::vector<std::string>> texts;
  std::vector<bool> missing;

  std::size_t size() const { return missing.size(); }

  static Column numeric(std::string name, std::vector<double> values,
                        std::vector<bool> missing = {});
  static Column categorical(std::string name, std::vector<std::string> values,
                            std::vector<bool> missing = {});
  static Column date(std::string name, std::vector<DateValue> values,
                     std::vector<bool> missing = {});
  static Column text(std::string name, std::vector<std::vector<std::string>> values,
                     std::vector<bool> missing = {});
};

// Immutable-by-convention columnar table keyed by a string row id.
struct Frame {
  std::string name;
  std::string key;  // name of the id column (categorical, no missing), may be empty
  std::vector<Column> columns;
  std::size_t n_rows = 0;

  const Column* find(const std::string& column_name) const;
  const Column& at(const std::string& column_name) const;
  Column& at_mutable(const std::string& column_name);
  bool has(const std::string& column_name) const;
  void add(Column column);
  void drop(const std::string& column_name);
  std::vector<std::string> column_names() const;
  void check() const;  // enforces the structural invariants
};

enum class AggStat { Count, Sum, Mean, Min, Max, Std, Nunique, First, TextLenSum };

std::string agg_stat_name(AggStat stat);
AggStat agg_stat_from_name(const std::string& name);

struct AggItem {
  std::string source;
  AggStat stat;
  std::string output;
};

struct AggSpec {
  std::vector<AggItem> items;
};

Frame group_by_aggregate(const Frame& frame, const std::string& key, const AggSpec& spec);
Frame left_join(const Frame& left, const Frame& right, const std::string& key);

struct NumericSummary {
  std::size_t count = 0;
  std::size_t missing = 0;
  std::optional<double> mean, min, max, std_dev;
};

struct CategoricalSummary {
  std::size_t count = 0;
  std::size_t missing = 0;
  std::size_t distinct = 0;
  std::vector<std::pair<std::string, std::size_t>> top;  // most frequent first
};

struct ColumnSummary {
  std::string name;
  ColumnKind kind;
  std::optional<NumericSummary> numeric;
  std::optional<CategoricalSummary> categorical;
};

std::vector<ColumnSummary> summary_stats(const Frame& frame, std::size_t top_n = 5);

// Winsorize a numeric column to its nearest-rank [lo_q, hi_q] quantiles.
Frame clip_outliers(const Frame& frame, const std::string& column, double lo_q, double hi_q);

// Nearest-rank quantile of a sorted non-empty vector.
double nearest_rank_quantile(const std::vector<double>& sorted_values, double q);

}  // namespace mining
