#pragma once

#include <map>
#include <string>
#include <vector>

#include "mining/frame.hpp"

namespace mining {

struct NullPatternGroups {
  // Column-name sets sharing an identical missing-row set; singletons omitted.
  std::vector<std::vector<std::string>> groups;
  // Index into `groups` of the no-missing-anywhere group, or -1.
  int complete_group = -1;
};

struct CorrGroup {
  std::vector<std::string> members;
  std::string representative;
  // Pairwise |r| values for member pairs that exceeded the threshold.
  std::vector<std::tuple<std::string, std::string, double>> edges;
};

struct FeatureReport {
  NullPatternGroups null_groups;
  std::vector<CorrGroup> corr_groups;
  std::vector<std::pair<std::string, std::string>> dropped;  // (column, reason)
  std::vector<std::string> kept;
};

// Adds numeric columns <col>_{year,month,day,weekday,day_of_year,
// week_of_year,quarter}; weekday 1=Monday..7=Sunday, ISO week numbers.
Frame decompose_dates(const Frame& frame, const std::string& column);

// by_count_only groups on the missing-row count instead of the exact
// missing-row set (looser reading; default is strict set equality).
NullPatternGroups null_pattern_groups(const Frame& frame, bool by_count_only = false);

// Pearson r over pairwise-complete rows; 0 when complete pairs < 3 or a
// side has zero variance; diagonal 1. Row-major columns.size() square.
std::vector<double> correlation_matrix(const Frame& frame,
                                       const std::vector<std::string>& columns);

// Connected components of the |r| > threshold graph. Representative is the
// member with the most distinct non-missing values, ties by name.
std::vector<CorrGroup> correlation_groups(const std::vector<double>& matrix,
                                          const std::vector<std::string>& columns,
                                          double threshold, const Frame& frame);

Frame cross_categories(const Frame& frame, const std::vector<std::string>& columns);

class CountEncoder {
 public:
  static CountEncoder fit(const Frame& frame, const std::string& column);
  // Adds numeric column count(<column>); unseen value -> 0, missing -> missing.
  Frame apply(const Frame& frame) const;
  const std::string& column() const { return column_; }
  const std::map<std::string, double>& counts() const { return counts_; }

 private:
  std::string column_;
  std::map<std::string, double> counts_;
};

struct GroupByItem {
  std::string key;    // categorical
  std::string value;  // numeric
  AggStat stat;       // mean/sum/min/max/std
};

class GroupByEncoder {
 public:
  static GroupByEncoder fit(const Frame& frame, const GroupByItem& item);
  // Adds agg(<stat>,<value>,by=<key>); unseen category -> missing.
  Frame apply(const Frame& frame) const;
  std::string output_name() const;
  const GroupByItem& item() const { return item_; }

 private:
  GroupByItem item_;
  std::map<std::string, double> values_;  // categories with a defined statistic
};

struct DerivationSpec {
  std::vector<std::vector<std::string>> cross;  // pairs and triples
  std::vector<GroupByItem> groupby;             // std allowed here
  std::vector<std::string> count_encode;
};

std::string cross_name(const std::vector<std::string>& columns);

}  // namespace mining
