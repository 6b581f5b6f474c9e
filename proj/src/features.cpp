#include "mining/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace mining {

Frame decompose_dates(const Frame& frame, const std::string& column) {
  const Column& c = frame.at(column);
  if (c.kind != ColumnKind::Date) throw DataError("decompose_dates needs a date column: " + column);

  static const char* parts[] = {"year",        "month",        "day",    "weekday",
                                "day_of_year", "week_of_year", "quarter"};
  std::vector<std::vector<double>> out(7, std::vector<double>(frame.n_rows, 0.0));
  std::vector<bool> missing(c.missing.begin(), c.missing.end());
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (c.missing[i]) continue;
    CivilDate d = civil_from_days(c.dates[i]);
    out[0][i] = d.year;
    out[1][i] = d.month;
    out[2][i] = d.day;
    out[3][i] = weekday_from_days(c.dates[i]);
    out[4][i] = day_of_year(d);
    out[5][i] = iso_week_of_year(c.dates[i]);
    out[6][i] = (d.month + 2) / 3;
  }
  Frame result = frame;
  for (int p = 0; p < 7; ++p)
    result.add(Column::numeric(column + "_" + parts[p], std::move(out[p]), missing));
  return result;
}

NullPatternGroups null_pattern_groups(const Frame& frame, bool by_count_only) {
  // Key each column by its exact missing-row index set (or just the count).
  std::vector<std::pair<std::string, std::string>> keyed;  // (pattern key, column)
  for (const auto& c : frame.columns) {
    std::string key;
    std::size_t n_missing = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.missing[i]) {
        ++n_missing;
        if (!by_count_only) {
          key += std::to_string(i);
          key += ',';
        }
      }
    }
    if (by_count_only && n_missing > 0) key = std::to_string(n_missing);
    keyed.emplace_back(std::move(key), c.name);
  }
  std::map<std::string, std::vector<std::string>> by_pattern;
  for (auto& [key, name] : keyed) by_pattern[key].push_back(name);

  NullPatternGroups result;
  // The complete (no-missing) group is always reported, even as a singleton.
  auto complete = by_pattern.find("");
  if (complete != by_pattern.end()) {
    result.complete_group = 0;
    result.groups.push_back(complete->second);
    by_pattern.erase(complete);
  }
  for (auto& [key, names] : by_pattern) {
    if (names.size() < 2) continue;
    result.groups.push_back(names);
  }
  return result;
}

std::vector<double> correlation_matrix(const Frame& frame,
                                       const std::vector<std::string>& columns) {
  if (columns.size() < 2) throw DataError("correlation_matrix needs at least 2 columns");
  std::vector<const Column*> cols;
  for (const auto& name : columns) {
    const Column& c = frame.at(name);
    if (c.kind != ColumnKind::Numeric)
      throw DataError("correlation_matrix needs numeric columns, got " + name);
    cols.push_back(&c);
  }
  std::size_t k = cols.size();
  std::vector<double> matrix(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    matrix[a * k + a] = 1.0;
    for (std::size_t b = a + 1; b < k; ++b) {
      // Pairwise-complete two-pass Pearson.
      std::size_t n = 0;
      double sx = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < frame.n_rows; ++i) {
        if (cols[a]->missing[i] || cols[b]->missing[i]) continue;
        sx += cols[a]->nums[i];
        sy += cols[b]->nums[i];
        ++n;
      }
      double r = 0.0;
      if (n >= 3) {
        double mx = sx / static_cast<double>(n);
        double my = sy / static_cast<double>(n);
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < frame.n_rows; ++i) {
          if (cols[a]->missing[i] || cols[b]->missing[i]) continue;
          double dx = cols[a]->nums[i] - mx;
          double dy = cols[b]->nums[i] - my;
          sxx += dx * dx;
          syy += dy * dy;
          sxy += dx * dy;
        }
        if (sxx > 0.0 && syy > 0.0) {
          r = sxy / std::sqrt(sxx * syy);
          if (r > 1.0) r = 1.0;
          if (r < -1.0) r = -1.0;
        }
      }
      matrix[a * k + b] = r;
      matrix[b * k + a] = r;
    }
  }
  return matrix;
}

namespace {

std::size_t distinct_non_missing(const Column& c) {
  std::set<std::string> uniq;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.missing[i]) continue;
    switch (c.kind) {
      case ColumnKind::Numeric: {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", c.nums[i]);
        uniq.insert(buf);
        break;
      }
      case ColumnKind::Categorical: uniq.insert(c.cats[i]); break;
      case ColumnKind::Date: uniq.insert(std::to_string(c.dates[i])); break;
      case ColumnKind::Text: {
        std::string s;
        for (const auto& t : c.texts[i]) {
          s += t;
          s += '\x01';
        }
        uniq.insert(s);
        break;
      }
    }
  }
  return uniq.size();
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<CorrGroup> correlation_groups(const std::vector<double>& matrix,
                                          const std::vector<std::string>& columns,
                                          double threshold, const Frame& frame) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ConfigError("correlation threshold must be in (0, 1]");
  std::size_t k = columns.size();
  UnionFind uf(k);
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double r = matrix[a * k + b];
      // Strictly exceed, except at 1.0 where only exact duplicates (|r| == 1)
      // can qualify and strict comparison would make the threshold vacuous.
      bool linked = threshold == 1.0 ? std::fabs(r) == 1.0 : std::fabs(r) > threshold;
      if (linked) {
        uf.unite(a, b);
        edges.emplace_back(a, b, r);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < k; ++i) components[uf.find(i)].push_back(i);

  std::vector<CorrGroup> groups;
  for (auto& [root, members] : components) {
    if (members.size() < 2) continue;
    CorrGroup g;
    std::size_t best = members[0];
    std::size_t best_distinct = 0;
    for (std::size_t m : members) {
      g.members.push_back(columns[m]);
      std::size_t d = distinct_non_missing(frame.at(columns[m]));
      if (g.members.size() == 1 || d > best_distinct ||
          (d == best_distinct && columns[m] < columns[best])) {
        best = m;
        best_distinct = d;
      }
    }
    std::sort(g.members.begin(), g.members.end());
    g.representative = columns[best];
    for (auto& [a, b, r] : edges) {
      if (uf.find(a) == root) g.edges.emplace_back(columns[a], columns[b], r);
    }
    groups.push_back(std::move(g));
  }
  // Deterministic report order by first member name.
  std::sort(groups.begin(), groups.end(),
            [](const CorrGroup& a, const CorrGroup& b) { return a.members[0] < b.members[0]; });
  return groups;
}

std::string cross_name(const std::vector<std::string>& columns) {
  std::string name = "cross(";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) name += ',';
    name += columns[i];
  }
  name += ')';
  return name;
}

Frame cross_categories(const Frame& frame, const std::vector<std::string>& columns) {
  if (columns.size() != 2 && columns.size() != 3)
    throw DataError("cross_categories takes 2 or 3 columns");
  std::vector<const Column*> cols;
  for (const auto& name : columns) {
    const Column& c = frame.at(name);
    if (c.kind != ColumnKind::Categorical)
      throw DataError("cross_categories needs categorical columns, got " + name);
    cols.push_back(&c);
  }
  std::vector<std::string> values(frame.n_rows);
  std::vector<bool> missing(frame.n_rows, false);
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    bool any_missing = false;
    for (const Column* c : cols)
      if (c->missing[i]) any_missing = true;
    if (any_missing) {
      missing[i] = true;
      continue;
    }
    std::string v = cols[0]->cats[i];
    for (std::size_t j = 1; j < cols.size(); ++j) {
      v += '&';
      v += cols[j]->cats[i];
    }
    values[i] = std::move(v);
  }
  Frame out = frame;
  out.add(Column::categorical(cross_name(columns), std::move(values), std::move(missing)));
  return out;
}

CountEncoder CountEncoder::fit(const Frame& frame, const std::string& column) {
  const Column& c = frame.at(column);
  if (c.kind != ColumnKind::Categorical)
    throw DataError("count_encode needs a categorical column: " + column);
  CountEncoder enc;
  enc.column_ = column;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.missing[i]) continue;
    enc.counts_[c.cats[i]] += 1.0;
  }
  return enc;
}

Frame CountEncoder::apply(const Frame& frame) const {
  const Column& c = frame.at(column_);
  if (c.kind != ColumnKind::Categorical)
    throw DataError("count_encode needs a categorical column: " + column_);
  std::vector<double> values(frame.n_rows, 0.0);
  std::vector<bool> missing(c.missing.begin(), c.missing.end());
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (c.missing[i]) continue;
    auto it = counts_.find(c.cats[i]);
    values[i] = it == counts_.end() ? 0.0 : it->second;  // unseen -> 0
  }
  Frame out = frame;
  out.add(Column::numeric("count(" + column_ + ")", std::move(values), std::move(missing)));
  return out;
}

GroupByEncoder GroupByEncoder::fit(const Frame& frame, const GroupByItem& item) {
  const Column& key = frame.at(item.key);
  const Column& value = frame.at(item.value);
  if (key.kind != ColumnKind::Categorical)
    throw DataError("group-by key must be categorical: " + item.key);
  if (value.kind != ColumnKind::Numeric)
    throw DataError("group-by value must be numeric: " + item.value);
  if (item.stat != AggStat::Mean && item.stat != AggStat::Sum && item.stat != AggStat::Min &&
      item.stat != AggStat::Max && item.stat != AggStat::Std)
    throw DataError("unsupported group-by feature statistic: " + agg_stat_name(item.stat));

  std::map<std::string, std::vector<double>> grouped;
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (key.missing[i] || value.missing[i]) continue;
    grouped[key.cats[i]].push_back(value.nums[i]);
  }
  GroupByEncoder enc;
  enc.item_ = item;
  for (auto& [cat, vals] : grouped) {
    double out = 0.0;
    switch (item.stat) {
      case AggStat::Mean: {
        double s = std::accumulate(vals.begin(), vals.end(), 0.0);
        out = s / static_cast<double>(vals.size());
        break;
      }
      case AggStat::Sum: out = std::accumulate(vals.begin(), vals.end(), 0.0); break;
      case AggStat::Min: out = *std::min_element(vals.begin(), vals.end()); break;
      case AggStat::Max: out = *std::max_element(vals.begin(), vals.end()); break;
      case AggStat::Std: {
        if (vals.size() < 2) continue;  // undefined, left out of the map
        double mean = std::accumulate(vals.begin(), vals.end(), 0.0) /
                      static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        out = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        break;
      }
      default: break;
    }
    enc.values_[cat] = out;
  }
  return enc;
}

std::string GroupByEncoder::output_name() const {
  return "agg(" + agg_stat_name(item_.stat) + "," + item_.value + ",by=" + item_.key + ")";
}

Frame GroupByEncoder::apply(const Frame& frame) const {
  const Column& key = frame.at(item_.key);
  if (key.kind != ColumnKind::Categorical)
    throw DataError("group-by key must be categorical: " + item_.key);
  std::vector<double> values(frame.n_rows, 0.0);
  std::vector<bool> missing(frame.n_rows, true);
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (key.missing[i]) continue;
    auto it = values_.find(key.cats[i]);
    if (it == values_.end()) continue;  // unseen category stays missing
    values[i] = it->second;
    missing[i] = false;
  }
  Frame out = frame;
  out.add(Column::numeric(output_name(), std::move(values), std::move(missing)));
  return out;
}

}  // namespace mining
