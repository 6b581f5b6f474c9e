#include "mining/frame.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace mining {

std::string kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Date: return "date";
    case ColumnKind::Text: return "text";
  }
  return "numeric";
}

ColumnKind kind_from_name(const std::string& name) {
  if (name == "numeric") return ColumnKind::Numeric;
  if (name == "categorical") return ColumnKind::Categorical;
  if (name == "date") return ColumnKind::Date;
  if (name == "text") return ColumnKind::Text;
  throw ConfigError("unknown column kind: " + name);
}

// Civil calendar math after the well-known days_from_civil algorithm.
DateValue days_from_civil(const CivilDate& d) {
  int y = d.year - (d.month <= 2 ? 1 : 0);
  int era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 +
                 static_cast<unsigned>(d.day) - 1;
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<DateValue>(era * 146097 + static_cast<int>(doe) - 719468);
}

CivilDate civil_from_days(DateValue days) {
  int z = days + 719468;
  int era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int y = static_cast<int>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{y + (m <= 2 ? 1 : 0), static_cast<int>(m), static_cast<int>(d)};
}

int weekday_from_days(DateValue days) {
  // 1970-01-01 was a Thursday.
  int w = static_cast<int>(((days % 7) + 7 + 3) % 7);  // 0 = Monday
  return w + 1;
}

int day_of_year(const CivilDate& d) {
  return days_from_civil(d) - days_from_civil(CivilDate{d.year, 1, 1}) + 1;
}

int iso_week_of_year(DateValue days) {
  // ISO week 1 is the week containing the first Thursday of the ISO year.
  CivilDate cd = civil_from_days(days);
  int wd = weekday_from_days(days);
  DateValue thursday = days + (4 - wd);
  int iso_year = civil_from_days(thursday).year;
  (void)cd;
  DateValue jan1 = days_from_civil(CivilDate{iso_year, 1, 1});
  int jan1_wd = weekday_from_days(jan1);
  DateValue first_thursday = jan1 + ((4 - jan1_wd + 7) % 7);
  return static_cast<int>((thursday - first_thursday) / 7) + 1;
}

Column Column::numeric(std::string name, std::vector<double> values, std::vector<bool> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  if (missing.empty()) missing.assign(values.size(), false);
  c.nums = std::move(values);
  c.missing = std::move(missing);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> values,
                           std::vector<bool> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  if (missing.empty()) missing.assign(values.size(), false);
  c.cats = std::move(values);
  c.missing = std::move(missing);
  return c;
}

Column Column::date(std::string name, std::vector<DateValue> values, std::vector<bool> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Date;
  if (missing.empty()) missing.assign(values.size(), false);
  c.dates = std::move(values);
  c.missing = std::move(missing);
  return c;
}

Column Column::text(std::string name, std::vector<std::vector<std::string>> values,
                    std::vector<bool> missing) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Text;
  if (missing.empty()) missing.assign(values.size(), false);
  c.texts = std::move(values);
  c.missing = std::move(missing);
  return c;
}

const Column* Frame::find(const std::string& column_name) const {
  for (const auto& c : columns)
    if (c.name == column_name) return &c;
  return nullptr;
}

const Column& Frame::at(const std::string& column_name) const {
  const Column* c = find(column_name);
  if (!c) throw DataError("unknown column: " + column_name);
  return *c;
}

Column& Frame::at_mutable(const std::string& column_name) {
  for (auto& c : columns)
    if (c.name == column_name) return c;
  throw DataError("unknown column: " + column_name);
}

bool Frame::has(const std::string& column_name) const { return find(column_name) != nullptr; }

void Frame::add(Column column) {
  if (has(column.name)) throw DataError("duplicate column name: " + column.name);
  if (!columns.empty() && column.size() != n_rows)
    throw DataError("column " + column.name + " length mismatch");
  if (columns.empty()) n_rows = column.size();
  columns.push_back(std::move(column));
}

void Frame::drop(const std::string& column_name) {
  auto it = std::find_if(columns.begin(), columns.end(),
                         [&](const Column& c) { return c.name == column_name; });
  if (it == columns.end()) throw DataError("unknown column: " + column_name);
  columns.erase(it);
}

std::vector<std::string> Frame::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

void Frame::check() const {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns) {
    if (c.size() != n_rows) throw DataError("column " + c.name + " length mismatch");
    if (!seen.insert(c.name).second) throw DataError("duplicate column name: " + c.name);
  }
  if (!key.empty()) {
    const Column& k = at(key);
    for (std::size_t i = 0; i < n_rows; ++i)
      if (k.missing[i]) throw DataError("key column " + key + " has a missing entry");
  }
}

std::string agg_stat_name(AggStat stat) {
  switch (stat) {
    case AggStat::Count: return "count";
    case AggStat::Sum: return "sum";
    case AggStat::Mean: return "mean";
    case AggStat::Min: return "min";
    case AggStat::Max: return "max";
    case AggStat::Std: return "std";
    case AggStat::Nunique: return "nunique";
    case AggStat::First: return "first";
    case AggStat::TextLenSum: return "text_len_sum";
  }
  return "count";
}

AggStat agg_stat_from_name(const std::string& name) {
  if (name == "count") return AggStat::Count;
  if (name == "sum") return AggStat::Sum;
  if (name == "mean") return AggStat::Mean;
  if (name == "min") return AggStat::Min;
  if (name == "max") return AggStat::Max;
  if (name == "std") return AggStat::Std;
  if (name == "nunique") return AggStat::Nunique;
  if (name == "first") return AggStat::First;
  if (name == "text_len_sum") return AggStat::TextLenSum;
  throw ConfigError("unknown aggregate statistic: " + name);
}

namespace {

bool stat_compatible(AggStat stat, ColumnKind kind) {
  switch (stat) {
    case AggStat::Count:
    case AggStat::Nunique:
      return true;
    case AggStat::Sum:
    case AggStat::Mean:
    case AggStat::Min:
    case AggStat::Max:
    case AggStat::Std:
      return kind == ColumnKind::Numeric;
    case AggStat::First:
      return kind == ColumnKind::Numeric || kind == ColumnKind::Categorical;
    case AggStat::TextLenSum:
      return kind == ColumnKind::Text;
  }
  return false;
}

std::string cell_repr(const Column& c, std::size_t row) {
  switch (c.kind) {
    case ColumnKind::Numeric: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", c.nums[row]);
      return buf;
    }
    case ColumnKind::Categorical: return c.cats[row];
    case ColumnKind::Date: return std::to_string(c.dates[row]);
    case ColumnKind::Text: {
      std::string s;
      for (const auto& t : c.texts[row]) {
        s += t;
        s += '\x01';
      }
      return s;
    }
  }
  return {};
}

}  // namespace

Frame group_by_aggregate(const Frame& frame, const std::string& key, const AggSpec& spec) {
  const Column& key_col = frame.at(key);
  if (key_col.kind != ColumnKind::Categorical)
    throw DataError("group-by key must be categorical: " + key);
  std::unordered_set<std::string> out_names{key};
  for (const auto& item : spec.items) {
    const Column& src = frame.at(item.source);
    if (!stat_compatible(item.stat, src.kind))
      throw DataError("statistic " + agg_stat_name(item.stat) + " incompatible with column " +
                      item.source + " of kind " + kind_name(src.kind));
    if (!out_names.insert(item.output).second)
      throw DataError("duplicate aggregate output name: " + item.output);
  }

  // Output rows follow first appearance of each key value.
  std::vector<std::string> group_keys;
  std::vector<std::vector<std::size_t>> group_rows;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (key_col.missing[i]) throw DataError("missing value in group-by key " + key);
    auto [it, inserted] = index.emplace(key_col.cats[i], group_keys.size());
    if (inserted) {
      group_keys.push_back(key_col.cats[i]);
      group_rows.emplace_back();
    }
    group_rows[it->second].push_back(i);
  }

  Frame out;
  out.name = frame.name + ".agg";
  out.key = key;
  out.add(Column::categorical(key, group_keys));

  for (const auto& item : spec.items) {
    const Column& src = frame.at(item.source);
    std::size_t n_groups = group_keys.size();
    std::vector<double> values(n_groups, 0.0);
    std::vector<bool> missing(n_groups, false);
    std::vector<std::string> cat_values;
    bool cat_output = item.stat == AggStat::First && src.kind == ColumnKind::Categorical;
    if (cat_output) cat_values.assign(n_groups, "");

    for (std::size_t gi = 0; gi < n_groups; ++gi) {
      std::size_t present = 0;
      double sum = 0.0, mn = 0.0, mx = 0.0;
      double text_len = 0.0;
      std::vector<double> vals;
      std::set<std::string> uniq;
      bool have_first = false;
      for (std::size_t row : group_rows[gi]) {
        if (src.missing[row]) continue;
        ++present;
        switch (src.kind) {
          case ColumnKind::Numeric: {
            double v = src.nums[row];
            sum += v;
            if (present == 1 || v < mn) mn = v;
            if (present == 1 || v > mx) mx = v;
            if (item.stat == AggStat::Std) vals.push_back(v);
            if (!have_first) {
              if (item.stat == AggStat::First) values[gi] = v;
              have_first = true;
            }
            if (item.stat == AggStat::Nunique) uniq.insert(cell_repr(src, row));
            break;
          }
          case ColumnKind::Text: {
            for (const auto& token : src.texts[row]) text_len += static_cast<double>(token.size());
            if (item.stat == AggStat::Nunique) uniq.insert(cell_repr(src, row));
            break;
          }
          default: {
            if (cat_output && !have_first) {
              cat_values[gi] = src.cats[row];
              have_first = true;
            }
            if (item.stat == AggStat::Nunique) uniq.insert(cell_repr(src, row));
            break;
          }
        }
      }
      switch (item.stat) {
        case AggStat::Count: values[gi] = static_cast<double>(present); break;
        case AggStat::Nunique: values[gi] = static_cast<double>(uniq.size()); break;
        case AggStat::Sum:
          if (present == 0) missing[gi] = true;
          else values[gi] = sum;
          break;
        case AggStat::Mean:
          if (present == 0) missing[gi] = true;
          else values[gi] = sum / static_cast<double>(present);
          break;
        case AggStat::Min:
          if (present == 0) missing[gi] = true;
          else values[gi] = mn;
          break;
        case AggStat::Max:
          if (present == 0) missing[gi] = true;
          else values[gi] = mx;
          break;
        case AggStat::Std:
          if (vals.size() < 2) {
            missing[gi] = true;
          } else {
            double mean = sum / static_cast<double>(vals.size());
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            values[gi] = std::sqrt(ss / static_cast<double>(vals.size() - 1));
          }
          break;
        case AggStat::First:
          if (present == 0) missing[gi] = true;
          break;
        case AggStat::TextLenSum:
          if (present == 0) missing[gi] = true;
          else values[gi] = text_len;
          break;
      }
    }
    if (cat_output)
      out.add(Column::categorical(item.output, std::move(cat_values), std::move(missing)));
    else
      out.add(Column::numeric(item.output, std::move(values), std::move(missing)));
  }
  out.check();
  return out;
}

Frame left_join(const Frame& left, const Frame& right, const std::string& key) {
  const Column& lkey = left.at(key);
  const Column& rkey = right.at(key);
  if (lkey.kind != ColumnKind::Categorical || rkey.kind != ColumnKind::Categorical)
    throw DataError("join key must be categorical: " + key);

  std::unordered_map<std::string, std::size_t> right_index;
  right_index.reserve(right.n_rows);
  for (std::size_t i = 0; i < right.n_rows; ++i) {
    if (!right_index.emplace(rkey.cats[i], i).second)
      throw DataError("duplicate key on right side of join: " + rkey.cats[i]);
  }

  Frame out = left;
  out.name = left.name + ".join";
  for (const auto& rc : right.columns) {
    if (rc.name == key) continue;
    Column c;
    c.name = rc.name;
    c.kind = rc.kind;
    c.missing.assign(left.n_rows, true);
    switch (rc.kind) {
      case ColumnKind::Numeric: c.nums.assign(left.n_rows, 0.0); break;
      case ColumnKind::Categorical: c.cats.assign(left.n_rows, ""); break;
      case ColumnKind::Date: c.dates.assign(left.n_rows, 0); break;
      case ColumnKind::Text: c.texts.assign(left.n_rows, {}); break;
    }
    for (std::size_t i = 0; i < left.n_rows; ++i) {
      auto it = right_index.find(lkey.cats[i]);
      if (it == right_index.end()) continue;
      std::size_t j = it->second;
      if (rc.missing[j]) continue;
      c.missing[i] = false;
      switch (rc.kind) {
        case ColumnKind::Numeric: c.nums[i] = rc.nums[j]; break;
        case ColumnKind::Categorical: c.cats[i] = rc.cats[j]; break;
        case ColumnKind::Date: c.dates[i] = rc.dates[j]; break;
        case ColumnKind::Text: c.texts[i] = rc.texts[j]; break;
      }
    }
    out.add(std::move(c));
  }
  out.check();
  return out;
}

std::vector<ColumnSummary> summary_stats(const Frame& frame, std::size_t top_n) {
  std::vector<ColumnSummary> report;
  for (const auto& c : frame.columns) {
    ColumnSummary s;
    s.name = c.name;
    s.kind = c.kind;
    if (c.kind == ColumnKind::Numeric) {
      NumericSummary num;
      double sum = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.missing[i]) {
          ++num.missing;
          continue;
        }
        double v = c.nums[i];
        if (num.count == 0) {
          num.min = v;
          num.max = v;
        } else {
          num.min = std::min(*num.min, v);
          num.max = std::max(*num.max, v);
        }
        sum += v;
        ++num.count;
      }
      if (num.count > 0) {
        double mean = sum / static_cast<double>(num.count);
        num.mean = mean;
        if (num.count >= 2) {
          double ss = 0.0;
          for (std::size_t i = 0; i < c.size(); ++i) {
            if (c.missing[i]) continue;
            double d = c.nums[i] - mean;
            ss += d * d;
          }
          num.std_dev = std::sqrt(ss / static_cast<double>(num.count - 1));
        }
      }
      s.numeric = num;
    } else if (c.kind == ColumnKind::Categorical) {
      CategoricalSummary cat;
      std::map<std::string, std::size_t> freq;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.missing[i]) {
          ++cat.missing;
          continue;
        }
        ++freq[c.cats[i]];
        ++cat.count;
      }
      cat.distinct = freq.size();
      std::vector<std::pair<std::string, std::size_t>> pairs(freq.begin(), freq.end());
      std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      if (pairs.size() > top_n) pairs.resize(top_n);
      cat.top = std::move(pairs);
      s.categorical = cat;
    } else {
      NumericSummary num;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.missing[i]) ++num.missing;
        else ++num.count;
      }
      s.numeric = num;
    }
    report.push_back(std::move(s));
  }
  return report;
}

double nearest_rank_quantile(const std::vector<double>& sorted_values, double q) {
  if (sorted_values.empty()) throw NumericError("quantile of empty sample");
  std::size_t n = sorted_values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted_values[rank - 1];
}

Frame clip_outliers(const Frame& frame, const std::string& column, double lo_q, double hi_q) {
  const Column& c = frame.at(column);
  if (c.kind != ColumnKind::Numeric) throw DataError("clip_outliers needs a numeric column");
  if (!(lo_q < hi_q) || lo_q < 0.0 || hi_q > 1.0)
    throw ConfigError("invalid quantile range for clip_outliers");
  std::vector<double> present;
  present.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.missing[i]) present.push_back(c.nums[i]);
  Frame out = frame;
  if (present.empty()) return out;
  std::sort(present.begin(), present.end());
  double lo = nearest_rank_quantile(present, lo_q);
  double hi = nearest_rank_quantile(present, hi_q);
  Column& oc = out.at_mutable(column);
  for (std::size_t i = 0; i < oc.size(); ++i) {
    if (oc.missing[i]) continue;
    if (oc.nums[i] < lo) oc.nums[i] = lo;
    if (oc.nums[i] > hi) oc.nums[i] = hi;
  }
  return out;
}

}  // namespace mining
