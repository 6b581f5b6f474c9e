#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mining/frame.hpp"
#include "mining/rng.hpp"

using namespace mining;

namespace {

Frame calls_frame() {
  Frame f;
  f.key = "id";
  f.add(Column::categorical("id", {"d1", "d1", "d2"}));
  f.add(Column::numeric("dur", {3.0, 5.0, 1.0}));
  return f;
}

}  // namespace

TEST_CASE("calendar round trip and known anchors") {
  CHECK(days_from_civil({1970, 1, 1}) == 0);
  CHECK(days_from_civil({2020, 1, 1}) == 18262);
  for (DateValue d : {-1000, 0, 1, 18262, 60000}) {
    CivilDate c = civil_from_days(d);
    CHECK(days_from_civil(c) == d);
  }
  // 2020-01-01 was a Wednesday.
  CHECK(weekday_from_days(days_from_civil({2020, 1, 1})) == 3);
  CHECK(day_of_year({2020, 1, 1}) == 1);
  CHECK(day_of_year({2020, 12, 31}) == 366);  // leap year
  CHECK(iso_week_of_year(days_from_civil({2020, 1, 1})) == 1);
  // 2019-12-31 belongs to ISO week 1 of 2020.
  CHECK(iso_week_of_year(days_from_civil({2019, 12, 31})) == 1);
}

TEST_CASE("group_by_aggregate sums per key") {
  AggSpec spec{{{"dur", AggStat::Sum, "dur_sum"}}};
  Frame out = group_by_aggregate(calls_frame(), "id", spec);
  REQUIRE(out.n_rows == 2);
  CHECK(out.at("id").cats == std::vector<std::string>{"d1", "d2"});
  CHECK(out.at("dur_sum").nums[0] == 8.0);
  CHECK(out.at("dur_sum").nums[1] == 1.0);
}

TEST_CASE("group_by_aggregate excludes missing values") {
  Frame f;
  f.add(Column::categorical("id", {"d1", "d1"}));
  f.add(Column::numeric("x", {0.0, 4.0}, {true, false}));
  AggSpec spec{{{"x", AggStat::Mean, "m"}, {"x", AggStat::Count, "c"}}};
  Frame out = group_by_aggregate(f, "id", spec);
  REQUIRE(out.n_rows == 1);
  CHECK(out.at("m").nums[0] == 4.0);
  CHECK(out.at("c").nums[0] == 1.0);
}

TEST_CASE("group_by_aggregate all-missing group is missing except count") {
  Frame f;
  f.add(Column::categorical("id", {"d1", "d1"}));
  f.add(Column::numeric("x", {0.0, 0.0}, {true, true}));
  AggSpec spec{{{"x", AggStat::Sum, "s"}, {"x", AggStat::Count, "c"}}};
  Frame out = group_by_aggregate(f, "id", spec);
  CHECK(out.at("s").missing[0]);
  CHECK(out.at("c").nums[0] == 0.0);
}

TEST_CASE("text_len_sum adds token character lengths") {
  // Oracle by hand: "a" (1) + "bc" (2) = 3.
  Frame f;
  f.add(Column::categorical("id", {"d1"}));
  f.add(Column::text("urls", {{"a", "bc"}}));
  AggSpec spec{{{"urls", AggStat::TextLenSum, "len"}}};
  Frame out = group_by_aggregate(f, "id", spec);
  CHECK(out.at("len").nums[0] == 3.0);
}

TEST_CASE("group counts add up to the non-missing row count") {
  Rng rng(11);
  Frame f;
  std::vector<std::string> keys;
  std::vector<double> vals;
  std::vector<bool> miss;
  for (int i = 0; i < 200; ++i) {
    keys.push_back("k" + std::to_string(rng.below(7)));
    vals.push_back(rng.uniform());
    miss.push_back(rng.bernoulli(0.3));
  }
  std::size_t expected = 0;
  for (bool m : miss) expected += m ? 0 : 1;
  f.add(Column::categorical("id", std::move(keys)));
  f.add(Column::numeric("x", std::move(vals), std::move(miss)));
  Frame out = group_by_aggregate(f, "id", AggSpec{{{"x", AggStat::Count, "c"}}});
  double total = std::accumulate(out.at("c").nums.begin(), out.at("c").nums.end(), 0.0);
  CHECK(total == static_cast<double>(expected));
}

TEST_CASE("left_join keeps unmatched rows as missing") {
  Frame left;
  left.add(Column::categorical("id", {"d1", "d2"}));
  Frame right;
  right.add(Column::categorical("id", {"d1"}));
  right.add(Column::numeric("x", {7.0}));
  Frame out = left_join(left, right, "id");
  REQUIRE(out.n_rows == 2);
  CHECK(out.at("x").nums[0] == 7.0);
  CHECK(out.at("x").missing[1]);
}

TEST_CASE("left_join is many-to-one") {
  Frame left;
  left.add(Column::categorical("id", {"d1", "d1"}));
  Frame right;
  right.add(Column::categorical("id", {"d1"}));
  right.add(Column::numeric("x", {7.0}));
  Frame out = left_join(left, right, "id");
  CHECK(out.at("x").nums == std::vector<double>{7.0, 7.0});
}

TEST_CASE("left_join rejects duplicate right keys") {
  Frame left;
  left.add(Column::categorical("id", {"d1"}));
  Frame right;
  right.add(Column::categorical("id", {"d1", "d1"}));
  CHECK_THROWS_AS(left_join(left, right, "id"), DataError);
}

TEST_CASE("left_join row count equals left row count") {
  Frame left;
  left.add(Column::categorical("id", {"a", "b", "c", "a"}));
  Frame right;
  right.add(Column::categorical("id", {"b"}));
  right.add(Column::numeric("v", {1.0}));
  CHECK(left_join(left, right, "id").n_rows == left.n_rows);
}

TEST_CASE("summary_stats on a small numeric column") {
  Frame f;
  f.add(Column::numeric("x", {1.0, 2.0, 3.0}));
  auto stats = summary_stats(f);
  REQUIRE(stats.size() == 1);
  REQUIRE(stats[0].numeric);
  CHECK(*stats[0].numeric->mean == 2.0);
  CHECK(*stats[0].numeric->min == 1.0);
  CHECK(*stats[0].numeric->max == 3.0);
  CHECK(*stats[0].numeric->std_dev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("summary_stats reports all-missing columns as absent") {
  Frame f;
  f.add(Column::numeric("x", {0.0, 0.0}, {true, true}));
  auto stats = summary_stats(f);
  CHECK(stats[0].numeric->count == 0);
  CHECK(!stats[0].numeric->mean);
  CHECK(!stats[0].numeric->std_dev);
}

TEST_CASE("summary_stats categorical frequencies") {
  Frame f;
  f.add(Column::categorical("c", {"a", "a", "b"}));
  auto stats = summary_stats(f);
  REQUIRE(stats[0].categorical);
  CHECK(stats[0].categorical->distinct == 2);
  REQUIRE(!stats[0].categorical->top.empty());
  CHECK(stats[0].categorical->top[0] == std::pair<std::string, std::size_t>{"a", 2});
}

TEST_CASE("summary_stats mean and std match a two-pass reference") {
  Rng rng(5);
  std::vector<double> xs(500);
  for (double& x : xs) x = rng.normal() * 3.0 + 1.0;
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (xs.size() - 1));
  Frame f;
  f.add(Column::numeric("x", xs));
  auto stats = summary_stats(f);
  CHECK(*stats[0].numeric->mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(*stats[0].numeric->std_dev == doctest::Approx(sd).epsilon(1e-12));
}

TEST_CASE("clip_outliers uses nearest-rank quantiles") {
  std::vector<double> xs(100);
  for (int i = 0; i < 100; ++i) xs[i] = i + 1.0;
  Frame f;
  f.add(Column::numeric("x", xs));
  Frame out = clip_outliers(f, "x", 0.01, 0.99);
  // rank ceil(0.01*100)=1 -> 1, so the low end is untouched; the high cap is 99.
  CHECK(out.at("x").nums[0] == 1.0);
  CHECK(out.at("x").nums[99] == 99.0);
}

TEST_CASE("clip_outliers leaves constants and full range alone") {
  Frame f;
  f.add(Column::numeric("x", {4.0, 4.0, 4.0}));
  CHECK(clip_outliers(f, "x", 0.1, 0.9).at("x").nums == std::vector<double>{4.0, 4.0, 4.0});
  Frame g;
  g.add(Column::numeric("x", {1.0, 9.0, 5.0}));
  CHECK(clip_outliers(g, "x", 0.0, 1.0).at("x").nums == std::vector<double>{1.0, 9.0, 5.0});
}

TEST_CASE("frame invariants are enforced") {
  Frame f;
  f.add(Column::numeric("x", {1.0}));
  CHECK_THROWS_AS(f.add(Column::numeric("x", {2.0})), DataError);   // duplicate name
  CHECK_THROWS_AS(f.add(Column::numeric("y", {1.0, 2.0})), DataError);  // length mismatch
  CHECK_THROWS_AS(f.at("nope"), DataError);
}
