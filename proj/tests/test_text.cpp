#include <doctest.h>

#include <cmath>

#include "mining/text.hpp"

using namespace mining;

TEST_CASE("fnv1a32 matches published reference values") {
  CHECK(fnv1a32("") == 2166136261u);
  CHECK(fnv1a32("a") == 0xe40c292cu);
  CHECK(fnv1a32("foobar") == 0xbf9cf968u);
}

TEST_CASE("hashing_tf counts token occurrences") {
  SparseVector v = hashing_tf({"a", "a", "b"}, 1u << 20);
  REQUIRE(v.entries.size() == 2);
  double total = 0;
  bool saw_two = false;
  for (const auto& [idx, val] : v.entries) {
    total += val;
    if (val == 2.0) saw_two = true;
    CHECK(idx < (1u << 20));
  }
  CHECK(total == 3.0);
  CHECK(saw_two);
}

TEST_CASE("hashing_tf of no tokens is empty") {
  CHECK(hashing_tf({}, 16).entries.empty());
}

TEST_CASE("hashing_tf with one bucket collapses everything") {
  SparseVector v = hashing_tf({"x", "y", "z"}, 1);
  REQUIRE(v.entries.size() == 1);
  CHECK(v.entries[0].first == 0);
  CHECK(v.entries[0].second == 3.0);
}

TEST_CASE("hashing_tf mass equals token count for any dim") {
  std::vector<std::string> tokens{"app1", "app2", "app1", "maps", "mail", "app2", "app2"};
  for (std::uint32_t dim : {1u, 2u, 7u, 1024u}) {
    double total = 0;
    for (const auto& [idx, val] : hashing_tf(tokens, dim).entries) total += val;
    CHECK(total == 7.0);
  }
}

TEST_CASE("idf of a universally present term is zero and drops out") {
  std::vector<SparseVector> corpus{hashing_tf({"a"}, 64)};
  IdfModel model = idf_fit(corpus, 64);
  CHECK(idf_transform(model, corpus[0]).entries.empty());  // ln(2/2) = 0
}

TEST_CASE("idf weight follows the smoothed formula") {
  // N=3, df=1 -> ln(4/2) = ln 2.
  std::vector<SparseVector> corpus{hashing_tf({"rare"}, 64), hashing_tf({"x"}, 64),
                                   hashing_tf({"y"}, 64)};
  IdfModel model = idf_fit(corpus, 64);
  std::uint32_t bucket = fnv1a32("rare") % 64;
  CHECK(model.idf[bucket] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("idf transform of an empty vector is empty") {
  IdfModel model = idf_fit({hashing_tf({"a"}, 8)}, 8);
  SparseVector empty;
  empty.dim = 8;
  CHECK(idf_transform(model, empty).entries.empty());
}

TEST_CASE("idf weights do not increase with document frequency") {
  // Same N, growing df for one bucket.
  std::vector<SparseVector> low{hashing_tf({"t"}, 4), hashing_tf({}, 4), hashing_tf({}, 4)};
  std::vector<SparseVector> high{hashing_tf({"t"}, 4), hashing_tf({"t"}, 4), hashing_tf({"t"}, 4)};
  std::uint32_t bucket = fnv1a32("t") % 4;
  CHECK(idf_fit(low, 4).idf[bucket] >= idf_fit(high, 4).idf[bucket]);
}

TEST_CASE("assemble lays out numerics then sparse blocks") {
  Frame f;
  f.add(Column::numeric("a", {1.0, 2.0}));
  f.add(Column::numeric("b", {3.0, 0.0}, {false, true}));
  SparseBlock block;
  block.prefix = "tf";
  block.dim = 4;
  block.rows = {hashing_tf({"x"}, 4), hashing_tf({}, 4)};
  DesignMatrix m = assemble(f, {"a", "b"}, {block});
  REQUIRE(m.n_cols == 6);
  CHECK(m.names[0] == "a");
  CHECK(m.names[2] == "tf[0]");
  CHECK(m.names[5] == "tf[3]");
  CHECK(m.at(0, 0) == 1.0);
  CHECK(std::isnan(m.at(1, 1)));  // missing numeric
  std::uint32_t bucket = fnv1a32("x") % 4;
  CHECK(m.at(0, 2 + bucket) == 1.0);
  CHECK(m.at(1, 2 + bucket) == 0.0);  // absent sparse entries densify to zero
}

TEST_CASE("assemble with no blocks is just the numeric matrix") {
  Frame f;
  f.add(Column::numeric("a", {1.0, 2.0, 3.0}));
  DesignMatrix m = assemble(f, {"a"}, {});
  CHECK(m.n_cols == 1);
  CHECK(m.at(2, 0) == 3.0);
}

TEST_CASE("assemble keeps an all-missing column as all-missing") {
  Frame f;
  f.add(Column::numeric("a", {0.0, 0.0}, {true, true}));
  DesignMatrix m = assemble(f, {"a"}, {});
  CHECK(std::isnan(m.at(0, 0)));
  CHECK(std::isnan(m.at(1, 0)));
}

TEST_CASE("assemble rejects row-count mismatches") {
  Frame f;
  f.add(Column::numeric("a", {1.0, 2.0}));
  SparseBlock block;
  block.prefix = "tf";
  block.dim = 2;
  block.rows = {hashing_tf({"x"}, 2)};  // one row, frame has two
  CHECK_THROWS_AS(assemble(f, {"a"}, {block}), DataError);
}
