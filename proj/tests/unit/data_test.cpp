#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "lehi/data.hpp"
#include "test_util.hpp"

using namespace lehi;

namespace {

CsvSchema regression_schema() {
  CsvSchema s;
  s.feature_columns = {0, 1};
  s.target_columns = {2};
  return s;
}

void put_be32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) b.push_back(static_cast<unsigned char>(v >> shift));
}

void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& b) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("csv regression parse") {
  const auto ds = parse_csv("a,b,y\n1,2,3\n 4 ,5.5, -6\n\n7,8,9\r\n", regression_schema());
  CHECK(ds.size() == 3);
  CHECK(ds.features == DenseMatrix::from_rows({{1, 4, 7}, {2, 5.5, 8}}));
  CHECK(ds.targets == DenseMatrix::from_rows({{3, -6, 9}}));
  CHECK(ds.task == Task::regression);
  CHECK(ds.fingerprint != 0);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("csv fingerprint tracks the bytes") {
  const auto a = parse_csv("1,2,3\n", [] { auto s = regression_schema(); s.header = false; return s; }());
  const auto b = parse_csv("1,2,4\n", [] { auto s = regression_schema(); s.header = false; return s; }());
  CHECK(a.fingerprint != b.fingerprint);
}

TEST_CASE("csv classification one-hot and delimiter") {
  CsvSchema s;
  s.feature_columns = {1};
  s.target_columns = {0};
  s.header = false;
  s.delimiter = ';';
  s.task = Task::classification;
  s.class_count = 3;
  const auto ds = parse_csv("2;0.5\n0;1.5\n", s);
  CHECK(ds.targets == DenseMatrix::from_rows({{0, 1}, {0, 0}, {1, 0}}));
  CHECK(ds.class_count == 3);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("csv errors carry row and column") {
  try {
    parse_csv("a,b,y\n1,2,3\n4,x,6\n", regression_schema());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == 2);
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
  try {
    parse_csv("a,b,y\n1,2,3\n4,5\n", regression_schema());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.row() == 3);
  }
  auto s = regression_schema();
  s.target_columns = {7};
  s.header = false;
  CHECK_THROWS_AS(parse_csv("1,2,3\n", s), DataError);
  s = regression_schema();
  s.task = Task::classification;
  s.class_count = 2;
  CHECK_THROWS_AS(parse_csv("h,h,h\n1,2,5\n", s), DataError);
  CHECK_THROWS_AS(parse_csv("1,2,3\n", CsvSchema{}), std::invalid_argument);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", regression_schema()), DataError);
}

TEST_CASE("csv loads from disk") {
  const auto dir = lehi::test::scratch_dir("csv");
  {
    std::ofstream f(dir / "d.csv");
    f << "x1,x2,y\n0,1,2\n3,4,5\n";
  }
  const auto ds = load_csv((dir / "d.csv").string(), regression_schema());
  CHECK(ds.size() == 2);
  CHECK(ds.fingerprint == parse_csv("x1,x2,y\n0,1,2\n3,4,5\n", regression_schema()).fingerprint);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
  const unsigned char a[] = {'a'};
  CHECK(fnv1a64(a) == 0xaf63dc4c8601ec8cULL);
  const unsigned char foobar[] = {'f', 'o', 'o', 'b', 'a', 'r'};
  CHECK(fnv1a64(foobar) == 0x85944171f73967e8ULL);
}

TEST_CASE("dataset validation") {
  Dataset ds;
  ds.features = DenseMatrix(2, 3);
  ds.targets = DenseMatrix(1, 2);
  CHECK_THROWS_AS(ds.validate(), ShapeError);
  ds.targets = DenseMatrix(2, 3);
  ds.task = Task::classification;
  ds.class_count = 2;
  CHECK_THROWS_AS(ds.validate(), std::invalid_argument);
}

TEST_CASE("split partitions every example once") {
  SeededRng rng(5);
  Dataset ds;
  ds.features = DenseMatrix(1, 10);
  ds.targets = DenseMatrix(1, 10);
  for (std::size_t j = 0; j < 10; ++j) ds.features(0, j) = static_cast<double>(j);
  const auto [tr, te] = split(ds, 0.8, rng);
  CHECK(tr.size() == 8);
  CHECK(te.size() == 2);
  std::set<double> seen;
  for (double x : tr.features.data()) seen.insert(x);
  for (double x : te.features.data()) seen.insert(x);
  CHECK(seen.size() == 10);

  const auto [tr2, te2] = split(ds, 0.8, SeededRng(5));
  CHECK(tr2.features == tr.features);
  const auto [tr3, te3] = split(ds, 0.8, SeededRng(6));
  CHECK_FALSE(tr3.features == tr.features);
  CHECK_THROWS_AS(split(ds, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(split(ds, 0.0, rng), std::invalid_argument);
}

TEST_CASE("synthetic regression is seeded and shaped") {
  const auto a = synthetic_regression(SeededRng(11), 500, 9, 0.1);
  const auto b = synthetic_regression(SeededRng(11), 500, 9, 0.1);
  const auto c = synthetic_regression(SeededRng(12), 500, 9, 0.1);
  CHECK(a.features.rows() == 9);
  CHECK(a.targets.rows() == 1);
  CHECK(a.size() == 500);
  CHECK(a.features == b.features);
  CHECK(a.targets == b.targets);
  CHECK(a.fingerprint == b.fingerprint);
  CHECK(a.fingerprint != c.fingerprint);
  double mean = 0.0;
  for (double x : a.features.data()) mean += x;
  mean /= static_cast<double>(a.features.size());
  CHECK(std::fabs(mean) < 0.05);
  CHECK_THROWS_AS(synthetic_regression(SeededRng(1), 0, 9, 0.1), std::invalid_argument);
}

TEST_CASE("standardizer uses training statistics") {
  const DenseMatrix train = DenseMatrix::from_rows({{1, 2, 3, 4}, {5, 5, 5, 5}});
  const auto s = Standardizer::fit(train);
  CHECK(s.mean[0] == 2.5);
  CHECK(s.stddev[0] == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.constant_rows == std::vector<std::size_t>{1});
  const auto z = s.apply(train);
  double m = 0.0, v = 0.0;
  for (double x : z.row(0)) m += x;
  for (double x : z.row(0)) v += x * x;
  CHECK(std::fabs(m) < 1e-15);
  CHECK(v / 4.0 == doctest::Approx(1.0));
  CHECK(z(1, 0) == 0.0);
  CHECK_THROWS_AS(s.apply(DenseMatrix(3, 1)), ShapeError);

  Dataset tr, te;
  tr.features = train;
  tr.targets = DenseMatrix::from_rows({{0, 2, 4, 6}});
  te.features = DenseMatrix::from_rows({{2.5}, {5}});
  te.targets = DenseMatrix::from_rows({{3}});
  standardize(tr, te);
  CHECK(te.features(0, 0) == 0.0);
  CHECK(te.targets(0, 0) == 0.0);
}

TEST_CASE("minibatches cover all examples and depend on epoch") {
  const SeededRng rng(9);
  const auto b0 = minibatches(10, 4, rng, 0);
  REQUIRE(b0.size() == 3);
  CHECK(b0[2].size() == 2);
  std::vector<std::size_t> all;
  for (const auto& b : b0) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(10);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(all == expect);
  CHECK(minibatches(10, 4, rng, 0) == b0);
  CHECK(minibatches(10, 4, rng, 1) != b0);
  CHECK(minibatches(10, 100, rng, 0).size() == 1);
  CHECK_THROWS_AS(minibatches(10, 0, rng, 0), std::invalid_argument);
}

TEST_CASE("idx round trip") {
  const auto dir = lehi::test::scratch_dir("idx");
  std::vector<unsigned char> img;
  put_be32(img, 0x803);
  put_be32(img, 3);
  put_be32(img, 2);
  put_be32(img, 2);
  for (unsigned char p : {0, 255, 51, 102, 1, 2, 3, 4, 255, 255, 0, 0}) img.push_back(p);
  std::vector<unsigned char> lab;
  put_be32(lab, 0x801);
  put_be32(lab, 3);
  for (unsigned char l : {7, 0, 9}) lab.push_back(l);
  write_bytes(dir / "img", img);
  write_bytes(dir / "lab", lab);

  const auto ds = load_idx_dataset((dir / "img").string(), (dir / "lab").string());
  CHECK(ds.features.rows() == 4);
  CHECK(ds.size() == 3);
  CHECK(ds.features(1, 0) == 1.0);
  CHECK(ds.features(2, 0) == doctest::Approx(0.2));
  CHECK(ds.targets(7, 0) == 1.0);
  CHECK(ds.targets(9, 2) == 1.0);
  CHECK_NOTHROW(ds.validate());

  CHECK_THROWS_AS(load_idx_dataset((dir / "img").string(), (dir / "lab").string(), 5), DataError);
  CHECK_THROWS_AS(load_idx_images((dir / "lab").string()), DataError);
  img.pop_back();
  write_bytes(dir / "short", img);
  CHECK_THROWS_AS(load_idx_images((dir / "short").string()), DataError);
}
