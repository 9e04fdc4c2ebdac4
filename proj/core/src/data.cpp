#include "lehi/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lehi {

std::string_view to_string(Task t) {
  return t == Task::classification ? "classification" : "regression";
}

DataError::DataError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(what), row_(row), column_(column) {}

void Dataset::validate() const {
  if (features.cols() != targets.cols()) {
    throw ShapeError("Dataset: " + std::to_string(features.cols()) + " feature columns vs " +
                     std::to_string(targets.cols()) + " target columns");
  }
  if (task == Task::classification) {
    if (targets.rows() != class_count) {
      throw ShapeError("Dataset: one-hot targets need " + std::to_string(class_count) + " rows");
    }
    for (std::size_t c = 0; c < targets.cols(); ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < targets.rows(); ++r) {
        const double t = targets(r, c);
        if (t != 0.0 && t != 1.0) throw std::invalid_argument("Dataset: target is not one-hot");
        s += t;
      }
      if (s != 1.0) throw std::invalid_argument("Dataset: target is not one-hot");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.task = task;
  out.class_count = class_count;
  out.fingerprint = fingerprint;
  out.features = DenseMatrix(features.rows(), idx.size());
  out.targets = DenseMatrix(targets.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (std::size_t r = 0; r < features.rows(); ++r) out.features(r, j) = features(r, idx[j]);
    for (std::size_t r = 0; r < targets.rows(); ++r) out.targets(r, j) = targets(r, idx[j]);
  }
  return out;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h) noexcept {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t fingerprint_of(std::string_view text) {
  return fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

std::uint64_t fingerprint_of(const DenseMatrix& a, const DenseMatrix& b) {
  auto bytes = [](const DenseMatrix& m) {
    return std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(m.data().data()),
                                          m.size() * sizeof(double));
  };
  return fnv1a64(bytes(b), fnv1a64(bytes(a)));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvSchema& schema) {
  if (schema.feature_columns.empty()) throw std::invalid_argument("csv: no feature columns");
  if (schema.target_columns.empty()) throw std::invalid_argument("csv: no target columns");
  if (schema.task == Task::classification &&
      (schema.target_columns.size() != 1 || schema.class_count < 2)) {
    throw std::invalid_argument("csv: classification needs one label column and class_count >= 2");
  }

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (schema.header && line_no == 1) continue;

    std::vector<double> values;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t stop = line.find(schema.delimiter, start);
      std::string_view cell = trim(line.substr(start, stop == std::string_view::npos ? line.size() - start : stop - start));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError("csv: row " + std::to_string(line_no) + " column " + std::to_string(col + 1) +
                            ": cannot parse '" + std::string(cell) + "'",
                        line_no, col + 1);
      }
      values.push_back(v);
      ++col;
      if (stop == std::string_view::npos) break;
      start = stop + 1;
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      throw DataError("csv: row " + std::to_string(line_no) + " has " + std::to_string(values.size()) +
                          " fields, expected " + std::to_string(width),
                      line_no, 0);
    }
    rows.push_back(std::move(values));
  }

  for (std::size_t c : schema.feature_columns)
    if (c >= width && !rows.empty()) throw DataError("csv: feature column " + std::to_string(c) + " out of range");
  for (std::size_t c : schema.target_columns)
    if (c >= width && !rows.empty()) throw DataError("csv: target column " + std::to_string(c) + " out of range");

  const std::size_t n = rows.size();
  Dataset ds;
  ds.task = schema.task;
  ds.features = DenseMatrix(schema.feature_columns.size(), n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < schema.feature_columns.size(); ++r)
      ds.features(r, j) = rows[j][schema.feature_columns[r]];

  if (schema.task == Task::classification) {
    ds.class_count = schema.class_count;
    ds.targets = DenseMatrix(schema.class_count, n);
    for (std::size_t j = 0; j < n; ++j) {
      const double label = rows[j][schema.target_columns[0]];
      if (label < 0 || label != std::floor(label) || label >= static_cast<double>(schema.class_count)) {
        throw DataError("csv: row " + std::to_string(j + 1) + " has invalid class label", j + 1,
                        schema.target_columns[0] + 1);
      }
      ds.targets(static_cast<std::size_t>(label), j) = 1.0;
    }
  } else {
    ds.targets = DenseMatrix(schema.target_columns.size(), n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < schema.target_columns.size(); ++r)
        ds.targets(r, j) = rows[j][schema.target_columns[r]];
  }
  ds.fingerprint = fingerprint_of(text);
  return ds;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema);
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, SeededRng rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: fraction must lie in (0, 1)");
  }
  const std::vector<std::size_t> perm = rng.permutation(ds.size());
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
  std::span<const std::size_t> all(perm);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

Dataset synthetic_regression(SeededRng rng, std::size_t n, std::size_t d_x, double noise_std) {
  if (n == 0 || d_x == 0) throw std::invalid_argument("synthetic_regression: n and d_x must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_x));
  const DenseMatrix u = rng_normal(rng, d_x, 1, scale);
  const DenseMatrix v = rng_normal(rng, d_x, 1, scale);
  Dataset ds;
  ds.task = Task::regression;
  ds.features = rng_normal(rng, d_x, n, 1.0);
  ds.targets = DenseMatrix(1, n);
  for (std::size_t j = 0; j < n; ++j) {
    double ux = 0.0, vx = 0.0;
    for (std::size_t i = 0; i < d_x; ++i) {
      ux += u(i, 0) * ds.features(i, j);
      vx += v(i, 0) * ds.features(i, j);
    }
    double y = std::sin(2.0 * ux) + 0.25 * vx;
    if (noise_std > 0.0) y += noise_std * rng.normal();
    ds.targets(0, j) = y;
  }
  ds.fingerprint = fingerprint_of(ds.features, ds.targets);
  return ds;
}

Standardizer Standardizer::fit(const DenseMatrix& m) {
  Standardizer s;
  const auto n = static_cast<double>(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double mean = 0.0;
    for (double x : m.row(r)) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : m.row(r)) var += (x - mean) * (x - mean);
    double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      sd = 1.0;
      s.constant_rows.push_back(r);
    }
    s.mean.push_back(mean);
    s.stddev.push_back(sd);
  }
  return s;
}

DenseMatrix Standardizer::apply(const DenseMatrix& m) const {
  if (m.rows() != mean.size()) throw ShapeError("Standardizer: row count mismatch");
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = (m(r, c) - mean[r]) / stddev[r];
  return out;
}

void standardize(Dataset& train, Dataset& test) {
  const Standardizer fx = Standardizer::fit(train.features);
  train.features = fx.apply(train.features);
  test.features = fx.apply(test.features);
  if (train.task == Task::regression) {
    const Standardizer fy = Standardizer::fit(train.targets);
    train.targets = fy.apply(train.targets);
    test.targets = fy.apply(test.targets);
  }
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t batch_size,
                                                  const SeededRng& rng, std::uint64_t epoch) {
  if (batch_size == 0) throw std::invalid_argument("minibatches: batch size must be >= 1");
  SeededRng stream = rng.fork(epoch);
  const std::vector<std::size_t> perm = stream.permutation(n);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t stop = std::min(n, start + batch_size);
    out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                     perm.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

}  // namespace lehi
