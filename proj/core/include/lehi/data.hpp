#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lehi/numcore.hpp"
#include "lehi/rng.hpp"

namespace lehi {

enum class Task { regression, classification };

std::string_view to_string(Task t);

/// Examples stored column-wise: features d_x x N, targets d_y x N.
/// Classification targets are one-hot columns.
struct Dataset {
  DenseMatrix features;
  DenseMatrix targets;
  Task task = Task::regression;
  std::size_t class_count = 0;
  /// FNV-1a 64 of the source bytes (file contents, or the generated doubles).
  std::uint64_t fingerprint = 0;

  std::size_t size() const noexcept { return features.cols(); }
  /// Throws ShapeError/std::invalid_argument when the invariants fail.
  void validate() const;
  /// Columns `idx` in order.
  Dataset subset(std::span<const std::size_t> idx) const;
};

/// Error raised while parsing a data file, with a 1-based row and column
/// when they are known (0 otherwise).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct CsvSchema {
  std::vector<std::size_t> feature_columns;  // 0-based
  std::vector<std::size_t> target_columns;   // 0-based
  bool header = true;
  char delimiter = ',';
  Task task = Task::regression;
  /// Classification only: target column holds integer labels 0..class_count-1.
  std::size_t class_count = 0;
};

Dataset load_csv(const std::string& path, const CsvSchema& schema);
/// Parses CSV text already in memory; fingerprint covers `text`.
Dataset parse_csv(std::string_view text, const CsvSchema& schema);

/// IDX image file (magic 0x00000803) scaled to [0,1], one column per image.
DenseMatrix load_idx_images(const std::string& path);
/// IDX label file (magic 0x00000801).
std::vector<std::uint8_t> load_idx_labels(const std::string& path);
/// MNIST-style pair as a one-hot classification dataset.
Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         std::size_t class_count = 10);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;

/// Seeded permutation, then the first round(fraction * N) columns form the
/// training set. Throws std::invalid_argument unless fraction lies in (0, 1).
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, SeededRng rng);

/// x ~ N(0, I); y = sin(2 u^T x) + 0.25 (v^T x) + noise_std * N(0, 1), with
/// u, v ~ N(0, I/d_x) drawn once from the generator before the examples.
Dataset synthetic_regression(SeededRng rng, std::size_t n, std::size_t d_x, double noise_std);

/// Per-feature (row) mean and standard deviation of a training split.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;
  /// Rows whose stddev was zero; they are scaled by 1.
  std::vector<std::size_t> constant_rows;

  static Standardizer fit(const DenseMatrix& m);
  DenseMatrix apply(const DenseMatrix& m) const;
};

/// Standardizes features, and targets for regression, with training statistics.
void standardize(Dataset& train, Dataset& test);

/// Shuffled batches for one epoch. The permutation depends only on
/// (rng seed, epoch); the last batch may be short.
std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t batch_size,
                                                  const SeededRng& rng, std::uint64_t epoch);

}  // namespace lehi
