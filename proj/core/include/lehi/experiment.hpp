#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lehi/harness.hpp"

namespace lehi {

struct DatasetConfig {
  std::string kind = "synthetic";  // synthetic | csv | idx

  // synthetic
  std::size_t n = 5000;
  std::size_t d_x = 9;
  double noise_std = 0.1;
  std::uint64_t seed = 1234;

  // synthetic and csv: seeded train/test split
  double train_fraction = 0.8;
  bool standardize = true;

  // csv
  std::string path;
  CsvSchema csv;

  // idx (MNIST layout); limits of 0 keep every example
  std::string train_images, train_labels, test_images, test_labels;
  std::size_t class_count = 10;
  std::size_t limit_train = 0;
  std::size_t limit_test = 0;
};

struct SelectionConfig {
  std::string metric = "eval_loss";
  std::size_t window = 0;  // 0: default_window(epochs)
  double c = 2.0;
  Direction direction = Direction::minimize_upper;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetConfig dataset;
  ModelSpec model;
  TrainOptions train;
  std::vector<OptimizerConfig> optimizers;
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  SelectionConfig selection;
  SpikeMode spike_mode = SpikeMode::per_epoch;
  double ema_alpha = 0.3;
  std::string output_dir = "lehi-out";
  /// Wall times vary between runs, so they are only written when asked for.
  bool record_timing = false;

  std::size_t window() const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// JSON config. Unknown keys are errors; the message names the key path.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Loads or generates the data and applies the split and standardization.
DataSplit load_data(const DatasetConfig& cfg);

// ---- run records -----------------------------------------------------------

/// One JSON object per line: a "run" header with the config snapshot, one
/// "epoch" line per epoch (absent values are null) and a closing "summary".
void write_run_jsonl(const RunRecord& rec, std::ostream& out, bool timing);
RunRecord read_run_jsonl(std::istream& in);
RunRecord read_run_jsonl(const std::filesystem::path& path);
/// epoch,train_loss,eval_loss,eval_accuracy,max_grad_inf,max_aux_grad_inf,spike_steps[,wall_seconds]
/// plus EMA-smoothed loss columns. Absent values are empty cells.
void write_run_csv(const RunRecord& rec, std::ostream& out, double ema_alpha, bool timing);

// ---- sweep -----------------------------------------------------------------

struct SweepCell {
  std::string optimizer;
  double lr = 0.0;
  SelectionScore score;
  StabilityVerdict stability;
  bool selected = false;
};

struct SweepReport {
  std::vector<SweepCell> cells;     // ordered by (optimizer, lr) as configured
  std::vector<RunRecord> records;   // ordered by (optimizer, lr, seed)
  /// Index into `cells` of the pick for each optimizer, in config order.
  std::vector<std::size_t> picks;
};

using SweepProgress = std::function<void(const RunRecord&, std::size_t done, std::size_t total)>;

/// Runs every (optimizer, lr, seed) combination on up to `threads` workers.
/// Output does not depend on the thread count. Ties between learning rates
/// go to the smaller one.
SweepReport run_sweep(const ExperimentConfig& cfg, const DataSplit& data, unsigned threads = 1,
                      const SweepProgress& progress = {});

/// Aggregates already-trained records (ordered by optimizer, lr, seed).
SweepReport summarize_sweep(const ExperimentConfig& cfg, std::vector<RunRecord> records);

void write_report_csv(const SweepReport& report, std::ostream& out);
void write_stability_csv(std::span<const StabilityVerdict> verdicts, std::ostream& out);

/// Writes report.csv, stability.csv and runs/<id>.{jsonl,csv} under `dir`.
void write_sweep_outputs(const SweepReport& report, const ExperimentConfig& cfg,
                         const std::filesystem::path& dir);

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "LEHI_OUTPUT_DIR";

/// Precedence: explicit flag, then LEHI_OUTPUT_DIR, then the config value.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::string>& flag);

/// "%.10g", or "nan"/"inf"/"-inf".
std::string format_number(double x);

}  // namespace lehi
