#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lehi/data.hpp"
#include "lehi/losses.hpp"
#include "lehi/network.hpp"
#include "lehi/optimizers.hpp"

namespace lehi {

struct ModelSpec {
  std::vector<std::size_t> hidden;  // hidden layer widths
  Activation hidden_activation = Activation::relu;
};

struct OptimizerConfig {
  std::string name;  // label used in reports, e.g. "lehi"
  OptimizerKind kind = OptimizerKind::adam;
  HyperParams hp;
  bool lehibrid_aux_on_odd = true;
};

/// How spikes are counted: epochs containing at least one spike, or steps.
enum class SpikeMode { per_epoch, per_step };

/// Scaling of the auxiliary gradient over a minibatch of size B.
///   mean:        g_aux = (1/B) sum_j J_j v_j, the batch mean like the primary gradient
///   sqrt_batch:  g_aux = (1/sqrt(B)) sum_j J_j v_j, i.e. the aux seed carries 1/sqrt(B)
///                of a summed loss
enum class AuxScaling { mean, sqrt_batch };

std::string_view to_string(SpikeMode m);
SpikeMode parse_spike_mode(std::string_view s);
std::string_view to_string(AuxScaling a);
AuxScaling parse_aux_scaling(std::string_view s);

struct TrainOptions {
  LossKind loss = LossKind::mse;
  std::size_t epochs = 1;
  std::size_t batch_size = 128;
  double spike_threshold = 10.0;
  AuxScaling aux_scaling = AuxScaling::mean;
};

struct DataSplit {
  Dataset train;
  Dataset test;
};

/// Metrics for one epoch. Absent values follow a NaN event.
struct EpochMetrics {
  std::optional<double> train_loss;
  std::optional<double> eval_loss;
  std::optional<double> eval_accuracy;  // classification only
  std::optional<double> max_grad_inf;   // max finite |g|_inf over the epoch's steps, pre-update
  std::optional<double> max_aux_grad_inf;
  std::size_t spike_steps = 0;
  double wall_seconds = 0.0;
};

struct RunRecord {
  std::string optimizer;  // OptimizerConfig::name
  OptimizerKind kind = OptimizerKind::adam;
  HyperParams hp;
  std::uint64_t seed = 0;
  std::uint64_t dataset_fingerprint = 0;
  std::size_t epochs_configured = 0;
  std::size_t batch_size = 0;
  LossKind loss = LossKind::mse;
  double spike_threshold = 10.0;

  std::vector<EpochMetrics> epochs;
  bool nan_event = false;
  std::optional<std::int64_t> first_nan_step;  // 1-based optimizer step

  std::size_t spike_count(SpikeMode mode) const;
  /// Largest finite gradient norm over the run (0 if none recorded).
  double max_grad_seen() const;
  /// Values of one metric over all epochs, absent entries included.
  std::vector<std::optional<double>> series(std::string_view metric) const;
  /// Stable identifier "<optimizer>_lr<alpha>_seed<seed>".
  std::string id() const;
};

/// Trains a fresh model initialized from `seed`. Deterministic in all inputs.
/// Stops at the first non-finite loss or gradient, marks that and every
/// remaining epoch absent and sets nan_event. If `final_model` is non-null
/// it receives the parameters at the end of the run.
RunRecord train(const ModelSpec& spec, const DataSplit& data, const OptimizerConfig& opt,
                const TrainOptions& options, std::uint64_t seed, MlpModel* final_model = nullptr);

/// Mean loss (and accuracy for classification) of `model` on `ds`.
struct EvalResult {
  double loss = 0.0;
  std::optional<double> accuracy;
};
EvalResult evaluate(const MlpModel& model, const Dataset& ds, LossKind loss);

// ---- selection -------------------------------------------------------------

enum class Direction { minimize_upper, maximize_lower };
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

struct SelectionScore {
  double mu = 0.0;     // mean over the window (averaged across records)
  double sigma = 0.0;  // sample standard deviation over the window
  double c = 2.0;
  Direction direction = Direction::minimize_upper;
  double score = 0.0;  // mu + c sigma or mu - c sigma; +/-inf for diverged runs
  std::size_t window = 0;
  std::size_t records = 0;
  std::size_t nan_records = 0;
};

/// mu + c sigma (minimize_upper) or mu - c sigma (maximize_lower).
double score_from_moments(double mu, double sigma, double c, Direction direction);

/// Worst possible score for a direction: +inf or -inf.
double worst_score(Direction direction);

/// Score over the last `window` non-absent epochs of `metric` for each
/// record, averaged across records. Records with a NaN event score as the
/// worst possible value. Throws std::invalid_argument if window < 2 or a
/// finite record has fewer than `window` values.
SelectionScore selection_score(std::span<const RunRecord> records, std::string_view metric,
                               std::size_t window, double c, Direction direction);

/// Window of about the last 10% of epochs: ceil(epochs / 10), at least 2.
std::size_t default_window(std::size_t epochs);

/// s_0 = x_0, s_t = alpha x_t + (1 - alpha) s_{t-1}; alpha in (0, 1].
std::vector<double> ema_smooth(std::span<const double> series, double alpha);

// ---- stability -------------------------------------------------------------

enum class Status { stable, noisy, failed };
std::string_view to_string(Status s);

struct StabilityVerdict {
  std::string optimizer;
  double lr = 0.0;
  double max_grad_seen = 0.0;
  double avg_spikes = 0.0;
  std::size_t nan_failures = 0;
  std::size_t runs = 0;
  Status status = Status::stable;
};

/// FAILED if any run hit NaN, otherwise NOISY if spikes were seen, otherwise STABLE.
Status classify_stability(double avg_spikes, std::size_t nan_failures);

/// Verdict for one (optimizer, lr) cell. In per-epoch mode spikes are
/// recounted from per-epoch maxima against `spike_threshold`; per-step mode
/// uses the counts recorded during training (threshold must match).
StabilityVerdict stability_verdict(std::span<const RunRecord> cell, double spike_threshold,
                                   SpikeMode mode);

/// Groups records by (optimizer, alpha) in first-appearance order.
std::vector<StabilityVerdict> stability_report(std::span<const RunRecord> records,
                                               double spike_threshold, SpikeMode mode);

}  // namespace lehi
