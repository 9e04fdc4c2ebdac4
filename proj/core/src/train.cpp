#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "lehi/harness.hpp"

namespace lehi {

std::string_view to_string(SpikeMode m) { return m == SpikeMode::per_step ? "per-step" : "per-epoch"; }

SpikeMode parse_spike_mode(std::string_view s) {
  if (s == "per-epoch") return SpikeMode::per_epoch;
  if (s == "per-step") return SpikeMode::per_step;
  throw std::invalid_argument("unknown spike mode '" + std::string(s) + "'");
}

std::string_view to_string(AuxScaling a) { return a == AuxScaling::sqrt_batch ? "sqrt" : "mean"; }

AuxScaling parse_aux_scaling(std::string_view s) {
  if (s == "mean") return AuxScaling::mean;
  if (s == "sqrt") return AuxScaling::sqrt_batch;
  throw std::invalid_argument("unknown aux scaling '" + std::string(s) + "'");
}

std::size_t RunRecord::spike_count(SpikeMode mode) const {
  std::size_t n = 0;
  for (const auto& e : epochs) {
    if (mode == SpikeMode::per_step) {
      n += e.spike_steps;
    } else if (e.spike_steps > 0) {
      ++n;
    }
  }
  return n;
}

double RunRecord::max_grad_seen() const {
  double m = 0.0;
  for (const auto& e : epochs)
    if (e.max_grad_inf && *e.max_grad_inf > m) m = *e.max_grad_inf;
  return m;
}

std::vector<std::optional<double>> RunRecord::series(std::string_view metric) const {
  std::optional<double> EpochMetrics::*field = nullptr;
  if (metric == "train_loss") field = &EpochMetrics::train_loss;
  else if (metric == "eval_loss") field = &EpochMetrics::eval_loss;
  else if (metric == "eval_accuracy") field = &EpochMetrics::eval_accuracy;
  else if (metric == "max_grad_inf") field = &EpochMetrics::max_grad_inf;
  else if (metric == "max_aux_grad_inf") field = &EpochMetrics::max_aux_grad_inf;
  else throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
  std::vector<std::optional<double>> out;
  out.reserve(epochs.size());
  for (const auto& e : epochs) out.push_back(e.*field);
  return out;
}

std::string RunRecord::id() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_lr%g_seed%llu", hp.alpha, static_cast<unsigned long long>(seed));
  return optimizer + buf;
}

namespace {

void gather(const Dataset& ds, std::span<const std::size_t> idx, DenseMatrix& x, DenseMatrix& y) {
  const std::size_t b = idx.size();
  if (x.rows() != ds.features.rows() || x.cols() != b) x = DenseMatrix(ds.features.rows(), b);
  if (y.rows() != ds.targets.rows() || y.cols() != b) y = DenseMatrix(ds.targets.rows(), b);
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t r = 0; r < x.rows(); ++r) x(r, j) = ds.features(r, idx[j]);
    for (std::size_t r = 0; r < y.rows(); ++r) y(r, j) = ds.targets(r, idx[j]);
  }
}

void check_compatible(LossKind loss, const Dataset& ds) {
  if (ds.task == Task::classification && loss == LossKind::mse) {
    throw std::invalid_argument("train: mse loss on a classification dataset");
  }
  if (ds.task == Task::regression && loss != LossKind::mse) {
    throw std::invalid_argument("train: " + std::string(to_string(loss)) + " loss needs a classification dataset");
  }
}

constexpr std::size_t kEvalChunk = 2048;

}  // namespace

EvalResult evaluate(const MlpModel& model, const Dataset& ds, LossKind loss) {
  const LossPair pair{loss, 1.0};
  const std::size_t n = ds.size();
  if (n == 0) throw std::invalid_argument("evaluate: empty dataset");
  double total = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  DenseMatrix x, y;
  for (std::size_t start = 0; start < n; start += kEvalChunk) {
    const std::size_t stop = std::min(n, start + kEvalChunk);
    idx.clear();
    for (std::size_t j = start; j < stop; ++j) idx.push_back(j);
    gather(ds, idx, x, y);
    const ForwardCache cache = forward(model, x);
    total += loss_value(pair, cache.outputs, y) * static_cast<double>(stop - start);
    if (ds.task == Task::classification) {
      const DenseMatrix& p = cache.outputs;
      for (std::size_t j = 0; j < p.cols(); ++j) {
        std::size_t best = 0, label = 0;
        for (std::size_t r = 0; r < p.rows(); ++r) {
          if (p(r, j) > p(best, j)) best = r;
          if (y(r, j) == 1.0) label = r;
        }
        // A single logit is a binary classifier: positive means class 1.
        if (p.rows() == 1) best = p(0, j) > 0.0 ? 1 : 0, label = y(0, j) == 1.0 ? 1 : 0;
        if (best == label) ++correct;
      }
    }
  }
  EvalResult r;
  r.loss = total / static_cast<double>(n);
  if (ds.task == Task::classification) r.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
  return r;
}

RunRecord train(const ModelSpec& spec, const DataSplit& data, const OptimizerConfig& opt,
                const TrainOptions& options, std::uint64_t seed, MlpModel* final_model) {
  opt.hp.validate();
  data.train.validate();
  data.test.validate();
  check_compatible(options.loss, data.train);
  if (options.batch_size == 0) throw std::invalid_argument("train: batch size must be >= 1");
  if (data.train.size() == 0 || data.test.size() == 0) throw std::invalid_argument("train: empty split");

  RunRecord rec;
  rec.optimizer = opt.name;
  rec.kind = opt.kind;
  rec.hp = opt.hp;
  rec.seed = seed;
  rec.dataset_fingerprint = data.train.fingerprint;
  rec.epochs_configured = options.epochs;
  rec.batch_size = options.batch_size;
  rec.loss = options.loss;
  rec.spike_threshold = options.spike_threshold;

  const SeededRng root(seed);
  SeededRng init_rng = root.fork(0);
  const SeededRng batch_rng = root.fork(1);

  std::vector<std::size_t> sizes{data.train.features.rows()};
  sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
  sizes.push_back(data.train.targets.rows());
  MlpModel model = MlpModel::initialize(sizes, init_rng, spec.hidden_activation);

  std::vector<DenseMatrix*> params = model.parameters();
  OptimizerState state = OptimizerState::zeros_like(opt.kind, std::as_const(model).parameters());
  state.lehibrid_aux_on_odd = opt.lehibrid_aux_on_odd;

  const LossPair pair{options.loss, 1.0};
  const bool dual = uses_aux_gradient(opt.kind);
  DenseMatrix x, y;
  std::int64_t step = 0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochMetrics em;
    double max_g = 0.0, max_aux = 0.0;
    bool any_step = false;

    for (const auto& batch : minibatches(data.train.size(), options.batch_size, batch_rng, epoch)) {
      ++step;
      gather(data.train, batch, x, y);
      const ForwardCache cache = forward(model, x);
      const DenseMatrix seed_p = primary_seed(pair, cache.outputs, y);
      GradientSet g, g_aux;
      if (dual) {
        DenseMatrix seed_a = aux_seed(pair, cache.outputs, y);
        if (options.aux_scaling == AuxScaling::sqrt_batch)
          seed_a = elementwise(ElementOp::scale, seed_a, std::sqrt(static_cast<double>(batch.size())));
        std::tie(g, g_aux) = dual_backward(model, cache, seed_p, seed_a);
      } else {
        g = backward_seeded(model, cache, seed_p);
      }

      const double gi = g.max_abs();
      const double ai = dual ? g_aux.max_abs() : 0.0;
      if (!cache.outputs.all_finite() || !std::isfinite(gi) || !std::isfinite(ai)) {
        rec.nan_event = true;
        rec.first_nan_step = step;
        break;
      }
      any_step = true;
      max_g = std::max(max_g, gi);
      max_aux = std::max(max_aux, ai);
      if (gi > options.spike_threshold) ++em.spike_steps;

      optimizer_step(state, opt.hp, params, g.tensors, g_aux.tensors);
    }

    if (!rec.nan_event) {
      const EvalResult tr = evaluate(model, data.train, options.loss);
      const EvalResult te = evaluate(model, data.test, options.loss);
      if (!std::isfinite(tr.loss) || !std::isfinite(te.loss)) {
        rec.nan_event = true;
        rec.first_nan_step = step;
      } else {
        em.train_loss = tr.loss;
        em.eval_loss = te.loss;
        em.eval_accuracy = te.accuracy;
      }
    }
    if (any_step) {
      em.max_grad_inf = max_g;
      if (dual) em.max_aux_grad_inf = max_aux;
    }
    em.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.epochs.push_back(em);

    if (rec.nan_event) {
      // Remaining epochs stay in the record as absent entries.
      rec.epochs.resize(options.epochs);
      break;
    }
  }

  if (final_model) *final_model = std::move(model);
  return rec;
}

}  // namespace lehi
