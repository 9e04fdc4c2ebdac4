#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "lehi/experiment.hpp"

namespace lehi {

using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> opt_from(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

void write_run_jsonl(const RunRecord& r, std::ostream& out, bool timing) {
  ordered_json head;
  head["type"] = "run";
  head["id"] = r.id();
  head["optimizer"] = r.optimizer;
  head["kind"] = to_string(r.kind);
  head["alpha"] = r.hp.alpha;
  head["beta1"] = r.hp.beta1;
  head["beta2"] = r.hp.beta2;
  head["eps"] = r.hp.eps;
  head["weight_decay"] = r.hp.weight_decay;
  head["seed"] = r.seed;
  head["dataset_fingerprint"] = r.dataset_fingerprint;
  head["epochs"] = r.epochs_configured;
  head["batch_size"] = r.batch_size;
  head["loss"] = to_string(r.loss);
  head["spike_threshold"] = r.spike_threshold;
  out << head.dump() << '\n';

  for (std::size_t i = 0; i < r.epochs.size(); ++i) {
    const EpochMetrics& e = r.epochs[i];
    ordered_json line;
    line["type"] = "epoch";
    line["epoch"] = i + 1;
    line["train_loss"] = opt(e.train_loss);
    line["eval_loss"] = opt(e.eval_loss);
    line["eval_accuracy"] = opt(e.eval_accuracy);
    line["max_grad_inf"] = opt(e.max_grad_inf);
    line["max_aux_grad_inf"] = opt(e.max_aux_grad_inf);
    line["spike_steps"] = e.spike_steps;
    if (timing) line["wall_seconds"] = e.wall_seconds;
    out << line.dump() << '\n';
  }

  ordered_json tail;
  tail["type"] = "summary";
  tail["nan_event"] = r.nan_event;
  tail["first_nan_step"] = r.first_nan_step ? ordered_json(*r.first_nan_step) : ordered_json(nullptr);
  tail["spike_epochs"] = r.spike_count(SpikeMode::per_epoch);
  tail["spike_steps"] = r.spike_count(SpikeMode::per_step);
  tail["max_grad_seen"] = r.max_grad_seen();
  out << tail.dump() << '\n';
}

RunRecord read_run_jsonl(std::istream& in) {
  RunRecord r;
  std::string line;
  std::size_t line_no = 0;
  bool have_head = false, have_tail = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "run") {
        r.optimizer = j.at("optimizer").get<std::string>();
        r.kind = parse_optimizer_kind(j.at("kind").get<std::string>());
        r.hp.alpha = j.at("alpha").get<double>();
        r.hp.beta1 = j.at("beta1").get<double>();
        r.hp.beta2 = j.at("beta2").get<double>();
        r.hp.eps = j.at("eps").get<double>();
        r.hp.weight_decay = j.at("weight_decay").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.dataset_fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
        r.epochs_configured = j.at("epochs").get<std::size_t>();
        r.batch_size = j.at("batch_size").get<std::size_t>();
        r.loss = parse_loss_kind(j.at("loss").get<std::string>());
        r.spike_threshold = j.at("spike_threshold").get<double>();
        have_head = true;
      } else if (type == "epoch") {
        EpochMetrics e;
        e.train_loss = opt_from(j, "train_loss");
        e.eval_loss = opt_from(j, "eval_loss");
        e.eval_accuracy = opt_from(j, "eval_accuracy");
        e.max_grad_inf = opt_from(j, "max_grad_inf");
        e.max_aux_grad_inf = opt_from(j, "max_aux_grad_inf");
        e.spike_steps = j.at("spike_steps").get<std::size_t>();
        if (j.contains("wall_seconds")) e.wall_seconds = j.at("wall_seconds").get<double>();
        r.epochs.push_back(e);
      } else if (type == "summary") {
        r.nan_event = j.at("nan_event").get<bool>();
        if (!j.at("first_nan_step").is_null()) r.first_nan_step = j.at("first_nan_step").get<std::int64_t>();
        have_tail = true;
      } else {
        throw std::invalid_argument("unknown record type '" + type + "'");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("run record line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_head || !have_tail) throw std::invalid_argument("run record: missing run or summary line");
  if (r.epochs.size() > r.epochs_configured) throw std::invalid_argument("run record: more epochs than configured");
  return r;
}

RunRecord read_run_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return read_run_jsonl(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_run_csv(const RunRecord& r, std::ostream& out, double ema_alpha, bool timing) {
  // EMA runs over the leading stretch of present values only.
  auto smoothed = [&](std::string_view metric) {
    std::vector<double> raw;
    for (const auto& v : r.series(metric)) {
      if (!v) break;
      raw.push_back(*v);
    }
    return ema_smooth(raw, ema_alpha);
  };
  const auto train_ema = smoothed("train_loss");
  const auto eval_ema = smoothed("eval_loss");

  out << "epoch,train_loss,eval_loss,eval_accuracy,max_grad_inf,max_aux_grad_inf,spike_steps,"
         "train_loss_ema,eval_loss_ema";
  if (timing) out << ",wall_seconds";
  out << '\n';
  for (std::size_t i = 0; i < r.epochs.size(); ++i) {
    const EpochMetrics& e = r.epochs[i];
    out << i + 1 << ',' << cell(e.train_loss) << ',' << cell(e.eval_loss) << ',' << cell(e.eval_accuracy) << ','
        << cell(e.max_grad_inf) << ',' << cell(e.max_aux_grad_inf) << ',' << e.spike_steps << ','
        << (i < train_ema.size() ? format_number(train_ema[i]) : "") << ','
        << (i < eval_ema.size() ? format_number(eval_ema[i]) : "");
    if (timing) out << ',' << format_number(e.wall_seconds);
    out << '\n';
  }
}

}  // namespace lehi
