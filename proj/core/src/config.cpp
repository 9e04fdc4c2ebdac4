#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lehi/experiment.hpp"

namespace lehi {

using nlohmann::json;

namespace {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError("config: unknown key " + where + "." + key);
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: " + where + "." + key + ": " + e.what());
  }
}

Task parse_task(const std::string& s) {
  if (s == "regression") return Task::regression;
  if (s == "classification") return Task::classification;
  throw ConfigError("config: unknown task '" + s + "'");
}

DatasetConfig parse_dataset(const json& j) {
  only_keys(j, "dataset",
            {"kind", "n", "d_x", "noise_std", "seed", "train_fraction", "standardize", "path",
             "feature_columns", "target_columns", "header", "delimiter", "task", "class_count",
             "train_images", "train_labels", "test_images", "test_labels", "limit_train", "limit_test"});
  DatasetConfig d;
  read(j, "kind", "dataset", d.kind);
  read(j, "n", "dataset", d.n);
  read(j, "d_x", "dataset", d.d_x);
  read(j, "noise_std", "dataset", d.noise_std);
  read(j, "seed", "dataset", d.seed);
  read(j, "train_fraction", "dataset", d.train_fraction);
  read(j, "standardize", "dataset", d.standardize);
  read(j, "path", "dataset", d.path);
  read(j, "feature_columns", "dataset", d.csv.feature_columns);
  read(j, "target_columns", "dataset", d.csv.target_columns);
  read(j, "header", "dataset", d.csv.header);
  std::string delim = ",";
  read(j, "delimiter", "dataset", delim);
  if (delim.size() != 1) throw ConfigError("config: dataset.delimiter must be one character");
  d.csv.delimiter = delim[0];
  if (j.contains("task")) d.csv.task = parse_task(j.at("task").get<std::string>());
  read(j, "class_count", "dataset", d.class_count);
  d.csv.class_count = d.class_count;
  read(j, "train_images", "dataset", d.train_images);
  read(j, "train_labels", "dataset", d.train_labels);
  read(j, "test_images", "dataset", d.test_images);
  read(j, "test_labels", "dataset", d.test_labels);
  read(j, "limit_train", "dataset", d.limit_train);
  read(j, "limit_test", "dataset", d.limit_test);
  if (d.kind != "synthetic" && d.kind != "csv" && d.kind != "idx") {
    throw ConfigError("config: dataset.kind must be synthetic, csv or idx");
  }
  return d;
}

OptimizerConfig parse_optimizer(const json& j, std::size_t index) {
  const std::string where = "optimizers[" + std::to_string(index) + "]";
  only_keys(j, where, {"name", "kind", "beta1", "beta2", "eps", "weight_decay", "lehibrid_aux_on_odd"});
  if (!j.contains("kind")) throw ConfigError("config: " + where + ".kind is required");
  OptimizerConfig o;
  try {
    o.kind = parse_optimizer_kind(j.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + where + ".kind: " + e.what());
  }
  o.hp = HyperParams::defaults_for(o.kind);
  o.name = std::string(to_string(o.kind));
  read(j, "name", where, o.name);
  read(j, "beta1", where, o.hp.beta1);
  read(j, "beta2", where, o.hp.beta2);
  read(j, "eps", where, o.hp.eps);
  read(j, "weight_decay", where, o.hp.weight_decay);
  read(j, "lehibrid_aux_on_odd", where, o.lehibrid_aux_on_odd);
  return o;
}

}  // namespace

std::size_t ExperimentConfig::window() const {
  return selection.window ? selection.window : default_window(train.epochs);
}

void ExperimentConfig::validate() const {
  if (optimizers.empty()) throw std::invalid_argument("config: no optimizers");
  if (grid.empty()) throw std::invalid_argument("config: empty learning-rate grid");
  if (seeds.empty()) throw std::invalid_argument("config: no seeds");
  for (double lr : grid)
    if (!(lr > 0.0)) throw std::invalid_argument("config: learning rates must be positive");
  std::set<std::string> names;
  for (const auto& o : optimizers) {
    if (!names.insert(o.name).second) throw std::invalid_argument("config: duplicate optimizer name " + o.name);
    HyperParams hp = o.hp;
    hp.alpha = grid.front();
    hp.validate();
  }
  if (train.batch_size == 0) throw std::invalid_argument("config: batch_size must be >= 1");
  if (window() < 2) throw std::invalid_argument("config: selection window must be >= 2");
  if (train.epochs < window()) {
    throw std::invalid_argument("config: " + std::to_string(train.epochs) + " epochs is shorter than the selection window " +
                                std::to_string(window()));
  }
  if (!(ema_alpha > 0.0 && ema_alpha <= 1.0)) throw std::invalid_argument("config: ema_alpha must lie in (0, 1]");
  (void)RunRecord{}.series(selection.metric);
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  only_keys(j, "<root>",
            {"name", "dataset", "model", "loss", "optimizers", "grid", "seeds", "epochs", "batch_size",
             "selection", "spike_threshold", "spike_mode", "ema_alpha", "aux_scaling", "output_dir",
             "record_timing"});
  ExperimentConfig c;
  read(j, "name", "<root>", c.name);
  if (j.contains("dataset")) c.dataset = parse_dataset(j.at("dataset"));
  if (j.contains("model")) {
    const json& m = j.at("model");
    only_keys(m, "model", {"hidden", "activation"});
    read(m, "hidden", "model", c.model.hidden);
    if (m.contains("activation")) c.model.hidden_activation = parse_activation(m.at("activation").get<std::string>());
  }
  if (j.contains("loss")) c.train.loss = parse_loss_kind(j.at("loss").get<std::string>());
  if (j.contains("optimizers")) {
    const json& list = j.at("optimizers");
    if (!list.is_array()) throw ConfigError("config: optimizers must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) c.optimizers.push_back(parse_optimizer(list[i], i));
  }
  read(j, "grid", "<root>", c.grid);
  read(j, "seeds", "<root>", c.seeds);
  read(j, "epochs", "<root>", c.train.epochs);
  read(j, "batch_size", "<root>", c.train.batch_size);
  read(j, "spike_threshold", "<root>", c.train.spike_threshold);
  if (j.contains("spike_mode")) c.spike_mode = parse_spike_mode(j.at("spike_mode").get<std::string>());
  if (j.contains("aux_scaling")) c.train.aux_scaling = parse_aux_scaling(j.at("aux_scaling").get<std::string>());
  read(j, "ema_alpha", "<root>", c.ema_alpha);
  read(j, "output_dir", "<root>", c.output_dir);
  read(j, "record_timing", "<root>", c.record_timing);
  if (j.contains("selection")) {
    const json& s = j.at("selection");
    only_keys(s, "selection", {"metric", "window", "c", "direction"});
    read(s, "metric", "selection", c.selection.metric);
    read(s, "window", "selection", c.selection.window);
    read(s, "c", "selection", c.selection.c);
    if (s.contains("direction")) c.selection.direction = parse_direction(s.at("direction").get<std::string>());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

namespace {

Dataset head(const Dataset& ds, std::size_t limit) {
  if (limit == 0 || limit >= ds.size()) return ds;
  std::vector<std::size_t> idx(limit);
  for (std::size_t i = 0; i < limit; ++i) idx[i] = i;
  return ds.subset(idx);
}

}  // namespace

DataSplit load_data(const DatasetConfig& cfg) {
  DataSplit out;
  if (cfg.kind == "idx") {
    out.train = head(load_idx_dataset(cfg.train_images, cfg.train_labels, cfg.class_count), cfg.limit_train);
    out.test = head(load_idx_dataset(cfg.test_images, cfg.test_labels, cfg.class_count), cfg.limit_test);
    return out;
  }
  const SeededRng rng(cfg.seed);
  Dataset all = cfg.kind == "synthetic" ? synthetic_regression(rng.fork(0), cfg.n, cfg.d_x, cfg.noise_std)
                                        : load_csv(cfg.path, cfg.csv);
  auto [train, test] = split(all, cfg.train_fraction, rng.fork(1));
  if (cfg.standardize) standardize(train, test);
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

}  // namespace lehi
