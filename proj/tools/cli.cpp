#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lehi/experiment.hpp"
#include "lehi/losses.hpp"
#include "lehi/theory.hpp"

namespace lehi::cli {

namespace {

namespace fs = std::filesystem;

struct Grid {
  double lo, hi, step;
};

Grid parse_grid(const std::string& text) {
  Grid g{};
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw std::invalid_argument("grid must look like lo:hi:step, got '" + text + "'");
  }
  if (!(g.step > 0.0) || g.hi < g.lo) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
  return g;
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> xs;
  const auto n = static_cast<long>(std::floor((g.hi - g.lo) / g.step + 1e-9));
  for (long i = 0; i <= n; ++i) xs.push_back(g.lo + static_cast<double>(i) * g.step);
  return xs;
}

// ---- train / sweep -----------------------------------------------------------

struct RunFlags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> epochs;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::vector<double>> grid;
  std::optional<std::vector<std::string>> optimizers;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config, "JSON experiment config")->required();
  app->add_option("--out", f.out_dir, "output directory (overrides LEHI_OUTPUT_DIR and the config)");
  app->add_option("--epochs", f.epochs, "override the number of epochs");
  app->add_option("--seeds", f.seeds, "override the seed list");
  app->add_option("--grid", f.grid, "override the learning-rate grid");
  app->add_option("--optimizers", f.optimizers, "keep only these optimizer names");
}

ExperimentConfig load_with_overrides(const RunFlags& f) {
  ExperimentConfig cfg = load_experiment_config(f.config);
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.seeds) cfg.seeds = *f.seeds;
  if (f.grid) cfg.grid = *f.grid;
  if (f.optimizers) {
    std::vector<OptimizerConfig> kept;
    for (const auto& name : *f.optimizers) {
      auto it = std::find_if(cfg.optimizers.begin(), cfg.optimizers.end(),
                             [&](const OptimizerConfig& o) { return o.name == name; });
      if (it == cfg.optimizers.end()) throw std::invalid_argument("no optimizer named '" + name + "' in the config");
      kept.push_back(*it);
    }
    cfg.optimizers = kept;
  }
  cfg.validate();
  return cfg;
}

int cmd_train(const RunFlags& f, double lr, std::uint64_t seed, const std::string& model_path,
              std::ostream& out) {
  ExperimentConfig cfg = load_with_overrides(f);
  OptimizerConfig opt = cfg.optimizers.front();
  opt.hp.alpha = lr;
  const DataSplit data = load_data(cfg.dataset);
  MlpModel model;
  const RunRecord rec = train(cfg.model, data, opt, cfg.train, seed, &model);

  const fs::path dir = resolve_output_dir(cfg, f.out_dir) / "runs";
  fs::create_directories(dir);
  {
    std::ofstream j(dir / (rec.id() + ".jsonl"), std::ios::binary);
    write_run_jsonl(rec, j, cfg.record_timing);
    std::ofstream c(dir / (rec.id() + ".csv"), std::ios::binary);
    write_run_csv(rec, c, cfg.ema_alpha, cfg.record_timing);
  }
  if (!model_path.empty()) save_model(model, model_path);

  const auto last = [&](std::string_view m) {
    const auto s = rec.series(m);
    return s.empty() || !s.back() ? std::string("absent") : format_number(*s.back());
  };
  out << "run " << rec.id() << " epochs=" << rec.epochs.size() << " train_loss=" << last("train_loss")
      << " eval_loss=" << last("eval_loss");
  if (data.train.task == Task::classification) out << " eval_accuracy=" << last("eval_accuracy");
  out << " max_grad=" << format_number(rec.max_grad_seen()) << " nan=" << (rec.nan_event ? 1 : 0) << '\n';
  out << "wrote " << (dir / (rec.id() + ".jsonl")).string() << '\n';
  return 0;
}

int cmd_sweep(const RunFlags& f, unsigned threads, bool quiet, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_with_overrides(f);
  const DataSplit data = load_data(cfg.dataset);
  SweepProgress progress;
  if (!quiet) {
    progress = [&err](const RunRecord& r, std::size_t done, std::size_t total) {
      err << "[" << done << "/" << total << "] " << r.id() << (r.nan_event ? " nan" : "") << '\n';
    };
  }
  const SweepReport report = run_sweep(cfg, data, threads, progress);
  const fs::path dir = resolve_output_dir(cfg, f.out_dir);
  write_sweep_outputs(report, cfg, dir);
  write_report_csv(report, out);
  out << "wrote " << (dir / "report.csv").string() << ", " << (dir / "stability.csv").string() << " and "
      << report.records.size() << " run records\n";
  return 0;
}

// ---- stability ---------------------------------------------------------------

int cmd_stability(const std::string& runs_dir, double threshold, const std::string& mode, std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(runs_dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  if (files.empty()) throw std::invalid_argument("no .jsonl run records in " + runs_dir);
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> records;
  for (const auto& p : files) records.push_back(read_run_jsonl(p));
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.optimizer != b.optimizer) return a.optimizer < b.optimizer;
    if (a.hp.alpha != b.hp.alpha) return a.hp.alpha > b.hp.alpha;
    return a.seed < b.seed;
  });
  const auto verdicts = stability_report(records, threshold, parse_spike_mode(mode));
  write_stability_csv(verdicts, out);
  return 0;
}

// ---- verify-aux --------------------------------------------------------------

int cmd_verify_aux(const std::string& loss, const std::string& grid_text, double tol, std::size_t classes,
                   std::size_t points, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const LossPair pair{parse_loss_kind(loss), 1.0};
  const Grid g = parse_grid(grid_text);
  DenseMatrix p, y;
  if (pair.kind == LossKind::multiclass_ce) {
    if (classes < 2) throw std::invalid_argument("--classes must be >= 2");
    SeededRng rng(seed);
    p = DenseMatrix(classes, points);
    y = DenseMatrix(classes, points);
    for (std::size_t j = 0; j < points; ++j) {
      for (std::size_t i = 0; i < classes; ++i) p(i, j) = rng.uniform(g.lo, g.hi);
      y(rng.below(classes), j) = 1.0;
    }
  } else {
    const auto xs = grid_points(g);
    p = DenseMatrix(1, xs.size(), xs);
    y = DenseMatrix(1, xs.size(), 0.0);
  }
  const HessianIdentityReport r = verify_hessian_identity(pair, p, y, tol);
  out << "loss=" << loss << " points=" << r.points << " max_abs_error_analytic=" << format_number(r.max_abs_error_analytic)
      << " max_abs_error_fd=" << format_number(r.max_abs_error_fd) << " tol=" << format_number(tol)
      << " status=" << (r.passed ? "pass" : "fail") << '\n';
  if (!r.passed) {
    err << "error: auxiliary identity exceeded tolerance " << format_number(tol) << '\n';
    return 1;
  }
  return 0;
}

// ---- bound / lemmas ----------------------------------------------------------

int cmd_bound(bool all, const HyperParams& hp, std::int64_t K, std::size_t d, double w1, std::ostream& out,
              std::ostream& err) {
  const LogCoshProblem problem(d);
  std::vector<BoundGridPoint> points;
  if (all) {
    points = bound_check_grid();
  } else {
    points.push_back({hp.beta1, hp.beta2, hp.alpha, K});
  }
  std::size_t failures = 0;
  out << "beta1,beta2,alpha,K,lhs,rhs,margin,satisfied\n";
  for (const auto& pt : points) {
    HyperParams h = hp;
    h.beta1 = pt.beta1;
    h.beta2 = pt.beta2;
    h.alpha = pt.alpha;
    const BoundCheck c = check_bound_on_trajectory(problem, h, pt.K, DenseMatrix(d, 1, w1));
    if (!c.satisfied) ++failures;
    out << format_number(pt.beta1) << ',' << format_number(pt.beta2) << ',' << format_number(pt.alpha) << ','
        << pt.K << ',' << format_number(c.lhs) << ',' << format_number(c.rhs) << ','
        << format_number(c.rhs - c.lhs) << ',' << (c.satisfied ? 1 : 0) << '\n';
  }
  if (failures) {
    err << "error: bound violated at " << failures << " of " << points.size() << " points\n";
    return 1;
  }
  return 0;
}

int cmd_lemmas(std::size_t sequences, std::uint64_t seed, std::int64_t k_max, std::ostream& out,
               std::ostream& err) {
  const LemmaSweep sums = random_lemma_sweep(sequences, seed);
  const LemmaSweep geo = geometric_lemma_sweep(k_max);
  out << "sum-lemma checked=" << sums.checked << " violations=" << sums.violations << '\n';
  out << "geometric-lemma checked=" << geo.checked << " violations=" << geo.violations << '\n';
  if (sums.violations || geo.violations) {
    err << "error: lemma violations found\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adam, AdamW, LEHI and LEHIBRID training, sweeps and checks", "lehi"};
  app.require_subcommand(1);

  RunFlags train_flags;
  double train_lr = 1e-3;
  std::uint64_t train_seed = 0;
  std::string save_path;
  auto* train_cmd = app.add_subcommand("train", "train one model with the first optimizer in the config");
  add_run_flags(train_cmd, train_flags);
  train_cmd->add_option("--lr", train_lr, "learning rate");
  train_cmd->add_option("--seed", train_seed, "run seed");
  train_cmd->add_option("--save-model", save_path, "write the trained model here");

  RunFlags sweep_flags;
  unsigned threads = 1;
  bool quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every (optimizer, lr, seed) cell and select learning rates");
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--threads", threads, "parallel cells")->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--quiet", quiet, "no progress lines");

  std::string runs_dir, spike_mode = "per-epoch";
  double threshold = 10.0;
  auto* stab_cmd = app.add_subcommand("stability", "stability verdicts from saved run records");
  stab_cmd->add_option("--runs", runs_dir, "directory of .jsonl run records")->required();
  stab_cmd->add_option("--threshold", threshold, "spike threshold on |g|_inf");
  stab_cmd->add_option("--mode", spike_mode, "per-epoch or per-step");

  std::string loss, grid_text;
  double tol = 1e-7;
  std::size_t classes = 10, points = 1000;
  std::uint64_t aux_seed_value = 0;
  auto* aux_cmd = app.add_subcommand("verify-aux", "check aux_seed^2 against the loss Hessian diagonal");
  aux_cmd->add_option("--loss", loss, "mse, bce or multiclass-ce")->required();
  aux_cmd->add_option("--grid", grid_text, "logit range lo:hi:step")->required();
  aux_cmd->add_option("--tol", tol, "tolerance");
  aux_cmd->add_option("--classes", classes, "classes for multiclass-ce");
  aux_cmd->add_option("--points", points, "random logit columns for multiclass-ce");
  aux_cmd->add_option("--seed", aux_seed_value, "seed for multiclass-ce logits");

  HyperParams bound_hp;
  bound_hp.alpha = 1e-2;
  bound_hp.eps = 1e-8;
  std::int64_t K = 2000;
  std::size_t dim = 10;
  double w1 = 0.5;
  bool bound_grid = false;
  auto* bound_cmd = app.add_subcommand("bound", "full-batch LEHI on sum log cosh(w) against the convergence bound");
  bound_cmd->add_option("--alpha", bound_hp.alpha);
  bound_cmd->add_option("--beta1", bound_hp.beta1);
  bound_cmd->add_option("--beta2", bound_hp.beta2);
  bound_cmd->add_option("--eps", bound_hp.eps);
  bound_cmd->add_option("--K", K, "iterations");
  bound_cmd->add_option("--dim", dim, "dimension d");
  bound_cmd->add_option("--w1", w1, "initial value of every coordinate");
  bound_cmd->add_flag("--grid", bound_grid, "run the full (beta1, beta2, alpha, K) grid");

  std::size_t sequences = 10000;
  std::uint64_t lemma_seed = 0;
  std::int64_t k_max = 1000;
  auto* lemma_cmd = app.add_subcommand("lemmas", "randomized and exhaustive lemma inequality checks");
  lemma_cmd->add_option("--sequences", sequences, "random sequences for the sum lemma");
  lemma_cmd->add_option("--seed", lemma_seed);
  lemma_cmd->add_option("--k-max", k_max, "largest k for the geometric lemma");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags, train_lr, train_seed, save_path, out);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, threads, quiet, out, err);
    if (*stab_cmd) return cmd_stability(runs_dir, threshold, spike_mode, out);
    if (*aux_cmd) return cmd_verify_aux(loss, grid_text, tol, classes, points, aux_seed_value, out, err);
    if (*bound_cmd) return cmd_bound(bound_grid, bound_hp, K, dim, w1, out, err);
    if (*lemma_cmd) return cmd_lemmas(sequences, lemma_seed, k_max, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lehi::cli
