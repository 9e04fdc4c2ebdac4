#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lehi/experiment.hpp"

namespace lehi {

namespace {

struct Job {
  std::size_t optimizer;
  std::size_t lr;
  std::size_t seed;
};

bool better(double a, double b, Direction d) { return d == Direction::minimize_upper ? a < b : a > b; }

}  // namespace

SweepReport summarize_sweep(const ExperimentConfig& cfg, std::vector<RunRecord> records) {
  const std::size_t n_seeds = cfg.seeds.size();
  if (records.size() != cfg.optimizers.size() * cfg.grid.size() * n_seeds) {
    throw std::invalid_argument("summarize_sweep: record count does not match the config");
  }
  SweepReport report;
  report.records = std::move(records);
  const std::span<const RunRecord> all(report.records);

  for (std::size_t o = 0; o < cfg.optimizers.size(); ++o) {
    std::optional<std::size_t> pick;
    for (std::size_t l = 0; l < cfg.grid.size(); ++l) {
      const auto cell_records = all.subspan((o * cfg.grid.size() + l) * n_seeds, n_seeds);
      SweepCell cell;
      cell.optimizer = cfg.optimizers[o].name;
      cell.lr = cfg.grid[l];
      cell.score = selection_score(cell_records, cfg.selection.metric, cfg.window(), cfg.selection.c,
                                   cfg.selection.direction);
      cell.stability = stability_verdict(cell_records, cfg.train.spike_threshold, cfg.spike_mode);
      report.cells.push_back(cell);

      const std::size_t idx = report.cells.size() - 1;
      if (!pick) {
        pick = idx;
        continue;
      }
      const SweepCell& best = report.cells[*pick];
      const double s = cell.score.score, b = best.score.score;
      if (better(s, b, cfg.selection.direction) || (s == b && cell.lr < best.lr)) pick = idx;
    }
    report.cells[*pick].selected = true;
    report.picks.push_back(*pick);
  }
  return report;
}

SweepReport run_sweep(const ExperimentConfig& cfg, const DataSplit& data, unsigned threads,
                      const SweepProgress& progress) {
  cfg.validate();
  std::vector<Job> jobs;
  for (std::size_t o = 0; o < cfg.optimizers.size(); ++o)
    for (std::size_t l = 0; l < cfg.grid.size(); ++l)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({o, l, s});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        OptimizerConfig opt = cfg.optimizers[jobs[i].optimizer];
        opt.hp.alpha = cfg.grid[jobs[i].lr];
        records[i] = train(cfg.model, data, opt, cfg.train, cfg.seeds[jobs[i].seed]);
        std::lock_guard lock(mu);
        ++done;
        if (progress) progress(records[i], done, jobs.size());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize_sweep(cfg, std::move(records));
}

void write_report_csv(const SweepReport& report, std::ostream& out) {
  out << "optimizer,lr,mu,sigma,c,direction,window,score,nan_runs,runs,status,selected\n";
  for (const SweepCell& c : report.cells) {
    out << c.optimizer << ',' << format_number(c.lr) << ',' << format_number(c.score.mu) << ','
        << format_number(c.score.sigma) << ',' << format_number(c.score.c) << ',' << to_string(c.score.direction)
        << ',' << c.score.window << ',' << format_number(c.score.score) << ',' << c.score.nan_records << ','
        << c.score.records << ',' << to_string(c.stability.status) << ',' << (c.selected ? 1 : 0) << '\n';
  }
}

void write_stability_csv(std::span<const StabilityVerdict> verdicts, std::ostream& out) {
  out << "optimizer,lr,max_grad,avg_spikes,nan_failures,runs,status\n";
  for (const StabilityVerdict& v : verdicts) {
    out << v.optimizer << ',' << format_number(v.lr) << ',' << format_number(v.max_grad_seen) << ','
        << format_number(v.avg_spikes) << ',' << v.nan_failures << ',' << v.runs << ',' << to_string(v.status)
        << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

void write_sweep_outputs(const SweepReport& report, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "runs");
  {
    auto f = open_out(dir / "report.csv");
    write_report_csv(report, f);
  }
  {
    std::vector<StabilityVerdict> verdicts;
    for (const SweepCell& c : report.cells) verdicts.push_back(c.stability);
    auto f = open_out(dir / "stability.csv");
    write_stability_csv(verdicts, f);
  }
  for (const RunRecord& r : report.records) {
    auto j = open_out(dir / "runs" / (r.id() + ".jsonl"));
    write_run_jsonl(r, j, cfg.record_timing);
    auto c = open_out(dir / "runs" / (r.id() + ".csv"));
    write_run_csv(r, c, cfg.ema_alpha, cfg.record_timing);
  }
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return cfg.output_dir;
}

}  // namespace lehi
