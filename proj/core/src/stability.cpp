#include <stdexcept>

#include "lehi/harness.hpp"

namespace lehi {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::stable: return "STABLE";
    case Status::noisy: return "NOISY";
    case Status::failed: return "FAILED";
  }
  return "?";
}

Status classify_stability(double avg_spikes, std::size_t nan_failures) {
  if (nan_failures > 0) return Status::failed;
  if (avg_spikes > 0.0) return Status::noisy;
  return Status::stable;
}

StabilityVerdict stability_verdict(std::span<const RunRecord> cell, double spike_threshold, SpikeMode mode) {
  if (cell.empty()) throw std::invalid_argument("stability_verdict: empty cell");
  StabilityVerdict v;
  v.optimizer = cell.front().optimizer;
  v.lr = cell.front().hp.alpha;
  v.runs = cell.size();
  double spikes = 0.0;
  for (const RunRecord& r : cell) {
    v.max_grad_seen = std::max(v.max_grad_seen, r.max_grad_seen());
    if (r.nan_event) ++v.nan_failures;
    if (mode == SpikeMode::per_step) {
      if (r.spike_threshold != spike_threshold) {
        throw std::invalid_argument("stability_verdict: per-step spikes were recorded at threshold " +
                                    std::to_string(r.spike_threshold));
      }
      spikes += static_cast<double>(r.spike_count(SpikeMode::per_step));
    } else {
      // An epoch holds a spike exactly when its largest step norm exceeds the threshold.
      for (const auto& e : r.epochs)
        if (e.max_grad_inf && *e.max_grad_inf > spike_threshold) spikes += 1.0;
    }
  }
  v.avg_spikes = spikes / static_cast<double>(cell.size());
  v.status = classify_stability(v.avg_spikes, v.nan_failures);
  return v;
}

std::vector<StabilityVerdict> stability_report(std::span<const RunRecord> records, double spike_threshold,
                                               SpikeMode mode) {
  std::vector<std::pair<std::string, double>> keys;
  std::vector<std::vector<RunRecord>> cells;
  for (const RunRecord& r : records) {
    std::size_t i = 0;
    while (i < keys.size() && !(keys[i].first == r.optimizer && keys[i].second == r.hp.alpha)) ++i;
    if (i == keys.size()) {
      keys.emplace_back(r.optimizer, r.hp.alpha);
      cells.emplace_back();
    }
    cells[i].push_back(r);
  }
  std::vector<StabilityVerdict> out;
  for (const auto& cell : cells) out.push_back(stability_verdict(cell, spike_threshold, mode));
  return out;
}

}  // namespace lehi
