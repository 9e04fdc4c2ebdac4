#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lehi/harness.hpp"

namespace lehi {

std::string_view to_string(Direction d) {
  return d == Direction::maximize_lower ? "maximize-lower" : "minimize-upper";
}

Direction parse_direction(std::string_view s) {
  if (s == "minimize-upper") return Direction::minimize_upper;
  if (s == "maximize-lower") return Direction::maximize_lower;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

double score_from_moments(double mu, double sigma, double c, Direction direction) {
  return direction == Direction::minimize_upper ? mu + c * sigma : mu - c * sigma;
}

double worst_score(Direction direction) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return direction == Direction::minimize_upper ? inf : -inf;
}

SelectionScore selection_score(std::span<const RunRecord> records, std::string_view metric,
                               std::size_t window, double c, Direction direction) {
  if (window < 2) throw std::invalid_argument("selection_score: window must be >= 2");
  if (records.empty()) throw std::invalid_argument("selection_score: no records");

  SelectionScore out;
  out.c = c;
  out.direction = direction;
  out.window = window;
  out.records = records.size();

  double mu_sum = 0.0, sigma_sum = 0.0, score_sum = 0.0;
  std::size_t finite = 0;
  for (const RunRecord& r : records) {
    if (r.nan_event) {
      ++out.nan_records;
      continue;
    }
    std::vector<double> values;
    for (const auto& v : r.series(metric))
      if (v) values.push_back(*v);
    if (values.size() < window) {
      throw std::invalid_argument("selection_score: " + r.id() + " has " + std::to_string(values.size()) +
                                  " values of " + std::string(metric) + ", window is " +
                                  std::to_string(window));
    }
    const std::span<const double> tail = std::span<const double>(values).last(window);
    double mu = 0.0;
    for (double x : tail) mu += x;
    mu /= static_cast<double>(window);
    double ss = 0.0;
    for (double x : tail) ss += (x - mu) * (x - mu);
    const double sigma = std::sqrt(ss / static_cast<double>(window - 1));
    mu_sum += mu;
    sigma_sum += sigma;
    score_sum += score_from_moments(mu, sigma, c, direction);
    ++finite;
  }

  if (out.nan_records > 0) {
    out.mu = finite ? mu_sum / static_cast<double>(finite) : std::numeric_limits<double>::quiet_NaN();
    out.sigma = finite ? sigma_sum / static_cast<double>(finite) : std::numeric_limits<double>::quiet_NaN();
    out.score = worst_score(direction);
    return out;
  }
  const auto n = static_cast<double>(finite);
  out.mu = mu_sum / n;
  out.sigma = sigma_sum / n;
  out.score = score_sum / n;
  return out;
}

std::size_t default_window(std::size_t epochs) {
  const std::size_t k = (epochs + 9) / 10;
  return k < 2 ? 2 : k;
}

std::vector<double> ema_smooth(std::span<const double> series, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ema_smooth: alpha must lie in (0, 1]");
  std::vector<double> out;
  out.reserve(series.size());
  for (double x : series) out.push_back(out.empty() ? x : alpha * x + (1.0 - alpha) * out.back());
  return out;
}

}  // namespace lehi
