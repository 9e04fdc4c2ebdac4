#include "lehi/optimizers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lehi {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamw: return "adamw";
    case OptimizerKind::lehi: return "lehi";
    case OptimizerKind::lehibrid: return "lehibrid";
  }
  return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adamw") return OptimizerKind::adamw;
  if (name == "lehi") return OptimizerKind::lehi;
  if (name == "lehibrid") return OptimizerKind::lehibrid;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

bool uses_aux_gradient(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::lehi || kind == OptimizerKind::lehibrid;
}

void HyperParams::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must lie in [0, 1)");
  if (!(beta2 > beta1 && beta2 < 1.0)) throw std::invalid_argument("beta2 must lie in (beta1, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be nonnegative");
}

HyperParams HyperParams::defaults_for(OptimizerKind kind) {
  HyperParams hp;
  hp.eps = uses_aux_gradient(kind) ? 1e-2 : 1e-7;
  if (kind == OptimizerKind::adamw) hp.weight_decay = 1e-2;
  return hp;
}

double alpha_k(const HyperParams& hp, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("alpha_k: k must be >= 1");
  return hp.alpha * (1.0 - hp.beta1) * std::sqrt(1.0 - std::pow(hp.beta2, static_cast<double>(k))) /
         std::sqrt(1.0 - hp.beta2);
}

namespace {

template <typename Params>
OptimizerState make_state(OptimizerKind kind, const Params& shapes) {
  OptimizerState s;
  s.kind = kind;
  for (const auto& p : shapes) {
    const DenseMatrix& m = *p;
    s.m.emplace_back(m.rows(), m.cols());
    s.v.emplace_back(m.rows(), m.cols());
  }
  return s;
}

void check_congruent(const OptimizerState& state, std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix> g, std::string_view what) {
  if (params.size() != state.m.size() || g.size() != state.m.size()) {
    throw ShapeError(std::string(what) + ": tensor count mismatch");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!params[t]->same_shape(state.m[t]) || !g[t].same_shape(state.m[t])) {
      throw ShapeError(std::string(what) + ": tensor " + std::to_string(t) + " shape mismatch");
    }
  }
}

bool all_finite(std::span<const DenseMatrix> g) {
  for (const auto& t : g)
    if (!t.all_finite()) return false;
  return true;
}

// Shared body of all four rules. `second` feeds the v recurrence; `decay`
// is the AdamW coefficient (0 for the others).
StepResult moment_step(OptimizerState& state, const HyperParams& hp,
                       std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g,
                       std::span<const DenseMatrix> second, double decay) {
  const double step = alpha_k(hp, state.k);
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto w = params[t]->data();
    auto m = state.m[t].data();
    auto v = state.v[t].data();
    auto gt = g[t].data();
    auto st = second[t].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = hp.beta1 * m[i] + gt[i];
      v[i] = hp.beta2 * v[i] + st[i] * st[i];
      const double w_old = w[i];
      w[i] = w_old - step * m[i] / std::sqrt(hp.eps + v[i]);
      if (decay != 0.0) w[i] -= step * decay * w_old;
    }
  }
  ++state.k;
  return StepResult{all_finite(g) && all_finite(second)};
}

}  // namespace

OptimizerState OptimizerState::zeros_like(OptimizerKind kind,
                                          std::span<const DenseMatrix* const> params) {
  return make_state(kind, params);
}

OptimizerState OptimizerState::zeros_like(OptimizerKind kind, std::span<const DenseMatrix> params) {
  std::vector<const DenseMatrix*> ptrs;
  for (const auto& p : params) ptrs.push_back(&p);
  return make_state(kind, ptrs);
}

StepResult adam_step(OptimizerState& state, const HyperParams& hp, std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix> g) {
  check_congruent(state, params, g, "adam_step");
  return moment_step(state, hp, params, g, g, 0.0);
}

StepResult adamw_step(OptimizerState& state, const HyperParams& hp,
                      std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g) {
  check_congruent(state, params, g, "adamw_step");
  return moment_step(state, hp, params, g, g, hp.weight_decay);
}

StepResult lehi_step(OptimizerState& state, const HyperParams& hp, std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix> g, std::span<const DenseMatrix> g_aux) {
  check_congruent(state, params, g, "lehi_step");
  check_congruent(state, params, g_aux, "lehi_step");
  return moment_step(state, hp, params, g, g_aux, 0.0);
}

StepResult lehibrid_step(OptimizerState& state, const HyperParams& hp,
                         std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g,
                         std::span<const DenseMatrix> g_aux) {
  check_congruent(state, params, g, "lehibrid_step");
  check_congruent(state, params, g_aux, "lehibrid_step");
  const bool odd = state.k % 2 == 1;
  const bool use_aux = odd == state.lehibrid_aux_on_odd;
  const StepResult r = moment_step(state, hp, params, g, use_aux ? g_aux : g, 0.0);
  // The unused gradient still signals divergence.
  return StepResult{r.finite_gradient && all_finite(g_aux)};
}

StepResult optimizer_step(OptimizerState& state, const HyperParams& hp,
                          std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g,
                          std::span<const DenseMatrix> g_aux) {
  switch (state.kind) {
    case OptimizerKind::adam: return adam_step(state, hp, params, g);
    case OptimizerKind::adamw: return adamw_step(state, hp, params, g);
    case OptimizerKind::lehi: return lehi_step(state, hp, params, g, g_aux);
    case OptimizerKind::lehibrid: return lehibrid_step(state, hp, params, g, g_aux);
  }
  throw std::invalid_argument("optimizer_step: unknown kind");
}

}  // namespace lehi
