#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lehi/numcore.hpp"

namespace lehi {

enum class OptimizerKind { adam, adamw, lehi, lehibrid };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);
/// lehi and lehibrid need an auxiliary gradient each step.
bool uses_aux_gradient(OptimizerKind kind) noexcept;

struct HyperParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double alpha = 1e-3;
  double eps = 1e-7;
  double weight_decay = 0.0;  // AdamW only

  /// Throws std::invalid_argument unless 0 <= beta1 < beta2 < 1, alpha > 0,
  /// eps > 0 and weight_decay >= 0. The step functions themselves do not
  /// validate, so eps = 0 can be used in hand traces.
  void validate() const;

  /// Defaults for a kind: eps 1e-7 for adam/adamw, 1e-2 for lehi/lehibrid.
  static HyperParams defaults_for(OptimizerKind kind);
};

/// Step size alpha (1 - beta1) sqrt(1 - beta2^k) / sqrt(1 - beta2); k >= 1.
double alpha_k(const HyperParams& hp, std::int64_t k);

/// Zero-initialized first and second moment accumulators. `k` is the index
/// of the next step, starting at 1.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  std::int64_t k = 1;
  /// LEHIBRID feeds the auxiliary gradient to v on odd k when true,
  /// on even k otherwise.
  bool lehibrid_aux_on_odd = true;

  static OptimizerState zeros_like(OptimizerKind kind, std::span<const DenseMatrix* const> params);
  static OptimizerState zeros_like(OptimizerKind kind, std::span<const DenseMatrix> params);
};

/// Outcome of one step. Non-finite gradients are applied as-is and flagged.
struct StepResult {
  bool finite_gradient = true;
};

// Every step updates params in place and advances state.k. Parameters,
// gradients and moments must be shape-congruent (ShapeError otherwise).

/// m <- b1 m + g; v <- b2 v + g^2; w <- w - alpha_k m / sqrt(eps + v)
StepResult adam_step(OptimizerState& state, const HyperParams& hp, std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix> g);

/// adam_step plus decoupled decay w <- w - alpha_k * weight_decay * w on every tensor.
StepResult adamw_step(OptimizerState& state, const HyperParams& hp, std::span<DenseMatrix* const> params,
                      std::span<const DenseMatrix> g);

/// m <- b1 m + g; v <- b2 v + g_aux^2; w <- w - alpha_k m / sqrt(eps + v)
StepResult lehi_step(OptimizerState& state, const HyperParams& hp, std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix> g, std::span<const DenseMatrix> g_aux);

/// lehi_step whose second moment alternates between g_aux and g by the
/// parity of k (see OptimizerState::lehibrid_aux_on_odd).
StepResult lehibrid_step(OptimizerState& state, const HyperParams& hp,
                         std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g,
                         std::span<const DenseMatrix> g_aux);

/// Dispatches on state.kind. g_aux is ignored by adam/adamw.
StepResult optimizer_step(OptimizerState& state, const HyperParams& hp,
                          std::span<DenseMatrix* const> params, std::span<const DenseMatrix> g,
                          std::span<const DenseMatrix> g_aux);

}  // namespace lehi
