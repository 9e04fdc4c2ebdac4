#pragma once

#include <cstddef>
#include <string_view>

#include "lehi/numcore.hpp"

namespace lehi {

enum class LossKind { mse, bce, multiclass_ce };

std::string_view to_string(LossKind kind);
/// Accepts "mse", "bce" and "multiclass-ce".
LossKind parse_loss_kind(std::string_view name);

/// A primary loss together with its auxiliary seed. Logits and targets are
/// q x batch matrices, one column per example.
///
/// `batch_scale` N fixes the batch conventions of the seeds: primary seeds
/// are multiplied by 1/N and auxiliary seeds by 1/sqrt(N). Leave N = 1 when
/// the consumer already averages over the batch, as backward_seeded does.
struct LossPair {
  LossKind kind = LossKind::mse;
  double batch_scale = 1.0;
};

/// Batch-mean loss: 1/2 ||p - y||^2 (mse), elementwise logistic loss summed
/// over rows (bce), or log-sum-exp cross-entropy (multiclass-ce).
/// Throws ShapeError on mismatched shapes and std::invalid_argument for bce
/// targets outside {0, 1}.
double loss_value(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y);

/// Exact grad_p loss per column, divided by batch_scale.
DenseMatrix primary_seed(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y);

/// v(p) with v_i^2 equal to the i-th diagonal entry of the prediction-space
/// Hessian of the loss, divided by sqrt(batch_scale). Independent of y.
///   mse:           ones
///   bce:           1 / (e^{p/2} + e^{-p/2})
///   multiclass-ce: 1/2 sqrt(1 - (2 softmax_i - 1)^2) = sqrt(softmax_i (1 - softmax_i))
DenseMatrix aux_seed(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y);

/// Numerically stable logistic function.
double sigmoid(double p) noexcept;
/// Max-shifted softmax of each column.
DenseMatrix softmax_columns(const DenseMatrix& p);

struct HessianIdentityReport {
  /// max |aux^2 - closed-form Hessian diagonal|
  double max_abs_error_analytic = 0.0;
  /// max |aux^2 - central difference of the analytic gradient|
  double max_abs_error_fd = 0.0;
  std::size_t points = 0;
  bool passed = false;  // max_abs_error_fd <= tol and max_abs_error_analytic <= tol
};

/// Checks diag(v v^T) = diag(grad^2_pp loss) at every column of p. The
/// finite-difference diagonal perturbs one logit at a time by +/- fd_step and
/// differences primary_seed. batch_scale is ignored (the identity is per example).
HessianIdentityReport verify_hessian_identity(const LossPair& pair, const DenseMatrix& p,
                                              const DenseMatrix& y, double tol,
                                              double fd_step = 1e-4);

}  // namespace lehi
