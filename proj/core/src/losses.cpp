#include "lehi/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lehi {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::bce: return "bce";
    case LossKind::multiclass_ce: return "multiclass-ce";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mse") return LossKind::mse;
  if (name == "bce") return LossKind::bce;
  if (name == "multiclass-ce" || name == "ce") return LossKind::multiclass_ce;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

double sigmoid(double p) noexcept {
  if (p >= 0.0) return 1.0 / (1.0 + std::exp(-p));
  const double e = std::exp(p);
  return e / (1.0 + e);
}

namespace {

void check_shapes(const DenseMatrix& p, const DenseMatrix& y) {
  if (!p.same_shape(y)) {
    throw ShapeError("loss: logits " + shape_string(p) + " vs targets " + shape_string(y));
  }
}

void check_binary(const DenseMatrix& y) {
  for (double t : y.data()) {
    if (t != 0.0 && t != 1.0) {
      throw std::invalid_argument("bce: target " + std::to_string(t) + " is not in {0, 1}");
    }
  }
}

double softplus(double p) noexcept { return std::max(p, 0.0) + std::log1p(std::exp(-std::fabs(p))); }

// 1 / (e^{p/2} + e^{-p/2}), switching to e^{-|p|/2} once the smaller term
// no longer matters in double precision.
double bce_aux(double p) noexcept {
  const double a = std::fabs(p);
  if (a > 40.0) return std::exp(-0.5 * a);
  return 1.0 / (std::exp(0.5 * p) + std::exp(-0.5 * p));
}

}  // namespace

DenseMatrix softmax_columns(const DenseMatrix& p) {
  DenseMatrix s(p.rows(), p.cols());
  for (std::size_t c = 0; c < p.cols(); ++c) {
    double mx = -INFINITY;
    for (std::size_t r = 0; r < p.rows(); ++r) mx = std::max(mx, p(r, c));
    double total = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r) {
      s(r, c) = std::exp(p(r, c) - mx);
      total += s(r, c);
    }
    for (std::size_t r = 0; r < p.rows(); ++r) s(r, c) /= total;
  }
  return s;
}

double loss_value(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y) {
  check_shapes(p, y);
  const std::size_t batch = p.cols();
  if (batch == 0) return 0.0;
  double total = 0.0;
  switch (pair.kind) {
    case LossKind::mse:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p.data()[i] - y.data()[i];
        total += 0.5 * d * d;
      }
      break;
    case LossKind::bce:
      check_binary(y);
      for (std::size_t i = 0; i < p.size(); ++i) {
        total += softplus(p.data()[i]) - y.data()[i] * p.data()[i];
      }
      break;
    case LossKind::multiclass_ce:
      for (std::size_t c = 0; c < batch; ++c) {
        double mx = -INFINITY;
        for (std::size_t r = 0; r < p.rows(); ++r) mx = std::max(mx, p(r, c));
        double s = 0.0;
        for (std::size_t r = 0; r < p.rows(); ++r) s += std::exp(p(r, c) - mx);
        const double lse = mx + std::log(s);
        for (std::size_t r = 0; r < p.rows(); ++r) total += y(r, c) * (lse - p(r, c));
      }
      break;
  }
  return total / static_cast<double>(batch);
}

DenseMatrix primary_seed(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y) {
  check_shapes(p, y);
  const double scale = 1.0 / pair.batch_scale;
  DenseMatrix g(p.rows(), p.cols());
  switch (pair.kind) {
    case LossKind::mse:
      for (std::size_t i = 0; i < p.size(); ++i) g.data()[i] = (p.data()[i] - y.data()[i]) * scale;
      break;
    case LossKind::bce:
      check_binary(y);
      for (std::size_t i = 0; i < p.size(); ++i) {
        g.data()[i] = (sigmoid(p.data()[i]) - y.data()[i]) * scale;
      }
      break;
    case LossKind::multiclass_ce: {
      const DenseMatrix s = softmax_columns(p);
      for (std::size_t i = 0; i < p.size(); ++i) g.data()[i] = (s.data()[i] - y.data()[i]) * scale;
      break;
    }
  }
  return g;
}

DenseMatrix aux_seed(const LossPair& pair, const DenseMatrix& p, const DenseMatrix& y) {
  check_shapes(p, y);
  const double scale = 1.0 / std::sqrt(pair.batch_scale);
  DenseMatrix v(p.rows(), p.cols());
  switch (pair.kind) {
    case LossKind::mse:
      for (double& x : v.data()) x = scale;
      break;
    case LossKind::bce:
      for (std::size_t i = 0; i < p.size(); ++i) v.data()[i] = bce_aux(p.data()[i]) * scale;
      break;
    case LossKind::multiclass_ce:
      for (std::size_t c = 0; c < p.cols(); ++c) {
        double mx = -INFINITY;
        for (std::size_t r = 0; r < p.rows(); ++r) mx = std::max(mx, p(r, c));
        double total = 0.0;
        for (std::size_t r = 0; r < p.rows(); ++r) total += std::exp(p(r, c) - mx);
        for (std::size_t r = 0; r < p.rows(); ++r) {
          // 1 - softmax_i taken as the mass of the other classes, so the
          // product stays accurate when one class dominates.
          const double e = std::exp(p(r, c) - mx);
          const double s = e / total;
          const double rest = (total - e) / total;
          v(r, c) = std::sqrt(s * rest) * scale;
        }
      }
      break;
  }
  return v;
}

namespace {

// Closed-form diagonal of the per-example prediction Hessian.
DenseMatrix hessian_diagonal(LossKind kind, const DenseMatrix& p) {
  DenseMatrix h(p.rows(), p.cols());
  switch (kind) {
    case LossKind::mse:
      for (double& x : h.data()) x = 1.0;
      break;
    case LossKind::bce:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = p.data()[i];
        h.data()[i] = sigmoid(q) * sigmoid(-q);
      }
      break;
    case LossKind::multiclass_ce: {
      const DenseMatrix s = softmax_columns(p);
      for (std::size_t i = 0; i < p.size(); ++i) h.data()[i] = s.data()[i] * (1.0 - s.data()[i]);
      break;
    }
  }
  return h;
}

}  // namespace

HessianIdentityReport verify_hessian_identity(const LossPair& pair, const DenseMatrix& p,
                                              const DenseMatrix& y, double tol, double fd_step) {
  const LossPair unit{pair.kind, 1.0};
  const DenseMatrix v = aux_seed(unit, p, y);
  const DenseMatrix exact = hessian_diagonal(pair.kind, p);

  HessianIdentityReport report;
  report.points = p.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double v2 = v.data()[i] * v.data()[i];
    report.max_abs_error_analytic =
        std::max(report.max_abs_error_analytic, std::fabs(v2 - exact.data()[i]));
  }

  // d/dp_r of the r-th gradient component, one column at a time.
  for (std::size_t c = 0; c < p.cols(); ++c) {
    DenseMatrix pc(p.rows(), 1), yc(p.rows(), 1);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      pc(r, 0) = p(r, c);
      yc(r, 0) = y(r, c);
    }
    for (std::size_t r = 0; r < p.rows(); ++r) {
      DenseMatrix plus = pc, minus = pc;
      plus(r, 0) += fd_step;
      minus(r, 0) -= fd_step;
      const double gp = primary_seed(unit, plus, yc)(r, 0);
      const double gm = primary_seed(unit, minus, yc)(r, 0);
      const double h = (gp - gm) / (plus(r, 0) - minus(r, 0));
      const double v2 = v(r, c) * v(r, c);
      report.max_abs_error_fd = std::max(report.max_abs_error_fd, std::fabs(v2 - h));
    }
  }
  report.passed = report.max_abs_error_fd <= tol && report.max_abs_error_analytic <= tol;
  return report;
}

}  // namespace lehi
