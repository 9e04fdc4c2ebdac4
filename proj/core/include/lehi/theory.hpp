#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lehi/numcore.hpp"
#include "lehi/optimizers.hpp"

namespace lehi {

/// A precondition of the convergence bound does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// P[R_K = k] proportional to 1 - beta1^(K-k+1), k = 1..K (index 0 holds k = 1).
std::vector<double> rk_distribution(double beta1, std::int64_t K);

struct BoundInputs {
  double alpha = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double eps = 0.0;
  std::int64_t K = 0;
  double M = 0.0;  // max(|g|_inf, |g_aux|_inf) <= sqrt(M^2 - eps)
  double L = 0.0;  // Lipschitz constant of grad f
  double d = 0.0;  // parameter dimension
  double f1 = 0.0; // f(w_1)
  double finf = 0.0;

  /// Throws PreconditionError unless K > 1/(1-beta1), 0 <= beta1 < beta2 < 1,
  /// alpha > 0, eps > 0, M^2 > eps, L > 0, d >= 1 and f1 >= finf.
  void validate() const;
};

struct BoundTerms {
  double k_tilde = 0.0;    // K - beta1 / (1 - beta1)
  double E = 0.0;
  double descent = 0.0;    // 2M / (alpha K~) (f1 - finf)
  double log_factor = 0.0; // (1/K~) log(1 + M^2/((1-beta2) eps)) - (K/K~) log beta2
  double total = 0.0;      // descent + E * log_factor
};

/// Right-hand side of the expected squared gradient norm bound for LEHI.
BoundTerms theorem_bound_terms(const BoundInputs& in);
double theorem_bound(const BoundInputs& in);

/// A smooth objective with known constants, for trajectory checks. The
/// auxiliary gradient plays the role of grad f~ in the LEHI update.
class BoundedTestProblem {
 public:
  virtual ~BoundedTestProblem() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(const DenseMatrix& w) const = 0;
  virtual DenseMatrix gradient(const DenseMatrix& w) const = 0;
  virtual DenseMatrix aux_gradient(const DenseMatrix& w) const = 0;
  /// Lipschitz constant of the gradient, if known.
  virtual std::optional<double> lipschitz() const = 0;
  /// Lower bound of f, if known.
  virtual std::optional<double> lower_bound() const = 0;
  /// G with max(|g|_inf, |g_aux|_inf) <= G along any trajectory, if known.
  virtual std::optional<double> seed_bound() const = 0;
};

/// f(w) = sum_i log cosh(w_i): grad = tanh(w), L = 1, finf = 0, |grad|_inf < 1.
/// The auxiliary gradient is the ones vector, i.e. the MSE auxiliary seed
/// pushed through an identity prediction map.
class LogCoshProblem final : public BoundedTestProblem {
 public:
  explicit LogCoshProblem(std::size_t dim) : dim_(dim) {}
  std::size_t dimension() const override { return dim_; }
  double value(const DenseMatrix& w) const override;
  DenseMatrix gradient(const DenseMatrix& w) const override;
  DenseMatrix aux_gradient(const DenseMatrix& w) const override;
  std::optional<double> lipschitz() const override { return 1.0; }
  std::optional<double> lower_bound() const override { return 0.0; }
  std::optional<double> seed_bound() const override { return 1.0; }

 private:
  std::size_t dim_;
};

struct BoundCheck {
  double lhs = 0.0;  // sum_k P[R_K = k] |grad f(w_k)|^2
  double rhs = 0.0;
  bool satisfied = false;
  BoundInputs inputs;
  /// Largest seed infinity norm seen on the trajectory.
  double observed_seed_bound = 0.0;
};

/// Runs K deterministic full-batch LEHI steps from w1 and compares the
/// R_K-weighted squared gradient norm against theorem_bound with
/// M^2 = G^2 + eps. Throws PreconditionError when the problem does not know
/// its constants or K <= 1/(1-beta1).
BoundCheck check_bound_on_trajectory(const BoundedTestProblem& problem, const HyperParams& hp,
                                     std::int64_t K, const DenseMatrix& w1);

struct LemmaSumCheck {
  double lhs1 = 0.0, rhs1 = 0.0;  // sum c_j^2/(eps+b_j) vs scaled log bound
  double lhs2 = 0.0, rhs2 = 0.0;  // sum a_j^2/(eps+b_j) vs log bound
  bool ok = false;
};

/// With b_k = sum_j beta2^(k-j) a_j^2 and c_k = sum_j beta1^(k-j) a_j:
///   sum c_j^2/(eps+b_j) <= (log(1+b_k/eps) - k log beta2) / ((1-beta1)(1-beta1/beta2))
///   sum a_j^2/(eps+b_j) <= log(1+b_k/eps) - k log beta2
LemmaSumCheck lemma_sum_check(std::span<const double> a, double beta1, double beta2, double eps);

struct GeometricLemmaCheck {
  double sum1 = 0.0, bound1 = 0.0;  // sum beta^j sqrt(j+1) <= 2/(1-beta)^{3/2}
  double sum2 = 0.0, bound2 = 0.0;  // sum beta^j sqrt(j)(j+1) <= 4 beta/(1-beta)^{5/2}
  bool ok = false;
};

/// Partial sums over j = 0..k-1; beta in (0, 1), k >= 1.
GeometricLemmaCheck geometric_lemma_check(double beta, std::int64_t k);

struct BoundGridPoint {
  double beta1, beta2, alpha;
  std::int64_t K;
};

/// {0, 0.5, 0.9} x {0.99, 0.999} x {1e-3, 1e-2} x {1e3, 1e4}.
std::vector<BoundGridPoint> bound_check_grid();

struct LemmaSweep {
  std::size_t checked = 0;
  std::size_t violations = 0;
};

/// `sequences` random sequences of length 1..200 with elements in [-10, 10];
/// beta1 in [0, 0.99), beta2 in (beta1, 0.9999), eps log-uniform in [1e-8, 1].
LemmaSweep random_lemma_sweep(std::size_t sequences, std::uint64_t seed);

/// beta in {0.10, 0.11, ..., 0.99} x k in {1, ..., k_max}.
LemmaSweep geometric_lemma_sweep(std::int64_t k_max = 1000);

}  // namespace lehi
