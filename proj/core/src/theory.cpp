#include "lehi/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lehi/rng.hpp"

namespace lehi {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Slack for rounding in the lemma comparisons; the inequalities are exact
// in real arithmetic.
constexpr double kRelativeSlack = 1e-12;

bool leq(double lhs, double rhs) { return lhs <= rhs + kRelativeSlack * std::fabs(rhs); }

}  // namespace

std::vector<double> rk_distribution(double beta1, std::int64_t K) {
  if (K < 1) throw std::invalid_argument("rk_distribution: K must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("rk_distribution: beta1 in [0,1)");
  std::vector<double> p(static_cast<std::size_t>(K));
  // 1 - beta1^n evaluated as -expm1(n log beta1): accurate for beta1 near 1
  // and exactly 1 once beta1^n underflows.
  const double log_b = beta1 > 0.0 ? std::log(beta1) : -INFINITY;
  CompensatedSum total;
  for (std::int64_t k = 1; k <= K; ++k) {
    const auto n = static_cast<double>(K - k + 1);
    const double w = beta1 > 0.0 ? -std::expm1(n * log_b) : 1.0;
    p[static_cast<std::size_t>(k - 1)] = w;
    total.add(w);
  }
  const double z = total.value();
  for (double& x : p) x /= z;
  return p;
}

void BoundInputs::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw PreconditionError("bound: beta1 must lie in [0, 1)");
  if (!(beta2 > beta1 && beta2 < 1.0)) throw PreconditionError("bound: beta2 must lie in (beta1, 1)");
  if (!(static_cast<double>(K) > 1.0 / (1.0 - beta1))) {
    throw PreconditionError("bound: K = " + std::to_string(K) + " must exceed 1/(1-beta1) = " +
                            std::to_string(1.0 / (1.0 - beta1)));
  }
  if (!(alpha > 0.0)) throw PreconditionError("bound: alpha must be positive");
  if (!(eps > 0.0)) throw PreconditionError("bound: eps must be positive");
  if (!(M * M > eps)) throw PreconditionError("bound: M^2 must exceed eps");
  if (!(L > 0.0)) throw PreconditionError("bound: L must be positive");
  if (!(d >= 1.0)) throw PreconditionError("bound: dimension must be >= 1");
  if (!(f1 >= finf)) throw PreconditionError("bound: f(w1) must be >= finf");
}

BoundTerms theorem_bound_terms(const BoundInputs& in) {
  in.validate();
  const double b1 = in.beta1, b2 = in.beta2;
  const double Kd = static_cast<double>(in.K);
  const double ratio = 1.0 - b1 / b2;

  BoundTerms t;
  t.k_tilde = Kd - b1 / (1.0 - b1);
  t.E = in.alpha * in.d * in.M * in.L * (1.0 - b1) / (ratio * (1.0 - b2)) +
        12.0 * in.d * in.M * in.M * std::sqrt(1.0 - b1) / (std::pow(ratio, 1.5) * std::sqrt(1.0 - b2)) +
        2.0 * in.alpha * in.alpha * in.d * in.L * in.L * b1 / (ratio * std::pow(1.0 - b2, 1.5));
  t.descent = 2.0 * in.M / (in.alpha * t.k_tilde) * (in.f1 - in.finf);
  t.log_factor = std::log1p(in.M * in.M / ((1.0 - b2) * in.eps)) / t.k_tilde -
                 Kd / t.k_tilde * std::log(b2);
  t.total = t.descent + t.E * t.log_factor;
  return t;
}

double theorem_bound(const BoundInputs& in) { return theorem_bound_terms(in).total; }

double LogCoshProblem::value(const DenseMatrix& w) const {
  double s = 0.0;
  for (double x : w.data()) {
    // log cosh x = |x| + log1p(e^{-2|x|}) - log 2
    const double a = std::fabs(x);
    s += a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  }
  return s;
}

DenseMatrix LogCoshProblem::gradient(const DenseMatrix& w) const {
  DenseMatrix g(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.size(); ++i) g.data()[i] = std::tanh(w.data()[i]);
  return g;
}

DenseMatrix LogCoshProblem::aux_gradient(const DenseMatrix& w) const {
  return DenseMatrix(w.rows(), w.cols(), 1.0);
}

BoundCheck check_bound_on_trajectory(const BoundedTestProblem& problem, const HyperParams& hp,
                                     std::int64_t K, const DenseMatrix& w1) {
  const auto L = problem.lipschitz();
  const auto finf = problem.lower_bound();
  const auto G = problem.seed_bound();
  if (!L || !finf || !G) {
    throw PreconditionError("bound: test problem does not certify L, finf and the seed bound");
  }
  if (w1.size() != problem.dimension()) throw ShapeError("bound: w1 has the wrong dimension");

  BoundCheck out;
  out.inputs.alpha = hp.alpha;
  out.inputs.beta1 = hp.beta1;
  out.inputs.beta2 = hp.beta2;
  out.inputs.eps = hp.eps;
  out.inputs.K = K;
  out.inputs.M = std::sqrt(*G * *G + hp.eps);
  out.inputs.L = *L;
  out.inputs.d = static_cast<double>(problem.dimension());
  out.inputs.f1 = problem.value(w1);
  out.inputs.finf = *finf;
  out.inputs.validate();

  const std::vector<double> prob = rk_distribution(hp.beta1, K);
  std::vector<DenseMatrix> w{w1};
  std::vector<DenseMatrix*> params{&w[0]};
  OptimizerState state = OptimizerState::zeros_like(OptimizerKind::lehi, std::span<const DenseMatrix>(w));

  CompensatedSum lhs;
  for (std::int64_t k = 1; k <= K; ++k) {
    std::vector<DenseMatrix> g{problem.gradient(w[0])};
    std::vector<DenseMatrix> g_aux{problem.aux_gradient(w[0])};
    double sq = 0.0;
    for (double x : g[0].data()) sq += x * x;
    lhs.add(prob[static_cast<std::size_t>(k - 1)] * sq);
    out.observed_seed_bound = std::max({out.observed_seed_bound, g[0].max_abs(), g_aux[0].max_abs()});
    lehi_step(state, hp, params, g, g_aux);
  }
  out.lhs = lhs.value();
  out.rhs = theorem_bound(out.inputs);
  out.satisfied = out.lhs <= out.rhs;
  return out;
}

LemmaSumCheck lemma_sum_check(std::span<const double> a, double beta1, double beta2, double eps) {
  if (!(beta1 < beta2) || !(eps > 0.0)) {
    throw std::invalid_argument("lemma_sum_check: need beta1 < beta2 and eps > 0");
  }
  LemmaSumCheck r;
  double b = 0.0, c = 0.0;
  CompensatedSum s1, s2;
  for (double aj : a) {
    b = beta2 * b + aj * aj;
    c = beta1 * c + aj;
    s1.add(c * c / (eps + b));
    s2.add(aj * aj / (eps + b));
  }
  const double k = static_cast<double>(a.size());
  const double log_term = std::log1p(b / eps) - k * std::log(beta2);
  r.lhs1 = s1.value();
  r.rhs1 = log_term / ((1.0 - beta1) * (1.0 - beta1 / beta2));
  r.lhs2 = s2.value();
  r.rhs2 = log_term;
  r.ok = leq(r.lhs1, r.rhs1) && leq(r.lhs2, r.rhs2);
  return r;
}

GeometricLemmaCheck geometric_lemma_check(double beta, std::int64_t k) {
  if (!(beta > 0.0 && beta < 1.0) || k < 1) {
    throw std::invalid_argument("geometric_lemma_check: need beta in (0,1) and k >= 1");
  }
  GeometricLemmaCheck r;
  CompensatedSum s1, s2;
  double power = 1.0;
  for (std::int64_t j = 0; j < k; ++j) {
    const auto jd = static_cast<double>(j);
    s1.add(power * std::sqrt(jd + 1.0));
    s2.add(power * std::sqrt(jd) * (jd + 1.0));
    power *= beta;
  }
  r.sum1 = s1.value();
  r.sum2 = s2.value();
  r.bound1 = 2.0 / std::pow(1.0 - beta, 1.5);
  r.bound2 = 4.0 * beta / std::pow(1.0 - beta, 2.5);
  r.ok = leq(r.sum1, r.bound1) && leq(r.sum2, r.bound2);
  return r;
}

std::vector<BoundGridPoint> bound_check_grid() {
  std::vector<BoundGridPoint> out;
  for (double b1 : {0.0, 0.5, 0.9})
    for (double b2 : {0.99, 0.999})
      for (double a : {1e-3, 1e-2})
        for (std::int64_t K : {1000, 10000}) out.push_back({b1, b2, a, K});
  return out;
}

LemmaSweep random_lemma_sweep(std::size_t sequences, std::uint64_t seed) {
  SeededRng rng(seed);
  LemmaSweep r;
  std::vector<double> a;
  for (std::size_t i = 0; i < sequences; ++i) {
    a.resize(1 + rng.below(200));
    for (double& x : a) x = rng.uniform(-10.0, 10.0);
    const double b1 = rng.uniform(0.0, 0.99);
    const double b2 = rng.uniform(b1, 0.9999);
    const double eps = std::pow(10.0, rng.uniform(-8.0, 0.0));
    if (!(b2 > b1)) continue;
    ++r.checked;
    if (!lemma_sum_check(a, b1, b2, eps).ok) ++r.violations;
  }
  return r;
}

LemmaSweep geometric_lemma_sweep(std::int64_t k_max) {
  LemmaSweep r;
  for (int i = 10; i <= 99; ++i) {
    const double beta = i / 100.0;
    for (std::int64_t k = 1; k <= k_max; ++k) {
      ++r.checked;
      if (!geometric_lemma_check(beta, k).ok) ++r.violations;
    }
  }
  return r;
}

}  // namespace lehi

