#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lehi/numcore.hpp"
#include "lehi/rng.hpp"

namespace lehi {

enum class Activation { identity, relu };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct Layer {
  DenseMatrix weights;  // out x in
  DenseMatrix biases;   // out x 1
  Activation activation = Activation::identity;

  std::size_t in() const noexcept { return weights.cols(); }
  std::size_t out() const noexcept { return weights.rows(); }
  bool operator==(const Layer&) const = default;
};

/// Fully connected network p(w, x). Hidden layers may be ReLU; the final
/// layer is always identity so losses consume raw logits.
class MlpModel {
 public:
  MlpModel() = default;
  /// Validates layer chaining and the identity output layer; throws ShapeError.
  explicit MlpModel(std::vector<Layer> layers);

  /// Gaussian init: stddev sqrt(2/fan_in) for ReLU layers, sqrt(1/fan_in)
  /// for the output layer; biases start at zero. `sizes` lists every layer
  /// width including input and output, e.g. {9, 100, 1}.
  static MlpModel initialize(const std::vector<std::size_t>& sizes, SeededRng& rng,
                             Activation hidden = Activation::relu);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t parameter_count() const;

  /// Parameters flattened as [W0, b0, W1, b1, ...], the same order GradientSet uses.
  std::vector<DenseMatrix*> parameters();
  std::vector<const DenseMatrix*> parameters() const;

  bool operator==(const MlpModel&) const = default;

 private:
  std::vector<Layer> layers_;
};

struct ForwardCache {
  std::vector<DenseMatrix> inputs;          // input to each layer, in x batch
  std::vector<DenseMatrix> pre_activations; // out x batch
  DenseMatrix outputs;                      // q x batch, equals the last pre-activation

  std::size_t batch() const noexcept { return outputs.cols(); }
};

/// Per-layer gradients, stored as [dW0, db0, dW1, db1, ...].
struct GradientSet {
  std::vector<DenseMatrix> tensors;

  static GradientSet zeros_like(const MlpModel& model);
  const DenseMatrix& weight(std::size_t layer) const { return tensors[2 * layer]; }
  const DenseMatrix& bias(std::size_t layer) const { return tensors[2 * layer + 1]; }
  /// Largest |element| across all tensors (NaN propagates).
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  bool operator==(const GradientSet&) const = default;
};

ForwardCache forward(const MlpModel& model, const DenseMatrix& x);

/// Batch-averaged vector-Jacobian product (1/B) sum_j grad_w p(w, x_j) seed_j.
/// With seed = grad_p loss this is the ordinary loss gradient.
GradientSet backward_seeded(const MlpModel& model, const ForwardCache& cache,
                            const DenseMatrix& seed);

/// Two backward passes sharing one forward cache. Each half is bit-identical
/// to the corresponding standalone backward_seeded call.
std::pair<GradientSet, GradientSet> dual_backward(const MlpModel& model, const ForwardCache& cache,
                                                  const DenseMatrix& seed_primary,
                                                  const DenseMatrix& seed_aux);

// Binary model format, all integers and doubles little-endian:
//   bytes 0..7   magic "LEHIMLP1"
//   u32          layer count L
//   per layer    u32 in, u32 out, u8 activation (0 identity, 1 relu)
//   per layer    out*in f64 weights (row-major), then out f64 biases
void save_model(const MlpModel& model, std::ostream& out);
MlpModel load_model(std::istream& in);
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace lehi
