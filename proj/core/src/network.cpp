#include "lehi/network.hpp"

#include <cmath>
#include <stdexcept>

namespace lehi {

std::string_view to_string(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity" || name == "linear") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

MlpModel::MlpModel(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("MlpModel: at least one layer required");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& layer = layers_[k];
    if (layer.biases.rows() != layer.out() || layer.biases.cols() != 1) {
      throw ShapeError("MlpModel: layer " + std::to_string(k) + " bias is " +
                       shape_string(layer.biases) + ", expected " + std::to_string(layer.out()) +
                       "x1");
    }
    if (k + 1 < layers_.size() && layer.out() != layers_[k + 1].in()) {
      throw ShapeError("MlpModel: layer " + std::to_string(k) + " output " +
                       std::to_string(layer.out()) + " does not feed layer input " +
                       std::to_string(layers_[k + 1].in()));
    }
  }
  if (layers_.back().activation != Activation::identity) {
    throw ShapeError("MlpModel: final layer activation must be identity");
  }
}

MlpModel MlpModel::initialize(const std::vector<std::size_t>& sizes, SeededRng& rng,
                              Activation hidden) {
  if (sizes.size() < 2) throw ShapeError("MlpModel::initialize: need input and output sizes");
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const bool last = k + 2 == sizes.size();
    const std::size_t fan_in = sizes[k];
    const Activation act = last ? Activation::identity : hidden;
    const double gain = act == Activation::relu ? 2.0 : 1.0;
    Layer layer;
    layer.weights = rng_normal(rng, sizes[k + 1], fan_in, std::sqrt(gain / static_cast<double>(fan_in)));
    layer.biases = DenseMatrix(sizes[k + 1], 1);
    layer.activation = act;
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

std::size_t MlpModel::input_dim() const { return layers_.front().in(); }
std::size_t MlpModel::output_dim() const { return layers_.back().out(); }

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<DenseMatrix*> MlpModel::parameters() {
  std::vector<DenseMatrix*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weights);
    out.push_back(&l.biases);
  }
  return out;
}

std::vector<const DenseMatrix*> MlpModel::parameters() const {
  std::vector<const DenseMatrix*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weights);
    out.push_back(&l.biases);
  }
  return out;
}

GradientSet GradientSet::zeros_like(const MlpModel& model) {
  GradientSet g;
  for (const auto* p : model.parameters()) g.tensors.emplace_back(p->rows(), p->cols());
  return g;
}

double GradientSet::max_abs() const noexcept {
  double best = 0.0;
  for (const auto& t : tensors) {
    const double m = t.max_abs();
    if (std::isnan(m)) return m;
    if (m > best) best = m;
  }
  return best;
}

bool GradientSet::all_finite() const noexcept {
  for (const auto& t : tensors)
    if (!t.all_finite()) return false;
  return true;
}

ForwardCache forward(const MlpModel& model, const DenseMatrix& x) {
  if (model.layers().empty()) throw ShapeError("forward: empty model");
  if (x.rows() != model.input_dim()) {
    throw ShapeError("forward: input has " + std::to_string(x.rows()) + " rows, model expects " +
                     std::to_string(model.input_dim()));
  }
  ForwardCache cache;
  cache.inputs.reserve(model.layers().size());
  cache.pre_activations.reserve(model.layers().size());
  DenseMatrix a = x;
  for (const Layer& layer : model.layers()) {
    DenseMatrix z = matmul(layer.weights, a);
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const double b = layer.biases(r, 0);
      for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) += b;
    }
    cache.inputs.push_back(std::move(a));
    a = layer.activation == Activation::relu ? elementwise(ElementOp::relu, z) : z;
    cache.pre_activations.push_back(std::move(z));
  }
  cache.outputs = std::move(a);
  return cache;
}

namespace {

void check_cache(const MlpModel& model, const ForwardCache& cache, const DenseMatrix& seed) {
  const auto& layers = model.layers();
  if (cache.inputs.size() != layers.size() || cache.pre_activations.size() != layers.size()) {
    throw ShapeError("backward: cache has " + std::to_string(cache.inputs.size()) +
                     " layers, model has " + std::to_string(layers.size()));
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (cache.inputs[k].rows() != layers[k].in() ||
        cache.pre_activations[k].rows() != layers[k].out() ||
        cache.inputs[k].cols() != cache.batch()) {
      throw ShapeError("backward: cache does not match model at layer " + std::to_string(k));
    }
  }
  if (!seed.same_shape(cache.outputs)) {
    throw ShapeError("backward: seed " + shape_string(seed) + " vs outputs " +
                     shape_string(cache.outputs));
  }
}

GradientSet backward_unchecked(const MlpModel& model, const ForwardCache& cache,
                               const DenseMatrix& seed) {
  const auto& layers = model.layers();
  const double inv_batch = cache.batch() == 0 ? 0.0 : 1.0 / static_cast<double>(cache.batch());
  GradientSet grads;
  grads.tensors.resize(2 * layers.size());

  DenseMatrix delta = seed;
  for (std::size_t k = layers.size(); k-- > 0;) {
    DenseMatrix dw = matmul_nt(delta, cache.inputs[k]);
    for (double& v : dw.data()) v *= inv_batch;
    DenseMatrix db(delta.rows(), 1);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      double s = 0.0;
      for (double v : delta.row(r)) s += v;
      db(r, 0) = s * inv_batch;
    }
    grads.tensors[2 * k] = std::move(dw);
    grads.tensors[2 * k + 1] = std::move(db);
    if (k == 0) break;
    DenseMatrix upstream = matmul_tn(layers[k].weights, delta);
    delta = layers[k - 1].activation == Activation::relu
                ? elementwise(ElementOp::relu_grad, upstream, cache.pre_activations[k - 1])
                : std::move(upstream);
  }
  return grads;
}

}  // namespace

GradientSet backward_seeded(const MlpModel& model, const ForwardCache& cache,
                            const DenseMatrix& seed) {
  check_cache(model, cache, seed);
  return backward_unchecked(model, cache, seed);
}

std::pair<GradientSet, GradientSet> dual_backward(const MlpModel& model, const ForwardCache& cache,
                                                  const DenseMatrix& seed_primary,
                                                  const DenseMatrix& seed_aux) {
  check_cache(model, cache, seed_primary);
  check_cache(model, cache, seed_aux);
  return {backward_unchecked(model, cache, seed_primary),
          backward_unchecked(model, cache, seed_aux)};
}

}  // namespace lehi
