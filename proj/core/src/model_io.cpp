#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "lehi/network.hpp"

namespace lehi {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'E', 'H', 'I', 'M', 'L', 'P', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw std::runtime_error("load_model: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void save_model(const MlpModel& model, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.layers().size()));
  for (const auto& l : model.layers()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.in()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.out()));
    put_le<std::uint8_t>(out, l.activation == Activation::relu ? 1 : 0);
  }
  for (const auto& l : model.layers()) {
    for (double w : l.weights.data()) put_le<double>(out, w);
    for (double b : l.biases.data()) put_le<double>(out, b);
  }
  if (!out) throw std::runtime_error("save_model: write failed");
}

MlpModel load_model(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error("load_model: bad magic");
  }
  const auto count = get_le<std::uint32_t>(in);
  struct Header {
    std::uint32_t in, out;
    std::uint8_t act;
  };
  std::vector<Header> headers(count);
  for (auto& h : headers) {
    h.in = get_le<std::uint32_t>(in);
    h.out = get_le<std::uint32_t>(in);
    h.act = get_le<std::uint8_t>(in);
    if (h.act > 1) throw std::runtime_error("load_model: unknown activation tag");
  }
  std::vector<Layer> layers;
  for (const auto& h : headers) {
    Layer l;
    l.weights = DenseMatrix(h.out, h.in);
    for (double& w : l.weights.data()) w = get_le<double>(in);
    l.biases = DenseMatrix(h.out, 1);
    for (double& b : l.biases.data()) b = get_le<double>(in);
    l.activation = h.act == 1 ? Activation::relu : Activation::identity;
    layers.push_back(std::move(l));
  }
  return MlpModel(std::move(layers));
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  save_model(model, out);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  return load_model(in);
}

}  // namespace lehi
