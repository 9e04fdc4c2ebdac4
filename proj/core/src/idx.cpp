#include <fstream>
#include <iterator>
#include <vector>

#include "lehi/data.hpp"

namespace lehi {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("idx: cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off) {
  if (off + 4 > b.size()) throw DataError("idx: truncated header");
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

}  // namespace

DenseMatrix load_idx_images(const std::string& path) {
  const auto bytes = read_all(path);
  if (be32(bytes, 0) != kImageMagic) throw DataError("idx: " + path + " is not an image file");
  const std::size_t count = be32(bytes, 4);
  const std::size_t rows = be32(bytes, 8);
  const std::size_t cols = be32(bytes, 12);
  const std::size_t pixels = rows * cols;
  if (bytes.size() != 16 + count * pixels) throw DataError("idx: " + path + " has the wrong length");
  DenseMatrix out(pixels, count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < pixels; ++i) out(i, j) = bytes[16 + j * pixels + i] / 255.0;
  return out;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  const auto bytes = read_all(path);
  if (be32(bytes, 0) != kLabelMagic) throw DataError("idx: " + path + " is not a label file");
  const std::size_t count = be32(bytes, 4);
  if (bytes.size() != 8 + count) throw DataError("idx: " + path + " has the wrong length");
  return {bytes.begin() + 8, bytes.end()};
}

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         std::size_t class_count) {
  Dataset ds;
  ds.task = Task::classification;
  ds.class_count = class_count;
  ds.features = load_idx_images(images_path);
  const auto labels = load_idx_labels(labels_path);
  if (labels.size() != ds.features.cols()) throw DataError("idx: image and label counts differ");
  ds.targets = DenseMatrix(class_count, labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] >= class_count) throw DataError("idx: label out of range", j + 1, 0);
    ds.targets(labels[j], j) = 1.0;
  }
  const auto img = read_all(images_path);
  const auto lab = read_all(labels_path);
  ds.fingerprint = fnv1a64(lab, fnv1a64(img));
  return ds;
}

}  // namespace lehi
