#ifndef EHAM_FEATURIZER_IDX_HPP
#define EHAM_FEATURIZER_IDX_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eham {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return pixels[std::size_t{y} * width + x];
  }
  void transpose();

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct LabeledSet {
  std::vector<GrayImage> images;
  std::vector<std::uint16_t> labels;
  // label -> symbol
  std::vector<std::string> class_names;

  std::size_t size() const { return images.size(); }
  void validate() const;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Symbol tables for the two stock corpora.
std::vector<std::string> mnist_class_names();
std::vector<std::string> emnist_balanced_class_names();

// Gunzips when the buffer starts with 0x1f 0x8b, otherwise returns it as-is.
std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes);

std::vector<GrayImage> parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint16_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_idx_images(std::span<const GrayImage> images);
std::vector<std::uint8_t> encode_idx_labels(
    std::span<const std::uint16_t> labels);

// Loads an image/label file pair. `transpose` flips each image about its
// diagonal (EMNIST files are stored column-major).
LabeledSet load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path, bool transpose);

}  // namespace eham

#endif  // EHAM_FEATURIZER_IDX_HPP
