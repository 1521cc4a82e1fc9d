#ifndef EHAM_FEATURIZER_FEATURIZE_HPP
#define EHAM_FEATURIZER_FEATURIZE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "featurizer/idx.hpp"
#include "memory/quantized_fn.hpp"

namespace eham {

inline constexpr std::uint32_t kFeatureArgs = 64;
inline constexpr std::uint32_t kFeatureLevels = 16;
inline constexpr std::uint32_t kImageSide = 28;

// 28x28 image -> 64-argument, 16-level function: zero-pad to 32x32, then
// each 4x4 block's mean pixel is quantized as floor(mean / 16).
QuantizedFn featurize(const GrayImage& img);

// Inverse view for eyeballing: 8x8 level grid blown up to a binary PGM with
// `scale` pixels per block and levels multiplied by 17.
std::vector<std::uint8_t> render_pgm(const QuantizedFn& f,
                                     std::uint32_t scale = 4);

struct LabeledFn {
  std::uint16_t label;
  QuantizedFn fn;
};

// "EHFN" | u32 count | u32 n_args | u32 n_levels |
//   count x (u16 label, n_args x u8 value); big-endian, unit weights.
std::vector<std::uint8_t> encode_fn_corpus(std::span<const LabeledFn> records);
std::vector<LabeledFn> decode_fn_corpus(std::span<const std::uint8_t> bytes);
void save_fn_corpus(std::span<const LabeledFn> records,
                    const std::filesystem::path& path);
std::vector<LabeledFn> load_fn_corpus(const std::filesystem::path& path);

class CentroidModel {
 public:
  CentroidModel() = default;
  CentroidModel(std::vector<std::uint16_t> classes,
                std::vector<std::vector<double>> centroids);

  std::size_t class_count() const { return classes_.size(); }
  std::span<const std::uint16_t> classes() const { return classes_; }
  std::span<const double> centroid(std::size_t idx) const {
    return centroids_.at(idx);
  }

  // Nearest centroid by Euclidean distance; ties go to the lowest class id.
  std::uint16_t classify(const QuantizedFn& f) const;

 private:
  std::vector<std::uint16_t> classes_;  // ascending
  std::vector<std::vector<double>> centroids_;
};

// Per-class mean of the value vectors. Every class in `required` must have
// at least one sample.
CentroidModel fit_centroids(std::span<const LabeledFn> train,
                            std::span<const std::uint16_t> required = {});

}  // namespace eham

#endif  // EHAM_FEATURIZER_FEATURIZE_HPP
