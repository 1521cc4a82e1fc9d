#include "featurizer/featurize.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "common/bytes.hpp"

namespace eham {

namespace {
constexpr std::uint32_t kPad = 2;
constexpr std::uint32_t kBlock = 4;
constexpr std::uint32_t kGrid = 8;
}  // namespace

QuantizedFn featurize(const GrayImage& img) {
  if (img.width != kImageSide || img.height != kImageSide ||
      img.pixels.size() != std::size_t{kImageSide} * kImageSide) {
    throw std::invalid_argument("featurize expects a 28x28 image, got " +
                                std::to_string(img.width) + "x" +
                                std::to_string(img.height));
  }
  std::vector<std::uint16_t> values(kFeatureArgs);
  for (std::uint32_t by = 0; by < kGrid; ++by) {
    for (std::uint32_t bx = 0; bx < kGrid; ++bx) {
      std::uint32_t sum = 0;
      for (std::uint32_t dy = 0; dy < kBlock; ++dy) {
        for (std::uint32_t dx = 0; dx < kBlock; ++dx) {
          // coordinates in the padded 32x32 frame
          const int x = static_cast<int>(bx * kBlock + dx) - kPad;
          const int y = static_cast<int>(by * kBlock + dy) - kPad;
          if (x < 0 || y < 0 || x >= static_cast<int>(kImageSide) ||
              y >= static_cast<int>(kImageSide)) {
            continue;
          }
          sum += img.at(static_cast<std::uint32_t>(x),
                        static_cast<std::uint32_t>(y));
        }
      }
      // floor((sum / 16) / 16)
      values[by * kGrid + bx] =
          static_cast<std::uint16_t>(std::min<std::uint32_t>(sum / 256, 15));
    }
  }
  return QuantizedFn(std::move(values), kFeatureLevels);
}

std::vector<std::uint8_t> render_pgm(const QuantizedFn& f,
                                     std::uint32_t scale) {
  if (f.n_args() != kFeatureArgs) {
    throw std::invalid_argument("render_pgm expects 64 arguments");
  }
  if (scale == 0) throw std::invalid_argument("scale must be positive");
  const std::uint32_t side = kGrid * scale;
  const std::string header =
      "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      const auto v = f.value((y / scale) * kGrid + x / scale);
      out.push_back(static_cast<std::uint8_t>(std::min(255, v * 17)));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_fn_corpus(std::span<const LabeledFn> records) {
  ByteWriter w;
  w.tag("EHFN");
  w.u32(static_cast<std::uint32_t>(records.size()));
  const std::uint32_t n_args =
      records.empty() ? kFeatureArgs
                      : static_cast<std::uint32_t>(records[0].fn.n_args());
  const std::uint32_t n_levels =
      records.empty() ? kFeatureLevels : records[0].fn.n_levels();
  if (n_levels > 256) {
    throw std::invalid_argument("EHFN stores values as single bytes");
  }
  w.u32(n_args);
  w.u32(n_levels);
  for (const auto& rec : records) {
    if (rec.fn.n_args() != n_args || rec.fn.n_levels() != n_levels) {
      throw std::invalid_argument("EHFN records must share dimensions");
    }
    w.u16(rec.label);
    for (auto v : rec.fn.values()) w.u8(static_cast<std::uint8_t>(v));
  }
  return w.take();
}

std::vector<LabeledFn> decode_fn_corpus(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_tag("EHFN");
  const auto count = r.u32();
  const auto n_args = r.u32();
  const auto levels_at = r.offset();
  const auto n_levels = r.u32();
  if (n_levels == 0 || n_levels > 256) {
    throw ParseError("invalid level count " + std::to_string(n_levels),
                     levels_at);
  }
  if (r.remaining() / (std::size_t{n_args} + 2) < count) {
    throw ParseError("truncated record table", r.offset());
  }
  std::vector<LabeledFn> out;
  out.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    const auto label = r.u16();
    const auto at = r.offset();
    auto raw = r.raw(n_args);
    std::vector<std::uint16_t> values(raw.begin(), raw.end());
    for (std::size_t a = 0; a < values.size(); ++a) {
      if (values[a] >= n_levels) {
        throw ParseError("value out of range", at + a);
      }
    }
    out.push_back({label, QuantizedFn(std::move(values), n_levels)});
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
  return out;
}

void save_fn_corpus(std::span<const LabeledFn> records,
                    const std::filesystem::path& path) {
  write_file(path, encode_fn_corpus(records));
}

std::vector<LabeledFn> load_fn_corpus(const std::filesystem::path& path) {
  return decode_fn_corpus(read_file(path));
}

CentroidModel::CentroidModel(std::vector<std::uint16_t> classes,
                             std::vector<std::vector<double>> centroids)
    : classes_(std::move(classes)), centroids_(std::move(centroids)) {
  if (classes_.size() != centroids_.size() || classes_.empty()) {
    throw std::invalid_argument("one centroid per class required");
  }
  if (!std::is_sorted(classes_.begin(), classes_.end()) ||
      std::adjacent_find(classes_.begin(), classes_.end()) != classes_.end()) {
    throw std::invalid_argument("classes must be strictly ascending");
  }
  for (const auto& c : centroids_) {
    if (c.size() != centroids_[0].size()) {
      throw std::invalid_argument("centroid lengths differ");
    }
  }
}

std::uint16_t CentroidModel::classify(const QuantizedFn& f) const {
  if (classes_.empty()) throw std::logic_error("classify on an empty model");
  if (f.n_args() != centroids_[0].size()) {
    throw std::invalid_argument("function length does not match centroids");
  }
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t c = 0; c < centroids_.size(); ++c) {
    double d = 0.0;
    for (std::size_t a = 0; a < f.n_args(); ++a) {
      const double diff = f.value(a) - centroids_[c][a];
      d += diff * diff;
    }
    if (c == 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return classes_[best];
}

CentroidModel fit_centroids(std::span<const LabeledFn> train,
                            std::span<const std::uint16_t> required) {
  if (train.empty()) throw std::invalid_argument("no training samples");
  const auto n_args = train[0].fn.n_args();
  // integer sums make the result independent of sample order
  std::map<std::uint16_t, std::pair<std::vector<std::uint64_t>, std::size_t>>
      acc;
  for (const auto& s : train) {
    if (s.fn.n_args() != n_args) {
      throw std::invalid_argument("training samples differ in length");
    }
    auto& [sum, count] = acc[s.label];
    sum.resize(n_args, 0);
    for (std::size_t a = 0; a < n_args; ++a) sum[a] += s.fn.value(a);
    ++count;
  }
  for (auto c : required) {
    if (!acc.contains(c)) {
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no training samples");
    }
  }
  std::vector<std::uint16_t> classes;
  std::vector<std::vector<double>> centroids;
  for (const auto& [label, entry] : acc) {
    const auto& [sum, count] = entry;
    std::vector<double> mean(n_args);
    for (std::size_t a = 0; a < n_args; ++a) {
      mean[a] = static_cast<double>(sum[a]) / static_cast<double>(count);
    }
    classes.push_back(label);
    centroids.push_back(std::move(mean));
  }
  return CentroidModel(std::move(classes), std::move(centroids));
}

}  // namespace eham
