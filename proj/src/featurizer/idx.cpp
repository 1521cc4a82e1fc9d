#include "featurizer/idx.hpp"

#include <zlib.h>

#include <algorithm>
#include <stdexcept>

#include "common/bytes.hpp"

namespace eham {

void GrayImage::transpose() {
  std::vector<std::uint8_t> out(pixels.size());
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      out[std::size_t{x} * height + y] = pixels[std::size_t{y} * width + x];
    }
  }
  pixels = std::move(out);
  std::swap(width, height);
}

void LabeledSet::validate() const {
  if (images.size() != labels.size()) {
    throw std::invalid_argument("image and label counts differ");
  }
  for (auto l : labels) {
    if (l >= class_names.size()) {
      throw std::invalid_argument("label " + std::to_string(l) +
                                  " has no class name");
    }
  }
}

std::vector<std::string> mnist_class_names() {
  std::vector<std::string> names;
  for (char c = '0'; c <= '9'; ++c) names.emplace_back(1, c);
  return names;
}

std::vector<std::string> emnist_balanced_class_names() {
  static constexpr std::string_view kSymbols =
      "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabdefghnqrt";
  std::vector<std::string> names;
  for (char c : kSymbols) names.emplace_back(1, c);
  return names;
}

std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0x1f || bytes[1] != 0x8b) return bytes;

  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw std::runtime_error("zlib initialisation failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  zs.next_in = bytes.data();
  zs.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      const auto at = zs.total_in;
      inflateEnd(&zs);
      throw ParseError("corrupt gzip stream", at);
    }
    out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      const auto at = zs.total_in;
      inflateEnd(&zs);
      throw ParseError("truncated gzip stream", at);
    }
  }
  inflateEnd(&zs);
  return out;
}

namespace {

void expect_magic(ByteReader& r, std::uint32_t magic) {
  const auto at = r.offset();
  const auto got = r.u32();
  if (got != magic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad IDX magic 0x%08x (expected 0x%08x)",
                  got, magic);
    throw ParseError(buf, at);
  }
}

}  // namespace

std::vector<GrayImage> parse_idx_images(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  expect_magic(r, kIdxImagesMagic);
  const auto count = r.u32();
  const auto rows = r.u32();
  const auto cols = r.u32();
  const std::size_t image_bytes = std::size_t{rows} * cols;
  if (image_bytes != 0 && r.remaining() / image_bytes < count) {
    throw ParseError("truncated image data for " + std::to_string(count) +
                         " images",
                     r.offset());
  }
  std::vector<GrayImage> images(count);
  for (auto& img : images) {
    img.width = cols;
    img.height = rows;
    auto px = r.raw(image_bytes);
    img.pixels.assign(px.begin(), px.end());
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
  return images;
}

std::vector<std::uint16_t> parse_idx_labels(
    std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  expect_magic(r, kIdxLabelsMagic);
  const auto count = r.u32();
  if (r.remaining() < count) {
    throw ParseError("truncated label data for " + std::to_string(count) +
                         " labels",
                     r.offset());
  }
  auto raw = r.raw(count);
  if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
  return {raw.begin(), raw.end()};
}

std::vector<std::uint8_t> encode_idx_images(std::span<const GrayImage> images) {
  ByteWriter w;
  w.u32(kIdxImagesMagic);
  w.u32(static_cast<std::uint32_t>(images.size()));
  const std::uint32_t rows = images.empty() ? 0 : images[0].height;
  const std::uint32_t cols = images.empty() ? 0 : images[0].width;
  w.u32(rows);
  w.u32(cols);
  for (const auto& img : images) {
    if (img.width != cols || img.height != rows) {
      throw std::invalid_argument("IDX images must share dimensions");
    }
    w.raw(img.pixels);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_idx_labels(
    std::span<const std::uint16_t> labels) {
  ByteWriter w;
  w.u32(kIdxLabelsMagic);
  w.u32(static_cast<std::uint32_t>(labels.size()));
  for (auto l : labels) {
    if (l > 255) throw std::invalid_argument("IDX labels are single bytes");
    w.u8(static_cast<std::uint8_t>(l));
  }
  return w.take();
}

LabeledSet load_idx(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path, bool transpose) {
  LabeledSet set;
  set.images = parse_idx_images(maybe_gunzip(read_file(images_path)));
  set.labels = parse_idx_labels(maybe_gunzip(read_file(labels_path)));
  if (set.images.size() != set.labels.size()) {
    throw ParseError("label count " + std::to_string(set.labels.size()) +
                         " does not match image count " +
                         std::to_string(set.images.size()),
                     4);
  }
  if (transpose) {
    for (auto& img : set.images) img.transpose();
  }
  const auto max_label =
      set.labels.empty()
          ? 0
          : *std::max_element(set.labels.begin(), set.labels.end());
  if (max_label < 10) {
    set.class_names = mnist_class_names();
  } else if (max_label < 47) {
    set.class_names = emnist_balanced_class_names();
  } else {
    for (int c = 0; c <= max_label; ++c) {
      set.class_names.push_back(std::to_string(c));
    }
  }
  return set;
}

}  // namespace eham
