#include "experiments/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "common/bytes.hpp"
#include "common/rng.hpp"
#include "experiments/hemnist.hpp"

namespace eham {

namespace {

struct Pt {
  double x;
  double y;
};
using Stroke = std::vector<Pt>;
using Glyph = std::vector<Stroke>;

// Elliptic arc in unit-box coordinates (y grows downward), angles in degrees.
Stroke arc(double cx, double cy, double rx, double ry, double a0, double a1) {
  const int segs = std::max(4, static_cast<int>(std::abs(a1 - a0) / 15.0));
  Stroke s;
  for (int k = 0; k <= segs; ++k) {
    const double a = (a0 + (a1 - a0) * k / segs) * std::numbers::pi / 180.0;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

Stroke join(Stroke a, const Stroke& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Glyph digit_glyph(int d) {
  switch (d) {
    case 0: return {arc(0.5, 0.5, 0.3, 0.45, 0, 360)};
    case 1: return {{{0.33, 0.2}, {0.52, 0.05}, {0.52, 0.95}}};
    case 2:
      return {join(arc(0.5, 0.3, 0.3, 0.25, -170, 20),
                   Stroke{{0.18, 0.95}, {0.85, 0.95}})};
    case 3:
      return {join(arc(0.48, 0.28, 0.26, 0.23, -160, 90),
                   arc(0.48, 0.73, 0.3, 0.23, -90, 160))};
    case 4: return {{{0.65, 0.95}, {0.65, 0.05}, {0.12, 0.66}, {0.88, 0.66}}};
    case 5:
      return {join(Stroke{{0.8, 0.05}, {0.3, 0.05}, {0.25, 0.45}},
                   arc(0.48, 0.68, 0.3, 0.27, -140, 150))};
    case 6:
      return {Stroke{{0.72, 0.05}, {0.45, 0.16}, {0.28, 0.38}, {0.23, 0.68}},
              arc(0.5, 0.7, 0.27, 0.25, 0, 360)};
    case 7: return {{{0.15, 0.05}, {0.85, 0.05}, {0.42, 0.95}}};
    case 8:
      return {arc(0.5, 0.27, 0.22, 0.22, 0, 360),
              arc(0.5, 0.72, 0.27, 0.23, 0, 360)};
    default:
      return {arc(0.5, 0.3, 0.27, 0.25, 0, 360),
              Stroke{{0.77, 0.3}, {0.68, 0.95}}};
  }
}

Glyph letter_glyph(char c) {
  switch (c) {
    case 'T': return {{{0.1, 0.05}, {0.9, 0.05}}, {{0.5, 0.05}, {0.5, 0.95}}};
    case 'O': return {arc(0.5, 0.5, 0.4, 0.45, 0, 360)};
    case 'P':
      return {{{0.2, 0.95}, {0.2, 0.05}},
              join(join(Stroke{{0.2, 0.05}, {0.45, 0.05}},
                        arc(0.45, 0.28, 0.33, 0.23, -90, 90)),
                   Stroke{{0.2, 0.51}})};
    case 'B':
      return {{{0.2, 0.95}, {0.2, 0.05}},
              join(join(Stroke{{0.2, 0.05}, {0.45, 0.05}},
                        arc(0.45, 0.27, 0.3, 0.22, -90, 90)),
                   Stroke{{0.2, 0.49}}),
              join(join(Stroke{{0.2, 0.49}, {0.47, 0.49}},
                        arc(0.47, 0.72, 0.35, 0.23, -90, 90)),
                   Stroke{{0.2, 0.95}})};
    case 'W':
      return {{{0.05, 0.05}, {0.27, 0.95}, {0.5, 0.35}, {0.73, 0.95},
               {0.95, 0.05}}};
    case 'Z':
      return {{{0.15, 0.05}, {0.85, 0.05}, {0.15, 0.95}, {0.85, 0.95}}};
    case 'M':
      return {{{0.1, 0.95}, {0.1, 0.05}, {0.5, 0.6}, {0.9, 0.05},
               {0.9, 0.95}}};
    case 'A':
      return {{{0.1, 0.95}, {0.5, 0.05}, {0.9, 0.95}},
              {{0.27, 0.6}, {0.73, 0.6}}};
    case 'L': return {{{0.25, 0.05}, {0.25, 0.95}, {0.85, 0.95}}};
    default:  // 'S'
      return {{{0.8, 0.15},
               {0.6, 0.05},
               {0.35, 0.05},
               {0.2, 0.2},
               {0.3, 0.4},
               {0.7, 0.6},
               {0.8, 0.8},
               {0.65, 0.95},
               {0.35, 0.95},
               {0.18, 0.85}}};
  }
}

double seg_distance(Pt p, Pt a, Pt b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 == 0.0 ? 0.0 : ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx);
  const double dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

double sym(Rng& rng, double amp) { return (2.0 * rng.uniform() - 1.0) * amp; }

GrayImage render(const Glyph& glyph, Rng& rng, double k) {
  constexpr double kBox = 20.0;
  constexpr double kPi = std::numbers::pi;
  const double theta = sym(rng, 12.0 * k) * kPi / 180.0;
  const double sx = 1.0 + sym(rng, 0.12 * k) - 0.03 * k;
  const double sy = 1.0 + sym(rng, 0.08 * k) - 0.02 * k;
  const double shear = sym(rng, 0.25 * k);
  const double tx = sym(rng, 1.5 * k);
  const double ty = sym(rng, 1.5 * k);
  const double thick = 2.4 + sym(rng, 0.8 * std::min(k, 1.0));
  const double ink = 0.85 + 0.15 * rng.uniform();
  // low-frequency displacement field
  const double amp = 0.05 * k;
  const double fx = 1.0 + rng.uniform(), fy = 1.0 + rng.uniform();
  const double px = rng.uniform() * 2 * kPi, py = rng.uniform() * 2 * kPi;
  const double c = std::cos(theta), s = std::sin(theta);

  auto place = [&](Pt u) {
    double x = u.x - 0.5 + sym(rng, 0.015 * k);
    double y = u.y - 0.5 + sym(rng, 0.015 * k);
    x += amp * std::sin(2 * kPi * fy * y + px);
    y += amp * std::sin(2 * kPi * fx * x + py);
    x += shear * y;
    x *= sx;
    y *= sy;
    const double rx = c * x - s * y;
    const double ry = s * x + c * y;
    return Pt{14.0 + tx + kBox * rx, 14.0 + ty + kBox * ry};
  };

  std::vector<std::pair<Pt, Pt>> segs;
  for (const auto& stroke : glyph) {
    Pt prev = place(stroke.front());
    if (stroke.size() == 1) segs.push_back({prev, prev});
    for (std::size_t v = 1; v < stroke.size(); ++v) {
      const Pt cur = place(stroke[v]);
      segs.push_back({prev, cur});
      prev = cur;
    }
  }

  GrayImage img;
  img.width = kImageSide;
  img.height = kImageSide;
  img.pixels.assign(std::size_t{kImageSide} * kImageSide, 0);
  for (std::uint32_t y = 0; y < kImageSide; ++y) {
    for (std::uint32_t x = 0; x < kImageSide; ++x) {
      const Pt p{x + 0.5, y + 0.5};
      double best = 1e9;
      for (const auto& [a, b] : segs) best = std::min(best, seg_distance(p, a, b));
      const double cover = std::clamp(thick / 2.0 + 0.5 - best, 0.0, 1.0);
      img.pixels[std::size_t{y} * kImageSide + x] =
          static_cast<std::uint8_t>(std::lround(255.0 * ink * cover));
    }
  }
  return img;
}

}  // namespace

LabeledSet synth_glyphs(GlyphKind kind, const SynthOptions& opts) {
  static constexpr char kLetters[] = "TOPBWZMALS";
  LabeledSet set;
  set.class_names = kind == GlyphKind::Digits ? mnist_class_names()
                                              : emnist_balanced_class_names();
  const ClassMap map;
  Rng rng(derive_seed(opts.seed, {kind == GlyphKind::Digits ? 1u : 2u}));
  // interleave classes so every prefix stays balanced
  for (std::size_t s = 0; s < opts.per_class; ++s) {
    for (int c = 0; c < 10; ++c) {
      const Glyph g = kind == GlyphKind::Digits ? digit_glyph(c)
                                                : letter_glyph(kLetters[c]);
      set.images.push_back(render(g, rng, opts.distortion));
      set.labels.push_back(kind == GlyphKind::Digits
                               ? static_cast<std::uint16_t>(c)
                               : map.letter(static_cast<std::uint16_t>(c)));
    }
  }
  return set;
}

void write_synth_idx(GlyphKind kind, const SynthOptions& opts,
                     const std::filesystem::path& dir,
                     const std::string& prefix) {
  auto set = synth_glyphs(kind, opts);
  if (kind == GlyphKind::Letters) {
    for (auto& img : set.images) img.transpose();
  }
  std::filesystem::create_directories(dir);
  write_file(dir / (prefix + "-images-idx3-ubyte"),
             encode_idx_images(set.images));
  write_file(dir / (prefix + "-labels-idx1-ubyte"),
             encode_idx_labels(set.labels));
}

}  // namespace eham
