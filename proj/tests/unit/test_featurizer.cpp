#include <zlib.h>

#include <cstdlib>
#include <filesystem>

#include "common/bytes.hpp"
#include "common/rng.hpp"
#include "doctest.h"
#include "experiments/synth.hpp"
#include "featurizer/featurize.hpp"
#include "featurizer/idx.hpp"

using namespace eham;
namespace fs = std::filesystem;

namespace {

GrayImage random_image(Rng& rng, std::uint32_t w = 28, std::uint32_t h = 28) {
  GrayImage img{w, h, std::vector<std::uint8_t>(std::size_t{w} * h)};
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

// Block value from an explicit walk over the padded 32x32 canvas.
std::vector<int> block_oracle(const GrayImage& img) {
  std::vector<int> out;
  for (int by = 0; by < 8; ++by) {
    for (int bx = 0; bx < 8; ++bx) {
      long sum = 0;
      for (int y = by * 4; y < by * 4 + 4; ++y)
        for (int x = bx * 4; x < bx * 4 + 4; ++x) {
          const int sx = x - 2, sy = y - 2;
          if (sx >= 0 && sx < 28 && sy >= 0 && sy < 28) sum += img.at(sx, sy);
        }
      const double mean = sum / 16.0;
      out.push_back(std::min(15, static_cast<int>(std::floor(mean / 16.0))));
    }
  }
  return out;
}

std::vector<std::uint8_t> gzip(const std::vector<std::uint8_t>& raw) {
  z_stream zs{};
  REQUIRE(deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                       Z_DEFAULT_STRATEGY) == Z_OK);
  std::vector<std::uint8_t> out(deflateBound(&zs, raw.size()) + 32);
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

LabeledFn rec(std::uint16_t label, std::vector<std::uint16_t> v,
              std::uint32_t levels = 16) {
  return {label, QuantizedFn(std::move(v), levels)};
}

}  // namespace

TEST_CASE("transpose is an involution") {
  Rng rng(61);
  auto img = random_image(rng, 5, 3);
  const auto orig = img;
  img.transpose();
  CHECK(img.width == 3);
  CHECK(img.height == 5);
  CHECK(img.at(2, 4) == orig.at(4, 2));
  img.transpose();
  CHECK(img == orig);
}

TEST_CASE("idx round trip") {
  Rng rng(62);
  std::vector<GrayImage> images;
  std::vector<std::uint16_t> labels;
  for (int k = 0; k < 7; ++k) {
    images.push_back(random_image(rng));
    labels.push_back(static_cast<std::uint16_t>(rng.below(10)));
  }
  const auto ib = encode_idx_images(images);
  const auto lb = encode_idx_labels(labels);
  CHECK(ib.size() == 16 + 7 * 784);
  CHECK(lb.size() == 8 + 7);
  CHECK(parse_idx_images(ib) == images);
  CHECK(parse_idx_labels(lb) == labels);
  CHECK(encode_idx_images(parse_idx_images(ib)) == ib);
  CHECK(encode_idx_labels(parse_idx_labels(lb)) == lb);
  CHECK(parse_idx_images(maybe_gunzip(gzip(ib))) == images);
}

TEST_CASE("idx parse errors") {
  Rng rng(63);
  const std::vector<GrayImage> images{random_image(rng), random_image(rng)};
  const std::vector<std::uint16_t> labels{1, 2};
  const auto ib = encode_idx_images(images);
  const auto lb = encode_idx_labels(labels);

  CHECK_THROWS_AS(parse_idx_labels(ib), ParseError);
  CHECK_THROWS_AS(parse_idx_images(lb), ParseError);

  auto short_images = ib;
  short_images.resize(ib.size() - 1);
  CHECK_THROWS_AS(parse_idx_images(short_images), ParseError);
  auto short_labels = lb;
  short_labels.pop_back();
  try {
    parse_idx_labels(short_labels);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() >= 8);
  }
  CHECK_THROWS_AS(parse_idx_labels(std::vector<std::uint8_t>{0, 0}), ParseError);
  CHECK_THROWS_AS(maybe_gunzip({0x1f, 0x8b, 1, 2, 3}), ParseError);
}

TEST_CASE("load_idx checks counts and transposes") {
  Rng rng(64);
  const auto dir = fs::temp_directory_path() / "eham_unit_idx";
  fs::create_directories(dir);
  const std::vector<GrayImage> images{random_image(rng), random_image(rng)};
  write_file(dir / "img", encode_idx_images(images));
  write_file(dir / "lab", encode_idx_labels(std::vector<std::uint16_t>{3, 4}));
  write_file(dir / "lab3", encode_idx_labels(std::vector<std::uint16_t>{3, 4, 5}));
  write_file(dir / "img.gz", gzip(encode_idx_images(images)));

  const auto set = load_idx(dir / "img", dir / "lab", false);
  CHECK(set.size() == 2);
  CHECK(set.images[1] == images[1]);
  CHECK(set.class_names.size() == 10);

  const auto flipped = load_idx(dir / "img.gz", dir / "lab", true);
  auto t = images[0];
  t.transpose();
  CHECK(flipped.images[0] == t);

  CHECK_THROWS_AS(load_idx(dir / "img", dir / "lab3", false), ParseError);
  CHECK_THROWS_AS(load_idx(dir / "missing", dir / "lab", false), IoError);
  fs::remove_all(dir);
}

TEST_CASE("class name tables") {
  CHECK(mnist_class_names().size() == 10);
  const auto em = emnist_balanced_class_names();
  CHECK(em.size() == 47);
  CHECK(em[10] == "A");
  CHECK(em[29] == "T");
  CHECK(em[35] == "Z");
}

TEST_CASE("featurize examples") {
  GrayImage black{28, 28, std::vector<std::uint8_t>(784, 0)};
  const auto zero = featurize(black);
  CHECK(zero.n_args() == 64);
  CHECK(zero.n_levels() == 16);
  for (auto v : zero.values()) CHECK(v == 0);

  GrayImage white{28, 28, std::vector<std::uint8_t>(784, 255)};
  const auto f = featurize(white);
  const auto want = block_oracle(white);
  for (int a = 0; a < 64; ++a) CHECK(f.value(a) == want[a]);
  CHECK(f.value(0) == 3);   // corner: 4 of 16 pixels inked
  CHECK(f.value(1) == 7);   // edge: 8 of 16
  CHECK(f.value(9) == 15);  // interior
  CHECK(featurize(white) == f);

  CHECK_THROWS_AS(featurize(GrayImage{27, 28, std::vector<std::uint8_t>(27 * 28)}),
                  std::invalid_argument);
}

TEST_CASE("featurize agrees with the block oracle") {
  Rng rng(65);
  for (int trial = 0; trial < 100; ++trial) {
    auto img = random_image(rng);
    // sparse strokes as well as noise
    if (trial % 2) for (auto& p : img.pixels) p = rng.below(5) ? 0 : p;
    const auto f = featurize(img);
    REQUIRE(f.n_args() == 64);
    const auto want = block_oracle(img);
    for (int a = 0; a < 64; ++a) {
      CHECK(f.value(a) == want[a]);
      CHECK(f.weight(a) == 1);
    }
  }
}

TEST_CASE("pgm rendering") {
  std::vector<std::uint16_t> v(64, 0);
  v[9] = 15;
  const auto pgm = render_pgm(QuantizedFn(v, 16), 2);
  const std::string head(pgm.begin(), pgm.begin() + 13);
  CHECK(head == "P5\n16 16\n255\n");
  CHECK(pgm.size() == 13 + 256);
  // block (1,1) covers pixels (2..3, 2..3)
  CHECK(pgm[13 + 2 * 16 + 2] == 255);
  CHECK(pgm[13 + 0] == 0);
}

TEST_CASE("fn corpus round trip and errors") {
  std::vector<LabeledFn> recs{rec(3, std::vector<std::uint16_t>(64, 2)),
                              rec(45, std::vector<std::uint16_t>(64, 15))};
  const auto bytes = encode_fn_corpus(recs);
  CHECK(bytes.size() == 16 + 2 * 66);
  const auto back = decode_fn_corpus(bytes);
  REQUIRE(back.size() == 2);
  CHECK(back[1].label == 45);
  CHECK(back[1].fn == recs[1].fn);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_fn_corpus(bad), ParseError);
  auto cut = bytes;
  cut.pop_back();
  CHECK_THROWS_AS(decode_fn_corpus(cut), ParseError);
  auto out_of_range = bytes;
  out_of_range[16 + 2] = 16;
  CHECK_THROWS_AS(decode_fn_corpus(out_of_range), ParseError);
}

TEST_CASE("centroid fitting") {
  std::vector<LabeledFn> one{rec(0, {1, 2}, 4), rec(1, {3, 0}, 4)};
  const auto m1 = fit_centroids(one);
  CHECK(m1.class_count() == 2);
  CHECK(m1.centroid(0)[0] == 1.0);
  CHECK(m1.centroid(1)[0] == 3.0);

  std::vector<LabeledFn> two{rec(5, {0, 0}, 4), rec(5, {2, 2}, 4)};
  const auto m2 = fit_centroids(two);
  CHECK(m2.centroid(0)[0] == 1.0);
  CHECK(m2.centroid(0)[1] == 1.0);

  const std::uint16_t need[] = {5, 6};
  CHECK_THROWS_AS(fit_centroids(two, need), std::invalid_argument);
  CHECK_THROWS_AS(fit_centroids(std::vector<LabeledFn>{}), std::invalid_argument);

  // order independence
  Rng rng(66);
  std::vector<LabeledFn> many;
  for (int k = 0; k < 60; ++k) {
    std::vector<std::uint16_t> v(8);
    for (auto& x : v) x = static_cast<std::uint16_t>(rng.below(16));
    many.push_back(rec(static_cast<std::uint16_t>(rng.below(4)), v));
  }
  auto shuffled = many;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[3], shuffled[40]);
  const auto a = fit_centroids(many), b = fit_centroids(shuffled);
  for (std::size_t c = 0; c < a.class_count(); ++c)
    for (std::size_t x = 0; x < 8; ++x) CHECK(a.centroid(c)[x] == b.centroid(c)[x]);
}

TEST_CASE("classification") {
  std::vector<LabeledFn> train{rec(2, {0, 0}, 4), rec(7, {2, 2}, 4),
                               rec(9, {3, 0}, 4)};
  const auto model = fit_centroids(train);
  CHECK(model.classify(QuantizedFn({2, 2}, 4)) == 7);
  CHECK(model.classify(QuantizedFn({3, 0}, 4)) == 9);
  // (1,1) is sqrt(2) from both 2 and 7
  CHECK(model.classify(QuantizedFn({1, 1}, 4)) == 2);
  CHECK_THROWS_AS(model.classify(QuantizedFn({1, 1, 1}, 4)), std::invalid_argument);
}

TEST_CASE("classification is invariant under relabeling") {
  Rng rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabeledFn> train;
    for (int k = 0; k < 40; ++k) {
      std::vector<std::uint16_t> v(6);
      for (auto& x : v) x = static_cast<std::uint16_t>(rng.below(16));
      train.push_back(rec(static_cast<std::uint16_t>(k % 5), v));
    }
    // a bijection that keeps label order, so ties resolve identically
    auto relabel = [](std::uint16_t c) { return static_cast<std::uint16_t>(3 * c + 10); };
    auto moved = train;
    for (auto& r : moved) r.label = relabel(r.label);
    const auto a = fit_centroids(train), b = fit_centroids(moved);
    for (int k = 0; k < 30; ++k) {
      std::vector<std::uint16_t> v(6);
      for (auto& x : v) x = static_cast<std::uint16_t>(rng.below(16));
      const QuantizedFn f(v, 16);
      CHECK(b.classify(f) == relabel(a.classify(f)));
    }
  }
}

TEST_CASE("held-out classifier accuracy on synthetic glyphs") {
  SynthOptions opts;
  opts.per_class = 120;
  opts.seed = 3;
  for (auto kind : {GlyphKind::Digits, GlyphKind::Letters}) {
    const auto set = synth_glyphs(kind, opts);
    std::vector<LabeledFn> train, test;
    for (std::size_t k = 0; k < set.size(); ++k) {
      LabeledFn r{set.labels[k], featurize(set.images[k])};
      ((k / 10) % 5 == 0 ? test : train).push_back(std::move(r));
    }
    const auto model = fit_centroids(train);
    std::size_t ok = 0;
    for (const auto& r : test) ok += model.classify(r.fn) == r.label;
    CHECK(double(ok) / test.size() > 0.70);
  }
}

TEST_CASE("held-out classifier accuracy on MNIST") {
  const char* root = std::getenv("EHAM_DATA_DIR");
  const fs::path dir = root ? root : "";
  fs::path images, labels;
  for (const char* ext : {"", ".gz"}) {
    if (root && fs::exists(dir / (std::string("t10k-images-idx3-ubyte") + ext))) {
      images = dir / (std::string("t10k-images-idx3-ubyte") + ext);
      labels = dir / (std::string("t10k-labels-idx1-ubyte") + ext);
    }
  }
  if (images.empty()) {
    MESSAGE("EHAM_DATA_DIR has no MNIST t10k files; skipped");
    return;
  }
  const auto set = load_idx(images, labels, false);
  CHECK(set.size() == 10000);
  CHECK(set.images[0].width == 28);
  std::vector<LabeledFn> train, test;
  for (std::size_t k = 0; k < set.size(); ++k) {
    LabeledFn r{set.labels[k], featurize(set.images[k])};
    ((k / 10) % 5 == 0 ? test : train).push_back(std::move(r));
  }
  const auto model = fit_centroids(train);
  std::size_t ok = 0;
  for (const auto& r : test) ok += model.classify(r.fn) == r.label;
  CHECK(double(ok) / test.size() > 0.70);
}
