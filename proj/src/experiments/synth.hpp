#ifndef EHAM_EXPERIMENTS_SYNTH_HPP
#define EHAM_EXPERIMENTS_SYNTH_HPP

#include <cstdint>
#include <filesystem>

#include "featurizer/idx.hpp"

namespace eham {

// Procedurally rendered stand-in for MNIST digits and the ten paired
// EMNIST letters: stroke skeletons under random affine warps, smooth
// displacement and stroke-width jitter, antialiased into 28x28 frames.
// Labels follow the real corpora (digits 0-9, letters as EMNIST Balanced).
enum class GlyphKind { Digits, Letters };

struct SynthOptions {
  std::size_t per_class = 500;
  std::uint64_t seed = 1;
  // Multiplies every distortion amplitude.
  double distortion = 1.0;
};

LabeledSet synth_glyphs(GlyphKind kind, const SynthOptions& opts);

// Writes <prefix>-images-idx3-ubyte and <prefix>-labels-idx1-ubyte.
// Letters are stored transposed, as EMNIST distributes them.
void write_synth_idx(GlyphKind kind, const SynthOptions& opts,
                     const std::filesystem::path& dir,
                     const std::string& prefix);

}  // namespace eham

#endif  // EHAM_EXPERIMENTS_SYNTH_HPP
