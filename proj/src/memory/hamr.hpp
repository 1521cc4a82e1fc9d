#ifndef EHAM_MEMORY_HAMR_HPP
#define EHAM_MEMORY_HAMR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "memory/quantized_fn.hpp"

namespace eham {

// Sizes of the four fields: n = |A|, m = |B|, p = |V|, q = |Z|.
struct Dims {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t p = 0;
  std::uint32_t q = 0;

  std::size_t cells() const {
    return std::size_t{n} * m * p * q;
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

inline constexpr std::uint32_t kMaxCap = 65535;
inline constexpr std::uint32_t kDefaultCap = 65535;

// Recognition parameters: iota scales the per-pair threshold, kappa scales
// the mass threshold, xi is the allowed number of unsupported cue cells.
struct MemParams {
  double iota = 0.0;
  double kappa = 0.0;
  std::uint64_t xi = 0;

  void validate() const;
};

// A pair of functions (fa over A->V, fb over B->Z) presented as one cue.
// Its induced 4D weight is fa.weight(i) * fb.weight(j) at
// (i, j, fa.value(i), fb.value(j)) and zero elsewhere.
struct PairCue {
  QuantizedFn fa;
  QuantizedFn fb;
};

struct Recognition {
  bool accepted = false;
  std::uint64_t violations = 0;
  double rho = 0.0;
  // All cue weights were zero.
  bool degenerate = false;

  friend bool operator==(const Recognition&, const Recognition&) = default;
};

// The 4D hetero-associative memory register: a dense table of saturating
// counts over A x B x V x Z, row-major in (i, j, k, l).
class Hamr4D {
 public:
  using Cell = std::uint16_t;

  Hamr4D(Dims dims, std::uint32_t cap = kDefaultCap);
  // Rebuild from raw cells (used by snapshot loading).
  Hamr4D(Dims dims, std::uint32_t cap, std::vector<Cell> cells);

  const Dims& dims() const { return dims_; }
  std::uint32_t cap() const { return cap_; }

  std::size_t index(std::uint32_t i, std::uint32_t j, std::uint32_t k,
                    std::uint32_t l) const {
    return ((std::size_t{i} * dims_.m + j) * dims_.p + k) * dims_.q + l;
  }
  Cell at(std::uint32_t i, std::uint32_t j, std::uint32_t k,
          std::uint32_t l) const;
  Cell operator()(std::uint32_t i, std::uint32_t j, std::uint32_t k,
                  std::uint32_t l) const {
    return cells_[index(i, j, k, l)];
  }

  std::span<const Cell> cells() const { return cells_; }

  // The p x q plane H_{i,j}.
  std::span<const Cell> pair_plane(std::uint32_t i, std::uint32_t j) const;

  // Saturating cell-wise addition of the cue's induced weights.
  void register_pair(const PairCue& cue);

  // Average nonzero weight of H_{i,j}; 0 for an empty plane.
  double omega_pair(std::uint32_t i, std::uint32_t j) const;
  // Mean of omega_pair over all n*m pairs.
  double omega_mean() const;

  // H(i,j,k,l) if strictly above iota * omega_pair(i,j), else 0.
  Cell thresholded(double iota, std::uint32_t i, std::uint32_t j,
                   std::uint32_t k, std::uint32_t l) const;

  Recognition recognize(const PairCue& cue, const MemParams& params) const;

  double entropy_pair(std::uint32_t i, std::uint32_t j) const;
  double entropy() const;

  void check_cue(const PairCue& cue) const;

 private:
  void check_pair(std::uint32_t i, std::uint32_t j) const;

  Dims dims_;
  std::uint32_t cap_;
  std::vector<Cell> cells_;
};

// Per-pair omega values of one memory state, so repeated recognitions do
// not rescan the table.
class OmegaTable {
 public:
  explicit OmegaTable(const Hamr4D& mem);

  double pair(std::uint32_t i, std::uint32_t j) const {
    return omega_[std::size_t{i} * m_ + j];
  }
  double mean() const { return mean_; }

 private:
  std::uint32_t m_;
  std::vector<double> omega_;
  double mean_ = 0.0;
};

Recognition recognize(const Hamr4D& mem, const OmegaTable& omega,
                      const PairCue& cue, const MemParams& params);

}  // namespace eham

#endif  // EHAM_MEMORY_HAMR_HPP
