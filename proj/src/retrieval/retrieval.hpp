#ifndef EHAM_RETRIEVAL_RETRIEVAL_HPP
#define EHAM_RETRIEVAL_RETRIEVAL_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"
#include "memory/hamr.hpp"
#include "memory/quantized_fn.hpp"

namespace eham {

enum class Direction { AtoB, BtoA };

inline Direction reverse(Direction d) {
  return d == Direction::AtoB ? Direction::BtoA : Direction::AtoB;
}
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

// A 2D weight table over one field: arguments x values, argument-major.
// A "column" is the row of weights belonging to one argument.
class WeightedPlane {
 public:
  WeightedPlane(std::uint32_t n_args, std::uint32_t n_levels);
  WeightedPlane(std::uint32_t n_args, std::uint32_t n_levels,
                std::vector<double> cells);

  std::uint32_t n_args() const { return n_args_; }
  std::uint32_t n_levels() const { return n_levels_; }

  double operator()(std::uint32_t arg, std::uint32_t level) const {
    return cells_[std::size_t{arg} * n_levels_ + level];
  }
  double& operator()(std::uint32_t arg, std::uint32_t level) {
    return cells_[std::size_t{arg} * n_levels_ + level];
  }
  std::span<const double> column(std::uint32_t arg) const {
    return std::span<const double>(cells_).subspan(std::size_t{arg} * n_levels_,
                                                   n_levels_);
  }
  std::span<const double> cells() const { return cells_; }

  friend bool operator==(const WeightedPlane&, const WeightedPlane&) = default;

 private:
  std::uint32_t n_args_;
  std::uint32_t n_levels_;
  std::vector<double> cells_;
};

class EmptyColumnError : public std::runtime_error {
 public:
  explicit EmptyColumnError(std::uint32_t column)
      : std::runtime_error("plane column " + std::to_string(column) +
                           " has no weight"),
        column_(column) {}
  std::uint32_t column() const { return column_; }

 private:
  std::uint32_t column_;
};

struct SearchConfig {
  std::uint32_t n_samples = 128;
  std::uint32_t descent_budget = 800;
  std::uint64_t rng_seed = 0;
  // Parameters of the 2D recognition gate inside the distance.
  MemParams gate;
  // Draw uniformly from all-zero columns instead of failing.
  bool uniform_fallback = false;

  void validate() const;
};

enum class FailureKind { EmptyColumn, NoRecognizedCandidate };

struct RetrievalFailure {
  FailureKind kind;
  std::string message;
};

struct RetrievalOutcome {
  std::optional<QuantizedFn> object;
  double distance = std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;
  std::optional<RetrievalFailure> failure;
};

enum class Method { RS, ST, SS };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);

// Source-field cue -> target-field plane (the cue-specific 2D relation).
WeightedPlane reduce(const Hamr4D& mem, const QuantizedFn& cue, Direction dir);

// One draw per column from the categorical distribution of its weights.
QuantizedFn sample_plane(const WeightedPlane& plane, Rng& rng,
                         bool uniform_fallback = false);

bool eta_plane(const WeightedPlane& plane, const QuantizedFn& f,
               const MemParams& params);

// Weighted mean squared deviation between the plane and f; +inf when the
// 2D recognition gate rejects f.
double distance(const WeightedPlane& plane, const QuantizedFn& f,
                const MemParams& params);

// Copy of `candidate` with one argument moved to another value in the
// support of that argument's column.
QuantizedFn neighbor(const QuantizedFn& candidate, const WeightedPlane& plane,
                     Rng& rng);

RetrievalOutcome retrieve_rs(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg);
RetrievalOutcome retrieve_st(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg);
RetrievalOutcome retrieve_ss(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg);
RetrievalOutcome retrieve(Method method, const Hamr4D& mem,
                          const QuantizedFn& cue, Direction dir,
                          const SearchConfig& cfg);

}  // namespace eham

#endif  // EHAM_RETRIEVAL_RETRIEVAL_HPP
