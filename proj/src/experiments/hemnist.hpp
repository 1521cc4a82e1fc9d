#ifndef EHAM_EXPERIMENTS_HEMNIST_HPP
#define EHAM_EXPERIMENTS_HEMNIST_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "common/rng.hpp"
#include "featurizer/featurize.hpp"
#include "memory/quantized_fn.hpp"

namespace eham {

// Bijection between ten digit classes and ten letter classes. Letter ids
// are EMNIST Balanced labels.
class ClassMap {
 public:
  static constexpr std::size_t kClasses = 10;

  ClassMap();  // 0-T 1-O 2-P 3-B 4-W 5-Z 6-M 7-A 8-L 9-S
  explicit ClassMap(std::array<std::uint16_t, kClasses> letter_of_digit);

  std::uint16_t letter(std::uint16_t digit) const;
  std::optional<std::uint16_t> digit(std::uint16_t letter) const;
  bool corresponds(std::uint16_t digit, std::uint16_t letter) const;

  std::array<std::uint16_t, kClasses> letters() const { return letters_; }

 private:
  std::array<std::uint16_t, kClasses> letters_;
};

struct PairSample {
  QuantizedFn digit;   // A-field object
  QuantizedFn letter;  // B-field object
  std::uint16_t pair_class;  // digit class 0..9
};

// Per class, seeded random matching without replacement of digits and
// letters of corresponding classes; min(count) pairs, optionally capped.
// Output is grouped by class in ascending order.
std::vector<PairSample> build_pairs(std::span<const LabeledFn> digits,
                                    std::span<const LabeledFn> letters,
                                    const ClassMap& map, std::uint64_t seed,
                                    std::size_t max_per_class = 0);

// Pair indices of one fold: 70% training, 20% remembering, 10% testing.
struct Partition {
  std::vector<std::size_t> training;
  std::vector<std::size_t> remembering;
  std::vector<std::size_t> testing;
};

inline constexpr std::uint32_t kFolds = 10;

// Each class's pairs are cut into ten contiguous chunks; fold f tests on
// chunk f, remembers chunks f+1 and f+2 (mod 10) and trains on the rest.
Partition make_partition(std::span<const PairSample> pairs, std::uint32_t fold);

// Fisher-Yates with the portable Rng.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace eham

#endif  // EHAM_EXPERIMENTS_HEMNIST_HPP
