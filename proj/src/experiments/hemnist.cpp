#include "experiments/hemnist.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace eham {

namespace {
// EMNIST Balanced: 'A' is label 10.
constexpr std::uint16_t letter_label(char c) {
  return static_cast<std::uint16_t>(10 + (c - 'A'));
}
}  // namespace

ClassMap::ClassMap()
    : ClassMap({letter_label('T'), letter_label('O'), letter_label('P'),
                letter_label('B'), letter_label('W'), letter_label('Z'),
                letter_label('M'), letter_label('A'), letter_label('L'),
                letter_label('S')}) {}

ClassMap::ClassMap(std::array<std::uint16_t, kClasses> letter_of_digit)
    : letters_(letter_of_digit) {
  std::set<std::uint16_t> unique(letters_.begin(), letters_.end());
  if (unique.size() != kClasses) {
    throw std::invalid_argument("class map must be a bijection");
  }
}

std::uint16_t ClassMap::letter(std::uint16_t digit) const {
  if (digit >= kClasses) {
    throw std::invalid_argument("digit class " + std::to_string(digit) +
                                " not in class map");
  }
  return letters_[digit];
}

std::optional<std::uint16_t> ClassMap::digit(std::uint16_t letter) const {
  for (std::uint16_t d = 0; d < kClasses; ++d) {
    if (letters_[d] == letter) return d;
  }
  return std::nullopt;
}

bool ClassMap::corresponds(std::uint16_t digit, std::uint16_t letter) const {
  return digit < kClasses && letters_[digit] == letter;
}

std::vector<PairSample> build_pairs(std::span<const LabeledFn> digits,
                                    std::span<const LabeledFn> letters,
                                    const ClassMap& map, std::uint64_t seed,
                                    std::size_t max_per_class) {
  std::vector<PairSample> out;
  for (std::uint16_t c = 0; c < ClassMap::kClasses; ++c) {
    const auto letter = map.letter(c);
    std::vector<std::size_t> di;
    std::vector<std::size_t> li;
    for (std::size_t x = 0; x < digits.size(); ++x) {
      if (digits[x].label == c) di.push_back(x);
    }
    for (std::size_t x = 0; x < letters.size(); ++x) {
      if (letters[x].label == letter) li.push_back(x);
    }
    if (di.empty() || li.empty()) {
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no digits or no letters");
    }
    Rng rng(derive_seed(seed, {0x70616972ULL, c}));
    shuffle(di, rng);
    shuffle(li, rng);
    auto count = std::min(di.size(), li.size());
    if (max_per_class != 0) count = std::min(count, max_per_class);
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back({digits[di[k]].fn, letters[li[k]].fn, c});
    }
  }
  return out;
}

Partition make_partition(std::span<const PairSample> pairs,
                         std::uint32_t fold) {
  if (fold >= kFolds) {
    throw std::invalid_argument("fold must be below " +
                                std::to_string(kFolds));
  }
  Partition part;
  std::size_t begin = 0;
  while (begin < pairs.size()) {
    std::size_t end = begin;
    while (end < pairs.size() && pairs[end].pair_class == pairs[begin].pair_class) {
      ++end;
    }
    const std::size_t n = end - begin;
    for (std::uint32_t chunk = 0; chunk < kFolds; ++chunk) {
      const std::size_t lo = begin + n * chunk / kFolds;
      const std::size_t hi = begin + n * (chunk + 1) / kFolds;
      const std::uint32_t rel = (chunk + kFolds - fold) % kFolds;
      auto& dst = rel == 0   ? part.testing
                  : rel <= 2 ? part.remembering
                             : part.training;
      for (std::size_t x = lo; x < hi; ++x) dst.push_back(x);
    }
    begin = end;
  }
  return part;
}

}  // namespace eham
