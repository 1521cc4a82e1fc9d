#ifndef EHAM_MEMORY_QUANTIZED_FN_HPP
#define EHAM_MEMORY_QUANTIZED_FN_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eham {

// A total function over arguments 0..n_args-1 with values in 0..n_levels-1.
// Every argument carries a nonnegative integer weight (1 unless stated).
class QuantizedFn {
 public:
  QuantizedFn() = default;

  QuantizedFn(std::vector<std::uint16_t> values, std::uint32_t n_levels)
      : values_(std::move(values)),
        weights_(values_.size(), 1u),
        n_levels_(n_levels) {
    validate();
  }

  QuantizedFn(std::vector<std::uint16_t> values,
              std::vector<std::uint32_t> weights, std::uint32_t n_levels)
      : values_(std::move(values)),
        weights_(std::move(weights)),
        n_levels_(n_levels) {
    validate();
  }

  std::size_t n_args() const { return values_.size(); }
  std::uint32_t n_levels() const { return n_levels_; }

  std::span<const std::uint16_t> values() const { return values_; }
  std::span<const std::uint32_t> weights() const { return weights_; }

  std::uint16_t value(std::size_t i) const { return values_.at(i); }
  std::uint32_t weight(std::size_t i) const { return weights_.at(i); }

  void set_value(std::size_t i, std::uint16_t v) {
    if (v >= n_levels_) {
      throw std::invalid_argument("value " + std::to_string(v) +
                                  " out of range for " +
                                  std::to_string(n_levels_) + " levels");
    }
    values_.at(i) = v;
  }

  std::uint64_t weight_sum() const {
    std::uint64_t s = 0;
    for (auto w : weights_) s += w;
    return s;
  }

  // Same function with every weight multiplied by `factor`.
  QuantizedFn scaled(std::uint32_t factor) const {
    auto w = weights_;
    for (auto& x : w) x *= factor;
    return QuantizedFn(values_, std::move(w), n_levels_);
  }

  friend bool operator==(const QuantizedFn&, const QuantizedFn&) = default;

 private:
  void validate() const {
    if (values_.size() != weights_.size()) {
      throw std::invalid_argument("values and weights differ in length");
    }
    if (n_levels_ == 0) {
      throw std::invalid_argument("n_levels must be positive");
    }
    for (auto v : values_) {
      if (v >= n_levels_) {
        throw std::invalid_argument("value " + std::to_string(v) +
                                    " out of range for " +
                                    std::to_string(n_levels_) + " levels");
      }
    }
  }

  std::vector<std::uint16_t> values_;
  std::vector<std::uint32_t> weights_;
  std::uint32_t n_levels_ = 1;
};

// Number of arguments on which the two functions take different values.
inline std::size_t hamming(const QuantizedFn& a, const QuantizedFn& b) {
  if (a.n_args() != b.n_args()) {
    throw std::invalid_argument("hamming: argument counts differ");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.n_args(); ++i) d += a.value(i) != b.value(i);
  return d;
}

}  // namespace eham

#endif  // EHAM_MEMORY_QUANTIZED_FN_HPP
