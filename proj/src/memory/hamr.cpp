#include "memory/hamr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eham {

void MemParams::validate() const {
  if (!(iota >= 0.0) || !(kappa >= 0.0)) {
    throw std::invalid_argument("iota and kappa must be nonnegative");
  }
}

Hamr4D::Hamr4D(Dims dims, std::uint32_t cap)
    : dims_(dims), cap_(cap) {
  if (dims.n == 0 || dims.m == 0 || dims.p == 0 || dims.q == 0) {
    throw std::invalid_argument("memory dimensions must be positive");
  }
  if (cap == 0 || cap > kMaxCap) {
    throw std::invalid_argument("cap must be in [1, 65535], got " +
                                std::to_string(cap));
  }
  cells_.assign(dims.cells(), 0);
}

Hamr4D::Hamr4D(Dims dims, std::uint32_t cap, std::vector<Cell> cells)
    : Hamr4D(dims, cap) {
  if (cells.size() != cells_.size()) {
    throw std::invalid_argument("cell count does not match dimensions");
  }
  for (auto c : cells) {
    if (c > cap) throw std::invalid_argument("cell value exceeds cap");
  }
  cells_ = std::move(cells);
}

Hamr4D::Cell Hamr4D::at(std::uint32_t i, std::uint32_t j, std::uint32_t k,
                        std::uint32_t l) const {
  if (i >= dims_.n || j >= dims_.m || k >= dims_.p || l >= dims_.q) {
    throw std::invalid_argument("cell index out of range");
  }
  return cells_[index(i, j, k, l)];
}

void Hamr4D::check_pair(std::uint32_t i, std::uint32_t j) const {
  if (i >= dims_.n || j >= dims_.m) {
    throw std::invalid_argument("pair index (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") out of range");
  }
}

void Hamr4D::check_cue(const PairCue& cue) const {
  if (cue.fa.n_args() != dims_.n || cue.fa.n_levels() != dims_.p ||
      cue.fb.n_args() != dims_.m || cue.fb.n_levels() != dims_.q) {
    throw std::invalid_argument("cue dimensions do not match memory");
  }
}

std::span<const Hamr4D::Cell> Hamr4D::pair_plane(std::uint32_t i,
                                                 std::uint32_t j) const {
  check_pair(i, j);
  return std::span<const Cell>(cells_).subspan(index(i, j, 0, 0),
                                               std::size_t{dims_.p} * dims_.q);
}

void Hamr4D::register_pair(const PairCue& cue) {
  check_cue(cue);
  for (std::uint32_t i = 0; i < dims_.n; ++i) {
    const std::uint64_t wa = cue.fa.weight(i);
    if (wa == 0) continue;
    const std::uint32_t k = cue.fa.value(i);
    for (std::uint32_t j = 0; j < dims_.m; ++j) {
      const std::uint64_t add = wa * cue.fb.weight(j);
      if (add == 0) continue;
      auto& cell = cells_[index(i, j, k, cue.fb.value(j))];
      cell = static_cast<Cell>(std::min<std::uint64_t>(cell + add, cap_));
    }
  }
}

namespace {

double plane_omega(std::span<const Hamr4D::Cell> plane) {
  std::uint64_t sum = 0;
  std::uint64_t count = 0;
  for (auto c : plane) {
    if (c != 0) {
      sum += c;
      ++count;
    }
  }
  return count == 0 ? 0.0 : static_cast<double>(sum) / count;
}

double plane_entropy(std::span<const Hamr4D::Cell> plane) {
  std::uint64_t total = 0;
  for (auto c : plane) total += c;
  if (total == 0) return 0.0;
  double e = 0.0;
  for (auto c : plane) {
    if (c == 0) continue;
    const double pr = static_cast<double>(c) / total;
    e -= pr * std::log2(pr);
  }
  return e;
}

}  // namespace

double Hamr4D::omega_pair(std::uint32_t i, std::uint32_t j) const {
  return plane_omega(pair_plane(i, j));
}

double Hamr4D::omega_mean() const {
  return OmegaTable(*this).mean();
}

Hamr4D::Cell Hamr4D::thresholded(double iota, std::uint32_t i,
                                 std::uint32_t j, std::uint32_t k,
                                 std::uint32_t l) const {
  const Cell c = at(i, j, k, l);
  return c > iota * omega_pair(i, j) ? c : Cell{0};
}

Recognition Hamr4D::recognize(const PairCue& cue,
                              const MemParams& params) const {
  return eham::recognize(*this, OmegaTable(*this), cue, params);
}

double Hamr4D::entropy_pair(std::uint32_t i, std::uint32_t j) const {
  return plane_entropy(pair_plane(i, j));
}

double Hamr4D::entropy() const {
  double sum = 0.0;
  for (std::uint32_t i = 0; i < dims_.n; ++i) {
    for (std::uint32_t j = 0; j < dims_.m; ++j) sum += entropy_pair(i, j);
  }
  return sum / (static_cast<double>(dims_.n) * dims_.m);
}

OmegaTable::OmegaTable(const Hamr4D& mem) : m_(mem.dims().m) {
  const auto& d = mem.dims();
  omega_.resize(std::size_t{d.n} * d.m);
  double sum = 0.0;
  for (std::uint32_t i = 0; i < d.n; ++i) {
    for (std::uint32_t j = 0; j < d.m; ++j) {
      const double w = plane_omega(mem.pair_plane(i, j));
      omega_[std::size_t{i} * d.m + j] = w;
      sum += w;
    }
  }
  mean_ = sum / static_cast<double>(omega_.size());
}

Recognition recognize(const Hamr4D& mem, const OmegaTable& omega,
                      const PairCue& cue, const MemParams& params) {
  params.validate();
  mem.check_cue(cue);
  const auto& d = mem.dims();

  // s_R = (sum of fa weights) * (sum of fb weights)
  const double s_r = static_cast<double>(cue.fa.weight_sum()) *
                     static_cast<double>(cue.fb.weight_sum());
  Recognition out;
  if (s_r == 0.0) {
    out.degenerate = true;
    out.violations = std::uint64_t{d.n} * d.m;
    out.accepted = params.kappa == 0.0 && params.xi >= out.violations;
    return out;
  }

  double weighted = 0.0;
  for (std::uint32_t i = 0; i < d.n; ++i) {
    const std::uint64_t wa = cue.fa.weight(i);
    if (wa == 0) continue;
    const std::uint32_t k = cue.fa.value(i);
    for (std::uint32_t j = 0; j < d.m; ++j) {
      const std::uint64_t r = wa * cue.fb.weight(j);
      if (r == 0) continue;
      const auto h = mem(i, j, k, cue.fb.value(j));
      if (!(h > params.iota * omega.pair(i, j))) ++out.violations;
      weighted += static_cast<double>(h) * static_cast<double>(r);
    }
  }
  out.rho = weighted / s_r;
  out.accepted = out.violations <= params.xi &&
                 out.rho >= params.kappa * omega.mean();
  return out;
}

}  // namespace eham
