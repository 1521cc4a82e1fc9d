#include "retrieval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eham {

std::string_view to_string(Direction d) {
  return d == Direction::AtoB ? "a2b" : "b2a";
}

Direction parse_direction(std::string_view s) {
  if (s == "a2b") return Direction::AtoB;
  if (s == "b2a") return Direction::BtoA;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::RS: return "rs";
    case Method::ST: return "st";
    case Method::SS: return "ss";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "rs") return Method::RS;
  if (t == "st") return Method::ST;
  if (t == "ss") return Method::SS;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

WeightedPlane::WeightedPlane(std::uint32_t n_args, std::uint32_t n_levels)
    : n_args_(n_args),
      n_levels_(n_levels),
      cells_(std::size_t{n_args} * n_levels, 0.0) {}

WeightedPlane::WeightedPlane(std::uint32_t n_args, std::uint32_t n_levels,
                             std::vector<double> cells)
    : n_args_(n_args), n_levels_(n_levels), cells_(std::move(cells)) {
  if (cells_.size() != std::size_t{n_args} * n_levels) {
    throw std::invalid_argument("plane cell count does not match dims");
  }
  for (double c : cells_) {
    if (!(c >= 0.0)) throw std::invalid_argument("plane cells must be >= 0");
  }
}

void SearchConfig::validate() const {
  if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
  gate.validate();
}

namespace {

struct Field {
  std::uint32_t args;
  std::uint32_t levels;
};

Field source_field(const Dims& d, Direction dir) {
  return dir == Direction::AtoB ? Field{d.n, d.p} : Field{d.m, d.q};
}
Field target_field(const Dims& d, Direction dir) {
  return dir == Direction::AtoB ? Field{d.m, d.q} : Field{d.n, d.p};
}

void check_source(const Hamr4D& mem, const QuantizedFn& cue, Direction dir) {
  const auto f = source_field(mem.dims(), dir);
  if (cue.n_args() != f.args || cue.n_levels() != f.levels) {
    throw std::invalid_argument("cue dimensions do not match source field");
  }
}

void check_plane(const WeightedPlane& plane, const QuantizedFn& f) {
  if (plane.n_args() != f.n_args() || plane.n_levels() != f.n_levels()) {
    throw std::invalid_argument("function dimensions do not match plane");
  }
}

// Unnormalized reduction: sum over cue arguments of weight * H, as exact
// integers. The plane proper is this divided by the cue's weight sum.
class RawPlane {
 public:
  RawPlane(const Hamr4D& mem, const QuantizedFn& cue, Direction dir)
      : mem_(mem), dir_(dir), target_(target_field(mem.dims(), dir)),
        weight_sum_(cue.weight_sum()),
        raw_(std::size_t{target_.args} * target_.levels, 0) {
    const auto& d = mem.dims();
    const auto cells = mem.cells();
    if (dir == Direction::AtoB) {
      for (std::uint32_t i = 0; i < d.n; ++i) {
        const std::int64_t w = cue.weight(i);
        if (w == 0) continue;
        const std::uint32_t k = cue.value(i);
        for (std::uint32_t j = 0; j < d.m; ++j) {
          const auto* h = &cells[mem.index(i, j, k, 0)];
          auto* out = &raw_[std::size_t{j} * d.q];
          for (std::uint32_t l = 0; l < d.q; ++l) out[l] += w * h[l];
        }
      }
    } else {
      for (std::uint32_t i = 0; i < d.n; ++i) {
        auto* out = &raw_[std::size_t{i} * d.p];
        for (std::uint32_t j = 0; j < d.m; ++j) {
          const std::int64_t w = cue.weight(j);
          if (w == 0) continue;
          const std::uint32_t l = cue.value(j);
          for (std::uint32_t k = 0; k < d.p; ++k) {
            out[k] += w * cells[mem.index(i, j, k, l)];
          }
        }
      }
    }
  }

  // Adds sign * weight * (contribution of cue argument `arg` at `level`).
  void apply(std::uint32_t arg, std::uint32_t level, std::int64_t scale) {
    const auto& d = mem_.dims();
    const auto cells = mem_.cells();
    if (dir_ == Direction::AtoB) {
      for (std::uint32_t j = 0; j < d.m; ++j) {
        const auto* h = &cells[mem_.index(arg, j, level, 0)];
        auto* out = &raw_[std::size_t{j} * d.q];
        for (std::uint32_t l = 0; l < d.q; ++l) out[l] += scale * h[l];
      }
    } else {
      for (std::uint32_t i = 0; i < d.n; ++i) {
        auto* out = &raw_[std::size_t{i} * d.p];
        for (std::uint32_t k = 0; k < d.p; ++k) {
          out[k] += scale * cells[mem_.index(i, arg, k, level)];
        }
      }
    }
  }

  WeightedPlane finish() const {
    std::vector<double> cells(raw_.size());
    const double s = static_cast<double>(weight_sum_);
    for (std::size_t x = 0; x < raw_.size(); ++x) {
      cells[x] = weight_sum_ == 0 ? static_cast<double>(raw_[x])
                                  : static_cast<double>(raw_[x]) / s;
    }
    return WeightedPlane(target_.args, target_.levels, std::move(cells));
  }

 private:
  const Hamr4D& mem_;
  Direction dir_;
  Field target_;
  std::uint64_t weight_sum_;
  std::vector<std::int64_t> raw_;
};

std::uint32_t draw_level(std::span<const double> column, double total,
                         Rng& rng, std::uint32_t exclude) {
  const double u = rng.uniform() * total;
  double cum = 0.0;
  std::uint32_t last = exclude;
  for (std::uint32_t l = 0; l < column.size(); ++l) {
    if (l == exclude || column[l] <= 0.0) continue;
    cum += column[l];
    last = l;
    if (u < cum) return l;
  }
  return last;  // rounding left u at the upper edge
}

// Single-argument moves restricted to each column's support.
class NeighborProposer {
 public:
  explicit NeighborProposer(const WeightedPlane& plane) : plane_(plane) {
    support_.resize(plane.n_args());
    for (std::uint32_t a = 0; a < plane.n_args(); ++a) {
      for (double c : plane.column(a)) support_[a] += c > 0.0;
    }
  }

  struct Move {
    std::uint32_t arg;
    std::uint16_t from;
    std::uint16_t to;
  };

  std::optional<Move> propose(const QuantizedFn& f, Rng& rng) {
    eligible_.clear();
    for (std::uint32_t a = 0; a < plane_.n_args(); ++a) {
      const bool on_support = plane_(a, f.value(a)) > 0.0;
      if (support_[a] - (on_support ? 1u : 0u) >= 1) eligible_.push_back(a);
    }
    if (eligible_.empty()) return std::nullopt;
    const auto arg = eligible_[rng.below(eligible_.size())];
    const auto from = f.value(arg);
    const auto col = plane_.column(arg);
    double total = 0.0;
    for (std::uint32_t l = 0; l < col.size(); ++l) {
      if (l != from) total += col[l];
    }
    const auto to = draw_level(col, total, rng, from);
    return Move{arg, from, static_cast<std::uint16_t>(to)};
  }

 private:
  const WeightedPlane& plane_;
  std::vector<std::uint32_t> support_;
  std::vector<std::uint32_t> eligible_;
};

struct Scored {
  QuantizedFn object;
  double distance;
};

RetrievalOutcome failure(FailureKind kind, std::string message,
                         std::uint64_t evaluations) {
  RetrievalOutcome out;
  out.evaluations = evaluations;
  out.failure = RetrievalFailure{kind, std::move(message)};
  return out;
}

// Shared sampling phase of ST and SS. Returns the unique candidates in
// draw order with their distances.
std::vector<Scored> sample_and_score(const Hamr4D& mem, const QuantizedFn& cue,
                                     Direction dir, const SearchConfig& cfg,
                                     const WeightedPlane& target, Rng& rng) {
  std::vector<Scored> scored;
  std::set<std::vector<std::uint16_t>> seen;
  for (std::uint32_t s = 0; s < cfg.n_samples; ++s) {
    auto candidate = sample_plane(target, rng, cfg.uniform_fallback);
    std::vector<std::uint16_t> key(candidate.values().begin(),
                                   candidate.values().end());
    if (!seen.insert(std::move(key)).second) continue;
    const auto back = RawPlane(mem, candidate, reverse(dir)).finish();
    const double d = distance(back, cue, cfg.gate);
    scored.push_back({std::move(candidate), d});
  }
  return scored;
}

RetrievalOutcome best_of(const std::vector<Scored>& scored,
                         std::uint64_t evaluations) {
  const Scored* best = nullptr;
  for (const auto& s : scored) {
    if (!best || s.distance < best->distance) best = &s;
  }
  if (!best || std::isinf(best->distance)) {
    return failure(FailureKind::NoRecognizedCandidate,
                   "no candidate passed the recognition gate", evaluations);
  }
  RetrievalOutcome out;
  out.object = best->object;
  out.distance = best->distance;
  out.evaluations = evaluations;
  return out;
}

}  // namespace

WeightedPlane reduce(const Hamr4D& mem, const QuantizedFn& cue,
                     Direction dir) {
  check_source(mem, cue, dir);
  return RawPlane(mem, cue, dir).finish();
}

QuantizedFn sample_plane(const WeightedPlane& plane, Rng& rng,
                         bool uniform_fallback) {
  std::vector<std::uint16_t> values(plane.n_args());
  for (std::uint32_t a = 0; a < plane.n_args(); ++a) {
    const auto col = plane.column(a);
    double total = 0.0;
    for (double c : col) total += c;
    if (total <= 0.0) {
      if (!uniform_fallback) throw EmptyColumnError(a);
      values[a] = static_cast<std::uint16_t>(rng.below(plane.n_levels()));
      continue;
    }
    values[a] = static_cast<std::uint16_t>(
        draw_level(col, total, rng, plane.n_levels()));
  }
  return QuantizedFn(std::move(values), plane.n_levels());
}

bool eta_plane(const WeightedPlane& plane, const QuantizedFn& f,
               const MemParams& params) {
  params.validate();
  check_plane(plane, f);
  const double s_f = static_cast<double>(f.weight_sum());
  std::uint64_t violations = 0;
  double mass = 0.0;
  double omega_sum = 0.0;
  for (std::uint32_t a = 0; a < plane.n_args(); ++a) {
    double sum = 0.0;
    std::uint32_t count = 0;
    for (double c : plane.column(a)) {
      if (c > 0.0) {
        sum += c;
        ++count;
      }
    }
    const double omega = count == 0 ? 0.0 : sum / count;
    omega_sum += omega;
    const double w = plane(a, f.value(a));
    if (f.weight(a) != 0 && !(w > params.iota * omega)) ++violations;
    const double fw = s_f == 0.0 ? f.weight(a) : f.weight(a) / s_f;
    mass += w * fw;
  }
  const double omega_plane = omega_sum / plane.n_args();
  return violations <= params.xi && mass >= params.kappa * omega_plane;
}

double distance(const WeightedPlane& plane, const QuantizedFn& f,
                const MemParams& params) {
  check_plane(plane, f);
  const auto total_weight = f.weight_sum();
  if (total_weight == 0) {
    throw std::invalid_argument("distance: cue has zero total weight");
  }
  if (!eta_plane(plane, f, params)) {
    return std::numeric_limits<double>::infinity();
  }
  double acc = 0.0;
  for (std::uint32_t a = 0; a < plane.n_args(); ++a) {
    if (f.weight(a) == 0) continue;
    const auto col = plane.column(a);
    double mass = 0.0;
    double dev = 0.0;
    const double v0 = f.value(a);
    for (std::uint32_t l = 0; l < col.size(); ++l) {
      if (col[l] == 0.0) continue;
      const double diff = static_cast<double>(l) - v0;
      mass += col[l];
      dev += col[l] * diff * diff;
    }
    if (mass > 0.0) acc += f.weight(a) * (dev / mass);
  }
  return acc / static_cast<double>(total_weight);
}

QuantizedFn neighbor(const QuantizedFn& candidate, const WeightedPlane& plane,
                     Rng& rng) {
  check_plane(plane, candidate);
  NeighborProposer proposer(plane);
  auto out = candidate;
  if (auto move = proposer.propose(candidate, rng)) {
    out.set_value(move->arg, move->to);
  }
  return out;
}

RetrievalOutcome retrieve_rs(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg) {
  cfg.validate();
  check_source(mem, cue, dir);
  Rng rng(cfg.rng_seed);
  const auto target = RawPlane(mem, cue, dir).finish();
  RetrievalOutcome out;
  out.evaluations = 1;
  try {
    out.object = sample_plane(target, rng, cfg.uniform_fallback);
  } catch (const EmptyColumnError& e) {
    return failure(FailureKind::EmptyColumn, e.what(), 1);
  }
  const auto back = RawPlane(mem, *out.object, reverse(dir)).finish();
  out.distance = distance(back, cue, cfg.gate);
  return out;
}

RetrievalOutcome retrieve_st(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg) {
  cfg.validate();
  check_source(mem, cue, dir);
  Rng rng(cfg.rng_seed);
  const auto target = RawPlane(mem, cue, dir).finish();
  std::vector<Scored> scored;
  try {
    scored = sample_and_score(mem, cue, dir, cfg, target, rng);
  } catch (const EmptyColumnError& e) {
    return failure(FailureKind::EmptyColumn, e.what(), 0);
  }
  return best_of(scored, scored.size());
}

RetrievalOutcome retrieve_ss(const Hamr4D& mem, const QuantizedFn& cue,
                             Direction dir, const SearchConfig& cfg) {
  cfg.validate();
  check_source(mem, cue, dir);
  Rng rng(cfg.rng_seed);
  const auto target = RawPlane(mem, cue, dir).finish();
  std::vector<Scored> scored;
  try {
    scored = sample_and_score(mem, cue, dir, cfg, target, rng);
  } catch (const EmptyColumnError& e) {
    return failure(FailureKind::EmptyColumn, e.what(), 0);
  }
  std::uint64_t evaluations = scored.size();

  NeighborProposer proposer(target);
  const auto back_dir = reverse(dir);
  const std::size_t n_start = scored.size();
  for (std::size_t s = 0; s < n_start; ++s) {
    auto current = scored[s].object;
    double current_d = scored[s].distance;
    RawPlane back(mem, current, back_dir);
    bool improved = false;
    for (std::uint32_t step = 0; step < cfg.descent_budget; ++step) {
      const auto move = proposer.propose(current, rng);
      if (!move) break;
      // Sampled candidates carry unit weights.
      back.apply(move->arg, move->to, 1);
      back.apply(move->arg, move->from, -1);
      const double d = distance(back.finish(), cue, cfg.gate);
      ++evaluations;
      if (d < current_d) {
        current.set_value(move->arg, move->to);
        current_d = d;
        improved = true;
      } else {
        back.apply(move->arg, move->from, 1);
        back.apply(move->arg, move->to, -1);
      }
    }
    if (improved) scored.push_back({std::move(current), current_d});
  }
  return best_of(scored, evaluations);
}

RetrievalOutcome retrieve(Method method, const Hamr4D& mem,
                          const QuantizedFn& cue, Direction dir,
                          const SearchConfig& cfg) {
  switch (method) {
    case Method::RS: return retrieve_rs(mem, cue, dir, cfg);
    case Method::ST: return retrieve_st(mem, cue, dir, cfg);
    case Method::SS: return retrieve_ss(mem, cue, dir, cfg);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace eham
