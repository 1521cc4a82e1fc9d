#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "memory/hamr.hpp"
#include "support/oracle.hpp"

using namespace eham;

namespace {

QuantizedFn fn(std::vector<std::uint16_t> v, std::uint32_t levels) {
  return QuantizedFn(std::move(v), levels);
}

// Memory with the given raw cells, for tests that need specific planes.
Hamr4D with_cells(Dims d, std::vector<std::uint16_t> cells,
                  std::uint32_t cap = kDefaultCap) {
  return Hamr4D(d, cap, std::move(cells));
}

Hamr4D random_memory(Rng& rng, Dims d, int pairs, std::uint32_t cap = kDefaultCap,
                     std::uint32_t max_weight = 1) {
  Hamr4D mem(d, cap);
  for (int k = 0; k < pairs; ++k) mem.register_pair(testgen::random_pair(rng, d, max_weight));
  return mem;
}

}  // namespace

TEST_CASE("new memory is empty") {
  Hamr4D small({2, 2, 2, 2}, 255);
  CHECK(small.cells().size() == 16);
  CHECK(std::all_of(small.cells().begin(), small.cells().end(),
                    [](auto c) { return c == 0; }));

  Hamr4D full({64, 64, 16, 16}, 65535);
  CHECK(full.cells().size() == 1048576);

  Hamr4D one({1, 1, 1, 1}, 1);
  CHECK(one.cells().size() == 1);
  CHECK(one.at(0, 0, 0, 0) == 0);
}

TEST_CASE("new memory rejects zero dims and cap") {
  CHECK_THROWS_AS(Hamr4D({0, 2, 2, 2}, 10), std::invalid_argument);
  CHECK_THROWS_AS(Hamr4D({2, 2, 2, 0}, 10), std::invalid_argument);
  CHECK_THROWS_AS(Hamr4D({2, 2, 2, 2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Hamr4D({2, 2, 2, 2}, kMaxCap + 1), std::invalid_argument);
}

TEST_CASE("register adds and saturates") {
  const PairCue cue{fn({0, 1}, 2), fn({1, 0}, 2)};
  Hamr4D mem({2, 2, 2, 2});
  mem.register_pair(cue);
  mem.register_pair(cue);
  CHECK(mem.at(0, 0, 0, 1) == 2);
  CHECK(mem.at(1, 1, 1, 0) == 2);

  Hamr4D capped({2, 2, 2, 2}, 1);
  capped.register_pair(cue);
  capped.register_pair(cue);
  CHECK(capped.at(0, 0, 0, 1) == 1);
  CHECK(capped.at(1, 1, 1, 0) == 1);
}

TEST_CASE("register touches exactly the induced cells") {
  Hamr4D mem({2, 2, 2, 2});
  mem.register_pair({fn({0, 1}, 2), fn({1, 0}, 2)});
  std::vector<std::array<std::uint32_t, 4>> set;
  for (std::uint32_t i = 0; i < 2; ++i)
    for (std::uint32_t j = 0; j < 2; ++j)
      for (std::uint32_t k = 0; k < 2; ++k)
        for (std::uint32_t l = 0; l < 2; ++l)
          if (mem.at(i, j, k, l)) {
            CHECK(mem.at(i, j, k, l) == 1);
            set.push_back({i, j, k, l});
          }
  const std::vector<std::array<std::uint32_t, 4>> want{
      {0, 0, 0, 1}, {0, 1, 0, 0}, {1, 0, 1, 1}, {1, 1, 1, 0}};
  CHECK(set == want);
}

TEST_CASE("register multiplies argument weights") {
  Hamr4D mem({2, 1, 2, 2});
  mem.register_pair({QuantizedFn({1, 0}, {3, 2}, 2), QuantizedFn({1}, {5}, 2)});
  CHECK(mem.at(0, 0, 1, 1) == 15);
  CHECK(mem.at(1, 0, 0, 1) == 10);
  CHECK(mem.at(0, 0, 0, 1) == 0);
}

TEST_CASE("register rejects mismatched cues") {
  Hamr4D mem({2, 2, 2, 2});
  CHECK_THROWS_AS(mem.register_pair({fn({0, 1, 0}, 2), fn({1, 0}, 2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mem.register_pair({fn({0, 1}, 3), fn({1, 0}, 2)}),
                  std::invalid_argument);
  CHECK(std::all_of(mem.cells().begin(), mem.cells().end(),
                    [](auto c) { return c == 0; }));
}

TEST_CASE("omega of a plane") {
  Hamr4D empty({2, 2, 2, 2});
  CHECK(empty.omega_pair(1, 1) == 0.0);

  // plane (0,0) holds {3, 0, 0, 1}
  auto mem = with_cells({1, 1, 2, 2}, {3, 0, 0, 1});
  CHECK(mem.omega_pair(0, 0) == doctest::Approx(2.0));

  auto flat = with_cells({1, 1, 2, 2}, {7, 7, 7, 7});
  CHECK(flat.omega_pair(0, 0) == 7.0);

  CHECK_THROWS_AS(mem.omega_pair(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(mem.omega_pair(0, 1), std::invalid_argument);
}

TEST_CASE("omega mean") {
  CHECK(Hamr4D({2, 2, 2, 2}).omega_mean() == 0.0);

  Hamr4D one({2, 2, 2, 2});
  one.register_pair({fn({0, 1}, 2), fn({1, 0}, 2)});
  CHECK(one.omega_mean() == 1.0);

  auto flat = with_cells({2, 1, 1, 2}, {4, 4, 4, 4});
  CHECK(flat.omega_mean() == 4.0);
}

TEST_CASE("thresholded memory") {
  Rng rng(11);
  auto mem = random_memory(rng, {3, 3, 4, 4}, 6);
  for (std::uint32_t x = 0; x < mem.cells().size(); ++x) {
    const std::uint32_t l = x % 4, k = (x / 4) % 4, j = (x / 16) % 3, i = x / 48;
    CHECK(mem.thresholded(0.0, i, j, k, l) == mem.at(i, j, k, l));
  }

  auto two = with_cells({1, 1, 1, 2}, {4, 1});
  CHECK(two.thresholded(0.5, 0, 0, 0, 0) == 4);
  CHECK(two.thresholded(0.5, 0, 0, 0, 1) == 0);

  // Strict: a cell equal to iota * omega is dropped.
  auto flat = with_cells({1, 1, 1, 2}, {2, 2});
  CHECK(flat.thresholded(1.0, 0, 0, 0, 0) == 0);
  CHECK(flat.thresholded(0.99, 0, 0, 0, 0) == 2);

  Hamr4D empty({1, 1, 2, 2});
  CHECK(empty.thresholded(3.0, 0, 0, 1, 1) == 0);
  CHECK_THROWS_AS(empty.thresholded(0.0, 0, 0, 2, 0), std::invalid_argument);
}

TEST_CASE("recognize examples") {
  const PairCue cue{fn({0, 1}, 2), fn({1, 0}, 2)};
  Hamr4D mem({2, 2, 2, 2});
  auto r = mem.recognize(cue, {});
  CHECK_FALSE(r.accepted);
  CHECK(r.violations == 4);

  mem.register_pair(cue);
  r = mem.recognize(cue, {});
  CHECK(r.accepted);
  CHECK(r.violations == 0);
  CHECK(r.rho == doctest::Approx(1.0));

  const PairCue heavy{cue.fa.scaled(5), cue.fb.scaled(5)};
  CHECK(mem.recognize(heavy, {}) == r);
}

TEST_CASE("recognize parameters") {
  Hamr4D mem({2, 2, 2, 2});
  mem.register_pair({fn({0, 1}, 2), fn({1, 0}, 2)});
  const PairCue other{fn({0, 0}, 2), fn({1, 0}, 2)};
  auto r = mem.recognize(other, {});
  CHECK(r.violations == 2);
  CHECK_FALSE(r.accepted);
  CHECK(mem.recognize(other, {0.0, 0.0, 2}).accepted);
  // rho = 0.5 against omega_H = 1
  CHECK(r.rho == doctest::Approx(0.5));
  CHECK(mem.recognize(other, {0.0, 0.5, 2}).accepted);
  CHECK_FALSE(mem.recognize(other, {0.0, 0.6, 2}).accepted);
}

TEST_CASE("recognize degenerate cue") {
  Hamr4D mem({2, 2, 2, 2});
  mem.register_pair({fn({0, 1}, 2), fn({1, 0}, 2)});
  const PairCue zero{QuantizedFn({0, 1}, {0, 0}, 2), QuantizedFn({1, 0}, {0, 0}, 2)};
  auto r = mem.recognize(zero, {});
  CHECK(r.degenerate);
  CHECK(r.rho == 0.0);
  CHECK(r.violations == 4);
  CHECK_FALSE(r.accepted);
  CHECK(mem.recognize(zero, {0.0, 0.0, 4}).accepted);
  CHECK_FALSE(mem.recognize(zero, {0.0, 0.1, 4}).accepted);
}

TEST_CASE("recognize rejects bad input") {
  Hamr4D mem({2, 2, 2, 2});
  CHECK_THROWS_AS(mem.recognize({fn({0}, 2), fn({1, 0}, 2)}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mem.recognize({fn({0, 1}, 2), fn({1, 0}, 2)}, {-0.1, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mem.recognize({fn({0, 1}, 2), fn({1, 0}, 2)}, {0, -1, 0}),
                  std::invalid_argument);
}

TEST_CASE("entropy examples") {
  Hamr4D empty({2, 2, 2, 2});
  CHECK(empty.entropy_pair(0, 1) == 0.0);
  CHECK(empty.entropy() == 0.0);

  auto two = with_cells({1, 1, 2, 2}, {3, 0, 3, 0});
  CHECK(two.entropy_pair(0, 0) == doctest::Approx(1.0));

  auto skew = with_cells({1, 1, 2, 2}, {1, 1, 2, 0});
  CHECK(skew.entropy_pair(0, 0) == doctest::Approx(1.5));

  // every plane two equal cells
  auto all = with_cells({2, 1, 1, 2}, {5, 5, 1, 1});
  CHECK(all.entropy() == doctest::Approx(1.0));

  CHECK_THROWS_AS(all.entropy_pair(2, 0), std::invalid_argument);
}

TEST_CASE("register agrees with the set oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Dims d{1 + static_cast<std::uint32_t>(rng.below(3)),
                 1 + static_cast<std::uint32_t>(rng.below(3)),
                 1 + static_cast<std::uint32_t>(rng.below(4)),
                 1 + static_cast<std::uint32_t>(rng.below(4))};
    const std::uint32_t cap = 1 + static_cast<std::uint32_t>(rng.below(30));
    Hamr4D mem(d, cap);
    oracle::Table table{d, cap, {}};
    const int pairs = static_cast<int>(rng.below(11));
    for (int k = 0; k < pairs; ++k) {
      auto cue = testgen::random_pair(rng, d, 4);
      mem.register_pair(cue);
      oracle::add(table, cue.fa, cue.fb);
    }
    for (std::uint32_t i = 0; i < d.n; ++i)
      for (std::uint32_t j = 0; j < d.m; ++j)
        for (std::uint32_t k = 0; k < d.p; ++k)
          for (std::uint32_t l = 0; l < d.q; ++l)
            REQUIRE(mem.at(i, j, k, l) == table.get(i, j, k, l));
  }
}

TEST_CASE("recognize, omega and entropy agree with oracles") {
  Rng rng(22);
  const Dims d{3, 3, 4, 4};
  for (int trial = 0; trial < 100; ++trial) {
    auto mem = random_memory(rng, d, static_cast<int>(rng.below(11)), kDefaultCap, 3);
    for (std::uint32_t i = 0; i < d.n; ++i)
      for (std::uint32_t j = 0; j < d.m; ++j)
        CHECK(mem.omega_pair(i, j) == doctest::Approx(oracle::omega(mem, i, j)).epsilon(1e-12));
    CHECK(std::abs(mem.omega_mean() - oracle::omega_h(mem)) < 1e-9);
    CHECK(std::abs(mem.entropy() - oracle::entropy(mem)) < 1e-9);

    const MemParams prm{rng.uniform(), rng.uniform() * 2, rng.below(6)};
    const auto cue = testgen::random_pair(rng, d, 3);
    const auto got = mem.recognize(cue, prm);
    const auto want = oracle::recognize(mem, cue.fa, cue.fb, prm);
    CHECK(got.violations == want.violations);
    CHECK(got.accepted == want.accepted);
    CHECK(std::abs(got.rho - want.rho) < 1e-9);
  }
}

TEST_CASE("memory properties") {
  Rng rng(23);
  const Dims d{3, 3, 4, 4};
  for (int trial = 0; trial < 100; ++trial) {
    // saturation and monotonicity
    const std::uint32_t cap = 1 + static_cast<std::uint32_t>(rng.below(5));
    Hamr4D mem(d, cap);
    for (int k = 0; k < 8; ++k) {
      const std::vector<std::uint16_t> before(mem.cells().begin(), mem.cells().end());
      mem.register_pair(testgen::random_pair(rng, d));
      for (std::size_t x = 0; x < before.size(); ++x) {
        REQUIRE(mem.cells()[x] >= before[x]);
        REQUIRE(mem.cells()[x] <= cap);
      }
    }

    // commutativity below cap
    const auto p1 = testgen::random_pair(rng, d, 3);
    const auto p2 = testgen::random_pair(rng, d, 3);
    auto base = random_memory(rng, d, 3);
    auto a = base, b = base;
    a.register_pair(p1);
    a.register_pair(p2);
    b.register_pair(p2);
    b.register_pair(p1);
    CHECK(std::equal(a.cells().begin(), a.cells().end(), b.cells().begin()));

    // containment
    CHECK(a.recognize(p1, {}).accepted);
    CHECK(a.recognize(p2, {}).accepted);

    // iota monotone, kappa antitone, xi monotone
    const auto cue = testgen::random_pair(rng, d);
    std::uint64_t last = 0;
    for (double iota : {0.0, 0.25, 0.5, 1.0, 1.5, 3.0}) {
      const auto v = a.recognize(cue, {iota, 0.0, 0}).violations;
      CHECK(v >= last);
      last = v;
    }
    bool prev = true;
    for (double kappa : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0}) {
      const bool acc = a.recognize(cue, {0.0, kappa, 9}).accepted;
      CHECK((prev || !acc));
      prev = acc;
    }
    prev = false;
    for (std::uint64_t xi : {0, 1, 2, 4, 9}) {
      const bool acc = a.recognize(cue, {0.0, 0.0, xi}).accepted;
      CHECK((!prev || acc));
      prev = acc;
    }

    // entropy bounds
    const double e = a.entropy();
    CHECK(e >= 0.0);
    CHECK(e <= std::log2(double(d.p * d.q)) + 1e-12);
  }
}

TEST_CASE("recognition is invariant to cue scaling") {
  Rng rng(24);
  const Dims d{3, 3, 4, 4};
  for (int trial = 0; trial < 100; ++trial) {
    auto mem = random_memory(rng, d, 1 + static_cast<int>(rng.below(8)));
    const auto cue = testgen::random_pair(rng, d, 4);
    const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(50));
    const MemParams prm{rng.uniform(), rng.uniform(), rng.below(4)};
    const auto r1 = mem.recognize(cue, prm);
    const auto r2 = mem.recognize({cue.fa.scaled(c), cue.fb.scaled(c)}, prm);
    CHECK(r1.accepted == r2.accepted);
    CHECK(r1.violations == r2.violations);
    CHECK(r1.rho == doctest::Approx(r2.rho).epsilon(1e-12));
  }
}

TEST_CASE("omega table matches direct recognition") {
  Rng rng(25);
  const Dims d{4, 3, 5, 2};
  auto mem = random_memory(rng, d, 9);
  const OmegaTable omega(mem);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cue = testgen::random_pair(rng, d);
    const MemParams prm{0.3, 0.5, 2};
    CHECK(recognize(mem, omega, cue, prm) == mem.recognize(cue, prm));
  }
}
