#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sikam/error.hpp"
#include "sikam/shiftkam.hpp"
#include "sikam/specmurt.hpp"

using namespace sikam;

namespace {

std::vector<double> circshift(const std::vector<double>& col, int d) {
  const int n = static_cast<int>(col.size());
  std::vector<double> out(col.size());
  for (int f = 0; f < n; ++f) out[static_cast<size_t>(((f + d) % n + n) % n)] = col[static_cast<size_t>(f)];
  return out;
}

double norm(const std::vector<double>& v) { return std::sqrt(oracle::distance(v, std::vector<double>(v.size(), 0.0))); }

}  // namespace

TEST_CASE("specmurt of a constant column has no AC content") {
  const auto s = specmurt_transform(std::vector<double>(32, 2.5), 1);
  CHECK(s.dropped_head == 1);
  REQUIRE(s.coeffs.size() == 16);
  for (double v : s.coeffs) CHECK(std::abs(v) < 1e-12);
  CHECK(specmurt_transform(std::vector<double>(33, 1.0), 0).coeffs.size() == 17);
  CHECK(specmurt_transform(std::vector<double>(33, 1.0), 0).coeffs[0] == doctest::Approx(33.0));
}

TEST_CASE("specmurt is invariant to circular shifts") {
  std::mt19937_64 rng(1);
  const auto m = oracle::random_matrix(64, 1, rng);
  const auto col = oracle::column(m, 0);
  const auto base = specmurt_transform(col, 1);
  for (int d : {1, 7, 31, 63}) {
    const auto shifted = specmurt_transform(circshift(col, d), 1);
    for (size_t i = 0; i < base.coeffs.size(); ++i) CHECK(std::abs(shifted.coeffs[i] - base.coeffs[i]) < 1e-9);
  }
}

TEST_CASE("two impulses give a cosine modulus pattern") {
  const int n = 48, d = 5;
  std::vector<double> col(n, 0.0);
  col[3] = 1.0;
  col[3 + d] = 1.0;
  const auto s = specmurt_transform(col, 0);
  const auto ref = oracle::dft_modulus(col);
  REQUIRE(s.coeffs.size() == ref.size());
  for (size_t k = 0; k < ref.size(); ++k) {
    CHECK(s.coeffs[k] == doctest::Approx(ref[k]).scale(1.0).epsilon(1e-12));
    CHECK(s.coeffs[k] == doctest::Approx(std::abs(2.0 * std::cos(std::numbers::pi * k * d / n))).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("specmurt rejects a drop_head that leaves nothing") {
  CHECK_THROWS_AS(specmurt_transform(std::vector<double>(10, 1.0), 6), InvalidArgument);
  CHECK_THROWS_AS(specmurt_transform(std::vector<double>(10, 1.0), -1), InvalidArgument);
  CHECK_NOTHROW(specmurt_transform(std::vector<double>(10, 1.0), 5));
}

TEST_CASE("padded shifts of harmonic columns stay close in the specmurt domain") {
  for (int d : {-24, -11, -3, 5, 16, 24}) {
    const auto col = oracle::harmonic_column(240, 80.0, 1.2, 6);
    const auto a = specmurt_transform(col, 1).coeffs;
    const auto b = specmurt_transform(shift_frame(col, d), 1).coeffs;
    CAPTURE(d);
    CHECK(std::sqrt(oracle::distance(a, b)) / norm(a) < 0.1);
  }
}

TEST_CASE("knn_specmurt ranks circular transpositions first") {
  std::mt19937_64 rng(2);
  const auto base = oracle::column(oracle::random_matrix(40, 1, rng), 0);
  std::vector<std::vector<double>> cols{base};
  for (int t = 0; t < 6; ++t) cols.push_back(oracle::column(oracle::random_matrix(40, 1, rng), 0));
  cols.push_back(circshift(base, 9));
  cols.push_back(circshift(base, -4));
  const auto ranked = knn_specmurt(testing::mag_from_columns(cols), 0, testing::range(9), 2);
  REQUIRE(ranked.size() == 2);
  std::vector<int> frames{ranked[0].frame, ranked[1].frame};
  std::sort(frames.begin(), frames.end());
  CHECK(frames == std::vector<int>{7, 8});
  CHECK(ranked[0].distance < 1e-18);
  CHECK(ranked[1].distance < 1e-18);
}

TEST_CASE("knn_specmurt matches a brute-force DFT oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = oracle::random_matrix(30, 15, rng);
    const int target = trial;
    const auto ranked = knn_specmurt(testing::mag_from(m), target, testing::range(15), 6, 1);
    std::vector<std::pair<double, int>> ref;
    auto head = [](std::vector<double> v) { v.erase(v.begin()); return v; };
    const auto tv = head(oracle::dft_modulus(oracle::column(m, target)));
    for (int t = 0; t < 15; ++t)
      if (t != target) ref.emplace_back(oracle::distance(tv, head(oracle::dft_modulus(oracle::column(m, t)))), t);
    std::sort(ref.begin(), ref.end());
    for (size_t i = 0; i < 6; ++i) {
      CHECK(ranked[i].frame == ref[i].second);
      CHECK(ranked[i].distance == doctest::Approx(ref[i].first).epsilon(1e-9));
    }
  }
}

TEST_CASE("a transposed tone beats a noise frame") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> noise(120);
  for (auto& v : noise) v = u(rng);
  const std::vector<std::vector<double>> cols{oracle::harmonic_column(120, 40.0, 1.0, 1),
                                              noise, oracle::harmonic_column(120, 57.0, 1.0, 1)};
  const auto ranked = knn_specmurt(testing::mag_from_columns(cols), 0, testing::range(3), 2);
  CHECK(ranked[0].frame == 2);
  CHECK(ranked[1].frame == 1);
}

TEST_CASE("knn_specmurt checks the pool size") {
  std::mt19937_64 rng(5);
  const auto mag = testing::mag_from(oracle::random_matrix(16, 4, rng));
  CHECK_THROWS_AS(knn_specmurt(mag, 0, testing::range(4), 4), InfeasibleConfig);
  CHECK_NOTHROW(knn_specmurt(mag, 0, testing::range(4), 3));
}

TEST_CASE("deconvolution of identical columns peaks at lag zero") {
  const auto y = oracle::harmonic_column(240, 60.0);
  const auto sharp = estimate_shift_deconv(y, y, 1e-8);
  CHECK(sharp.delta == 0);
  CHECK(sharp.peak_value == doctest::Approx(1.0));
  CHECK(sharp.peak_ratio > 100.0);
  // Stronger regularization spreads the impulse but keeps its position.
  const auto est = estimate_shift_deconv(y, y);
  CHECK(est.delta == 0);
  CHECK(est.peak_value <= 1.0);
  CHECK(est.peak_ratio > 1.0);
}

TEST_CASE("deconvolution sign follows shift_frame") {
  std::mt19937_64 rng(6);
  const auto y = oracle::column(oracle::random_matrix(64, 1, rng), 0);
  const auto z = circshift(y, 5);  // z(f + 5) = y(f)
  const auto est = estimate_shift_deconv(y, z);
  CHECK(est.delta == 5);
  const auto aligned = shift_frame(z, est.delta);
  for (int f = 0; f < 59; ++f) CHECK(aligned[static_cast<size_t>(f)] == y[static_cast<size_t>(f)]);
  CHECK(estimate_shift_deconv(y, circshift(y, -9)).delta == -9);
}

TEST_CASE("deconvolution of frames three semitones apart") {
  const auto y = oracle::harmonic_column(240, 70.0);
  const auto z = oracle::harmonic_column(240, 76.0);
  const auto est = estimate_shift_deconv(y, z);
  CHECK(std::abs(est.delta - oracle::best_alignment(y, z)) <= 1);
  CHECK(est.delta == 6);
  const auto y2 = oracle::harmonic_column(240, 70.0);
  const auto z2 = oracle::harmonic_column(240, 64.0);
  CHECK(std::abs(estimate_shift_deconv(y2, z2).delta - oracle::best_alignment(y2, z2)) <= 1);
}

TEST_CASE("deconvolution rejects silent or mismatched input") {
  const std::vector<double> zero(32, 0.0), one(32, 1.0);
  CHECK_THROWS_AS(estimate_shift_deconv(one, zero), InvalidArgument);
  CHECK_THROWS_AS(estimate_shift_deconv(zero, one), InvalidArgument);
  CHECK_THROWS_AS(estimate_shift_deconv(one, std::vector<double>(31, 1.0)), InvalidArgument);
}

TEST_CASE("deconvolution agrees with the exhaustive alignment on noisy pairs") {
  std::mt19937_64 rng(7);
  int agree = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const auto pair = testing::deconv_pair(rng);
    const auto est = estimate_shift_deconv(pair.y, pair.z);
    CHECK(std::abs(est.delta) <= 120);
    if (std::abs(est.delta - oracle::best_alignment(pair.y, pair.z)) <= 1) ++agree;
  }
  CHECK(agree >= 0.95 * n);
}

TEST_CASE("pruned search") {
  SUBCASE("P = 0 keeps the specmurt pre-selection") {
    std::mt19937_64 rng(8);
    const auto mag = testing::mag_from(oracle::random_matrix(48, 20, rng));
    const SpecmurtCache cache(mag, 1);
    const auto nset = knn_specmurt_pruned(mag, cache, 0, testing::range(20), 5, 0, 10);
    const auto ranked = knn_specmurt(cache, 0, testing::range(20), 5);
    std::vector<int> a, b;
    for (const auto& n : nset.neighbors) a.push_back(n.frame);
    for (const auto& r : ranked) b.push_back(r.frame);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    for (const auto& n : nset.neighbors) CHECK(std::abs(n.shift) <= 10);
  }
  SUBCASE("transposed copies are kept with aligning shifts") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    std::vector<std::vector<double>> cols{oracle::harmonic_column(240, 90.0)};
    for (int t = 0; t < 10; ++t) {
      std::vector<double> c(240);
      for (auto& v : c) v = u(rng);
      cols.push_back(c);
    }
    const int offsets[] = {-10, 5, 17};
    for (int d : offsets) cols.push_back(oracle::harmonic_column(240, 90.0 + d));
    const auto mag = testing::mag_from_columns(cols);
    const auto nset = knn_specmurt_pruned(mag, SpecmurtCache(mag, 1), 0, testing::range(14), 3, 6, 24);
    REQUIRE(nset.size() == 3);
    for (const auto& n : nset.neighbors) {
      REQUIRE(n.frame >= 11);
      CHECK(n.shift == offsets[n.frame - 11]);
      CHECK(n.distance < 1e-6);
    }
  }
  SUBCASE("kept frames are no farther than discarded ones") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const auto mag = testing::mag_from(oracle::random_matrix(40, 30, rng));
      const SpecmurtCache cache(mag, 1);
      const auto nset = knn_specmurt_pruned(mag, cache, trial, testing::range(30), 4, 8, 8);
      const auto pool = knn_specmurt(cache, trial, testing::range(30), 12);
      const auto tcol = oracle::column(mag.data, trial);
      double worst_kept = 0.0;
      for (const auto& n : nset.neighbors) worst_kept = std::max(worst_kept, n.distance);
      for (const auto& r : pool) {
        if (std::any_of(nset.neighbors.begin(), nset.neighbors.end(), [&](const Neighbor& n) { return n.frame == r.frame; }))
          continue;
        const auto ccol = oracle::column(mag.data, r.frame);
        const int delta = std::clamp(estimate_shift_deconv(tcol, ccol).delta, -8, 8);
        CHECK(worst_kept <= oracle::distance(tcol, oracle::materialize_shift(ccol, delta)) + 1e-12);
      }
    }
  }
  SUBCASE("unclamped shifts may exceed the range") {
    const std::vector<std::vector<double>> cols{oracle::harmonic_column(240, 60.0), oracle::harmonic_column(240, 100.0),
                                                oracle::harmonic_column(240, 61.0, 3.0)};
    const auto mag = testing::mag_from_columns(cols);
    const SpecmurtCache cache(mag, 1);
    const auto clamped = knn_specmurt_pruned(mag, cache, 0, testing::range(3), 2, 0, 10);
    const auto free = knn_specmurt_pruned(mag, cache, 0, testing::range(3), 2, 0, 10, {false, 1e-2});
    auto shift_of = [](const NeighborSet& s, int frame) {
      for (const auto& n : s.neighbors)
        if (n.frame == frame) return n.shift;
      return -999;
    };
    CHECK(shift_of(clamped, 1) == 10);
    CHECK(shift_of(free, 1) == 40);
  }
  SUBCASE("the pool must hold K + P frames") {
    std::mt19937_64 rng(11);
    const auto mag = testing::mag_from(oracle::random_matrix(16, 8, rng));
    CHECK_THROWS_AS(knn_specmurt_pruned(mag, SpecmurtCache(mag, 1), 0, testing::range(8), 4, 4, 4), InfeasibleConfig);
  }
}

TEST_CASE("pruned neighbour sets agree with the exhaustive search on transpositions") {
  int hits = 0, total = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const auto suite = testing::transposition_suite(seed);
    const auto frames = testing::range(suite.mag.num_frames());
    const auto exact = knn_shift_exhaustive(suite.mag, 0, frames, 10, 48);
    const auto fast = knn_specmurt_pruned(suite.mag, SpecmurtCache(suite.mag, 1), 0, frames, 10, 20, 48);
    for (const auto& e : exact.neighbors) {
      ++total;
      for (const auto& f : fast.neighbors)
        if (f.frame == e.frame && std::abs(f.shift - e.shift) <= 1) ++hits;
    }
  }
  CHECK(hits >= 0.7 * total);
}
