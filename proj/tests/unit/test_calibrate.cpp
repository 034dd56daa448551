#include <doctest.h>

#include <cmath>

#include "ecgd/calibrate.hpp"
#include "ecgd/metrics.hpp"
#include "ecgd/rng.hpp"
#include "oracles.hpp"

using namespace ecgd;

namespace {

PixelTrace trace_of(std::vector<double> rows) {
  PixelTrace t;
  for (double r : rows) t.y.emplace_back(r);
  return t;
}

DigitalSignal wiggle(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DigitalSignal s;
  double v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v = 0.7 * v + rng.normal();
    s.mv.push_back(v);
  }
  return s;
}

// ref[n] = pred[n - k]
DigitalSignal delayed(const DigitalSignal& pred, int k) {
  DigitalSignal out = pred;
  for (std::size_t n = 0; n < pred.size(); ++n) {
    const long src = static_cast<long>(n) - k;
    out.mv[n] = src >= 0 && src < static_cast<long>(pred.size()) ? pred.mv[static_cast<std::size_t>(src)] : 0.0;
  }
  return out;
}

}  // namespace

TEST_CASE("sample count follows the trace duration") {
  const DigitalSignal s = pixels_to_physical(trace_of(std::vector<double>(400, 50.0)), {40, 40});
  CHECK(s.size() == 201);
  CHECK(s.sampling_rate == 100.0);
  for (double v : s.mv) CHECK(v == s.mv.front());
}

TEST_CASE("forty pixels of excursion is half a millivolt") {
  std::vector<double> rows(100, 60.0);
  for (std::size_t i = 50; i < 100; ++i) rows[i] = 20.0;
  const DigitalSignal s = pixels_to_physical(trace_of(rows), {40, 40});
  CHECK(s.mv.back() - s.mv.front() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("linear resampling between columns") {
  // 0.1 s per column and 0.25 mV per row, so samples fall every tenth of a column.
  const DigitalSignal s = pixels_to_physical(trace_of({0, 10, 20, 30}), {2, 2});
  REQUIRE(s.size() == 41);
  for (std::size_t i = 0; i < 31; ++i) CHECK(s.mv[i] == doctest::Approx(-0.25 * 10.0 * (i / 10.0)).epsilon(1e-12));
  for (std::size_t i = 31; i < 41; ++i) CHECK(s.mv[i] == doctest::Approx(-7.5));
}

TEST_CASE("calibration errors") {
  CHECK_THROWS_AS(pixels_to_physical(trace_of({1, 2}), {0, 40}), Error);
  PixelTrace gap = trace_of({1, 2});
  gap.y.emplace_back(std::nullopt);
  try {
    (void)pixels_to_physical(gap, {40, 40});
    FAIL("expected calibration error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::calibration);
  }
}

TEST_CASE("delay of four is recovered") {
  const DigitalSignal pred = wiggle(300, 1);
  const DigitalSignal ref = delayed(pred, 4);
  const LagAlignment a = align_lag(pred, ref);
  CHECK(a.lag == 4);
  CHECK(a.correlation == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(a.pred.size() == 296);
  CHECK(a.pred.mv == a.ref.mv);
}

TEST_CASE("identical signals need no lag") {
  const DigitalSignal s = wiggle(100, 2);
  CHECK(align_lag(s, s).lag == 0);
}

TEST_CASE("shifts outside the window stay inside it") {
  const DigitalSignal pred = wiggle(250, 3);
  const DigitalSignal ref = delayed(pred, 15);
  const LagAlignment a = align_lag(pred, ref, 10);
  CHECK(std::abs(a.lag) <= 10);
  CHECK(a.lag == oracle::best_lag_brute_force(pred.mv, ref.mv, 10));
}

TEST_CASE("every shift in the window is recovered") {
  for (int k = -10; k <= 10; ++k) {
    const DigitalSignal pred = wiggle(200, 40 + static_cast<std::uint64_t>(k + 10));
    CHECK(align_lag(pred, delayed(pred, k)).lag == k);
  }
}

TEST_CASE("alignment errors") {
  DigitalSignal a = wiggle(20, 5);
  DigitalSignal b = a;
  b.sampling_rate = 250;
  try {
    (void)align_lag(a, b);
    FAIL("expected rate_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rate_mismatch);
  }
  const DigitalSignal one{100, {1.0}};
  try {
    (void)align_lag(one, one);
    FAIL("expected short_overlap");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::short_overlap);
  }
}

TEST_CASE("median baseline") {
  const DigitalSignal s = remove_baseline({100, {1, 1, 1, 5}});
  CHECK(s.mv == std::vector<double>{0, 0, 0, 4});
  const DigitalSignal z{100, {-1, 0, 2}};
  CHECK(remove_baseline(z) == z);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("baseline removal leaves the correlation alone") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DigitalSignal a = wiggle(150, seed);
    DigitalSignal b = wiggle(150, seed + 100);
    for (std::size_t i = 0; i < b.size(); ++i) b.mv[i] += a.mv[i] + 3.0;
    CHECK(std::abs(pearson(remove_baseline(a), remove_baseline(b)) - pearson(a, b)) < 1e-12);
  }
}
