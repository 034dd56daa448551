#include <doctest.h>

#include <cmath>

#include "ecgd/metrics.hpp"
#include "ecgd/rng.hpp"
#include "oracles.hpp"

using namespace ecgd;

namespace {

DigitalSignal sig(std::vector<double> v) { return DigitalSignal{100, std::move(v)}; }

EvalReport report(double m, double r) {
  EvalReport e;
  e.mse = m;
  e.pearson = r;
  return e;
}

}  // namespace

TEST_CASE("mean squared error") {
  const DigitalSignal ref = sig({0.2, -0.4, 1.1, 0.0});
  CHECK(mse(ref, ref) == 0.0);
  DigitalSignal shifted = ref;
  for (auto& v : shifted.mv) v += 0.1;
  CHECK(std::abs(mse(shifted, ref) - 0.01) < 1e-12);
  CHECK(std::abs(mse(sig({0, 2, 2}), sig({0, 1, 2})) - 1.0 / 3.0) < 1e-12);
  try {
    (void)mse(sig({1, 2}), sig({1, 2, 3}));
    FAIL("expected length_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::length_mismatch);
  }
}

TEST_CASE("pearson correlation") {
  const DigitalSignal ref = sig({1, 3, 2, 5, 4});
  CHECK(std::abs(pearson(ref, ref) - 1.0) < 1e-12);
  DigitalSignal neg = ref;
  DigitalSignal affine = ref;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    neg.mv[i] = -ref.mv[i];
    affine.mv[i] = 2 * ref.mv[i] + 3;
  }
  CHECK(std::abs(pearson(neg, ref) + 1.0) < 1e-12);
  CHECK(std::abs(pearson(affine, ref) - 1.0) < 1e-12);
  // Centered: [-1,0,1] and [-1,1,0], so r = 1 / sqrt(2 * 2).
  CHECK(std::abs(pearson(sig({1, 2, 3}), sig({1, 3, 2})) - 0.5) < 1e-12);
  try {
    (void)pearson(sig({2, 2, 2}), sig({1, 2, 3}));
    FAIL("expected undefined_correlation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_correlation);
  }
}

TEST_CASE("pearson agrees with a two-pass reference") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
      a[i] = rng.normal();
      b[i] = 0.5 * a[i] + rng.normal();
    }
    CHECK(std::abs(pearson(a, b) - oracle::correlation(a, b)) < 1e-12);
  }
}

TEST_CASE("intersection over union") {
  BinaryMask a(4, 4), b(4, 4);
  a.set(0, 0, true);
  a.set(1, 0, true);
  CHECK(iou(a, a) == 1.0);
  b.set(3, 3, true);
  CHECK(iou(a, b) == 0.0);
  b = BinaryMask(4, 4);
  b.set(1, 0, true);
  b.set(2, 2, true);
  CHECK(std::abs(iou(a, b) - 1.0 / 3.0) < 1e-12);
  CHECK(iou(BinaryMask(4, 4), BinaryMask(4, 4)) == 1.0);
  try {
    (void)iou(a, BinaryMask(3, 4));
    FAIL("expected dimension_mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
}

TEST_CASE("aggregate statistics") {
  const std::vector<EvalReport> one{report(0.004, 0.97)};
  const AggregateReport a = aggregate(one, "g");
  CHECK(a.group == "g");
  CHECK(a.n == 1);
  CHECK(a.mse_mean == 0.004);
  CHECK(a.mse_std == 0.0);
  CHECK(a.rho_std == 0.0);

  const std::vector<EvalReport> two{report(0.001, 1.0), report(0.003, 1.0)};
  const AggregateReport b = aggregate(two, "g");
  CHECK(std::abs(b.mse_mean - 0.002) < 1e-15);
  CHECK(b.mse_max == 0.003);

  const std::vector<EvalReport> three{report(0, 0.9), report(0, 1.0), report(0, 0.8)};
  const AggregateReport c = aggregate(three, "g");
  CHECK(c.rho_min == 0.8);
  CHECK(std::abs(c.rho_mean - 0.9) < 1e-15);

  CHECK_THROWS_AS(aggregate(std::vector<EvalReport>{}, "g"), Error);
}

TEST_CASE("aggregate agrees with a two-pass reference") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<EvalReport> rs;
    std::vector<double> m, r;
    const auto n = rng.integer(1, 40);
    for (int i = 0; i < n; ++i) {
      rs.push_back(report(rng.uniform(0, 0.05), rng.uniform(0.5, 1.0)));
      m.push_back(rs.back().mse);
      r.push_back(rs.back().pearson);
    }
    const AggregateReport a = aggregate(rs, "x");
    const auto sm = oracle::summarize(m);
    const auto sr = oracle::summarize(r);
    CHECK(a.mse_mean == doctest::Approx(sm.mean).epsilon(1e-12));
    CHECK(a.mse_std == doctest::Approx(sm.std).epsilon(1e-9));
    CHECK(a.mse_max == sm.max);
    CHECK(a.rho_mean == doctest::Approx(sr.mean).epsilon(1e-12));
    CHECK(a.rho_min == sr.min);
    CHECK(a.rho_std == doctest::Approx(sr.std).epsilon(1e-9));
  }
}
