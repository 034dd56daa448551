#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ecgd/metrics.hpp"
#include "ecgd/synth.hpp"

using namespace ecgd;

namespace {

// 4.5 s spans 900 columns at 40 px per 0.2 s.
SignalSpec fitting() {
  SignalSpec s;
  s.duration_s = 4.5;
  return s;
}

SignalSpec silent() {
  SignalSpec s = fitting();
  for (Wave* w : {&s.p, &s.q, &s.r, &s.s, &s.t}) w->amplitude_mv = 0.0;
  return s;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  SignalSpec s = fitting();
  s.noise_mv = 0.02;
  s.seed = 44;
  const DigitalSignal a = gen_signal(s);
  const DigitalSignal b = gen_signal(s);
  CHECK(a == b);
  s.seed = 45;
  CHECK_FALSE(gen_signal(s) == a);
  CHECK(a.size() == 450);
}

TEST_CASE("zero amplitudes give a flat line") {
  const DigitalSignal z = gen_signal(silent());
  for (double v : z.mv) CHECK(v == 0.0);
}

TEST_CASE("lone R bump peaks at its amplitude") {
  SignalSpec s = silent();
  s.r.amplitude_mv = 1.0;
  s.heart_rate_bpm = 30;
  s.first_beat_s = 1.0;
  const DigitalSignal sig = gen_signal(s);
  const double peak = *std::ranges::max_element(sig.mv);
  CHECK(std::abs(peak - 1.0) <= 0.01);
  CHECK(sig.mv[100] == doctest::Approx(1.0));
}

TEST_CASE("spec validation") {
  SignalSpec s;
  s.heart_rate_bpm = 0;
  CHECK_THROWS_AS(validate(s), Error);
  RenderSpec r;
  r.h_spacing = 4;
  CHECK_THROWS_AS(validate(r), Error);
  r = {};
  r.thickness = 0;
  CHECK_THROWS_AS(validate(r), Error);
}

TEST_CASE("flat signal renders as a band at the baseline") {
  RenderSpec spec;
  spec.baseline_row = 50.0;
  spec.thickness = 2;
  const Rendering r = rasterize(gen_signal(silent()), spec);
  CHECK_FALSE(r.clipped);
  for (std::size_t x = 0; x < 898; ++x) {
    for (std::size_t y = 0; y < spec.height; ++y) CHECK(r.mask.signal(x, y) == (y == 49 || y == 50));
  }
}

TEST_CASE("mask pixels are dark in the image") {
  const Rendering r = rasterize(gen_signal(fitting()), RenderSpec{});
  REQUIRE_FALSE(r.mask.empty());
  for (std::size_t y = 0; y < r.mask.height(); ++y)
    for (std::size_t x = 0; x < r.mask.width(); ++x)
      if (r.mask.signal(x, y)) CHECK(r.image.at(x, y) == RenderSpec{}.trace_color);
  CHECK(r.grid.width_pixels == 40);
  CHECK(r.grid.height_pixels == 40);
}

TEST_CASE("every drawn column is connected") {
  const Rendering r = rasterize(gen_signal(fitting()), RenderSpec{});
  for (std::size_t x = 0; x + 1 < 898; ++x) {
    std::size_t lo = 1000, hi = 0, lo2 = 1000, hi2 = 0;
    for (std::size_t y = 0; y < r.mask.height(); ++y) {
      if (r.mask.signal(x, y)) lo = std::min(lo, y), hi = std::max(hi, y);
      if (r.mask.signal(x + 1, y)) lo2 = std::min(lo2, y), hi2 = std::max(hi2, y);
    }
    REQUIRE(lo <= hi);
    CHECK(lo <= hi2 + 1);
    CHECK(lo2 <= hi + 1);
  }
}

TEST_CASE("out-of-canvas excursions are clipped and flagged") {
  SignalSpec s = silent();
  s.r.amplitude_mv = 2.0;
  const Rendering r = rasterize(gen_signal(s), RenderSpec{.baseline_row = 60.0});
  CHECK(r.clipped);
}

TEST_CASE("long signals do not fit") {
  SignalSpec s;
  s.duration_s = 10.0;
  CHECK_THROWS_AS(rasterize(gen_signal(s), RenderSpec{}), Error);
}

TEST_CASE("bold lines follow the spacing and offset") {
  RenderSpec spec;
  spec.h_spacing = 30;
  spec.grid_offset_x = 7;
  spec.height = 100;
  spec.v_spacing = 30;
  const Rendering r = rasterize(gen_signal(fitting()), spec);
  REQUIRE(r.bold_columns.size() >= 2);
  CHECK(r.bold_columns[0] == 7);
  CHECK(r.bold_columns[1] == 37);
  CHECK(r.bold_rows == std::vector<double>{0, 30, 60, 90});
}

TEST_CASE("overlap contamination") {
  const RenderSpec spec;
  const Rendering clean = rasterize(gen_signal(fitting()), spec);
  SignalSpec other_spec = fitting();
  other_spec.r.amplitude_mv = 1.4;
  other_spec.first_beat_s = 0.7;
  const DigitalSignal other = gen_signal(other_spec);
  bool saw_top = false, saw_bottom = false;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Contaminated c = inject_overlap(clean.image, clean.mask, other, spec, seed);
    for (std::size_t i = 0; i < c.mask.size(); ++i) {
      if (clean.mask.pixels()[i] == Mark::signal) CHECK(c.mask.pixels()[i] == Mark::signal);
    }
    if (c.mask.count() > clean.mask.count()) CHECK(iou(clean.mask, c.mask) < 1.0);
    (c.band_at_top ? saw_top : saw_bottom) = true;
    const Contaminated again = inject_overlap(clean.image, clean.mask, other, spec, seed);
    CHECK(again.image == c.image);
    CHECK(again.mask == c.mask);
    CHECK(again.band_at_top == c.band_at_top);
  }
  CHECK(saw_top);
  CHECK(saw_bottom);
}

TEST_CASE("overlap needs a canvas taller than the band") {
  RenderSpec spec;
  spec.height = 30;
  spec.v_spacing = 20;
  const Rendering r = rasterize(gen_signal(silent()), spec);
  CHECK_THROWS_AS(inject_overlap(r.image, r.mask, gen_signal(fitting()), spec, 1), Error);
}

TEST_CASE("randomised specs stay inside their ranges") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SignalSpec s = random_signal_spec(seed, 4.8);
    CHECK(s.heart_rate_bpm >= 55);
    CHECK(s.heart_rate_bpm <= 95);
    CHECK(s.r.amplitude_mv >= 0.5);
    CHECK(s.r.amplitude_mv <= 0.8);
    const RenderSpec r = random_render_spec(seed);
    CHECK(r.h_spacing >= 30);
    CHECK(r.h_spacing <= 36);
    CHECK(r.h_spacing == std::floor(r.h_spacing));
  }
}
