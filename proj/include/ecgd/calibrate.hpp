#pragma once

#include <cstddef>
#include <vector>

#include "ecgd/grid.hpp"
#include "ecgd/trace.hpp"

namespace ecgd {

/// Uniformly sampled voltage series, sample i at time i / sampling_rate.
struct DigitalSignal {
  double sampling_rate = 100.0;  // Hz
  std::vector<double> mv;

  std::size_t size() const noexcept { return mv.size(); }
  double duration() const noexcept { return static_cast<double>(mv.size()) / sampling_rate; }
  friend bool operator==(const DigitalSignal&, const DigitalSignal&) = default;
};

/// Standard ECG paper scale: one large square is 0.5 mV tall and 0.2 s wide.
struct CalibrationConstants {
  double mv_per_large_square = 0.5;
  double sec_per_large_square = 0.2;
};

/// Throws Errc::invalid_argument unless the signal is non-empty, finite and
/// has a positive rate.
void validate(const DigitalSignal& sig);

/// Maps a complete pixel trace to millivolts (upward positive) and resamples
/// it linearly onto t = 0, 1/rate, ... up to the trace duration.
DigitalSignal pixels_to_physical(const PixelTrace& trace, const GridGeometry& grid,
                                 double rate = 100.0, const CalibrationConstants& k = {});

struct LagAlignment {
  int lag = 0;  // ref[n] ~ pred[n - lag]
  double correlation = 0.0;
  DigitalSignal pred;  // both truncated to the overlap at `lag`
  DigitalSignal ref;
};

/// Lag in [-max_lag, max_lag] maximising the Pearson correlation of the
/// overlapping samples. Ties prefer smaller |lag|, then negative lag.
LagAlignment align_lag(const DigitalSignal& pred, const DigitalSignal& ref, int max_lag = 10);

double median(std::vector<double> values);

/// Subtracts the median sample.
DigitalSignal remove_baseline(const DigitalSignal& sig);

}  // namespace ecgd
