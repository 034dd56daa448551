#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecgd/calibrate.hpp"
#include "ecgd/raster.hpp"

namespace ecgd {

struct EvalReport {
  double mse = 0.0;      // mV^2
  double pearson = 0.0;  // undefined correlations are raised, never stored
  int lag = 0;           // samples
  std::optional<double> iou;
  std::size_t n_samples = 0;
};

struct AggregateReport {
  std::string group;
  std::size_t n = 0;
  double mse_mean = 0.0;
  double mse_std = 0.0;  // population standard deviation
  double mse_max = 0.0;
  double rho_mean = 0.0;
  double rho_min = 0.0;
  double rho_std = 0.0;
};

double mse(std::span<const double> pred, std::span<const double> ref);
double mse(const DigitalSignal& pred, const DigitalSignal& ref);

double pearson(std::span<const double> pred, std::span<const double> ref);
double pearson(const DigitalSignal& pred, const DigitalSignal& ref);

/// Jaccard index; two empty masks agree perfectly (1.0).
double iou(const BinaryMask& a, const BinaryMask& b);

AggregateReport aggregate(std::span<const EvalReport> reports, const std::string& group);

}  // namespace ecgd
