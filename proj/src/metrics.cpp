#include "ecgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecgd {
namespace {

// Neumaier compensated summation keeps aggregates stable under reordering.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_same_length(std::size_t a, std::size_t b, std::size_t minimum) {
  if (a != b) {
    throw Error(Errc::length_mismatch,
                "signal lengths differ (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a < minimum) {
    throw Error(Errc::empty_input, "need at least " + std::to_string(minimum) + " samples");
  }
}

void require_same_rate(const DigitalSignal& a, const DigitalSignal& b) {
  if (a.sampling_rate != b.sampling_rate) throw Error(Errc::rate_mismatch, "sampling rates differ");
}

struct Moments {
  double mean;
  double std;
};

Moments population_moments(const std::vector<double>& values) {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double mean = sum.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  return {mean, std::sqrt(sq.value() / static_cast<double>(values.size()))};
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> ref) {
  require_same_length(pred.size(), ref.size(), 1);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = ref[i] - pred[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.size());
}

double mse(const DigitalSignal& pred, const DigitalSignal& ref) {
  require_same_rate(pred, ref);
  return mse(pred.mv, ref.mv);
}

double pearson(std::span<const double> pred, std::span<const double> ref) {
  require_same_length(pred.size(), ref.size(), 2);
  const auto n = static_cast<double>(pred.size());
  double mean_p = 0.0;
  double mean_r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mean_p += pred[i];
    mean_r += ref[i];
  }
  mean_p /= n;
  mean_r /= n;
  double cov = 0.0;
  double var_p = 0.0;
  double var_r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dp = pred[i] - mean_p;
    const double dr = ref[i] - mean_r;
    cov += dr * dp;
    var_p += dp * dp;
    var_r += dr * dr;
  }
  if (var_p <= 0.0 || var_r <= 0.0) {
    throw Error(Errc::undefined_correlation, "correlation of a constant signal is undefined");
  }
  // sqrt(x * x) == x exactly, so identical inputs give exactly 1.
  return std::clamp(cov / std::sqrt(var_r * var_p), -1.0, 1.0);
}

double pearson(const DigitalSignal& pred, const DigitalSignal& ref) {
  require_same_rate(pred, ref);
  return pearson(pred.mv, ref.mv);
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(Errc::dimension_mismatch, "masks have different dimensions");
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const bool x = pa[i] == Mark::signal;
    const bool y = pb[i] == Mark::signal;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

AggregateReport aggregate(std::span<const EvalReport> reports, const std::string& group) {
  if (reports.empty()) throw Error(Errc::empty_input, "cannot aggregate zero reports");
  std::vector<double> mses;
  std::vector<double> rhos;
  for (const EvalReport& r : reports) {
    mses.push_back(r.mse);
    rhos.push_back(r.pearson);
  }
  AggregateReport out;
  out.group = group;
  out.n = reports.size();
  const Moments m = population_moments(mses);
  const Moments p = population_moments(rhos);
  out.mse_mean = m.mean;
  out.mse_std = m.std;
  out.mse_max = *std::ranges::max_element(mses);
  out.rho_mean = p.mean;
  out.rho_std = p.std;
  out.rho_min = *std::ranges::min_element(rhos);
  return out;
}

}  // namespace ecgd
