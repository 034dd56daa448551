#include "ecgd/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ecgd {
namespace {

std::array<std::uint64_t, 256> histogram(const GrayImage& gray) {
  std::array<std::uint64_t, 256> hist{};
  for (std::uint8_t v : gray.pixels()) ++hist[v];
  return hist;
}

// 1-D k-means over histogram levels. Returns the cluster index of every level
// (-1 for levels with no pixels).
std::array<int, 256> kmeans_levels(const std::array<std::uint64_t, 256>& hist, std::vector<double> centers) {
  constexpr int kMaxIterations = 50;
  constexpr double kTolerance = 0.5;
  std::array<int, 256> label{};
  label.fill(-1);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (int v = 0; v < 256; ++v) {
      if (hist[v] == 0) continue;
      int best = 0;
      for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        if (std::abs(v - centers[c]) < std::abs(v - centers[best])) best = c;
      }
      label[v] = best;
    }
    double shift = 0.0;
    for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
      double weight = 0.0;
      double sum = 0.0;
      for (int v = 0; v < 256; ++v) {
        if (label[v] != c) continue;
        weight += static_cast<double>(hist[v]);
        sum += static_cast<double>(hist[v]) * v;
      }
      if (weight == 0.0) continue;  // empty clusters keep their seed
      const double updated = sum / weight;
      shift = std::max(shift, std::abs(updated - centers[c]));
      centers[c] = updated;
    }
    if (shift < kTolerance) break;
  }
  return label;
}

enum class Shape { horizontal_bar, vertical_bar, square };

bool in_element(Shape shape, int dx, int dy) {
  switch (shape) {
    case Shape::horizontal_bar: return dy == 0;
    case Shape::vertical_bar: return dx == 0;
    case Shape::square: return true;
  }
  return false;
}

// Out-of-bounds neighbours are ignored by both operators.
BinaryMask morph(const BinaryMask& in, Shape shape, bool dilate) {
  BinaryMask out(in.width(), in.height());
  const auto w = static_cast<long>(in.width());
  const auto h = static_cast<long>(in.height());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      bool any = false;
      bool all = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!in_element(shape, dx, dy)) continue;
          const long nx = x + dx;
          const long ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const bool on = in.signal(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
          any = any || on;
          all = all && on;
        }
      }
      out.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y), dilate ? any : all);
    }
  }
  return out;
}

BinaryMask opening(const BinaryMask& in, Shape shape) {
  return morph(morph(in, shape, false), shape, true);
}

BinaryMask closing(const BinaryMask& in, Shape shape) {
  return morph(morph(in, shape, true), shape, false);
}

struct Candidate {
  double position;
  double score;
  double weight;
};

std::vector<DetectedLine> merge_candidates(std::vector<Candidate> cands, double radius) {
  std::ranges::sort(cands, {}, &Candidate::position);
  // Repeatedly fuse the closest neighbouring pair until all gaps exceed the radius.
  while (cands.size() > 1) {
    std::size_t best = 0;
    double best_gap = cands[1].position - cands[0].position;
    for (std::size_t i = 1; i + 1 < cands.size(); ++i) {
      const double gap = cands[i + 1].position - cands[i].position;
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best_gap > radius) break;
    Candidate& a = cands[best];
    const Candidate& b = cands[best + 1];
    const double weight = a.weight + b.weight;
    a.position = (a.position * a.weight + b.position * b.weight) / weight;
    a.weight = weight;
    a.score = std::max(a.score, b.score);
    cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }
  std::vector<DetectedLine> lines;
  lines.reserve(cands.size());
  for (const Candidate& c : cands) lines.push_back({c.position, c.score});
  return lines;
}

double median_of(std::vector<double> v) {
  std::ranges::sort(v);
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Spacing {
  double pixels;
  bool from_bimodal;
};

Spacing spacing_of(const std::vector<DetectedLine>& lines) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < lines.size(); ++i) gaps.push_back(lines[i].position - lines[i - 1].position);
  std::ranges::sort(gaps);

  // Split the sorted gaps wherever one is more than 1.5x its predecessor.
  std::vector<std::vector<double>> clusters{{gaps.front()}};
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i] > 1.5 * gaps[i - 1]) clusters.emplace_back();
    clusters.back().push_back(gaps[i]);
  }
  if (clusters.size() >= 2) {
    const double small = median_of(clusters.front());
    const double large = median_of(clusters.back());
    const double ratio = large / small;
    if (ratio >= 4.0 && ratio <= 6.0) return {large, true};
  }
  return {median_of(gaps), false};
}

}  // namespace

BinaryMask cluster_mid_intensity(const GrayImage& gray) {
  const auto hist = histogram(gray);
  const auto distinct = std::ranges::count_if(hist, [](std::uint64_t n) { return n > 0; });
  if (distinct <= 1) throw Error(Errc::empty_grid, "uniform image has no grid");

  BinaryMask out(gray.width(), gray.height());
  if (distinct == 2) {
    // Only trace and background can be present; there is no middle cluster.
    return out;
  }
  const auto label = kmeans_levels(hist, {0.0, 128.0, 255.0});
  std::ranges::transform(gray.pixels(), out.pixels().begin(), [&label](std::uint8_t v) {
    return label[v] == 1 ? Mark::signal : Mark::background;
  });
  return out;
}

BinaryMask refine_grid_mask(const BinaryMask& raw) {
  BinaryMask horizontal = opening(raw, Shape::horizontal_bar);
  const BinaryMask vertical = opening(raw, Shape::vertical_bar);
  auto dst = horizontal.pixels();
  auto src = vertical.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (src[i] == Mark::signal) dst[i] = Mark::signal;
  }
  return closing(horizontal, Shape::square);
}

BinaryMask isolate_grid_pixels(const RasterImage& img) {
  return refine_grid_mask(cluster_mid_intensity(to_grayscale(img)));
}

LineSet detect_lines(const BinaryMask& grid_mask, const HoughParams& params) {
  const std::size_t w = grid_mask.width();
  const std::size_t h = grid_mask.height();
  const int max_rho = static_cast<int>(std::ceil(std::hypot(static_cast<double>(w), static_cast<double>(h))));
  const std::size_t bins = static_cast<std::size_t>(2 * max_rho + 1);

  std::vector<std::pair<std::size_t, std::size_t>> points;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (grid_mask.signal(x, y)) points.emplace_back(x, y);
    }
  }

  LineSet result;
  if (points.empty()) return result;

  std::vector<Candidate> vertical_cands;
  std::vector<Candidate> horizontal_cands;
  const double mid_x = 0.5 * static_cast<double>(w - 1);
  const double mid_y = 0.5 * static_cast<double>(h - 1);
  const int window = params.angle_window_deg;
  const auto angles = static_cast<std::size_t>(2 * window + 1);

  for (int canonical : {0, 90}) {
    const bool vertical = canonical == 0;
    const double needed = params.vote_fraction * static_cast<double>(vertical ? h : w);
    std::vector<std::vector<std::uint32_t>> acc(angles, std::vector<std::uint32_t>(bins, 0));
    for (std::size_t a = 0; a < angles; ++a) {
      const double theta = (canonical + static_cast<int>(a) - window) * std::numbers::pi / 180.0;
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      for (auto [x, y] : points) {
        const double rho = static_cast<double>(x) * c + static_cast<double>(y) * s;
        ++acc[a][static_cast<std::size_t>(std::lround(rho) + max_rho)];
      }
    }
    // Peaks only: a bin must reach the vote threshold and not be beaten by
    // any neighbour in angle or distance.
    auto is_peak = [&](std::size_t a, std::size_t bin) {
      const std::uint32_t v = acc[a][bin];
      for (std::size_t na = a == 0 ? 0 : a - 1; na <= std::min(a + 1, angles - 1); ++na) {
        for (std::size_t nb = bin == 0 ? 0 : bin - 1; nb <= std::min(bin + 1, bins - 1); ++nb) {
          if (acc[na][nb] > v) return false;
        }
      }
      return true;
    };
    for (std::size_t a = 0; a < angles; ++a) {
      const double theta = (canonical + static_cast<int>(a) - window) * std::numbers::pi / 180.0;
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      for (std::size_t bin = 0; bin < bins; ++bin) {
        const double votes = acc[a][bin];
        if (votes == 0 || votes < needed || !is_peak(a, bin)) continue;
        const double rho = static_cast<double>(static_cast<long>(bin) - max_rho);
        // Coordinate where the line crosses the middle of the image.
        if (vertical) {
          const double x = (rho - mid_y * s) / c;
          vertical_cands.push_back({std::clamp(x, 0.0, static_cast<double>(w - 1)), votes, votes});
        } else {
          const double y = (rho - mid_x * c) / s;
          horizontal_cands.push_back({std::clamp(y, 0.0, static_cast<double>(h - 1)), votes, votes});
        }
      }
    }
  }
  result.verticals = merge_candidates(std::move(vertical_cands), params.merge_radius);
  result.horizontals = merge_candidates(std::move(horizontal_cands), params.merge_radius);
  return result;
}

GridGeometry estimate_grid(const LineSet& lines) {
  if (lines.verticals.size() < 2) {
    throw Error(Errc::grid_undetected,
                "found " + std::to_string(lines.verticals.size()) + " vertical grid lines, need 2");
  }
  GridGeometry grid;
  const Spacing horizontal = spacing_of(lines.verticals);
  grid.width_pixels = horizontal.pixels;
  grid.large_from_bimodal = horizontal.from_bimodal;
  if (lines.horizontals.size() >= 2) {
    const Spacing vertical = spacing_of(lines.horizontals);
    grid.height_pixels = vertical.pixels;
    grid.large_from_bimodal = grid.large_from_bimodal || vertical.from_bimodal;
  } else {
    grid.height_pixels = grid.width_pixels;
    grid.square_assumed = true;
  }
  if (!grid.valid()) throw Error(Errc::grid_undetected, "grid lines coincide; spacing is zero");
  return grid;
}

bool grid_detectable(const BinaryMask& mask, const HoughParams& params) {
  return detect_lines(mask, params).total() >= 3;
}

GridGeometry detect_grid(const RasterImage& img, LineSet* lines_out) {
  LineSet lines = detect_lines(isolate_grid_pixels(img));
  if (lines_out != nullptr) *lines_out = lines;
  return estimate_grid(lines);
}

}  // namespace ecgd
