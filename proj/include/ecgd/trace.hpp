#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ecgd/raster.hpp"

namespace ecgd {

/// Run centers per column, ascending, one per maximal vertical run of signal.
struct ColumnNodes {
  std::size_t height = 0;
  std::vector<std::vector<double>> columns;
};

/// Half-open column interval [begin, end).
struct ColumnInterval {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const ColumnInterval&, const ColumnInterval&) = default;
};

/// One row coordinate per column, starting at `first_column`. Columns the
/// tracer could not reach hold nullopt until fill_gaps runs.
struct PixelTrace {
  std::size_t first_column = 0;
  std::vector<std::optional<double>> y;
  std::vector<ColumnInterval> gaps_filled;

  bool complete() const noexcept;
};

struct TraceCost {
  double alpha = 0.5;        // weight of the Euclidean step; 1 - alpha weighs the turn
  double angle_scale = 1.0;  // multiplies the angle change (radians)
};

/// Costs are rounded to multiples of this before summation so that path sums
/// are exact in double precision and ties compare reliably.
inline constexpr double kCostQuantum = 1.0 / (1 << 24);

/// Cost of stepping one column with vertical change `dy`, given the vertical
/// change `prev_dy` of the incoming segment (nullopt on the first step).
double transition_cost(std::optional<double> prev_dy, double dy, const TraceCost& cost = {});

ColumnNodes column_nodes(const BinaryMask& mask);

/// Least-cost left-to-right path over every maximal block of non-empty
/// columns. Among equal-cost paths the lexicographically smallest row
/// sequence wins. Throws Errc::empty_trace when every column is empty.
PixelTrace viterbi_trace(const ColumnNodes& nodes, const TraceCost& cost = {});

/// Linear interpolation across interior gaps, constant extension at the ends,
/// over the columns of `full_range`.
PixelTrace fill_gaps(const PixelTrace& trace, ColumnInterval full_range);

/// Sum of transition costs along a fixed row sequence.
double path_cost(const std::vector<double>& rows, const TraceCost& cost = {});

}  // namespace ecgd
