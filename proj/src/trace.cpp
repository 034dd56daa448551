#include "ecgd/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecgd {
namespace {

double quantize(double cost) { return std::round(cost / kCostQuantum) * kCostQuantum; }

// Exact least-cost path through columns [begin, end) of `nodes`, all non-empty.
// DP states are (node in previous column, node in current column) so that the
// turn between consecutive segments is priced exactly.
std::vector<double> solve_block(const ColumnNodes& nodes, std::size_t begin, std::size_t end,
                                const TraceCost& cost) {
  const auto& cols = nodes.columns;
  if (end - begin == 1) return {cols[begin].front()};

  struct Column {
    std::vector<double> cost;
    std::vector<std::size_t> pred;
    std::vector<std::size_t> rank;  // lexicographic order of the prefix row sequence
  };
  std::vector<Column> table(end - begin);

  {
    const auto& a = cols[begin];
    const auto& b = cols[begin + 1];
    Column& first = table[1];
    const std::size_t n = a.size() * b.size();
    first.cost.resize(n);
    first.pred.assign(n, 0);
    first.rank.resize(n);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        const std::size_t s = i * b.size() + j;
        first.cost[s] = transition_cost(std::nullopt, b[j] - a[i], cost);
        first.rank[s] = s;  // (i, j) row-major is already lexicographic
      }
    }
  }

  for (std::size_t c = begin + 2; c < end; ++c) {
    const auto& prev2 = cols[c - 2];
    const auto& prev = cols[c - 1];
    const auto& cur = cols[c];
    const Column& last = table[c - 1 - begin];
    Column& next = table[c - begin];
    const std::size_t n = prev.size() * cur.size();
    next.cost.assign(n, 0.0);
    next.pred.assign(n, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      for (std::size_t j = 0; j < cur.size(); ++j) {
        const std::size_t s = i * cur.size() + j;
        bool have = false;
        for (std::size_t k = 0; k < prev2.size(); ++k) {
          const std::size_t from = k * prev.size() + i;
          const double total =
              last.cost[from] + transition_cost(prev[i] - prev2[k], cur[j] - prev[i], cost);
          if (!have || total < next.cost[s] ||
              (total == next.cost[s] && last.rank[from] < last.rank[next.pred[s]])) {
            next.cost[s] = total;
            next.pred[s] = from;
            have = true;
          }
        }
      }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::sort(order, [&](std::size_t x, std::size_t y) {
      const std::size_t rx = last.rank[next.pred[x]];
      const std::size_t ry = last.rank[next.pred[y]];
      if (rx != ry) return rx < ry;
      return x % cur.size() < y % cur.size();
    });
    next.rank.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos) next.rank[order[pos]] = pos;
  }

  const Column& final_col = table.back();
  std::size_t best = 0;
  for (std::size_t s = 1; s < final_col.cost.size(); ++s) {
    if (final_col.cost[s] < final_col.cost[best] ||
        (final_col.cost[s] == final_col.cost[best] && final_col.rank[s] < final_col.rank[best])) {
      best = s;
    }
  }

  std::vector<double> rows(end - begin);
  std::size_t state = best;
  for (std::size_t c = end - 1; c > begin; --c) {
    const std::size_t width = cols[c].size();
    rows[c - begin] = cols[c][state % width];
    if (c == begin + 1) {
      rows[0] = cols[begin][state / width];
    } else {
      state = table[c - begin].pred[state];
    }
  }
  return rows;
}

}  // namespace

bool PixelTrace::complete() const noexcept {
  return std::ranges::all_of(y, [](const std::optional<double>& v) { return v.has_value(); });
}

double transition_cost(std::optional<double> prev_dy, double dy, const TraceCost& cost) {
  const double step = std::hypot(1.0, dy);
  double turn = 0.0;
  if (prev_dy) turn = std::abs(std::atan2(dy, 1.0) - std::atan2(*prev_dy, 1.0));
  return quantize(cost.alpha * step + (1.0 - cost.alpha) * cost.angle_scale * turn);
}

double path_cost(const std::vector<double>& rows, const TraceCost& cost) {
  double total = 0.0;
  std::optional<double> prev_dy;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dy = rows[i] - rows[i - 1];
    total += transition_cost(prev_dy, dy, cost);
    prev_dy = dy;
  }
  return total;
}

ColumnNodes column_nodes(const BinaryMask& mask) {
  ColumnNodes nodes;
  nodes.height = mask.height();
  nodes.columns.resize(mask.width());
  for (std::size_t x = 0; x < mask.width(); ++x) {
    auto& centers = nodes.columns[x];
    std::size_t y = 0;
    while (y < mask.height()) {
      if (!mask.signal(x, y)) {
        ++y;
        continue;
      }
      const std::size_t start = y;
      while (y < mask.height() && mask.signal(x, y)) ++y;
      centers.push_back(0.5 * static_cast<double>(start + y - 1));
    }
  }
  return nodes;
}

PixelTrace viterbi_trace(const ColumnNodes& nodes, const TraceCost& cost) {
  PixelTrace trace;
  trace.first_column = 0;
  trace.y.assign(nodes.columns.size(), std::nullopt);
  bool any = false;
  std::size_t c = 0;
  while (c < nodes.columns.size()) {
    if (nodes.columns[c].empty()) {
      ++c;
      continue;
    }
    std::size_t end = c;
    while (end < nodes.columns.size() && !nodes.columns[end].empty()) ++end;
    const auto rows = solve_block(nodes, c, end, cost);
    for (std::size_t i = 0; i < rows.size(); ++i) trace.y[c + i] = rows[i];
    any = true;
    c = end;
  }
  if (!any) throw Error(Errc::empty_trace, "mask contains no signal pixels");
  return trace;
}

PixelTrace fill_gaps(const PixelTrace& trace, ColumnInterval full_range) {
  if (full_range.end <= full_range.begin) throw Error(Errc::invalid_argument, "empty column range");
  PixelTrace out;
  out.first_column = full_range.begin;
  out.y.assign(full_range.end - full_range.begin, std::nullopt);
  for (std::size_t i = 0; i < trace.y.size(); ++i) {
    const std::size_t col = trace.first_column + i;
    if (col >= full_range.begin && col < full_range.end) out.y[col - full_range.begin] = trace.y[i];
  }
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < out.y.size(); ++i) {
    if (out.y[i]) known.push_back(i);
  }
  if (known.empty()) throw Error(Errc::empty_trace, "trace has no values inside the column range");

  for (const ColumnInterval& gap : trace.gaps_filled) {
    if (gap.begin >= full_range.begin && gap.end <= full_range.end) out.gaps_filled.push_back(gap);
  }
  auto record = [&](std::size_t b, std::size_t e) {
    if (e > b) out.gaps_filled.push_back({b + full_range.begin, e + full_range.begin});
  };

  for (std::size_t i = 0; i < known.front(); ++i) out.y[i] = *out.y[known.front()];
  record(0, known.front());
  for (std::size_t k = 1; k < known.size(); ++k) {
    const std::size_t a = known[k - 1];
    const std::size_t b = known[k];
    if (b - a < 2) continue;
    const double ya = *out.y[a];
    const double yb = *out.y[b];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      out.y[i] = ya + t * (yb - ya);
    }
    record(a + 1, b);
  }
  for (std::size_t i = known.back() + 1; i < out.y.size(); ++i) out.y[i] = *out.y[known.back()];
  record(known.back() + 1, out.y.size());

  std::ranges::sort(out.gaps_filled, {}, &ColumnInterval::begin);
  return out;
}

}  // namespace ecgd
