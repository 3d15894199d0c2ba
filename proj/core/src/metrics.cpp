#include "segblend/metrics.hpp"

#include "segblend/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace segblend {

double density(const TileGrid& grid, std::string_view solid_set) {
  if (grid.empty()) throw PreconditionError("density of an empty grid");
  std::size_t solid = 0;
  for (char c : grid.tiles()) solid += solid_set.find(c) != std::string_view::npos ? 1 : 0;
  return static_cast<double>(solid) / static_cast<double>(grid.size());
}

double symmetry(const TileGrid& grid) {
  if (grid.empty()) throw PreconditionError("symmetry of an empty grid");
  const std::size_t rows = grid.rows();
  const std::size_t cols = grid.cols();
  std::size_t same = 0;
  for (std::size_t r = 0; r < rows / 2; ++r) {
    for (std::size_t c = 0; c < cols; ++c) same += grid.at(r, c) == grid.at(rows - 1 - r, c) ? 1 : 0;
  }
  for (std::size_t c = 0; c < cols / 2; ++c) {
    for (std::size_t r = 0; r < rows; ++r) same += grid.at(r, c) == grid.at(r, cols - 1 - c) ? 1 : 0;
  }
  const std::size_t compared = (rows / 2) * cols + (cols / 2) * rows;
  return compared == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(compared);
}

double novelty(std::span<const TileGrid> generated, std::span<const TileGrid> training) {
  if (generated.empty()) return 0.0;
  std::unordered_set<std::string> seen;
  for (const auto& g : training) seen.insert(std::to_string(g.rows()) + "x" + std::to_string(g.cols()) + g.tiles());
  std::size_t novel = 0;
  for (const auto& g : generated) {
    novel += seen.count(std::to_string(g.rows()) + "x" + std::to_string(g.cols()) + g.tiles()) ? 0 : 1;
  }
  return static_cast<double>(novel) / static_cast<double>(generated.size());
}

MetricPoint metric_point(const TileGrid& grid, std::string_view solid_set) {
  return {density(grid, solid_set), symmetry(grid)};
}

namespace {

double mean_pair_distance(std::span<const MetricPoint> a, std::span<const MetricPoint> b) {
  // Coordinates lie in [0, 1], so the plain root cannot overflow; hypot is
  // several times slower here.
  double total = 0.0;
  for (const auto& p : a) {
    for (const auto& q : b) {
      const double dx = p.density - q.density;
      const double dy = p.symmetry - q.symmetry;
      total += std::sqrt(dx * dx + dy * dy);
    }
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double e_distance(std::span<const MetricPoint> a, std::span<const MetricPoint> b) {
  if (a.empty() || b.empty()) throw PreconditionError("e_distance needs two non-empty samples");
  const double value = 2.0 * mean_pair_distance(a, b) - mean_pair_distance(a, a) - mean_pair_distance(b, b);
  // The V-statistic is non-negative; clamp rounding noise.
  return std::max(0.0, value);
}

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("rank_sum_test needs two non-empty samples");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;
  std::vector<std::pair<double, int>> all;
  all.reserve(n);
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].second == 0) rank_sum_a += rank;
    }
    tie_term += t * t * t - t;
    i = j;
  }
  RankSumResult r;
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  r.u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - (n > 1 ? tie_term / (dn * (dn - 1.0)) : 0.0));
  if (variance <= 0.0) {
    r.z = 0.0;
    r.p = 1.0;
    return r;
  }
  r.z = (r.u - dn1 * dn2 / 2.0) / std::sqrt(variance);
  r.p = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  return r;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace segblend
