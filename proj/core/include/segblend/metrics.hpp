#pragma once

#include "segblend/tiles.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace segblend {

// Share of tiles whose character is in solid_set.
double density(const TileGrid& grid, std::string_view solid_set);

// Matching positions over mirrored row pairs (row i vs rows-1-i) plus
// mirrored column pairs, divided by the number of compared positions. The
// middle row/column of an odd dimension is not compared. A grid with nothing
// to compare scores 1.
double symmetry(const TileGrid& grid);

// Share of generated grids with no tile-equal grid in training. 0 for an
// empty generated set.
double novelty(std::span<const TileGrid> generated, std::span<const TileGrid> training);

struct MetricPoint {
  double density = 0.0;
  double symmetry = 0.0;

  bool operator==(const MetricPoint&) const = default;
};

MetricPoint metric_point(const TileGrid& grid, std::string_view solid_set);

// Energy distance in (density, symmetry) space:
//   2 E|a - b| - E|a - a'| - E|b - b'|
// with all expectations taken over every ordered pair, i = j included.
double e_distance(std::span<const MetricPoint> a, std::span<const MetricPoint> b);

struct RankSumResult {
  double u = 0.0;  // Mann-Whitney U of the first sample
  double z = 0.0;
  double p = 1.0;  // two-sided
};

// Wilcoxon rank-sum test, normal approximation with tie correction and no
// continuity correction. p = 1 when every value is identical.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

}  // namespace segblend
