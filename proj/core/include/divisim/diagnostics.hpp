#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "divisim/distributions.hpp"
#include "divisim/riskfactor.hpp"

namespace divisim {

struct QqRow {
  double p;
  double empirical;
  double model;
};

/// Rows of (p, empirical quantile, model quantile); p strictly increasing in (0, 1).
struct QqTable {
  std::vector<QqRow> rows;
};

struct KdePoint {
  double x;
  double density;
};

struct KdeCurve {
  std::vector<KdePoint> points;
  double bandwidth = 0.0;
};

/// Empirical quantile of a sorted sample: linear interpolation between order
/// statistics at 1-based position p (N + 1), clamped to the extremes.
double empiricalQuantileSorted(std::span<const double> sorted, double p);
double empiricalQuantile(std::span<const double> sample, double p);

/// Levels k / (N + 1), k = 1..N.
std::vector<double> plottingPositions(std::size_t n);

QqTable qqAgainstAnalytic(std::span<const double> sample, const Distribution& d,
                          std::span<const double> levels);

/// Silverman's rule 0.9 min(sd, IQR / 1.34) N^(-1/5).
double silvermanBandwidth(std::span<const double> sample);

/// Gaussian kernel density estimate on the given grid.
KdeCurve kde(std::span<const double> sample, std::span<const double> grid,
             std::optional<double> bandwidth = std::nullopt);

/// 1-based ranks with ties broken by original index.
std::vector<std::size_t> stableRanks(std::span<const double> column);

/// Column-wise ranks divided by N + 1.
SampleMatrix pseudoObservations(const SampleMatrix& s);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ksStatistic(std::span<const double> a, std::span<const double> b);

/// One-sample KS statistic of a sample against the cdf of d.
double ksStatistic(std::span<const double> sample, const Distribution& d);

/// Kendall's tau-b in O(N log N) (Knight's merge-sort algorithm).
double kendallTau(std::span<const double> a, std::span<const double> b);

}  // namespace divisim
