#include "divisim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "divisim/errors.hpp"

namespace divisim {

double empiricalQuantileSorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(ErrorCode::EmptySample, "empirical quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::DomainError, fmt::format("level {} outside [0, 1]", p));
  const double n = static_cast<double>(sorted.size());
  const double h = p * (n + 1.0);
  if (h <= 1.0) return sorted.front();
  if (h >= n) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

double empiricalQuantile(std::span<const double> sample, double p) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return empiricalQuantileSorted(sorted, p);
}

std::vector<double> plottingPositions(std::size_t n) {
  std::vector<double> levels(n);
  const double denom = static_cast<double>(n) + 1.0;
  for (std::size_t k = 0; k < n; ++k) levels[k] = static_cast<double>(k + 1) / denom;
  return levels;
}

QqTable qqAgainstAnalytic(std::span<const double> sample, const Distribution& d,
                          std::span<const double> levels) {
  if (!hasQuantile(d)) {
    fail(ErrorCode::UnsupportedQuantile, fmt::format("no quantile for {}", familyName(d.family())));
  }
  if (sample.empty()) fail(ErrorCode::EmptySample, "QQ table of an empty sample");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0 && levels[k] < 1.0)) {
      fail(ErrorCode::DomainError, fmt::format("QQ level {} must lie strictly inside (0, 1)", levels[k]));
    }
    if (k > 0 && !(levels[k] > levels[k - 1])) {
      fail(ErrorCode::DomainError, "QQ levels must be strictly increasing");
    }
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  QqTable table;
  table.rows.reserve(levels.size());
  for (double p : levels) table.rows.push_back({p, empiricalQuantileSorted(sorted, p), quantile(d, p)});
  return table;
}

namespace {

double sampleSd(std::span<const double> sample) {
  long double mean = 0.0L;
  for (double x : sample) mean += x;
  mean /= static_cast<long double>(sample.size());
  long double ss = 0.0L;
  for (double x : sample) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(sample.size() - 1)));
}

}  // namespace

double silvermanBandwidth(std::span<const double> sample) {
  if (sample.size() < 2) fail(ErrorCode::DegenerateSample, "bandwidth needs at least two points");
  const double sd = sampleSd(sample);
  if (!(sd > 0.0)) fail(ErrorCode::DegenerateSample, "sample has zero standard deviation");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = empiricalQuantileSorted(sorted, 0.75) - empiricalQuantileSorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

KdeCurve kde(std::span<const double> sample, std::span<const double> grid, std::optional<double> bandwidth) {
  if (sample.size() < 2) fail(ErrorCode::DegenerateSample, "kernel density needs at least two points");
  if (!(sampleSd(sample) > 0.0)) fail(ErrorCode::DegenerateSample, "sample has zero standard deviation");
  const double h = bandwidth ? *bandwidth : silvermanBandwidth(sample);
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::DomainError, fmt::format("bandwidth {} must be positive", h));

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  // Kernels beyond 8 bandwidths contribute below exp(-32).
  const double reach = 8.0 * h;
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  KdeCurve curve;
  curve.bandwidth = h;
  curve.points.reserve(grid.size());
  for (double x : grid) {
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    auto last = std::upper_bound(first, sorted.end(), x + reach);
    double acc = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (x - *it) / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.points.push_back({x, acc * norm});
  }
  return curve;
}

std::vector<std::size_t> stableRanks(std::span<const double> column) {
  std::vector<std::size_t> order(column.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&column](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<std::size_t> ranks(column.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

SampleMatrix pseudoObservations(const SampleMatrix& s) {
  SampleMatrix out(s.rows(), s.columnNames());
  const double denom = static_cast<double>(s.rows()) + 1.0;
  for (std::size_t c = 0; c < s.cols(); ++c) {
    const auto ranks = stableRanks(s.column(c));
    for (std::size_t r = 0; r < s.rows(); ++r) out(r, c) = static_cast<double>(ranks[r]) / denom;
  }
  return out;
}

double ksStatistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptySample, "KS statistic needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ksStatistic(std::span<const double> sample, const Distribution& dist) {
  if (sample.empty()) fail(ErrorCode::EmptySample, "KS statistic of an empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t e = i;
    while (e < x.size() && x[e] == x[i]) ++e;
    const double below = cdf(dist, std::nextafter(x[i], -kInfinity));
    const double at = cdf(dist, x[i]);
    d = std::max(d, std::abs(static_cast<double>(i) / n - below));
    d = std::max(d, std::abs(static_cast<double>(e) / n - at));
    i = e;
  }
  return d;
}

namespace {

// Merge sort on v, returning the number of inversions (swaps).
std::uint64_t countSwaps(std::vector<double>& v, std::vector<double>& buffer, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = countSwaps(v, buffer, lo, mid) + countSwaps(v, buffer, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      buffer[k++] = v[j++];
      swaps += mid - i;
    } else {
      buffer[k++] = v[i++];
    }
  }
  while (i < mid) buffer[k++] = v[i++];
  while (j < hi) buffer[k++] = v[j++];
  std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo), buffer.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::uint64_t tiedPairs(std::uint64_t run) { return run * (run - 1) / 2; }

}  // namespace

double kendallTau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::LengthMismatch, fmt::format("lengths {} and {} differ", a.size(), b.size()));
  }
  const std::size_t n = a.size();
  if (n < 2) fail(ErrorCode::DomainError, "Kendall's tau needs at least two pairs");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return a[l] < a[r] || (a[l] == a[r] && b[l] < b[r]);
  });

  std::uint64_t tiesA = 0, tiesJoint = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e < n && a[order[e]] == a[order[i]]) ++e;
    tiesA += tiedPairs(e - i);
    for (std::size_t k = i; k < e;) {
      std::size_t f = k;
      while (f < e && b[order[f]] == b[order[k]]) ++f;
      tiesJoint += tiedPairs(f - k);
      k = f;
    }
    i = e;
  }

  std::vector<double> ys(n), buffer(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = b[order[i]];
  const std::uint64_t swaps = countSwaps(ys, buffer, 0, n);

  std::uint64_t tiesB = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e < n && ys[e] == ys[i]) ++e;
    tiesB += tiedPairs(e - i);
    i = e;
  }

  const auto total = static_cast<double>(tiedPairs(n));
  const double numerator = total - static_cast<double>(tiesA) - static_cast<double>(tiesB) +
                           static_cast<double>(tiesJoint) - 2.0 * static_cast<double>(swaps);
  const double denominator =
      std::sqrt((total - static_cast<double>(tiesA)) * (total - static_cast<double>(tiesB)));
  if (!(denominator > 0.0)) fail(ErrorCode::DegenerateSample, "Kendall's tau of a constant column");
  return numerator / denominator;
}

}  // namespace divisim
