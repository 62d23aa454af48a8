#pragma once

#include <cmath>
#include <cstddef>

namespace divisim::test {

// Asymptotic 0.01-level KS critical values.
inline double ksCritical(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }
inline double ksCritical2(std::size_t n, std::size_t m) {
  return 1.63 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

inline double relErr(double got, double want) { return std::fabs(got / want - 1.0); }

}  // namespace divisim::test
