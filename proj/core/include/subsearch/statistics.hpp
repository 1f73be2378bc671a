#pragma once

#include <cstddef>
#include <span>

namespace subsearch::stats {

/// Sample Pearson correlation. Throws InvalidArgument for unequal lengths,
/// n < 2, or a zero-variance argument.
double pearson(std::span<const double> x, std::span<const double> y);

struct WilcoxonResult {
  double statistic = 0.0;  // W = min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n = 0;  // pairs left after dropping zero differences
  double p_value = 1.0;  // two-sided
  bool exact = false;
};

/// Above this many nonzero differences the p-value uses the normal
/// approximation (tie- and continuity-corrected); at or below it the exact
/// null distribution of W+ is enumerated.
inline constexpr std::size_t kWilcoxonExactMaxN = 50;

/// Paired Wilcoxon signed-rank test on x - y. Zero differences are dropped,
/// tied magnitudes get average ranks. Throws InvalidArgument if the lengths
/// differ or every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y);

/// Same test on precomputed differences.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);

/// Two-sided p-value from the normal approximation, regardless of n.
double wilcoxon_normal_p_value(std::span<const double> differences);

}  // namespace subsearch::stats
