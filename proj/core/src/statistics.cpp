#include "subsearch/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "subsearch/error.hpp"

namespace subsearch::stats {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least two pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw InvalidArgument("pearson: degenerate variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

struct SignedRanks {
  std::vector<double> ranks;  // average ranks of |d|
  std::vector<bool> positive;
  std::vector<std::size_t> tie_sizes;
};

SignedRanks rank_differences(std::span<const double> differences) {
  std::vector<double> d;
  for (double v : differences) {
    if (v != 0.0) d.push_back(v);
  }
  if (d.empty()) throw InvalidArgument("wilcoxon: all differences are zero");

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(d[a]) < std::abs(d[b]);
  });

  SignedRanks out;
  out.ranks.resize(d.size());
  out.positive.resize(d.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && std::abs(d[order[j]]) == std::abs(d[order[i]])) {
      ++j;
    }
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = avg;
    if (j - i > 1) out.tie_sizes.push_back(j - i);
    i = j;
  }
  for (std::size_t k = 0; k < d.size(); ++k) out.positive[k] = d[k] > 0.0;
  return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_p_value(const SignedRanks& sr, double statistic) {
  const double n = static_cast<double>(sr.ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (std::size_t t : sr.tie_sizes) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  if (!(var > 0.0)) return 1.0;
  // statistic <= mean, so the continuity correction moves it toward the mean.
  const double z = std::min(0.0, statistic - mean + 0.5) / std::sqrt(var);
  return std::min(1.0, 2.0 * normal_cdf(z));
}

// Exact null distribution of W+ under random signs. Average ranks are
// multiples of 1/2, so the DP runs over doubled ranks.
double exact_p_value(const SignedRanks& sr, double statistic) {
  std::vector<std::size_t> doubled(sr.ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::lround(2.0 * sr.ranks[i]));
    total += doubled[i];
  }
  // Probabilities rather than counts keep the DP finite for n up to 50.
  std::vector<double> dist(total + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t r : doubled) {
    for (std::size_t s = total; s >= r; --s) {
      dist[s] = 0.5 * dist[s] + 0.5 * dist[s - r];
    }
    for (std::size_t s = 0; s < r && s <= total; ++s) dist[s] *= 0.5;
  }
  const auto limit = static_cast<std::size_t>(std::lround(2.0 * statistic));
  double tail = 0.0;
  for (std::size_t s = 0; s <= limit && s <= total; ++s) tail += dist[s];
  return std::min(1.0, 2.0 * tail);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences) {
  const SignedRanks sr = rank_differences(differences);
  WilcoxonResult res;
  res.n = sr.ranks.size();
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    (sr.positive[i] ? res.w_plus : res.w_minus) += sr.ranks[i];
  }
  res.statistic = std::min(res.w_plus, res.w_minus);
  res.exact = res.n <= kWilcoxonExactMaxN;
  res.p_value = res.exact ? exact_p_value(sr, res.statistic)
                          : normal_p_value(sr, res.statistic);
  return res;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("wilcoxon: length mismatch");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return wilcoxon_signed_rank(d);
}

double wilcoxon_normal_p_value(std::span<const double> differences) {
  const SignedRanks sr = rank_differences(differences);
  double w_plus = 0.0;
  double w_minus = 0.0;
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    (sr.positive[i] ? w_plus : w_minus) += sr.ranks[i];
  }
  return normal_p_value(sr, std::min(w_plus, w_minus));
}

}  // namespace subsearch::stats
