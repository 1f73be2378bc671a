#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subsearch/evaluation.hpp"

namespace subsearch {

struct NamedConfig {
  std::string label;
  RankingConfig cfg;
};

struct SweepOptions {
  /// Shift sigmas in units of the reference frame (pixels when
  /// ref_width_px/ref_height_px are set to the frame size; normalized when
  /// both are 1).
  std::vector<double> sigma_shift;
  std::vector<double> sigma_area;
  std::uint64_t master_seed = 0;
  int ref_width_px = 1;
  int ref_height_px = 1;
  TextField text_field = TextField::long_text;
  unsigned threads = 0;
};

struct SweepCell {
  std::string config_label;
  RankingConfig cfg;
  double sigma_shift = 0.0;  // as given in SweepOptions
  double sigma_area = 0.0;
  std::vector<EvalReport> reports;
};

/// Perturbation config used for one grid cell.
PerturbationConfig sweep_perturbation(const SweepOptions& options,
                                      double sigma_shift, double sigma_area);

/// Evaluates every config on every (sigma_shift, sigma_area) cell. Perturbed
/// query rects depend only on (seed, query_id, sigmas), so all configs in a
/// cell see identical rects. Cells are ordered by config, then sigma_shift,
/// then sigma_area, following the input order.
std::vector<SweepCell> perturbation_sweep(
    const IndexedCollection& coll, const std::vector<Annotation>& annotations,
    const std::vector<NamedConfig>& configs, const SweepOptions& options);

inline constexpr char kSweepCsvHeader[] =
    "config,distance,fusion,alpha,sigma_shift,sigma_area,subset,metric,value";

/// One row per cell x subset x metric (R@1, R@10, R@100, R@1000, MNR).
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

}  // namespace subsearch
