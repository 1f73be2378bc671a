#include "subsearch/sweep.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "subsearch/error.hpp"
#include "subsearch/random.hpp"

namespace subsearch {

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string grid_fingerprint(const RankingConfig& cfg,
                             const SweepOptions& options) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.describe() << '|' << to_string(options.text_field) << "|seed:"
     << options.master_seed << "|ref:" << options.ref_width_px << 'x'
     << options.ref_height_px << "|s:";
  for (double s : options.sigma_shift) os << s << ',';
  os << "|a:";
  for (double a : options.sigma_area) os << a << ',';
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

}  // namespace

PerturbationConfig sweep_perturbation(const SweepOptions& options,
                                      double sigma_shift, double sigma_area) {
  return PerturbationConfig::from_pixels(sigma_shift, sigma_area,
                                         options.master_seed,
                                         options.ref_width_px,
                                         options.ref_height_px);
}

std::vector<SweepCell> perturbation_sweep(
    const IndexedCollection& coll, const std::vector<Annotation>& annotations,
    const std::vector<NamedConfig>& configs, const SweepOptions& options) {
  if (options.sigma_shift.empty() || options.sigma_area.empty()) {
    throw InvalidArgument("sweep grids must be non-empty");
  }
  if (configs.empty()) throw InvalidArgument("sweep needs at least one config");
  if (annotations.empty()) throw InvalidArgument("no annotations to evaluate");

  const std::size_t n_s = options.sigma_shift.size();
  const std::size_t n_a = options.sigma_area.size();
  std::vector<SweepCell> cells(configs.size() * n_s * n_a);

  std::vector<Rect> rects(annotations.size());
  for (std::size_t si = 0; si < n_s; ++si) {
    for (std::size_t ai = 0; ai < n_a; ++ai) {
      const double s = options.sigma_shift[si];
      const double a = options.sigma_area[ai];
      const PerturbationConfig pc = sweep_perturbation(options, s, a);
      pc.validate();
      for (std::size_t q = 0; q < annotations.size(); ++q) {
        rects[q] = perturb_rect(annotations[q].rect, pc, annotations[q].query_id);
      }
      for (std::size_t c = 0; c < configs.size(); ++c) {
        auto outcomes = evaluate_queries(coll, annotations, rects,
                                         configs[c].cfg, options.text_field,
                                         options.threads);
        SweepCell& cell = cells[(c * n_s + si) * n_a + ai];
        cell.config_label = configs[c].label;
        cell.cfg = configs[c].cfg;
        cell.sigma_shift = s;
        cell.sigma_area = a;
        cell.reports = summarize(std::move(outcomes),
                                 grid_fingerprint(configs[c].cfg, options));
      }
    }
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << kSweepCsvHeader << '\n';
  for (const auto& cell : cells) {
    const std::string prefix =
        cell.config_label + ',' + std::string(to_string(cell.cfg.distance_kind)) +
        ',' + std::string(to_string(cell.cfg.fusion)) + ',' +
        fixed4(cell.cfg.alpha) + ',' + fixed4(cell.sigma_shift) + ',' +
        fixed4(cell.sigma_area) + ',';
    for (const auto& report : cell.reports) {
      const std::string row = prefix + std::string(to_string(report.subset)) + ',';
      for (const auto& [k, value] : report.recall_at) {
        out << row << "R@" << k << ',' << fixed4(value) << '\n';
      }
      out << row << "MNR," << fixed4(report.mean_rank) << '\n';
    }
  }
}

}  // namespace subsearch
