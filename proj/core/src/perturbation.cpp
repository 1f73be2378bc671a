#include "subsearch/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "subsearch/error.hpp"
#include "subsearch/random.hpp"

namespace subsearch {

PerturbationConfig PerturbationConfig::from_pixels(double sigma_shift_px,
                                                   double sigma_area,
                                                   std::uint64_t master_seed,
                                                   int ref_width_px,
                                                   int ref_height_px) {
  if (ref_width_px <= 0 || ref_height_px <= 0) {
    throw InvalidArgument("reference frame size must be positive");
  }
  return {sigma_shift_px / ref_width_px, sigma_shift_px / ref_height_px,
          sigma_area, master_seed};
}

void PerturbationConfig::validate() const {
  if (!(sigma_shift_x >= 0.0) || !(sigma_shift_y >= 0.0) ||
      !(sigma_area >= 0.0)) {
    throw InvalidArgument("perturbation sigmas must be nonnegative");
  }
}

PerturbationDraws draw_perturbation(const PerturbationConfig& cfg,
                                    std::string_view query_key) {
  SubstreamRng rng(cfg.master_seed, query_key);
  PerturbationDraws d;
  d.area_x = rng.normal(1.0, cfg.sigma_area);
  d.area_y = rng.normal(1.0, cfg.sigma_area);
  d.shift_x = rng.normal(0.0, cfg.sigma_shift_x);
  d.shift_y = rng.normal(0.0, cfg.sigma_shift_y);
  return d;
}

Rect apply_perturbation(const Rect& r, const PerturbationDraws& draws) {
  const double sx = std::max(draws.area_x, kMinScaleFactor);
  const double sy = std::max(draws.area_y, kMinScaleFactor);
  const double width = std::min(r.width * sx, 1.0);
  const double height = std::min(r.height * sy, 1.0);

  // Keep the centroid; written as an offset so that an unscaled side keeps
  // its coordinate bit-for-bit.
  double left = r.left + (r.width - width) / 2.0 + draws.shift_x;
  double top = r.top + (r.height - height) / 2.0 + draws.shift_y;

  if (left < 0.0) left = 0.0;
  if (left + width > 1.0) left = 1.0 - width;
  if (top < 0.0) top = 0.0;
  if (top + height > 1.0) top = 1.0 - height;
  return {left, top, width, height};
}

Rect perturb_rect(const Rect& r, const PerturbationConfig& cfg,
                  std::string_view query_key) {
  if (cfg.is_identity()) return r;
  return apply_perturbation(r, draw_perturbation(cfg, query_key));
}

}  // namespace subsearch
