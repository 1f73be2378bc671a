#pragma once

#include <cstdint>
#include <string_view>

#include "subsearch/geometry.hpp"

namespace subsearch {

/// Noise model for query rectangles.
///
/// Shift sigmas are in normalized frame units, per axis; `sigma_area` is the
/// standard deviation of the multiplicative size factor (mean 1).
struct PerturbationConfig {
  double sigma_shift_x = 0.0;
  double sigma_shift_y = 0.0;
  double sigma_area = 0.0;
  std::uint64_t master_seed = 0;

  static PerturbationConfig isotropic(double sigma_shift, double sigma_area,
                                      std::uint64_t master_seed) {
    return {sigma_shift, sigma_shift, sigma_area, master_seed};
  }

  /// Converts a pixel shift sigma using a reference frame size.
  static PerturbationConfig from_pixels(double sigma_shift_px,
                                        double sigma_area,
                                        std::uint64_t master_seed,
                                        int ref_width_px, int ref_height_px);

  bool is_identity() const {
    return sigma_shift_x == 0.0 && sigma_shift_y == 0.0 && sigma_area == 0.0;
  }

  void validate() const;
};

/// The four random draws applied to one rectangle, in draw order.
struct PerturbationDraws {
  double area_x = 1.0;
  double area_y = 1.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
};

inline constexpr double kMinScaleFactor = 0.05;

/// Draws (area_x, area_y, shift_x, shift_y) from the substream keyed by
/// (cfg.master_seed, query_key).
PerturbationDraws draw_perturbation(const PerturbationConfig& cfg,
                                    std::string_view query_key);

/// Scales about the centroid, shifts, then translates minimally back into the
/// frame. Scale factors are clamped to >= kMinScaleFactor and the resulting
/// extents to <= 1.
Rect apply_perturbation(const Rect& r, const PerturbationDraws& draws);

/// Perturbs `r` with draws keyed by (cfg.master_seed, query_key). Zero sigmas
/// return `r` unchanged.
Rect perturb_rect(const Rect& r, const PerturbationConfig& cfg,
                  std::string_view query_key);

}  // namespace subsearch
