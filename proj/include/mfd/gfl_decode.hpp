#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "mfd/geometry.hpp"
#include "mfd/pyramid.hpp"

namespace mfd {

// Discrete distribution over integer side offsets 0..R (in strides), as
// produced by a GFL regression head after softmax.
class SideDistribution {
 public:
  static constexpr double kSumTolerance = 1e-6;

  // Throws std::invalid_argument unless there are at least two bins, every
  // probability is finite and non-negative, and they sum to 1 within kSumTolerance.
  explicit SideDistribution(std::vector<double> probs);

  static SideDistribution one_hot(int regmax, int bin);
  static SideDistribution uniform(int regmax);

  int regmax() const { return static_cast<int>(probs_.size()) - 1; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// Expected offset sum_i i * p_i, times stride; always within [0, R * stride].
// Throws std::invalid_argument for a non-positive stride.
double decode_side(const SideDistribution& d, double stride);

struct ImageSize {
  double width;
  double height;
};

struct SideDistributions {
  SideDistribution left, top, right, bottom;
};

// Box (x - L, y - T, x + R, y + B) around a grid point, optionally clipped to
// the image. Throws std::invalid_argument if the point's level is not in the
// spec or a distribution has a different bin count than spec.regmax().
Box decode_box(const GridPoint& p, const SideDistributions& sides,
               const PyramidSpec& spec,
               std::optional<ImageSize> clip = std::nullopt);

}  // namespace mfd
