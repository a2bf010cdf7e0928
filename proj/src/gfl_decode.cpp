#include "mfd/gfl_decode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfd {

SideDistribution::SideDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw std::invalid_argument("side distribution needs at least two bins");
  }
  double sum = 0.0;
  for (const double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("side distribution has a negative or non-finite bin");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("side distribution sums to " + std::to_string(sum) +
                                ", expected 1");
  }
}

SideDistribution SideDistribution::one_hot(int regmax, int bin) {
  if (regmax < 1 || bin < 0 || bin > regmax) {
    throw std::invalid_argument("one-hot bin outside [0, regmax]");
  }
  std::vector<double> p(static_cast<std::size_t>(regmax) + 1, 0.0);
  p[static_cast<std::size_t>(bin)] = 1.0;
  return SideDistribution(std::move(p));
}

SideDistribution SideDistribution::uniform(int regmax) {
  if (regmax < 1) throw std::invalid_argument("regmax must be >= 1");
  const std::size_t n = static_cast<std::size_t>(regmax) + 1;
  return SideDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double decode_side(const SideDistribution& d, double stride) {
  if (!(stride > 0.0) || !std::isfinite(stride)) {
    throw std::invalid_argument("stride must be positive");
  }
  const std::span<const double> p = d.probs();
  double expectation = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    expectation += static_cast<double>(i) * p[i];
  }
  // The sum may exceed R by the normalisation tolerance.
  expectation = std::clamp(expectation, 0.0, static_cast<double>(d.regmax()));
  return expectation * stride;
}

Box decode_box(const GridPoint& p, const SideDistributions& sides,
               const PyramidSpec& spec, std::optional<ImageSize> clip) {
  if (!spec.contains(p.level)) {
    throw std::invalid_argument("grid point level " + std::to_string(p.level) +
                                " is not in pyramid " + spec.describe());
  }
  for (const SideDistribution* d : {&sides.left, &sides.top, &sides.right, &sides.bottom}) {
    if (d->regmax() != spec.regmax()) {
      throw std::invalid_argument("side distribution has " +
                                  std::to_string(d->regmax() + 1) +
                                  " bins, pyramid expects regmax + 1 = " +
                                  std::to_string(spec.regmax() + 1));
    }
  }
  const double stride = level_stride(p.level);
  double x1 = p.x - decode_side(sides.left, stride);
  double y1 = p.y - decode_side(sides.top, stride);
  double x2 = p.x + decode_side(sides.right, stride);
  double y2 = p.y + decode_side(sides.bottom, stride);
  if (clip) {
    x1 = std::clamp(x1, 0.0, clip->width);
    x2 = std::clamp(x2, 0.0, clip->width);
    y1 = std::clamp(y1, 0.0, clip->height);
    y2 = std::clamp(y2, 0.0, clip->height);
  }
  return Box(x1, y1, x2, y2);
}

}  // namespace mfd
