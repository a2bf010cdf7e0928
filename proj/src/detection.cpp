#include "mfd/detection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfd {

Detection::Detection(const Box& box, ClassLabel label, double score, int model_id)
    : box(box), label(label), score(score), model_id(model_id) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("detection score " + std::to_string(score) +
                                " outside [0, 1]");
  }
  if (model_id < 0) {
    throw std::invalid_argument("model_id must be non-negative");
  }
}

}  // namespace mfd
