#pragma once

#include <string>

#include "mfd/geometry.hpp"

namespace mfd {

// A scored box produced by a detector. model_id identifies the source model
// when several detectors are ensembled; it is 0 for single-source input.
struct Detection {
  Detection(const Box& box, ClassLabel label, double score, int model_id = 0);

  Box box;
  ClassLabel label;
  double score;
  int model_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthInstance {
  std::string page_id;
  ClassLabel label;
  Box box;

  friend bool operator==(const GroundTruthInstance&,
                         const GroundTruthInstance&) = default;
};

// A detection tagged with the page it belongs to, as stored in prediction files.
struct PredictionRecord {
  std::string page_id;
  Detection det;

  friend bool operator==(const PredictionRecord&,
                         const PredictionRecord&) = default;
};

}  // namespace mfd
