#pragma once

#include <cstdint>

#include "limeout/dataset.hpp"

namespace limeout {

// Oversamples the minority class to exact parity. Each synthetic row
// interpolates the numerical part between a minority sample and one of its
// k nearest minority neighbors (Euclidean over numericals, exact-match over
// categoricals); categorical values are copied from the seed sample.
// Original rows are preserved unchanged and come first in the result.
Dataset smote_oversample(const Dataset& train, int k_neighbors, std::uint64_t seed);

}  // namespace limeout
