#pragma once

#include <string>

#include "specfuse/types.hpp"

namespace specfuse {

// FEAT container, the on-disk form of a FeatureMatrix. Little-endian layout:
//
//   offset  size  field
//   0       4     magic "FEAT"
//   4       1     version (currently 1)
//   5       4     T, frame count (uint32)
//   9       4     D, feature dimension (uint32)
//   13      4     frame shift in ms (float32)
//   17      1     source tag (0=SF, 1=SSL, 2=FUSED)
//   18      4*T*D payload, float32 row-major
//
// Malformed files raise Error(Format) naming the byte offset; non-finite
// payload values raise Error(InvalidData).
void save_features(const std::string& path, const FeatureMatrix& fm);
FeatureMatrix load_features(const std::string& path);

}  // namespace specfuse
