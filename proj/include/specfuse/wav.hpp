#pragma once

#include <string>

#include "specfuse/types.hpp"

namespace specfuse {

// 16-bit PCM mono WAV with the canonical 44-byte header. Anything else
// (stereo, compressed, other bit depths, non-canonical chunk layout) raises
// Error(Format). Samples are scaled to [-1, 1) on read.
Waveform read_wav(const std::string& path);

// Canonical 44-byte-header writer; samples are clamped to [-1, 1] and
// quantized to 16-bit PCM.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace specfuse
