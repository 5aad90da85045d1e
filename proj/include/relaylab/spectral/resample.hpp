#pragma once

#include "relaylab/signal/iq_buffer.hpp"

namespace relaylab::spectral {

/// Band-limited interpolation by an integer factor: the spectrum of `in` is
/// zero-padded to factor * N bins and transformed back, so the output keeps
/// the input's power and occupies the central 1/factor of the new band.
signal::IqBuffer upsample(const signal::IqBuffer& in, int factor);

}  // namespace relaylab::spectral
