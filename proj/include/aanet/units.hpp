#pragma once

namespace aanet::units {

// Link metrics are carried in SI (seconds, bit/s) inside the solvers.
// DNN features/labels and CSV exports use ms / Mbps / min so magnitudes
// stay O(1..1000).
inline constexpr double kMsPerS = 1e3;
inline constexpr double kBpsPerMbps = 1e6;
inline constexpr double kSPerMin = 60.0;

inline double to_ms(double s) { return s * kMsPerS; }
inline double from_ms(double ms) { return ms / kMsPerS; }
inline double to_mbps(double bps) { return bps / kBpsPerMbps; }
inline double from_mbps(double mbps) { return mbps * kBpsPerMbps; }
inline double to_min(double s) { return s / kSPerMin; }
inline double from_min(double min) { return min * kSPerMin; }

// Label sentinel marking padded/unreachable output slots (label units).
inline constexpr double kSentinel = 1e8;

} // namespace aanet::units
