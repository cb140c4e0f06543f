#pragma once

#include "aanet/flightdata.hpp"
#include "aanet/geo.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace aanet::link {

struct RadioParams {
    double bandwidth_hz = 0.0;   // W
    double carrier_hz = 0.0;     // f
    double tx_power_w = 0.0;     // P
    double tx_gain_lin = 1.0;    // G_t
    double rx_gain_lin = 1.0;    // G_r
    double noise_power_w = 0.0;  // sigma^2
    double packet_bits = 8192.0; // S, 1 KByte
    double light_speed_mps = 3e8;
};

// Ku-band air-to-air preset: P = 30 dBm, G = 25 dBi each, f = 14 GHz,
// W = 6 MHz, sigma^2 = kTWF with T = 223.15 K and F = 4 dB.
RadioParams paper_ku_band();

double noise_power_w(double k, double temp_k, double bandwidth_hz, double noise_figure_lin);

// Shannon capacity of the free-space link at chord distance d_km, bit/s.
// Throws ConfigError for d_km <= 0.
double link_capacity_bps(double d_km, const RadioParams& rp);

// queuing + transmission + propagation.  Throws DataError when the pair is
// not within visibility range.
double link_delay_s(const flight::NodeState& tx, const flight::NodeState& rx,
                    double queue_s, const RadioParams& rp);

// Per-node queuing delay: constant while generating training labels,
// truncated Gaussian while evaluating.
struct QueueModel {
    enum class Kind { Constant, TruncGaussian } kind = Kind::Constant;
    double constant_s = 0.010;
    double mean_s = 0.010;
    double std_s = 0.005;
    double lower_s = 0.001;

    static QueueModel constant(double d_s) {
        return {Kind::Constant, d_s, 0, 0, 0};
    }
    static QueueModel trunc_gaussian(double mean_s, double std_s, double lower_s) {
        return {Kind::TruncGaussian, 0, mean_s, std_s, lower_s};
    }
};

double sample_queue_delay(const QueueModel& qm, std::uint64_t seed);

struct LinkMetrics {
    double delay_s = 0.0;
    double capacity_bps = 0.0;
    double lifetime_s = 0.0;
};

struct LifetimeParams {
    double horizon_s = 3600.0;
    double resolution_s = 1.0;
    double coarse_step_s = 10.0;
};

// Position of a node at a future timestamp; empty once the node leaves the
// scenario (which breaks the link).
using PositionFn = std::function<std::optional<geo::GeoPos>(double ts_s)>;

// Largest dt (capped at the horizon) such that the pair stays visible up to
// t0 + dt: coarse scan to bracket the first visibility loss, then bisection
// down to the resolution.  Throws DataError if not visible at t0.
double link_lifetime_s(const PositionFn& a, const PositionFn& b, double t0_s,
                       const LifetimeParams& lp = {});

// Reference 1-s-step scan with the same visibility rule.
double link_lifetime_scan_s(const PositionFn& a, const PositionFn& b, double t0_s,
                            const LifetimeParams& lp = {});

PositionFn track_of(const flight::Trajectory& traj);
PositionFn fixed_track(const geo::GeoPos& pos);

} // namespace aanet::link
