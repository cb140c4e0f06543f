#include "aanet/linkmodel.hpp"

#include "aanet/errors.hpp"
#include "aanet/rng.hpp"

#include <cmath>

namespace aanet::link {

RadioParams paper_ku_band() {
    RadioParams rp;
    rp.bandwidth_hz = 6e6;
    rp.carrier_hz = 14e9;
    rp.tx_power_w = 1.0;                      // 30 dBm
    rp.tx_gain_lin = std::pow(10.0, 2.5);     // 25 dBi
    rp.rx_gain_lin = std::pow(10.0, 2.5);
    rp.noise_power_w =
        noise_power_w(1.3e-23, 223.15, rp.bandwidth_hz, std::pow(10.0, 0.4));
    rp.packet_bits = 8192.0;
    rp.light_speed_mps = 3e8;
    return rp;
}

double noise_power_w(double k, double temp_k, double bandwidth_hz,
                     double noise_figure_lin) {
    return k * temp_k * bandwidth_hz * noise_figure_lin;
}

double link_capacity_bps(double d_km, const RadioParams& rp) {
    if (d_km <= 0.0) throw ConfigError("link_capacity: distance must be positive");
    const double d_m = d_km * 1000.0;
    const double amp =
        rp.light_speed_mps / (4.0 * M_PI * rp.carrier_hz * d_m);
    const double snr =
        rp.tx_power_w * rp.tx_gain_lin * rp.rx_gain_lin / rp.noise_power_w * amp * amp;
    return rp.bandwidth_hz * std::log2(1.0 + snr);
}

double link_delay_s(const flight::NodeState& tx, const flight::NodeState& rx,
                    double queue_s, const RadioParams& rp) {
    if (!geo::visible(tx.pos, rx.pos))
        throw DataError("link_delay: nodes " + tx.id + " and " + rx.id +
                        " are not within visibility range");
    const double d_km = geo::distance_km(tx.pos, rx.pos);
    const double capacity = link_capacity_bps(std::max(d_km, 1e-3), rp);
    return queue_s + rp.packet_bits / capacity + d_km * 1000.0 / rp.light_speed_mps;
}

double sample_queue_delay(const QueueModel& qm, std::uint64_t seed) {
    if (qm.kind == QueueModel::Kind::Constant) return qm.constant_s;
    rng::Stream rs(seed);
    return rs.trunc_gaussian(qm.mean_s, qm.std_s, qm.lower_s);
}

namespace {

bool pair_visible(const PositionFn& a, const PositionFn& b, double ts) {
    const auto pa = a(ts);
    const auto pb = b(ts);
    return pa && pb && geo::visible(*pa, *pb);
}

} // namespace

double link_lifetime_s(const PositionFn& a, const PositionFn& b, double t0_s,
                       const LifetimeParams& lp) {
    if (!pair_visible(a, b, t0_s))
        throw DataError("link_lifetime: pair not visible at start time");

    // coarse scan for the first visibility loss
    double lo = 0.0;
    double hi = -1.0;
    for (double dt = lp.coarse_step_s; dt <= lp.horizon_s + 1e-9; dt += lp.coarse_step_s) {
        if (pair_visible(a, b, t0_s + dt)) {
            lo = dt;
        } else {
            hi = dt;
            break;
        }
    }
    if (hi < 0.0) {
        if (lo < lp.horizon_s && !pair_visible(a, b, t0_s + lp.horizon_s))
            hi = lp.horizon_s;
        else
            return lp.horizon_s;
    }

    while (hi - lo > lp.resolution_s) {
        const double mid = 0.5 * (lo + hi);
        if (pair_visible(a, b, t0_s + mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double link_lifetime_scan_s(const PositionFn& a, const PositionFn& b, double t0_s,
                            const LifetimeParams& lp) {
    if (!pair_visible(a, b, t0_s))
        throw DataError("link_lifetime_scan: pair not visible at start time");
    double dt = 0.0;
    while (dt + lp.resolution_s <= lp.horizon_s + 1e-9) {
        if (!pair_visible(a, b, t0_s + dt + lp.resolution_s)) return dt;
        dt += lp.resolution_s;
    }
    return lp.horizon_s;
}

PositionFn track_of(const flight::Trajectory& traj) {
    return [&traj](double ts) -> std::optional<geo::GeoPos> {
        auto n = flight::position_at(traj, ts);
        if (!n) return std::nullopt;
        return n->pos;
    };
}

PositionFn fixed_track(const geo::GeoPos& pos) {
    return [pos](double) -> std::optional<geo::GeoPos> { return pos; };
}

} // namespace aanet::link
