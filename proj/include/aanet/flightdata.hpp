#pragma once

#include "aanet/geo.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aanet::flight {

// One sampled trajectory point: [ts, lat, lon, alt, speed, heading].
struct FlightRecord {
    double ts_s = 0.0;
    geo::GeoPos pos;
    double speed_mps = 0.0;
    double heading_deg = 0.0; // clockwise from true north, [0, 360)
};

struct Trajectory {
    std::string flight_id;
    std::vector<FlightRecord> records; // strictly increasing ts, nonempty
};

struct GroundStation {
    std::string id;
    geo::GeoPos pos; // alt_km = 0
};

struct Scenario {
    std::vector<Trajectory> flights;
    std::vector<GroundStation> ground_stations;
    double sample_interval_s = 10.0;
};

struct NodeState {
    std::string id;
    geo::GeoPos pos;
    double speed_mps = 0.0;
    double heading_deg = 0.0;
};

struct Snapshot {
    double ts_s = 0.0;
    std::vector<NodeState> nodes; // ground stations first, then active flights
};

// Comma-separated flight records plus a ground-station file; '#' starts a
// comment line.  Throws DataError on malformed input (message carries the
// line number).
Scenario load_scenario(const std::filesystem::path& flights_file,
                       const std::filesystem::path& gs_file);
void save_scenario(const Scenario& s, const std::filesystem::path& flights_file,
                   const std::filesystem::path& gs_file);

// Linear interpolation of lat/lon/alt/speed between bracketing records;
// heading interpolated along the shortest circular arc.  Empty when ts is
// outside the trajectory's time span.
std::optional<NodeState> position_at(const Trajectory& traj, double ts_s);

struct SynthConfig {
    double lat_min_deg = 40.0, lat_max_deg = 55.0;
    double lon_min_deg = -40.0, lon_max_deg = -5.0;
    int flight_count = 50;
    double duration_s = 21600.0;
    double alt_min_km = 9.5, alt_max_km = 11.5;
    double speed_min_mps = 210.0, speed_max_mps = 250.0;
    double sample_interval_s = 10.0;
    std::vector<GroundStation> ground_stations{{"GS0", {52.0, -8.0, 0.0}}};
};

// Great-circle flights between random endpoints in the box, constant
// altitude and speed, sampled on the interval grid.  Deterministic per seed.
Scenario synth_scenario(const SynthConfig& cfg, std::uint64_t seed);

// Shifts each trajectory's timeline by an independent Gaussian draw
// (rounded to the sampling grid).  sigma_s = 0 returns the input unchanged.
Scenario time_shift_augment(const Scenario& s, double sigma_s, std::uint64_t seed);

// Ground stations always; flights where position_at(ts) is defined.
Snapshot snapshot(const Scenario& s, double ts_s);

} // namespace aanet::flight
