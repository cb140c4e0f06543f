#include "aanet/flightdata.hpp"

#include "aanet/errors.hpp"
#include "aanet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace aanet::flight {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return out;
}

double parse_num(const std::string& s, const char* what, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse " +
                        std::string(what) + " from '" + s + "'");
    }
}

double wrap_heading(double h) {
    h = std::fmod(h, 360.0);
    if (h < 0.0) h += 360.0;
    return h;
}

// Forward azimuth from a to b, degrees clockwise from north.
double initial_bearing_deg(const geo::GeoPos& a, const geo::GeoPos& b) {
    const double la = geo::deg_to_rad(a.lat_deg), lb = geo::deg_to_rad(b.lat_deg);
    const double dlon = geo::deg_to_rad(b.lon_deg - a.lon_deg);
    const double y = std::sin(dlon) * std::cos(lb);
    const double x = std::cos(la) * std::sin(lb) -
                     std::sin(la) * std::cos(lb) * std::cos(dlon);
    return wrap_heading(geo::rad_to_deg(std::atan2(y, x)));
}

// Point reached from `a` after traveling `dist_km` along the great circle
// with initial bearing `bearing_deg` on the sphere of radius r_km.
geo::GeoPos great_circle_step(const geo::GeoPos& a, double bearing_deg,
                              double dist_km, double r_km) {
    const double delta = dist_km / r_km;
    const double theta = geo::deg_to_rad(bearing_deg);
    const double la = geo::deg_to_rad(a.lat_deg);
    const double lo = geo::deg_to_rad(a.lon_deg);
    const double lat2 = std::asin(std::sin(la) * std::cos(delta) +
                                  std::cos(la) * std::sin(delta) * std::cos(theta));
    const double lon2 =
        lo + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(la),
                        std::cos(delta) - std::sin(la) * std::sin(lat2));
    double lon_deg = geo::rad_to_deg(lon2);
    lon_deg = std::remainder(lon_deg, 360.0);
    if (lon_deg >= 180.0) lon_deg -= 360.0;
    if (lon_deg < -180.0) lon_deg += 360.0;
    return {geo::rad_to_deg(lat2), lon_deg, a.alt_km};
}

void validate_record(const FlightRecord& r, int line_no) {
    if (!geo::valid(r.pos))
        throw DataError("line " + std::to_string(line_no) + ": invalid position");
    if (r.speed_mps < 0.0)
        throw DataError("line " + std::to_string(line_no) + ": negative speed");
}

} // namespace

Scenario load_scenario(const std::filesystem::path& flights_file,
                       const std::filesystem::path& gs_file) {
    std::ifstream in(flights_file);
    if (!in) throw DataError("cannot open " + flights_file.string());

    Scenario s;
    std::vector<Trajectory*> order;
    std::set<std::string> flight_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv(line);
        if (f.size() != 7)
            throw DataError("line " + std::to_string(line_no) +
                            ": expected 7 fields, got " + std::to_string(f.size()));
        FlightRecord rec;
        rec.ts_s = parse_num(f[1], "ts", line_no);
        rec.pos = {parse_num(f[2], "lat", line_no), parse_num(f[3], "lon", line_no),
                   parse_num(f[4], "alt", line_no)};
        rec.speed_mps = parse_num(f[5], "speed", line_no);
        rec.heading_deg = wrap_heading(parse_num(f[6], "heading", line_no));
        validate_record(rec, line_no);

        Trajectory* traj = nullptr;
        if (!s.flights.empty() && s.flights.back().flight_id == f[0]) {
            traj = &s.flights.back();
        } else if (flight_ids.insert(f[0]).second) {
            s.flights.push_back(Trajectory{f[0], {}});
            traj = &s.flights.back();
        } else {
            // id seen before but not contiguous: records out of order
            for (auto& t : s.flights)
                if (t.flight_id == f[0]) traj = &t;
        }
        if (!traj->records.empty() && rec.ts_s <= traj->records.back().ts_s)
            throw DataError("line " + std::to_string(line_no) +
                            ": non-monotone ts for flight " + f[0]);
        traj->records.push_back(rec);
    }
    if (s.flights.empty()) throw DataError("no flights in " + flights_file.string());

    std::ifstream gin(gs_file);
    if (!gin) throw DataError("cannot open " + gs_file.string());
    std::set<std::string> ids(flight_ids);
    line_no = 0;
    while (std::getline(gin, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv(line);
        if (f.size() != 3)
            throw DataError("ground stations line " + std::to_string(line_no) +
                            ": expected 3 fields");
        GroundStation gs{f[0],
                         {parse_num(f[1], "lat", line_no), parse_num(f[2], "lon", line_no), 0.0}};
        if (!geo::valid(gs.pos))
            throw DataError("ground stations line " + std::to_string(line_no) +
                            ": invalid position");
        if (!ids.insert(gs.id).second)
            throw DataError("duplicate id '" + gs.id + "'");
        s.ground_stations.push_back(gs);
    }
    return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& flights_file,
                   const std::filesystem::path& gs_file) {
    std::ofstream out(flights_file);
    if (!out) throw DataError("cannot write " + flights_file.string());
    out.precision(17);
    out << "# flight_id, ts_s, lat_deg, lon_deg, alt_km, speed_mps, heading_deg\n";
    for (const auto& t : s.flights)
        for (const auto& r : t.records)
            out << t.flight_id << ',' << r.ts_s << ',' << r.pos.lat_deg << ','
                << r.pos.lon_deg << ',' << r.pos.alt_km << ',' << r.speed_mps << ','
                << r.heading_deg << '\n';

    std::ofstream gout(gs_file);
    if (!gout) throw DataError("cannot write " + gs_file.string());
    gout.precision(17);
    gout << "# gs_id, lat_deg, lon_deg\n";
    for (const auto& g : s.ground_stations)
        gout << g.id << ',' << g.pos.lat_deg << ',' << g.pos.lon_deg << '\n';
}

std::optional<NodeState> position_at(const Trajectory& traj, double ts_s) {
    const auto& rs = traj.records;
    if (rs.empty() || ts_s < rs.front().ts_s || ts_s > rs.back().ts_s)
        return std::nullopt;

    auto it = std::lower_bound(rs.begin(), rs.end(), ts_s,
                               [](const FlightRecord& r, double t) { return r.ts_s < t; });
    if (it->ts_s == ts_s)
        return NodeState{traj.flight_id, it->pos, it->speed_mps, it->heading_deg};

    const FlightRecord& b = *it;
    const FlightRecord& a = *(it - 1);
    const double w = (ts_s - a.ts_s) / (b.ts_s - a.ts_s);
    NodeState n;
    n.id = traj.flight_id;
    n.pos = {a.pos.lat_deg + w * (b.pos.lat_deg - a.pos.lat_deg),
             a.pos.lon_deg + w * (b.pos.lon_deg - a.pos.lon_deg),
             a.pos.alt_km + w * (b.pos.alt_km - a.pos.alt_km)};
    n.speed_mps = a.speed_mps + w * (b.speed_mps - a.speed_mps);
    double dh = std::remainder(b.heading_deg - a.heading_deg, 360.0);
    n.heading_deg = wrap_heading(a.heading_deg + w * dh);
    return n;
}

Scenario synth_scenario(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.flight_count <= 0) throw ConfigError("flight_count must be positive");
    if (cfg.duration_s <= 0.0) throw ConfigError("duration_s must be positive");
    if (cfg.sample_interval_s <= 0.0) throw ConfigError("sample_interval_s must be positive");
    if (cfg.lat_min_deg >= cfg.lat_max_deg || cfg.lon_min_deg >= cfg.lon_max_deg)
        throw ConfigError("empty bounding box");
    if (cfg.ground_stations.empty()) throw ConfigError("at least one ground station required");

    Scenario s;
    s.sample_interval_s = cfg.sample_interval_s;
    s.ground_stations = cfg.ground_stations;

    const int steps = static_cast<int>(std::floor(cfg.duration_s / cfg.sample_interval_s));
    for (int i = 0; i < cfg.flight_count; ++i) {
        rng::Stream rs(rng::substream(seed, "synth-flight", static_cast<std::uint64_t>(i)));
        geo::GeoPos from{rs.uniform(cfg.lat_min_deg, cfg.lat_max_deg),
                         rs.uniform(cfg.lon_min_deg, cfg.lon_max_deg),
                         rs.uniform(cfg.alt_min_km, cfg.alt_max_km)};
        geo::GeoPos to{rs.uniform(cfg.lat_min_deg, cfg.lat_max_deg),
                       rs.uniform(cfg.lon_min_deg, cfg.lon_max_deg), from.alt_km};
        const double speed = rs.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
        const double bearing = initial_bearing_deg(from, to);
        const double r_km = geo::kEarthRadiusKm + from.alt_km;

        Trajectory traj;
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "F%03d", i);
        traj.flight_id = idbuf;
        geo::GeoPos cur = from;
        double cur_bearing = bearing;
        for (int k = 0; k <= steps; ++k) {
            const double ts = k * cfg.sample_interval_s;
            traj.records.push_back({ts, cur, speed, cur_bearing});
            const double step_km = speed * cfg.sample_interval_s / 1000.0;
            const geo::GeoPos next = great_circle_step(cur, cur_bearing, step_km, r_km);
            // course along the great circle drifts; keep heading consistent
            // with the actual direction of motion
            cur_bearing = initial_bearing_deg(cur, next);
            traj.records[traj.records.size() - 1].heading_deg = cur_bearing;
            cur = next;
        }
        s.flights.push_back(std::move(traj));
    }
    return s;
}

Scenario time_shift_augment(const Scenario& s, double sigma_s, std::uint64_t seed) {
    if (sigma_s < 0.0) throw ConfigError("sigma_s must be nonnegative");
    if (sigma_s == 0.0) return s;
    Scenario out = s;
    for (std::size_t i = 0; i < out.flights.size(); ++i) {
        rng::Stream rs(rng::substream(seed, "time-shift", static_cast<std::uint64_t>(i)));
        const double raw = rs.gaussian(0.0, sigma_s);
        const double shift = std::round(raw / s.sample_interval_s) * s.sample_interval_s;
        for (auto& r : out.flights[i].records) r.ts_s += shift;
    }
    return out;
}

Snapshot snapshot(const Scenario& s, double ts_s) {
    Snapshot snap;
    snap.ts_s = ts_s;
    for (const auto& g : s.ground_stations)
        snap.nodes.push_back({g.id, g.pos, 0.0, 0.0});
    for (const auto& t : s.flights)
        if (auto n = position_at(t, ts_s)) snap.nodes.push_back(*n);
    return snap;
}

} // namespace aanet::flight
