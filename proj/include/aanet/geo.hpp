#pragma once

namespace aanet::geo {

inline constexpr double kEarthRadiusKm = 6371.0;

// Geodetic position on the spherical earth model.
// lat_deg in [-90, 90], lon_deg in [-180, 180), alt_km >= 0.
struct GeoPos {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_km = 0.0;
};

// Earth-centered Cartesian coordinates, km.
struct CartPos {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_km = 0.0;
};

bool valid(const GeoPos& p);

CartPos to_cartesian(const GeoPos& p);

// Euclidean (chord) distance between the converted points, km.
double distance_km(const GeoPos& a, const GeoPos& b);

// Maximum distance at which two nodes at altitudes h_i, h_j (km) are both
// above the horizon, km.
double max_link_range_km(double h_i_km, double h_j_km);

// Direct-link visibility: distance within the horizon range.
bool visible(const GeoPos& a, const GeoPos& b);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace aanet::geo
