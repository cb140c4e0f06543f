#include "aanet/geo.hpp"

#include <cmath>

namespace aanet::geo {

double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

bool valid(const GeoPos& p) {
    return p.lat_deg >= -90.0 && p.lat_deg <= 90.0 && p.lon_deg >= -180.0 &&
           p.lon_deg < 180.0 && p.alt_km >= 0.0 && std::isfinite(p.alt_km);
}

CartPos to_cartesian(const GeoPos& p) {
    const double r = kEarthRadiusKm + p.alt_km;
    const double lat = deg_to_rad(p.lat_deg);
    const double lon = deg_to_rad(p.lon_deg);
    // z uses sin(lat); the standard spherical conversion.
    return CartPos{r * std::cos(lat) * std::cos(lon),
                   r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

double distance_km(const GeoPos& a, const GeoPos& b) {
    const CartPos ca = to_cartesian(a);
    const CartPos cb = to_cartesian(b);
    const double dx = ca.x_km - cb.x_km;
    const double dy = ca.y_km - cb.y_km;
    const double dz = ca.z_km - cb.z_km;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double max_link_range_km(double h_i_km, double h_j_km) {
    const double r = kEarthRadiusKm;
    const double ti = std::sqrt((h_i_km + r) * (h_i_km + r) - r * r);
    const double tj = std::sqrt((h_j_km + r) * (h_j_km + r) - r * r);
    return ti + tj;
}

bool visible(const GeoPos& a, const GeoPos& b) {
    return distance_km(a, b) <= max_link_range_km(a.alt_km, b.alt_km);
}

} // namespace aanet::geo
