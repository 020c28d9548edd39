#include "anafi/geo.hpp"

namespace anafi {

Vec3 geo_to_local(const GeoPoint& anchor, const GeoPoint& p) {
    const double k = kEarthRadius * kPi / 180.0;
    return {
        (p.latitude - anchor.latitude) * k,
        -(p.longitude - anchor.longitude) * k * std::cos(deg2rad(anchor.latitude)),
        p.altitude - anchor.altitude,
    };
}

GeoPoint local_to_geo(const GeoPoint& anchor, const Vec3& p) {
    const double k = kEarthRadius * kPi / 180.0;
    return {
        anchor.latitude + p.x / k,
        anchor.longitude - p.y / (k * std::cos(deg2rad(anchor.latitude))),
        anchor.altitude + p.z,
    };
}

}  // namespace anafi
