// Local tangent-plane projection around a geographic anchor.
#pragma once

#include "anafi/geometry.hpp"

namespace anafi {

inline constexpr double kEarthRadius = 6371000.0;  // m

struct GeoPoint {
    double latitude{0.0};   // deg
    double longitude{0.0};  // deg
    double altitude{0.0};   // m
};

/// Equirectangular projection into the NWU frame whose origin is `anchor`.
Vec3 geo_to_local(const GeoPoint& anchor, const GeoPoint& p);
GeoPoint local_to_geo(const GeoPoint& anchor, const Vec3& p);

}  // namespace anafi
