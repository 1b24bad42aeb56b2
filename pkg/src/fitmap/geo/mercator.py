"""Web Mercator projection onto the unit square.

x grows east from the antimeridian, y grows south from the north clamp, so
(0, 0) is the top-left corner of the world and (1, 1) the bottom-right.
Latitudes are clamped to +-MAX_LAT, where the projection reaches y = 0 and
y = 1 exactly (up to rounding).
"""

from __future__ import annotations

import math

MAX_LAT = 85.05112878


def project(lon: float, lat: float) -> tuple[float, float]:
    """Map degrees to unit-square Mercator coordinates."""
    if not (math.isfinite(lon) and math.isfinite(lat)):
        raise ValueError(f"coordinates must be finite, got ({lon}, {lat})")
    lat = min(MAX_LAT, max(-MAX_LAT, lat))
    x = (lon + 180.0) / 360.0
    phi = math.radians(lat)
    y = (1.0 - math.log(math.tan(math.pi / 4.0 + phi / 2.0)) / math.pi) / 2.0
    # the clamp latitude is a rounded decimal, so y can overshoot by ~6e-12
    return x, min(1.0, max(0.0, y))


def unproject(x: float, y: float) -> tuple[float, float]:
    """Inverse of project for x in [0, 1]; y outside the clamp saturates."""
    lon = x * 360.0 - 180.0
    phi = 2.0 * math.atan(math.exp((1.0 - 2.0 * y) * math.pi)) - math.pi / 2.0
    lat = min(MAX_LAT, max(-MAX_LAT, math.degrees(phi)))
    return lon, lat
