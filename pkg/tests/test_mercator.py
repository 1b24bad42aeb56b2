"""Projection checks against a 50-digit reference implementation."""

import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from fitmap.geo import MAX_LAT, project, unproject

mpmath.mp.dps = 50


def reference(lon, lat):
    """Same formulas evaluated in high-precision arithmetic."""
    lat = min(MAX_LAT, max(-MAX_LAT, lat))
    x = (mpmath.mpf(lon) + 180) / 360
    phi = mpmath.radians(mpmath.mpf(lat))
    y = (1 - mpmath.log(mpmath.tan(mpmath.pi / 4 + phi / 2)) / mpmath.pi) / 2
    return x, y


CORNERS = [
    (-180.0, MAX_LAT),
    (180.0, MAX_LAT),
    (-180.0, -MAX_LAT),
    (180.0, -MAX_LAT),
    (0.0, 0.0),
]

KNOWN_POINTS = [
    (-122.28, 37.76),  # SF bay
    (-117.85, 33.75),
    (0.0, 51.5),
    (139.7, 35.7),
    (-74.0, -40.0),
]


@pytest.mark.parametrize("lon,lat", KNOWN_POINTS)
def test_matches_reference_at_known_points(lon, lat):
    x, y = project(lon, lat)
    rx, ry = reference(lon, lat)
    assert abs(x - rx) < 1e-12
    assert abs(y - ry) < 1e-12


@pytest.mark.parametrize("lon,lat", CORNERS)
def test_corners_stay_inside_unit_square(lon, lat):
    x, y = project(lon, lat)
    assert 0.0 <= x <= 1.0
    assert 0.0 <= y <= 1.0
    rx, ry = reference(lon, lat)
    # the clamp latitude is a rounded decimal, so the exact corner value
    # misses 0/1 by a few 1e-12; the projection must still land inside
    assert abs(x - rx) < 1e-12
    assert abs(y - ry) < 1e-9


def test_center_of_the_world():
    assert project(0.0, 0.0) == (0.5, 0.5)


def test_poles_clamp_to_edge_rows():
    _, y_north = project(0.0, 90.0)
    _, y_south = project(0.0, -90.0)
    assert y_north == 0.0
    assert y_south == 1.0


def test_nonfinite_rejected():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            project(bad, 0.0)
        with pytest.raises(ValueError):
            project(0.0, bad)


@given(
    st.floats(min_value=-180, max_value=180),
    st.floats(min_value=-90, max_value=90),
)
def test_always_lands_in_unit_square(lon, lat):
    x, y = project(lon, lat)
    assert 0.0 <= x <= 1.0
    assert 0.0 <= y <= 1.0


@given(
    st.floats(min_value=-180, max_value=180),
    st.floats(min_value=-180, max_value=180),
    st.floats(min_value=-85, max_value=85),
)
def test_x_monotone_in_lon(lon_a, lon_b, lat):
    xa, _ = project(lon_a, lat)
    xb, _ = project(lon_b, lat)
    if lon_a < lon_b:
        assert xa <= xb
    elif lon_a > lon_b:
        assert xa >= xb


@given(
    st.floats(min_value=-85, max_value=85),
    st.floats(min_value=-85, max_value=85),
)
def test_y_antitone_in_lat(lat_a, lat_b):
    _, ya = project(0.0, lat_a)
    _, yb = project(0.0, lat_b)
    if lat_a < lat_b:
        assert ya >= yb
    elif lat_a > lat_b:
        assert ya <= yb


@given(
    st.floats(min_value=-180, max_value=180),
    st.floats(min_value=-84, max_value=84),
)
def test_round_trip_recovers_degrees(lon, lat):
    x, y = project(lon, lat)
    lon2, lat2 = unproject(x, y)
    assert abs(lon2 - lon) < 1e-9
    assert abs(lat2 - lat) < 1e-9


def test_unproject_saturates_outside_clamp():
    _, lat_top = unproject(0.5, -0.25)
    _, lat_bottom = unproject(0.5, 1.25)
    assert lat_top == MAX_LAT
    assert lat_bottom == -MAX_LAT
