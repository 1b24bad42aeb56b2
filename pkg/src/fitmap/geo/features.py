"""GeoJSON assembly for the district, school, and custom-layer map routes.

Both map products are plain FeatureCollections. District features are the
snapshot boundaries with the queried percentage, class index, and fill
color attached; school features are the site points run through the
clustering index at the requested zoom. Output is canonical: fixed feature
order, sorted keys, numeric properties limited to six significant digits,
so identical queries yield byte-identical bodies.
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable

from ..errors import FitmapError
from ..model import Assessment, Grade, district_of
from .classify import ColorClass, classify
from .cluster import ClusterConfig, ClusterFeature, ClusterIndex
from .mercator import project

Bbox = tuple[float, float, float, float]  # min_lon, min_lat, max_lon, max_lat


class UnknownCounty(FitmapError):
    pass


@dataclass(frozen=True)
class MapQuery:
    year: int
    grade: Grade
    assessment: Assessment
    counties: tuple[str, ...] | None = None


def sig6(value: float | None) -> float | None:
    """Trim a numeric property to at most 6 significant digits."""
    if value is None:
        return None
    return float(format(float(value), ".6g"))


def _check_counties(query: MapQuery, known: tuple[str, ...]) -> set[str] | None:
    if query.counties is None:
        return None
    wanted = set(query.counties)
    unknown = sorted(wanted - set(known))
    if unknown:
        raise UnknownCounty(f"unknown county: {', '.join(unknown)}")
    return wanted


def _value_properties(pct: float | None) -> dict:
    bucket = classify(pct)
    return {"value": sig6(pct), "color_class": bucket.label, "fill": bucket.fill}


def district_features(snapshot, query: MapQuery) -> dict:
    """One MultiPolygon feature per boundary passing the county filter."""
    wanted = _check_counties(query, snapshot.manifest.counties)
    features = []
    for code in sorted(snapshot.boundaries):
        boundary = snapshot.boundaries[code]
        if wanted is not None and boundary.county_name not in wanted:
            continue
        record = snapshot.records.get(
            (code, query.year, int(query.grade), query.assessment.value)
        )
        pct = record.pct_hfz if record is not None else None
        properties = {
            "cdscode": code,
            "district_name": boundary.district_name,
            "county_name": boundary.county_name,
        }
        properties.update(_value_properties(pct))
        features.append(
            {
                "type": "Feature",
                "properties": properties,
                "geometry": {
                    "type": "MultiPolygon",
                    "coordinates": [
                        [[list(point) for point in ring] for ring in polygon]
                        for polygon in boundary.polygons
                    ],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def _feature_of(node: ClusterFeature, sites, values) -> dict:
    if node.is_cluster:
        return {
            "type": "Feature",
            "properties": {
                "kind": "Cluster",
                "count": node.count,
                "expansion_zoom": node.expansion_zoom,
            },
            "geometry": {"type": "Point", "coordinates": [node.lon, node.lat]},
        }
    site = sites[node.leaf_ids[0]]
    properties = {
        "kind": "Leaf",
        "count": 1,
        "cdscode": str(site.code),
        "name": site.name,
        "address": site.address,
        "district_name": site.district_name,
    }
    properties.update(_value_properties(values[node.leaf_ids[0]]))
    return {
        "type": "Feature",
        "properties": properties,
        "geometry": {"type": "Point", "coordinates": [site.lon, site.lat]},
    }


def select_sites(snapshot, query: MapQuery, bbox: Bbox | None = None):
    """Sites passing the filters, joined to their percentage, in code order."""
    wanted = _check_counties(query, snapshot.manifest.counties)
    sites = []
    values = []
    for code in sorted(snapshot.sites):
        site = snapshot.sites[code]
        if wanted is not None and site.county_name not in wanted:
            continue
        if bbox is not None:
            min_lon, min_lat, max_lon, max_lat = bbox
            if not (min_lon <= site.lon <= max_lon and min_lat <= site.lat <= max_lat):
                continue
        record = snapshot.records.get((code, query.year, int(query.grade), query.assessment.value))
        sites.append(site)
        values.append(record.pct_hfz if record is not None else None)
    return sites, values


def school_features(
    snapshot,
    query: MapQuery,
    zoom: int,
    bbox: Bbox | None = None,
    config: ClusterConfig | None = None,
    index: ClusterIndex | None = None,
) -> dict:
    """Filtered sites clustered at the requested zoom, as Point features.

    Pass a prebuilt ``index`` (from a cache) to skip re-clustering; it must
    have been built over the same filtered site list.
    """
    sites, values = select_sites(snapshot, query, bbox)
    if index is None:
        points = [project(site.lon, site.lat) for site in sites]
        index = ClusterIndex(points, config)
    nodes = index.at_zoom(zoom)
    return {
        "type": "FeatureCollection",
        "features": [_feature_of(node, sites, values) for node in nodes],
    }


def layer_features(layer, boundaries: dict) -> dict:
    """Custom-layer choropleth: values classed by the layer's own min-max."""
    values = layer.values
    finite = sorted(values.values())
    lo, hi = (finite[0], finite[-1]) if finite else (0.0, 0.0)
    span = hi - lo
    features = []
    for code in sorted(boundaries):
        boundary = boundaries[code]
        raw = values.get(code)
        if raw is None:
            scaled = None
        elif span == 0:
            scaled = 100.0  # constant layer: single top-bin color
        else:
            scaled = (raw - lo) * 100.0 / span
        bucket = classify(scaled)
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "cdscode": code,
                    "district_name": boundary.district_name,
                    "county_name": boundary.county_name,
                    "value": sig6(raw),
                    "color_class": bucket.label,
                    "fill": bucket.fill,
                },
                "geometry": {
                    "type": "MultiPolygon",
                    "coordinates": [
                        [[list(point) for point in ring] for ring in polygon]
                        for polygon in boundary.polygons
                    ],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def geojson_bytes(collection: dict) -> bytes:
    return json.dumps(collection, sort_keys=True, separators=(",", ":")).encode("utf-8")


class ClusterCache:
    """LRU of cluster indexes keyed by query; builds are single-flight.

    Concurrent readers of a cached index share it freely (indexes are
    immutable); the first request for an uncached key builds while any
    followers wait on its event instead of duplicating the work.
    """

    def __init__(self, capacity: int = 32):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._lock = threading.Lock()
        self._ready: OrderedDict[tuple, ClusterIndex] = OrderedDict()
        self._building: dict[tuple, threading.Event] = {}

    def get_or_build(self, key: tuple, build: Callable[[], ClusterIndex]) -> ClusterIndex:
        while True:
            with self._lock:
                if key in self._ready:
                    self._ready.move_to_end(key)
                    return self._ready[key]
                pending = self._building.get(key)
                if pending is None:
                    self._building[key] = threading.Event()
                    break
            pending.wait()
        try:
            index = build()
        except BaseException:
            with self._lock:
                self._building.pop(key).set()  # failed: wake waiters to retry
            raise
        with self._lock:
            self._ready[key] = index
            while len(self._ready) > self.capacity:
                self._ready.popitem(last=False)
            self._building.pop(key).set()
        return index
