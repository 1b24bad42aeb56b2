"""Projection, clustering, classification, and GeoJSON assembly."""

from .classify import NO_DATA_COLOR, PALETTE, ColorClass, OutOfRange, classify
from .cluster import (
    CLUSTER,
    LEAF,
    ClusterConfig,
    ClusterFeature,
    ClusterIndex,
    NotACluster,
    ZoomOutOfRange,
    cluster,
    expansion_zoom,
)
from .features import (
    Bbox,
    ClusterCache,
    MapQuery,
    UnknownCounty,
    district_features,
    geojson_bytes,
    layer_features,
    school_features,
    select_sites,
    sig6,
)
from .mercator import MAX_LAT, project, unproject

__all__ = [
    "Bbox",
    "CLUSTER",
    "LEAF",
    "ClusterCache",
    "ClusterConfig",
    "ClusterFeature",
    "ClusterIndex",
    "ColorClass",
    "MapQuery",
    "MAX_LAT",
    "NO_DATA_COLOR",
    "NotACluster",
    "OutOfRange",
    "PALETTE",
    "UnknownCounty",
    "ZoomOutOfRange",
    "classify",
    "cluster",
    "district_features",
    "expansion_zoom",
    "geojson_bytes",
    "layer_features",
    "project",
    "school_features",
    "select_sites",
    "sig6",
    "unproject",
]
