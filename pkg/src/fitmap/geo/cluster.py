"""Greedy hierarchical point clustering over zoom levels.

Levels are built once, from max_zoom - 1 down to 0. Level max_zoom holds the
leaves untouched. At each coarser level every not-yet-visited node, in input
order, absorbs its unvisited neighbors within the zoom-scaled pixel radius.
A query at zoom z returns the nodes alive at level z. Everything is
deterministic given the input point order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import FitmapError
from .kdtree import KdTree
from .mercator import unproject

LEAF = "Leaf"
CLUSTER = "Cluster"


class ZoomOutOfRange(FitmapError):
    pass


class NotACluster(FitmapError):
    pass


@dataclass(frozen=True)
class ClusterConfig:
    radius_px: float = 40.0
    extent_px: int = 512
    max_zoom: int = 16

    def __post_init__(self) -> None:
        if self.radius_px <= 0:
            raise ValueError("radius_px must be positive")
        if self.extent_px <= 0:
            raise ValueError("extent_px must be positive")
        if self.max_zoom < 0:
            raise ValueError("max_zoom must be >= 0")

    def world_radius(self, zoom: int) -> float:
        return self.radius_px / (self.extent_px * 2.0**zoom)


@dataclass(frozen=True)
class ClusterFeature:
    """One rendered node at a zoom: a single site or a merged cluster."""

    kind: str
    lon: float
    lat: float
    count: int
    leaf_ids: tuple[int, ...]
    expansion_zoom: int | None = None

    @property
    def is_cluster(self) -> bool:
        return self.kind == CLUSTER


class _Node:
    __slots__ = ("x", "y", "xsum", "ysum", "count", "leaf_ids", "created_level")

    def __init__(self, x, y, xsum, ysum, count, leaf_ids, created_level):
        self.x = x
        self.y = y
        self.xsum = xsum
        self.ysum = ysum
        self.count = count
        self.leaf_ids = leaf_ids
        self.created_level = created_level


class ClusterIndex:
    """All zoom levels of one point set, built eagerly and then immutable.

    ``points`` are unit-square world coordinates; leaf ids are their input
    positions. Cluster positions are the arithmetic mean of their member
    leaves, tracked as running sums.
    """

    def __init__(self, points: Sequence[tuple[float, float]], config: ClusterConfig | None = None):
        self.config = config or ClusterConfig()
        leaves = [
            _Node(x, y, x, y, 1, (i,), self.config.max_zoom)
            for i, (x, y) in enumerate(points)
        ]
        self._levels: dict[int, list[_Node]] = {self.config.max_zoom: leaves}
        nodes = leaves
        for zoom in range(self.config.max_zoom - 1, -1, -1):
            nodes = self._merge(nodes, zoom)
            self._levels[zoom] = nodes

    def _merge(self, nodes: list[_Node], zoom: int) -> list[_Node]:
        radius = self.config.world_radius(zoom)
        tree = KdTree([(node.x, node.y) for node in nodes])
        visited = [False] * len(nodes)
        merged: list[_Node] = []
        for i, node in enumerate(nodes):
            if visited[i]:
                continue
            visited[i] = True
            absorbed = []
            for j in tree.within(node.x, node.y, radius):
                if not visited[j]:
                    visited[j] = True
                    absorbed.append(nodes[j])
            if not absorbed:
                merged.append(node)  # carried down unchanged, same identity
                continue
            xsum, ysum, count = node.xsum, node.ysum, node.count
            leaf_ids = list(node.leaf_ids)
            for other in absorbed:
                xsum += other.xsum
                ysum += other.ysum
                count += other.count
                leaf_ids.extend(other.leaf_ids)
            merged.append(
                _Node(xsum / count, ysum / count, xsum, ysum, count,
                      tuple(sorted(leaf_ids)), zoom)
            )
        return merged

    def at_zoom(self, zoom: int) -> list[ClusterFeature]:
        if not isinstance(zoom, int) or isinstance(zoom, bool):
            raise ZoomOutOfRange(f"zoom must be an integer, got {zoom!r}")
        if not 0 <= zoom <= self.config.max_zoom:
            raise ZoomOutOfRange(
                f"zoom {zoom} outside [0, {self.config.max_zoom}]"
            )
        features = []
        for node in self._levels[zoom]:
            lon, lat = unproject(node.x, node.y)
            if node.count == 1:
                features.append(
                    ClusterFeature(LEAF, lon, lat, 1, node.leaf_ids)
                )
            else:
                expand = min(node.created_level + 1, self.config.max_zoom)
                features.append(
                    ClusterFeature(CLUSTER, lon, lat, node.count, node.leaf_ids, expand)
                )
        return features


def cluster(
    points: Sequence[tuple[float, float]],
    zoom: int,
    radius_px: float = 40.0,
    extent_px: int = 512,
    max_zoom: int = 16,
) -> list[ClusterFeature]:
    """One-shot clustering of world points at a single zoom."""
    config = ClusterConfig(radius_px=radius_px, extent_px=extent_px, max_zoom=max_zoom)
    return ClusterIndex(points, config).at_zoom(zoom)


def expansion_zoom(feature: ClusterFeature) -> int:
    """Smallest zoom at which the cluster's members come apart."""
    if feature.expansion_zoom is None:
        raise NotACluster("expansion zoom is defined for clusters only")
    return feature.expansion_zoom
