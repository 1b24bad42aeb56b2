"""Static 2-d tree for radius queries over unit-square points."""

from __future__ import annotations


class KdTree:
    """Immutable after construction; built once per clustering level.

    Points are (x, y) pairs. Queries return point indices in ascending
    order so callers that iterate results stay deterministic.
    """

    def __init__(self, points: list[tuple[float, float]]):
        self.points = points
        self.index = list(range(len(points)))
        self._sort(0, len(points) - 1, axis=0)

    def _sort(self, lo: int, hi: int, axis: int) -> None:
        if hi - lo < 1:
            return
        mid = (lo + hi) // 2
        self._select(lo, hi, mid, axis)
        self._sort(lo, mid - 1, axis ^ 1)
        self._sort(mid + 1, hi, axis ^ 1)

    def _select(self, lo: int, hi: int, k: int, axis: int) -> None:
        # Hoare partition around the k-th order statistic on one axis.
        points, index = self.points, self.index
        while lo < hi:
            pivot = points[index[(lo + hi) // 2]][axis]
            i, j = lo, hi
            while i <= j:
                while points[index[i]][axis] < pivot:
                    i += 1
                while points[index[j]][axis] > pivot:
                    j -= 1
                if i <= j:
                    index[i], index[j] = index[j], index[i]
                    i += 1
                    j -= 1
            if k <= j:
                hi = j
            elif k >= i:
                lo = i
            else:
                return

    def within(self, x: float, y: float, r: float) -> list[int]:
        """Indices of all points with euclidean distance <= r from (x, y)."""
        out: list[int] = []
        if self.index:
            self._collect(0, len(self.index) - 1, 0, x, y, r, r * r, out)
        out.sort()
        return out

    def _collect(
        self,
        lo: int,
        hi: int,
        axis: int,
        x: float,
        y: float,
        r: float,
        r2: float,
        out: list[int],
    ) -> None:
        if hi - lo <= 32:  # small leaf: scan
            for slot in range(lo, hi + 1):
                px, py = self.points[self.index[slot]]
                if (px - x) ** 2 + (py - y) ** 2 <= r2:
                    out.append(self.index[slot])
            return
        mid = (lo + hi) // 2
        px, py = self.points[self.index[mid]]
        if (px - x) ** 2 + (py - y) ** 2 <= r2:
            out.append(self.index[mid])
        split = px if axis == 0 else py
        probe = x if axis == 0 else y
        if probe - r <= split:
            self._collect(lo, mid - 1, axis ^ 1, x, y, r, r2, out)
        if probe + r >= split:
            self._collect(mid + 1, hi, axis ^ 1, x, y, r, r2, out)
