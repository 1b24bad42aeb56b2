"""Five-class choropleth binning with a fixed orange-to-blue palette."""

from __future__ import annotations

import enum
import math

from ..errors import FitmapError

PALETTE = ("#d7641f", "#f2a35c", "#f7ecd9", "#8fbadd", "#2f6db3")
NO_DATA_COLOR = "#4a4a4a"
BIN_WIDTH = 20.0


class OutOfRange(FitmapError):
    pass


class ColorClass(enum.Enum):
    """Bin index 0 (low, orange) through 4 (high, blue), or NO_DATA."""

    C0 = 0
    C1 = 1
    C2 = 2
    C3 = 3
    C4 = 4
    NO_DATA = "NoData"

    @property
    def fill(self) -> str:
        if self is ColorClass.NO_DATA:
            return NO_DATA_COLOR
        return PALETTE[self.value]

    @property
    def label(self) -> str:
        return "NoData" if self is ColorClass.NO_DATA else str(self.value)


def classify(pct: float | None) -> ColorClass:
    """Bin a percentage: [0,20) -> 0 ... [80,100] -> 4; missing -> NO_DATA."""
    if pct is None:
        return ColorClass.NO_DATA
    pct = float(pct)
    if math.isnan(pct) or not 0.0 <= pct <= 100.0:
        raise OutOfRange(f"percentage {pct} outside [0, 100]")
    if pct == 100.0:
        return ColorClass.C4
    return ColorClass(int(pct // BIN_WIDTH))
