"""Gradient-adjusted prediction (GAP) over a causal neighbor window.

The predictor sees only *reconstructed* pixels (the decoder never has the
originals once the error bound is nonzero), so running the same rule over
the encoder's and decoder's reconstruction planes yields identical
predictions.  All divisions truncate toward zero; encoder and decoder must
agree on this exactly.
"""

from dataclasses import dataclass

from .backend import njit


@dataclass(frozen=True)
class CausalWindow:
    """Reconstructed neighbors of the current pixel.

    w: west, ww: west-west, n: north, nn: north-north, ne: north-east,
    nw: north-west, nne: north-north-east.  All values in [0, 255].
    """

    w: int
    ww: int
    n: int
    nn: int
    ne: int
    nw: int
    nne: int

    def as_tuple(self):
        return (self.w, self.ww, self.n, self.nn, self.ne, self.nw, self.nne)


@njit(cache=True)
def tdiv(a, b):
    """Integer division truncating toward zero (b > 0)."""
    q = (-a if a < 0 else a) // b
    return -q if a < 0 else q


@njit(cache=True)
def gap_gradients(w, ww, n, nn, ne, nw, nne):
    """Horizontal and vertical gradient magnitudes (dh, dv)."""
    dh = abs(w - ww) + abs(n - nw) + abs(n - ne)
    dv = abs(w - nw) + abs(n - nn) + abs(ne - nne)
    return dh, dv


@njit(cache=True)
def gap_predict(w, ww, n, nn, ne, nw, nne):
    """GAP prediction from scalar neighbors; result clamped to [0, 255].

    Edge thresholds 80/32/8 switch between the west/north neighbors and
    gradient-weighted blends of them with the base estimate
    (w+n)/2 + (ne-nw)/4.
    """
    dh, dv = gap_gradients(w, ww, n, nn, ne, nw, nne)
    d = dv - dh
    if d > 80:
        p = w
    elif d < -80:
        p = n
    else:
        p = tdiv(w + n, 2) + tdiv(ne - nw, 4)
        if d > 32:
            p = tdiv(p + w, 2)
        elif d > 8:
            p = tdiv(3 * p + w, 4)
        elif d < -32:
            p = tdiv(p + n, 2)
        elif d < -8:
            p = tdiv(3 * p + n, 4)
    if p < 0:
        p = 0
    elif p > 255:
        p = 255
    return p


@njit(cache=True)
def window_values(plane, row, col):
    """Gather (w, ww, n, nn, ne, nw, nne) at (row, col) with border policy.

    ``plane`` must hold reconstructed values at every raster position
    before (row, col).  Missing neighbors are substituted: the very first
    pixel sees all-128 neighbors; the first row replicates the west
    neighbor; edge columns and the second row replicate the nearest
    available causal neighbor.
    """
    width = plane.shape[1]
    if row == 0:
        if col == 0:
            return (128, 128, 128, 128, 128, 128, 128)
        w = int(plane[0, col - 1])
        ww = int(plane[0, col - 2]) if col >= 2 else w
        return (w, ww, w, w, w, w, w)
    n = int(plane[row - 1, col])
    nn = int(plane[row - 2, col]) if row >= 2 else n
    if col == 0:
        w = n
        ww = n
        nw = n
    else:
        w = int(plane[row, col - 1])
        ww = int(plane[row, col - 2]) if col >= 2 else w
        nw = int(plane[row - 1, col - 1])
    if col == width - 1:
        ne = n
        nne = n
    else:
        ne = int(plane[row - 1, col + 1])
        nne = int(plane[row - 2, col + 1]) if row >= 2 else ne
    return (w, ww, n, nn, ne, nw, nne)


def predict(win: CausalWindow) -> int:
    """Deterministic integer prediction in [0, 255] for a window."""
    return int(gap_predict(*win.as_tuple()))


def gradients(win: CausalWindow):
    """(dh, dv) gradient pair for a window."""
    dh, dv = gap_gradients(*win.as_tuple())
    return int(dh), int(dv)


def boundary_window(plane, row: int, col: int) -> CausalWindow:
    """Causal window at (row, col) of a partially reconstructed plane."""
    h, w = plane.shape
    if not (0 <= row < h and 0 <= col < w):
        raise IndexError(f"pixel ({row}, {col}) outside {w}x{h} image")
    return CausalWindow(*(int(v) for v in window_values(plane, row, col)))
