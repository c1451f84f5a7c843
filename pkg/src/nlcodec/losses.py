"""Restoration loss family in 8-bit pixel units.

All losses take the restored plane and the reference in 0..255 units so
the bound tau enters the truncated and quartic terms without rescaling.
Accepts Image instances or plain arrays; computation is float64.
"""

import numpy as np

from .image import Image

DEFAULT_LAMBDA = 0.2


def _plane(a) -> np.ndarray:
    if isinstance(a, Image):
        return a.pixels.astype(np.float64)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 3 and a.shape[0] == 1:
        a = a[0]
    return a


def _pair(xhat, x):
    xh, xr = _plane(xhat), _plane(x)
    if xh.shape != xr.shape:
        raise ValueError(f"dimension mismatch: {xh.shape} vs {xr.shape}")
    return xh, xr


def l2_loss(xhat, x) -> float:
    """Mean squared error."""
    xh, xr = _pair(xhat, x)
    d = xh - xr
    return float(np.mean(d * d))


def truncated_l2_loss(xhat, x, tau: int) -> float:
    """Mean of max((diff)^2 - tau^2, 0): flat inside the tau band."""
    xh, xr = _pair(xhat, x)
    d = xh - xr
    return float(np.mean(np.maximum(d * d - float(tau) ** 2, 0.0)))


def quasi_linf_loss(xhat, x, tau: int) -> float:
    """Mean of max((diff)^4 - tau^4, 0): zero in the band, quartic outside."""
    xh, xr = _pair(xhat, x)
    d = xh - xr
    return float(np.mean(np.maximum(d**4 - float(tau) ** 4, 0.0)))


def joint_loss(xhat, x, tau: int, lam: float = DEFAULT_LAMBDA) -> float:
    """l2 + lam * quasi-linf, the training objective."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return l2_loss(xhat, x) + lam * quasi_linf_loss(xhat, x, tau)


def quasi_linf_grad(xhat, x, tau: int) -> np.ndarray:
    """d(quasi_linf_loss)/d(xhat): 4*diff^3/WH outside the band, else 0."""
    xh, xr = _pair(xhat, x)
    d = xh - xr
    g = np.where(np.abs(d) > tau, 4.0 * d**3, 0.0)
    return g / d.size
