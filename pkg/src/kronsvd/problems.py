"""Zero-boundary deblurring test problems.

The blur of an ``n x n`` image ``X`` by a PSF ``P`` with point source at
``(cr, cc)`` is::

    out[i, j] = sum_{p, q} P[p, q] * X[i - (p - cr), j - (q - cc)]

with pixels outside the image treated as zero. A PSF with its mass at
``(cr + 1, cc)`` therefore shifts the image down by one row.

Measured PSF and image assets are not bundled; procedural analogues are
provided instead (:func:`speckle_psf`, :func:`motion_psf`,
:func:`atmospheric_psf`, :func:`satellite_image`).
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from ._linalg import frozen
from .exceptions import DimensionError, check_cap
from .fileio import load_image, save_image
from .kron_core import as_matrix
from .ksum import Psf

__all__ = [
    "BlurProblem",
    "blur_apply",
    "blur_adjoint",
    "blur_matrix",
    "make_problem",
    "delta_psf",
    "atmospheric_psf",
    "speckle_psf",
    "motion_psf",
    "random_psf",
    "satellite_image",
    "load_image",
    "save_image",
    "load_psf",
]


def _as_psf(psf):
    return psf if isinstance(psf, Psf) else Psf(psf)


def blur_apply(psf, image):
    """Blur ``image`` by ``psf`` with zero boundary conditions."""
    psf = _as_psf(psf)
    img = np.asarray(image, dtype=np.float64)
    n = psf.n
    if img.shape != (n, n):
        raise DimensionError(f"image shape {img.shape} does not match PSF shape {(n, n)}")
    full = convolve2d(img, psf.array, mode="full")
    cr, cc = psf.center
    return full[cr:cr + n, cc:cc + n].copy()


def blur_adjoint(psf, image):
    """Transpose of :func:`blur_apply`: blur by the flipped PSF."""
    psf = _as_psf(psf)
    n = psf.n
    cr, cc = psf.center
    flipped = Psf(psf.array[::-1, ::-1], (n - 1 - cr, n - 1 - cc))
    return blur_apply(flipped, image)


def blur_matrix(psf):
    """Dense blur operator assembled column by column from unit images."""
    psf = _as_psf(psf)
    n = psf.n
    N = n * n
    check_cap(N, "blur operator")
    K = np.empty((N, N))
    unit = np.zeros((n, n))
    for col in range(N):
        i, j = col % n, col // n
        unit[i, j] = 1.0
        K[:, col] = blur_apply(psf, unit).ravel(order="F")
        unit[i, j] = 0.0
    return K


@dataclass(frozen=True)
class BlurProblem:
    """Data ``d = K x_true + e`` for a zero-boundary blur ``K``."""

    psf: Psf
    x_true: np.ndarray
    d: np.ndarray
    e: np.ndarray
    noise_level: float
    seed: int

    @property
    def n(self):
        return self.psf.n

    @property
    def blurred(self):
        return self.d - self.e

    def data_image(self):
        return self.d.reshape((self.n, self.n), order="F")


def make_problem(psf, x_true, noise_level=0.0, seed=0):
    """Blur ``x_true`` and add seeded Gaussian noise with ``||e|| = noise_level * ||K x||``."""
    psf = _as_psf(psf)
    if noise_level < 0:
        raise ValueError(f"noise_level must be nonnegative, got {noise_level}")
    x = as_matrix(x_true, "x_true")
    b = blur_apply(psf, x).ravel(order="F")
    if noise_level == 0:
        e = np.zeros_like(b)
    else:
        rng = np.random.default_rng(seed)
        e = rng.standard_normal(b.size)
        e *= noise_level * np.linalg.norm(b) / np.linalg.norm(e)
    return BlurProblem(psf, x, frozen(b + e), frozen(e), float(noise_level), int(seed))


def load_psf(path, center=None, fmt=None):
    """Read a PSF from PGM or CSV; the center defaults to the brightest pixel."""
    return Psf(load_image(path, fmt), center)


def _grid(n):
    c = (n - 1) / 2.0
    r = np.arange(n) - c
    return np.meshgrid(r, r, indexing="ij")


def _normalized(p):
    p = np.where(p < 1e-300, 0.0, p)
    return p / p.sum()


def delta_psf(n, center=None):
    center = (n // 2, n // 2) if center is None else center
    p = np.zeros((n, n))
    p[center] = 1.0
    return Psf(p, center)


def atmospheric_psf(n, width=None, ratio=1.6, angle=0.6):
    """Rotated elliptical Gaussian; rearrangement spectrum decays fast.

    ``width`` is the standard deviation (pixels) along the major axis.
    """
    width = n / 16.0 if width is None else width
    y, x = _grid(n)
    ca, sa = np.cos(angle), np.sin(angle)
    u = ca * x + sa * y
    v = -sa * x + ca * y
    p = np.exp(-0.5 * ((u / width) ** 2 + (v * ratio / width) ** 2))
    return Psf(_normalized(p), (n // 2, n // 2))


def speckle_psf(n, blobs=12, spread=None, width=None, seed=0):
    """Random mixture of small Gaussian blobs around the center (speckle-like)."""
    rng = np.random.default_rng(seed)
    spread = n / 10.0 if spread is None else spread
    width = max(n / 40.0, 0.6) if width is None else width
    y, x = _grid(n)
    p = np.exp(-0.5 * (x ** 2 + y ** 2) / (2.0 * width) ** 2)
    for _ in range(blobs):
        cy, cx = rng.normal(0, spread, size=2)
        w = width * rng.uniform(0.7, 1.4)
        p += rng.uniform(0.2, 1.0) * np.exp(-0.5 * ((x - cx) ** 2 + (y - cy) ** 2) / w ** 2)
    return Psf(_normalized(p), (n // 2, n // 2))


def motion_psf(n, length=None, angle=0.45, width=0.7):
    """Anti-aliased line segment through the center; slow rearrangement decay."""
    length = 0.6 * n if length is None else length
    y, x = _grid(n)
    dx, dy = np.cos(angle), np.sin(angle)
    along = x * dx + y * dy
    across = -x * dy + y * dx
    inside = np.clip(length / 2.0 - np.abs(along) + 0.5, 0.0, 1.0)
    p = inside * np.exp(-0.5 * (across / width) ** 2)
    return Psf(_normalized(p), (n // 2, n // 2))


def random_psf(n, rng):
    """Uniform random nonnegative PSF (test fodder, full Kronecker rank)."""
    return Psf(rng.random((n, n)))


def satellite_image(n=32):
    """Procedural bright-object-on-black test image in ``[0, 1]``."""
    img = np.zeros((n, n))
    y, x = _grid(n)
    s = n / 32.0
    # rotate the object slightly so the image is not separable
    ang = 0.35
    u = np.cos(ang) * x + np.sin(ang) * y
    v = -np.sin(ang) * x + np.cos(ang) * y
    body = (np.abs(u) <= 3.0 * s) & (np.abs(v) <= 5.0 * s)
    img[body] = 0.8
    panels = (np.abs(u) >= 4.5 * s) & (np.abs(u) <= 13.0 * s) & (np.abs(v) <= 2.0 * s)
    img[panels] = 0.45
    strut = (np.abs(u) < 4.5 * s) & (np.abs(v) <= 0.6 * s)
    img[strut & ~body] = 0.6
    dish = (u ** 2 + (v + 7.5 * s) ** 2) <= (2.2 * s) ** 2
    img[dish] = 1.0
    antenna = (np.abs(u - 1.5 * s) <= 0.5 * s) & (v >= 5.0 * s) & (v <= 9.5 * s)
    img[antenna] = 0.7
    core = (np.abs(u) <= 1.2 * s) & (np.abs(v) <= 1.2 * s)
    img[core] = 0.95
    return img
