"""Directional spatially localized spherical harmonic transform (DSLSHT).

For a signal ``f`` bandlimited to ``lf`` and a window ``h`` bandlimited to
``lh``, the transform correlates ``f`` against every rotation of the window
per output harmonic index:

    g_f(rho; u) = integral f(x) (rot_rho h)(x) conj(Y_u(x)) ds(x).

Expanding in rotation-group harmonics gives pure coefficient arithmetic,

    (g_f(.; u))^p_{q, q'} = sum_n (f)_n (h)_p^{q'} T(n; p, q; u),

with triple products restricted by their selection rules.  Each component is
bandlimited to ``lh`` in the rotation variable and to ``lg = lf + lh - 1`` in
the harmonic index ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import triple_product, triple_product_rows
from .so3 import Rotation, WignerCoeffs
from .sphere import (
    SphereGrid,
    SphericalCoeffs,
    degree_and_order,
    inverse_sht,
    rotate_coeffs,
)


def window_blocks(h: SphericalCoeffs) -> np.ndarray:
    """Window coefficients as per-degree rows ``hb[p, q' + lh - 1]``."""
    lh = h.bandlimit
    hb = np.zeros((lh, 2 * lh - 1), dtype=np.complex128)
    off = lh - 1
    for p in range(lh):
        hb[p, off - p : off + p + 1] = h.degree_slice(p)
    return hb


@dataclass(frozen=True)
class DslshtRep:
    """Joint-domain representation: one Wigner coefficient cube per index ``u``.

    ``data[u, p, q + lh - 1, q' + lh - 1]`` holds ``(g(.; u))^p_{q, q'}`` for
    ``u < lg**2`` with ``lg = lf + lh - 1``.
    """

    lf: int
    lh: int
    data: np.ndarray

    def __post_init__(self):
        if self.lf < 1 or self.lh < 1:
            raise ValueError("bandlimits must be positive")
        lg = self.lg
        data = np.asarray(self.data, dtype=np.complex128)
        expected = (lg * lg, self.lh, 2 * self.lh - 1, 2 * self.lh - 1)
        if data.shape != expected:
            raise ValueError(f"expected data of shape {expected}, got {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def lg(self) -> int:
        return self.lf + self.lh - 1

    def component(self, u: int) -> WignerCoeffs:
        """The rotation-group spectrum of component ``u``."""
        return WignerCoeffs(self.lh, self.data[u])


def psi_coeffs(u: int, n: int, h: SphericalCoeffs) -> WignerCoeffs:
    """Rotation-group spectrum of the analysis function ``psi_{u,n}``.

    The coefficient at ``(p, q, q')`` is ``(h)_p^{q'} T(n; p, q; u)``; only
    the single order ``q = w - m`` allowed by the selection rule survives.
    """
    lh = h.bandlimit
    if n < 0 or u < 0:
        raise ValueError("flat indices must be nonnegative")
    _, m = degree_and_order(n)
    _, w = degree_and_order(u)
    q = w - m
    off = lh - 1
    cube = np.zeros((lh, 2 * lh - 1, 2 * lh - 1), dtype=np.complex128)
    hb = window_blocks(h)
    if abs(q) <= lh - 1:
        for p in range(abs(q), lh):
            t = triple_product(n, p, q, u)
            if t != 0.0:
                cube[p, off + q, off - p : off + p + 1] = t * hb[p, off - p : off + p + 1]
    return WignerCoeffs(lh, cube)


def forward_component(
    u: int, f: SphericalCoeffs, hb: np.ndarray, lh: int
) -> np.ndarray:
    """One ``u`` component of the forward transform as a coefficient cube."""
    lf = f.bandlimit
    off = lh - 1
    cube = np.zeros((lh, 2 * lh - 1, 2 * lh - 1), dtype=np.complex128)
    for p in range(lh):
        for q in range(-p, p + 1):
            nn, tv = triple_product_rows(p, q, u, lf)
            if nn.size == 0:
                continue
            tau = np.dot(tv, f.data[nn])
            if tau != 0.0:
                cube[p, off + q, off - p : off + p + 1] = tau * hb[p, off - p : off + p + 1]
    return cube


def forward_dslsht(f: SphericalCoeffs, h: SphericalCoeffs) -> DslshtRep:
    """Joint-domain representation of ``f`` analysed with window ``h``."""
    if h.norm() == 0.0:
        raise ValueError("window must be nonzero")
    lf, lh = f.bandlimit, h.bandlimit
    lg = lf + lh - 1
    hb = window_blocks(h)
    data = np.empty((lg * lg, lh, 2 * lh - 1, 2 * lh - 1), dtype=np.complex128)
    for u in range(lg * lg):
        data[u] = forward_component(u, f, hb, lh)
    return DslshtRep(lf, lh, data)


def dslsht_direct(
    f_samples: np.ndarray,
    grid: SphereGrid,
    h: SphericalCoeffs,
    rho: Rotation,
    u: int,
) -> complex:
    """Single transform value by direct quadrature of the defining integral.

    Brute-force reference path for test-scale bandlimits; ``f_samples`` must
    be a signal bandlimited within the grid.  The grid must resolve the full
    product integrand: with ``v`` the degree of ``u``, this requires
    ``grid.bandlimit >= lh + v - 1``.
    """
    v, _ = degree_and_order(u)
    if grid.bandlimit < h.bandlimit + v - 1:
        raise ValueError("grid too coarse for the product integrand")
    rotated = rotate_coeffs(h, rho)
    h_samples = inverse_sht(rotated, grid)
    yu = inverse_sht(SphericalCoeffs.unit(v + 1, u), grid)
    return grid.integrate(np.asarray(f_samples) * h_samples * np.conj(yu))
