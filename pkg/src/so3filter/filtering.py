"""Minimum mean-square-error filter design and application in the joint domain.

For each block ``(p, u)`` the optimal filter coefficients solve the normal
equations ``A(p, u) F(p, q, u) = b(p, q, u)`` built from the signal and noise
spectral covariances through triple products:

    A[k', k] = sum_{n, n'} T(n; p, k; u) conj(T(n'; p, k'; u)) (Cs + Cz)[n, n']
    b[k']    = sum_{n, n'} T(n; p, q; u) conj(T(n'; p, k'; u)) Cs[n, n']

``A`` is Hermitian positive semidefinite.  Orders ``k`` whose triple-product
column is structurally empty contribute exact zero rows/columns and are
removed before solving; the remaining core is solved by Hermitian
eigendecomposition with small eigenvalues truncated at a relative ``rcond``
threshold, which yields the minimum-norm least-squares solution whenever the
core is rank deficient (those blocks are flagged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import triple_product_block
from .dslsht import DslshtRep


@dataclass(frozen=True)
class SpectralCovariance:
    """Hermitian covariance of harmonic coefficient vectors, indexed by ``n``."""

    bandlimit: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.bandlimit < 1:
            raise ValueError("bandlimit must be positive")
        n = self.bandlimit**2
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.shape != (n, n):
            raise ValueError(f"expected a {n} x {n} matrix, got {mat.shape}")
        scale = max(1.0, float(np.abs(mat).max()))
        asym = float(np.abs(mat - mat.conj().T).max())
        if asym > 1e-12 * scale:
            raise ValueError("covariance matrix is not Hermitian")
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def zeros(cls, bandlimit: int) -> "SpectralCovariance":
        n = bandlimit**2
        return cls(bandlimit, np.zeros((n, n), dtype=np.complex128))


@dataclass(frozen=True)
class JointFilter:
    """Filter coefficients ``(zeta(.; u))^p_{q, k}`` plus per-block diagnostics.

    ``zeta[u, p, q + lh - 1, k + lh - 1]`` stores the length ``2p+1`` solution
    vector for each ``(p, q, u)``.  ``pinv_flag[u, p]`` marks blocks whose
    solve fell back to the truncated pseudo-inverse; ``rank`` and ``cond``
    describe the structurally nonempty core of each block.
    """

    lh: int
    lg: int
    zeta: np.ndarray
    pinv_flag: np.ndarray
    rank: np.ndarray
    cond: np.ndarray

    def __post_init__(self):
        expected = (self.lg**2, self.lh, 2 * self.lh - 1, 2 * self.lh - 1)
        if self.zeta.shape != expected:
            raise ValueError(f"expected zeta of shape {expected}")
        for name in ("pinv_flag", "rank", "cond"):
            if getattr(self, name).shape != (self.lg**2, self.lh):
                raise ValueError(f"{name} must have shape (lg**2, lh)")

    @property
    def flagged_fraction(self) -> float:
        """Fraction of ``(p, q, u)`` slots whose block used the pseudo-inverse."""
        weights = 2 * np.arange(self.lh) + 1
        flagged = float((self.pinv_flag @ weights).sum())
        return flagged / float(self.lg**2 * self.lh**2)

    def block(self, u: int, p: int) -> np.ndarray:
        """The ``(2p+1, 2p+1)`` coefficient block ``[q + p, k + p]`` at ``(u, p)``."""
        off = self.lh - 1
        return self.zeta[u, p, off - p : off + p + 1, off - p : off + p + 1]


def _gram_pair(p: int, u: int, stacked: np.ndarray, lf: int):
    """Gram matrices ``X^T C X`` for each stacked covariance; ``None`` if empty."""
    nn, X = triple_product_block(p, u, lf)
    if nn.size == 0:
        return None, None
    sub = stacked[:, nn[:, None], nn[None, :]]
    M = np.einsum("ij,sjk,kl->sil", X.T, sub, X, optimize=True)
    keep = (X != 0.0).any(axis=0)
    return M, keep


def normal_matrix(p: int, u: int, csum: SpectralCovariance) -> np.ndarray:
    """Normal-equation matrix ``A(p, u)`` for the summed covariance."""
    M, _ = _gram_pair(p, u, csum.matrix[None], csum.bandlimit)
    if M is None:
        return np.zeros((2 * p + 1, 2 * p + 1), dtype=np.complex128)
    A = M[0].T.copy()
    return 0.5 * (A + A.conj().T)


def normal_rhs(p: int, q: int, u: int, cs: SpectralCovariance) -> np.ndarray:
    """Right-hand side ``b(p, q, u)`` for the signal covariance."""
    if abs(q) > p:
        raise ValueError("|q| must not exceed p")
    M, _ = _gram_pair(p, u, cs.matrix[None], cs.bandlimit)
    if M is None:
        return np.zeros(2 * p + 1, dtype=np.complex128)
    return M[0][q + p, :].copy()


def _solve_block(A: np.ndarray, R: np.ndarray, keep: np.ndarray, rcond: float):
    """Minimum-norm solve of ``A X = R`` on the structurally nonempty core.

    Returns ``(X, rank, cond, flagged)``; rows/columns outside ``keep`` give
    zero solution entries.
    """
    size = A.shape[0]
    X = np.zeros((size, R.shape[1]), dtype=np.complex128)
    if not keep.any():
        return X, 0, math.inf, True
    Ak = A[np.ix_(keep, keep)]
    Ak = 0.5 * (Ak + Ak.conj().T)
    w, V = np.linalg.eigh(Ak)
    wmax = float(w[-1])
    if wmax <= 0.0:
        return X, 0, math.inf, True
    pos = w > rcond * wmax
    rank = int(pos.sum())
    flagged = rank < int(keep.sum())
    cond = wmax / float(w[0]) if w[0] > 0.0 else math.inf
    Vp = V[:, pos]
    Xk = Vp @ ((Vp.conj().T @ R[keep, :]) / w[pos][:, None])
    X[keep, :] = Xk
    return X, rank, cond, flagged


def design_block(
    u: int, p: int, stacked: np.ndarray, lf: int, rcond: float
):
    """Solve every order ``q`` of one ``(p, u)`` block.

    ``stacked`` holds ``[Cs + Cz, Cs]``.  Returns the ``(2p+1, 2p+1)`` zeta
    block indexed ``[q + p, k + p]`` plus ``(rank, cond, flagged)``.
    """
    M, keep = _gram_pair(p, u, stacked, lf)
    if M is None:
        return np.zeros((2 * p + 1, 2 * p + 1), dtype=np.complex128), 0, math.inf, True
    A = M[0].T.copy()
    A = 0.5 * (A + A.conj().T)
    R = M[1].T.copy()  # column q holds b(p, q, u)
    X, rank, cond, flagged = _solve_block(A, R, keep, rcond)
    return X.T.copy(), rank, cond, flagged


def design_filter(
    cs: SpectralCovariance,
    cz: SpectralCovariance,
    lh: int,
    rcond: float = 1e-10,
) -> JointFilter:
    """Design the joint-domain MMSE filter from known covariances.

    Every ``(p, q, u)`` slot is populated; blocks that needed eigenvalue
    truncation (or were entirely outside the selection rules) carry the
    pseudo-inverse flag.
    """
    if cs.bandlimit != cz.bandlimit:
        raise ValueError("covariance bandlimits differ")
    if lh < 1:
        raise ValueError("window bandlimit must be positive")
    lf = cs.bandlimit
    lg = lf + lh - 1
    stacked = np.stack([cs.matrix + cz.matrix, cs.matrix])
    off = lh - 1
    zeta = np.zeros((lg * lg, lh, 2 * lh - 1, 2 * lh - 1), dtype=np.complex128)
    flags = np.zeros((lg * lg, lh), dtype=bool)
    ranks = np.zeros((lg * lg, lh), dtype=np.int64)
    conds = np.zeros((lg * lg, lh))
    for u in range(lg * lg):
        for p in range(lh):
            blk, rank, cond, flagged = design_block(u, p, stacked, lf, rcond)
            zeta[u, p, off - p : off + p + 1, off - p : off + p + 1] = blk
            flags[u, p] = flagged
            ranks[u, p] = rank
            conds[u, p] = cond
    return JointFilter(lh, lg, zeta, flags, ranks, conds)


def apply_filter(rep: DslshtRep, filt: JointFilter) -> DslshtRep:
    """Convolve the representation with the filter per component:

    ``(nu(.; u))^p_{q, q'} = sum_k (g(.; u))^p_{k, q'} (zeta(.; u))^p_{q, k}``.
    """
    if rep.lh != filt.lh or rep.lg != filt.lg:
        raise ValueError("representation and filter bandlimits differ")
    out = np.empty_like(rep.data)
    chunk = 512
    for start in range(0, rep.data.shape[0], chunk):
        stop = min(start + chunk, rep.data.shape[0])
        out[start:stop] = np.einsum(
            "upqk,upkr->upqr", filt.zeta[start:stop], rep.data[start:stop]
        )
    return DslshtRep(rep.lf, rep.lh, out)
