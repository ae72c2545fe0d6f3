"""Banded symmetric quadratic forms and their minimal eigenpairs.

The two families built here are tridiagonal (bandwidth 1) or
tridiagonal-after-parity-permutation (bandwidth 2 with vanishing first
off-diagonal).  The minimal eigenvalue comes from Sturm-sequence
bisection on the tridiagonal blocks, the eigenvector from inverse
iteration, so no dense eigensolver is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BandedSymmetricForm",
    "EigenPair",
    "build_q_form",
    "build_r_form",
    "min_eigenpair",
    "quadratic_form_value",
]


@dataclass(frozen=True)
class BandedSymmetricForm:
    """Symmetric banded matrix stored as diagonal plus off-diagonals.

    ``off_diagonals[k]`` holds the (n, n+k+1) couplings, so a bandwidth-1
    form carries one array and a bandwidth-2 form carries two.
    """

    order: int
    bandwidth: int
    diagonal: np.ndarray
    off_diagonals: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"order must be >= 2, got {self.order}")
        if self.bandwidth not in (1, 2):
            raise ValueError(f"bandwidth must be 1 or 2, got {self.bandwidth}")
        if len(self.diagonal) != self.order:
            raise ValueError("diagonal length must equal order")
        if len(self.off_diagonals) != self.bandwidth:
            raise ValueError("need one off-diagonal array per band")
        for k, off in enumerate(self.off_diagonals):
            if len(off) != self.order - (k + 1):
                raise ValueError(f"off-diagonal {k} has wrong length")

    def dense(self) -> np.ndarray:
        m = np.diag(self.diagonal.astype(float))
        for k, off in enumerate(self.off_diagonals):
            m += np.diag(off, k + 1) + np.diag(off, -(k + 1))
        return m


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenvector: np.ndarray


def build_q_form(order: int) -> BandedSymmetricForm:
    """Tridiagonal form with diagonal 2n(2n+1), coupling -(n+1)(2n+1)/2."""
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    n = np.arange(order)
    diag = 2.0 * n * (2 * n + 1)
    m = n[:-1]
    off = -0.5 * (m + 1) * (2 * m + 1)
    return BandedSymmetricForm(order, 1, diag, (off,))


def build_r_form(order: int) -> BandedSymmetricForm:
    """Bandwidth-2 form: diagonal n(n+1), coupling -(n+1)(n+2)/2 at (n, n+2).

    The (n, n+1) band is identically zero, so the even- and odd-index
    sublattices decouple.
    """
    if order < 3:
        raise ValueError(f"order must be >= 3, got {order}")
    n = np.arange(order)
    diag = (n * (n + 1)).astype(float)
    m = n[:-2]
    off2 = -0.5 * (m + 1) * (m + 2)
    return BandedSymmetricForm(order, 2, diag, (np.zeros(order - 1), off2))


def quadratic_form_value(form: BandedSymmetricForm, vec) -> float:
    """Evaluate v^T M v."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (form.order,):
        raise ValueError(f"vector length must be {form.order}, got {v.shape}")
    total = float(np.dot(form.diagonal, v * v))
    for k, off in enumerate(form.off_diagonals):
        total += 2.0 * float(np.dot(off, v[: -(k + 1)] * v[k + 1:]))
    return total


def _count_below(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal (diag, off) below x."""
    pivmin = 1e-30 * max(1.0, float(np.max(off * off)) if len(off) else 1.0)
    count = 0
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for k in range(1, len(diag)):
        q = diag[k] - x - off[k - 1] ** 2 / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def _tridiag_min_eig(diag: np.ndarray, off: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimal eigenpair of a symmetric tridiagonal matrix."""
    radius = np.zeros(len(diag))
    if len(off):
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    scale = max(abs(lo), abs(hi), 1.0)
    for _ in range(200):
        if hi - lo <= 1e-14 * scale:
            break
        mid = 0.5 * (lo + hi)
        if _count_below(diag, off, mid) >= 1:
            hi = mid
        else:
            lo = mid
    shift = 0.5 * (lo + hi)

    n = len(diag)
    m = np.diag(diag - shift) + np.diag(off, 1) + np.diag(off, -1)
    v = np.full(n, 1.0 / np.sqrt(n))  # deterministic start
    norm_m = float(np.max(np.abs(diag) + radius))
    best_res = np.inf
    best = v
    best_lam = shift
    for _ in range(50):
        try:
            w = np.linalg.solve(m, v)
        except np.linalg.LinAlgError:
            # exactly singular shift: nudge off the eigenvalue
            m += np.eye(n) * (1e-13 * scale)
            w = np.linalg.solve(m, v)
        v = w / np.linalg.norm(w)
        mv = _apply(diag, off, v)
        lam = float(v @ mv)
        res = float(np.linalg.norm(mv - lam * v))
        if res < best_res:
            best_res = res
            best = v
            best_lam = lam
        if res <= 1e-10 * norm_m:
            break
    else:
        if best_res > 1e-8 * norm_m:
            raise RuntimeError(
                f"inverse iteration stalled, best residual {best_res:.3e} "
                f"(matrix norm {norm_m:.3e})"
            )
    return best_lam, best


def _apply(diag: np.ndarray, off: np.ndarray, v: np.ndarray) -> np.ndarray:
    mv = diag * v
    if len(off):
        mv[:-1] += off * v[1:]
        mv[1:] += off * v[:-1]
    return mv


def _sign_fix(v: np.ndarray) -> np.ndarray:
    for comp in v:
        if comp != 0.0:
            return v if comp > 0.0 else -v
    return v


def min_eigenpair(form: BandedSymmetricForm) -> EigenPair:
    """Smallest eigenvalue with its unit eigenvector.

    Bandwidth-2 forms must have a vanishing first off-diagonal; their
    even- and odd-index sublattices are then solved as independent
    tridiagonal problems and the smaller minimum wins (the even block on
    a tie, for determinism).
    """
    diag = np.asarray(form.diagonal, dtype=float)
    if form.bandwidth == 1:
        lam, v = _tridiag_min_eig(diag, np.asarray(form.off_diagonals[0], dtype=float))
        return EigenPair(lam, _sign_fix(v))

    if np.any(form.off_diagonals[0] != 0.0):
        raise ValueError("bandwidth-2 form with nonzero (n, n+1) band is not supported")
    off2 = np.asarray(form.off_diagonals[1], dtype=float)
    lam_e, v_e = _tridiag_min_eig(diag[0::2], off2[0::2])
    lam_o, v_o = _tridiag_min_eig(diag[1::2], off2[1::2])
    v = np.zeros(form.order)
    if lam_e <= lam_o:
        v[0::2] = v_e
        lam = lam_e
    else:
        v[1::2] = v_o
        lam = lam_o
    return EigenPair(lam, _sign_fix(v))
