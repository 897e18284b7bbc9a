"""Small dense linear-algebra kernels used by :mod:`mermin_bench.regress`."""

from __future__ import annotations

import numpy as np

#: Condition number above which a Gram matrix counts as singular.
COND_LIMIT = 1e12


class RankError(np.linalg.LinAlgError):
    """Matrix is rank deficient at the working condition threshold."""


class EigenGapError(np.linalg.LinAlgError):
    """Requested eigenvectors are not separated from the rest of the spectrum."""


def jacobi_eigh(
    a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
    is at most ``tol`` times the Frobenius norm of ``a``.

    Args:
        a: Symmetric (m, m) array.
        tol: Relative off-diagonal tolerance.
        max_sweeps: Give up after this many full sweeps.

    Returns:
        ``(w, v)`` with eigenvalues ``w`` sorted descending and orthonormal
        eigenvectors in the columns of ``v``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    m = a.shape[0]
    v = np.eye(m)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale or scale == 0:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    # theta**2 would overflow; t ~ 1/(2 theta)
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise np.linalg.LinAlgError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def check_full_column_rank(t: np.ndarray, name: str = "T") -> None:
    """Raise :class:`RankError` unless ``t't`` has condition number <= COND_LIMIT."""
    if t.shape[1] == 0:
        return
    if t.shape[0] < t.shape[1]:
        raise RankError(f"{name} has more columns ({t.shape[1]}) than rows ({t.shape[0]})")
    s = np.linalg.svd(t, compute_uv=False)
    if s[-1] == 0 or (s[0] / s[-1]) ** 2 > COND_LIMIT:
        raise RankError(f"{name} is rank deficient (cond({name}'{name}) > {COND_LIMIT:g})")


def orthonormalize(x: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(np.asarray(x, dtype=float))
    return q


def principal_angles(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Principal angles in radians, ascending, between ``span(u)`` and ``span(v)``.

    Columns span the subspaces; they are orthonormalized first. Small angles
    come from the sines (singular values of the part of ``v`` outside
    ``span(u)``) because arccos loses all precision near 1.
    """
    qu = orthonormalize(u)
    qv = orthonormalize(v)
    if qu.shape[1] < qv.shape[1]:
        qu, qv = qv, qu
    r = qv.shape[1]
    cos = np.clip(np.linalg.svd(qu.T @ qv, compute_uv=False), 0.0, 1.0)
    sin = np.clip(
        np.linalg.svd(qv - qu @ (qu.T @ qv), compute_uv=False), 0.0, 1.0
    )
    # ascending angles <-> descending cosines <-> ascending sines
    cos = np.sort(cos)[::-1][:r]
    sin = np.sort(sin)[:r]
    return np.where(cos > np.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
