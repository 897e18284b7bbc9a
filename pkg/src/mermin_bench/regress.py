"""Latent-block regression: a macroscopic analogue of the EPR argument.

Model: ``Z = T A + U B`` with ``Z`` (n, k) observed, ``T`` (n, p) measured,
``U`` (n, q) never measured, and coefficient blocks ``A`` (p, k),
``B`` (q, k). Projecting out ``T`` leaves ``(I - P_T) Z = V B`` with
``V = (I - P_T) U``, so the row space of ``B`` is visible in the leading
eigenvectors of ``Z' (I - P_T) Z`` without ever observing ``U``. For q = 1
that matrix is ``(V'V) B'B``.

Swapping the roles of (T, U) and (A, B) by transposing the system gives the
complementary experiment, where ``A`` is known and the column space of
``U`` is recovered instead.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mermin_bench.linalg import (
    EigenGapError,
    RankError,
    check_full_column_rank,
    jacobi_eigh,
    principal_angles,
)

#: Relative tolerance below which two eigenvalues are indistinguishable.
EIGEN_GAP_TOL = 1e-10
_MAX_REGENERATE = 100


@dataclass(frozen=True)
class RegressionInstance:
    z: np.ndarray
    t: np.ndarray
    a: np.ndarray
    u: np.ndarray
    b: np.ndarray
    e: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n, k = self.z.shape
        p, q = self.t.shape[1], self.u.shape[1]
        expected = {
            "T": (self.t, (n, p)),
            "A": (self.a, (p, k)),
            "U": (self.u, (n, q)),
            "B": (self.b, (q, k)),
        }
        for name, (mat, shape) in expected.items():
            if mat.shape != shape:
                raise ValueError(f"{name} has shape {mat.shape}, expected {shape}")
        if n <= p + q:
            raise ValueError(f"need n > p + q, got n={n}, p={p}, q={q}")
        for name, mat in (("Z", self.z), ("T", self.t), ("A", self.a), ("U", self.u), ("B", self.b)):
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} has non-finite entries")

    @property
    def dims(self) -> dict[str, int]:
        return {"n": self.z.shape[0], "p": self.t.shape[1], "q": self.u.shape[1], "k": self.z.shape[1]}

    def residual(self) -> np.ndarray:
        """``Z - T A - U B``; equals the noise block."""
        return self.z - self.t @ self.a - self.u @ self.b

    def transposed(self) -> "RegressionInstance":
        """The complementary system ``Z' = A' T' + B' U'``."""
        return RegressionInstance(
            z=self.z.T, t=self.a.T, a=self.t.T, u=self.b.T, b=self.u.T,
            e=None if self.e is None else self.e.T,
        )


def generate_instance(
    n: int, p: int, q: int, k: int, seed: int, noise: float = 0.0
) -> RegressionInstance:
    """Standard-normal instance, redrawn until ``T`` and ``U`` have full column rank.

    With ``noise > 0`` an error block ``E`` of that standard deviation is added
    to ``Z``; the recovery guarantees only hold for ``noise == 0``.
    """
    if min(n, p, q, k) < 0 or k < 1 or n < 1:
        raise ValueError(f"invalid dimensions n={n}, p={p}, q={q}, k={k}")
    if n <= p + q:
        raise ValueError(f"need n > p + q, got n={n}, p={p}, q={q}")
    rng = np.random.default_rng(seed)
    for _ in range(_MAX_REGENERATE):
        t = rng.standard_normal((n, p))
        a = rng.standard_normal((p, k))
        u = rng.standard_normal((n, q))
        b = rng.standard_normal((q, k))
        try:
            check_full_column_rank(np.hstack([t, u]), "[T U]")
        except RankError:
            continue
        e = noise * rng.standard_normal((n, k)) if noise else None
        z = t @ a + u @ b
        if e is not None:
            z = z + e
        return RegressionInstance(z=z, t=t, a=a, u=u, b=b, e=e)
    raise RankError("could not draw a full-rank instance")


def projector(t: np.ndarray) -> np.ndarray:
    """Orthogonal projector ``T (T'T)^-1 T'`` onto the column space of ``t``."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2:
        raise ValueError("T must be a matrix")
    check_full_column_rank(t)
    gram = t.T @ t
    return t @ np.linalg.solve(gram, t.T)


def residual_product(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``(I - P_T) Z``, which equals ``V B`` on a noise-free instance."""
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    if z.ndim != 2 or t.ndim != 2 or z.shape[0] != t.shape[0]:
        raise ValueError(f"Z {z.shape} and T {t.shape} need the same number of rows")
    return z - projector(t) @ z


def recover_gram(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``Z' (I - P_T) Z``; proportional to ``B'B`` when q = 1."""
    r = residual_product(z, t)
    # (I - P_T) is a symmetric idempotent, so Z'(I-P_T)Z = R'R
    m = r.T @ r
    return (m + m.T) / 2


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis (as columns) plus the eigenvalues that selected it."""

    basis: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


def _top_eigenvectors(m: np.ndarray, q: int) -> SubspaceBasis:
    k = m.shape[0]
    if not 1 <= q <= k:
        raise ValueError(f"need 1 <= q <= {k}, got q={q}")
    w, v = jacobi_eigh(m)
    scale = max(1.0, abs(w[0]))
    next_value = w[q] if q < k else 0.0
    if w[q - 1] - next_value <= EIGEN_GAP_TOL * scale:
        raise EigenGapError(
            f"eigenvalue {q} ({w[q - 1]:.3g}) is not separated from eigenvalue "
            f"{q + 1} ({next_value:.3g})"
        )
    return SubspaceBasis(basis=v[:, :q], eigenvalues=w)


def recover_row_space(z: np.ndarray, t: np.ndarray, q: int) -> SubspaceBasis:
    """Orthonormal basis (k, q) for the row space of ``B`` from ``Z`` and ``T`` alone."""
    return _top_eigenvectors(recover_gram(z, t), q)


def complementary_recover(z: np.ndarray, a: np.ndarray, q: int) -> SubspaceBasis:
    """Orthonormal basis (n, q) for the column space of ``U`` given ``Z`` and ``A``."""
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    p, k = a.shape
    if k <= p:
        raise ValueError(f"need k > p to project out A, got k={k}, p={p}")
    return recover_row_space(z.T, a.T, q)


def gram_proportionality_error(m: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance between ``m`` and ``B'B``, each scaled to unit norm."""
    bb = b.T @ b
    return float(np.linalg.norm(m / np.linalg.norm(m) - bb / np.linalg.norm(bb)))


def max_principal_angle(basis: np.ndarray, target: np.ndarray) -> float:
    return float(principal_angles(basis, target).max())


def read_matrix_csv(path: str | os.PathLike) -> np.ndarray:
    """Comma-separated decimals, one row per line, no header."""
    m = np.loadtxt(path, delimiter=",", ndmin=2)
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{path}: non-finite entries")
    return m


def write_matrix_csv(path: str | os.PathLike, m: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(m), delimiter=",", fmt="%.17g")
