"""Row-major vectorization helpers for density-matrix superoperators.

vec stacks rows: vec(rho)[i*dim + j] = rho[i, j], so the matrix of
rho -> A rho B is kron(A, B.T).
"""

from __future__ import annotations

import numpy as np


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1)

def unvec(v: np.ndarray) -> np.ndarray:
    n = round(len(v) ** 0.5)
    return np.asarray(v).reshape(n, n)


def left_right(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho b."""
    return np.kron(a, b.T)


def commutator_super(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i [h, rho]."""
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def lindblad_super(c: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """Superoperator of rate * (c rho c^dag - {c^dag c, rho}/2)."""
    eye = np.eye(c.shape[0])
    cdc = c.conj().T @ c
    out = np.kron(c, c.conj())
    out -= 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
    return rate * out


def trace_functional(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(rho) = trace(rho)."""
    return np.eye(dim).reshape(-1)


def diag_functional(weights: np.ndarray) -> np.ndarray:
    """Row vector w with w @ vec(rho) = sum_i weights[i] * rho[i, i]."""
    return np.diag(np.asarray(weights, dtype=float)).reshape(-1)
