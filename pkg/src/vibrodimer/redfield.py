"""Non-secular Redfield tensors for independent bath coupling channels.

Each channel couples one Hermitian system observable K to one bath.  In
the system eigenbasis, with Lambda[a, b] = halfside_rate(E_a - E_b) and
M = K * Lambda (elementwise), the full non-secular relaxation action is

    d rho / dt = K rho M^T + M rho K - (K M) rho - rho (K M)^T ,

all matrices real.  This reproduces golden-rule population transfer
2 |K_ab|^2 * halfside_rate(E_a - E_b) for b -> a, preserves the trace and
hermiticity identically, and keeps every population/coherence coupling of
the non-secular tensor (no rotating-wave truncation).  Channels with
different tags belong to statistically independent baths, so their
tensors simply add.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baths import Bath, halfside_rate
from .model import Eigensystem
from .superops import left_right


@dataclass(frozen=True)
class CouplingChannel:
    """Hermitian system operator (site basis) coupled to one bath."""

    operator: np.ndarray = field(repr=False)
    bath: Bath
    tag: str

    def __post_init__(self):
        op = np.asarray(self.operator)
        if np.abs(op - op.conj().T).max() > 1e-12 * max(np.abs(op).max(), 1.0):
            raise ValueError(f"channel {self.tag!r}: operator must be Hermitian")
        if np.abs(np.asarray(op, dtype=complex).imag).max() > 0:
            raise ValueError(f"channel {self.tag!r}: operator must be real")
        object.__setattr__(self, "operator", np.asarray(op, dtype=float))


@dataclass(frozen=True)
class DampingMatrix:
    """Per-channel ingredients of the damping tensor.

    ``tensor()`` materializes Gamma[i, j, k, l] = K_ij * K_kl *
    kernel(E_k - E_l); the Redfield assembly only ever needs ``k_eig`` and
    ``m`` (= K * kernel).
    """

    tag: str
    k_eig: np.ndarray = field(repr=False)
    freq: np.ndarray = field(repr=False)     # freq[a, b] = E_a - E_b
    kernel: np.ndarray = field(repr=False)   # halfside_rate at freq, real part
    m: np.ndarray = field(repr=False)

    def tensor(self) -> np.ndarray:
        return np.einsum("ij,kl->ijkl", self.k_eig, self.m)


def build_damping_matrix(channel: CouplingChannel, eigensystem: Eigensystem) -> DampingMatrix:
    k_site = channel.operator
    if k_site.shape != eigensystem.vectors.shape:
        raise ValueError("channel operator dimension does not match the eigensystem")
    k = eigensystem.to_eigen(k_site)
    e = eigensystem.energies
    freq = e[:, None] - e[None, :]
    kernel = halfside_rate(channel.bath, freq).real
    return DampingMatrix(channel.tag, k, freq, kernel, k * kernel)


@dataclass(frozen=True)
class RedfieldTensor:
    """Action-form superoperator: apply to vec(rho) to get d rho/dt."""

    tag: str
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return round(self.matrix.shape[0] ** 0.5)


def _channel_superop(d: DampingMatrix) -> np.ndarray:
    k, m = d.k_eig, d.m
    km = k @ m
    eye = np.eye(k.shape[0])
    out = left_right(k, m.T) + left_right(m, k)
    out -= left_right(km, eye) + left_right(eye, km.T)
    return out


def build_redfield_tensor(
    channels: list[CouplingChannel], eigensystem: Eigensystem
) -> dict[str, RedfieldTensor]:
    """One action-form tensor per tag; same-tag channels are summed."""
    dim = eigensystem.space.dim
    acc: dict[str, np.ndarray] = {}
    for ch in channels:
        d = build_damping_matrix(ch, eigensystem)
        sup = _channel_superop(d)
        if ch.tag in acc:
            acc[ch.tag] = acc[ch.tag] + sup
        else:
            acc[ch.tag] = sup
    return {tag: RedfieldTensor(tag, m.astype(complex)) for tag, m in acc.items()}


def apply_tensor(tensor: RedfieldTensor, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    n = tensor.dim
    if rho.shape != (n, n):
        raise ValueError("density matrix dimension does not match the tensor")
    return (tensor.matrix @ rho.reshape(-1)).reshape(n, n)
