"""Chain Hamiltonians with engineered site-dependent couplings.

Three related models appear here:

* ``build_zz_x``: nearest-neighbour ZZ couplings plus transverse X
  fields.  This is the native model the transfer and GHZ protocols run
  on.
* ``build_xx_z``: its Hadamard conjugate, XX couplings plus Z fields.
  Useful as a cross-check because a global Hadamard maps one onto the
  other exactly.
* ``build_xy_equivalent``: the doubled XY chain of 2N sites obtained by
  interleaving the fields and couplings of an N-site pattern into a
  single coupling sequence.  For the engineered pattern below this
  reproduces the classic ``sqrt(j*(2N-j))`` perfect-transfer profile.

The engineered pattern, for chain coupling scale J and 1-based site i:

    j_i = sign * J * sqrt(4 i (N - i))        (bonds, i = 1..N-1)
    b_i = J * sqrt((2i - 1)(2N - 2i + 1))     (fields, i = 1..N)

Both sequences are palindromic, which the builders check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .qstate import HermitianOperator, pauli_matrix, tensor_embed

MAX_DENSE_QUBITS = 12


@dataclass(frozen=True)
class ChainSpec:
    """Parameters picking out one engineered chain."""

    n_qubits: int
    coupling: float = 1.0
    sign: int = 1

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least 1 site")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.coupling <= 0:
            raise ValueError("coupling scale must be positive")


@dataclass
class CouplingPattern:
    """Bond couplings ``j`` (length N-1) and site fields ``b`` (length N)."""

    j: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.j = np.asarray(self.j, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.j.ndim != 1 or self.b.ndim != 1:
            raise ValueError("j and b must be 1-d arrays")
        if len(self.b) != len(self.j) + 1:
            raise ValueError(
                f"need len(b) == len(j)+1, got {len(self.b)} and {len(self.j)}"
            )

    @property
    def n_qubits(self) -> int:
        return len(self.b)

    def is_palindromic(self, atol: float = 1e-12) -> bool:
        return bool(
            np.allclose(self.j, self.j[::-1], atol=atol)
            and np.allclose(self.b, self.b[::-1], atol=atol)
        )

    def to_json(self) -> str:
        return json.dumps({"j": list(self.j), "b": list(self.b)})

    @classmethod
    def from_json(cls, text: str) -> "CouplingPattern":
        data = json.loads(text)
        return cls(np.array(data["j"]), np.array(data["b"]))


@dataclass
class EquivalentChainSpec:
    """Coupling sequence of the doubled XY chain (2N sites, 2N-1 bonds)."""

    j_eq: np.ndarray

    def __post_init__(self):
        self.j_eq = np.asarray(self.j_eq, dtype=float)
        if self.j_eq.ndim != 1 or len(self.j_eq) % 2 == 0:
            raise ValueError("j_eq must be a 1-d array of odd length")

    @property
    def n_sites(self) -> int:
        return len(self.j_eq) + 1


def perfect_transfer_pattern(spec: ChainSpec) -> CouplingPattern:
    """Engineered couplings and fields for a perfect-transfer chain."""
    n, jc = spec.n_qubits, spec.coupling
    i = np.arange(1, n)
    j = spec.sign * jc * np.sqrt(4.0 * i * (n - i))
    i = np.arange(1, n + 1)
    b = jc * np.sqrt((2.0 * i - 1) * (2.0 * n - 2 * i + 1))
    return CouplingPattern(j, b)


def equivalent_chain(pattern: CouplingPattern) -> EquivalentChainSpec:
    """Interleave fields and bonds into the doubled-chain sequence.

    Odd-position couplings (1-based) come from the fields, even ones
    from the bonds: ``j_eq = (b_1, j_1, b_2, j_2, ..., j_{N-1}, b_N)``.
    """
    n = pattern.n_qubits
    j_eq = np.empty(2 * n - 1)
    j_eq[0::2] = np.abs(pattern.b)
    j_eq[1::2] = np.abs(pattern.j)
    return EquivalentChainSpec(j_eq)


def _check_dense_size(n_sites: int) -> None:
    if n_sites > MAX_DENSE_QUBITS:
        raise ValueError(
            f"{n_sites} sites exceeds the dense-matrix limit of "
            f"{MAX_DENSE_QUBITS}"
        )


def build_zz_x(pattern: CouplingPattern) -> HermitianOperator:
    """H = sum_i j_i Z_i Z_{i+1} + sum_i b_i X_i."""
    n = pattern.n_qubits
    _check_dense_size(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    zz = pauli_matrix("ZZ")
    x = pauli_matrix("X")
    for i in range(n - 1):
        h += pattern.j[i] * tensor_embed(zz, (i + 1, i + 2), n)
    for i in range(n):
        h += pattern.b[i] * tensor_embed(x, (i + 1,), n)
    return HermitianOperator(n, h)


def build_xx_z(pattern: CouplingPattern) -> HermitianOperator:
    """H = sum_i j_i X_i X_{i+1} + sum_i b_i Z_i (Hadamard conjugate of
    :func:`build_zz_x`)."""
    n = pattern.n_qubits
    _check_dense_size(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    xx = pauli_matrix("XX")
    z = pauli_matrix("Z")
    for i in range(n - 1):
        h += pattern.j[i] * tensor_embed(xx, (i + 1, i + 2), n)
    for i in range(n):
        h += pattern.b[i] * tensor_embed(z, (i + 1,), n)
    return HermitianOperator(n, h)


def build_xy_equivalent(spec: EquivalentChainSpec) -> HermitianOperator:
    """H = sum_j j_eq[j] (X_j X_{j+1} + Y_j Y_{j+1}) on the doubled chain."""
    m = spec.n_sites
    _check_dense_size(m)
    h = np.zeros((2**m, 2**m), dtype=complex)
    hop = pauli_matrix("XX") + pauli_matrix("YY")
    for j in range(m - 1):
        h += spec.j_eq[j] * tensor_embed(hop, (j + 1, j + 2), m)
    return HermitianOperator(m, h)


def build_xy_uniform(n_sites: int, coupling: float = 1.0) -> HermitianOperator:
    """Uniform open XY chain, the small worked example used in tests."""
    _check_dense_size(n_sites)
    h = np.zeros((2**n_sites, 2**n_sites), dtype=complex)
    hop = pauli_matrix("XX") + pauli_matrix("YY")
    for j in range(n_sites - 1):
        h += coupling * tensor_embed(hop, (j + 1, j + 2), n_sites)
    return HermitianOperator(n_sites, h)
