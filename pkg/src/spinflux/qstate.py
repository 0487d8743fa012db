"""Dense states and operators for small qubit registers.

Conventions used throughout the package:

* Sites are numbered 1..N.
* Site 1 occupies the most significant bit of a computational basis
  index, so ``|q1 q2 ... qN>`` lives at index ``q1*2**(N-1) + ... + qN``.
* Everything is dense numpy; registers up to ~12 qubits are practical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
KET_PLUS_Y = np.array([1, 1j], dtype=complex) / np.sqrt(2)

# Validation tolerances: cheap structural checks (norm, hermiticity,
# trace) run on every construction; positivity is only checked where a
# caller asks because it costs a full eigendecomposition.
NORM_ATOL = 1e-10
HERM_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIG_ATOL = 1e-8


def _as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def _check_sites(sites, n_qubits) -> tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")
    for s in sites:
        if not 1 <= s <= n_qubits:
            raise ValueError(f"site {s} out of range 1..{n_qubits}")
    return sites


@dataclass
class StateVector:
    """Pure state of ``n_qubits`` qubits as a flat complex vector."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = _as_complex(self.amplitudes).ravel()
        dim = 2**self.n_qubits
        if self.amplitudes.shape != (dim,):
            raise ValueError(
                f"expected {dim} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state not normalized: |psi| = {norm!r}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.n_qubits, np.outer(v, v.conj()))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def product_state(factors) -> StateVector:
    """Tensor a list of single-qubit vectors into a StateVector.

    ``factors[0]`` is site 1 (most significant bit).
    """
    vec = np.array([1.0 + 0j])
    for f in factors:
        f = _as_complex(f).ravel()
        if f.shape != (2,):
            raise ValueError("each factor must be a length-2 vector")
        vec = np.kron(vec, f)
    return StateVector(len(factors), vec)


def basis_state(n_qubits: int, bits) -> StateVector:
    """Computational basis state from an iterable of 0/1, site 1 first."""
    bits = [int(b) for b in bits]
    if len(bits) != n_qubits or any(b not in (0, 1) for b in bits):
        raise ValueError(f"need {n_qubits} bits of 0/1, got {bits}")
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    vec = np.zeros(2**n_qubits, dtype=complex)
    vec[idx] = 1.0
    return StateVector(n_qubits, vec)


def plus_state(n_qubits: int) -> StateVector:
    return product_state([KET_PLUS] * n_qubits)


@dataclass
class DensityMatrix:
    """Mixed state of ``n_qubits`` qubits.

    Hermiticity and unit trace are enforced at construction.  Positivity
    is not (it needs an eigendecomposition); call :meth:`check_positive`
    where it matters.
    """

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = _as_complex(self.entries)
        dim = 2**self.n_qubits
        if self.entries.shape != (dim, dim):
            raise ValueError(
                f"expected {dim}x{dim} matrix, got {self.entries.shape}"
            )
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > HERM_ATOL:
            raise ValueError(f"not hermitian: max deviation {herm!r}")
        tr = np.trace(self.entries)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace is {tr!r}, expected 1")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def check_positive(self, atol: float = EIG_ATOL) -> None:
        w = np.linalg.eigvalsh(self.entries)
        if w.min() < -atol:
            raise ValueError(f"negative eigenvalue {w.min()!r}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-site Paulis, e.g. ``XZI`` on 3 qubits."""

    letters: str

    def __post_init__(self):
        bad = set(self.letters) - set("IXYZ")
        if bad or not self.letters:
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(1 for c in self.letters if c != "I")

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for c in self.letters:
            out = np.kron(out, PAULI[c])
        return out


def pauli_matrix(letters: str) -> np.ndarray:
    return PauliString(letters).matrix()


class HermitianOperator:
    """Hermitian matrix with a cached spectral decomposition.

    Repeated propagator evaluations (time grids, per-step evolution)
    reuse the one-time ``eigh`` call.
    """

    def __init__(self, n_qubits: int, entries):
        entries = _as_complex(entries)
        dim = 2**n_qubits
        if entries.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {entries.shape}")
        herm = np.max(np.abs(entries - entries.conj().T))
        if herm > HERM_ATOL:
            raise ValueError(f"not hermitian: max deviation {herm!r}")
        self.n_qubits = n_qubits
        self.entries = entries
        self._spectrum: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvector matrix ``(w, V)``, cached."""
        if self._spectrum is None:
            w, v = np.linalg.eigh(self.entries)
            self._spectrum = (w, v)
        return self._spectrum

    def propagator(self, t: float) -> np.ndarray:
        """Unitary ``exp(-i H t)`` as a dense matrix."""
        w, v = self.spectrum()
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    def __repr__(self):
        return f"HermitianOperator(n_qubits={self.n_qubits})"


def tensor_embed(local_op, sites, n_qubits: int) -> np.ndarray:
    """Embed an operator on ``sites`` into the full register.

    Parameters
    ----------
    local_op : array, shape (2**k, 2**k)
        Operator acting on ``k`` sites, whose tensor slots correspond to
        ``sites`` in the given order.
    sites : sequence of int
        Distinct 1-based site labels.
    n_qubits : int
        Total register size.
    """
    sites = _check_sites(sites, n_qubits)
    local_op = _as_complex(local_op)
    k = len(sites)
    if local_op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {local_op.shape} != {(2**k, 2**k)}")
    rest = [q for q in range(1, n_qubits + 1) if q not in sites]
    order = list(sites) + rest
    full = np.kron(local_op, np.eye(2 ** (n_qubits - k), dtype=complex))
    t = full.reshape([2] * (2 * n_qubits))
    # slot i currently holds qubit order[i]; permute so slot q-1 holds qubit q
    perm = [order.index(q) for q in range(1, n_qubits + 1)]
    t = t.transpose(perm + [n_qubits + p for p in perm])
    return t.reshape(2**n_qubits, 2**n_qubits)


def apply_local(vec: np.ndarray, op: np.ndarray, sites, n_qubits: int) -> np.ndarray:
    """Apply a k-site operator to a flat state vector without embedding it.

    Returns a new flat vector; ``op`` need not be unitary.
    """
    sites = _check_sites(sites, n_qubits)
    k = len(sites)
    axes = [s - 1 for s in sites]
    t = vec.reshape([2] * n_qubits)
    t = np.moveaxis(t, axes, range(k))
    shape = t.shape
    out = op @ t.reshape(2**k, -1)
    out = np.moveaxis(out.reshape(shape), range(k), axes)
    return np.ascontiguousarray(out).reshape(-1)


def conjugate_local(rho: np.ndarray, ops, sites, n_qubits: int) -> np.ndarray:
    """Apply ``sum_K K rho K^dag`` for k-site operators ``ops`` in place of
    embedding them into the full space.

    ``rho`` is a raw ``(2**n, 2**n)`` array; validation is the caller's
    job (this sits in hot loops).
    """
    sites = _check_sites(sites, n_qubits)
    k = len(sites)
    axes = [s - 1 for s in sites]
    n = n_qubits
    t = rho.reshape([2] * (2 * n))
    t = np.moveaxis(t, axes, range(k))
    t = np.moveaxis(t, [n + a for a in axes], range(k, 2 * k))
    r4 = t.reshape(2**k, 2**k, -1)
    acc = np.zeros_like(r4)
    for op in ops:
        acc += np.einsum("ab,bcR,dc->adR", op, r4, op.conj(), optimize=True)
    out = acc.reshape([2] * (2 * n))
    out = np.moveaxis(out, range(k, 2 * k), [n + a for a in axes])
    out = np.moveaxis(out, range(k), axes)
    return np.ascontiguousarray(out).reshape(2**n, 2**n)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all sites not listed in ``keep``.

    The reduced matrix orders its tensor slots as ``keep`` is given.
    """
    keep = _check_sites(keep, rho.n_qubits)
    n = rho.n_qubits
    k = len(keep)
    axes = [s - 1 for s in keep]
    t = rho.entries.reshape([2] * (2 * n))
    t = np.moveaxis(t, axes, range(k))
    t = np.moveaxis(t, [n + a for a in axes], range(k, 2 * k))
    r4 = t.reshape(2**k, 2**k, 2 ** (n - k), 2 ** (n - k))
    red = np.einsum("abTT->ab", r4)
    return DensityMatrix(k, red)


def reduced_from_statevector(s: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix of a pure state, skipping the full outer
    product when only a few sites are kept."""
    keep = _check_sites(keep, s.n_qubits)
    n = s.n_qubits
    k = len(keep)
    axes = [q - 1 for q in keep]
    t = np.moveaxis(s.amplitudes.reshape([2] * n), axes, range(k))
    m = t.reshape(2**k, -1)
    return DensityMatrix(k, m @ m.conj().T)


def evolve_unitary(h: HermitianOperator, t: float, s: StateVector) -> StateVector:
    """Evolve a pure state: ``exp(-i H t) |s>``."""
    w, v = h.spectrum()
    amp = v @ (np.exp(-1j * w * t) * (v.conj().T @ s.amplitudes))
    return StateVector(s.n_qubits, amp)


def evolve_density(h: HermitianOperator, t: float, rho: DensityMatrix) -> DensityMatrix:
    """Evolve a mixed state: ``U rho U^dag`` with ``U = exp(-i H t)``."""
    u = h.propagator(t)
    return DensityMatrix(rho.n_qubits, u @ rho.entries @ u.conj().T)


def state_fidelity(target: StateVector, rho: DensityMatrix) -> float:
    """Fidelity ``<target| rho |target>`` of a mixed state against a pure
    target.  Raises if the value is not real or falls outside [0, 1]
    beyond tolerance; the result is clamped to [0, 1].
    """
    if target.n_qubits != rho.n_qubits:
        raise ValueError("size mismatch between target and state")
    v = target.amplitudes
    f = complex(v.conj() @ rho.entries @ v)
    if abs(f.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {f.imag!r}")
    x = f.real
    if x < -1e-10 or x > 1 + 1e-10:
        raise ValueError(f"fidelity {x!r} outside [0, 1]")
    return float(min(max(x, 0.0), 1.0))


def pauli_decompose(op, n_qubits: int, drop_tol: float = 1e-12) -> dict[str, complex]:
    """Expand a matrix in the Pauli-string basis.

    Returns ``{letters: coefficient}`` with ``op = sum c_P P``; terms
    with ``|c_P| < drop_tol`` are dropped.  Exponential in ``n_qubits``,
    meant for small registers.
    """
    op = _as_complex(op)
    dim = 2**n_qubits
    if op.shape != (dim, dim):
        raise ValueError(f"expected {dim}x{dim} matrix, got {op.shape}")
    out: dict[str, complex] = {}
    for letters in itertools.product("IXYZ", repeat=n_qubits):
        p = "".join(letters)
        c = complex(np.trace(pauli_matrix(p) @ op)) / dim
        if abs(c) >= drop_tol:
            out[p] = c
    return out
