"""Single-qubit quantum process tomography of the transfer channel.

The channel under test maps a logical input qubit to the reduced state
of the last site after the full protocol.  Feeding it the four probe
states |0>, |1>, |+>, |+y> determines it completely; linear inversion
then yields the process matrix chi in the fixed operator basis

    E = (1, X, -iY, Z)

such that eps(rho) = sum_{mn} chi[m, n] E_m rho E_n^dag.  The -iY
convention matters: it flips signs in the off-diagonal blocks, so every
serialized chi carries a basis tag.

Inversion is exact for consistent inputs (the probe outputs come from
simulation, not measurement statistics), so no maximum-likelihood
fitting is done and mild negativity of chi is reported rather than
repaired.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .noise import KrausSet
from .qstate import KET0, KET1, KET_PLUS, KET_PLUS_Y, PAULI, DensityMatrix, StateVector

BASIS_TAG = "1,X,-iY,Z"
QPT_BASIS = (
    np.eye(2, dtype=complex),
    PAULI["X"].copy(),
    -1j * PAULI["Y"],
    PAULI["Z"].copy(),
)

# Lambda block matrix of the standard single-qubit inversion:
# chi = Lambda [[rho'_1, rho'_2], [rho'_3, rho'_4]] Lambda
_LAMBDA = 0.5 * np.block(
    [[np.eye(2), PAULI["X"]], [PAULI["X"], -np.eye(2)]]
).astype(complex)

CHI_IDENTITY = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)


def probe_states() -> tuple[StateVector, ...]:
    """The four tomography probes |0>, |1>, |+>, |+y>, in this order."""
    return (
        StateVector(1, KET0),
        StateVector(1, KET1),
        StateVector(1, KET_PLUS),
        StateVector(1, KET_PLUS_Y),
    )


@dataclass
class ChannelSample:
    """Channel outputs for the four probes, in probe order."""

    outputs: tuple[DensityMatrix, ...]

    def __post_init__(self):
        if len(self.outputs) != 4:
            raise ValueError("need exactly four probe outputs")
        for rho in self.outputs:
            if rho.n_qubits != 1:
                raise ValueError("probe outputs must be single-qubit states")


def sample_channel(pipeline, probes=None) -> ChannelSample:
    """Push each probe through a channel.

    ``pipeline`` maps a single-qubit StateVector to the single-qubit
    output DensityMatrix; it fixes everything else (chain, disorder
    realization, noise, readout time).
    """
    if probes is None:
        probes = probe_states()
    return ChannelSample(tuple(pipeline(p) for p in probes))


@dataclass
class ProcessMatrix:
    """chi matrix in the fixed basis ``(1, X, -iY, Z)``.

    Hermiticity and trace preservation are enforced; positivity is not,
    because statistical or truncation leakage is supposed to be visible
    (see :meth:`min_eigenvalue`).
    """

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (4, 4):
            raise ValueError("chi must be 4x4")
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > 1e-10:
            raise ValueError(f"chi not hermitian: deviation {herm!r}")
        tp = np.zeros((2, 2), dtype=complex)
        for m in range(4):
            for n in range(4):
                tp += self.entries[m, n] * (QPT_BASIS[n].conj().T @ QPT_BASIS[m])
        err = np.max(np.abs(tp - np.eye(2)))
        if err > 1e-8:
            raise ValueError(f"chi not trace preserving: deviation {err!r}")

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def is_physical(self, atol: float = 1e-6) -> bool:
        return self.min_eigenvalue() >= -atol

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": BASIS_TAG,
                "re": np.real(self.entries).tolist(),
                "im": np.imag(self.entries).tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ProcessMatrix":
        data = json.loads(text)
        if data.get("basis") != BASIS_TAG:
            raise ValueError(f"unknown chi basis {data.get('basis')!r}")
        return cls(np.array(data["re"]) + 1j * np.array(data["im"]))


def chi_apply(chi: ProcessMatrix | np.ndarray, rho: DensityMatrix) -> DensityMatrix:
    """Act with the channel: ``sum_mn chi[m,n] E_m rho E_n^dag``."""
    c = chi.entries if isinstance(chi, ProcessMatrix) else np.asarray(chi)
    out = np.zeros((2, 2), dtype=complex)
    for m in range(4):
        for n in range(4):
            if c[m, n] != 0:
                out += c[m, n] * (QPT_BASIS[m] @ rho.entries @ QPT_BASIS[n].conj().T)
    return DensityMatrix(1, 0.5 * (out + out.conj().T))


def reconstruct_chi(sample: ChannelSample) -> ProcessMatrix:
    """Exact linear inversion of the four probe outputs.

    The images of the non-hermitian basis elements |0><1| and |1><0|
    follow from the probe outputs by linearity:

        eps(|0><1|) = eps(rho_+) + i eps(rho_+y)
                      - (1 + i)/2 (eps(rho_0) + eps(rho_1))

    and the mirrored formula for |1><0|.  The block matrix of the four
    images is then conjugated by the fixed Lambda matrix.
    """
    e0, e1, ep, ey = (rho.entries for rho in sample.outputs)
    sum01 = e0 + e1
    r12 = ep + 1j * ey - 0.5 * (1 + 1j) * sum01
    r21 = ep - 1j * ey - 0.5 * (1 - 1j) * sum01
    block = np.block([[e0, r12], [r21, e1]])
    chi = _LAMBDA @ block @ _LAMBDA
    return ProcessMatrix(0.5 * (chi + chi.conj().T))


def process_fidelity(chi_id, chi) -> float:
    """F_p = Tr(chi_id chi); for the identity reference this reads off
    the corner element chi[0, 0]."""
    a = chi_id.entries if isinstance(chi_id, ProcessMatrix) else np.asarray(chi_id)
    b = chi.entries if isinstance(chi, ProcessMatrix) else np.asarray(chi)
    f = complex(np.trace(a @ b))
    if abs(f.imag) > 1e-10:
        raise ValueError(f"process fidelity has imaginary part {f.imag!r}")
    if f.real < -1e-10 or f.real > 1 + 1e-8:
        raise ValueError(f"process fidelity {f.real!r} outside [0, 1]")
    return float(f.real)


def average_state_fidelity(chi: ProcessMatrix) -> float:
    """Mean output fidelity over Haar-random pure inputs.

    Uses the qubit closed form F_avg = (2 F_p + 1) / 3; see
    :func:`haar_average_state_fidelity` for the sampled cross-check.
    """
    fp = process_fidelity(CHI_IDENTITY, chi)
    return (2.0 * fp + 1.0) / 3.0


def haar_average_state_fidelity(
    chi: ProcessMatrix, n_samples: int = 10_000, seed: int = 0
) -> float:
    """Monte Carlo estimate of the Haar-averaged state fidelity."""
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(n_samples):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        rho = DensityMatrix(1, np.outer(v, v.conj()))
        out = chi_apply(chi, rho)
        total += float(np.real(v.conj() @ out.entries @ v))
    return total / n_samples


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """(x, y, z) expectation values of a single-qubit state."""
    return np.array(
        [float(np.real(np.trace(rho.entries @ PAULI[p]))) for p in "XYZ"]
    )


def bloch_affine(chi: ProcessMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Affine form of the channel on Bloch vectors: r -> A r + c."""
    half = DensityMatrix(1, 0.5 * np.eye(2))
    c = bloch_vector(chi_apply(chi, half))
    a = np.empty((3, 3))
    for k, p in enumerate("XYZ"):
        rho = DensityMatrix(1, 0.5 * (np.eye(2) + PAULI[p]))
        a[:, k] = bloch_vector(chi_apply(chi, rho)) - c
    return a, c


def bloch_image(chi: ProcessMatrix, vectors) -> np.ndarray:
    """Map Bloch vectors through the channel.

    Raises if an input lies outside the unit ball; output norms may
    exceed 1 only by numerical leakage (checked against 1 + 1e-8).
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    norms = np.linalg.norm(vectors, axis=1)
    if norms.max() > 1 + 1e-10:
        raise ValueError("input Bloch vectors must lie in the unit ball")
    a, c = bloch_affine(chi)
    out = vectors @ a.T + c
    if np.linalg.norm(out, axis=1).max() > 1 + 1e-8:
        raise ValueError("channel pushed a Bloch vector outside the unit ball")
    return out


def bloch_image_csv(vectors, images, fileobj) -> None:
    """Write paired input/output Bloch vectors as CSV."""
    close = False
    if isinstance(fileobj, (str, bytes, os.PathLike)):
        fileobj = open(fileobj, "w", encoding="utf-8", newline="\n")
        close = True
    try:
        fileobj.write("rx,ry,rz,rx_out,ry_out,rz_out\n")
        for r, ri in zip(np.atleast_2d(vectors), np.atleast_2d(images)):
            fileobj.write(",".join(repr(float(x)) for x in (*r, *ri)) + "\n")
    finally:
        if close:
            fileobj.close()


def kraus_from_chi(chi: ProcessMatrix, clip_tol: float = 1e-6):
    """Kraus operators from the eigensystem of chi.

    Eigenvalues in [-clip_tol, clip_tol) are clipped to zero; a more
    negative eigenvalue raises.  Returns ``(kraus_set, clipped_mass)``
    where ``clipped_mass`` is the total absolute weight removed, and
    the set's completeness tolerance is widened accordingly.
    """
    w, u = np.linalg.eigh(chi.entries)
    if w.min() < -clip_tol:
        raise ValueError(f"chi eigenvalue {w.min()!r} below -{clip_tol}")
    ops = []
    clipped = 0.0
    for mu in range(4):
        if w[mu] <= clip_tol:
            clipped += abs(w[mu])
            continue
        k = np.zeros((2, 2), dtype=complex)
        for m in range(4):
            k += u[m, mu] * QPT_BASIS[m]
        ops.append(np.sqrt(w[mu]) * k)
    atol = max(1e-10, 16.0 * clipped + 1e-10)
    return KrausSet(tuple(ops), completeness_atol=atol), clipped
