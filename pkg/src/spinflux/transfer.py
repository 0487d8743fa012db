"""State transfer and GHZ generation on the engineered chain.

Transfer protocol: the logical input ``alpha|0> + beta|1>`` sits on
site 1, every other site is prepared in ``|+>``, and the gate

    U_pre = (1/sqrt(2)) (1  i; i  1)

is applied to site 1 before the chain evolves under the ZZ+X
Hamiltonian.  At ``J t = pi/4`` the reduced state of site N equals the
logical input exactly and the rest of the chain returns to ``|+...+>``;
no correcting gate is needed at the receiving end.

GHZ protocol: evolving ``|0...0>`` under the same Hamiltonian reaches
``(|0...0> - i|1...1>)/sqrt(2)`` at ``J t = pi/4``.

Ensemble runners average fidelity curves over disorder draws and, for
the trajectory engine, one Monte Carlo noise history per run.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .hamiltonian import CouplingPattern, build_xx_z, build_zz_x
from .noise import (
    EvolutionPlan,
    NoiseConfig,
    evolve_open_deterministic,
    evolve_open_trajectory,
    sample_disorder,
)
from .qstate import (
    KET_PLUS,
    HermitianOperator,
    StateVector,
    basis_state,
    product_state,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

ENGINES = ("deterministic", "trajectories")


def pretransfer_gate() -> np.ndarray:
    """Sender-side gate applied to site 1 before the evolution."""
    return np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)


def default_times(n_points: int = 201, t_max: float = np.pi / 2) -> np.ndarray:
    """Uniform readout grid; the default puts Jt = pi/4 exactly on it."""
    return np.linspace(0.0, t_max, n_points)


def _input_qubit(alpha: complex, beta: complex) -> np.ndarray:
    vec = np.array([alpha, beta], dtype=complex)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"input amplitudes not normalized: |v| = {norm!r}")
    return vec


def prepared_transfer_state(n_qubits: int, alpha: complex, beta: complex) -> StateVector:
    """Protocol initial state: gated input on site 1, ``|+>`` elsewhere."""
    first = pretransfer_gate() @ _input_qubit(alpha, beta)
    return product_state([first] + [KET_PLUS] * (n_qubits - 1))


def ghz_target(n_qubits: int) -> StateVector:
    """(|0...0> - i|1...1>) / sqrt(2)."""
    vec = np.zeros(2**n_qubits, dtype=complex)
    vec[0] = 1.0 / np.sqrt(2)
    vec[-1] = -1j / np.sqrt(2)
    return StateVector(n_qubits, vec)


# ---------------------------------------------------------------------------
# observers (operate on raw arrays, shared by both engines)


def site_n_fidelity_observers(n_qubits: int, alpha: complex, beta: complex):
    """(vector observer, density observer) for the fidelity of the last
    site's reduced state against ``alpha|0> + beta|1>``."""
    target = _input_qubit(alpha, beta)

    def from_vec(t, vec):
        v2 = vec.reshape(-1, 2)
        w = v2 @ target.conj()
        return float(np.real(w.conj() @ w))

    def from_rho(t, rho):
        dim = rho.shape[0]
        a = rho.reshape(dim // 2, 2, dim // 2, 2)
        rho_n = np.einsum("RaRb->ab", a)
        return float(np.real(target.conj() @ rho_n @ target))

    return from_vec, from_rho


def ghz_fidelity_observers(n_qubits: int):
    """(vector observer, density observer) for global GHZ fidelity."""
    g = ghz_target(n_qubits).amplitudes
    idx = np.array([0, 2**n_qubits - 1])
    g2 = g[idx]

    def from_vec(t, vec):
        amp = g2.conj() @ vec[idx]
        return float(np.abs(amp) ** 2)

    def from_rho(t, rho):
        sub = rho[np.ix_(idx, idx)]
        return float(np.real(g2.conj() @ sub @ g2))

    return from_vec, from_rho


# ---------------------------------------------------------------------------
# fidelity curves


@dataclass
class TransferCurve:
    """Fidelity against time, optionally ensemble-averaged."""

    times: np.ndarray
    fidelities: np.ndarray
    stderr: np.ndarray | None = None
    n_runs: int = 1

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.fidelities = np.asarray(self.fidelities, dtype=float)
        if self.fidelities.shape != self.times.shape:
            raise ValueError("fidelity and time grids differ in length")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
            if self.stderr.shape != self.times.shape:
                raise ValueError("stderr and time grids differ in length")

    @property
    def peak_fidelity(self) -> float:
        return float(self.fidelities.max())

    @property
    def peak_time(self) -> float:
        return float(self.times[int(np.argmax(self.fidelities))])

    def at_time(self, t: float) -> float:
        """Fidelity at the grid point nearest ``t``."""
        return float(self.fidelities[int(np.argmin(np.abs(self.times - t)))])

    def to_csv(self, fileobj) -> None:
        close = False
        if isinstance(fileobj, (str, bytes, os.PathLike)):
            fileobj = open(fileobj, "w", encoding="utf-8", newline="\n")
            close = True
        try:
            cols = ["Jt", "fidelity"] + (["stderr"] if self.stderr is not None else [])
            fileobj.write(",".join(cols) + "\n")
            for i, t in enumerate(self.times):
                row = [repr(float(t)), repr(float(self.fidelities[i]))]
                if self.stderr is not None:
                    row.append(repr(float(self.stderr[i])))
                fileobj.write(",".join(row) + "\n")
        finally:
            if close:
                fileobj.close()


def ideal_transfer_curve(
    pattern: CouplingPattern,
    alpha: complex,
    beta: complex,
    times=None,
) -> TransferCurve:
    """Noiseless transfer fidelity over a time grid."""
    if times is None:
        times = default_times()
    times = np.asarray(times, dtype=float)
    n = pattern.n_qubits
    h = build_zz_x(pattern)
    psi0 = prepared_transfer_state(n, alpha, beta)
    from_vec, _ = site_n_fidelity_observers(n, alpha, beta)
    w, v = h.spectrum()
    coef = v.conj().T @ psi0.amplitudes
    fids = np.empty(len(times))
    for k, t in enumerate(times):
        vec = v @ (np.exp(-1j * w * t) * coef)
        fids[k] = from_vec(t, vec)
    return TransferCurve(times, fids)


def ideal_transfer_curve_crosscheck(
    pattern: CouplingPattern,
    alpha: complex,
    beta: complex,
    times=None,
) -> TransferCurve:
    """Same protocol run in the Hadamard-rotated frame.

    Uses the XX+Z Hamiltonian with ``|0>`` rest states and conjugates
    the readout back; must agree with :func:`ideal_transfer_curve` to
    rounding error.
    """
    if times is None:
        times = default_times()
    times = np.asarray(times, dtype=float)
    n = pattern.n_qubits
    h = build_xx_z(pattern)
    target = _input_qubit(alpha, beta)
    first = HADAMARD @ pretransfer_gate() @ target
    psi0 = product_state([first] + [np.array([1, 0], dtype=complex)] * (n - 1))
    w, v = h.spectrum()
    coef = v.conj().T @ psi0.amplitudes
    fids = np.empty(len(times))
    for k, t in enumerate(times):
        vec = v @ (np.exp(-1j * w * t) * coef)
        v2 = vec.reshape(-1, 2)
        rho_n = HADAMARD @ (v2.T @ v2.conj()) @ HADAMARD
        fids[k] = float(np.real(target.conj() @ rho_n @ target))
    return TransferCurve(times, fids)


def ideal_ghz_curve(pattern: CouplingPattern, times=None) -> TransferCurve:
    """Noiseless global GHZ fidelity from the all-zero initial state."""
    if times is None:
        times = default_times()
    times = np.asarray(times, dtype=float)
    n = pattern.n_qubits
    h = build_zz_x(pattern)
    psi0 = basis_state(n, [0] * n)
    from_vec, _ = ghz_fidelity_observers(n)
    w, v = h.spectrum()
    coef = v.conj().T @ psi0.amplitudes
    fids = np.empty(len(times))
    for k, t in enumerate(times):
        vec = v @ (np.exp(-1j * w * t) * coef)
        fids[k] = from_vec(t, vec)
    return TransferCurve(times, fids)


# ---------------------------------------------------------------------------
# ensemble runners


def run_seed_children(master_seed: int, n_runs: int):
    """Per-run seed sequences; run k always receives child k."""
    return np.random.SeedSequence(master_seed).spawn(n_runs)


def _haar_qubit(rng) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def single_noisy_run(
    pattern: CouplingPattern,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    seed_child,
    *,
    delta: float = 0.0,
    engine: str = "deterministic",
    alpha: complex | None = None,
    beta: complex | None = None,
    input_sampling: str = "fixed",
    protocol: str = "transfer",
) -> np.ndarray:
    """One ensemble member's fidelity curve.

    ``seed_child`` is a ``numpy.random.SeedSequence``; its first child
    stream drives the disorder draw, the second the trajectory sampling
    and the third the random-input draw, so every source of randomness
    is reproducible from (master seed, run index) alone.  The children
    are derived by extending the spawn key rather than by calling
    ``spawn``, which would mutate the caller's object and make repeat
    calls disagree.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    disorder_seed, noise_seed, input_seed = (
        np.random.SeedSequence(
            entropy=seed_child.entropy, spawn_key=seed_child.spawn_key + (i,)
        )
        for i in range(3)
    )
    eff = pattern
    if delta > 0:
        eff = sample_disorder(pattern, delta, disorder_seed).effective_pattern
    n = pattern.n_qubits
    if protocol == "transfer":
        if input_sampling == "haar":
            alpha, beta = _haar_qubit(np.random.default_rng(input_seed))
        elif input_sampling != "fixed":
            raise ValueError("input_sampling must be 'fixed' or 'haar'")
        if alpha is None or beta is None:
            raise ValueError("fixed input sampling needs alpha and beta")
        psi0 = prepared_transfer_state(n, alpha, beta)
        from_vec, from_rho = site_n_fidelity_observers(n, alpha, beta)
    elif protocol == "ghz":
        psi0 = basis_state(n, [0] * n)
        from_vec, from_rho = ghz_fidelity_observers(n)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    h = build_zz_x(eff)
    if engine == "deterministic":
        _, values, _ = evolve_open_deterministic(
            h, psi0.density(), noise, plan, observer=from_rho
        )
    else:
        rng = np.random.default_rng(noise_seed)
        _, values, _ = evolve_open_trajectory(
            h, psi0, noise, plan, rng, observer=from_vec
        )
    return values


def average_curves(times, rows, n_runs: int | None = None) -> TransferCurve:
    """Mean and standard error across per-run fidelity curves.

    Uses pairwise summation (numpy's default reduction), so the result
    does not depend on how the rows were produced or batched.
    """
    rows = np.asarray(rows, dtype=float)
    m = rows.shape[0]
    mean = rows.mean(axis=0)
    stderr = (
        rows.std(axis=0, ddof=1) / np.sqrt(m)
        if m > 1
        else np.full(rows.shape[1], np.nan)
    )
    return TransferCurve(times, mean, stderr, n_runs=n_runs or m)


def noisy_transfer_curve(
    pattern: CouplingPattern,
    alpha: complex,
    beta: complex,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    *,
    delta: float = 0.0,
    n_runs: int = 200,
    master_seed: int = 0,
    engine: str = "deterministic",
    input_sampling: str = "fixed",
) -> TransferCurve:
    """Ensemble-averaged transfer fidelity curve.

    Each run draws its own disorder realization (and, with the
    trajectory engine, its own noise history).
    """
    children = run_seed_children(master_seed, n_runs)
    rows = [
        single_noisy_run(
            pattern,
            noise,
            plan,
            children[k],
            delta=delta,
            engine=engine,
            alpha=alpha,
            beta=beta,
            input_sampling=input_sampling,
        )
        for k in range(n_runs)
    ]
    return average_curves(plan.step_times(), rows)


def noisy_ghz_curve(
    pattern: CouplingPattern,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    *,
    delta: float = 0.0,
    n_runs: int = 200,
    master_seed: int = 0,
    engine: str = "deterministic",
) -> TransferCurve:
    """Ensemble-averaged global GHZ fidelity curve."""
    children = run_seed_children(master_seed, n_runs)
    rows = [
        single_noisy_run(
            pattern,
            noise,
            plan,
            children[k],
            delta=delta,
            engine=engine,
            protocol="ghz",
        )
        for k in range(n_runs)
    ]
    return average_curves(plan.step_times(), rows)
