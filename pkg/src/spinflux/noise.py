"""Static disorder, Kraus noise channels and open-system evolution.

Two engines propagate a noisy chain over a fixed step grid
``t_k = k * dt``:

* deterministic: exact channel composition on the density matrix.  Each
  step applies the unitary ``exp(-i H dt)`` and then the single-step
  Kraus channels site by site.
* trajectories: Monte Carlo unraveling on pure states.  Each step
  applies the unitary, then for every noise unit draws one Kraus
  operator with probability ``|K_mu |psi>|^2`` and renormalizes.  The
  ensemble mean over trajectories converges to the deterministic
  engine's output on the same grid.

Per step the channel order is: unitary, amplitude damping on each site
in ascending order, then dephasing (per site, or per pair for
collective baths).  Kraus operators acting on disjoint sites commute,
so within each group the order is immaterial; the fixed order makes
runs reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import CouplingPattern
from .qstate import (
    PAULI,
    DensityMatrix,
    HermitianOperator,
    StateVector,
    apply_local,
    conjugate_local,
)

COMPLETENESS_ATOL = 1e-10


# ---------------------------------------------------------------------------
# static disorder


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """One draw of multiplicative coupling disorder.

    The effective couplings are ``j_i (1 + delta (1 - 2 r_i))`` and
    ``b_i (1 + delta (1 - 2 s_i))`` with ``r, s`` uniform on [0, 1], so
    each parameter is shifted by at most ``delta`` relative to ideal.
    """

    base: CouplingPattern
    delta: float
    r: np.ndarray
    s: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        n = self.base.n_qubits
        if self.r.shape != (n - 1,) or self.s.shape != (n,):
            raise ValueError("r must have length N-1 and s length N")
        for arr in (self.r, self.s):
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError("disorder draws must lie in [0, 1]")

    @property
    def effective_pattern(self) -> CouplingPattern:
        j = self.base.j * (1.0 + self.delta * (1.0 - 2.0 * self.r))
        b = self.base.b * (1.0 + self.delta * (1.0 - 2.0 * self.s))
        return CouplingPattern(j, b)


def sample_disorder(pattern: CouplingPattern, delta: float, seed) -> DisorderRealization:
    """Draw one disorder realization.

    ``seed`` may be anything ``numpy.random.default_rng`` accepts; an
    integer seed is recorded on the result for bookkeeping.
    """
    rng = np.random.default_rng(seed)
    n = pattern.n_qubits
    r = rng.random(n - 1)
    s = rng.random(n)
    return DisorderRealization(
        base=pattern,
        delta=float(delta),
        r=r,
        s=s,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
    )


# ---------------------------------------------------------------------------
# noise configuration


@dataclass(frozen=True)
class Individual:
    """One independent bath per site."""


@dataclass(frozen=True)
class CollectivePairs:
    """One shared dephasing bath per listed pair of sites."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [s for pair in self.pairs for s in pair]
        if any(len(pair) != 2 for pair in self.pairs):
            raise ValueError("each bath must address exactly two sites")
        if len(set(flat)) != len(flat):
            raise ValueError("a site cannot belong to two baths")


def adjacent_pairs(n_qubits: int) -> CollectivePairs:
    """Pair sites (1,2), (3,4), ...; requires an even chain length."""
    if n_qubits % 2:
        raise ValueError("adjacent pairing needs an even number of sites")
    return CollectivePairs(tuple((i, i + 1) for i in range(1, n_qubits, 2)))


@dataclass(frozen=True)
class NoiseConfig:
    """Rates of the environment acting on every step.

    ``relaxation_rate`` drives amplitude damping into a thermal bath
    with mean occupation ``nbar``; ``dephasing_rate`` drives phase
    damping, either per site or per pair depending on ``topology``
    (amplitude damping is always per site).
    """

    relaxation_rate: float = 0.0
    dephasing_rate: float = 0.0
    nbar: float = 0.0
    topology: Individual | CollectivePairs = Individual()

    def __post_init__(self):
        for name in ("relaxation_rate", "dephasing_rate", "nbar"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def thermal_weight(self) -> float:
        """Weight p = (nbar + 1) / (2 nbar + 1) of the decay branch."""
        return (self.nbar + 1.0) / (2.0 * self.nbar + 1.0)

    def to_json(self) -> str:
        if isinstance(self.topology, Individual):
            topo = {"kind": "individual"}
        else:
            topo = {"kind": "pairs", "pairs": [list(p) for p in self.topology.pairs]}
        return json.dumps(
            {
                "relaxation_rate": self.relaxation_rate,
                "dephasing_rate": self.dephasing_rate,
                "nbar": self.nbar,
                "topology": topo,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "NoiseConfig":
        data = json.loads(text)
        topo_data = data.get("topology", {"kind": "individual"})
        if topo_data["kind"] == "individual":
            topo: Individual | CollectivePairs = Individual()
        elif topo_data["kind"] == "pairs":
            topo = CollectivePairs(tuple(tuple(p) for p in topo_data["pairs"]))
        else:
            raise ValueError(f"unknown topology kind {topo_data['kind']!r}")
        return cls(
            relaxation_rate=data["relaxation_rate"],
            dephasing_rate=data["dephasing_rate"],
            nbar=data.get("nbar", 0.0),
            topology=topo,
        )


# ---------------------------------------------------------------------------
# Kraus sets


@dataclass
class KrausSet:
    """A complete set of Kraus operators on one or two sites.

    ``completeness_atol`` can be widened by callers that build a set
    from numerically truncated data (it is still checked, just against
    the stated bound).
    """

    operators: tuple[np.ndarray, ...]
    completeness_atol: float = COMPLETENESS_ATOL

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("empty Kraus set")
        dim = ops[0].shape[0]
        if dim not in (2, 4):
            raise ValueError("only 1- and 2-site channels are supported")
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError("all operators must share one square shape")
        acc = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(acc - np.eye(dim)))
        if err > self.completeness_atol:
            raise ValueError(f"sum K^dag K != 1 (deviation {err!r})")
        self.operators = ops

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_sites(self) -> int:
        return 1 if self.dim == 2 else 2


def amplitude_damping_kraus(rate: float, t: float, nbar: float = 0.0) -> KrausSet:
    """Single-site thermal amplitude damping over a window of length t.

    With p = (nbar+1)/(2 nbar + 1), e = exp(-rate * t / 2) and
    eta = 1 - e**2 the four operators are

        A0 = sqrt(p)   diag(1, e)         A1 = sqrt(p)   (0 sqrt(eta); 0 0)
        A2 = sqrt(1-p) diag(e, 1)         A3 = sqrt(1-p) (0 0; sqrt(eta) 0)

    A0/A1 cover decay, A2/A3 thermal excitation; at nbar = 0 the set
    reduces to plain amplitude damping.
    """
    if rate < 0 or t < 0 or nbar < 0:
        raise ValueError("rate, time and nbar must be nonnegative")
    p = (nbar + 1.0) / (2.0 * nbar + 1.0)
    e = np.exp(-rate * t / 2.0)
    root_eta = np.sqrt(max(1.0 - e * e, 0.0))
    sp, sq = np.sqrt(p), np.sqrt(1.0 - p)
    a0 = sp * np.diag([1.0, e]).astype(complex)
    a1 = sp * np.array([[0, root_eta], [0, 0]], dtype=complex)
    a2 = sq * np.diag([e, 1.0]).astype(complex)
    a3 = sq * np.array([[0, 0], [root_eta, 0]], dtype=complex)
    return KrausSet((a0, a1, a2, a3))


def phase_damping_kraus(rate: float, t: float) -> KrausSet:
    """Single-site phase damping: coherences decay by exp(-rate * t)."""
    if rate < 0 or t < 0:
        raise ValueError("rate and time must be nonnegative")
    x = np.exp(-rate * t)
    d0 = np.sqrt((1.0 + x) / 2.0) * np.eye(2, dtype=complex)
    d1 = np.sqrt((1.0 - x) / 2.0) * PAULI["Z"]
    return KrausSet((d0, d1))


def collective_dephasing_kraus(rate: float, t: float) -> KrausSet:
    """Two-site dephasing by a shared bath.

    All three operators are diagonal; the single-excitation states
    |01> and |10> are untouched while |00> and |11> dephase, so the
    channel is not a tensor product of single-site maps.
    """
    if rate < 0 or t < 0:
        raise ValueError("rate and time must be nonnegative")
    x = np.exp(-rate * t)
    d0 = np.diag([np.sqrt(x), 1.0, 1.0, np.sqrt(x)]).astype(complex)
    d1 = np.sqrt(1.0 - x) * np.diag([1.0, 0.0, 0.0, -x]).astype(complex)
    d2 = (1.0 - x) * np.diag([0.0, 0.0, 0.0, np.sqrt(1.0 + x)]).astype(complex)
    return KrausSet((d0, d1, d2))


def apply_channel(rho: DensityMatrix, kraus: KrausSet, sites) -> DensityMatrix:
    """Apply ``sum_mu K_mu rho K_mu^dag`` on the given sites."""
    sites = tuple(sites)
    if len(sites) != kraus.n_sites:
        raise ValueError(
            f"channel acts on {kraus.n_sites} site(s), got sites {sites}"
        )
    out = conjugate_local(rho.entries, kraus.operators, sites, rho.n_qubits)
    return DensityMatrix(rho.n_qubits, out)


# ---------------------------------------------------------------------------
# evolution plans


@dataclass(frozen=True)
class EvolutionPlan:
    """Fixed step grid for open evolution.

    The grid has ``n_steps + 1`` boundaries ``t_k = k dt`` with
    ``dt = total_time / n_steps``; observables are read out at every
    boundary, including t = 0.
    """

    total_time: float
    n_steps: int = 256

    def __post_init__(self):
        if self.total_time <= 0 or self.n_steps < 1:
            raise ValueError("need total_time > 0 and n_steps >= 1")

    @property
    def dt(self) -> float:
        return self.total_time / self.n_steps

    def step_times(self) -> np.ndarray:
        return np.linspace(0.0, self.total_time, self.n_steps + 1)


def _noise_units(noise: NoiseConfig, n_qubits: int, dt: float):
    """Per-step noise units as (sites, KrausSet) in application order."""
    units: list[tuple[tuple[int, ...], KrausSet]] = []
    if noise.relaxation_rate > 0:
        amp = amplitude_damping_kraus(noise.relaxation_rate, dt, noise.nbar)
        units += [((q,), amp) for q in range(1, n_qubits + 1)]
    if noise.dephasing_rate > 0:
        if isinstance(noise.topology, Individual):
            deph = phase_damping_kraus(noise.dephasing_rate, dt)
            units += [((q,), deph) for q in range(1, n_qubits + 1)]
        else:
            for pair in noise.topology.pairs:
                if max(pair) > n_qubits:
                    raise ValueError(f"pair {pair} outside a {n_qubits}-site chain")
            deph = collective_dephasing_kraus(noise.dephasing_rate, dt)
            units += [(tuple(pair), deph) for pair in noise.topology.pairs]
    return units


# ---------------------------------------------------------------------------
# deterministic engine


def _superop(ops) -> np.ndarray:
    """Matrix of rho -> sum K rho K^dag on the vectorized local space."""
    dim = ops[0].shape[0]
    s = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in ops:
        s += np.kron(k, k.conj())
    return s


def _apply_superop(rho: np.ndarray, s: np.ndarray, sites, n: int) -> np.ndarray:
    """Apply a local superoperator to a raw density array."""
    k = len(sites)
    row = [q - 1 for q in sites]
    col = [n + q - 1 for q in sites]
    t = rho.reshape([2] * (2 * n))
    t = np.moveaxis(t, row + col, range(2 * k))
    shape = t.shape
    out = s @ t.reshape(4**k, -1)
    out = np.moveaxis(out.reshape(shape), range(2 * k), row + col)
    return np.ascontiguousarray(out).reshape(rho.shape)


def evolve_open_deterministic(
    h: HermitianOperator,
    rho0: DensityMatrix,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    observer=None,
):
    """Exact channel composition over the plan's step grid.

    ``observer(t, rho_array)`` is evaluated at every step boundary;
    returns ``(times, values, final_state)`` where ``values`` is None
    when no observer is given.
    """
    n = h.n_qubits
    if rho0.n_qubits != n:
        raise ValueError("state and Hamiltonian sizes differ")
    dt = plan.dt
    u = h.propagator(dt)
    units = _noise_units(noise, n, dt)
    # single-site units targeting the same site fuse into one superoperator
    fused: dict[tuple[int, ...], np.ndarray] = {}
    order: list[tuple[int, ...]] = []
    for sites, kraus in units:
        s = _superop(kraus.operators)
        if sites in fused:
            fused[sites] = s @ fused[sites]
        else:
            fused[sites] = s
            order.append(sites)
    rho = rho0.entries.copy()
    times = plan.step_times()
    values = None if observer is None else [observer(times[0], rho)]
    for k in range(plan.n_steps):
        rho = u @ rho @ u.conj().T
        for sites in order:
            rho = _apply_superop(rho, fused[sites], sites, n)
        if observer is not None:
            values.append(observer(times[k + 1], rho))
    final = DensityMatrix(n, 0.5 * (rho + rho.conj().T))
    return times, (None if values is None else np.asarray(values)), final


# ---------------------------------------------------------------------------
# trajectory engine


class _UnitSampler:
    """Draws one Kraus operator of a unit per step.

    All channel sets used here have diagonal K^dag K, so the branch
    probabilities only need the population marginal on the unit's
    sites, which is much cheaper than applying every candidate.  For
    consecutive sites the state is addressed through a contiguous
    ``(left, span, right)`` view, avoiding axis shuffles in the hot
    loop; diagonal operators reduce to one broadcast multiply.
    """

    def __init__(self, sites, kraus: KrausSet, n: int):
        self.sites = tuple(sites)
        self.ops = kraus.operators
        width = len(self.sites)
        self.span = 2**width
        first = self.sites[0]
        self.contiguous = self.sites == tuple(range(first, first + width))
        self.left = 2 ** (first - 1)
        self.right = 2 ** (n - (first + width - 1))
        diags = []
        self.op_diag = []
        for k in kraus.operators:
            ktk = k.conj().T @ k
            off = np.max(np.abs(ktk - np.diag(np.diag(ktk))))
            if off > 1e-12:
                raise ValueError("sampler requires diagonal K^dag K")
            diags.append(np.real(np.diag(ktk)))
            is_diag = np.max(np.abs(k - np.diag(np.diag(k)))) == 0.0
            self.op_diag.append(np.diag(k).copy() if is_diag else None)
        self.diags = np.asarray(diags)

    def _marginal_slow(self, vec: np.ndarray, n: int) -> np.ndarray:
        axes = [q - 1 for q in self.sites]
        t = np.moveaxis(vec.reshape([2] * n), axes, range(len(axes)))
        m = np.abs(t.reshape(self.span, -1)) ** 2
        return m.sum(axis=1)

    def apply(self, vec: np.ndarray, n: int, draw: float) -> np.ndarray:
        if self.contiguous:
            absq = vec.real * vec.real + vec.imag * vec.imag
            m = absq.reshape(self.left, self.span, self.right).sum(axis=(0, 2))
            view = vec.reshape(self.left, self.span, self.right)
        else:
            view = None
            m = self._marginal_slow(vec, n)
        probs = self.diags @ m
        x = draw * probs.sum()
        acc = 0.0
        idx = int(np.argmax(probs))  # fallback if rounding pushes x past the end
        for i, p in enumerate(probs):
            acc += p
            if x < acc:
                idx = i
                break
        if view is not None:
            diag = self.op_diag[idx]
            if diag is not None:
                out = view * diag[:, None]
            else:
                out = np.einsum("ij,ljr->lir", self.ops[idx], view)
            out = out.reshape(-1)
        else:
            out = apply_local(vec, self.ops[idx], self.sites, n)
        return out / np.sqrt(probs[idx])


def trajectory_seeds(master_seed: int, n_runs: int):
    """Independent per-run seed sequences from one master seed."""
    return np.random.SeedSequence(master_seed).spawn(n_runs)


def evolve_open_trajectory(
    h: HermitianOperator,
    psi0: StateVector,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    rng,
    observer=None,
):
    """One Monte Carlo trajectory; returns ``(times, values, final_vec)``."""
    n = h.n_qubits
    if psi0.n_qubits != n:
        raise ValueError("state and Hamiltonian sizes differ")
    dt = plan.dt
    u = h.propagator(dt)
    samplers = [
        _UnitSampler(sites, kraus, n) for sites, kraus in _noise_units(noise, n, dt)
    ]
    vec = psi0.amplitudes.copy()
    times = plan.step_times()
    values = None if observer is None else [observer(times[0], vec)]
    n_units = len(samplers)
    for k in range(plan.n_steps):
        vec = u @ vec
        draws = rng.random(n_units)
        for i, sampler in enumerate(samplers):
            vec = sampler.apply(vec, n, draws[i])
        if observer is not None:
            values.append(observer(times[k + 1], vec))
    return times, (None if values is None else np.asarray(values)), vec


@dataclass
class TrajectoryResult:
    """Per-run observer curves plus the run-averaged final state."""

    times: np.ndarray
    values: np.ndarray  # shape (n_runs, n_points)
    final_density: DensityMatrix

    @property
    def n_runs(self) -> int:
        return self.values.shape[0]

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def stderr(self) -> np.ndarray:
        if self.n_runs < 2:
            return np.full(self.values.shape[1], np.nan)
        return self.values.std(axis=0, ddof=1) / np.sqrt(self.n_runs)


def evolve_open_trajectories(
    h: HermitianOperator,
    psi0: StateVector,
    noise: NoiseConfig,
    plan: EvolutionPlan,
    n_runs: int,
    master_seed: int,
    observer,
) -> TrajectoryResult:
    """Average many trajectories of one fixed Hamiltonian.

    Run k draws its generator from spawn k of the master seed, so
    results do not depend on scheduling or on how runs are batched.
    """
    seeds = trajectory_seeds(master_seed, n_runs)
    dim = 2**h.n_qubits
    acc = np.zeros((dim, dim), dtype=complex)
    rows = []
    times = plan.step_times()
    for k in range(n_runs):
        rng = np.random.default_rng(seeds[k])
        _, values, vec = evolve_open_trajectory(h, psi0, noise, plan, rng, observer)
        rows.append(values)
        acc += np.outer(vec, vec.conj())
    acc /= n_runs
    final = DensityMatrix(h.n_qubits, 0.5 * (acc + acc.conj().T))
    return TrajectoryResult(times, np.asarray(rows), final)
