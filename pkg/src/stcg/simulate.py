"""Numerical integration of coarse-grained and exact dynamics.

The coarse-grained branch integrates
``drho/dt = -i[H(t), rho] + sum_j rate_j(t) * exp(-i*W_j*t) *
(L rho J - {JL, rho}/2)``; the exact branch integrates the von Neumann
equation of the input model.  Fixed-step RK4 keeps trajectories
reproducible; trajectories can then be Gaussian-averaged in time and
reduced to observable series.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .model import EffectiveModel, ModelSpec
from .operators import ModeSpec, OperatorSum, parse_operator
from .symbols import TIME, FreqExpr, scalar_eval

__all__ = [
    "Trajectory",
    "ObservableSpec",
    "NumericalGuardError",
    "build_initial",
    "integrate",
    "coarse_grain_trajectory",
    "expectation_series",
    "compare_series",
    "rate_decomposition",
    "export_csv",
    "export_summary",
]

#: Fixed-step rule: at least this many steps per fastest retained period.
STEPS_PER_PERIOD = 40

#: Gaussian kernel support in units of the averaging width.
KERNEL_SUPPORT = 5.0


class NumericalGuardError(RuntimeError):
    """Integration tripped a sanity guard (trace drift, overflow, ...)."""


@dataclass
class Trajectory:
    """Density-matrix snapshots on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray  # shape (N, d, d)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if len(self.times) != len(self.states):
            raise ValueError("snapshot count does not match grid")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("time grid must be strictly increasing")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class ObservableSpec:
    op: OperatorSum
    label: str

    @classmethod
    def parse(cls, text: str, modes: Sequence[ModeSpec], label=None):
        return cls(parse_operator(text, modes), label or text)


def build_initial(
    modes: Sequence[ModeSpec], spec: str
) -> np.ndarray:
    """Pure product state density matrix from a mini-grammar.

    One factor per mode in declaration order, ``*``-joined:
    ``fock(n)``, ``coherent(alpha)`` for bosonic modes, ``g`` or ``e`` for
    two-level modes.  Example: ``"coherent(2)*e"``.
    """
    factors = [f.strip() for f in spec.split("*")]
    if len(factors) != len(modes):
        raise ValueError(
            f"initial state needs {len(modes)} factors, got {len(factors)}"
        )
    vec = np.ones(1, dtype=complex)
    for mode, factor in zip(modes, factors):
        if mode.kind == "two_level":
            if factor not in ("g", "e"):
                raise ValueError(
                    f"two-level factor must be g or e, got {factor!r}"
                )
            part = np.array([1.0, 0.0] if factor == "g" else [0.0, 1.0],
                            dtype=complex)
        else:
            dim = mode.dim
            if factor.startswith("fock(") and factor.endswith(")"):
                n = int(factor[5:-1])
                if n >= dim:
                    raise ValueError(
                        f"fock({n}) outside truncation {dim} of {mode.name!r}"
                    )
                part = np.zeros(dim, dtype=complex)
                part[n] = 1.0
            elif factor.startswith("coherent(") and factor.endswith(")"):
                alpha = complex(factor[9:-1].replace("i", "j"))
                ns = np.arange(dim)
                log_fact = np.cumsum(
                    np.concatenate(([0.0], np.log(np.arange(1, dim))))
                )
                part = np.exp(
                    -abs(alpha) ** 2 / 2
                    + ns * np.log(complex(alpha) if alpha != 0 else 1.0)
                    - log_fact / 2
                )
                if alpha == 0:
                    part = np.zeros(dim, dtype=complex)
                    part[0] = 1.0
                part = part.astype(complex)
            else:
                raise ValueError(f"cannot parse state factor {factor!r}")
        vec = np.kron(vec, part)
    vec = vec / np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


# ---------------------------------------------------------------------------
# Generator realization
# ---------------------------------------------------------------------------


def _coeff_fn(coeff: sp.Expr, freq: FreqExpr, assignment: Mapping[str, float]):
    """Numeric function of time for ``coeff * exp(-i*freq*t)``."""
    omega = freq.evaluate(assignment)
    point = {
        s.name: assignment[s.name]
        for s in coeff.free_symbols
        if s.name in assignment
    }
    body = coeff.subs({sp.Symbol(k): v for k, v in point.items()})
    body = body.subs(
        {s: point.get(s.name) for s in body.free_symbols if s.name in point}
    )
    leftover = {s.name for s in body.free_symbols} - {TIME.name}
    if leftover:
        raise KeyError(f"no value for symbol(s) {sorted(leftover)}")
    if TIME in body.free_symbols:
        fn = sp.lambdify(TIME, body, modules="numpy")
        return lambda t: complex(fn(t)) * cmath.exp(-1j * omega * t), omega
    value = complex(body)
    return lambda t: value * cmath.exp(-1j * omega * t), omega


def _realize(generator, assignment):
    """Hamiltonian/dissipator term tables of (matrix..., coeff_fn)."""
    ham = []
    dis = []
    fastest = 0.0
    if isinstance(generator, EffectiveModel):
        terms = generator.hamiltonian
        dterms = generator.dissipators
        modes = generator.modes
    elif isinstance(generator, ModelSpec):
        if generator.regulator is not None:
            raise ValueError(
                "exact branch cannot integrate a ramp-regulated model; "
                "supply the physical time-dependent couplings instead"
            )
        terms = generator.terms
        dterms = ()
        modes = generator.modes
    else:
        raise TypeError(f"cannot integrate {type(generator).__name__}")
    for term in terms:
        fn, omega = _coeff_fn(term.coeff, term.freq, assignment)
        ham.append((term.op.matrix(assignment), fn))
        fastest = max(fastest, abs(omega))
    for term in dterms:
        fn, omega = _coeff_fn(term.rate, term.freq, assignment)
        lmat = term.left.matrix(assignment)
        jmat = term.right.matrix(assignment)
        dis.append((lmat, jmat, jmat @ lmat, fn))
        fastest = max(fastest, abs(omega))
    dim = int(np.prod([m.dim for m in modes]))
    return ham, dis, fastest, dim


def integrate(
    generator,
    rho0: np.ndarray,
    t_span: tuple[float, float],
    assignment: Mapping[str, float],
    dt: float | None = None,
    n_samples: int = 401,
    trace_tol: float = 1e-6,
) -> Trajectory:
    """Fixed-step RK4 evolution of a density matrix.

    ``generator`` is an :class:`EffectiveModel` (coarse-grained master
    equation) or a :class:`ModelSpec` (exact von Neumann).  Without an
    explicit ``dt`` the step resolves the fastest retained frequency with
    at least {STEPS_PER_PERIOD} steps per period.
    """
    ham, dis, fastest, dim = _realize(generator, assignment)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise ValueError("empty integration window")
    if rho0.shape != (dim, dim):
        raise ValueError(
            f"initial state is {rho0.shape}, model dimension is {dim}"
        )
    if dt is None:
        if fastest > 0:
            dt = 2 * math.pi / fastest / STEPS_PER_PERIOD
        else:
            dt = (t1 - t0) / 1000
    sample_dt = (t1 - t0) / (n_samples - 1)
    stride = max(1, math.ceil(sample_dt / dt))
    dt = sample_dt / stride
    n_steps = stride * (n_samples - 1)

    def rhs(t, rho):
        h = np.zeros((dim, dim), dtype=complex)
        for mat, fn in ham:
            h += fn(t) * mat
        out = -1j * (h @ rho - rho @ h)
        for lmat, jmat, jl, fn in dis:
            out += fn(t) * (
                lmat @ rho @ jmat - 0.5 * (jl @ rho + rho @ jl)
            )
        return out

    rho = np.array(rho0, dtype=complex)
    trace0 = abs(np.trace(rho))
    times = [t0]
    states = [rho.copy()]
    t = t0
    for step in range(n_steps):
        k1 = rhs(t, rho)
        k2 = rhs(t + dt / 2, rho + dt / 2 * k1)
        k3 = rhs(t + dt / 2, rho + dt / 2 * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (step + 1) * dt
        if (step + 1) % stride == 0:
            if not np.all(np.isfinite(rho)):
                raise NumericalGuardError(f"non-finite state at t={t}")
            drift = abs(abs(np.trace(rho)) - trace0)
            if drift > trace_tol:
                raise NumericalGuardError(
                    f"trace drift {drift:.2e} exceeds {trace_tol} at t={t}"
                )
            times.append(t)
            states.append(rho.copy())
    return Trajectory(
        np.array(times),
        np.array(states),
        meta={
            "dt": dt,
            "stride": stride,
            "kind": "tcg" if isinstance(generator, EffectiveModel) else "exact",
        },
    )


integrate.__doc__ = integrate.__doc__.format(STEPS_PER_PERIOD=STEPS_PER_PERIOD)


# ---------------------------------------------------------------------------
# Coarse graining and observables
# ---------------------------------------------------------------------------


def _gaussian_kernel(dt: float, tau: float) -> np.ndarray:
    half = int(math.ceil(KERNEL_SUPPORT * tau / dt))
    offsets = np.arange(-half, half + 1) * dt
    kernel = np.exp(-(offsets**2) / (2 * tau**2))
    return kernel / kernel.sum()


def coarse_grain_trajectory(traj: Trajectory, tau: float) -> Trajectory:
    """Gaussian moving average of width ``tau`` along the trajectory.

    The kernel is truncated at +/-{KERNEL_SUPPORT} tau and renormalized;
    output keeps only interior points with full kernel support, so the
    input must extend at least that margin beyond the window of interest.
    """
    kernel = _gaussian_kernel(traj.dt, tau)
    half = (len(kernel) - 1) // 2
    if len(traj.times) < len(kernel):
        need = (len(kernel) - len(traj.times)) * traj.dt
        raise ValueError(
            f"trajectory too short for averaging width: pad by >= {need:.3g}"
        )
    # accumulate per kernel offset: O(n_out * d * d) memory, no giant
    # windowed intermediate
    n_out = len(traj.times) - len(kernel) + 1
    averaged = np.zeros((n_out,) + traj.states.shape[1:], dtype=complex)
    for offset, weight in enumerate(kernel):
        averaged += weight * traj.states[offset : offset + n_out]
    meta = dict(traj.meta)
    meta["coarse_grained_tau"] = tau
    return Trajectory(traj.times[half:-half], averaged, meta)


coarse_grain_trajectory.__doc__ = coarse_grain_trajectory.__doc__.format(
    KERNEL_SUPPORT=KERNEL_SUPPORT
)


def expectation_series(
    traj: Trajectory,
    obs: ObservableSpec | np.ndarray,
    assignment: Mapping[str, float] | None = None,
) -> np.ndarray:
    matrix = obs if isinstance(obs, np.ndarray) else obs.op.matrix(assignment)
    if matrix.shape != traj.states.shape[1:]:
        raise ValueError("observable dimension does not match trajectory")
    return np.einsum("ij,tji->t", matrix, traj.states)


def compare_series(a: np.ndarray, b: np.ndarray) -> dict[str, float]:
    """Error metrics of series ``b`` against reference ``a`` (same grid)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("series shapes differ")
    diff = np.abs(b - a)
    rms = float(np.sqrt(np.mean(diff**2)))
    span = float(np.max(np.real(a)) - np.min(np.real(a)))
    return {
        "rms": rms,
        "max_abs": float(np.max(diff)),
        "normalized_rms": rms / span if span > 0 else rms,
    }


# ---------------------------------------------------------------------------
# Rate decomposition
# ---------------------------------------------------------------------------


def rate_decomposition(
    eff: EffectiveModel,
    traj: Trajectory,
    assignment: Mapping[str, float],
    gap_tol: float = 1e-9,
):
    """Split d<p0>/dt into inertial and generator-driven parts.

    At each interior sample the instantaneous Hamiltonian is diagonalized;
    the inertial rate follows the ground state's first-order response to
    dH/dt (centered difference), the dynamical rate is the ground-state
    expectation of the dissipator action.  Samples with a (near-)degenerate
    ground level are masked in the returned flags.
    """
    ham, dis, _, dim = _realize(eff, assignment)

    def h_at(t):
        h = np.zeros((dim, dim), dtype=complex)
        for mat, fn in ham:
            h += fn(t) * mat
        return h

    n = len(traj.times)
    inert = np.zeros(n)
    dynam = np.zeros(n)
    ok = np.zeros(n, dtype=bool)
    dt = traj.dt
    for i, t in enumerate(traj.times):
        h = h_at(t)
        vals, vecs = np.linalg.eigh(h)
        if len(vals) > 1 and vals[1] - vals[0] < gap_tol * max(
            1.0, abs(vals[-1])
        ):
            continue
        ok[i] = True
        ground = vecs[:, 0]
        rho = traj.states[i]
        hdot = (h_at(t + dt / 2) - h_at(t - dt / 2)) / dt
        total = 0.0
        for level in range(1, len(vals)):
            vn = vecs[:, level]
            num = vn.conj() @ hdot @ ground
            total += (
                num / (vals[0] - vals[level]) * (ground.conj() @ rho @ vn)
            ).real * 2
        inert[i] = total
        drho = np.zeros((dim, dim), dtype=complex)
        for lmat, jmat, jl, fn in dis:
            drho += fn(t) * (
                lmat @ rho @ jmat - 0.5 * (jl @ rho + rho @ jl)
            )
        dynam[i] = (ground.conj() @ drho @ ground).real
    return inert, dynam, ok


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def export_csv(path, times: np.ndarray, columns: Mapping[str, np.ndarray]):
    """Write a time series table; complex columns split into re/im."""
    names = ["t"]
    series = [np.asarray(times, dtype=float)]
    for label in columns:
        values = np.asarray(columns[label])
        if np.iscomplexobj(values) and np.max(np.abs(values.imag)) > 1e-12:
            names += [f"{label}_re", f"{label}_im"]
            series += [values.real, values.imag]
        else:
            names.append(label)
            series.append(values.real if np.iscomplexobj(values) else values)
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*series):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def export_summary(path, payload: Mapping):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
