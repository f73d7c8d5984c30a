import math

import numpy as np
import pytest
import sympy as sp

from stcg.model import EffectiveModel, HamiltonianTermSpec, load_model
from stcg.operators import ModeSpec, parse_operator
from stcg.simulate import (
    NumericalGuardError,
    ObservableSpec,
    Trajectory,
    build_initial,
    coarse_grain_trajectory,
    compare_series,
    expectation_series,
    integrate,
    rate_decomposition,
)
from stcg.symbols import FreqExpr, GaussianFilter

JC_MODES = (ModeSpec("a", "bosonic", 6), ModeSpec("q", "two_level"))


def jc_model(g="g"):
    return load_model(
        {
            "name": "jc",
            "modes": [
                {"name": "a", "kind": "bosonic", "truncation": 6},
                {"name": "q", "kind": "two_level"},
            ],
            "symbols": {"g": None},
            "terms": [
                {"coupling": "g/2", "frequency": "0", "operator": "a*sp"},
                {"coupling": "g/2", "frequency": "0", "operator": "a'*sm"},
            ],
        }
    )


def effective_from(model, order=1):
    terms = tuple(
        HamiltonianTermSpec(
            sp.sympify(c), FreqExpr.parse(f), parse_operator(op, model.modes)
        )
        for c, f, op in (("g/2", "0", "a*sp"), ("g/2", "0", "a'*sm"))
    )
    return EffectiveModel(
        order=order,
        modes=model.modes,
        hamiltonian=terms,
        dissipators=(),
        filter_spec=GaussianFilter(),
        provenance={},
    )


class TestInitialStates:
    def test_fock(self):
        rho = build_initial(JC_MODES, "fock(2)*g")
        assert rho.shape == (12, 12)
        assert np.trace(rho) == pytest.approx(1.0)
        n = parse_operator("a'*a", JC_MODES).matrix()
        assert np.trace(n @ rho).real == pytest.approx(2.0)

    def test_coherent_population(self):
        rho = build_initial(
            (ModeSpec("a", "bosonic", 40),), "coherent(1.5)"
        )
        n = parse_operator("a'*a", (ModeSpec("a", "bosonic", 40),)).matrix()
        assert np.trace(n @ rho).real == pytest.approx(1.5**2, rel=1e-6)

    def test_complex_alpha(self):
        rho = build_initial((ModeSpec("a", "bosonic", 30),), "coherent(0.5i)")
        assert np.trace(rho).real == pytest.approx(1.0)

    def test_factor_count_mismatch(self):
        with pytest.raises(ValueError):
            build_initial(JC_MODES, "fock(0)")

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            build_initial(JC_MODES, "e*fock(0)")


class TestIntegrate:
    def test_zero_generator_is_constant(self):
        model = load_model(
            {
                "name": "empty",
                "modes": [{"name": "a", "kind": "bosonic", "truncation": 4}],
                "symbols": {"w": None},
                "terms": [],
            }
        )
        rho0 = build_initial(model.modes, "fock(1)")
        traj = integrate(model, rho0, (0.0, 1.0), {"w": 1.0}, dt=0.01)
        assert np.allclose(traj.states, rho0, atol=1e-12)

    def test_resonant_revival_period(self):
        model = jc_model()
        g = 2.0
        rho0 = build_initial(model.modes, "fock(0)*e")
        period = 2 * math.pi / g
        traj = integrate(
            model, rho0, (0.0, period), {"g": g}, dt=period / 4000,
            n_samples=201,
        )
        pe = expectation_series(
            traj, ObservableSpec.parse("t(e,e)", model.modes)
        ).real
        assert pe[0] == pytest.approx(1.0)
        assert pe[len(pe) // 2] == pytest.approx(0.0, abs=1e-6)
        assert pe[-1] == pytest.approx(1.0, abs=1e-6)

    def test_trace_and_hermiticity_drift(self):
        model = jc_model()
        rho0 = build_initial(model.modes, "coherent(1)*e")
        traj = integrate(model, rho0, (0.0, 5.0), {"g": 1.3}, dt=0.002)
        traces = np.einsum("tii->t", traj.states)
        assert np.max(np.abs(traces - 1.0)) < 1e-8
        herm = np.max(
            np.abs(traj.states - np.conj(np.swapaxes(traj.states, 1, 2)))
        )
        assert herm < 1e-8

    def test_purity_preserved(self):
        model = jc_model()
        rho0 = build_initial(model.modes, "fock(1)*g")
        traj = integrate(model, rho0, (0.0, 3.0), {"g": 1.0}, dt=0.002)
        purity = np.einsum("tij,tji->t", traj.states, traj.states).real
        assert np.max(np.abs(purity - 1.0)) < 1e-7

    def test_fourth_order_convergence(self):
        model = jc_model()
        rho0 = build_initial(model.modes, "fock(1)*e")
        span = (0.0, 2.0)
        point = {"g": 1.7}
        fine = integrate(model, rho0, span, point, dt=0.0005, n_samples=11)
        coarse = integrate(model, rho0, span, point, dt=0.04, n_samples=11)
        half = integrate(model, rho0, span, point, dt=0.02, n_samples=11)
        err_c = np.max(np.abs(coarse.states[-1] - fine.states[-1]))
        err_h = np.max(np.abs(half.states[-1] - fine.states[-1]))
        order = math.log2(err_c / err_h)
        assert order > 3.5

    def test_guard_trips_on_unstable_step(self):
        # dt far beyond the RK4 stability limit for this coupling
        model = jc_model()
        rho0 = build_initial(model.modes, "fock(1)*e")
        with np.errstate(all="ignore"), pytest.raises(NumericalGuardError):
            integrate(
                model, rho0, (0.0, 100.0), {"g": 300.0}, dt=0.1,
                n_samples=11,
            )

    def test_rejects_dimension_mismatch(self):
        model = jc_model()
        with pytest.raises(ValueError):
            integrate(model, np.eye(3) / 3, (0.0, 1.0), {"g": 1.0})


class TestCoarseGrain:
    def test_constant_unchanged(self):
        times = np.linspace(-3, 3, 601)
        states = np.ones((601, 1, 1), dtype=complex) * 0.5
        out = coarse_grain_trajectory(Trajectory(times, states, {}), 0.2)
        assert np.allclose(out.states, 0.5)

    def test_phasor_maps_to_filtered_phasor(self):
        tau, w = 0.5, 2.0
        dt = 0.005
        times = np.arange(-4.0, 4.0 + dt / 2, dt)
        states = np.exp(-1j * w * times)[:, None, None]
        out = coarse_grain_trajectory(Trajectory(times, states, {}), tau)
        ref = math.exp(-(w**2) * tau**2 / 2) * np.exp(-1j * w * out.times)
        assert np.max(np.abs(out.states[:, 0, 0] - ref)) < 2e-6

    def test_margin_error(self):
        times = np.linspace(0, 0.1, 11)
        states = np.ones((11, 1, 1), dtype=complex)
        with pytest.raises(ValueError, match="margin|support|pad"):
            coarse_grain_trajectory(Trajectory(times, states, {}), 5.0)

    def test_commutes_with_expectation(self):
        model = jc_model()
        rho0 = build_initial(model.modes, "coherent(1)*g")
        traj = integrate(model, rho0, (0.0, 4.0), {"g": 2.0}, dt=0.002)
        tau = 0.1
        obs = ObservableSpec.parse("a'*a", model.modes)
        averaged = coarse_grain_trajectory(traj, tau)
        series_then_avg = coarse_grain_trajectory(
            Trajectory(
                traj.times,
                expectation_series(traj, obs)[:, None, None],
                {},
            ),
            tau,
        ).states[:, 0, 0]
        avg_then_series = expectation_series(averaged, obs)
        assert np.max(np.abs(series_then_avg - avg_then_series)) < 1e-10


class TestSeriesTools:
    def test_identity_trace(self):
        model = jc_model()
        rho0 = build_initial(model.modes, "fock(2)*g")
        traj = integrate(model, rho0, (0.0, 1.0), {"g": 1.0}, dt=0.01)
        ones = expectation_series(traj, ObservableSpec.parse("1", model.modes))
        assert np.allclose(ones.real, 1.0, atol=1e-9)

    def test_compare_identical(self):
        a = np.sin(np.linspace(0, 5, 100))
        metrics = compare_series(a, a)
        assert metrics == {"rms": 0.0, "max_abs": 0.0, "normalized_rms": 0.0}

    def test_compare_offset(self):
        a = np.sin(np.linspace(0, 5, 100))
        metrics = compare_series(a, a + 0.25)
        assert metrics["rms"] == pytest.approx(0.25)
        assert metrics["max_abs"] == pytest.approx(0.25)

    def test_compare_shape_mismatch(self):
        with pytest.raises(ValueError):
            compare_series(np.zeros(3), np.zeros(4))


class TestRateDecomposition:
    def test_dynamical_rate_vanishes_without_dissipators(self):
        model = jc_model()
        eff = effective_from(model)
        rho0 = build_initial(model.modes, "fock(1)*g")
        traj = integrate(eff, rho0, (0.0, 2.0), {"g": 1.0}, dt=0.005)
        inert, dynam, ok = rate_decomposition(eff, traj, {"g": 1.0})
        assert ok.any()
        assert np.allclose(dynam[ok], 0.0, atol=1e-12)

    def test_eigenstate_commutator_blind(self):
        # the decomposition only sees dH/dt and the dissipators: for a
        # static Hamiltonian starting in an eigenstate both rates vanish
        model = jc_model()
        eff = effective_from(model)
        assignment = {"g": 1.0}
        h = sum(
            complex(term.coeff.subs({s: 1.0 for s in term.coeff.free_symbols}))
            * term.op.matrix()
            for term in eff.hamiltonian
        )
        vals, vecs = np.linalg.eigh(h)
        ground = vecs[:, 0]
        rho0 = np.outer(ground, ground.conj())
        traj = integrate(eff, rho0, (0.0, 1.0), assignment, dt=0.005)
        inert, dynam, ok = rate_decomposition(eff, traj, assignment)
        assert np.max(np.abs(inert[ok])) < 1e-9
        assert np.max(np.abs(dynam[ok])) < 1e-12
