import math

import numpy as np
import pytest

from nfscatter import (
    MirrorSpec,
    OracleCurve,
    PulseSpec,
    SampleSpec,
    ScenarioConfig,
    apply_impulse,
    bloch_step,
    field_sweep,
    gaussian_input,
    init_state,
    mirror_feedback,
    relative_l2,
    run_scenario,
    validate_scenario,
)
from nfscatter.model import HyperfineSchedule
from nfscatter.presets import preset_scenario
from nfscatter.solver import NumericalError

GAMMA = 1.0 / 141.1
DB30 = 30.0 * GAMMA
A = math.sqrt(2.0 / 3.0)


def small_scenario(**kwargs):
    base = dict(
        sample=SampleSpec(xi=0.5, n_depth=41),
        pulse=PulseSpec(mode="impulsive", area=1e-3),
        mirror=MirrorSpec(present=False, reflectivity=0.0, delay_tau=0.0),
        schedule=HyperfineSchedule.constant(DB30),
        t_end=20.0,
        dt=0.01,
    )
    base.update(kwargs)
    return validate_scenario(ScenarioConfig(**base))


class TestInitState:
    def test_all_zero(self):
        st = init_state(preset_scenario("fig2a"))
        for arr in (st.f31, st.f42, st.b31, st.b42, st.omega_f, st.omega_b):
            assert arr.shape == (201,)
            assert np.all(arr == 0.0)
        assert st.t == 0.0

    def test_custom_depth(self):
        sc = small_scenario(sample=SampleSpec(xi=0.5, n_depth=200))
        assert init_state(sc).f31.shape == (200,)

    def test_deterministic(self):
        sc = small_scenario()
        a, b = init_state(sc), init_state(sc)
        assert np.array_equal(a.f31, b.f31) and a.t == b.t


class TestApplyImpulse:
    def test_forward_kick(self):
        st = init_state(small_scenario())
        apply_impulse(st, "forward", 1e-3)
        expected = 0.25j * A * 1e-3
        assert np.allclose(st.f31, expected) and np.allclose(st.f42, expected)
        assert np.all(st.b31 == 0.0)

    def test_zero_area_noop(self):
        st = init_state(small_scenario())
        apply_impulse(st, "forward", 0.0)
        assert np.all(st.f31 == 0.0)

    def test_backward_reflected_kick(self):
        st = init_state(small_scenario())
        amp = -math.sqrt(0.99) * 1e-3
        apply_impulse(st, "backward", amp)
        assert np.allclose(st.b31, -0.25j * A * math.sqrt(0.99) * 1e-3)
        assert np.allclose(st.b42, st.b31)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            apply_impulse(init_state(small_scenario()), "sideways", 1e-3)


class TestBlochStep:
    def test_pure_decay(self):
        st = init_state(small_scenario())
        st.f31[:] = 1e-3
        bloch_step(st, 0.5, 0.0, gamma=GAMMA)
        assert np.allclose(st.f31, 1e-3 * math.exp(-0.5 * GAMMA * 0.5))

    def test_decay_and_precession(self):
        st = init_state(small_scenario())
        st.f31[:] = 1e-3
        dt = 0.25
        bloch_step(st, dt, DB30, gamma=GAMMA)
        assert np.allclose(np.abs(st.f31), 1e-3 * math.exp(-0.5 * GAMMA * dt))
        assert np.allclose(np.angle(st.f31), -DB30 * dt)

    def test_zero_field_closed_form_over_many_steps(self):
        # xi = 0 disables the radiated field entirely; the coherence sum must
        # follow exp(-gamma t/2) cos(delta_b t) of the bare kick
        sc = small_scenario(sample=SampleSpec(xi=0.0, n_depth=11))
        traces, snaps = run_scenario(replace_snapshot(sc, (5.0, 17.0)))
        for snap in snaps:
            s = (snap.f31 + snap.f42)[0]
            expected = 1j * 0.5 * A * 1e-3 * math.exp(-0.5 * GAMMA * snap.t) * math.cos(DB30 * snap.t)
            assert s == pytest.approx(expected, rel=1e-9)


def replace_snapshot(sc, times):
    cfg = ScenarioConfig(
        sample=sc.sample, pulse=sc.pulse, mirror=sc.mirror, schedule=sc.schedule,
        t_end=sc.t_end, dt=sc.dt, consts=sc.consts, record_snapshots_at=tuple(times),
    )
    return validate_scenario(cfg)


class TestFieldSweep:
    def test_zero_coherence_keeps_boundaries(self):
        st = init_state(small_scenario())
        om_f, om_b = field_sweep(st, eta_l=6 * GAMMA, clebsch=A,
                                 omega_f_front=0.5, omega_b_back=0.25)
        assert np.allclose(om_f, 0.5) and np.allclose(om_b, 0.25)

    def test_constant_source(self):
        st = init_state(small_scenario())
        c = 1e-3 + 0j
        st.f31[:] = 0.5 * c
        st.f42[:] = 0.5 * c
        eta_l = 6 * GAMMA * 0.5
        om_f, _ = field_sweep(st, eta_l=eta_l, clebsch=A)
        assert om_f[-1] == pytest.approx(1j * eta_l * A * c)
        assert om_f[0] == 0.0

    def test_impulse_emits_first_order_amplitude(self):
        sc = small_scenario(sample=SampleSpec(xi=0.01, n_depth=201))
        st = init_state(sc)
        apply_impulse(st, "forward", 1e-3)
        om_f, _ = field_sweep(st, eta_l=sc.eta_l, clebsch=A)
        assert om_f[-1] == pytest.approx(-2.0 * 0.01 * GAMMA * 1e-3, rel=1e-12)


class TestMirrorFeedback:
    def test_no_mirror(self):
        st = init_state(small_scenario())
        st.mirror_buffer.append(1.0)
        mirror = MirrorSpec(present=True, reflectivity=0.0, delay_tau=1.0)
        assert mirror_feedback(st, 5.0, mirror) == 0.0

    def test_prompt_admitted_and_delayed_rejected(self):
        sc = small_scenario()
        st = init_state(sc)
        tau = math.pi / DB30
        mirror = MirrorSpec(present=True, reflectivity=0.99, delay_tau=tau, disable_time=7.39)
        # build a boundary history: prompt-scale value at t=0, then smaller tail
        n = int(20.0 / sc.dt)
        for k in range(n):
            st.mirror_buffer.append(1.0 if k == 0 else 0.01)
        # field re-entering at t=tau left at 0, met the mirror at tau/2 < t_d
        assert mirror_feedback(st, tau, mirror) == pytest.approx(-math.sqrt(0.99) * 1.0)
        # field re-entering at tau + 1 left at t=1, reached the mirror after t_d
        assert mirror_feedback(st, tau + 1.0, mirror) == 0.0

    def test_underrun_is_zero(self):
        st = init_state(small_scenario())
        mirror = MirrorSpec(present=True, reflectivity=0.99, delay_tau=5.0)
        assert mirror_feedback(st, 2.0, mirror) == 0.0


class TestRunScenario:
    def test_backward_onset_delay(self, fig2a_run):
        sc, traces, _ = fig2a_run
        fa, ba = np.abs(traces.fwd_amp), np.abs(traces.bwd_amp)
        on_f = traces.t_grid[np.argmax(fa > 1e-9 * fa.max())]
        on_b = traces.t_grid[np.argmax(ba > 1e-9 * ba.max())]
        assert on_b - on_f == pytest.approx(math.pi / DB30, abs=0.1)

    def test_no_mirror_means_no_backward(self, single_pass_run):
        _, traces, _ = single_pass_run
        assert np.all(traces.bwd_amp == 0.0)
        assert not traces.mirror_in_beam.any()
        # quantum beat present in the forward intensity
        i_fwd = np.abs(traces.fwd_amp) ** 2
        assert i_fwd.max() > 100 * i_fwd[np.argmin(np.abs(traces.t_grid - 0.5 * math.pi / DB30))]

    def test_detected_equals_raw_when_mirror_gone(self, fig2a_run):
        _, traces, _ = fig2a_run
        off = ~traces.mirror_in_beam
        assert np.array_equal(traces.fwd_detected[off], traces.fwd_amp[off])

    def test_metadata_hash(self, fig2a_run):
        sc, traces, _ = fig2a_run
        assert traces.metadata["config_hash"] == sc.config_hash

    def test_numerical_guard_reports_time(self):
        # an infinite pulse area drives the state non-finite immediately
        sc = small_scenario(pulse=PulseSpec(area=math.inf, linear_regime=False))
        with np.errstate(invalid="ignore"):
            with pytest.raises(NumericalError, match="t = 0.0000 ns"):
                run_scenario(sc)


class TestGaussianInput:
    def test_area_normalization(self):
        pulse = PulseSpec(mode="gaussian", area=1e-3, fwhm=0.3, t0=2.0)
        t = np.linspace(0.0, 4.0, 40001)
        integral = np.trapezoid(gaussian_input(t, pulse), t)
        assert integral == pytest.approx(1e-3, rel=1e-6)

    def test_far_tail_vanishes(self):
        pulse = PulseSpec(mode="gaussian", area=1e-3, fwhm=0.1, t0=1.0)
        assert gaussian_input(5.0, pulse) < 1e-30

    def test_impulsive_limit(self):
        # resolved pulse converges to the impulsive-mode traces as fwhm -> 0
        tau = math.pi / DB30
        fwhm = 0.05 / DB30
        sigma = fwhm / (2 * math.sqrt(2 * math.log(2)))
        t0 = 1.0
        t_d = 0.5 * tau + t0 + 6 * sigma

        def scenario(mode, fwhm_v):
            return validate_scenario(ScenarioConfig(
                sample=SampleSpec(xi=1.0, n_depth=201),
                pulse=PulseSpec(mode=mode, area=1e-3, fwhm=fwhm_v, t0=t0),
                mirror=MirrorSpec(present=True, reflectivity=0.99,
                                  delay_tau=tau, disable_time=t_d),
                schedule=HyperfineSchedule.constant(DB30),
                t_end=60.0,
                dt=0.005,
            ))

        ref, _ = run_scenario(scenario("impulsive", None))
        errs = []
        for f in (fwhm, 0.5 * fwhm):
            got, _ = run_scenario(scenario("gaussian", f))
            s = f / (2 * math.sqrt(2 * math.log(2)))
            err_f = relative_l2(
                OracleCurve(got.t_grid, got.fwd_amp),
                OracleCurve(ref.t_grid, ref.fwd_amp),
                (t0 + 6 * s + 0.1, 60.0),
            )
            err_b = relative_l2(
                OracleCurve(got.t_grid, got.bwd_amp),
                OracleCurve(ref.t_grid, ref.bwd_amp),
                (t0 + tau + 6 * s + 0.1, 60.0),
            )
            assert err_f < 0.01 and err_b < 0.01
            errs.append(err_f)
        assert errs[1] < errs[0]  # shrinking fwhm converges

    def test_backward_kick_matches_channel_three(self):
        # the reflected pulse must deposit the same backward coherence as the
        # analytic -sqrt(R)*theta kick of the impulsive mode
        tau = math.pi / DB30
        fwhm = 0.02 / DB30
        sigma = fwhm / (2 * math.sqrt(2 * math.log(2)))
        t0 = 0.5
        t_d = 0.5 * tau + t0 + 6 * sigma
        snap_t = 18.0

        def scenario(mode, fwhm_v):
            return validate_scenario(ScenarioConfig(
                sample=SampleSpec(xi=0.05, n_depth=101),
                pulse=PulseSpec(mode=mode, area=1e-3, fwhm=fwhm_v, t0=t0),
                mirror=MirrorSpec(present=True, reflectivity=0.99,
                                  delay_tau=tau, disable_time=t_d),
                schedule=HyperfineSchedule.constant(DB30),
                t_end=20.0,
                dt=0.005,
                record_snapshots_at=(snap_t,),
            ))

        _, snaps_imp = run_scenario(scenario("impulsive", None))
        _, snaps_g = run_scenario(scenario("gaussian", fwhm))
        b_imp = snaps_imp[0].b31
        b_g = snaps_g[0].b31
        assert np.linalg.norm(b_g - b_imp) / np.linalg.norm(b_imp) < 0.01
