import math

import numpy as np
import pytest

from wristmrac import lti, mrac, pipeline
from wristmrac.config import Config
from wristmrac.errors import DivergenceError, DomainError, ParseError
from wristmrac.mrac import MitRuleState, mit_update

DT = 1e-3


def first_order(gain=1.0, dt=DT):
    return lti.realize(lti.TransferFunction((gain,), (1.0, 1.0)), dt)


def euler_mrac_theta(gamma, duration, dt=1e-4, period=10.0):
    """Independent brute-force MIT-rule simulation of the matched first-order loop."""
    yp = ym = theta = 0.0
    for k in range(int(round(duration / dt))):
        r = 1.0 if (k * dt) % period < period / 2 else -1.0
        e = yp - ym
        u = theta * r
        theta, yp, ym = theta - dt * gamma * e * ym, yp + dt * (u - yp), ym + dt * (r - ym)
    return theta


class TestMitUpdate:
    def test_zero_error_fixed_point(self):
        state = MitRuleState(theta=1.7, gamma=3.0)
        assert mit_update(state, 0.0, 0.4, DT).theta == 1.7

    def test_single_step(self):
        state = MitRuleState(theta=1.0, gamma=1.0)
        # 1 - 0.001 * 0.1 * 0.5
        assert mit_update(state, 0.1, 0.5, 0.001).theta == pytest.approx(0.99995, abs=1e-15)

    def test_divergence(self):
        with pytest.raises(DivergenceError):
            mit_update(MitRuleState(theta=1.0, gamma=1e200), -1e200, 1e200, 1.0)

    def test_bad_dt(self):
        with pytest.raises(DomainError):
            mit_update(MitRuleState(theta=0.0, gamma=1.0), 0.1, 0.1, 0.0)

    def test_rate_linear_in_gamma(self):
        s1 = mit_update(MitRuleState(theta=0.0, gamma=5e4), -0.01, 0.02, DT)
        s2 = mit_update(MitRuleState(theta=0.0, gamma=1e5), -0.01, 0.02, DT)
        assert np.sign(s1.theta) == np.sign(s2.theta)
        assert s2.theta == pytest.approx(2 * s1.theta, rel=1e-15)


class TestRunMrac:
    def test_zero_trajectory(self):
        records = mrac.run_mrac(first_order(), first_order(), 0.0, gamma=2.0, duration=1.0, theta0=0.3)
        assert all(rec.e == 0.0 and rec.u_force_N == 0.0 for rec in records)
        assert all(rec.theta == 0.3 for rec in records)

    def test_record_count_and_times(self):
        records = mrac.run_mrac(first_order(), first_order(), 1.0, gamma=1.0, duration=2.0)
        assert len(records) == 2001
        assert records[0].t == 0.0 and records[-1].t == pytest.approx(2.0)

    def test_error_consistency(self):
        records = mrac.run_mrac(first_order(2.0), first_order(), mrac.square_wave(1.0, 4.0), gamma=1.0,
                                duration=10.0)
        assert all(abs(rec.e - (rec.y_plant - rec.y_model)) <= 1e-12 for rec in records)

    def test_matched_first_order_converges(self):
        records = mrac.run_mrac(first_order(), first_order(), mrac.square_wave(1.0, 10.0), gamma=2.0,
                                duration=50.0)
        assert abs(records[-1].theta - 1.0) < 1e-2
        assert records[-1].theta == pytest.approx(euler_mrac_theta(2.0, 50.0), abs=1e-2)

    def test_theta_constant_while_error_zero(self):
        # identical plant and model with the ideal gain: e stays 0, so theta never moves
        records = mrac.run_mrac(first_order(), first_order(), mrac.square_wave(1.0, 2.0), gamma=5.0,
                                duration=5.0, theta0=1.0)
        assert {rec.theta for rec in records} == {1.0}

    def test_gamma_zero_keeps_theta(self):
        records = mrac.run_mrac(first_order(3.0), first_order(), 1.0, gamma=0.0, duration=2.0, theta0=0.5)
        assert {rec.theta for rec in records} == {0.5}

    def test_dt_mismatch(self):
        with pytest.raises(DomainError):
            mrac.run_mrac(first_order(dt=1e-3), first_order(dt=2e-3), 1.0, 1.0, 1.0)

    def test_blowup_carries_partial_trace(self):
        with pytest.raises(DivergenceError) as info:
            mrac.run_mrac(first_order(), first_order(), mrac.square_wave(1.0, 1.0), gamma=1e4, duration=20.0,
                          blowup_limit=10.0)
        assert info.value.partial
        assert len(info.value.partial) < 20001

    def test_determinism(self):
        cfg = Config({"mrac": {"duration": 3.0}})
        a = pipeline.generate_dataset(cfg)
        b = pipeline.generate_dataset(cfg)
        assert [r.as_row() for r in a] == [r.as_row() for r in b]

    def test_default_wrist_step_converges(self):
        records = pipeline.generate_dataset(Config())
        assert abs(records[-1].e) < 1e-3
        assert records[-1].t == pytest.approx(20.0)
        ideal = 1.0 / pipeline.plant_model(Config()).static_gain
        assert records[-1].theta == pytest.approx(ideal, rel=1e-6)
        # overshoot of the adapted gain stays below 20%
        assert max(r.theta for r in records) < 1.2 * ideal


class TestExport:
    def records(self, n=3):
        return mrac.run_mrac(first_order(2.0), first_order(), 1.0, gamma=1.0, duration=(n - 1) * DT)

    def test_three_records_four_lines(self, tmp_path):
        path = tmp_path / "d.csv"
        mrac.export_dataset(self.records(3), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "t,r,y_plant,y_model,e,u_force_N,theta"

    def test_round_trip(self, tmp_path):
        recs = mrac.run_mrac(first_order(2.0), first_order(), mrac.square_wave(1.0, 0.5), gamma=3.0,
                             duration=1.0)
        path = tmp_path / "d.csv"
        mrac.export_dataset(recs, path, comment="config_digest=abc")
        back = mrac.read_dataset(path)
        assert [r.as_row() for r in back] == [r.as_row() for r in recs]

    def test_empty(self, tmp_path):
        with pytest.raises(DomainError):
            mrac.export_dataset([], tmp_path / "d.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ParseError) as info:
            mrac.read_dataset(path)
        assert info.value.line == 1

    def test_bad_row(self, tmp_path):
        path = tmp_path / "d.csv"
        mrac.export_dataset(self.records(3), path)
        path.write_text(path.read_text() + "1,2,3\n")
        with pytest.raises(ParseError) as info:
            mrac.read_dataset(path)
        assert info.value.line == 5
