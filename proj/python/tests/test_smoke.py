import json
import math

import numpy as np
import pytest

import quasiblow as qb


def test_speed_models():
    m = qb.SpeedModel.power(1.0)
    assert m.c(0.5) == pytest.approx(1.5)
    assert m.domain[0] == -1.0
    with pytest.raises(qb.QuasiblowError):
        m.c(-2.0)
    with pytest.raises(qb.ValidationError):
        qb.SpeedModel.affine(-1.0, 1.0)


def test_riccati_closed_form():
    p = qb.RiccatiParams(a_sq=1.0, m=0.0, y0=2.0)
    assert qb.riccati_blowup_time(p) == pytest.approx(0.5)
    assert qb.riccati_solve(p, 0.25) == pytest.approx(4.0)


def test_constants_of_the_default_problem():
    k = qb.compute_constants(1.0, qb.SpeedModel.power(1.0))
    assert k.t_b == pytest.approx(2.0 * math.e)


def test_run_blows_up():
    cfg = qb.RunConfig()
    cfg.lam = 1.0
    cfg.eps = 0.4
    cfg.set_grid(-0.8, 0.8, 256)
    cfg.cfl = 0.8
    cfg.t_max = 20.0
    cfg.track_peak = True
    cfg.check_domain_of_dependence = False
    cfg.blowup_factor = 2.0
    tr = qb.run(cfg)
    assert tr.event == "blowup_threshold_crossed"
    assert tr.t_final < 2.0 * math.e
    s = tr.samples()
    assert np.all(np.diff(s["t"]) > 0)
    assert s["max_abs_S"][-1] >= 2.0 * tr.initial_max_norm
    snap = tr.snapshot(-1)
    assert snap["x"].shape == snap["S"].shape == (256,)


def test_config_round_trip_and_errors():
    echoed = json.loads(qb.parse_config('{"kind": "riccati", "riccati": {"a": 2, "y0": 1}}'))
    assert echoed["riccati"]["a"] == 2
    with pytest.raises(qb.ConfigError):
        qb.parse_config('{"kind": "riccati", "colour": 1}')


def test_config_file_run(tmp_path):
    cfg = tmp_path / "riccati.json"
    cfg.write_text('{"kind": "riccati", "riccati": {"a": 1, "y0": 1, "m": 0}}')
    assert qb.run_config_file(cfg, tmp_path / "out") == 0
    run = json.loads((tmp_path / "out" / "run.json").read_text())
    assert run["blowup_time"] == pytest.approx(1.0)


def test_verify_suites():
    r = qb.verify(samples=2000, sets=5, seed=3)
    assert r["algebraic"] and r["riccati"] and r["constants"]
