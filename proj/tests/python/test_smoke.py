import math
import os

import numpy as np
import pytest

import lgmpsp

CONFIG_DIR = os.environ.get("LGMPSP_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "config"))


def test_so3_round_trip():
    w = np.array([0.3, -0.2, 0.5])
    R = lgmpsp.exp_so3(w)
    assert lgmpsp.is_rotation(R)
    np.testing.assert_allclose(lgmpsp.log_so3(R), w, atol=1e-14)
    np.testing.assert_allclose(lgmpsp.vee(lgmpsp.hat(w)), w)


def test_antipodal_log_raises():
    with pytest.raises(lgmpsp.LgmpspError):
        lgmpsp.log_so3(np.diag([1.0, -1.0, -1.0]))
    np.testing.assert_allclose(np.abs(lgmpsp.log_so3_resolved(np.diag([1.0, -1.0, -1.0]))), [math.pi, 0, 0], atol=1e-12)


def test_euler_flip_target():
    np.testing.assert_allclose(lgmpsp.euler_to_rotation([180.0, 0.0, 0.0]), np.diag([1.0, -1.0, -1.0]), atol=1e-15)
    np.testing.assert_allclose(lgmpsp.rotation_to_euler(lgmpsp.euler_to_rotation([10.0, 20.0, 30.0])), [10, 20, 30])


def test_omega_dot_hand_value():
    J = lgmpsp.vpq_reference_inertia()
    w = np.array([1.0, 2.0, 3.0])
    expected = np.linalg.solve(J, -np.cross(w, J @ w))
    np.testing.assert_allclose(lgmpsp.vpq_omega_dot(J, w, np.zeros(3)), expected, rtol=1e-12)


def test_solve_vpq_flip():
    result = lgmpsp.solve({"timing": False})
    assert result["converged"]
    assert result["iterations"] <= 10
    traj = result["trajectory"]
    assert len(traj["controls"]) == 599
    assert abs(traj["euler_deg"][-1][0]) == pytest.approx(180.0, abs=1e-6)


def test_maneuver_writes_files(tmp_path):
    report, code = lgmpsp.maneuver({"timing": False, "output_dir": str(tmp_path)})
    assert code == 0
    assert (tmp_path / "trajectory.csv").exists()
    assert report["parameter_provenance"]["J_xx"] == "paper"


def test_config_error_names_path():
    with pytest.raises(lgmpsp.LgmpspError, match="mpsp.bogus"):
        lgmpsp.solve({"mpsp": {"bogus": 1}})


def test_shipped_configs_load():
    for name in ("vpq_flip.json", "smrh_flip.json"):
        result = lgmpsp.solve(os.path.join(CONFIG_DIR, name))
        assert result["converged"]


def test_default_config_round_trip():
    cfg = lgmpsp.default_config()
    assert cfg["vehicle"] == "vpq"
    cfg["timing"] = False
    assert lgmpsp.solve(cfg)["converged"]
