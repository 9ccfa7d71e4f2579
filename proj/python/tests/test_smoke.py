import math

import pytest

import mlpf


def test_problems_listed():
    assert set(mlpf.problem_names()) >= {"ctl", "dvg02", "lj13"}


def test_ctl_value_and_gradient():
    p = mlpf.problem("ctl")
    assert p.dim == 2
    assert p([0.0, 0.0]) == -1.0
    x = [1.0, 1.0]
    g = p.gradient(x)
    h = 1e-6
    for i in range(2):
        up, dn = list(x), list(x)
        up[i] += h
        dn[i] -= h
        fd = (p(up) - p(dn)) / (2 * h)
        assert abs(g[i] - fd) <= 1e-6 * max(1.0, abs(g[i]))


def test_square_kernel():
    assert mlpf.cost_update(1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert mlpf.cost_update(3.5, target=3.5, kernel="sigmoid_convex") == 0.0


def test_config_overrides_and_errors():
    c = mlpf.make_config("dvg02", max_steps=50, factorized=True)
    d = c.to_dict()
    assert d["max_steps"] == "50"
    assert d["factorized"] == "true"
    assert set(d) == set(mlpf.config_keys())
    with pytest.raises(mlpf.ConfigError):
        mlpf.make_config("ctl", eta=-1.0)
    with pytest.raises(mlpf.ConfigError):
        mlpf.parse_config("learning_rate = 1\n")


def test_run_and_trace_roundtrip(tmp_path):
    out = tmp_path / "ctl.csv"
    c = mlpf.make_config("ctl", max_steps=200, output=str(out))
    t = mlpf.run(c)
    assert t.status in {"converged", "max_steps", "diverged"}
    assert t.steps == 200
    assert t.columns[:6] == ["iteration", "rho_n", "rho_cost", "objective", "target_norm", "step_norm"]
    assert len(t) == 201
    back, cfg, version = mlpf.read_trace(str(out))
    assert version == mlpf.__version__
    assert cfg.to_dict() == c.to_dict()
    assert back.rows == t.rows
    assert all(math.isfinite(v) for v in t.final_targets)


def test_check_kernel_exactness():
    (r,) = mlpf.check(["kernel_exactness"])
    assert r["id"] == "kernel_exactness"
    assert r["passed"]
