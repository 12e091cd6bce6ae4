"""Compiled kernel vs pure kernel: outputs must match byte for byte."""

import os
import subprocess
import sys

import pytest

from heckegamma._kernel import CompiledKernel, make_kernel

pytestmark = pytest.mark.skipif(
    CompiledKernel is None, reason="compiled kernel not built"
)

GRID = [(2, 2, 4), (2, 3, 3), (3, 2, 3), (3, 3, 2), (4, 2, 2)]


def explore_pair(n, q0, r, cap=5_000_000, want_weyl=True):
    kp = make_kernel(n, q0, 60, "pure")
    kc = make_kernel(n, q0, 60, "compiled")
    return kp.explore(r, cap, want_weyl), kc.explore(r, cap, want_weyl)


@pytest.mark.parametrize("n,q0,r", GRID)
def test_explore_identical(n, q0, r):
    dp, dc = explore_pair(n, q0, r)
    assert dp["keys_blob"] == dc["keys_blob"]
    assert dp["index"] == dc["index"]
    assert dp["interior_count"] == dc["interior_count"]
    assert dp["truncated"] == dc["truncated"]
    for field in ("key_offsets", "dist_base", "dist_xf", "stable", "members", "weyl"):
        assert (dp[field] == dc[field]).all(), field


def test_truncated_explore_identical():
    dp, dc = explore_pair(2, 2, 4, cap=30)
    assert dp["truncated"] and dc["truncated"]
    assert dp["keys_blob"] == dc["keys_blob"]
    assert (dp["dist_base"] == dc["dist_base"]).all()


@pytest.mark.parametrize("n,q0", [(2, 2), (3, 2), (2, 3)])
def test_pointwise_ops_identical(n, q0):
    kp = make_kernel(n, q0, 60, "pure")
    kc = make_kernel(n, q0, 60, "compiled")
    keys = kp.explore(2, 5_000_000, False)["index"]
    for key in keys:
        assert kp.theta(key) == kc.theta(key)
        assert kp.is_rational(key) == kc.is_rational(key)
        assert kp.vertex_spans(key) == kc.vertex_spans(key)
        for s in range(n):
            assert kp.neighbors(key, s) == kc.neighbors(key, s)
        if n == 2:
            assert kp.tree_crossing_distance(key) == kc.tree_crossing_distance(key)


def test_precision_errors_match():
    kp = make_kernel(2, 2, 60, "pure")
    kc = make_kernel(2, 2, 60, "compiled")
    window = (0, (1, 1), 2)  # known only below t^2
    for k in (kp, kc):
        with pytest.raises(Exception) as exc:
            k._inv_unit((0, (), 5), 10)
        assert "invert" in str(exc.value)
    assert kp._mul(window, window) == kc._mul(window, window)
    assert kp._add(window, (0, (1,), 1 << 30)) == kc._add(window, (0, (1,), 1 << 30))


def test_env_override_forces_pure():
    code = (
        "from heckegamma._kernel import default_backend_name;"
        "print(default_backend_name())"
    )
    env = dict(os.environ, HECKEGAMMA_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "pure"
