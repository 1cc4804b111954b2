"""Compiled and pure kernels must agree bit for bit, not approximately."""

from __future__ import annotations

import math
import os
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

import ptsmc
from ptsmc import _backend, _pykernel
from ptsmc.controllers import LAWS
from ptsmc.power_tower import SUR_EXACT, SUR_TANH

HAVE_COMPILED = "compiled" in ptsmc.available_backends()

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled extension not built"
)


def _kernels():
    return _backend.get_backend("compiled"), _pykernel


def test_pure_backend_always_available():
    assert "pure" in ptsmc.available_backends()
    assert _backend.get_backend("pure").NAME == "pure"


def test_get_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _backend.get_backend("cuda")


@needs_compiled
def test_active_backend_prefers_compiled():
    if os.environ.get("PTSMC_BACKEND", "auto") == "auto":
        assert ptsmc.active_backend() == "compiled"


# ---------------------------------------------------------------------------
# scalar parity


@needs_compiled
def test_scalar_pt_parity_bitwise():
    ck, pk = _kernels()
    grid = [0.0, 1e-15, 1e-13, 1e-9, 0.05, 0.3, 0.6065306597126334, 1.0, 1.5, 2.0,
            18.0, 1e5, 1e200]
    for sur, kappa in ((SUR_EXACT, 0.0), (SUR_TANH, 50.0)):
        for alpha in (1.5, 2.0, 3.0):
            for mag in grid:
                for a in (mag, -mag):
                    got_c = ck.pt_value_raw(a, alpha, sur, kappa, 1e-12, 700.0)
                    got_p = pk.pt_value_raw(a, alpha, sur, kappa, 1e-12, 700.0)
                    assert got_c == got_p, (a, alpha, sur)


@needs_compiled
def test_scalar_ptd_parity_bitwise_nan_aware():
    ck, pk = _kernels()
    grid = [0.0, 1e-15, 1e-9, 0.05, 0.6, 1.0, 2.0, 1e5, 1e200]
    for alpha in (0.5, 1.0, 1.5, 2.0, 3.0):
        for mag in grid:
            for a in (mag, -mag):
                got_c = ck.pt_derivative_factor_raw(a, alpha, 1e-12, 700.0)
                got_p = pk.pt_derivative_factor_raw(a, alpha, 1e-12, 700.0)
                if math.isnan(got_p):
                    assert math.isnan(got_c), (a, alpha)
                else:
                    assert got_c == got_p, (a, alpha)


@needs_compiled
def test_scalar_law_parity_bitwise():
    ck, pk = _kernels()
    states = [(0.0, 0.0), (1.0, -1.5), (-1.0, 1.5), (1e-14, 0.5), (0.3, -2.0),
              (2.0, 3.0), (-0.5, 0.0)]
    for law_code in range(len(LAWS)):
        for x1, x2 in states:
            for w in (0.0, -10.0):
                args = (law_code, x1, x2, w, 1.0, 20.0, 2.0, 1.5, 1.0,
                        SUR_EXACT, 0.0, 1e-12, 700.0)
                got_c = ck.eval_law_raw(*args)
                got_p = pk.eval_law_raw(*args)
                assert got_c == got_p, (law_code, x1, x2, w)


# ---------------------------------------------------------------------------
# full-run parity


@needs_compiled
@pytest.mark.parametrize("preset", ["fig1", "fig2", "fig3", "fig4"])
def test_run_parity_bitwise(preset):
    sc = ptsmc.get_scenario(preset)
    rc = ptsmc.run(sc.sim, sc.spec, sc.dist, backend="compiled")
    rp = ptsmc.run(sc.sim, sc.spec, sc.dist, backend="pure")
    assert rc.backend == "compiled" and rp.backend == "pure"
    assert rc.saturation_events == rp.saturation_events
    for name in ptsmc.COLUMNS:
        assert np.array_equal(rc.column(name), rp.column(name)), name


@needs_compiled
def test_overflow_parity():
    sc = ptsmc.get_scenario("fig1")
    cfg = replace(sc.sim, x1_0=2.0, x2_0=0.0)
    errors = {}
    for backend in ("compiled", "pure"):
        with pytest.raises(ptsmc.SimulationOverflowError) as exc_info:
            ptsmc.run(cfg, sc.spec, backend=backend)
        errors[backend] = exc_info.value
    assert errors["compiled"].step == errors["pure"].step
    assert errors["compiled"].t == errors["pure"].t
    assert errors["compiled"].state == errors["pure"].state


@needs_compiled
def test_tabulated_parity():
    spec = ptsmc.ControllerSpec(law="integral", surrogate="tanh", tanh_gain=50.0)
    dist = ptsmc.DisturbanceModel.tabulated((0.0, 1.0, 1.001, 10.0), (0.0, 0.0, 5.0, 5.0))
    cfg = ptsmc.SimConfig(dt=1e-3, t_end=2.0, record_stride=1)
    rc = ptsmc.run(cfg, spec, dist, backend="compiled")
    rp = ptsmc.run(cfg, spec, dist, backend="pure")
    for name in ptsmc.COLUMNS:
        assert np.array_equal(rc.column(name), rp.column(name)), name


# ---------------------------------------------------------------------------
# environment selection


def test_env_variable_selects_backend():
    env = dict(os.environ, PTSMC_BACKEND="pure")
    out = subprocess.run(
        [sys.executable, "-c", "import ptsmc; print(ptsmc.active_backend())"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "pure"


def test_env_variable_rejects_unknown():
    env = dict(os.environ, PTSMC_BACKEND="gpu")
    out = subprocess.run(
        [sys.executable, "-c", "import ptsmc; ptsmc.active_backend()"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode != 0
    assert "gpu" in out.stderr
