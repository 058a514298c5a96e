"""Backend parity: the compiled step kernel against the pure-Python fallback."""

import numpy as np
import pytest

from robin_dnls import _kernels_py

try:
    from robin_dnls import _kernels_c
except ImportError:  # pragma: no cover - compiled extension unavailable
    _kernels_c = None

needs_compiled = pytest.mark.skipif(
    _kernels_c is None, reason="compiled kernel not built")


def random_state(seed, n=401):
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 10.0, n)
    vals = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.exp(-0.5 * x)
    return vals, 10.0 / (n - 1)


@needs_compiled
@pytest.mark.parametrize("plain", [0, 1])
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree(seed, plain):
    vals, h = random_state(seed)
    for alpha in (-0.5, 0.0, 1.0):
        out_c, ch_c = _kernels_c.cn_step(vals, h, alpha, 5e-4, 3, plain)
        out_p, ch_p = _kernels_py.cn_step(vals, h, alpha, 5e-4, 3, plain)
        assert np.max(np.abs(out_c - out_p)) <= 1e-13 * np.max(np.abs(out_p))
        assert np.allclose(ch_c, ch_p, rtol=1e-8, atol=1e-15)


@needs_compiled
def test_backends_agree_over_many_steps():
    vals, h = random_state(123)
    vc = vals.copy()
    vp = vals.copy()
    for _ in range(50):
        vc, _ = _kernels_c.cn_step(vc, h, -0.5, 1e-3, 3, 0)
        vp, _ = _kernels_py.cn_step(vp, h, -0.5, 1e-3, 3, 0)
    assert np.max(np.abs(vc - vp)) <= 1e-11 * np.max(np.abs(vp))


def test_python_kernel_dirichlet_clamp():
    vals, h = random_state(7)
    out, _ = _kernels_py.cn_step(vals, h, 0.0, 1e-3, 3, 0)
    assert out[-1] == 0.0


@needs_compiled
def test_compiled_kernel_dirichlet_clamp():
    vals, h = random_state(7)
    out, _ = _kernels_c.cn_step(vals, h, 0.0, 1e-3, 3, 0)
    assert out[-1] == 0.0


def test_backend_selection_env(monkeypatch):
    import importlib

    import robin_dnls.backend as backend

    monkeypatch.setenv("ROBIN_DNLS_PURE_PYTHON", "1")
    importlib.reload(backend)
    assert backend.BACKEND_NAME == "python"
    monkeypatch.delenv("ROBIN_DNLS_PURE_PYTHON")
    importlib.reload(backend)
    assert backend.BACKEND_NAME in ("cython", "python")
