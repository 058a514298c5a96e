"""Pure-Python (numpy/scipy) Crank-Nicolson step kernel.

Same contract as the compiled extension in _kernels.pyx; selected as a
fallback when the extension is unavailable (or forced via
ROBIN_DNLS_PURE_PYTHON=1).
"""

import numpy as np
from scipy.linalg import solve_banded

BACKEND_NAME = "python"


def _robin_derivative(v, h, alpha):
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = alpha * v[0]  # ghost node v_{-1} = v_1 - 2 h alpha v_0
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return d


def cn_step(v, h, alpha, dt, sweeps, plain):
    """One Crank-Nicolson step of i v_t = -v_xx + (nonlinearity).

    full mode (plain=0): i v_t = H v with H = -D2 + W, W real multiplier
        W = -Im(conj(vm) vm_x) - (3/16)|vm|^4 frozen at the midpoint field
        vm = (v + v_new)/2 of the current fixed-point sweep; CN is then a
        Cayley transform of a (weighted-)symmetric real operator, so the
        trapezoid mass is conserved to solver roundoff.
    plain mode (plain=1): i v_t = -D2 v + g, g = i |vm|^2 vm_x explicit at
        the midpoint (realizes the non-conservative plain-derivative variant).

    D2 carries the Robin ghost at node 0 and a homogeneous Dirichlet clamp
    at node n-1. Returns (v_new, per-sweep max-change array).
    """
    v = np.asarray(v, dtype=np.complex128)
    n = v.size
    inv_h2 = 1.0 / (h * h)
    idt = 1j / dt

    # -D2 rows (constant part): interior diag 2/h^2, offdiag -1/h^2;
    # Robin row 0: diag (2 + 2 h alpha)/h^2, upper -2/h^2.
    base_diag = np.full(n, 2.0 * inv_h2)
    base_diag[0] = (2.0 + 2.0 * h * alpha) * inv_h2
    lower = np.full(n - 1, -inv_h2)
    upper = np.full(n - 1, -inv_h2)
    upper[0] = -2.0 * inv_h2

    w_new = v.copy()
    changes = np.zeros(sweeps)
    for k in range(sweeps):
        vm = 0.5 * (v + w_new)
        if plain:
            diag_h = base_diag.astype(np.complex128)
            g = 1j * np.abs(vm) ** 2 * _robin_derivative(vm, h, alpha)
        else:
            vm_x = _robin_derivative(vm, h, alpha)
            W = -np.imag(np.conj(vm) * vm_x) - (3.0 / 16.0) * np.abs(vm) ** 4
            diag_h = base_diag + W
            g = None

        # (i/dt - H/2) v_new = (i/dt + H/2) v  [+ g at the midpoint]
        rhs = (idt + 0.5 * diag_h) * v
        rhs[:-1] += 0.5 * upper * v[1:]
        rhs[1:] += 0.5 * lower * v[:-1]
        if g is not None:
            rhs += g

        ab = np.zeros((3, n), dtype=np.complex128)
        ab[0, 1:] = -0.5 * upper
        ab[1, :] = idt - 0.5 * diag_h
        ab[2, :-1] = -0.5 * lower
        # Dirichlet clamp at the far end.
        ab[1, -1] = 1.0
        ab[0, -1] = 0.0
        ab[2, -2] = 0.0
        rhs[-1] = 0.0

        sol = solve_banded((1, 1), ab, rhs)
        changes[k] = float(np.max(np.abs(sol - w_new)))
        w_new = sol
        if not np.all(np.isfinite(w_new)):
            changes[k:] = np.inf
            break
    return w_new, changes
