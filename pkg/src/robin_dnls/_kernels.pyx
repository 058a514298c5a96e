# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Crank-Nicolson step kernel (hot loop of the time integrator).

Mirrors _kernels_py.cn_step; see that module for the scheme description.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


def cn_step(object v_in, double h, double alpha, double dt, int sweeps, int plain):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] v = \
        np.ascontiguousarray(v_in, dtype=np.complex128)
    cdef Py_ssize_t n = v.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] w_new = v.copy()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vm = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dvm = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] diag = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] rhs = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cp = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] changes = np.zeros(sweeps, dtype=np.float64)

    cdef double inv_h2 = 1.0 / (h * h)
    cdef double complex idt = 1j / dt
    cdef double complex lower = -inv_h2      # constant sub-diagonal of -D2
    cdef double complex upper0 = -2.0 * inv_h2
    cdef double complex upper = -inv_h2
    cdef double diag0_base = (2.0 + 2.0 * h * alpha) * inv_h2
    cdef double diag_base = 2.0 * inv_h2

    cdef Py_ssize_t j, k
    cdef double W, absq, change, mag
    cdef double complex up_j, lo_j, denom, gj
    cdef bint bad

    for k in range(sweeps):
        for j in range(n):
            vm[j] = 0.5 * (v[j] + w_new[j])
        # Robin-ghost derivative of the midpoint field.
        dvm[0] = alpha * vm[0]
        for j in range(1, n - 1):
            dvm[j] = (vm[j + 1] - vm[j - 1]) / (2.0 * h)
        dvm[n - 1] = (3.0 * vm[n - 1] - 4.0 * vm[n - 2] + vm[n - 3]) / (2.0 * h)

        # Assemble H diagonal and the RHS (i/dt + H/2) v [+ explicit g].
        for j in range(n):
            if plain:
                diag[j] = diag0_base if j == 0 else diag_base
            else:
                absq = vm[j].real * vm[j].real + vm[j].imag * vm[j].imag
                W = -(vm[j].conjugate() * dvm[j]).imag - (3.0 / 16.0) * absq * absq
                diag[j] = (diag0_base if j == 0 else diag_base) + W

        for j in range(n):
            rhs[j] = (idt + 0.5 * diag[j]) * v[j]
            if j + 1 < n:
                up_j = upper0 if j == 0 else upper
                rhs[j] = rhs[j] + 0.5 * up_j * v[j + 1]
            if j > 0:
                rhs[j] = rhs[j] + 0.5 * lower * v[j - 1]
            if plain:
                absq = vm[j].real * vm[j].real + vm[j].imag * vm[j].imag
                gj = 1j * absq * dvm[j]
                rhs[j] = rhs[j] + gj
        rhs[n - 1] = 0.0

        # Thomas solve of (i/dt - H/2) with Dirichlet clamp in the last row.
        denom = idt - 0.5 * diag[0]
        cp[0] = (-0.5 * upper0) / denom
        rhs[0] = rhs[0] / denom
        for j in range(1, n - 1):
            lo_j = -0.5 * lower
            denom = (idt - 0.5 * diag[j]) - lo_j * cp[j - 1]
            cp[j] = (-0.5 * upper) / denom
            rhs[j] = (rhs[j] - lo_j * rhs[j - 1]) / denom
        # clamp row: 0 * v_{n-2} + 1 * v_{n-1} = 0
        denom = 1.0
        rhs[n - 1] = 0.0

        change = 0.0
        bad = False
        for j in range(n - 2, -1, -1):
            rhs[j] = rhs[j] - cp[j] * rhs[j + 1]
        for j in range(n):
            mag = abs(rhs[j] - w_new[j])
            if mag > change:
                change = mag
            w_new[j] = rhs[j]
            if w_new[j] != w_new[j]:  # NaN check
                bad = True
        changes[k] = change
        if bad:
            for j in range(k, sweeps):
                changes[j] = np.inf
            break
    return np.asarray(w_new), np.asarray(changes)
