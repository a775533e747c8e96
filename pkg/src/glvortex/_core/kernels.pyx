# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels: gauged five-point hops and the fused operators.

Semantics match _core.fallback exactly; test_kernels checks the two backends
against each other. Neighbor terms at the four domain edges are doubled,
which folds the natural (magnetic Neumann) boundary condition into the rows.
"""

import numpy as np

cimport numpy as cnp

ctypedef double complex cplx


cdef inline cplx _hop_sum(const cplx[:, ::1] psi,
                          const cplx[:, ::1] ux,
                          const cplx[:, ::1] uy,
                          Py_ssize_t a, Py_ssize_t b, Py_ssize_t n) noexcept nogil:
    cdef cplx acc = 0
    if a < n:
        acc += (2.0 if a == 0 else 1.0) * ux[a, b] * psi[a + 1, b]
    if a > 0:
        acc += (2.0 if a == n else 1.0) * ux[a - 1, b].conjugate() * psi[a - 1, b]
    if b < n:
        acc += (2.0 if b == 0 else 1.0) * uy[a, b] * psi[a, b + 1]
    if b > 0:
        acc += (2.0 if b == n else 1.0) * uy[a, b - 1].conjugate() * psi[a, b - 1]
    return acc


def kinetic_apply(cnp.ndarray[cplx, ndim=2] psi,
                  cnp.ndarray[cplx, ndim=2] ux,
                  cnp.ndarray[cplx, ndim=2] uy,
                  double h):
    """Gauged second-difference sum; discretizes -(grad - iA)^2 and is PSD."""
    cdef Py_ssize_t n = psi.shape[0] - 1, a, b
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty_like(psi)
    cdef const cplx[:, ::1] p = psi, vx = ux, vy = uy
    cdef cplx[:, ::1] o = out
    cdef double ih2 = 1.0 / (h * h)
    with nogil:
        for a in range(n + 1):
            for b in range(n + 1):
                o[a, b] = (4.0 * p[a, b] - _hop_sum(p, vx, vy, a, b, n)) * ih2
    return out


def residual_field(cnp.ndarray[cplx, ndim=2] psi,
                   cnp.ndarray[cplx, ndim=2] ux,
                   cnp.ndarray[cplx, ndim=2] uy,
                   double h):
    """kinetic(psi) - psi (1 - |psi|^2)."""
    cdef Py_ssize_t n = psi.shape[0] - 1, a, b
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty_like(psi)
    cdef const cplx[:, ::1] p = psi, vx = ux, vy = uy
    cdef cplx[:, ::1] o = out
    cdef double ih2 = 1.0 / (h * h)
    cdef cplx z
    cdef double m2
    with nogil:
        for a in range(n + 1):
            for b in range(n + 1):
                z = p[a, b]
                m2 = z.real * z.real + z.imag * z.imag
                o[a, b] = (4.0 * z - _hop_sum(p, vx, vy, a, b, n)) * ih2 - z * (1.0 - m2)
    return out


def jacobian_field(cnp.ndarray[cplx, ndim=2] psi,
                   cnp.ndarray[cplx, ndim=2] phi,
                   cnp.ndarray[cplx, ndim=2] ux,
                   cnp.ndarray[cplx, ndim=2] uy,
                   double h):
    """kinetic(phi) + (2|psi|^2 - 1) phi + psi^2 conj(phi); real-linear in phi."""
    cdef Py_ssize_t n = psi.shape[0] - 1, a, b
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty_like(psi)
    cdef const cplx[:, ::1] p = psi, f = phi, vx = ux, vy = uy
    cdef cplx[:, ::1] o = out
    cdef double ih2 = 1.0 / (h * h)
    cdef cplx z, w
    cdef double m2
    with nogil:
        for a in range(n + 1):
            for b in range(n + 1):
                z = p[a, b]
                w = f[a, b]
                m2 = z.real * z.real + z.imag * z.imag
                o[a, b] = ((4.0 * w - _hop_sum(f, vx, vy, a, b, n)) * ih2
                           + (2.0 * m2 - 1.0) * w + z * z * w.conjugate())
    return out


def dmu_field(cnp.ndarray[cplx, ndim=2] psi,
              cnp.ndarray[cplx, ndim=2] dux,
              cnp.ndarray[cplx, ndim=2] duy,
              double h):
    """mu-derivative of the kinetic term: hop sum with the link derivatives."""
    cdef Py_ssize_t n = psi.shape[0] - 1, a, b
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty_like(psi)
    cdef const cplx[:, ::1] p = psi, vx = dux, vy = duy
    cdef cplx[:, ::1] o = out
    cdef double ih2 = 1.0 / (h * h)
    with nogil:
        for a in range(n + 1):
            for b in range(n + 1):
                o[a, b] = -_hop_sum(p, vx, vy, a, b, n) * ih2
    return out
