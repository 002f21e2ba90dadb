# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the phase-shifter coordinate ascent."""

from libc.math cimport hypot


def update_column(double complex[:, ::1] g, double complex[::1] x):
    """Sequentially re-phase every entry of `x` against the quadratic form `g`.

    Entry ``i`` becomes ``eta / |eta|`` with ``eta = sum_{l != i} g[i, l] x[l]``,
    or 1 when ``eta`` vanishes. Updates are in place and use already-updated
    entries, i.e. one Gauss-Seidel pass.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, l
    cdef double complex eta
    cdef double mag
    if g.shape[0] != n or g.shape[1] != n:
        raise ValueError("g must be square and match len(x)")
    for i in range(n):
        eta = 0
        for l in range(n):
            if l != i:
                eta = eta + g[i, l] * x[l]
        mag = hypot(eta.real, eta.imag)
        if mag > 0:
            x[i] = eta / mag
        else:
            x[i] = 1
