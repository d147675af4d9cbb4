# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded isotropic search on int64 Gram matrices."""

from libc.math cimport sqrt
from libc.stdlib cimport malloc, free


cdef inline int _isqrt_exact(long long D, long long *out):
    cdef long long s
    if D < 0:
        return 0
    s = <long long> sqrt(<double> D)
    while s > 0 and s * s > D:
        s -= 1
    while (s + 1) * (s + 1) <= D:
        s += 1
    out[0] = s
    return s * s == D


def box_search(G, long long H):
    """Same contract as the pure-Python ``box_search``.

    The caller guarantees every intermediate fits in int64.
    """
    cdef int k = len(G)
    cdef int i, j, pos, nroots
    cdef long long a, b, c, s, lead, t, num, D, r0, r1, tmp
    cdef long long *g
    cdef long long *x
    cdef long long roots[2]
    if k == 1:
        return (1,) if int(G[0][0]) == 0 else None
    g = <long long *> malloc(k * k * sizeof(long long))
    x = <long long *> malloc(k * sizeof(long long))
    try:
        for i in range(k):
            for j in range(k):
                g[i * k + j] = G[i][j]
        a = g[(k - 1) * k + (k - 1)]
        for i in range(k - 1):
            x[i] = -H
        while True:
            lead = 0
            for i in range(k - 1):
                if x[i] != 0:
                    lead = x[i]
                    break
            if lead >= 0:
                b = 0
                c = 0
                for i in range(k - 1):
                    if x[i] != 0:
                        b += g[(k - 1) * k + i] * x[i]
                        s = 0
                        for j in range(k - 1):
                            s += g[i * k + j] * x[j]
                        c += x[i] * s
                nroots = 0
                if a == 0:
                    if b == 0:
                        if c == 0:
                            # every t works; smallest admissible one
                            t = -H if lead != 0 else 1
                            roots[0] = t
                            nroots = 1
                    else:
                        num = -c
                        if num % (2 * b) == 0:
                            t = num / (2 * b)
                            if -H <= t <= H:
                                roots[0] = t
                                nroots = 1
                else:
                    D = b * b - a * c
                    if _isqrt_exact(D, &s):
                        num = -b - s
                        if num % a == 0:
                            t = num / a
                            if -H <= t <= H:
                                roots[nroots] = t
                                nroots += 1
                        num = -b + s
                        if s != 0 and num % a == 0:
                            t = num / a
                            if -H <= t <= H:
                                roots[nroots] = t
                                nroots += 1
                        if nroots == 2 and roots[0] > roots[1]:
                            tmp = roots[0]
                            roots[0] = roots[1]
                            roots[1] = tmp
                for i in range(nroots):
                    t = roots[i]
                    if lead == 0 and t <= 0:
                        continue
                    return tuple([x[j] for j in range(k - 1)] + [t])
            # odometer, last coordinate fastest
            pos = k - 2
            while pos >= 0 and x[pos] == H:
                x[pos] = -H
                pos -= 1
            if pos < 0:
                return None
            x[pos] += 1
    finally:
        free(g)
        free(x)
