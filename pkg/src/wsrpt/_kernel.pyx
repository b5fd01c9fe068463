# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_purepy``: the subset dynamic program on int64.

The caller (``_backend``) guarantees the scaled inputs and the cost bound
fit in int64 and falls back to the pure implementation otherwise.
"""

from libc.stdlib cimport free, malloc


def subset_dp(list releases, list procs, list weights, int n):
    """Minimal scaled cost and realizing completion order; see ``_purepy``."""
    cdef int size = 1 << n
    cdef long long *r = <long long *> malloc(n * sizeof(long long))
    cdef long long *p = <long long *> malloc(n * sizeof(long long))
    cdef long long *w = <long long *> malloc(n * sizeof(long long))
    cdef int *by_release = <int *> malloc(n * sizeof(int))
    cdef long long *m = <long long *> malloc(size * sizeof(long long))
    cdef long long *f = <long long *> malloc(size * sizeof(long long))
    cdef signed char *last = <signed char *> malloc(size * sizeof(signed char))
    if not (r and p and w and by_release and m and f and last):
        free(r); free(p); free(w); free(by_release); free(m); free(f); free(last)
        raise MemoryError()

    cdef int i, j, k, tmp
    cdef int s
    cdef long long t, ms, cand, best
    cdef int best_j
    try:
        for i in range(n):
            r[i] = releases[i]
            p[i] = procs[i]
            w[i] = weights[i]
            by_release[i] = i
        # insertion sort by (release, index); n is tiny
        for i in range(1, n):
            k = i
            while k > 0 and r[by_release[k - 1]] > r[by_release[k]]:
                tmp = by_release[k - 1]
                by_release[k - 1] = by_release[k]
                by_release[k] = tmp
                k -= 1

        m[0] = 0
        for s in range(1, size):
            t = 0
            for i in range(n):
                j = by_release[i]
                if s >> j & 1:
                    if r[j] > t:
                        t = r[j]
                    t += p[j]
            m[s] = t

        f[0] = 0
        for s in range(1, size):
            ms = m[s]
            best = -1
            best_j = -1
            for j in range(n):
                if s >> j & 1:
                    cand = w[j] * ms + f[s & ~(1 << j)]
                    if best < 0 or cand < best:
                        best = cand
                        best_j = j
            f[s] = best
            last[s] = <signed char> best_j

        order = []
        s = size - 1
        while s:
            j = last[s]
            order.append(j)
            s &= ~(1 << j)
        order.reverse()
        return f[size - 1], tuple(order)
    finally:
        free(r); free(p); free(w); free(by_release); free(m); free(f); free(last)
