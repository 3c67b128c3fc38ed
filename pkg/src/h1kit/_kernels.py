"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Three inner loops dominate runtime across the package:

* ``howell_reduce`` -- in-place Howell-form row reduction over Z/m, the
  engine behind every span, kernel and quotient computation;
* ``nab_enumerate`` -- generator-value enumeration of nonabelian 1-cocycle
  tables;
* ``abelian_enumerate`` -- full value-table enumeration of abelian
  1-cocycles (the brute-force oracle).

The backend is selected once at import time from the ``H1KIT_BACKEND``
environment variable: ``numba`` (default when importable), ``numpy`` for the
fallback, ``auto`` to prefer numba.  Both backends are exact integer code and
produce identical outputs; ``benchmarks/bench_backends.py`` compares them.

All matrices are int64 and row-convention: vectors are rows, maps multiply on
the right.  Moduli must satisfy 2 <= m < 2**31 so that intermediate products
stay inside int64.
"""

import os

import numpy as np

_ENV = os.environ.get("H1KIT_BACKEND", "auto").lower()
if _ENV not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"H1KIT_BACKEND must be auto|numba|numpy, got {_ENV!r}")

_HAVE_NUMBA = False
if _ENV in ("auto", "numba"):
    try:
        from numba import njit as _njit

        _HAVE_NUMBA = True
    except ImportError:
        if _ENV == "numba":
            raise
        _HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# Loop implementations (numba-compatible subset of Python).
# ---------------------------------------------------------------------------


def _howell_loops(work, m, nrows, main_cols):
    """Two-phase Howell reduction, in place.

    Phase 1 runs a gcd-transform echelon sweep over the first ``main_cols``
    columns, normalizing every pivot to a divisor of m by a unit and
    appending the annihilator row (m // pivot) * row at pivot creation; a
    pivot row is frozen once created.  Phase 2 reduces entries above each
    pivot into [0, pivot).  Row operations act on the full width, so trailing
    columns may carry an augmentation.

    Returns (r, nrows) where rows [0, r) are the Howell rows (pivot columns
    strictly increasing) and rows [r, nrows) are zero on the main columns.
    ``work`` must have at least main_cols spare rows below ``nrows``.
    """
    ncols = work.shape[1]
    r = 0
    for j in range(main_cols):
        if r >= nrows:
            break
        for i in range(r + 1, nrows):
            b = work[i, j]
            if b == 0:
                continue
            a = work[r, j]
            # extended gcd: g = s*a + t*b
            r0, r1 = a, b
            s0, s1 = 1, 0
            t0, t1 = 0, 1
            while r1 != 0:
                q = r0 // r1
                r0, r1 = r1, r0 - q * r1
                s0, s1 = s1, s0 - q * s1
                t0, t1 = t1, t0 - q * t1
            g = r0
            sm = s0 % m
            tm = t0 % m
            um = (-(b // g)) % m
            vm = (a // g) % m
            for k in range(ncols):
                wr = work[r, k]
                wi = work[i, k]
                work[r, k] = (sm * wr + tm * wi) % m
                work[i, k] = (um * wr + vm * wi) % m
        a = work[r, j]
        if a == 0:
            continue
        # normalize the pivot to gcd(a, m) via a unit
        g0, g1 = a, m
        while g1 != 0:
            g0, g1 = g1, g0 % g1
        d = g0
        s = a // d
        step = m // d
        while True:
            c0, c1 = s, m
            while c1 != 0:
                c0, c1 = c1, c0 % c1
            if c0 == 1:
                break
            s += step
        # u = s^{-1} mod m
        r0, r1 = s % m, m
        s0, s1 = 1, 0
        while r1 != 0:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        u = s0 % m
        for k in range(ncols):
            work[r, k] = (u * work[r, k]) % m
        # annihilator row keeps the span Howell-closed
        if d > 1:
            c = m // d
            nonzero = False
            for k in range(ncols):
                v = (c * work[r, k]) % m
                work[nrows, k] = v
                if v != 0:
                    nonzero = True
            if nonzero:
                nrows += 1
            else:
                for k in range(ncols):
                    work[nrows, k] = 0
        r += 1
    # phase 2: reduce above the pivots, left to right
    for i in range(r):
        jp = 0
        while work[i, jp] == 0:
            jp += 1
        d = work[i, jp]
        for i2 in range(i):
            q = work[i2, jp] // d
            if q != 0:
                for k in range(ncols):
                    work[i2, k] = (work[i2, k] - q * work[i, k]) % m
    return r, nrows


def _nab_enumerate_loops(mul_g, act, mul_gamma, steps_elem, steps_gen,
                         steps_parent, gen_elems, out):
    """Enumerate nonabelian 1-cocycle tables by generator values.

    Candidates assign each generator of the acting group an arbitrary target
    element, propagate along the BFS steps via a_{s p} = a_s * s(a_p), and
    keep tables satisfying the cocycle identity on every pair.  Writes up to
    out.shape[0] tables and returns the total number of valid tables.
    """
    t = mul_gamma.shape[0]
    n_g = mul_g.shape[0]
    k = gen_elems.shape[0]
    nsteps = steps_elem.shape[0]
    digits = np.zeros(k, np.int64)
    values = np.zeros(t, np.int64)
    total = 1
    for j in range(k):
        total *= n_g
    nsol = 0
    for _c in range(total):
        values[0] = 0
        for j in range(k):
            values[gen_elems[j]] = digits[j]
        for sidx in range(nsteps):
            s_elem = gen_elems[steps_gen[sidx]]
            p = steps_parent[sidx]
            values[steps_elem[sidx]] = mul_g[values[s_elem], act[s_elem, values[p]]]
        ok = True
        for i in range(t):
            for j2 in range(t):
                if values[mul_gamma[i, j2]] != mul_g[values[i], act[i, values[j2]]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            if nsol < out.shape[0]:
                for x in range(t):
                    out[nsol, x] = values[x]
            nsol += 1
        for j in range(k):
            digits[j] += 1
            if digits[j] < n_g:
                break
            digits[j] = 0
    return nsol


def _abelian_enumerate_loops(mats, mul_gamma, mods, out):
    """Enumerate abelian 1-cocycle value tables by brute force.

    ``mats[g]`` is the left action of g as a row-convention matrix, ``mods``
    the per-coordinate moduli of the module.  Unknowns are the values on the
    nonidentity elements, flattened as (element-1)*r + coord.  Returns the
    number of tables satisfying a_{gh} = a_g + g.a_h on all pairs, writing up
    to out.shape[0] of them.
    """
    t = mul_gamma.shape[0]
    r = mods.shape[0]
    n_unknown = (t - 1) * r
    digits = np.zeros(n_unknown, np.int64)
    values = np.zeros((t, r), np.int64)
    total = 1
    for i in range(n_unknown):
        total *= mods[i % r]
    nsol = 0
    for _c in range(total):
        for g in range(1, t):
            for k in range(r):
                values[g, k] = digits[(g - 1) * r + k]
        ok = True
        for i in range(t):
            if not ok:
                break
            for j in range(t):
                gh = mul_gamma[i, j]
                bad = False
                for k in range(r):
                    acc = values[i, k]
                    for k2 in range(r):
                        acc += values[j, k2] * mats[i, k2, k]
                    if (acc - values[gh, k]) % mods[k] != 0:
                        bad = True
                        break
                if bad:
                    ok = False
                    break
        if ok:
            if nsol < out.shape[0]:
                for g in range(1, t):
                    for k in range(r):
                        out[nsol, (g - 1) * r + k] = values[g, k]
            nsol += 1
        for i in range(n_unknown):
            digits[i] += 1
            if digits[i] < mods[i % r]:
                break
            digits[i] = 0
    return nsol


# ---------------------------------------------------------------------------
# Pure-numpy fallbacks (vectorized row operations / pair checks).
# ---------------------------------------------------------------------------


def _howell_numpy(work, m, nrows, main_cols):
    """Vectorized twin of :func:`_howell_loops`; identical output."""
    r = 0
    for j in range(main_cols):
        if r >= nrows:
            break
        for i in range(r + 1, nrows):
            b = int(work[i, j])
            if b == 0:
                continue
            a = int(work[r, j])
            g, s, t = _egcd(a, b)
            sm, tm = s % m, t % m
            um, vm = (-(b // g)) % m, (a // g) % m
            wr = work[r].copy()
            work[r] = (sm * wr + tm * work[i]) % m
            work[i] = (um * wr + vm * work[i]) % m
        a = int(work[r, j])
        if a == 0:
            continue
        u, d = _unit_for(a, m)
        work[r] = (u * work[r]) % m
        if d > 1:
            ann = ((m // d) * work[r]) % m
            if ann.any():
                work[nrows] = ann
                nrows += 1
        r += 1
    for i in range(r):
        jp = int(np.flatnonzero(work[i])[0])
        d = int(work[i, jp])
        for i2 in range(i):
            q = int(work[i2, jp]) // d
            if q:
                work[i2] = (work[i2] - q * work[i]) % m
    return r, nrows


def _egcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0 for a,b >= 0."""
    r0, r1, s0, s1, t0, t1 = a, b, 1, 0, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def _unit_for(a, m):
    """Return (u, d) with u a unit mod m and (u * a) % m == d == gcd(a, m)."""
    import math

    d = math.gcd(a, m)
    s = a // d
    step = m // d
    while math.gcd(s, m) != 1:
        s += step
    _g, inv, _t = _egcd(s % m, m)
    return inv % m, d


def _nab_enumerate_numpy(mul_g, act, mul_gamma, steps_elem, steps_gen,
                         steps_parent, gen_elems, out):
    t = mul_gamma.shape[0]
    n_g = mul_g.shape[0]
    k = len(gen_elems)
    values = np.zeros(t, np.int64)
    rows = np.arange(t)
    nsol = 0
    digits = np.zeros(k, np.int64)
    total = n_g ** k
    for _c in range(total):
        values[0] = 0
        values[gen_elems] = digits
        for sidx in range(len(steps_elem)):
            s_elem = gen_elems[steps_gen[sidx]]
            p = steps_parent[sidx]
            values[steps_elem[sidx]] = mul_g[values[s_elem], act[s_elem, values[p]]]
        acted = act[rows[:, None], values[None, :]]
        rhs = mul_g[values[:, None], acted]
        if np.array_equal(values[mul_gamma], rhs):
            if nsol < out.shape[0]:
                out[nsol] = values
            nsol += 1
        for j in range(k):
            digits[j] += 1
            if digits[j] < n_g:
                break
            digits[j] = 0
    return nsol


def _abelian_enumerate_numpy(mats, mul_gamma, mods, out):
    t = mul_gamma.shape[0]
    r = len(mods)
    n_unknown = (t - 1) * r
    mods_flat = np.tile(mods, t - 1)
    digits = np.zeros(n_unknown, np.int64)
    total = int(np.prod(mods_flat)) if n_unknown else 1
    nsol = 0
    for _c in range(total):
        values = np.zeros((t, r), np.int64)
        values[1:] = digits.reshape(t - 1, r)
        rhs = values[:, None, :] + np.einsum("jl,ilk->ijk", values, mats)
        diff = (rhs - values[mul_gamma]) % mods[None, None, :]
        if not diff.any():
            if nsol < out.shape[0]:
                out[nsol] = digits
            nsol += 1
        for i in range(n_unknown):
            digits[i] += 1
            if digits[i] < mods_flat[i]:
                break
            digits[i] = 0
    return nsol


# ---------------------------------------------------------------------------
# Backend wiring.
# ---------------------------------------------------------------------------

_NUMPY_IMPLS = {
    "howell_reduce": _howell_numpy,
    "nab_enumerate": _nab_enumerate_numpy,
    "abelian_enumerate": _abelian_enumerate_numpy,
}

if _HAVE_NUMBA:
    _NUMBA_IMPLS = {
        "howell_reduce": _njit(cache=True, nogil=True)(_howell_loops),
        "nab_enumerate": _njit(cache=True, nogil=True)(_nab_enumerate_loops),
        "abelian_enumerate": _njit(cache=True, nogil=True)(_abelian_enumerate_loops),
    }
else:
    _NUMBA_IMPLS = None

if _HAVE_NUMBA and _ENV in ("auto", "numba"):
    BACKEND = "numba"
    _ACTIVE = _NUMBA_IMPLS
else:
    BACKEND = "numpy"
    _ACTIVE = _NUMPY_IMPLS

howell_reduce = _ACTIVE["howell_reduce"]
nab_enumerate = _ACTIVE["nab_enumerate"]
abelian_enumerate = _ACTIVE["abelian_enumerate"]


def backend_name():
    """Name of the active kernel backend ("numba" or "numpy")."""
    return BACKEND


def implementations():
    """All available backends, keyed by name; used by tests and benchmarks."""
    impls = {"numpy": _NUMPY_IMPLS}
    if _NUMBA_IMPLS is not None:
        impls["numba"] = _NUMBA_IMPLS
    return impls
