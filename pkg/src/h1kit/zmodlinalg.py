"""Exact linear algebra over Z/m: Howell forms, kernels, quotient structure.

Conventions, fixed project-wide: vectors are rows, maps act on the right
(x @ M), and the modulus m satisfies 2 <= m < 2**31.  The Howell normal form
is the primary canonical form because row spans over Z/m with zero divisors
need Howell uniqueness; Smith invariant factors are derived from an exact
integer computation when a group structure is required.

Finite abelian structure is computed by lifting to integer lattices:
span(gens)/span(rels) in (Z/m)^n equals L_G/L_R for the integer lattices
generated by the lifted rows together with m*I, and the Smith normal form of
the relation coordinates in a Hermite basis of L_G yields invariant factors,
generator representatives and canonical coset labels.

Everything here is pure and operates on immutable inputs; results are
deterministic.
"""

from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

from . import _kernels
from ._kernels import _egcd, _unit_for
from .errors import RelationNotInSpan

MAX_MODULUS = 2 ** 31


def _as_array(a, m, ncols=None):
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.size == 0:
        arr = arr.reshape(0, ncols if ncols is not None else arr.shape[-1] if arr.ndim == 2 else 0)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    return arr % m


@dataclass(frozen=True)
class ResidueMatrix:
    """A matrix over Z/m with entries reduced into [0, m)."""

    modulus: int
    array: np.ndarray

    def __post_init__(self):
        if not 2 <= self.modulus < MAX_MODULUS:
            raise ValueError(f"modulus must be in [2, 2^31), got {self.modulus}")
        arr = np.asarray(self.array, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("entries must form a 2-d matrix")
        if arr.size and (arr.min() < 0 or arr.max() >= self.modulus):
            raise ValueError("entries must lie in [0, modulus)")
        object.__setattr__(self, "array", arr)
        self.array.setflags(write=False)

    @classmethod
    def from_rows(cls, rows, m):
        return cls(m, _as_array(rows, m))

    @classmethod
    def identity(cls, n, m):
        return cls(m, np.eye(n, dtype=np.int64) % m)

    @property
    def rows(self):
        return self.array.shape[0]

    @property
    def cols(self):
        return self.array.shape[1]


# ---------------------------------------------------------------------------
# Howell machinery (Z/m side).
# ---------------------------------------------------------------------------


def howell(mat, m):
    """Howell normal form of the row span of ``mat`` over Z/m.

    Returns only the nonzero rows, pivot columns strictly increasing, pivots
    dividing m, entries above each pivot reduced into [0, pivot).  Unique for
    a fixed row span.
    """
    mat = _as_array(mat, m)
    nr, nc = mat.shape
    work = np.zeros((nr + nc + 1, nc), dtype=np.int64)
    work[:nr] = mat
    r, _ = _kernels.howell_reduce(work, m, nr, nc)
    return work[:r].copy()


def howell_augmented(mat, m):
    """Howell-reduce [mat | I], pivoting only on the mat columns.

    Returns (H, U, K): H the Howell form of the span of ``mat``, U with
    U @ mat == H (mod m) row by row, and K whose rows generate the left
    kernel {x : x @ mat == 0 mod m}.
    """
    mat = _as_array(mat, m)
    nr, nc = mat.shape
    width = nc + nr
    work = np.zeros((nr + nc + 1, width), dtype=np.int64)
    work[:nr, :nc] = mat
    work[:nr, nc:] = np.eye(nr, dtype=np.int64) % m
    r, ntot = _kernels.howell_reduce(work, m, nr, nc)
    h = work[:r, :nc].copy()
    u = work[:r, nc:].copy()
    tail = work[r:ntot, nc:]
    k = tail[tail.any(axis=1)].copy()
    return h, u, k


def canonical_form(mat):
    """Howell normal form with a transformation witness.

    Accepts a ResidueMatrix and returns (H, U) as ResidueMatrix with
    U @ M == H mod m; the row span of H equals that of M.
    """
    m = mat.modulus
    h, u, _ = howell_augmented(mat.array, m)
    return ResidueMatrix(m, h), ResidueMatrix(m, u)


def pivot_positions(h):
    """(column, value) of each pivot of a Howell-form matrix."""
    out = []
    for row in h:
        nz = np.flatnonzero(row)
        out.append((int(nz[0]), int(row[nz[0]])))
    return out


def span_order(h, m):
    """Number of elements of the row span of a Howell-form matrix."""
    n = 1
    for _, d in pivot_positions(h):
        n *= m // d
    return n


def reduce_mod_span(v, h, m):
    """Canonical representative of v modulo the span of Howell-form h.

    Two vectors reduce to the same representative iff they differ by an
    element of the span.
    """
    v = np.asarray(v, dtype=np.int64) % m
    out = v.copy()
    for i, (j, d) in enumerate(pivot_positions(h)):
        q = int(out[j]) // d
        if q:
            out = (out - q * h[i]) % m
    return out


def in_span(v, h, m):
    """Membership of v in the row span of Howell-form h."""
    return not reduce_mod_span(v, h, m).any()


def reduce_mod_span_coeffs(v, h, m):
    """Like reduce_mod_span but also return the coefficient row q with
    v == q @ h + reduced (mod m)."""
    v = np.asarray(v, dtype=np.int64) % m
    out = v.copy()
    q = np.zeros(h.shape[0], dtype=np.int64)
    for i, (j, d) in enumerate(pivot_positions(h)):
        qi = int(out[j]) // d
        if qi:
            out = (out - qi * h[i]) % m
        q[i] = qi % m
    return out, q


# ---------------------------------------------------------------------------
# Integer Smith form (small inputs only; used for canonicalizing chains).
# ---------------------------------------------------------------------------


def smith_normal_form(a):
    """Smith normal form over Z with transforms.

    Returns (d, u, v, vinv) where u @ a @ v == diag(d), u and v unimodular,
    vinv == v^{-1}, and d is the divisibility chain d'_1 | d'_2 | ...
    """
    a = [list(map(int, row)) for row in a]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]
    vinv = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_sub(i, i2, q):
        a[i] = [x - q * y for x, y in zip(a[i], a[i2])]
        u[i] = [x - q * y for x, y in zip(u[i], u[i2])]

    def row_swap(i, i2):
        a[i], a[i2] = a[i2], a[i]
        u[i], u[i2] = u[i2], u[i]

    def col_sub(j, j2, q):
        # col_j -= q * col_j2; record in v, undo in vinv (row_j2 += q * row_j)
        for i in range(nr):
            a[i][j] -= q * a[i][j2]
        for i in range(nc):
            v[i][j] -= q * v[i][j2]
        vinv[j2] = [x + q * y for x, y in zip(vinv[j2], vinv[j])]

    def col_swap(j, j2):
        for i in range(nr):
            a[i][j], a[i][j2] = a[i][j2], a[i][j]
        for i in range(nc):
            v[i][j], v[i][j2] = v[i][j2], v[i][j]
        vinv[j], vinv[j2] = vinv[j2], vinv[j]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] != 0:
                    key = (abs(a[i][j]), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        while True:
            dirty = False
            for i in range(t + 1, nr):
                while a[i][t] != 0:
                    dirty = True
                    q = a[i][t] // a[t][t]
                    if q:
                        row_sub(i, t, q)
                    if a[i][t] != 0:
                        row_swap(t, i)
            for j in range(t + 1, nc):
                while a[t][j] != 0:
                    dirty = True
                    q = a[t][j] // a[t][t]
                    if q:
                        col_sub(j, t, q)
                    if a[t][j] != 0:
                        col_swap(t, j)
            if not dirty:
                break
        # enforce divisibility of the remaining block by the pivot
        fix = None
        d = a[t][t]
        if d != 0:
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % d:
                        fix = i
                        break
                if fix is not None:
                    break
        if fix is not None:
            row_sub(t, fix, -1)
            continue
        if d < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    diag = [a[i][i] for i in range(min(nr, nc))]
    return diag, u, v, vinv


# ---------------------------------------------------------------------------
# Abelian structure of spans and quotients.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianStructure:
    """Invariant factors d1 | d2 | ... (each >= 2) with generator rows."""

    invariant_factors: tuple
    generator_reps: np.ndarray

    def __post_init__(self):
        for d1, d2 in zip(self.invariant_factors, self.invariant_factors[1:]):
            assert d2 % d1 == 0, "invariant factors must form a divisibility chain"
        assert all(d >= 2 for d in self.invariant_factors)

    @property
    def order(self):
        return prod(self.invariant_factors)

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def _congruence_quotient(b, piv, m):
    """q with b == q * piv (mod m), or None when no such q exists."""
    g = gcd(piv, m)
    if b % g:
        return None
    mm = m // g
    if mm == 1:
        return 0
    return ((b // g) * pow((piv // g) % mm, -1, mm)) % mm


def smith_normal_form_mod(a, m, ncols):
    """Diagonalize a matrix over Z/m by unimodular row and column transforms.

    Returns (diag, v, vinv) with diag a list of ``ncols`` divisors of m
    forming a divisibility chain (free coordinates report m), and v, vinv the
    mutually inverse column transforms; row transforms are not tracked.
    Entries stay bounded by m throughout.
    """
    a = np.asarray(a, dtype=np.int64).reshape(-1, ncols) % m
    a = a.copy()
    nr = a.shape[0]
    v = np.eye(ncols, dtype=np.int64) % m
    vinv = np.eye(ncols, dtype=np.int64) % m
    t = 0
    while t < min(nr, ncols):
        block = a[t:, t:]
        if not block.any():
            break
        keys = np.gcd(block, m)
        keys[block == 0] = m + 1
        flat = int(np.argmin(keys))
        bi, bj = divmod(flat, keys.shape[1])
        bi += t
        bj += t
        if bi != t:
            a[[t, bi]] = a[[bi, t]]
        if bj != t:
            a[:, [t, bj]] = a[:, [bj, t]]
            v[:, [t, bj]] = v[:, [bj, t]]
            vinv[[t, bj]] = vinv[[bj, t]]
        while True:
            for i in range(t + 1, nr):
                b = int(a[i, t])
                if b == 0:
                    continue
                piv = int(a[t, t])
                q = _congruence_quotient(b, piv, m)
                if q is not None:
                    a[i] = (a[i] - q * a[t]) % m
                    continue
                g, s, tt = _egcd(piv, b)
                u, vv = -(b // g), piv // g
                rt = (s * a[t] + tt * a[i]) % m
                ri = (u * a[t] + vv * a[i]) % m
                a[t], a[i] = rt, ri
            dirty = False
            for j in range(t + 1, ncols):
                b = int(a[t, j])
                if b == 0:
                    continue
                piv = int(a[t, t])
                q = _congruence_quotient(b, piv, m)
                if q is not None:
                    # col_j -= q * col_t leaves the pivot column untouched
                    a[:, j] = (a[:, j] - q * a[:, t]) % m
                    v[:, j] = (v[:, j] - q * v[:, t]) % m
                    vinv[t] = (vinv[t] + q * vinv[j]) % m
                    continue
                g, s, tt = _egcd(piv, b)
                u, vv = -(b // g), piv // g
                ct = (s * a[:, t] + tt * a[:, j]) % m
                cj = (u * a[:, t] + vv * a[:, j]) % m
                a[:, t], a[:, j] = ct, cj
                vt = (s * v[:, t] + tt * v[:, j]) % m
                vj = (u * v[:, t] + vv * v[:, j]) % m
                v[:, t], v[:, j] = vt, vj
                # inverse of [[s, u], [tt, vv]] is [[vv, -u], [-tt, s]]
                it = (vv * vinv[t] - u * vinv[j]) % m
                ij = (-tt * vinv[t] + s * vinv[j]) % m
                vinv[t], vinv[j] = it, ij
                dirty = True
            if not dirty or not a[t + 1:, t].any():
                break
        u_pivot, d = _unit_for(int(a[t, t]), m)
        a[t] = (u_pivot * a[t]) % m
        fix = None
        for i in range(t + 1, nr):
            for j in range(t + 1, ncols):
                if int(a[i, j]) % d:
                    fix = j
                    break
            if fix is not None:
                break
        if fix is not None:
            a[:, t] = (a[:, t] + a[:, fix]) % m
            v[:, t] = (v[:, t] + v[:, fix]) % m
            vinv[fix] = (vinv[fix] - vinv[t]) % m
            continue
        t += 1
    diag = []
    for i in range(ncols):
        val = int(a[i, i]) if i < min(nr, ncols) else 0
        diag.append(gcd(val, m) if val else m)
    return diag, v, vinv


@dataclass
class QuotientStructure:
    """span(gens)/span(rels) in (Z/m)^n with canonical coset labels.

    Internally the quotient is presented as (Z/m)^g / W for g the number of
    generator rows and W the coefficient preimage of span(rels); a Smith
    reduction of W over Z/m yields invariant factors, generator
    representatives and labels bounded by m throughout.
    """

    modulus: int
    ambient_dim: int
    structure: AbelianStructure
    _gens: np.ndarray = field(repr=False)
    _h_gens: np.ndarray = field(repr=False)
    _u_gens: np.ndarray = field(repr=False)
    _v: np.ndarray = field(repr=False)
    _vinv: np.ndarray = field(repr=False)
    _factors: list = field(repr=False)
    _kept: list = field(repr=False)

    @property
    def order(self):
        return self.structure.order

    def contains(self, x):
        """Whether x lies in span(gens)."""
        return in_span(np.asarray(x, dtype=np.int64), self._h_gens, self.modulus)

    def normal_form(self, x):
        """Canonical label of x mod span(rels); x must lie in span(gens)."""
        reduced, q = reduce_mod_span_coeffs(x, self._h_gens, self.modulus)
        if reduced.any():
            raise ValueError("vector not in the span of the generators")
        c = (q @ self._u_gens) % self.modulus
        cc = (c @ self._v) % self.modulus
        return tuple(int(cc[j]) % self._factors[j] for j in self._kept)

    def rep(self, label):
        """An ambient representative whose normal_form is the given label."""
        assert len(label) == len(self._kept)
        cc = np.zeros(self._v.shape[0], dtype=np.int64)
        for val, j in zip(label, self._kept):
            cc[j] = int(val) % self._factors[j]
        c = (cc @ self._vinv) % self.modulus
        return (c @ self._gens) % self.modulus

    def elements(self):
        """Iterate all labels in deterministic odometer order."""
        dvec = [self._factors[j] for j in self._kept]
        if not dvec:
            yield ()
            return
        label = [0] * len(dvec)
        while True:
            yield tuple(label)
            for i in range(len(label)):
                label[i] += 1
                if label[i] < dvec[i]:
                    break
                label[i] = 0
            else:
                return


def quotient_structure(gens, rels, m):
    """Structure and canonical labels of span(gens)/span(rels) over Z/m.

    Raises RelationNotInSpan when rows of rels are outside span(gens).
    normal_form(x) == normal_form(y) iff x - y lies in span(rels).
    """
    gens = _as_array(gens, m)
    n = gens.shape[1]
    rels = _as_array(rels, m, ncols=n)
    h_g, u_g, _ = howell_augmented(gens, m)
    for row in rels:
        if not in_span(row, h_g, m):
            raise RelationNotInSpan("relation row outside the generator span")
    g_count = gens.shape[0]
    if g_count == 0:
        structure = AbelianStructure((), np.zeros((0, n), dtype=np.int64))
        return QuotientStructure(
            m, n, structure, gens, h_g, u_g,
            np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64),
            [], [])
    stack = np.vstack([gens, rels]) if rels.size else gens
    w = kernel_generators(stack, m)[:, :g_count]
    diag, v, vinv = smith_normal_form_mod(w, m, g_count)
    kept = [j for j, d in enumerate(diag) if d > 1]
    reps = []
    for j in kept:
        reps.append((vinv[j] @ gens) % m)
    reps = np.asarray(reps, dtype=np.int64).reshape(len(kept), n)
    structure = AbelianStructure(tuple(diag[j] for j in kept), reps)
    return QuotientStructure(m, n, structure, gens, h_g, u_g, v, vinv,
                             diag, kept)


def span_structure(gens, m):
    """AbelianStructure of the subgroup of (Z/m)^n spanned by gens."""
    gens = _as_array(gens, m)
    return quotient_structure(gens, np.zeros((0, gens.shape[1]), dtype=np.int64), m)


def kernel(mat):
    """Structure of the left kernel {x : x @ M == 0 mod m} of a ResidueMatrix."""
    _, _, k = howell_augmented(mat.array, mat.modulus)
    if k.shape[0] == 0:
        k = np.zeros((0, mat.rows), dtype=np.int64)
    return span_structure(k, mat.modulus).structure


def kernel_generators(mat, m):
    """Rows generating the left kernel of mat over Z/m (fast path, no SNF)."""
    _, _, k = howell_augmented(mat, m)
    if k.shape[0] == 0:
        k = np.zeros((0, np.asarray(mat).shape[0]), dtype=np.int64)
    return k


def lcm_list(values):
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
