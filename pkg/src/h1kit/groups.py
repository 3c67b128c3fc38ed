"""Finite groups: table/permutation/abelian/semidirect backends, subgroups,
bicyclic families, conjugacy data and semidirect products.

Element indices run 0..order-1 with the identity at index 0.  Abelian groups
are canonicalized to their invariant-factor chain d1 | d2 | ... and elements
are mixed-radix coordinate vectors.  Semidirect products A x| G encode the
pair (a, g) as a_index * |G| + g_index and never materialize a multiplication
table above the order cap; element-wise products, homomorphism application
and generator-level validation remain available at any order.

Groups are immutable after construction; all queries are safe to run
concurrently.
"""

import json
from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import CapExceeded, InvalidAction, InvalidTable, NotASubgroup, SpecParse
from .zmodlinalg import lcm_list, smith_normal_form

TABLE_CAP = 512


def canonical_chain(moduli):
    """Invariant-factor chain of the abelian group with the given moduli."""
    moduli = [int(d) for d in moduli if int(d) != 1]
    if any(d < 1 for d in moduli):
        raise SpecParse("abelian moduli must be positive integers")
    if not moduli:
        return ()
    diag, _u, _v, _vi = smith_normal_form(
        [[moduli[i] if i == j else 0 for j in range(len(moduli))]
         for i in range(len(moduli))])
    return tuple(d for d in diag if d > 1)


class FiniteGroup:
    """A finite group with one of the backends described in the module doc."""

    def __init__(self, backend, order, name, **data):
        self.backend = backend
        self.order = order
        self.name = name
        self._data = data
        self._table = data.get("table")
        self._inv = data.get("inv")
        self._generators = data.get("generators")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_table(cls, table, name="table-group", validate=True):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.ndim != 2 or table.shape != (n, n):
            raise InvalidTable("multiplication table must be square")
        if n == 0:
            raise InvalidTable("group cannot be empty")
        if n > TABLE_CAP:
            raise CapExceeded(f"table backend capped at order {TABLE_CAP}")
        if table.min() < 0 or table.max() >= n:
            raise InvalidTable("table entries must be element indices")
        if validate:
            _validate_axioms(table)
        inv = np.empty(n, dtype=np.int64)
        for i in range(n):
            js = np.flatnonzero(table[i] == 0)
            inv[i] = js[0]
        g = cls("table", n, name, table=table, inv=inv)
        return g

    @classmethod
    def from_perm_gens(cls, gens, name="perm-group", cap=TABLE_CAP):
        perms = []
        npoints = None
        for p in gens:
            p = tuple(int(x) for x in p)
            if npoints is None:
                npoints = len(p)
            if len(p) != npoints or sorted(p) != list(range(npoints)):
                raise SpecParse("permutation generators must be 0-based point images")
            perms.append(p)
        ident = tuple(range(npoints or 0))
        elems = [ident]
        index = {ident: 0}
        frontier = [ident]
        while frontier:
            cur = frontier.pop(0)
            for p in perms:
                new = tuple(p[cur[k]] for k in range(npoints))
                if new not in index:
                    if len(elems) >= cap:
                        raise CapExceeded("permutation closure exceeded the order cap")
                    index[new] = len(elems)
                    elems.append(new)
                    frontier.append(new)
        n = len(elems)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i, j] = index[tuple(a[b[k]] for k in range(npoints))]
        g = cls.from_table(table, name=name, validate=False)
        g._data["points"] = npoints
        g._data["perm_elems"] = elems
        g._generators = tuple(index[p] for p in perms)
        return g

    @classmethod
    def abelian(cls, moduli, name=None):
        chain = canonical_chain(moduli)
        order = prod(chain) if chain else 1
        name = name or ("C1" if not chain else "x".join(f"C{d}" for d in chain))
        g = cls("abelian", order, name, chain=chain)
        g._generators = tuple(g.abelian_index(np.eye(len(chain), dtype=np.int64)[i])
                              for i in range(len(chain)))
        return g

    @classmethod
    def trivial(cls):
        return cls.abelian([], name="C1")

    @classmethod
    def semidirect(cls, a_group, g_group, gen_mats, name=None):
        """A x| G from matrices (one per generator of G) acting on A's chain.

        Left action g.a computed as row-vector product a @ M_g, hence
        M_{gh} = M_h @ M_g.  The action must be by automorphisms; validated
        by extending to every element of G with consistency checks.
        """
        if a_group.backend != "abelian":
            raise InvalidAction("semidirect kernel must be an abelian-backend group")
        chain = a_group.invariants
        rank = len(chain)
        m = lcm_list(chain) if chain else 1
        mats = [np.asarray(mm, dtype=np.int64) % (m if m > 1 else 1)
                for mm in gen_mats]
        if len(mats) != len(g_group.generators):
            raise InvalidAction("need one action matrix per generator of the quotient")
        for mm in mats:
            if mm.shape != (rank, rank):
                raise InvalidAction("action matrix shape must match the kernel rank")
            _check_endomorphism(mm, chain, m)
        all_mats = extend_action(
            g_group,
            list(g_group.generators),
            mats,
            compose=lambda ms, mp: (mp @ ms) % m if m > 1 else mp,
            identity_val=np.eye(rank, dtype=np.int64) % (m if m > 1 else 1),
            eq=np.array_equal,
        )
        order = a_group.order * g_group.order
        name = name or f"({a_group.name})x|({g_group.name})"
        e = cls("semidirect", order, name,
                kernel=a_group, quotient=g_group,
                act=np.stack(all_mats) if g_group.order else None,
                modulus=m)
        e._generators = tuple(
            [a_idx * g_group.order for a_idx in a_group.generators]
            + [int(gg) for gg in g_group.generators])
        return e

    # -- core operations ---------------------------------------------------

    @property
    def identity(self):
        return 0

    def mul(self, i, j):
        if self.backend == "table":
            return int(self._table[i, j])
        if self.backend == "abelian":
            chain = self._data["chain"]
            a = self.abelian_vec(i)
            b = self.abelian_vec(j)
            return self.abelian_index([(x + y) % d for x, y, d in zip(a, b, chain)])
        a1, g1 = self.sd_split(i)
        a2, g2 = self.sd_split(j)
        av = self.kernel_group.abelian_vec(a1)
        bv = self.kernel_group.abelian_vec(a2)
        acted = self.sd_act_vec(g1, bv)
        chain = self.kernel_group.invariants
        s = [(x + y) % d for x, y, d in zip(av, acted, chain)]
        return self.sd_join(self.kernel_group.abelian_index(s),
                            self.quotient_group.mul(g1, g2))

    def inv(self, i):
        if self.backend == "table":
            return int(self._inv[i])
        if self.backend == "abelian":
            chain = self._data["chain"]
            a = self.abelian_vec(i)
            return self.abelian_index([(-x) % d for x, d in zip(a, chain)])
        a, g = self.sd_split(i)
        ginv = self.quotient_group.inv(g)
        av = self.kernel_group.abelian_vec(a)
        chain = self.kernel_group.invariants
        acted = self.sd_act_vec(ginv, av)
        return self.sd_join(self.kernel_group.abelian_index([(-x) % d for x, d in zip(acted, chain)]),
                            ginv)

    def power(self, i, k):
        out = 0
        base = i
        k = int(k)
        if k < 0:
            base = self.inv(i)
            k = -k
        for _ in range(k):
            out = self.mul(out, base)
        return out

    def element_order(self, i):
        k = 1
        cur = i
        while cur != 0:
            cur = self.mul(cur, i)
            k += 1
        return k

    def conj(self, g, x):
        """g x g^{-1}."""
        return self.mul(self.mul(g, x), self.inv(g))

    def mul_table(self):
        if self._table is not None:
            return self._table
        if self.order > TABLE_CAP:
            raise CapExceeded(
                f"order {self.order} group: multiplication table not materialized")
        table = np.empty((self.order, self.order), dtype=np.int64)
        for i in range(self.order):
            for j in range(self.order):
                table[i, j] = self.mul(i, j)
        self._table = table
        self._inv = np.array([np.flatnonzero(table[i] == 0)[0]
                              for i in range(self.order)], dtype=np.int64)
        return table

    @property
    def generators(self):
        if self._generators is None:
            self._generators = tuple(self._greedy_generators())
        return self._generators

    def _greedy_generators(self):
        gens = []
        reach = {0}
        for x in range(1, self.order):
            if x not in reach:
                gens.append(x)
                reach = _closure_set(self, gens)
                if len(reach) == self.order:
                    break
        return gens

    @property
    def is_abelian(self):
        if self.backend == "abelian":
            return True
        if self.backend == "semidirect":
            act = self._data["act"]
            ident = np.eye(act.shape[1], dtype=np.int64) % max(self._data["modulus"], 1)
            action_trivial = all(np.array_equal(a, ident) for a in act)
            return (self.kernel_group.is_abelian and self.quotient_group.is_abelian
                    and action_trivial)
        t = self._table
        return bool(np.array_equal(t, t.T))

    def label(self, i):
        if self.backend == "abelian":
            return "(" + ",".join(str(x) for x in self.abelian_vec(i)) + ")"
        if self.backend == "semidirect":
            a, g = self.sd_split(i)
            return f"({self.kernel_group.label(a)};{self.quotient_group.label(g)})"
        perms = self._data.get("perm_elems")
        if perms is not None:
            return "".join(str(x) for x in perms[i])
        return str(i)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- abelian backend helpers -------------------------------------------

    @property
    def invariants(self):
        if self.backend != "abelian":
            raise ValueError("invariants defined on abelian-backend groups")
        return self._data["chain"]

    def abelian_vec(self, i):
        chain = self._data["chain"]
        out = []
        for d in chain:
            out.append(i % d)
            i //= d
        return out

    def abelian_index(self, vec):
        chain = self._data["chain"]
        idx = 0
        stride = 1
        for x, d in zip(vec, chain):
            idx += (int(x) % d) * stride
            stride *= d
        return idx

    # -- semidirect backend helpers ------------------------------------------

    @property
    def kernel_group(self):
        return self._data["kernel"]

    @property
    def quotient_group(self):
        return self._data["quotient"]

    def sd_split(self, i):
        ng = self.quotient_group.order
        return i // ng, i % ng

    def sd_join(self, a_idx, g_idx):
        return a_idx * self.quotient_group.order + g_idx

    def sd_act_vec(self, g_idx, vec):
        m = self._data["modulus"]
        mat = self._data["act"][g_idx]
        chain = self.kernel_group.invariants
        out = (np.asarray(vec, dtype=np.int64) @ mat) % (m if m > 1 else 1)
        return [int(x) % d for x, d in zip(out, chain)]


def _validate_axioms(table):
    n = table.shape[0]
    if not (np.array_equal(table[0], np.arange(n)) and
            np.array_equal(table[:, 0], np.arange(n))):
        raise InvalidTable("identity must be the element of index 0")
    for i in range(n):
        if 0 not in table[i]:
            raise InvalidTable(f"element {i} has no inverse")
    # associativity, blocked by the left factor to bound memory
    for i in range(n):
        lhs = table[table[i], :]
        rhs = table[i][table]
        if not np.array_equal(lhs, rhs):
            raise InvalidTable(f"associativity fails with left factor {i}")


def _closure_set(group, gens):
    seen = {0}
    frontier = [0]
    while frontier:
        cur = frontier.pop()
        for s in gens:
            for new in (group.mul(s, cur), group.mul(cur, s)):
                if new not in seen:
                    seen.add(new)
                    frontier.append(new)
    return seen


def _check_endomorphism(mat, chain, m):
    for i, di in enumerate(chain):
        for j, dj in enumerate(chain):
            if (di * int(mat[i, j])) % dj:
                raise InvalidAction(
                    f"matrix entry ({i},{j}) breaks the order-{dj} coordinate")


def extend_action(group, gens, gen_vals, compose, identity_val, eq):
    """Extend generator-assigned values to all elements of a finite group.

    Walks the left Cayley graph from the identity, assigning
    val[s*e] = compose(val_s, val_e), and then validates every
    (generator, element) edge, which forces multiplicativity on all pairs.
    Raises InvalidAction on inconsistency or if the generators fail to
    generate.
    """
    if group.order > TABLE_CAP:
        raise CapExceeded("action extension requires a desk-scale acting group")
    vals = {0: identity_val}
    frontier = [0]
    gen_of = dict(zip(gens, gen_vals))
    while frontier:
        cur = frontier.pop(0)
        for s, vs in gen_of.items():
            new = group.mul(s, cur)
            nv = compose(vs, vals[cur])
            if new in vals:
                if not eq(vals[new], nv):
                    raise InvalidAction("generator values are inconsistent on a relation")
            else:
                vals[new] = nv
                frontier.append(new)
    if len(vals) != group.order:
        raise InvalidAction("the given generators do not generate the group")
    for s, vs in gen_of.items():
        for e in range(group.order):
            if not eq(vals[group.mul(s, e)], compose(vs, vals[e])):
                raise InvalidAction("generator values are inconsistent on a relation")
    return [vals[i] for i in range(group.order)]


# ---------------------------------------------------------------------------
# Subgroups.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its sorted element-index list inside a parent."""

    parent: FiniteGroup
    elements: tuple

    def __post_init__(self):
        elems = tuple(sorted(int(x) for x in self.elements))
        object.__setattr__(self, "elements", elems)
        if 0 not in elems:
            raise NotASubgroup("subgroup must contain the identity")
        eset = set(elems)
        for a in elems:
            if self.parent.inv(a) not in eset:
                raise NotASubgroup("subgroup not closed under inverse")
            for b in elems:
                if self.parent.mul(a, b) not in eset:
                    raise NotASubgroup("subgroup not closed under product")

    @property
    def order(self):
        return len(self.elements)

    def as_group(self):
        """(FiniteGroup on 0..order-1, list mapping sub index -> parent index)."""
        to_parent = list(self.elements)
        from_parent = {p: i for i, p in enumerate(to_parent)}
        n = len(to_parent)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(to_parent):
            for j, b in enumerate(to_parent):
                table[i, j] = from_parent[self.parent.mul(a, b)]
        g = FiniteGroup.from_table(table, name=f"sub{len(to_parent)}of{self.parent.name}",
                                   validate=False)
        return g, to_parent

    def conjugate(self, g):
        return Subgroup(self.parent,
                        tuple(self.parent.conj(g, x) for x in self.elements))

    def __le__(self, other):
        return set(self.elements) <= set(other.elements)


def closure(group, gens):
    """The subgroup generated by the given element indices."""
    return Subgroup(group, tuple(sorted(_closure_set(group, [g for g in gens if g]))))


def subgroups(group, cap=TABLE_CAP):
    """All subgroups, sorted by (order, element list).

    Breadth-first closure over generating sets of size <= 2 followed by join
    saturation; complete because every subgroup is a join of cyclic ones.
    """
    if group.order > cap:
        raise CapExceeded(f"subgroup enumeration capped at order {cap}")
    group.mul_table()
    found = {(0,)}
    cyclic = set()
    for g in range(group.order):
        c = tuple(sorted(_closure_set(group, [g])))
        cyclic.add(c)
        found.add(c)
    for c1 in list(cyclic):
        for g in range(group.order):
            if g not in c1:
                found.add(tuple(sorted(_closure_set(group, list(c1) + [g]))))
    while True:
        new = set()
        pool = sorted(found)
        for i, s1 in enumerate(pool):
            set1 = set(s1)
            for s2 in pool[i + 1:]:
                if set(s2) <= set1 or set1 <= set(s2):
                    continue
                j = tuple(sorted(_closure_set(group, list(set1 | set(s2)))))
                if j not in found:
                    new.add(j)
        if not new:
            break
        found |= new
    out = [Subgroup(group, elems) for elems in found]
    out.sort(key=lambda h: (h.order, h.elements))
    return out


def abelian_invariants(group, elements=None):
    """Invariant factors of an abelian (sub)group, by order counting.

    The counts #{x : x^d = 1} determine the isomorphism type of a finite
    abelian group; exponent multisets are extracted prime by prime and
    recombined into the divisibility chain.
    """
    elems = list(range(group.order)) if elements is None else list(elements)
    for a in elems:
        for b in elems:
            if group.mul(a, b) != group.mul(b, a):
                raise ValueError("abelian invariants require an abelian group")
    n = len(elems)
    orders = {x: group.element_order(x) for x in elems}
    primes = []
    rest = n
    p = 2
    while rest > 1:
        if rest % p == 0:
            primes.append(p)
            while rest % p == 0:
                rest //= p
        p += 1 if p == 2 else 2
    exps = {}
    for p in primes:
        counts = [1]
        while True:
            pk = p ** len(counts)
            c = sum(1 for x in elems if pk % orders[x] == 0)
            if c == counts[-1]:
                break
            counts.append(c)
        # lam[k-1] = #cyclic p-factors with exponent >= k
        lam = []
        for i in range(1, len(counts)):
            ratio = counts[i] // counts[i - 1]
            e = 0
            while ratio > 1:
                ratio //= p
                e += 1
            lam.append(e)
        nfac = lam[0] if lam else 0
        per_factor = []
        for idx in range(nfac):
            e = 0
            for k in range(len(lam)):
                if lam[k] > idx:
                    e = k + 1
            per_factor.append(e)
        exps[p] = sorted(per_factor, reverse=True)
    nfactors = max((len(v) for v in exps.values()), default=0)
    chain = []
    for i in range(nfactors):
        f = 1
        for p, es in exps.items():
            if i < len(es):
                f *= p ** es[i]
        chain.append(f)
    return tuple(sorted(c for c in chain if c > 1))


def is_bicyclic(group, elements=None):
    """Cyclic or a direct product of two cyclic groups (abelian, <= 2 factors)."""
    elems = list(range(group.order)) if elements is None else list(elements)
    for a in elems:
        for b in elems:
            if group.mul(a, b) != group.mul(b, a):
                return False
    return len(abelian_invariants(group, elems)) <= 2


def bicyclic_family(group, cap=TABLE_CAP):
    """Maximal bicyclic subgroups; sufficient test set for restriction kernels.

    A class vanishing on H' vanishes on every H <= H', so kernels over the
    maximal members agree with kernels over every bicyclic subgroup.
    """
    subs = subgroups(group, cap=cap)
    bic = [h for h in subs if is_bicyclic(group, h.elements)]
    out = []
    for h in bic:
        if not any(h is not k and set(h.elements) < set(k.elements) for k in bic):
            out.append(h)
    out.sort(key=lambda h: (h.order, h.elements))
    return out


def conjugacy_data(group):
    """(classes sorted by least member, function element -> least class member)."""
    n = group.order
    group.mul_table()
    rep = [-1] * n
    classes = []
    for x in range(n):
        if rep[x] >= 0:
            continue
        orbit = sorted({group.conj(g, x) for g in range(n)})
        for y in orbit:
            rep[y] = orbit[0]
        classes.append(orbit)
    classes.sort(key=lambda c: c[0])

    def min_rep(x):
        return rep[x]

    return classes, min_rep


# ---------------------------------------------------------------------------
# Homomorphisms and the semidirect construction.
# ---------------------------------------------------------------------------


@dataclass
class GroupHom:
    """A homomorphism given by a full image array or a callable."""

    source: FiniteGroup
    target: FiniteGroup
    images: object = None
    fn: object = None
    name: str = "hom"

    def apply(self, i):
        if self.images is not None:
            return int(self.images[i])
        return int(self.fn(i))

    def validate(self, rng=None):
        if self.apply(0) != 0:
            raise InvalidAction(f"{self.name}: identity must map to identity")
        if self.source.order <= TABLE_CAP:
            for a in range(self.source.order):
                for b in range(self.source.order):
                    if self.apply(self.source.mul(a, b)) != self.target.mul(
                            self.apply(a), self.apply(b)):
                        raise InvalidAction(f"{self.name}: not multiplicative at ({a},{b})")
        else:
            import random as _random

            rng = rng or _random.Random(0)
            for _ in range(256):
                a = rng.randrange(self.source.order)
                b = rng.randrange(self.source.order)
                if self.apply(self.source.mul(a, b)) != self.target.mul(
                        self.apply(a), self.apply(b)):
                    raise InvalidAction(f"{self.name}: not multiplicative at ({a},{b})")
        return self

    def is_surjective(self):
        if self.target.order > TABLE_CAP:
            raise CapExceeded("surjectivity check needs a desk-scale target")
        if self.source.order <= TABLE_CAP:
            return len({self.apply(i) for i in range(self.source.order)}) == self.target.order
        hit = {self.apply(g) for g in self.source.generators}
        return len(_closure_set(self.target, list(hit))) == self.target.order


def semidirect_product(a_group, g_group, gen_mats, name=None):
    """Build E = A x| G with its section, projection and inclusion maps.

    Returns (E, s, pi, iota); pi o s is the identity on G and pi o iota is
    trivial.  The inclusion image is normal in E (checked on generators).
    """
    e = FiniteGroup.semidirect(a_group, g_group, gen_mats, name=name)
    ng = g_group.order
    s = GroupHom(g_group, e, images=np.arange(ng, dtype=np.int64), name="section")
    pi = GroupHom(e, g_group, fn=lambda i: i % ng, name="projection")
    iota = GroupHom(a_group, e, fn=lambda a: a * ng, name="inclusion")
    s.validate()
    pi.validate()
    iota.validate()
    for gg in e.generators:
        for ag in a_group.generators:
            x = e.conj(gg, iota.apply(ag))
            if pi.apply(x) != 0:
                raise InvalidAction("kernel image is not normal")
    return e, s, pi, iota


# ---------------------------------------------------------------------------
# GroupSpec parsing.
# ---------------------------------------------------------------------------


def build_group(spec, cap=TABLE_CAP):
    """Build a validated FiniteGroup from a GroupSpec.

    Grammar: {"table": [[...]]} | {"perm_gens": [[point images]]} |
    {"abelian": [d1, ...]} | {"semidirect": {"A": spec, "G": spec,
    "action": [matrix per generator of G]}}.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise SpecParse(f"invalid spec JSON at position {exc.pos}: {exc.msg}") from exc
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SpecParse("group spec must be an object with exactly one backend key")
    kind, payload = next(iter(spec.items()))
    if kind == "table":
        g = FiniteGroup.from_table(payload)
        if g.order > cap:
            raise CapExceeded(f"group order {g.order} above cap {cap}")
        return g
    if kind == "perm_gens":
        return FiniteGroup.from_perm_gens(payload, cap=cap)
    if kind == "abelian":
        if not isinstance(payload, list):
            raise SpecParse("abelian spec must be a list of moduli")
        g = FiniteGroup.abelian(payload)
        if g.order > cap:
            raise CapExceeded(f"group order {g.order} above cap {cap}")
        return g
    if kind == "semidirect":
        for key in ("A", "G", "action"):
            if key not in payload:
                raise SpecParse(f"semidirect spec missing key {key!r}")
        a = build_group(payload["A"], cap=max(cap, 2 ** 24))
        g = build_group(payload["G"], cap=cap)
        e = FiniteGroup.semidirect(a, g, payload["action"])
        return e
    raise SpecParse(f"unknown group spec kind {kind!r}")
