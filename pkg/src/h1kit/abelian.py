"""Abelian 1-cohomology: Z^1, B^1, H^1, Tate H^0-hat, restriction and
pullback maps, the connecting isomorphism for augmentation sequences, and
restriction kernels over subgroup families.

A cocycle is stored as its full value table (t x rank, value at the identity
zero); the cocycle identity a_{gh} = a_g + g.a_h over all pairs becomes one
exact linear system over Z/m whose kernel is Z^1.  Classes get canonical
labels from the invariant-factor coordinates of Z^1/B^1.  Per-coordinate
moduli below m contribute auxiliary relation unknowns so that all equations
hold in the module, not merely mod m.

A full value-table enumeration oracle (brute_force_h1) is kept as a
first-class, independently coded route for cross-checking the solver.
"""

from dataclasses import dataclass, field
from math import gcd, prod

import numpy as np

from . import _kernels
from .errors import CapExceeded, NotASubgroup, ActionMismatch
from .gmodules import GModule, restrict_module, trivial_module, twist_module
from .groups import FiniteGroup, GroupHom, Subgroup, abelian_invariants, bicyclic_family, is_bicyclic
from .zmodlinalg import (
    howell,
    kernel_generators,
    lcm_list,
    quotient_structure,
    span_order,
)

DEFAULT_ENUMERATION_CAP = 2 ** 24


@dataclass(frozen=True)
class AbelianCocycle:
    """A 1-cocycle as a full value table in canonical module coordinates."""

    group: object
    module: GModule
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        assert vals.shape == (self.group.order, self.module.rank)
        object.__setattr__(self, "values", vals)
        self.values.setflags(write=False)

    def validate(self):
        if self.values[0].any():
            raise ValueError("cocycle value at the identity must vanish")
        g = self.group
        mod = self.module
        for i in range(g.order):
            for j in range(g.order):
                lhs = mod.reduce(self.values[g.mul(i, j)])
                rhs = mod.reduce(self.values[i] + mod.act(i, self.values[j]))
                if not np.array_equal(lhs, rhs):
                    raise ValueError(f"cocycle identity fails at pair ({i},{j})")
        return self

    def restrict(self, sub_elements, sub_module):
        vals = self.values[np.asarray(sub_elements, dtype=np.int64)]
        return AbelianCocycle(sub_module.group, sub_module, vals)


def _table_to_vec(values):
    return np.asarray(values, dtype=np.int64)[1:].reshape(-1)


def _vec_to_table(vec, t, module):
    table = np.zeros((t, module.rank), dtype=np.int64)
    if module.rank:
        table[1:] = np.asarray(vec, dtype=np.int64).reshape(t - 1, module.rank)
        for g in range(t):
            table[g] = module.reduce(table[g])
    return table


def _slot_lattice_rows(t, module):
    """Relation rows d_i * e_(slot,i) of the big ambient, one copy per slot."""
    rel = module.relation_rows()
    n = (t - 1) * module.rank
    rows = []
    for s in range(t - 1):
        for rr in rel:
            row = np.zeros(n, dtype=np.int64)
            row[s * module.rank:(s + 1) * module.rank] = rr
            rows.append(row)
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), n)


class CohGroup:
    """A computed cohomology group with canonical class labels.

    invariant_factors give the group structure; class_reps are cocycle
    tables generating it; label() is constant exactly on cohomology classes.
    """

    def __init__(self, group, module, quotient, z1_order, b1_order, kind="h1"):
        self.group = group
        self.module = module
        self.quotient = quotient
        self.z1_order = z1_order
        self.b1_order = b1_order
        self.kind = kind

    @property
    def invariant_factors(self):
        return self.quotient.structure.invariant_factors

    @property
    def order(self):
        return self.quotient.order

    def label(self, cocycle):
        values = cocycle.values if isinstance(cocycle, AbelianCocycle) else cocycle
        return self.quotient.normal_form(_table_to_vec(values))

    def rep(self, label):
        vec = self.quotient.rep(label)
        return AbelianCocycle(self.group, self.module,
                              _vec_to_table(vec, self.group.order, self.module))

    @property
    def class_reps(self):
        return [self.rep(tuple(1 if i == j else 0 for j in range(len(self.invariant_factors))))
                for i in range(len(self.invariant_factors))]

    def elements(self):
        return self.quotient.elements()

    def add_labels(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def scale_label(self, a, c):
        return tuple((x * c) % d for x, d in zip(a, self.invariant_factors))

    def zero_label(self):
        return tuple(0 for _ in self.invariant_factors)

    def __repr__(self):
        fac = "+".join(f"Z/{d}" for d in self.invariant_factors) or "0"
        return f"CohGroup({self.kind}, {fac})"


def _trivial_cohgroup(group, module, kind="h1"):
    q = quotient_structure(np.zeros((0, 0), dtype=np.int64),
                           np.zeros((0, 0), dtype=np.int64), 2)
    return CohGroup(group, module, q, 1, 1, kind=kind)


def _solver_cost(t, r):
    n = (t - 1) * r
    return n * n * max((t - 1) * (t - 1) * r, 1)


def h1(gamma, module, cap=DEFAULT_ENUMERATION_CAP):
    """H^1(gamma, module) by solving the cocycle system over Z/m.

    Unknowns are the values on nonidentity elements; equations run over all
    nonidentity pairs.  Raises CapExceeded when the elimination work estimate
    n_unknowns^2 * n_equations exceeds ``cap``.
    """
    if module.group is not gamma:
        raise ActionMismatch("module must carry an action of the given group")
    t = gamma.order
    r = module.rank
    if t == 1 or r == 0:
        return _trivial_cohgroup(gamma, module)
    if _solver_cost(t, r) > cap:
        raise CapExceeded(
            f"cocycle system for |G|={t}, rank {r} above the solver cap {cap}")
    m = module.modulus
    n_unknown = (t - 1) * r
    gamma.mul_table()
    pairs = [(g, h) for g in range(1, t) for h in range(1, t)]
    n_eq_cols = len(pairs) * r
    mods = np.asarray(module.moduli, dtype=np.int64)
    mixed = bool((mods < m).any())
    coef = np.zeros((n_unknown, n_eq_cols), dtype=np.int64)
    for p, (g, h) in enumerate(pairs):
        col = p * r
        gh = gamma.mul(g, h)
        if gh != 0:
            block = coef[(gh - 1) * r:gh * r, col:col + r]
            block += np.eye(r, dtype=np.int64)
        block = coef[(g - 1) * r:g * r, col:col + r]
        block -= np.eye(r, dtype=np.int64)
        coef[(h - 1) * r:h * r, col:col + r] -= module.mats[g]
    coef %= m
    if mixed:
        aux = []
        for p in range(len(pairs)):
            for k in range(r):
                if mods[k] < m:
                    row = np.zeros(n_eq_cols, dtype=np.int64)
                    row[p * r + k] = mods[k]
                    aux.append(row)
        stack = np.vstack([coef, np.asarray(aux, dtype=np.int64)])
    else:
        stack = coef
    kgens = kernel_generators(stack, m)[:, :n_unknown]
    lattice = _slot_lattice_rows(t, module)
    z1_gens = np.vstack([kgens, lattice]) if lattice.size else kgens
    if z1_gens.shape[0] == 0:
        z1_gens = np.zeros((0, n_unknown), dtype=np.int64)
    b1_rows = np.zeros((r, n_unknown), dtype=np.int64)
    for j in range(r):
        ej = np.zeros(r, dtype=np.int64)
        ej[j] = 1
        for g in range(1, t):
            b1_rows[j, (g - 1) * r:g * r] = (module.mats[g][j] - ej) % m
    b1_gens = np.vstack([b1_rows, lattice]) if lattice.size else b1_rows
    quotient = quotient_structure(z1_gens, b1_gens, m)
    lat_order = span_order(howell(lattice, m), m) if lattice.size else 1
    z1_order = span_order(howell(z1_gens, m), m) // lat_order
    b1_order = span_order(howell(b1_gens, m), m) // lat_order
    return CohGroup(gamma, module, quotient, z1_order, b1_order)


def brute_force_h1(gamma, module, cap=DEFAULT_ENUMERATION_CAP):
    """Independent oracle: enumerate all value tables and quotient explicitly.

    Returns (z1_count, class_count, invariant_factors).  Candidate count is
    |A|^(|G|-1) and must stay within ``cap``.
    """
    t = gamma.order
    r = module.rank
    if t == 1 or r == 0:
        return 1, 1, ()
    total = module.order ** (t - 1)
    if total > cap:
        raise CapExceeded(f"{total} candidate tables above the enumeration cap")
    gamma.mul_table()
    mods = np.asarray(module.moduli, dtype=np.int64)
    out = np.zeros((0, (t - 1) * r), dtype=np.int64)
    count = _kernels.abelian_enumerate(module.mats, gamma.mul_table(), mods, out)
    out = np.zeros((count, (t - 1) * r), dtype=np.int64)
    _kernels.abelian_enumerate(module.mats, gamma.mul_table(), mods, out)
    solutions = {tuple(int(x) for x in row) for row in out}
    # coboundaries by direct formula
    cobs = set()
    for v in module.elements():
        table = []
        for g in range(1, t):
            table.extend(module.reduce(module.act(g, v) - v))
        cobs.add(tuple(int(x) for x in table))
    assert cobs <= solutions
    # cosets, then the group structure of the quotient by counting orders
    coset_of = {}
    reps = []
    for sol in sorted(solutions):
        if sol in coset_of:
            continue
        cid = len(reps)
        reps.append(sol)
        for c in cobs:
            shifted = []
            for idx, (x, y) in enumerate(zip(sol, c)):
                shifted.append((x + y) % mods[idx % r])
            coset_of[tuple(shifted)] = cid
    n_classes = len(reps)
    table = np.empty((n_classes, n_classes), dtype=np.int64)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            s = tuple((x + y) % mods[idx % r]
                      for idx, (x, y) in enumerate(zip(a, b)))
            table[i, j] = coset_of[s]
    zero = coset_of[tuple([0] * (t - 1) * r)]
    order = np.argsort(np.where(np.arange(n_classes) == zero, -1, np.arange(n_classes)))
    relabel = np.empty(n_classes, dtype=np.int64)
    relabel[order] = np.arange(n_classes)
    table = relabel[table[order][:, order]]
    quot = FiniteGroup.from_table(table, name="h1-oracle", validate=False)
    return len(solutions), n_classes, abelian_invariants(quot)


def tate_h0(subject, module):
    """Tate H^0-hat: fixed points modulo the image of the norm map.

    ``subject`` is a Subgroup of the module's acting group or the group
    itself.  Elements are module vectors; labels are canonical coordinates.
    """
    if isinstance(subject, Subgroup):
        if subject.parent is not module.group:
            raise NotASubgroup("subgroup must sit inside the acting group")
        elems = list(subject.elements)
        sg, to_parent = subject.as_group()
        gens = [to_parent[i] for i in sg.generators]
    else:
        if subject is not module.group:
            raise ActionMismatch("tate_h0 needs the acting group or its subgroup")
        elems = list(range(subject.order))
        gens = list(subject.generators)
    r = module.rank
    if r == 0:
        return _trivial_cohgroup(module.group, module, kind="tate0")
    m = module.modulus
    mods = np.asarray(module.moduli, dtype=np.int64)
    mixed = bool((mods < m).any())
    blocks = [((module.mats[g] - np.eye(r, dtype=np.int64)) % m) for g in gens]
    if blocks:
        fix_mat = np.hstack(blocks)
        if mixed:
            aux = []
            n_cols = fix_mat.shape[1]
            for b in range(len(blocks)):
                for k in range(r):
                    if mods[k] < m:
                        row = np.zeros(n_cols, dtype=np.int64)
                        row[b * r + k] = mods[k]
                        aux.append(row)
            fix_mat = np.vstack([fix_mat, np.asarray(aux, dtype=np.int64)])
            fixed = kernel_generators(fix_mat, m)[:, :r]
        else:
            fixed = kernel_generators(fix_mat, m)
    else:
        fixed = np.eye(r, dtype=np.int64) % m
    lattice = module.relation_rows()
    norm = np.zeros((r, r), dtype=np.int64)
    for g in elems:
        norm = (norm + module.mats[g]) % m
    gens_rows = np.vstack([fixed, lattice]) if lattice.size else fixed
    rel_rows = np.vstack([norm, lattice]) if lattice.size else norm
    quotient = quotient_structure(gens_rows, rel_rows, m)
    lat_order = span_order(howell(lattice, m), m) if lattice.size else 1
    fixed_order = span_order(howell(gens_rows, m), m) // lat_order
    norm_order = span_order(howell(rel_rows, m), m) // lat_order
    coh = CohGroup(module.group, module, quotient, fixed_order, norm_order,
                   kind="tate0")
    coh.subject_elements = tuple(elems)
    return coh


def tate_label(tate, vec):
    """Canonical label of a fixed vector in a tate_h0 result."""
    return tate.quotient.normal_form(np.asarray(vec, dtype=np.int64))


def tate_rep(tate, label):
    return tate.quotient.rep(label)


@dataclass
class LabelHom:
    """Additive map between cohomology label groups, by generator images."""

    source_factors: tuple
    target_factors: tuple
    gen_images: list

    def apply(self, label):
        out = [0] * len(self.target_factors)
        for c, img in zip(label, self.gen_images):
            for j, (x, d) in enumerate(zip(img, self.target_factors)):
                out[j] = (out[j] + c * x) % d
        return tuple(out)

    def image_order(self):
        return _sub_order(self.gen_images, self.target_factors)

    def kernel_order(self):
        src = prod(self.source_factors)
        return src // self.image_order()

    def is_injective(self):
        return self.kernel_order() == 1


def _sub_order(labels, factors):
    """Order of the subgroup of ⊕Z/d_i generated by the given label vectors."""
    if not factors:
        return 1
    m = lcm_list(factors)
    k = len(factors)
    lattice = []
    for i, d in enumerate(factors):
        if d < m:
            row = np.zeros(k, dtype=np.int64)
            row[i] = d
            lattice.append(row)
    lattice = np.asarray(lattice, dtype=np.int64).reshape(len(lattice), k)
    gens = np.asarray([list(l) for l in labels], dtype=np.int64).reshape(len(labels), k)
    all_rows = np.vstack([gens, lattice]) if lattice.size else gens
    if all_rows.shape[0] == 0:
        return 1
    lat_order = span_order(howell(lattice, m), m) if lattice.size else 1
    return span_order(howell(all_rows, m), m) // lat_order


def restriction_map(h1_gamma, sub):
    """Restrict classes to a subgroup: (CohGroup over H, LabelHom on labels)."""
    if not isinstance(sub, Subgroup) or sub.parent is not h1_gamma.group:
        raise NotASubgroup("restriction requires a subgroup of the acting group")
    res_mod = restrict_module(h1_gamma.module, sub)
    h1_h = h1(res_mod.group, res_mod)
    images = []
    for rep in h1_gamma.class_reps:
        restricted = rep.restrict(sub.elements, res_mod)
        images.append(h1_h.label(restricted))
    hom = LabelHom(h1_gamma.invariant_factors, h1_h.invariant_factors, images)
    return h1_h, hom


def pullback_map(f, h1_gamma):
    """Pull back along a surjection f: G' -> G; injective on classes.

    Returns (CohGroup over G' for the pulled-back module, LabelHom).
    """
    if f.target is not h1_gamma.group:
        raise ActionMismatch("pullback must land in the acting group of the classes")
    gamma2 = f.source
    pulled = twist_module(h1_gamma.module, f, gamma2)
    h1_2 = h1(gamma2, pulled)
    f_images = np.asarray([f.apply(s) for s in range(gamma2.order)], dtype=np.int64)
    images = []
    for rep in h1_gamma.class_reps:
        table = rep.values[f_images]
        images.append(h1_2.label(AbelianCocycle(gamma2, pulled, table)))
    hom = LabelHom(h1_gamma.invariant_factors, h1_2.invariant_factors, images)
    return h1_2, hom


@dataclass
class DeltaMap:
    """Connecting map H^0-hat(H, B) -> H^1(H, I) for a split augmentation."""

    tate: CohGroup
    h1_ideal: CohGroup
    sub: Subgroup
    _to_parent: list = field(repr=False)

    def apply_vec(self, b_vec):
        """delta(b) as a cocycle table: h maps to b * f_h in ideal coordinates."""
        mod = self.h1_ideal.module
        t = len(self._to_parent)
        table = np.zeros((t, mod.rank), dtype=np.int64)
        b = int(np.asarray(b_vec).reshape(-1)[0]) if mod.rank else 0
        for i, parent in enumerate(self._to_parent):
            if parent != 0:
                table[i, parent - 1] = b
            table[i] = mod.reduce(table[i])
        return AbelianCocycle(self.h1_ideal.group, mod, table)

    def apply(self, label):
        vec = self.tate.quotient.rep(label)
        return self.h1_ideal.label(self.apply_vec(vec))

    def is_bijective(self):
        if self.tate.order != self.h1_ideal.order:
            return False
        seen = set()
        for lbl in self.tate.elements():
            seen.add(self.apply(lbl))
        return len(seen) == self.tate.order


def connecting_delta(sub, aug):
    """Connecting isomorphism for 0 -> I -> (Z/m)[G] -> B -> 0 over H <= G.

    ``aug`` is the (ideal, incl, quotient, quot) tuple from
    augmentation_sequence.  delta(b) is the class of h -> h.r - r for any
    lift r of b; with r = b * e_identity this is h -> b * f_h.
    """
    ideal, _incl, b_mod, _quot = aug
    if not isinstance(sub, Subgroup) or sub.parent is not ideal.group:
        raise NotASubgroup("connecting_delta needs a subgroup of the ring's group")
    res_b = restrict_module(b_mod, sub)
    res_i = restrict_module(ideal, sub)
    sub_group, to_parent = sub.as_group()
    # reuse the same restricted group object for both modules
    tate = tate_h0(res_b.group, res_b)
    h1_i = h1(res_i.group, res_i)
    # align the two restricted groups: as_group is deterministic, same table
    delta = DeltaMap(tate, h1_i, sub, to_parent)
    return delta


@dataclass
class ShaResult:
    """Restriction kernel inside H^1 with witness cocycles."""

    h1_total: CohGroup
    family: list
    invariant_factors: tuple
    witness_labels: list
    bicyclic_flag: bool = False

    @property
    def order(self):
        return prod(self.invariant_factors)

    def witnesses(self):
        return [self.h1_total.rep(lbl) for lbl in self.witness_labels]


def sha_kernel(gamma, module, family, h1_gamma=None, cap=DEFAULT_ENUMERATION_CAP):
    """Classes of H^1(gamma, module) restricting to zero on every family member.

    Solved exactly on class labels: the kernel of the stacked restriction
    label-homomorphisms, computed by linear algebra over Z/lcm.
    """
    for sub in family:
        if not isinstance(sub, Subgroup) or sub.parent is not gamma:
            raise NotASubgroup("family members must be subgroups of the acting group")
    coh = h1_gamma or h1(gamma, module, cap=cap)
    k = len(coh.invariant_factors)
    if k == 0:
        return ShaResult(coh, list(family), (), [])
    homs = [restriction_map(coh, sub)[1] for sub in family]
    m_amb = lcm_list(list(coh.invariant_factors)
                     + [d for hm in homs for d in hm.target_factors] or [2])
    cols = []
    col_mods = []
    for hm in homs:
        width = len(hm.target_factors)
        block = np.zeros((k, width), dtype=np.int64)
        for i, img in enumerate(hm.gen_images):
            block[i] = img
        cols.append(block)
        col_mods.extend(hm.target_factors)
    if cols and sum(c.shape[1] for c in cols):
        mat = np.hstack(cols) % m_amb
        aux = []
        for j, d in enumerate(col_mods):
            if d < m_amb:
                row = np.zeros(mat.shape[1], dtype=np.int64)
                row[j] = d
                aux.append(row)
        stack = np.vstack([mat] + [np.asarray(aux, dtype=np.int64).reshape(len(aux), mat.shape[1])]) \
            if aux else mat
        sols = kernel_generators(stack, m_amb)[:, :k]
    else:
        sols = np.eye(k, dtype=np.int64) % m_amb
    lattice = []
    for i, d in enumerate(coh.invariant_factors):
        if d < m_amb:
            row = np.zeros(k, dtype=np.int64)
            row[i] = d
            lattice.append(row)
    lattice = np.asarray(lattice, dtype=np.int64).reshape(len(lattice), k)
    gens = np.vstack([sols, lattice]) if lattice.size else sols
    rels = lattice if lattice.size else np.zeros((0, k), dtype=np.int64)
    q = quotient_structure(gens, rels, m_amb)
    witness_labels = []
    for rep_row in q.structure.generator_reps:
        witness_labels.append(tuple(int(x) % d for x, d
                                    in zip(rep_row, coh.invariant_factors)))
    return ShaResult(coh, list(family), q.structure.invariant_factors, witness_labels)


def sha_bic_formula(group, m=None):
    """Kernel of the diagonal reduction Z/m -> prod Z/gcd(|H|, m) over the
    maximal bicyclic subgroups; the independent route to the restriction
    kernel for augmentation-ideal coefficients.

    Returns a dict with the kernel invariant factors, the bicyclic flag and
    the per-subgroup orders.
    """
    m = m if m is not None else group.order
    bic_flag = is_bicyclic(group)
    fam = bicyclic_family(group)
    orders = [h.order for h in fam]
    lcm_g = 1
    for h_order in orders:
        g_h = gcd(h_order, m)
        lcm_g = lcm_g * g_h // gcd(lcm_g, g_h)
    kernel_order = m // lcm_g
    return {
        "modulus": m,
        "bicyclic": bic_flag,
        "family_orders": orders,
        "invariant_factors": (kernel_order,) if kernel_order > 1 else (),
        "kernel_generator": lcm_g if kernel_order > 1 else 0,
    }
