"""Finite modules with a group action: group rings, augmentation ideals,
duals, twists and restrictions.

A module with moduli (d_1, ..., d_r) lives in ambient (Z/m)^r, m = lcm(d_i),
with canonical coordinates x_i in [0, d_i); the relation lattice is spanned
by the rows d_i * e_i (empty in the uniform case d_i = m).  The left action
of g is the row-vector product x @ mats[g], so matrices compose contravariantly:
mats[gh] = mats[h] @ mats[g].  That law is validated on every construction,
which is equivalent to all generator relations acting as the identity.

Degenerate moduli are allowed: d_i = 1 coordinates are dropped and the zero
module has rank 0, short-circuiting all cohomology to trivial.

All values are immutable; operations are pure.
"""

import json
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import (
    ActionMismatch,
    IncompatibleActions,
    InvalidAction,
    NotASubgroup,
    SpecParse,
)
from .groups import GroupHom, Subgroup, extend_action
from .zmodlinalg import lcm_list


@dataclass(frozen=True)
class GModule:
    """A finite abelian group ⊕ Z/d_i acted on by a finite group."""

    group: object
    moduli: tuple
    mats: np.ndarray = field(repr=False)
    name: str = "module"
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        moduli = tuple(int(d) for d in self.moduli)
        assert all(d >= 2 for d in moduli), "unit moduli must be dropped upstream"
        object.__setattr__(self, "moduli", moduli)
        mats = np.asarray(self.mats, dtype=np.int64).copy()
        t = self.group.order
        r = len(moduli)
        assert mats.shape == (t, r, r)
        # canonical form: column j of an action matrix only matters mod d_j
        for j, d in enumerate(moduli):
            mats[:, :, j] %= d
        object.__setattr__(self, "mats", mats)
        self.mats.setflags(write=False)

    # -- structure ----------------------------------------------------------

    @property
    def rank(self):
        return len(self.moduli)

    @property
    def modulus(self):
        return lcm_list(self.moduli) if self.moduli else 1

    @property
    def order(self):
        return prod(self.moduli)

    def relation_rows(self):
        """Rows d_i * e_i (mod m) generating the relation lattice; may be empty."""
        m = self.modulus
        rows = []
        for i, d in enumerate(self.moduli):
            if d < m:
                row = np.zeros(self.rank, dtype=np.int64)
                row[i] = d
                rows.append(row)
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), self.rank)

    def reduce(self, vec):
        """Canonical coordinates x_i in [0, d_i)."""
        vec = np.asarray(vec, dtype=np.int64)
        out = vec.copy()
        for i, d in enumerate(self.moduli):
            out[i] %= d
        return out

    def act(self, g, vec):
        """Left action g . x as canonical coordinates."""
        if self.rank == 0:
            return np.zeros(0, dtype=np.int64)
        return self.reduce(np.asarray(vec, dtype=np.int64) @ self.mats[g])

    def elements(self):
        """All canonical coordinate vectors, odometer order."""
        vec = np.zeros(self.rank, dtype=np.int64)
        while True:
            yield vec.copy()
            for i in range(self.rank):
                vec[i] += 1
                if vec[i] < self.moduli[i]:
                    break
                vec[i] = 0
            else:
                return

    def validate(self):
        """Full action check: every relation word acts as the identity."""
        t = self.group.order
        for i, di in enumerate(self.moduli):
            for j, dj in enumerate(self.moduli):
                for g in range(t):
                    if (di * int(self.mats[g, i, j])) % dj:
                        raise InvalidAction(
                            f"action of {g} breaks the order-{dj} coordinate")
        for g in range(t):
            for h in range(t):
                lhs = self.mats[self.group.mul(g, h)]
                rhs = canon_cols(self.mats[h] @ self.mats[g], self.moduli)
                if not np.array_equal(lhs, rhs):
                    raise InvalidAction(
                        f"matrices violate the composition law at ({g},{h})")
        return self

    def same_action(self, other):
        return (self.moduli == other.moduli
                and self.group is other.group
                and np.array_equal(self.mats, other.mats))


def _normalize_moduli(moduli):
    return tuple(int(d) for d in moduli if int(d) > 1)


def module_from_gen_mats(group, moduli, gen_mats, name="module", meta=None):
    """Build a GModule from one action matrix per group generator."""
    moduli = _normalize_moduli(moduli)
    r = len(moduli)
    m = lcm_list(moduli) if moduli else 1
    gens = list(group.generators)
    mats_in = [np.asarray(mm, dtype=np.int64) % max(m, 1) for mm in gen_mats]
    if len(mats_in) != len(gens):
        raise InvalidAction(
            f"need {len(gens)} action matrices (one per generator), got {len(mats_in)}")
    for mm in mats_in:
        if mm.shape != (r, r):
            raise InvalidAction(f"action matrices must be {r}x{r}")
    if r == 0:
        all_mats = [np.zeros((0, 0), dtype=np.int64)] * group.order
    else:
        all_mats = extend_action(
            group, gens, mats_in,
            compose=lambda ms, mp: (mp @ ms) % m,
            identity_val=np.eye(r, dtype=np.int64) % m,
            eq=np.array_equal,
        )
    mod = GModule(group, moduli, np.stack(all_mats) if all_mats else
                  np.zeros((group.order, 0, 0), dtype=np.int64),
                  name=name, meta=meta or {})
    return mod.validate()


def trivial_module(group, m, rank=1, name=None):
    """(Z/m)^rank with the trivial action."""
    moduli = _normalize_moduli([m] * rank)
    r = len(moduli)
    mats = np.broadcast_to(np.eye(r, dtype=np.int64) % max(m, 1),
                           (group.order, r, r)).copy()
    return GModule(group, moduli, mats, name=name or f"trivial(Z/{m})^{rank}")


def group_ring(group, m, name=None):
    """(Z/m)[G]: free of rank |G| with the left regular permutation action."""
    n = group.order
    moduli = _normalize_moduli([m] * n)
    if not moduli:
        return GModule(group, (), np.zeros((n, 0, 0), dtype=np.int64),
                       name=name or f"(Z/{m})[{group.name}]",
                       meta={"group_ring": True, "ring_modulus": m})
    mats = np.zeros((n, n, n), dtype=np.int64)
    for g in range(n):
        for h in range(n):
            mats[g, h, group.mul(g, h)] = 1
    mod = GModule(group, moduli, mats, name=name or f"(Z/{m})[{group.name}]",
                  meta={"group_ring": True, "ring_modulus": m})
    return mod.validate()


@dataclass(frozen=True)
class ModuleMap:
    """A map of modules over the same acting group, as a matrix x -> x @ M."""

    source: GModule
    target: GModule
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.int64) % max(self.target.modulus, 1)
        assert mat.shape == (self.source.rank, self.target.rank)
        object.__setattr__(self, "matrix", mat)
        for i, di in enumerate(self.source.moduli):
            for j, dj in enumerate(self.target.moduli):
                if (di * int(mat[i, j])) % dj:
                    raise InvalidAction("module map not well defined on torsion")

    def apply(self, vec):
        if self.source.rank == 0 or self.target.rank == 0:
            return np.zeros(self.target.rank, dtype=np.int64)
        return self.target.reduce(np.asarray(vec, dtype=np.int64) @ self.matrix)

    def validate_equivariant(self):
        if self.source.group is not self.target.group:
            raise ActionMismatch("module map requires a common acting group")
        for g in range(self.source.group.order):
            lhs = (self.source.mats[g] @ self.matrix)
            rhs = (self.matrix @ self.target.mats[g])
            diff = lhs - rhs
            for j, dj in enumerate(self.target.moduli):
                if (diff[:, j] % dj).any():
                    raise ActionMismatch(f"map does not commute with the action of {g}")
        return self


def augmentation_sequence(ring_module):
    """Split (Z/m)[G] into its augmentation ideal and coefficient-sum quotient.

    Returns (I, incl, B, quot): I has basis f_h = e_h - e_1 over the
    nonidentity elements h with action g.f_h = f_{gh} - f_g; B is Z/m with
    the trivial action; quot o incl = 0 and |I| * |B| = |R|.
    """
    if not ring_module.meta.get("group_ring"):
        raise ActionMismatch("augmentation_sequence expects a group_ring module")
    group = ring_module.group
    m = ring_module.meta["ring_modulus"]
    n = group.order
    if m == 1:
        zero = GModule(group, (), np.zeros((n, 0, 0), dtype=np.int64), name="0")
        one = GModule(group, (), np.zeros((n, 0, 0), dtype=np.int64), name="0")
        return zero, ModuleMap(zero, ring_module, np.zeros((0, 0))), one, \
            ModuleMap(ring_module, one, np.zeros((0, 0)))
    r_i = n - 1
    mats = np.zeros((n, r_i, r_i), dtype=np.int64)
    for g in range(n):
        for h in range(1, n):
            gh = group.mul(g, h)
            if gh != 0:
                mats[g, h - 1, gh - 1] += 1
            if g != 0:
                mats[g, h - 1, g - 1] -= 1
    mats %= m
    ideal = GModule(group, (m,) * r_i, mats,
                    name=f"aug_ideal({ring_module.name})",
                    meta={"augmentation_ideal": True, "ring_modulus": m}).validate()
    incl_mat = np.zeros((r_i, n), dtype=np.int64)
    for h in range(1, n):
        incl_mat[h - 1, h] = 1
        incl_mat[h - 1, 0] = m - 1
    incl = ModuleMap(ideal, ring_module, incl_mat).validate_equivariant()
    quotient = trivial_module(group, m, 1, name=f"Z/{m}")
    quot = ModuleMap(ring_module, quotient,
                     np.ones((n, 1), dtype=np.int64)).validate_equivariant()
    composite = (incl.matrix @ quot.matrix) % m
    assert not composite.any(), "augmentation of the ideal must vanish"
    assert ideal.order * quotient.order == ring_module.order
    return ideal, incl, quotient, quot


def cartier_dual(module):
    """Hom(A, Z/exp(A)) with the contragredient action.

    On uniform moduli the action of g is the transpose of the action of
    g^{-1}; mixed moduli carry the exact d_i/d_k scaling.  Applying the dual
    twice returns matrices equal to the original ones.  The identification of
    Z/exp(A) with the relevant roots of unity is recorded as a hypothesis
    flag in meta, not verified arithmetic.
    """
    group = module.group
    r = module.rank
    m = module.modulus
    mats = np.zeros_like(module.mats)
    for g in range(group.order):
        src = module.mats[group.inv(g)]
        for k in range(r):
            for i in range(r):
                num = int(src[i, k]) * module.moduli[i]
                assert num % module.moduli[k] == 0
                mats[g, k, i] = (num // module.moduli[k]) % m
    dual = GModule(group, module.moduli, mats, name=f"dual({module.name})",
                   meta={"dual_of": module.name,
                         "roots_of_unity_hypothesis": True})
    return dual.validate()


def twist_module(module, twist, gamma, ambient=None):
    """Twist: gamma acts by sigma.x = c_sigma . (sigma . x).

    ``twist`` maps gamma elements into the module's acting group: a GroupHom,
    an index array, or any object with a ``values`` index table (a nonabelian
    cocycle).  ``ambient`` is gamma's own action on the module (trivial by
    default, the constant case).  Raises IncompatibleActions when the two
    actions fail to compose into an action.
    """
    if isinstance(twist, GroupHom):
        if twist.target is not module.group:
            raise ActionMismatch("twist must land in the module's acting group")
        values = [twist.apply(s) for s in range(gamma.order)]
    elif hasattr(twist, "values"):
        values = [int(x) for x in twist.values]
    else:
        values = [int(x) for x in twist]
    if len(values) != gamma.order:
        raise ActionMismatch("twist must assign a value to every gamma element")
    m = max(module.modulus, 1)
    r = module.rank
    if ambient is None:
        amb = np.broadcast_to(np.eye(r, dtype=np.int64) % m, (gamma.order, r, r))
    else:
        if ambient.group is not gamma or ambient.moduli != module.moduli:
            raise ActionMismatch("ambient action must be a gamma action on the same group")
        amb = ambient.mats
    mats = np.zeros((gamma.order, r, r), dtype=np.int64)
    for s in range(gamma.order):
        mats[s] = (amb[s] @ module.mats[values[s]]) % m
    twisted = GModule(gamma, module.moduli, mats,
                      name=f"twist({module.name})",
                      meta=dict(module.meta, twisted=True))
    try:
        return twisted.validate()
    except InvalidAction as exc:
        raise IncompatibleActions(str(exc)) from exc


def restrict_module(module, sub):
    """The same abelian group with the action restricted to a subgroup."""
    if not isinstance(sub, Subgroup) or sub.parent is not module.group:
        raise NotASubgroup("restriction requires a subgroup of the acting group")
    h_group, to_parent = sub.as_group()
    mats = module.mats[np.asarray(to_parent, dtype=np.int64)]
    out = GModule(h_group, module.moduli, mats.copy(),
                  name=f"res({module.name})",
                  meta=dict(module.meta, restricted_from=module.group.name))
    return out.validate()


def parse_module(spec, group):
    """Build a module over ``group`` from a ModuleSpec.

    Grammar: {"moduli": [...], "action": [matrix per group generator]} |
    {"builtin": "group_ring", "m": N} | {"builtin": "augmentation_ideal",
    "m": N} | {"builtin": "dual", "of": spec} | {"builtin": "trivial",
    "m": N, "rank": r}.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise SpecParse(f"invalid module JSON at position {exc.pos}: {exc.msg}") from exc
    if not isinstance(spec, dict):
        raise SpecParse("module spec must be an object")
    if "builtin" in spec:
        kind = spec["builtin"]
        if kind == "group_ring":
            return group_ring(group, int(spec["m"]))
        if kind == "augmentation_ideal":
            ring = group_ring(group, int(spec["m"]))
            ideal, _incl, _b, _quot = augmentation_sequence(ring)
            return ideal
        if kind == "dual":
            return cartier_dual(parse_module(spec["of"], group))
        if kind == "trivial":
            return trivial_module(group, int(spec["m"]), int(spec.get("rank", 1)))
        raise SpecParse(f"unknown builtin module {kind!r}")
    if "moduli" in spec and "action" in spec:
        return module_from_gen_mats(group, spec["moduli"], spec["action"])
    if "moduli" in spec:
        moduli = _normalize_moduli(spec["moduli"])
        r = len(moduli)
        m = lcm_list(moduli) if moduli else 1
        mats = np.broadcast_to(np.eye(r, dtype=np.int64) % max(m, 1),
                               (group.order, r, r)).copy()
        return GModule(group, moduli, mats, name="trivial" + str(tuple(moduli)))
    raise SpecParse("module spec needs either 'builtin' or 'moduli'/'action'")
