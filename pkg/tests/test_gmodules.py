"""Group rings, augmentation ideals, Cartier duals, twists, restrictions."""

import numpy as np
import pytest

from h1kit.catalog import named_group
from h1kit.errors import ActionMismatch, IncompatibleActions, NotASubgroup
from h1kit.gmodules import (
    GModule,
    ModuleMap,
    augmentation_sequence,
    cartier_dual,
    group_ring,
    module_from_gen_mats,
    parse_module,
    restrict_module,
    trivial_module,
    twist_module,
)
from h1kit.groups import FiniteGroup, GroupHom, closure, subgroups


def test_group_ring_trivial_group():
    r = group_ring(named_group("C1"), 4)
    assert r.moduli == (4,)
    assert np.array_equal(r.mats[0], np.eye(1))


def test_group_ring_regular_swap():
    g = named_group("C2")
    r = group_ring(g, 2)
    assert r.moduli == (2, 2)
    assert np.array_equal(r.mats[1], np.array([[0, 1], [1, 0]]))


def test_group_ring_large():
    g = named_group("C2^3")
    r = group_ring(g, 8)
    assert r.rank == 8 and r.modulus == 8
    assert r.order == 8 ** 8


def test_augmentation_small():
    g = named_group("C2")
    ring = group_ring(g, 2)
    ideal, incl, b, quot = augmentation_sequence(ring)
    # I = {0, 1+g}, trivial action
    assert ideal.moduli == (2,)
    assert np.array_equal(ideal.mats[1], np.eye(1))
    assert b.order == 2
    # identity element of the ring has augmentation 1
    e1 = np.zeros(2, dtype=np.int64)
    e1[0] = 1
    assert quot.apply(e1).tolist() == [1]


def test_augmentation_orders_and_exactness():
    for name, m in (("C2", 4), ("V4", 4), ("C3", 3), ("S3", 2)):
        g = named_group(name)
        ring = group_ring(g, m)
        ideal, incl, b, quot = augmentation_sequence(ring)
        assert ideal.order * b.order == ring.order
        if ring.order <= 2 ** 16:
            image = {tuple(incl.apply(v)) for v in ideal.elements()}
            kernel = {tuple(v) for v in ring.elements() if not quot.apply(v).any()}
            assert image == kernel


def test_augmentation_big_case_order():
    g = named_group("C2^3")
    ring = group_ring(g, 8)
    ideal, _incl, b, _quot = augmentation_sequence(ring)
    assert ideal.order == 8 ** 7
    assert b.moduli == (8,)


def test_cartier_dual_trivial_and_regular():
    g = named_group("C2")
    t = trivial_module(g, 6, 2)
    d = cartier_dual(t)
    assert all(np.array_equal(d.mats[i], np.eye(2) % 6) for i in range(2))
    r = group_ring(g, 2)
    d2 = cartier_dual(r)
    assert d2.same_action(GModule(g, r.moduli, r.mats, name="x"))


def test_cartier_dual_involution():
    g = named_group("C2^3")
    ring = group_ring(g, 8)
    ideal, *_ = augmentation_sequence(ring)
    dd = cartier_dual(cartier_dual(ideal))
    assert np.array_equal(dd.mats, ideal.mats)
    assert dd.moduli == ideal.moduli
    assert cartier_dual(ideal).meta["roots_of_unity_hypothesis"] is True


def test_cartier_dual_mixed_moduli_involution():
    g = named_group("C2")
    # Z/2 + Z/4 with the generator swapping the Z/2 summand into the 2-torsion
    mod = module_from_gen_mats(g, [2, 4], [[[1, 2], [0, 3]]])
    dd = cartier_dual(cartier_dual(mod))
    assert np.array_equal(dd.mats, mod.mats)


def test_twist_trivial_is_identity():
    g = named_group("S3")
    ring = group_ring(g, 3)
    gamma = named_group("C3")
    twisted = twist_module(ring, [0] * 3, gamma)
    assert all(np.array_equal(twisted.mats[s], np.eye(6) % 3) for s in range(3))


def test_twist_by_identity_hom():
    g = named_group("C3")
    ring = group_ring(g, 3)
    ident = GroupHom(g, g, images=np.arange(3)).validate()
    twisted = twist_module(ring, ident, g)
    assert np.array_equal(twisted.mats, ring.mats)


def test_twist_dual_commutes(seeded):
    gamma = named_group("C2")
    for name in ("C2", "V4", "C4"):
        g = named_group(name)
        ring = group_ring(g, 4)
        ideal, *_ = augmentation_sequence(ring)
        for mod in (ring, ideal):
            # twist along a random homomorphism gamma -> g
            for _ in range(4):
                img = seeded.randrange(g.order)
                if g.mul(img, img) != 0:
                    continue
                hom = GroupHom(gamma, g, images=np.array([0, img])).validate()
                lhs = twist_module(cartier_dual(mod), hom, gamma)
                rhs = cartier_dual(twist_module(mod, hom, gamma))
                assert np.array_equal(lhs.mats, rhs.mats)


def test_twist_incompatible_rejected():
    g = named_group("S3")
    ring = group_ring(g, 2)
    gamma = named_group("C2")
    noncocycle = [0, next(x for x in range(6) if g.element_order(x) == 3)]
    with pytest.raises(IncompatibleActions):
        twist_module(ring, noncocycle, gamma)


def test_restrict_module():
    g = named_group("C2^3")
    ring = group_ring(g, 8)
    ideal, *_ = augmentation_sequence(ring)
    h = subgroups(g)[8]  # an order-4 subgroup
    assert h.order == 4
    res = restrict_module(ideal, h)
    assert res.order == 8 ** 7
    assert res.group.order == 4
    triv = restrict_module(ideal, closure(g, ()))
    assert all(np.array_equal(m, np.eye(7) % 8) for m in triv.mats)
    # index [G:H] copies of the regular module, order check
    res_ring = restrict_module(ring, h)
    assert res_ring.order == group_ring(h.as_group()[0], 8).order ** 2


def test_restrict_requires_subgroup():
    g = named_group("C2^3")
    other = named_group("V4")
    ring = group_ring(g, 2)
    with pytest.raises(NotASubgroup):
        restrict_module(ring, closure(other, (1,)))


def test_module_map_validation():
    g = named_group("C2")
    src = trivial_module(g, 4, 1)
    tgt = trivial_module(g, 2, 1)
    ModuleMap(src, tgt, [[1]])
    mixed = module_from_gen_mats(g, [2, 4], [[[1, 0], [0, 1]]])
    with pytest.raises(Exception):
        # Z/2 coordinate cannot map onto a generator of Z/4
        ModuleMap(mixed, trivial_module(g, 4, 1), [[1], [0]])


def test_parse_module_grammar():
    g = named_group("C2^3")
    ring = parse_module({"builtin": "group_ring", "m": 8}, g)
    assert ring.rank == 8
    ideal = parse_module({"builtin": "augmentation_ideal", "m": 8}, g)
    assert ideal.rank == 7
    dual = parse_module({"builtin": "dual", "of": {"builtin": "augmentation_ideal", "m": 8}}, g)
    assert dual.rank == 7
    triv = parse_module({"builtin": "trivial", "m": 4, "rank": 2}, g)
    assert triv.moduli == (4, 4)
    c2 = named_group("C2")
    explicit = parse_module({"moduli": [3], "action": [[[2]]]}, c2)
    assert explicit.act(1, [1]).tolist() == [2]


def test_zero_module_short_circuits():
    g = named_group("C2")
    z = parse_module({"builtin": "trivial", "m": 1, "rank": 3}, g)
    assert z.rank == 0 and z.order == 1
