"""Named desk-scale groups and split extensions used by tests and reports."""

from functools import lru_cache

import numpy as np

from .groups import FiniteGroup, semidirect_product


def _quaternion8():
    # elements (sign, letter) with letters 1,i,j,k; index 0 is +1
    letters = ["1", "i", "j", "k"]
    elems = [(s, l) for l in letters for s in (1, -1)]
    elems.sort(key=lambda e: (letters.index(e[1]), -e[0]))
    mul_letter = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("j", "1"): (1, "j"), ("k", "1"): (1, "k"),
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    }
    index = {e: n for n, e in enumerate(elems)}
    table = np.empty((8, 8), dtype=np.int64)
    for a, (sa, la) in enumerate(elems):
        for b, (sb, lb) in enumerate(elems):
            sc, lc = mul_letter[(la, lb)]
            table[a, b] = index[(sa * sb * sc, lc)]
    return FiniteGroup.from_table(table, name="Q8")


def _dihedral(n):
    rot = tuple((i + 1) % n for i in range(n))
    flip = tuple((n - i) % n for i in range(n))
    return FiniteGroup.from_perm_gens([rot, flip], name=f"D{2 * n}")


_BUILDERS = {
    "C1": lambda: FiniteGroup.abelian([], name="C1"),
    "C2": lambda: FiniteGroup.abelian([2]),
    "C3": lambda: FiniteGroup.abelian([3]),
    "C4": lambda: FiniteGroup.abelian([4]),
    "V4": lambda: FiniteGroup.abelian([2, 2], name="V4"),
    "C5": lambda: FiniteGroup.abelian([5]),
    "C6": lambda: FiniteGroup.abelian([6]),
    "C8": lambda: FiniteGroup.abelian([8]),
    "C2xC4": lambda: FiniteGroup.abelian([2, 4]),
    "C2^3": lambda: FiniteGroup.abelian([2, 2, 2], name="C2^3"),
    "C12": lambda: FiniteGroup.abelian([12]),
    "C2xC6": lambda: FiniteGroup.abelian([2, 6]),
    "C2^2xC4": lambda: FiniteGroup.abelian([2, 2, 4], name="C2^2xC4"),
    "S3": lambda: FiniteGroup.from_perm_gens([(1, 0, 2), (1, 2, 0)], name="S3"),
    "D8": lambda: _dihedral(4),
    "D12": lambda: _dihedral(6),
    "Q8": _quaternion8,
    "A4": lambda: FiniteGroup.from_perm_gens([(1, 2, 0, 3), (1, 0, 3, 2)], name="A4"),
}

GROUP_NAMES = tuple(_BUILDERS)

# non-bicyclic members whose restriction kernel over maximal bicyclic
# subgroups is provably nonzero (max bicyclic order < |G|)
SHA_CATALOG = ("C2^3", "D8", "Q8", "C2^2xC4")

# acting groups small enough for exhaustive induced-module checks
INDUCED_CATALOG = ("C2", "C3", "C4", "V4", "C6", "S3", "C8", "C2xC4",
                   "C2^3", "D8", "Q8", "C12", "D12", "A4")


@lru_cache(maxsize=None)
def named_group(name):
    if name not in _BUILDERS:
        raise KeyError(f"unknown catalog group {name!r}")
    return _BUILDERS[name]()


def catalog_groups(max_order=None):
    out = []
    for name in GROUP_NAMES:
        g = named_group(name)
        if max_order is None or g.order <= max_order:
            out.append((name, g))
    return out


def split_extension_specs():
    """Catalog of split extensions A x| G with |E| <= 24.

    Action matrices are per generator of G under the project row convention
    (left action a @ M).
    """
    return [
        {"name": "C3x|C2(inv)", "A": [3], "G": named_group("C2"), "act": [[[2]]]},
        {"name": "C4x|C2(inv)", "A": [4], "G": named_group("C2"), "act": [[[3]]]},
        {"name": "C3xC2(direct)", "A": [3], "G": named_group("C2"), "act": [[[1]]]},
        {"name": "V4x|C3(rot)", "A": [2, 2], "G": named_group("C3"),
         "act": [[[0, 1], [1, 1]]]},
        {"name": "C5x|C2(inv)", "A": [5], "G": named_group("C2"), "act": [[[4]]]},
        {"name": "C5x|C4(mul2)", "A": [5], "G": named_group("C4"), "act": [[[2]]]},
        {"name": "C4xC2(direct)", "A": [4], "G": named_group("C2"), "act": [[[1]]]},
    ]


def build_split_extension(spec):
    """(E, s, pi, iota, A_group, G_group, gen_mats) for a catalog entry."""
    a = FiniteGroup.abelian(spec["A"])
    g = spec["G"]
    e, s, pi, iota = semidirect_product(a, g, spec["act"], name=spec["name"])
    return e, s, pi, iota, a, g, spec["act"]
