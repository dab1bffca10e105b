import numpy as np
import pytest

from liftspan.cover import (
    DeckGroup,
    NonGenerating,
    abelian_cover,
    build_cover,
    genus_of_cover,
    parse_cover_text,
    trivial_cover,
)
from liftspan.lattice import Lattice, QuotientCoords, is_primitive, rank, rank_mod_p
from liftspan.words import SurfacePresentation, commutator, homology_class, parse_word

a1, b1, a2, b2 = 1, 2, 3, 4


@pytest.fixture(scope="module")
def cover22():
    return abelian_cover(2, 2)


@pytest.fixture(scope="module")
def cover23():
    return abelian_cover(2, 3)


def regular_rep(perms):
    """Regular representation of the group generated by `perms` (right action)."""
    ident = tuple(range(len(perms[0])))
    elems, seen = [ident], {ident}
    i = 0
    while i < len(elems):
        for p in perms:
            f = tuple(p[x] for x in elems[i])
            if f not in seen:
                seen.add(f)
                elems.append(f)
        i += 1
    index = {e: k for k, e in enumerate(elems)}
    return [[index[tuple(p[x] for x in e)] for e in elems] for p in perms]


def test_m2_stats(cover22):
    C = cover22
    assert (C.V, C.E, C.F) == (16, 64, 16)
    assert C.cover_genus == 17 and C.h1_rank == 34
    assert C.h1_quotient_data() == {"ambient_rank": 49, "boundary_rank": 15, "h1_rank": 34, "torsion": []}


def test_m3_stats(cover23):
    assert cover23.cover_genus == 82
    assert cover23.h1_quotient_data()["h1_rank"] == 164
    assert cover23.h1_quotient_data()["torsion"] == []


def test_genus_of_cover():
    assert genus_of_cover(2, 16) == 17
    assert genus_of_cover(2, 81) == 82
    assert genus_of_cover(5, 1) == 5
    with pytest.raises(ValueError):
        genus_of_cover(2, 0)


def test_degenerate_groups():
    with pytest.raises(NonGenerating):
        abelian_cover(2, 1)
    C = trivial_cover(2)
    assert C.degenerate and C.n == 1 and C.cover_genus == 2


def test_non_generating_permutations():
    # both images fix the regular structure only on a subgroup
    with pytest.raises(NonGenerating):
        DeckGroup.from_permutations([[1, 0, 2, 3]] * 4, min_generators=4)


def test_relator_must_map_to_identity():
    # S3 images whose commutators do not cancel
    s, t = (1, 0, 2), (0, 2, 1)
    imgs = regular_rep([s, t, s, s])
    with pytest.raises(ValueError):
        build_cover(SurfacePresentation(2), DeckGroup.from_permutations(imgs, 2))


def test_nonabelian_cover():
    s, r = (1, 0, 2), (1, 2, 0)   # S3 with a1 -> s, b1 -> s, a2 -> r, b2 -> id
    imgs = regular_rep([s, s, r, (0, 1, 2)])
    grp = DeckGroup.from_permutations(imgs, min_generators=2)
    C = build_cover(SurfacePresentation(2), grp)
    assert C.n == 6 and C.cover_genus == genus_of_cover(2, 6) == 7
    assert C.h1_quotient_data()["h1_rank"] == 14
    assert C.degenerate
    lift = C.lift_decompose((a2,))
    assert lift.d == 3 and len(lift) == 2


def test_boundary_invariants(cover22, cover23):
    for C in (cover22, cover23):
        faces = C.face_chains
        assert not faces.sum(axis=0).any()
        B = C.boundary_matrix
        assert rank(B) == C.n - 1
        for row in faces:
            assert not C.boundary_of_chain(row).any()


@pytest.mark.parametrize("word,d,count", [("a1 b1 A1 B1", 1, 16), ("a1", 2, 8), ("a1 b1", 2, 8)])
def test_lift_decompose_m2(cover22, word, d, count):
    lift = cover22.lift_decompose(parse_word(word))
    assert lift.d == d and len(lift) == count


def test_lift_decompose_m3(cover23):
    lift = cover23.lift_decompose((a1, b1))
    assert lift.d == 3 and len(lift) == 27


def test_components_are_cycles_and_transfer(cover22, cover23):
    for C in (cover22, cover23):
        for word in ("a1", "a1 b1", "b1 A2", "a1 b1 A1 B1", "a1 a2 b2 A1"):
            w = parse_word(word)
            lift = C.lift_decompose(w)
            assert lift.d * len(lift) == C.n
            base = homology_class(lift.curve.letters, 2)
            for comp in lift.components:
                assert not C.boundary_of_chain(comp.chain).any()
                assert C.push_down(comp.chain) == tuple(lift.d * x for x in base)


def test_deck_action_permutes_components(cover23):
    C = cover23
    lift = C.lift_decompose(parse_word("a1 B1 a2"))
    chains = {tuple(c.chain.tolist()) for c in lift.components}
    first = lift.components[0]
    orbit = set()
    for h in range(C.n):
        t = tuple(C.translate(h, first.chain).tolist())
        assert t in chains
        orbit.add(t)
    assert orbit == chains


def test_sep_components_nonzero_two_routes(cover22):
    C = cover22
    lift = C.lift_decompose(commutator((a1,), (b1,)))
    assert lift.d == 1 and len(lift) == 16
    B = C.boundary_lattice
    q = QuotientCoords.of(C.boundary_matrix, C.ambient_rank)
    for comp in lift.components:
        v = C.component_homology(comp).tolist()
        assert v not in B
        assert any(q(v))


def test_trivial_cover_classes():
    C = trivial_cover(2)
    assert C.ambient_rank == 4
    for k in (a1, b1, a2, b2):
        lift = C.lift_decompose((k,))
        v = C.component_homology(lift.components[0]).tolist()
        assert is_primitive(v, C.boundary_matrix)
        assert not is_primitive([2 * x for x in v], C.boundary_matrix)
    sep = C.lift_decompose(commutator((a1,), (b1,)))
    assert not C.component_homology(sep.components[0]).any()


def test_quotient_torsion_free(cover22):
    assert cover22.h1_quotient_data()["torsion"] == []


@pytest.mark.parametrize("g,m", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_grid_invariants(g, m):
    C = abelian_cover(g, m)
    assert C.euler_characteristic == C.n * (2 - 2 * g)
    faces = C.face_chains
    assert not faces.sum(axis=0).any()
    # rank over F_p bounds the rational rank from below; the zero sum bounds it by n-1
    assert rank_mod_p(C.boundary_matrix) == C.n - 1


def test_cover_text_roundtrip(cover22):
    info = parse_cover_text(cover22.to_text())
    assert info["vertices"] == 16 and info["edge_count"] == 64 and info["faces"] == 16
    assert len(info["edges"]) == 64 and len(info["tree"]) == 15
    assert info["boundary"] == cover22.boundary_matrix
    assert info["cycle_edges"] == cover22.cycle_edges.tolist()


def test_tree_is_bfs_spanning_tree(cover23):
    C = cover23
    assert len(C.tree_edges) == C.n - 1
    assert len(C.cycle_edges) == C.ambient_rank
    # every vertex reached from the identity by tree edges
    adj = {}
    for e in C.tree_edges:
        v, k = divmod(e, C.ngen)
        u = int(C.right[k, v])
        adj.setdefault(v, []).append(u)
        adj.setdefault(u, []).append(v)
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for u in adj.get(v, []):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    assert len(seen) == C.n
