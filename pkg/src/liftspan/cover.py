"""Finite regular covers of closed surfaces as labeled Cayley graphs with 2-cells.

The vertices of the cover's 1-skeleton are the elements of the deck group D.
For each vertex v and generator x there is one edge from v to v*phi(x),
labeled x and oriented along x; reading x^-1 traverses it backwards.  One
lift of the surface relator is attached as a 2-cell at every vertex.

Chains on edges are integer vectors indexed by ``v * 2g + (k - 1)`` for the
generator with letter k.  Cycle coordinates keep only the non-tree edges of a
BFS spanning tree rooted at the identity; a cycle is determined by them.
"""
from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .lattice import Lattice, QuotientCoords, quotient_invariants, write_triplets
from .words import CyclicWord, GroupWord, SurfacePresentation, cyclic_canonical, format_letter


class NonGenerating(ValueError):
    """The generator images do not generate the deck group (cover disconnected)."""


class DeckGroup:
    """A finite group with elements 0..n-1 (0 is the identity) and a chosen
    image for every surface generator."""

    def __init__(self, mul: np.ndarray, images: Sequence[int], label: str,
                 abelian_m: int | None = None, min_generators: int | None = None):
        self.mul = mul
        self.n = len(mul)
        self.images = list(images)
        self.label = label
        self.abelian_m = abelian_m
        self.min_generators = min_generators
        self.inv = np.empty(self.n, dtype=np.int64)
        for x in range(self.n):
            self.inv[x] = int(np.nonzero(mul[x] == 0)[0][0])

    @classmethod
    def abelian(cls, m: int, genus: int) -> "DeckGroup":
        """(Z/m)^{2g} with a_1 -> e_1, b_1 -> e_2, ..., b_g -> e_{2g}."""
        if m < 2:
            raise NonGenerating(f"m={m}: the deck group would be trivial (degenerate cover)")
        r = 2 * genus
        n = m ** r
        vecs = np.array(np.unravel_index(np.arange(n), (m,) * r, order="F")).T
        weights = m ** np.arange(r)
        mul = ((vecs[:, None, :] + vecs[None, :, :]) % m) @ weights
        images = [int(weights[k]) for k in range(r)]
        grp = cls(mul.astype(np.int64), images, f"(Z/{m})^{r}", abelian_m=m, min_generators=r)
        grp._vectors = vecs
        return grp

    @classmethod
    def trivial(cls, genus: int) -> "DeckGroup":
        return cls(np.zeros((1, 1), dtype=np.int64), [0] * (2 * genus), "trivial", min_generators=0)

    @classmethod
    def from_permutations(cls, images: Sequence[Sequence[int]],
                          min_generators: int | None = None) -> "DeckGroup":
        """Group generated by permutations of {0..n-1}, which must act regularly.

        The product p*q means "apply p, then q".
        """
        if not images:
            raise ValueError("need generator images")
        degree = len(images[0])
        gens = [tuple(int(x) for x in p) for p in images]
        for p in gens:
            if sorted(p) != list(range(degree)):
                raise ValueError("image is not a permutation")
        ident = tuple(range(degree))
        elems = [ident]
        index = {ident: 0}
        queue = deque([ident])
        while queue:
            e = queue.popleft()
            for p in gens:
                f = tuple(p[i] for i in e)
                if f not in index:
                    index[f] = len(elems)
                    elems.append(f)
                    queue.append(f)
        n = len(elems)
        if n != degree:
            raise NonGenerating(
                f"images generate a group of order {n} on {degree} points; not the regular representation")
        mul = np.empty((n, n), dtype=np.int64)
        for i, e in enumerate(elems):
            for j, f in enumerate(elems):
                mul[i, j] = index[tuple(f[k] for k in e)]
        return cls(mul, [index[p] for p in gens], f"perm group of order {n}",
                   min_generators=min_generators)

    def image_of_word(self, w: Sequence[int]) -> int:
        x = 0
        for k in w:
            y = self.images[abs(k) - 1]
            x = int(self.mul[x, y if k > 0 else self.inv[y]])
        return x

    def order(self, x: int) -> int:
        d, y = 1, x
        while y != 0:
            y = int(self.mul[y, x])
            d += 1
        return d

    def vector(self, x: int) -> tuple[int, ...]:
        return tuple(int(t) for t in self._vectors[x])


def genus_of_cover(genus: int, n: int) -> int:
    """Genus of an n-sheeted cover of a closed genus-g surface (chi multiplies)."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    return n * (genus - 1) + 1


@dataclass(frozen=True)
class Component:
    start: int                 # fiber point (deck element) where the lift starts
    chain: np.ndarray          # edge chain in Z^E of the closed lift


@dataclass
class LiftDecomposition:
    curve: CyclicWord
    d: int
    components: list

    def __len__(self) -> int:
        return len(self.components)


class CoverComplex:
    def __init__(self, pres: SurfacePresentation, group: DeckGroup):
        g = pres.genus
        self.pres = pres
        self.genus = g
        self.group = group
        self.n = n = group.n
        self.ngen = 2 * g
        if group.min_generators is not None and group.min_generators < 2 * g:
            self.degenerate = True
        else:
            self.degenerate = False
        # right[k][v] = v * phi(x_k) ; rinv[k][v] = v * phi(x_k)^-1
        self.right = np.array([group.mul[:, group.images[k]] for k in range(2 * g)], dtype=np.int64)
        self.rinv = np.array([group.mul[:, group.inv[group.images[k]]] for k in range(2 * g)],
                             dtype=np.int64)
        self._build_tree()

    # -- combinatorics -------------------------------------------------------

    @property
    def V(self) -> int:
        return self.n

    @property
    def E(self) -> int:
        return self.n * self.ngen

    @property
    def F(self) -> int:
        return self.n

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @property
    def cover_genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @property
    def ambient_rank(self) -> int:
        return self.E - self.V + 1

    @property
    def h1_rank(self) -> int:
        return 2 * self.cover_genus

    def edge(self, v: int, k: int) -> int:
        return v * self.ngen + (k - 1)

    def _build_tree(self) -> None:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        tree = []
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for k in range(1, self.ngen + 1):
                u = int(self.right[k - 1, v])
                if not seen[u]:
                    seen[u] = True
                    tree.append(self.edge(v, k))
                    queue.append(u)
        if not seen.all():
            raise NonGenerating("generator images do not generate the deck group")
        self.tree_edges = sorted(tree)
        tset = set(tree)
        self.cycle_edges = np.array([e for e in range(self.E) if e not in tset], dtype=np.int64)

    # -- chains ---------------------------------------------------------------

    def walk_chains(self, w: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Edge chains of reading w from every vertex: (n x E array, end vertices)."""
        n = self.n
        chains = np.zeros((n, self.E), dtype=np.int64)
        pos = np.arange(n, dtype=np.int64)
        rows = np.arange(n)
        for x in w:
            k = abs(x)
            if x > 0:
                chains[rows, pos * self.ngen + (k - 1)] += 1
                pos = self.right[k - 1, pos]
            else:
                pos = self.rinv[k - 1, pos]
                chains[rows, pos * self.ngen + (k - 1)] -= 1
        return chains, pos

    def walk(self, v: int, w: Sequence[int]) -> tuple[np.ndarray, int]:
        chain = np.zeros(self.E, dtype=np.int64)
        for x in w:
            k = abs(x)
            if x > 0:
                chain[self.edge(v, k)] += 1
                v = int(self.right[k - 1, v])
            else:
                v = int(self.rinv[k - 1, v])
                chain[self.edge(v, k)] -= 1
        return chain, v

    def boundary_of_chain(self, chain: np.ndarray) -> np.ndarray:
        """Vertex boundary of an edge chain; zero exactly for cycles."""
        out = np.zeros(self.n, dtype=np.int64)
        c = chain.reshape(self.n, self.ngen)
        for k in range(self.ngen):
            np.add.at(out, self.right[k], c[:, k])
            np.add.at(out, np.arange(self.n), -c[:, k])
        return out

    def cycle_coords(self, chain: np.ndarray) -> np.ndarray:
        return chain[..., self.cycle_edges]

    def push_down(self, chain: np.ndarray) -> tuple[int, ...]:
        """Image of an edge chain in H_1 of the base, basis (a1, b1, ...)."""
        return tuple(int(x) for x in chain.reshape(self.n, self.ngen).sum(axis=0))

    def translate(self, h: int, chain: np.ndarray) -> np.ndarray:
        """Deck transformation v -> h*v applied to an edge chain."""
        c = chain.reshape(self.n, self.ngen)
        out = np.zeros_like(c)
        out[self.group.mul[h]] = c
        return out.reshape(-1)

    # -- 2-cells and homology ---------------------------------------------------

    @cached_property
    def face_chains(self) -> np.ndarray:
        chains, ends = self.walk_chains(self.pres.relator)
        if not (ends == np.arange(self.n)).all():
            raise RuntimeError("relator does not lift to closed loops")
        return chains

    @cached_property
    def boundary_matrix(self) -> list:
        """2-cell boundaries in cycle coordinates, one row per vertex."""
        return self.cycle_coords(self.face_chains).tolist()

    @cached_property
    def boundary_lattice(self) -> Lattice:
        return Lattice(self.ambient_rank, self.boundary_matrix)

    @cached_property
    def h1_coords(self) -> QuotientCoords:
        return QuotientCoords.of(self.boundary_matrix, self.ambient_rank)

    def h1_quotient_data(self) -> dict:
        B = self.boundary_matrix
        factors, free = quotient_invariants(B, self.ambient_rank)
        return {
            "ambient_rank": self.ambient_rank,
            "boundary_rank": self.ambient_rank - free,
            "h1_rank": free,
            "torsion": factors,
        }

    def stats(self) -> dict:
        return {
            "V": self.V, "E": self.E, "F": self.F,
            "euler_characteristic": self.euler_characteristic,
            "genus": self.cover_genus,
            "rank": self.h1_rank,
            "ambient_rank": self.ambient_rank,
            "degree": self.n,
            "deck_group": self.group.label,
        }

    # -- lifts of curves ------------------------------------------------------

    def lift_decompose(self, w: Sequence[int] | CyclicWord) -> LiftDecomposition:
        cw = w if isinstance(w, CyclicWord) else cyclic_canonical(w)
        if cw.is_trivial:
            raise ValueError("cannot lift the trivial curve")
        letters = cw.letters
        step = self.group.image_of_word(letters)
        d = self.group.order(step)
        chains, ends = self.walk_chains(letters)
        comps = []
        done = np.zeros(self.n, dtype=bool)
        for v in range(self.n):
            if done[v]:
                continue
            total = np.zeros(self.E, dtype=np.int64)
            u = v
            for _ in range(d):
                done[u] = True
                total += chains[u]
                u = int(ends[u])
            comps.append(Component(v, total))
        return LiftDecomposition(cw, d, comps)

    def component_homology(self, comp: Component) -> np.ndarray:
        return self.cycle_coords(comp.chain)

    def component_matrix(self, lift: LiftDecomposition) -> np.ndarray:
        return np.array([self.cycle_coords(c.chain) for c in lift.components], dtype=np.int64)

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        out = io.StringIO()
        out.write("# liftspan cover\n")
        out.write(f"genus {self.genus}\n")
        out.write(f"deck_group {self.group.label}\n")
        out.write(f"vertices {self.V}\n")
        out.write(f"edges {self.E}\n")
        out.write(f"faces {self.F}\n")
        tree = set(self.tree_edges)
        for v in range(self.n):
            for k in range(1, self.ngen + 1):
                e = self.edge(v, k)
                u = int(self.right[k - 1, v])
                out.write(f"edge {e} {v} {u} {format_letter(k)}{' tree' if e in tree else ''}\n")
        out.write("cycle_edges " + " ".join(str(int(e)) for e in self.cycle_edges) + "\n")
        out.write("boundary\n")
        write_triplets(self.boundary_matrix, out, self.ambient_rank)
        return out.getvalue()


def build_cover(pres: SurfacePresentation, group: DeckGroup) -> CoverComplex:
    if len(group.images) != 2 * pres.genus:
        raise ValueError("need one deck image per surface generator")
    if group.image_of_word(pres.relator) != 0:
        raise ValueError("generator images do not satisfy the surface relator")
    return CoverComplex(pres, group)


def abelian_cover(genus: int, m: int) -> CoverComplex:
    return build_cover(SurfacePresentation(genus), DeckGroup.abelian(m, genus))


def trivial_cover(genus: int) -> CoverComplex:
    """The identity cover (n = 1); flagged degenerate."""
    return build_cover(SurfacePresentation(genus), DeckGroup.trivial(genus))


def parse_cover_text(text: str) -> dict:
    """Read back the header counts, edges and boundary triplets of :meth:`to_text`."""
    info: dict = {"edges": [], "tree": []}
    lines = iter(text.splitlines())
    for line in lines:
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        key = parts[0]
        if key in ("genus", "vertices", "faces"):
            info[key] = int(parts[1])
        elif key == "deck_group":
            info[key] = " ".join(parts[1:])
        elif key == "edges":
            info["edge_count"] = int(parts[1])
        elif key == "edge":
            e, src, dst, label = int(parts[1]), int(parts[2]), int(parts[3]), parts[4]
            info["edges"].append((e, src, dst, label))
            if len(parts) > 5 and parts[5] == "tree":
                info["tree"].append(e)
        elif key == "cycle_edges":
            info["cycle_edges"] = [int(x) for x in parts[1:]]
        elif key == "boundary":
            from .lattice import read_triplets
            info["boundary"] = read_triplets("\n".join(lines))
            break
    return info
