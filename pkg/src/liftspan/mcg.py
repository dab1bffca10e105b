"""Surface automorphisms given by generator images, and simple closed curves
produced as mapping class orbits of seed curves."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .words import (
    CyclicWord,
    GroupWord,
    SurfacePresentation,
    commutator,
    cyclic_canonical,
    cyclic_dehn_reduce,
    format_word,
    free_reduce,
    gen_a,
    gen_b,
    homology_class,
    inverse,
    is_relator_conjugate,
    multiply,
    parse_word,
)

NONSEPARATING = "nonseparating"
SEPARATING = "separating"


class RelatorNotPreserved(ValueError):
    pass


class NotSymplectic(ValueError):
    pass


def symplectic_form(genus: int) -> list[list[int]]:
    n = 2 * genus
    J = [[0] * n for _ in range(n)]
    for i in range(genus):
        J[2 * i][2 * i + 1] = 1
        J[2 * i + 1][2 * i] = -1
    return J


def intersection_pairing(u: Sequence[int], v: Sequence[int]) -> int:
    """Algebraic pairing <u, v> = u^T J v in the basis (a1, b1, ...)."""
    return sum(u[2 * i] * v[2 * i + 1] - u[2 * i + 1] * v[2 * i] for i in range(len(u) // 2))


@dataclass(frozen=True)
class EndoByImages:
    genus: int
    images: tuple  # images[k-1] is the image of letter k
    name: str = "id"
    validated: bool = False

    @classmethod
    def identity(cls, genus: int) -> "EndoByImages":
        return cls(genus, tuple((k,) for k in range(1, 2 * genus + 1)), "id")

    def image(self, x: int) -> GroupWord:
        return self.images[x - 1] if x > 0 else inverse(self.images[-x - 1])

    def __call__(self, w: Sequence[int]) -> GroupWord:
        return free_reduce(y for x in w for y in self.image(x))

    def then(self, other: "EndoByImages") -> "EndoByImages":
        """The composite 'self first, then other'."""
        imgs = tuple(other(im) for im in self.images)
        return EndoByImages(self.genus, imgs, f"{other.name}*{self.name}",
                            self.validated and other.validated)

    def abelianization(self) -> list[list[int]]:
        # column k is the class of the image of generator k
        cols = [homology_class(im, self.genus) for im in self.images]
        n = 2 * self.genus
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def apply(e: EndoByImages, w: Sequence[int]) -> GroupWord:
    return e(w)


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def validate_automorphism(e: EndoByImages) -> EndoByImages:
    pres = SurfacePresentation(e.genus)
    if len(e.images) != 2 * e.genus:
        raise ValueError("need one image per generator")
    sign = is_relator_conjugate(e(pres.relator), pres)
    if sign != 1:
        raise RelatorNotPreserved(
            f"{e.name}: relator image {format_word(e(pres.relator))} is not conjugate to R")
    M = e.abelianization()
    J = symplectic_form(e.genus)
    if _matmul(_matmul(_transpose(M), J), M) != J:
        raise NotSymplectic(f"{e.name}: abelianization is not symplectic")
    return replace(e, validated=True)


def _twist(genus: int, name: str, changes: dict[int, GroupWord]) -> EndoByImages:
    imgs = [(k,) for k in range(1, 2 * genus + 1)]
    for k, w in changes.items():
        imgs[k - 1] = free_reduce(w)
    return EndoByImages(genus, tuple(imgs), name)


def twist_curves(genus: int) -> dict[str, GroupWord]:
    """The 3g-1 curves a_i, b_i and c_i = b_i^-1 a_{i+1}, as based loops."""
    curves = {}
    for i in range(1, genus + 1):
        curves[f"a{i}"] = (gen_a(i),)
        curves[f"b{i}"] = (gen_b(i),)
    for i in range(1, genus):
        curves[f"c{i}"] = (-gen_b(i), gen_a(i + 1))
    return curves


def _candidate_twists(genus: int) -> list[EndoByImages]:
    out = []
    for i in range(1, genus + 1):
        a, b = gen_a(i), gen_b(i)
        for s, suffix in ((1, ""), (-1, "^-1")):
            # twist about a_i: b_i -> b_i a_i^s ; twist about b_i: a_i -> a_i b_i^s
            out.append(_twist(genus, f"Ta{i}{suffix}", {b: (b,) + ((a,) if s > 0 else (-a,))}))
            out.append(_twist(genus, f"Tb{i}{suffix}", {a: (a,) + ((b,) if s > 0 else (-b,))}))
    for i in range(1, genus):
        c = (-gen_b(i), gen_a(i + 1))
        for s, suffix in ((1, ""), (-1, "^-1")):
            cs = c if s > 0 else inverse(c)
            changes = {
                gen_a(i): cs + (gen_a(i),),
                gen_b(i + 1): cs + (gen_b(i + 1),),
            }
            # handles i, i+1 map to c [a_i,b_i][a_i+1,b_i+1] c^-1; conjugate the rest to match
            for j in set(range(1, genus + 1)) - {i, i + 1}:
                for x in (gen_a(j), gen_b(j)):
                    changes[x] = cs + (x,) + inverse(cs)
            out.append(_twist(genus, f"Tc{i}{suffix}", changes))
    order = {n: k for k, n in enumerate(
        [f"T{c}{s}" for c in twist_curves(genus) for s in ("", "^-1")])}
    return sorted(out, key=lambda t: order[t.name])


_TWIST_CACHE: dict[int, list[EndoByImages]] = {}


def twist_generators(genus: int) -> list[EndoByImages]:
    """Twists about the 3g-1 curves of :func:`twist_curves` and their inverses.

    Every map passes :func:`validate_automorphism`; a failure means a broken
    formula and is raised.
    """
    if genus < 2:
        raise ValueError("genus must be >= 2")
    if genus not in _TWIST_CACHE:
        _TWIST_CACHE[genus] = [validate_automorphism(t) for t in _candidate_twists(genus)]
    return list(_TWIST_CACHE[genus])


@dataclass(frozen=True)
class CurveClass:
    word: CyclicWord
    seed: str
    provenance: tuple = ()
    topo_type: str = NONSEPARATING

    @property
    def depth(self) -> int:
        return len(self.provenance)

    @property
    def letters(self) -> GroupWord:
        return self.word.letters

    def homology(self, genus: int) -> tuple[int, ...]:
        return homology_class(self.word.letters, genus)


def curve_key(w: Sequence[int], pres: SurfacePresentation) -> CyclicWord:
    """Dedupe key: canonical class of the curve or its reverse, whichever is smaller."""
    c = cyclic_canonical(cyclic_dehn_reduce(w, pres))
    return min(c, c.inverse())


def classify_word(w: Sequence[int], genus: int) -> str:
    return SEPARATING if not any(homology_class(w, genus)) else NONSEPARATING


def classify(c: CurveClass, genus: int | None = None) -> str:
    if genus is None:
        genus = max((abs(x) + 1) // 2 for x in c.letters)
    return classify_word(c.letters, genus)


def seed_curves(genus: int) -> dict[str, GroupWord]:
    return {
        "nonsep": (gen_a(1),),
        "sep": commutator((gen_a(1),), (gen_b(1),)),
    }


def enumerate_simple_curves(genus: int, depth: int, filter: str = "both",
                            generators: list[EndoByImages] | None = None) -> list[CurveClass]:
    """Breadth-first orbit of the seed curves under the twist generators.

    Returns curves in discovery order: by depth, then by seed, then by the
    order in which generators were applied.  Orbits of the two seeds never
    meet, since automorphisms preserve the zero homology class.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if filter not in ("nonsep", "sep", "both", NONSEPARATING, SEPARATING):
        raise ValueError(f"unknown filter {filter!r}")
    pres = SurfacePresentation(genus)
    gens = twist_generators(genus) if generators is None else generators
    seeds = seed_curves(genus)
    wanted = []
    if filter in ("nonsep", "both", NONSEPARATING):
        wanted.append("nonsep")
    if filter in ("sep", "both", SEPARATING):
        wanted.append("sep")

    out: list[CurveClass] = []
    for name in wanted:
        topo = SEPARATING if name == "sep" else NONSEPARATING
        start = curve_key(seeds[name], pres)
        seen = {start}
        frontier = [CurveClass(start, name, (), topo)]
        out.extend(frontier)
        for _ in range(depth):
            nxt = []
            for cur in frontier:
                for t in gens:
                    key = curve_key(t(cur.letters), pres)
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append(CurveClass(key, name, cur.provenance + (t.name,), topo))
            out.extend(nxt)
            frontier = nxt
    out.sort(key=lambda c: (c.depth, wanted.index(c.seed)))
    return out


def is_primitive_vector(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def write_curves(curves: Iterable[CurveClass], path: str | Path) -> None:
    lines = []
    for c in curves:
        prov = ",".join(c.provenance) if c.provenance else "-"
        lines.append(f"{format_word(c.letters)}  # seed={c.seed} type={c.topo_type} path={prov}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_curves(path: str | Path, genus: int | None = None) -> list[CurveClass]:
    curves = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        text, _, comment = raw.partition("#")
        if not text.strip():
            continue
        meta = dict(item.split("=", 1) for item in comment.split() if "=" in item)
        word = cyclic_canonical(parse_word(text, genus))
        prov = tuple(p for p in meta.get("path", "-").split(",") if p and p != "-")
        topo = meta.get("type") or (classify_word(word.letters, genus) if genus else NONSEPARATING)
        curves.append(CurveClass(word, meta.get("seed", "file"), prov, topo))
    return curves
