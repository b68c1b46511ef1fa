"""Finite categories, their arity-1 operads and resolutions.

A category is given by named non-identity morphisms and a composition table;
identities are implicit.  Its operadic version lives in arity 1, so elements
of the free operad on a resolution's generators are composable *words*
(tuples of generator names, outermost first; the empty tuple is an identity).
Everything homological about a resolution happens in these word slices.

Built-ins: the single-morphism category, the two-arrow category V1->V2->V3,
the commutative-cube poset, and the one-object trivial category, together
with their standard resolutions and the bar-cobar resolution of any finite
category (generated by chains of composable non-identity morphisms).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .linalg import ChainComplexSlice, GradedSpace, homology_dims, vec_add
from .sigma import BasisElement, ColouredSigmaModule
from .freeop import FreeOperad, leaf, node

F = Fraction
ONE = F(1)

Word = tuple  # tuple of generator names, outermost first; () is an identity


@dataclass(frozen=True)
class Morphism:
    name: str
    src: str
    tgt: str


class CategoryError(ValueError):
    pass


class FiniteCategory:
    """Objects, non-identity morphisms, and a total composition table."""

    def __init__(self, objects, morphisms, compose):
        self.objects = list(objects)
        self.morphisms = [m if isinstance(m, Morphism) else Morphism(*m) for m in morphisms]
        self.by_name = {m.name: m for m in self.morphisms}
        if len(self.by_name) != len(self.morphisms):
            raise CategoryError("duplicate morphism names")
        for m in self.morphisms:
            if m.src not in self.objects or m.tgt not in self.objects:
                raise CategoryError(f"{m.name}: dangling endpoint")
        self.table = dict(compose)  # (g, f) -> h  for g after f
        self._saturate()
        self._validate()

    # -- composition ---------------------------------------------------------

    def composable(self, g: str, f: str) -> bool:
        return self.by_name[f].tgt == self.by_name[g].src

    def compose2(self, g: str, f: str):
        """g after f; returns a morphism name, or None for an identity."""
        if self.composable(g, f):
            return self.table[(g, f)]
        raise CategoryError(f"{g} after {f} not composable")

    def compose_word(self, names):
        """Composite of a word (outermost first); None encodes an identity."""
        result = None
        for name in reversed(names):
            if name is None:
                continue
            result = name if result is None else self.compose2(name, result)
        return result

    def _saturate(self):
        changed = True
        while changed:
            changed = False
            for g, f in itertools.product(self.by_name, repeat=2):
                if not self.composable(g, f) or (g, f) in self.table:
                    continue
                src, tgt = self.by_name[f].src, self.by_name[g].tgt
                candidates = [
                    m.name for m in self.morphisms if m.src == src and m.tgt == tgt
                ]
                if src == tgt:
                    candidates.append(None)  # the identity
                if len(candidates) == 1:
                    self.table[(g, f)] = candidates[0]
                    changed = True
                elif not candidates:
                    raise CategoryError(f"no possible composite for {g} after {f}")
        for g, f in itertools.product(self.by_name, repeat=2):
            if self.composable(g, f) and (g, f) not in self.table:
                raise CategoryError(f"ambiguous composite {g} after {f}; give it explicitly")

    def _validate(self):
        for (g, f), h in self.table.items():
            if g not in self.by_name or f not in self.by_name:
                raise CategoryError(f"composition table mentions unknown {g} or {f}")
            if not self.composable(g, f):
                raise CategoryError(f"table entry {g} after {f} not composable")
            if h is not None:
                hm = self.by_name.get(h)
                if hm is None:
                    raise CategoryError(f"unknown composite {h}")
                if hm.src != self.by_name[f].src or hm.tgt != self.by_name[g].tgt:
                    raise CategoryError(f"composite {h} has wrong endpoints")
            elif self.by_name[f].src != self.by_name[g].tgt:
                raise CategoryError(f"identity composite {g} after {f} has wrong endpoints")
        # associativity on all composable triples
        for h, g, f in itertools.product(self.by_name, repeat=3):
            if self.composable(g, f) and self.composable(h, g):
                lhs = self.compose_word((h, self.table[(g, f)]))
                rhs = self.compose_word((self.table[(h, g)], f))
                if lhs != rhs:
                    raise CategoryError(f"associativity fails on ({h},{g},{f})")

    @property
    def acyclic(self) -> bool:
        edges = {}
        for m in self.morphisms:
            edges.setdefault(m.src, set()).add(m.tgt)
        seen, stack = set(), set()

        def dfs(v):
            seen.add(v)
            stack.add(v)
            for w in edges.get(v, ()):
                if w in stack or (w not in seen and dfs(w)):
                    return True
            stack.discard(v)
            return False

        return not any(dfs(v) for v in list(edges) if v not in seen)

    def hom(self, src, tgt):
        """Morphisms src -> tgt, including the implicit identity."""
        out = [m.name for m in self.morphisms if m.src == src and m.tgt == tgt]
        if src == tgt:
            out.append(None)
        return out

    # -- JSON -----------------------------------------------------------------

    @classmethod
    def from_json(cls, data) -> "FiniteCategory":
        try:
            objects = data["objects"]
            morphisms = [Morphism(m["name"], m["src"], m["tgt"]) for m in data["morphisms"]]
            compose = {}
            for key, h in data.get("compose", {}).items():
                g, f = key.split("|")
                compose[(g, f)] = h
        except (KeyError, TypeError, AttributeError) as exc:
            raise CategoryError(f"bad category schema: {exc}") from exc
        return cls(objects, morphisms, compose)

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "morphisms": [{"name": m.name, "src": m.src, "tgt": m.tgt} for m in self.morphisms],
            "compose": {f"{g}|{f}": h for (g, f), h in sorted(self.table.items())},
        }


# ---------------------------------------------------------------------------
# resolutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResGen:
    name: str
    src: str
    tgt: str
    degree: int


class CategoryResolution:
    """A quasi-free arity-1 resolution of a category's operad.

    `diff` maps a generator name to {word: coefficient}; `phi` maps each
    degree-0 generator to a non-identity morphism of the category and is zero
    on higher degrees.
    """

    def __init__(self, cat: FiniteCategory, gens, diff, phi, name=""):
        self.cat = cat
        self.gens = [g if isinstance(g, ResGen) else ResGen(*g) for g in gens]
        self.by_name = {g.name: g for g in self.gens}
        if len(self.by_name) != len(self.gens):
            raise CategoryError("duplicate generator names")
        self.diff = {k: {Word(w): F(c) for w, c in v.items()} for k, v in diff.items()}
        self.phi = dict(phi)
        self.name = name
        self._word_cache: dict = {}

    # -- structure -------------------------------------------------------------

    def degree(self, gname: str) -> int:
        return self.by_name[gname].degree

    def word_degree(self, w: Word) -> int:
        return sum(self.by_name[g].degree for g in w)

    def word_src(self, w: Word, default=None):
        return self.by_name[w[-1]].src if w else default

    def word_tgt(self, w: Word, default=None):
        return self.by_name[w[0]].tgt if w else default

    def word_composable(self, w: Word) -> bool:
        return all(
            self.by_name[w[i]].src == self.by_name[w[i + 1]].tgt for i in range(len(w) - 1)
        )

    def generators_module(self) -> ColouredSigmaModule:
        elems = [BasisElement(g.name, g.degree, g.tgt, (g.src,)) for g in self.gens]
        return ColouredSigmaModule(tuple(self.cat.objects), elems)

    def operad(self) -> FreeOperad:
        return FreeOperad(self.generators_module())

    # -- differential on words ---------------------------------------------------

    def d_word(self, w: Word) -> dict:
        """Derivation extension of the generator differentials to a word."""
        out: dict = {}
        prefix = 0
        for i, g in enumerate(w):
            img = self.diff.get(g, {})
            if img:
                sign = F(-1) if prefix % 2 else ONE
                for ww, c in img.items():
                    key = w[:i] + ww + w[i + 1 :]
                    v = out.get(key, F(0)) + sign * c
                    if v:
                        out[key] = v
                    else:
                        out.pop(key, None)
            prefix += self.by_name[g].degree
        return out

    def d_vec(self, vec: dict) -> dict:
        out: dict = {}
        for w, c in vec.items():
            out = vec_add(out, self.d_word(w), c)
        return out

    # -- phi ---------------------------------------------------------------------

    def phi_word(self, w: Word):
        """(is_zero, morphism-or-None). Identity composites come back as None."""
        names = []
        for g in w:
            if self.by_name[g].degree > 0:
                return True, None
            m = self.phi.get(g)
            if m is None:
                return True, None
            names.append(m)
        return False, self.cat.compose_word(tuple(names))

    # -- assumption checks ---------------------------------------------------------

    def verify_assumptions(self) -> list:
        """List of human-readable violations; empty when the resolution is
        admissible for the coproduct construction."""
        issues = []
        for g in self.gens:
            if g.src not in self.cat.objects or g.tgt not in self.cat.objects:
                issues.append(f"{g.name}: colours outside the category")
        for g in self.gens:
            if g.degree == 0:
                m = self.phi.get(g.name)
                if m is None or m not in self.cat.by_name:
                    issues.append(f"{g.name}: degree-0 generator without a morphism image")
                else:
                    mm = self.cat.by_name[m]
                    if (mm.src, mm.tgt) != (g.src, g.tgt):
                        issues.append(f"{g.name}: image morphism has wrong endpoints")
            elif self.phi.get(g.name) is not None:
                issues.append(f"{g.name}: positive-degree generator with nonzero image")
        # colours and degrees of the differential
        for gname, img in self.diff.items():
            g = self.by_name[gname]
            for w, c in img.items():
                if not c:
                    continue
                if not self.word_composable(w):
                    issues.append(f"d{gname}: non-composable word {w}")
                    continue
                if self.word_degree(w) != g.degree - 1:
                    issues.append(f"d{gname}: term {w} has wrong degree")
                if self.word_src(w, g.src) != g.src or self.word_tgt(w, g.tgt) != g.tgt:
                    issues.append(f"d{gname}: term {w} has wrong colours")
        # degree-1 generators: d r = w1 - w2 with degree-0 words, equal images
        for g in self.gens:
            if g.degree != 1:
                continue
            img = {w: c for w, c in self.diff.get(g.name, {}).items() if c}
            if sorted(img.values()) != [F(-1), F(1)]:
                issues.append(f"d{g.name} is not a difference of two words")
                continue
            (w1, w2) = (w for w, c in sorted(img.items(), key=lambda kv: -kv[1]))
            if self.word_degree(w1) or self.word_degree(w2):
                issues.append(f"d{g.name} has positive-degree factors")
                continue
            z1, m1 = self.phi_word(w1)
            z2, m2 = self.phi_word(w2)
            if z1 or z2 or m1 != m2:
                issues.append(f"d{g.name}: the two words do not compose equally")
        # d^2 = 0
        for g in self.gens:
            dd = self.d_vec(self.diff.get(g.name, {}))
            if dd:
                issues.append(f"d^2 != 0 at {g.name}")
        # phi is a chain map: phi(d r) = 0 for every generator
        for g in self.gens:
            total: dict = {}
            for w, c in self.diff.get(g.name, {}).items():
                z, m = self.phi_word(w)
                if not z:
                    total[m] = total.get(m, F(0)) + c
            if any(total.values()):
                issues.append(f"phi(d {g.name}) != 0")
        return issues

    # -- word slices ------------------------------------------------------------

    def generator_digraph_acyclic(self) -> bool:
        edges = {}
        for g in self.gens:
            edges.setdefault(g.src, set()).add(g.tgt)
        seen, stack = set(), set()

        def dfs(v):
            seen.add(v)
            stack.add(v)
            for w in edges.get(v, ()):
                if w in stack or (w not in seen and dfs(w)):
                    return True
            stack.discard(v)
            return False

        return not any(dfs(v) for v in list(edges) if v not in seen)

    def words(self, src, tgt, max_degree=None, max_len=None):
        """All composable words src -> tgt (empty word when src == tgt)."""
        key = (src, tgt, max_degree, max_len)
        if key in self._word_cache:
            return self._word_cache[key]
        if max_len is None and not self.generator_digraph_acyclic():
            raise CategoryError("generator colour graph has a cycle: a word-length bound is mandatory")
        out = []

        def extend(word, cur_src, degree, length):
            if cur_src == src:
                out.append(Word(word))
            for g in self.gens:
                if g.tgt != cur_src:
                    continue
                if max_degree is not None and degree + g.degree > max_degree:
                    continue
                if max_len is not None and length + 1 > max_len:
                    continue
                extend(word + (g.name,), g.src, degree + g.degree, length + 1)

        extend((), tgt, 0, 0)
        out = sorted(set(out))
        self._word_cache[key] = out
        return out

    def slice_complex(self, src, tgt, max_degree=None, max_len=None) -> ChainComplexSlice:
        """The word slice as a chain complex.  When a length bound is given
        the result is the quotient by longer words (d terms outside the
        basis are dropped), which is again a complex."""
        ws = self.words(src, tgt, max_degree, max_len)
        basis = tuple((w, self.word_degree(w)) for w in ws)
        diff = {}
        known = set(ws)
        for w in ws:
            img = self.d_word(w)
            if max_len is None:
                assert set(img) <= known
            else:
                img = {k: v for k, v in img.items() if k in known}
            if img:
                diff[w] = img
        return ChainComplexSlice(GradedSpace(basis), diff)

    def verify(self, max_degree=None, max_len=None) -> dict:
        """Homology of every colour-pair slice against the category's homs."""
        report = {"resolution": self.name, "pairs": {}, "pass": True}
        if max_len is not None or max_degree is not None:
            report["truncated"] = {"max_degree": max_degree, "max_len": max_len}
        for src in self.cat.objects:
            for tgt in self.cat.objects:
                ws = self.words(src, tgt, max_degree, max_len)
                if not ws:
                    continue
                dims = homology_dims(self.slice_complex(src, tgt, max_degree, max_len))
                want = len(self.cat.hom(src, tgt))
                ok = dims.get(0, 0) == want and all(v == 0 for k, v in dims.items() if k > 0)
                report["pairs"][f"{src}->{tgt}"] = {
                    "homology": dims,
                    "morphisms": want,
                    "pass": ok,
                }
                report["pass"] = report["pass"] and ok
        return report


# ---------------------------------------------------------------------------
# built-in categories
# ---------------------------------------------------------------------------

def trivial_category() -> FiniteCategory:
    return FiniteCategory(["V1"], [], {})


def single_morphism_category() -> FiniteCategory:
    return FiniteCategory(["V1", "V2"], [Morphism("f", "V1", "V2")], {})


def two_arrow_category() -> FiniteCategory:
    return FiniteCategory(
        ["V1", "V2", "V3"],
        [Morphism("f", "V1", "V2"), Morphism("g", "V2", "V3"), Morphism("h", "V1", "V3")],
        {("g", "f"): "h"},
    )


def _cube_bits(k: int) -> int:
    return k - 1


def cube_category() -> FiniteCategory:
    """Poset of the commutative cube: vertex k <-> bitmask k-1, one morphism
    b -> a whenever bits(b) is a proper subset of bits(a)."""
    objects = [str(k) for k in range(1, 9)]
    morphisms = []
    for a in range(1, 9):
        for b in range(1, 9):
            if a != b and (_cube_bits(b) & _cube_bits(a)) == _cube_bits(b):
                morphisms.append(Morphism(f"{a}{b}", str(b), str(a)))
    compose = {}
    for g in morphisms:
        for f in morphisms:
            if f.tgt == g.src:
                compose[(g.name, f.name)] = f"{g.tgt}{f.src}"
    return FiniteCategory(objects, morphisms, compose)


# ---------------------------------------------------------------------------
# built-in resolutions
# ---------------------------------------------------------------------------

def trivial_resolution(cat: FiniteCategory, name="trivial") -> CategoryResolution:
    """One degree-0 generator per non-identity morphism, zero differential.

    A resolution only when the category is freely generated by its listed
    morphisms and composites are not separate morphisms (e.g. the
    single-morphism category)."""
    gens = [ResGen(m.name, m.src, m.tgt, 0) for m in cat.morphisms]
    return CategoryResolution(cat, gens, {}, {m.name: m.name for m in cat.morphisms}, name)


def single_morphism_homotopy_resolution(cat=None) -> CategoryResolution:
    cat = cat or single_morphism_category()
    gens = [
        ResGen("f", "V1", "V2", 0),
        ResGen("g", "V1", "V2", 0),
        ResGen("H", "V1", "V2", 1),
    ]
    diff = {"H": {("f",): ONE, ("g",): F(-1)}}
    return CategoryResolution(cat, gens, diff, {"f": "f", "g": "f"}, "homotopy")


def single_morphism_sum_counterexample(cat=None) -> CategoryResolution:
    """Same generators but dH = f + g: violates the admissibility assumptions."""
    cat = cat or single_morphism_category()
    gens = [
        ResGen("f", "V1", "V2", 0),
        ResGen("g", "V1", "V2", 0),
        ResGen("H", "V1", "V2", 1),
    ]
    diff = {"H": {("f",): ONE, ("g",): ONE}}
    return CategoryResolution(cat, gens, diff, {"f": "f", "g": "f"}, "sum-counterexample")


def two_arrow_presented_resolution(cat=None) -> CategoryResolution:
    cat = cat or two_arrow_category()
    gens = [
        ResGen("f", "V1", "V2", 0),
        ResGen("g", "V2", "V3", 0),
        ResGen("h", "V1", "V3", 0),
        ResGen("H", "V1", "V3", 1),
    ]
    diff = {"H": {("g", "f"): ONE, ("h",): F(-1)}}
    phi = {"f": "f", "g": "g", "h": "h"}
    return CategoryResolution(cat, gens, diff, phi, "presented")


def two_arrow_minimal_resolution(cat=None) -> CategoryResolution:
    cat = cat or two_arrow_category()
    gens = [ResGen("f", "V1", "V2", 0), ResGen("g", "V2", "V3", 0)]
    return CategoryResolution(cat, gens, {}, {"f": "f", "g": "g"}, "minimal")


def cube_resolution(cat=None) -> CategoryResolution:
    """Edges in degree 0, faces in degree 1, one degree-2 generator filling
    the hexagon of face-edge words from vertex 1 to vertex 8."""
    cat = cat or cube_category()
    gens = []
    phi = {}
    diff = {}
    edges = []
    for a in range(1, 9):
        for b in range(1, 9):
            ba, bb = _cube_bits(a), _cube_bits(b)
            if bb & ba == bb and bin(ba ^ bb).count("1") == 1:
                edges.append((a, b))
                gens.append(ResGen(f"{a}{b}", str(b), str(a), 0))
                phi[f"{a}{b}"] = f"{a}{b}"
    faces = []
    for corners in itertools.combinations(range(1, 9), 4):
        a, b, c, d = sorted(corners, reverse=True)
        ba, bb, bc, bd = (_cube_bits(x) for x in (a, b, c, d))
        # a face: d -> {b, c} -> a with two-bit span
        if not (bd & bb == bd and bd & bc == bd and bb & ba == bb and bc & ba == bc):
            continue
        if bin(ba ^ bd).count("1") != 2 or bin(bb ^ bd).count("1") != 1 or bin(bc ^ bd).count("1") != 1:
            continue
        name = f"{a}{b}{c}{d}"
        faces.append(name)
        gens.append(ResGen(name, str(d), str(a), 1))
        diff[name] = {(f"{a}{c}", f"{c}{d}"): ONE, (f"{a}{b}", f"{b}{d}"): F(-1)}
    gens.append(ResGen("Hcube", "1", "8", 2))
    diff["Hcube"] = {
        ("84", "4321"): ONE,
        ("8743", "31"): ONE,
        ("8642", "21"): F(-1),
        ("87", "7531"): ONE,
        ("8765", "51"): F(-1),
        ("86", "6521"): F(-1),
    }
    return CategoryResolution(cat, gens, diff, phi, "cube")


def builtin_resolutions(cat: FiniteCategory) -> list:
    """The built-in resolutions of the built-in categories."""
    names = {m.name for m in cat.morphisms}
    if not names and len(cat.objects) == 1:
        return [trivial_resolution(cat)]
    if names == {"f"} and len(cat.objects) == 2:
        return [trivial_resolution(cat), single_morphism_homotopy_resolution(cat)]
    if names == {"f", "g", "h"} and len(cat.objects) == 3:
        return [two_arrow_presented_resolution(cat), two_arrow_minimal_resolution(cat)]
    if len(cat.objects) == 8 and len(names) == 19:
        return [cube_resolution(cat)]
    raise CategoryError("unknown built-in category")


# ---------------------------------------------------------------------------
# bar-cobar
# ---------------------------------------------------------------------------

def chain_name(ms) -> str:
    return "(" + "|".join(ms) + ")"


def chains_of(cat: FiniteCategory, max_len=None):
    """Composable tuples (f_n, ..., f_1) of non-identity morphisms."""
    if max_len is None:
        if not cat.acyclic:
            raise CategoryError("non-acyclic category: chain-length bound is mandatory")
        max_len = len(cat.objects)
    chains = [[(m.name,) for m in cat.morphisms]]
    while len(chains) < max_len:
        prev = chains[-1]
        new = []
        for ch in prev:
            top = cat.by_name[ch[0]].tgt
            for m in cat.morphisms:
                if m.src == top:
                    new.append((m.name,) + ch)
        if not new:
            break
        chains.append(new)
    return [ch for level in chains for ch in level]


def bar_cobar(cat: FiniteCategory, max_len=None) -> CategoryResolution:
    """The bar-cobar resolution: generators are chains, with the splitting
    plus contraction differential.  Contractions that hit an identity are
    rewritten through the operad units (the term becomes the empty word for
    length-2 chains and dies inside longer ones)."""
    chains = chains_of(cat, max_len)
    gens = []
    diff = {}
    phi = {}
    for ch in chains:
        n = len(ch)
        nm = chain_name(ch)
        src = cat.by_name[ch[-1]].src
        tgt = cat.by_name[ch[0]].tgt
        gens.append(ResGen(nm, src, tgt, n - 1))
        if n == 1:
            phi[nm] = ch[0]
            continue
        img: dict = {}
        for i in range(1, n):
            upper = ch[: n - i]
            lower = ch[n - i :]
            sign = ONE if (i + n + 1) % 2 == 0 else F(-1)
            w = (chain_name(upper), chain_name(lower))
            img[w] = img.get(w, F(0)) + sign
        for i in range(1, n):
            # compose f_{i+1} f_i, 1-based from the right end of the tuple
            idx = n - i - 1  # position of f_{i+1} in the tuple
            comp = cat.compose2(ch[idx], ch[idx + 1])
            sign = ONE if (n - i) % 2 == 0 else F(-1)
            if comp is None:
                if n == 2:
                    img[()] = img.get((), F(0)) + sign
                continue  # identity inside a longer chain: degenerate term
            new = ch[:idx] + (comp,) + ch[idx + 2 :]
            w = (chain_name(new),)
            img[w] = img.get(w, F(0)) + sign
        diff[nm] = {w: c for w, c in img.items() if c}
    return CategoryResolution(cat, gens, diff, phi, "bar-cobar")
