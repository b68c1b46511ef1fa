"""Coloured operads whose algebras are category-shaped diagrams.

Given an operad presentation A (generators with a terminating rewrite table
to planar normal forms; the symmetric action is free, carried by the leaf
labelling) and a finite category, the diagram operad is generated by one copy
of each A-generator per object plus the category's morphisms, modulo:

  * morphism composition (arity-1 chains compose in the category; identities
    evaporate into the operad unit),
  * the intertwining relation  f . a_{src f}  =  a_{tgt f} . f^(x ar a),
  * the colourized A-rewrites.

Elements are planar trees; every vertex is either ("op", gen, colour) or
("mor", name), and leaves carry the global labels.  Normalization pushes
morphisms to the leaf edges, composes them, and rewrites the remaining
monochrome operation cluster to its normal form; the result is the canonical
form a (x) f_1 (x) ... (x) f_n (x) labelling on which equality is decided.
Rewrite patterns are only applied to degree-0 generators, where the moves
carry no Koszul signs; graded generator sets are accepted with an empty
rewrite table (the intertwining and composition moves cross nothing graded).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import perms
from .category import FiniteCategory
from .linalg import vec_add

F = Fraction
ONE = F(1)

PTree = tuple  # ("L", label) | ("N", head, (children...)), head: ("op", g, v) | ("mor", f)


def pleaf(label):
    return ("L", label)


def pop_node(gen, colour, children):
    return ("N", ("op", gen, colour), tuple(children))


def pmor_node(name, child):
    return ("N", ("mor", name), (child,))


def ptree_str(t) -> str:
    if t[0] == "L":
        return f"L{t[1]}"
    head = t[1]
    if head[0] == "mor":
        return f"{head[1]}*{ptree_str(t[2][0])}"
    return f"{head[1]}@{head[2]}({','.join(ptree_str(c) for c in t[2])})"


def ptree_leaves(t):
    if t[0] == "L":
        return [t[1]]
    out = []
    for c in t[2]:
        out.extend(ptree_leaves(c))
    return out


def prelabel(t, mapping):
    if t[0] == "L":
        return ("L", mapping[t[1]])
    return ("N", t[1], tuple(prelabel(c, mapping) for c in t[2]))


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpGen:
    name: str
    arity: int
    degree: int


def parse_pattern(s: str):
    """Parse "mu2(mu2(1,2),3)" into a pattern tree; integers are slots."""
    s = s.replace(" ", "")
    pos = 0

    def parse():
        nonlocal pos
        start = pos
        while pos < len(s) and s[pos] not in "(),":
            pos += 1
        token = s[start:pos]
        if pos < len(s) and s[pos] == "(":
            pos += 1  # consume "("
            children = [parse()]
            while s[pos] == ",":
                pos += 1
                children.append(parse())
            assert s[pos] == ")", f"bad pattern {s}"
            pos += 1
            return ("P", token, tuple(children))
        return ("S", int(token))

    tree = parse()
    assert pos == len(s), f"trailing junk in pattern {s}"
    return tree


class OperadPresentation:
    def __init__(self, generators, rewrites=()):
        self.generators = [g if isinstance(g, OpGen) else OpGen(*g) for g in generators]
        self.by_name = {g.name: g for g in self.generators}
        self.rewrites = []
        for lhs, rhs in rewrites:
            l = parse_pattern(lhs) if isinstance(lhs, str) else lhs
            r = parse_pattern(rhs) if isinstance(rhs, str) else rhs
            self.rewrites.append((l, r))
        if self.rewrites and any(g.degree for g in self.generators):
            raise ValueError("rewrite tables are only supported for degree-0 generators")

    @classmethod
    def from_json(cls, data):
        gens = [OpGen(g["name"], g["arity"], g.get("degree", 0)) for g in data["generators"]]
        return cls(gens, [tuple(rw) for rw in data.get("rewrites", [])])


def ass_presentation() -> OperadPresentation:
    return OperadPresentation(
        [("m2", 2, 0)], [("m2(m2(1,2),3)", "m2(1,m2(2,3))")]
    )


# ---------------------------------------------------------------------------
# the diagram operad
# ---------------------------------------------------------------------------

class DiagramOperad:
    def __init__(self, presentation: OperadPresentation, cat: FiniteCategory,
                 max_rewrite_steps=100000):
        self.pres = presentation
        self.cat = cat
        self.max_steps = max_rewrite_steps
        self._basis_cache: dict = {}

    # -- degrees and colours -----------------------------------------------------

    def tree_out(self, t, ins=None):
        if t[0] == "L":
            return None if ins is None else ins[t[1] - 1]
        head = t[1]
        if head[0] == "mor":
            return self.cat.by_name[head[1]].tgt
        return head[2]

    def tree_degree(self, t) -> int:
        if t[0] == "L":
            return 0
        d = self.pres.by_name[t[1][1]].degree if t[1][0] == "op" else 0
        return d + sum(self.tree_degree(c) for c in t[2])

    # -- normalization -------------------------------------------------------------

    def _step(self, t):
        """One rewriting step anywhere in the tree, or None."""
        if t[0] == "L":
            return None
        head, children = t[1], t[2]
        if head[0] == "mor":
            child = children[0]
            if child[0] == "N" and child[1][0] == "mor":
                comp = self.cat.compose2(head[1], child[1][1])
                if comp is None:
                    return child[2][0]
                return pmor_node(comp, child[2][0])
            if child[0] == "N" and child[1][0] == "op":
                f = self.cat.by_name[head[1]]
                _, g, v = child[1]
                assert f.src == v, "intertwining applied at wrong colour"
                wrapped = [pmor_node(head[1], c) for c in child[2]]
                return pop_node(g, f.tgt, wrapped)
        if head[0] == "op":
            m = self._match_rewrite(t)
            if m is not None:
                return m
        for i, c in enumerate(children):
            r = self._step(c)
            if r is not None:
                out = list(children)
                out[i] = r
                return ("N", head, tuple(out))
        return None

    def _match_rewrite(self, t):
        colour = t[1][2]
        for lhs, rhs in self.pres.rewrites:
            bind = {}
            if self._match(lhs, t, colour, bind):
                return self._build(rhs, colour, bind)
        return None

    def _match(self, pat, t, colour, bind) -> bool:
        if pat[0] == "S":
            bind[pat[1]] = t
            return True
        if t[0] != "N" or t[1][0] != "op" or t[1][1] != pat[1] or t[1][2] != colour:
            return False
        return all(self._match(p, c, colour, bind) for p, c in zip(pat[2], t[2]))

    def _build(self, pat, colour, bind):
        if pat[0] == "S":
            return bind[pat[1]]
        return pop_node(pat[1], colour, [self._build(p, colour, bind) for p in pat[2]])

    def normalize_tree(self, t):
        steps = 0
        while True:
            r = self._step(t)
            if r is None:
                return t
            t = r
            steps += 1
            if steps > self.max_steps:
                raise ValueError("rewriting did not terminate (non-confluent table?)")

    def normalize(self, vec: dict) -> dict:
        out: dict = {}
        for t, c in vec.items():
            key = self.normalize_tree(t)
            v = out.get(key, F(0)) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return out

    def confluence_smoke_test(self, colour, rounds=25, seed=0) -> bool:
        """Idempotence of normalization on random op-trees; a cheap
        non-confluence detector for user tables."""
        rng = random.Random(seed)
        gens = [g for g in self.pres.generators]
        if not gens:
            return True

        def random_tree(n_ops):
            if n_ops == 0:
                return pleaf(0)
            g = rng.choice(gens)
            kids = []
            budget = n_ops - 1
            for i in range(g.arity):
                take = rng.randint(0, budget) if i < g.arity - 1 else budget
                kids.append(random_tree(take))
                budget -= self._count_ops(kids[-1])
            return pop_node(g.name, colour, kids)

        for _ in range(rounds):
            t = random_tree(rng.randint(1, 4))
            labels = ptree_leaves(t)
            lab = {0: 0}
            order = rng.sample(range(1, len(labels) + 1), len(labels))
            t = self._relabel_slots(t, iter(order))
            n1 = self.normalize_tree(t)
            if self.normalize_tree(n1) != n1:
                return False
        return True

    def _relabel_slots(self, t, it):
        if t[0] == "L":
            return ("L", next(it))
        return ("N", t[1], tuple(self._relabel_slots(c, it) for c in t[2]))

    def _count_ops(self, t):
        if t[0] == "L":
            return 0
        return 1 + sum(self._count_ops(c) for c in t[2])

    # -- symmetric action, composition ----------------------------------------------

    def act_tree(self, t, sigma):
        inv = perms.inverse(sigma)
        return prelabel(t, {i + 1: inv[i] for i in range(len(inv))})

    def graft(self, t, i, s):
        """Planar substitution at leaf i (sign-free: degree-0 usage only)."""
        m = len(ptree_leaves(s))
        amap = {j: (j if j <= i else j + m - 1) for j in range(1, len(ptree_leaves(t)) + 1)}
        smap = {j: j + i - 1 for j in range(1, m + 1)}
        t2 = prelabel(t, amap)
        s2 = prelabel(s, smap)

        def build(sub):
            if sub[0] == "L":
                return s2 if sub[1] == i else sub
            return ("N", sub[1], tuple(build(c) for c in sub[2]))

        return self.normalize_tree(build(t2))

    # -- canonical slice bases ---------------------------------------------------------

    def op_normal_forms(self, n: int, colour) -> list:
        """Normal-form operation monomials of arity n at one colour, with all
        leaf labellings."""
        key = ("nf", n, colour)
        if key in self._basis_cache:
            return self._basis_cache[key]
        shapes = self._op_shapes(n)
        out = []
        for shape in shapes:
            for labelling in perms.all_perms(n):
                t = self._relabel_slots_planar(shape, colour, labelling)
                if self.normalize_tree(t) == t:
                    out.append(t)
        out = sorted(set(out), key=ptree_str)
        self._basis_cache[key] = out
        return out

    def _op_shapes(self, n: int):
        """Planar shapes (leaves unlabelled, encoded 0) with n leaves."""
        if n == 1:
            shapes = [pleaf(0)]
        else:
            shapes = []
        for g in self.pres.generators:
            if g.arity > n or g.arity < 1:
                continue
            for split in _compositions(n, g.arity):
                for kids in itertools.product(*(self._op_shapes(k) for k in split)):
                    shapes.append(("N", ("op", g.name, None), tuple(kids)))
        return shapes

    def _relabel_slots_planar(self, shape, colour, labelling):
        it = iter(labelling)

        def build(sub):
            if sub[0] == "L":
                return pleaf(next(it))
            return pop_node(sub[1][1], colour, [build(c) for c in sub[2]])

        return build(shape)

    def slice_basis(self, out, ins) -> list:
        """Canonical forms of the (out; ins) slice: a normal operation
        monomial with a morphism (or nothing) on every leaf edge."""
        key = ("slice", out, tuple(ins))
        if key in self._basis_cache:
            return self._basis_cache[key]
        n = len(ins)
        results = []
        for opm in self.op_normal_forms(n, out):
            choices = []
            ok = True
            for lab in sorted(ptree_leaves(opm)):
                opts = []
                for m in self.cat.hom(ins[lab - 1], out):
                    opts.append(m)  # None encodes the identity
                if not opts:
                    ok = False
                    break
                choices.append((lab, opts))
            if not ok:
                continue
            for combo in itertools.product(*(opts for _, opts in choices)):
                wrap = dict(zip((lab for lab, _ in choices), combo))

                def build(sub):
                    if sub[0] == "L":
                        m = wrap[sub[1]]
                        return sub if m is None else pmor_node(m, sub)
                    return ("N", sub[1], tuple(build(c) for c in sub[2]))

                results.append(build(opm))
        results = sorted(set(results), key=ptree_str)
        self._basis_cache[key] = results
        return results

    def dim(self, out, ins) -> int:
        return len(self.slice_basis(out, ins))

    # -- relation checks ------------------------------------------------------------

    def check_intertwining(self) -> list:
        """normalize(f . a_{src f}) == normalize(a_{tgt f} . f^(x ar)) everywhere."""
        bad = []
        for g in self.pres.generators:
            for m in self.cat.morphisms:
                a_src = pop_node(g.name, m.src, [pleaf(i + 1) for i in range(g.arity)])
                lhs = self.normalize_tree(pmor_node(m.name, a_src))
                kids = [pmor_node(m.name, pleaf(i + 1)) for i in range(g.arity)]
                rhs = self.normalize_tree(pop_node(g.name, m.tgt, kids))
                if lhs != rhs:
                    bad.append((g.name, m.name))
        return bad


def _compositions(n, k):
    """Ordered k-tuples of positive integers summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# functoriality
# ---------------------------------------------------------------------------

class OperadMorphismData:
    """A map of presentations: generator -> element (dict of planar op-trees
    over the target presentation with slot leaves 1..arity)."""

    def __init__(self, source: OperadPresentation, target: OperadPresentation, values):
        self.source = source
        self.target = target
        self.values = {g: dict(v) for g, v in values.items()}

    def compose_with(self, other: "OperadMorphismData") -> "OperadMorphismData":
        """self after other (other's target is self's source)."""
        values = {}
        for g, vec in other.values.items():
            out: dict = {}
            for t, c in vec.items():
                for t2, c2 in self.apply_op_tree(t).items():
                    out = vec_add(out, {t2: c2}, c)
            values[g] = out
        return OperadMorphismData(other.source, self.target, values)

    def apply_op_tree(self, t) -> dict:
        """Image of a colourless op-tree with slot leaves (degree-0 use)."""
        if t[0] == "L":
            return {t: ONE}
        _, (_, gname, _), children = t
        imgs = [self.apply_op_tree(c) for c in children]
        out: dict = {}
        base = self.values[gname]
        for tb, cb in base.items():
            for combo in itertools.product(*(im.items() for im in imgs)):
                coeff = cb
                for _, c in combo:
                    coeff *= c
                built = _plug_slots(tb, [tc for tc, _ in combo])
                out = vec_add(out, {built: ONE}, coeff)
        return out


def _plug_slots(t, kids):
    """Replace slot leaf i of a colourless op-tree by kids[i-1], renumbering
    the slots of the result 1..N in planar order afterwards."""
    def build(sub):
        if sub[0] == "L":
            return kids[sub[1] - 1]
        return ("N", sub[1], tuple(build(c) for c in sub[2]))

    raw = build(t)
    counter = itertools.count(1)

    def renumber(sub):
        if sub[0] == "L":
            return ("L", next(counter))
        return ("N", sub[1], tuple(renumber(c) for c in sub[2]))

    return renumber(raw)


def apply_functor(xi: OperadMorphismData, cat: FiniteCategory,
                  max_arity=3) -> list:
    """Check that a_v -> (xi a)_v respects the colourized rewrites of the
    source on every colour; returns the violations."""
    target_op = DiagramOperad(xi.target, cat)
    bad = []
    for lhs, rhs in xi.source.rewrites:
        for v in cat.objects:
            l_img = _image_of_pattern(xi, lhs, v, target_op)
            r_img = _image_of_pattern(xi, rhs, v, target_op)
            if l_img != r_img:
                bad.append((v, lhs, rhs))
    return bad


def _image_of_pattern(xi, pat, colour, target_op):
    def to_tree(p):
        if p[0] == "S":
            return ("L", p[1])
        return ("N", ("op", p[1], None), tuple(to_tree(c) for c in p[2]))

    vec = xi.apply_op_tree(to_tree(pat))
    out = {}
    for t, c in vec.items():
        coloured = _colourize(t, colour)
        nf = target_op.normalize_tree(coloured)
        out = vec_add(out, {nf: ONE}, c)
    return out


def _colourize(t, colour):
    if t[0] == "L":
        return t
    return ("N", ("op", t[1][1], colour), tuple(_colourize(c, colour) for c in t[2]))
