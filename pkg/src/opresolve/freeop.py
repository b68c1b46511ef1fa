"""Free coloured Sigma-operads on a module of generators.

Basis: shuffle trees.  A tree is a nested tuple, either a leaf ("L", label)
or a vertex ("N", generator name, (children...)).  Children are stored in
planar order, and a tree is canonical when at every vertex the minimal leaf
labels of the children increase strictly from left to right.  Leaves carry
the global input labels 1..n of the whole tree; the bare leaf ("L", 1) is
the operad unit of its colour.

Sign conventions.  The element denoted by a planar tree is the tensor of its
vertex decorations in depth-first (pre-)order.  Reordering the children of a
vertex by pi rewrites the decoration g to g.pi and multiplies by the Koszul
sign of permuting the child blocks; substituting an element b into a leaf
crosses b past every vertex that follows that leaf in pre-order.  All
operations (composition, symmetric action, derivation differentials) reduce
to these two moves, so the operad axioms hold with their usual signs and are
exercised by the test-suite rather than assumed.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from . import perms
from .sigma import ColouredSigmaModule
from .linalg import vec_add

F = Fraction
ONE = F(1)

Tree = tuple


def leaf(label: int) -> Tree:
    return ("L", label)


def node(gen: str, children) -> Tree:
    return ("N", gen, tuple(children))


def is_leaf(t: Tree) -> bool:
    return t[0] == "L"


def tree_leaves(t: Tree) -> list:
    """Leaf labels in planar (pre-order) sequence."""
    if is_leaf(t):
        return [t[1]]
    out = []
    for c in t[2]:
        out.extend(tree_leaves(c))
    return out


def tree_min_leaf(t: Tree) -> int:
    if is_leaf(t):
        return t[1]
    return min(tree_min_leaf(c) for c in t[2])


def tree_vertices(t: Tree) -> list:
    """Generator names in pre-order."""
    if is_leaf(t):
        return []
    out = [t[1]]
    for c in t[2]:
        out.extend(tree_vertices(c))
    return out


def tree_weight(t: Tree) -> int:
    return len(tree_vertices(t))


def relabel(t: Tree, mapping) -> Tree:
    if is_leaf(t):
        return ("L", mapping[t[1]])
    return ("N", t[1], tuple(relabel(c, mapping) for c in t[2]))


def tree_str(t: Tree) -> str:
    if is_leaf(t):
        return f"L{t[1]}"
    return f"{t[1]}({','.join(tree_str(c) for c in t[2])})"


class FreeOperad:
    """The free coloured Sigma-operad on a ColouredSigmaModule of generators."""

    def __init__(self, gens: ColouredSigmaModule):
        self.gens = gens
        self._deg_cache: dict = {}
        self._enum_cache: dict = {}

    # -- structural helpers --------------------------------------------------

    def gen_info(self, name):
        return self.gens.by_name[name]

    def tree_degree(self, t: Tree) -> int:
        if t in self._deg_cache:
            return self._deg_cache[t]
        d = 0 if is_leaf(t) else (
            self.gen_info(t[1]).degree + sum(self.tree_degree(c) for c in t[2])
        )
        self._deg_cache[t] = d
        return d

    def tree_out(self, t: Tree, unit_colour=None):
        if is_leaf(t):
            return unit_colour
        return self.gen_info(t[1]).out

    def validate_tree(self, t: Tree, out, ins):
        """Colour consistency and canonical child order; raises on failure."""
        labels = tree_leaves(t)
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise ValueError(f"bad leaf labels in {tree_str(t)}")

        def check(sub, colour):
            if is_leaf(sub):
                if ins[sub[1] - 1] != colour:
                    raise ValueError(f"leaf {sub[1]} colour mismatch in {tree_str(t)}")
                return
            info = self.gen_info(sub[1])
            if info.out != colour:
                raise ValueError(f"vertex {sub[1]} output colour mismatch")
            if len(sub[2]) != info.arity:
                raise ValueError(f"vertex {sub[1]} arity mismatch")
            mins = [tree_min_leaf(c) for c in sub[2]]
            if mins != sorted(mins):
                raise ValueError(f"children out of order in {tree_str(t)}")
            for c, w in zip(sub[2], info.ins):
                check(c, w)

        check(t, out)

    # -- normalization ---------------------------------------------------------

    def normalize_tree(self, t: Tree) -> dict:
        """Rewrite an arbitrary planar tree into canonical combinations."""
        if is_leaf(t):
            return {t: ONE}
        _, g, children = t
        child_terms = [self.normalize_tree(c) for c in children]
        out: dict = {}
        for combo in itertools.product(*(ct.items() for ct in child_terms)):
            kids = [k for k, _ in combo]
            coeff = ONE
            for _, c in combo:
                coeff *= c
            mins = [tree_min_leaf(k) for k in kids]
            order = sorted(range(len(kids)), key=lambda j: mins[j])
            pi = tuple(j + 1 for j in order)
            sorted_kids = tuple(kids[j] for j in order)
            if pi == perms.identity(len(kids)):
                key = ("N", g, sorted_kids)
                out[key] = out.get(key, F(0)) + coeff
                continue
            sign = perms.koszul_sign([self.tree_degree(k) for k in kids], pi)
            for g2, c2 in self.gens.act({g: ONE}, pi).items():
                key = ("N", g2, sorted_kids)
                out[key] = out.get(key, F(0)) + coeff * F(sign) * c2
        return {k: v for k, v in out.items() if v}

    # -- substitution -----------------------------------------------------------

    def substitute(self, t: Tree, kids: dict) -> tuple:
        """Replace leaves of t by globally-labelled trees; (tree, sign).

        `kids` maps a leaf label of t to its replacement tree.  The sign is
        the Koszul cost of moving each replacement block from the end of the
        tensor word to its planar slot.  The result is NOT normalized.
        """
        positions = tree_leaves(t)  # labels in planar order
        after = self._degrees_after_leaves(t)
        e = 0
        for lab, sub in kids.items():
            d = self.tree_degree(sub)
            if d % 2:
                e += after[lab] % 2
        # crossings between replacement blocks at planar-inverted label pairs
        labs = sorted(kids)
        pos = {lab: positions.index(lab) for lab in labs}
        for i, la in enumerate(labs):
            for lb in labs[i + 1 :]:
                if pos[la] > pos[lb]:
                    e += (self.tree_degree(kids[la]) * self.tree_degree(kids[lb])) % 2

        def build(sub):
            if is_leaf(sub):
                return kids.get(sub[1], sub)
            return ("N", sub[1], tuple(build(c) for c in sub[2]))

        return build(t), (-1) ** (e % 2)

    def _degrees_after_leaves(self, t: Tree) -> dict:
        """For each leaf label, the total degree of vertices after it in pre-order."""
        seq = []  # ("v", degree) / ("l", label) in pre-order

        def walk(sub):
            if is_leaf(sub):
                seq.append(("l", sub[1]))
                return
            seq.append(("v", self.gen_info(sub[1]).degree))
            for c in sub[2]:
                walk(c)

        walk(t)
        out = {}
        acc = 0
        for kind, val in reversed(seq):
            if kind == "v":
                acc += val
            else:
                out[val] = acc
        return out

    # -- elements ---------------------------------------------------------------

    def element(self, out, ins, terms=None) -> "OperadElement":
        return OperadElement(self, out, tuple(ins), dict(terms or {}))

    def unit(self, colour) -> "OperadElement":
        return self.element(colour, (colour,), {leaf(1): ONE})

    def single(self, gen_name, coeff=ONE) -> "OperadElement":
        info = self.gen_info(gen_name)
        t = node(gen_name, [leaf(i + 1) for i in range(info.arity)])
        return self.element(info.out, info.ins, {t: coeff})

    def enumerate_slice(self, out, ins, max_degree, _chain_guard=None):
        """All canonical trees with the given colours and degree <= max_degree."""
        labelled = tuple((i + 1, c) for i, c in enumerate(ins))
        return self._enumerate(out, labelled, max_degree)

    def _enumerate(self, out, labelled, max_degree):
        key = (out, labelled, max_degree)
        if key in self._enum_cache:
            return self._enum_cache[key]
        results = []
        if len(labelled) == 1 and labelled[0][1] == out:
            results.append(leaf(labelled[0][0]))
        labels = [l for l, _ in labelled]
        colour_of = dict(labelled)
        for e in self.gens.elements:
            if e.out != out or e.arity > len(labelled) or e.arity == 0:
                continue
            if self.gen_info(e.name).degree > max_degree:
                continue
            budget = max_degree - e.degree
            for blocks in _ordered_partitions(labels, e.arity):
                # children chosen left to right within the remaining budget
                def rec(p, remaining):
                    if p == e.arity:
                        yield []
                        return
                    block = tuple((l, colour_of[l]) for l in blocks[p])
                    for child in self._enumerate(e.ins[p], block, remaining):
                        used = self.tree_degree(child)
                        for rest in rec(p + 1, remaining - used):
                            yield [child] + rest

                for children in rec(0, budget):
                    results.append(node(e.name, children))
        results = sorted(set(results), key=tree_str)
        self._enum_cache[key] = results
        return results

    def check_unary_degree_zero_acyclic(self):
        """Detect colour cycles through degree-0 unary generators (these make
        slice bases infinite)."""
        edges = {}
        for e in self.gens.elements:
            if e.arity == 1 and e.degree == 0:
                edges.setdefault(e.ins[0], set()).add(e.out)
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


def _ordered_partitions(labels, k):
    """Ordered partitions of the label set into k nonempty blocks whose minima
    increase; the canonical child arrangement of shuffle trees."""
    labels = sorted(labels)
    if k == 1:
        yield [tuple(labels)]
        return
    if len(labels) < k:
        return
    first, rest = labels[0], labels[1:]
    # choose the remainder of block 1 among rest; recurse on what is left
    for r in range(0, len(rest) - k + 2):
        for extra in itertools.combinations(rest, r):
            block1 = (first,) + extra
            remaining = [l for l in rest if l not in extra]
            for tail in _ordered_partitions(remaining, k - 1):
                yield [block1] + tail


class OperadElement:
    """Finite linear combination of canonical trees in one colour slice."""

    __slots__ = ("op", "out", "ins", "terms")

    def __init__(self, op: FreeOperad, out, ins, terms):
        self.op = op
        self.out = out
        self.ins = tuple(ins)
        self.terms = {t: c for t, c in terms.items() if c}

    @property
    def arity(self) -> int:
        return len(self.ins)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self):
        return sorted({self.op.tree_degree(t) for t in self.terms})

    def __add__(self, other):
        assert (self.out, self.ins) == (other.out, other.ins)
        return OperadElement(self.op, self.out, self.ins, vec_add(self.terms, other.terms))

    def __sub__(self, other):
        return self + other.scale(F(-1))

    def scale(self, c):
        return OperadElement(self.op, self.out, self.ins, {t: c * v for t, v in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, OperadElement)
            and self.out == other.out
            and self.ins == other.ins
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for t in sorted(self.terms, key=tree_str):
            c = self.terms[t]
            bits.append(f"({c})*{tree_str(t)}")
        return " + ".join(bits)

    def map_terms(self, f):
        out: dict = {}
        for t, c in self.terms.items():
            out = vec_add(out, f(t), c)
        return OperadElement(self.op, self.out, self.ins, out)

    # -- symmetric action -----------------------------------------------------

    def act(self, sigma) -> "OperadElement":
        assert len(sigma) == self.arity
        inv = perms.inverse(sigma)
        new_ins = perms.act_tuple(self.ins, sigma)

        def relabel_and_normalize(t):
            return self.op.normalize_tree(relabel(t, {i + 1: inv[i] for i in range(len(inv))}))

        out: dict = {}
        for t, c in self.terms.items():
            out = vec_add(out, relabel_and_normalize(t), c)
        return OperadElement(self.op, self.out, new_ins, out)

    # -- composition ------------------------------------------------------------

    def graft(self, i: int, other: "OperadElement") -> "OperadElement":
        """Operadic composition at input i."""
        if not (1 <= i <= self.arity):
            raise ValueError("position out of range")
        if self.ins[i - 1] != other.out:
            raise ValueError(
                f"colour mismatch at input {i}: {self.ins[i - 1]} vs {other.out}"
            )
        m = other.arity
        new_ins = self.ins[: i - 1] + other.ins + self.ins[i:]
        out: dict = {}
        amap = {j: (j if j <= i else j + m - 1) for j in range(1, self.arity + 1)}
        bmap = {j: j + i - 1 for j in range(1, m + 1)}
        for ta, ca in self.terms.items():
            ta2 = relabel(ta, amap)
            for tb, cb in other.terms.items():
                built, sign = self.op.substitute(ta2, {i: relabel(tb, bmap)})
                out = vec_add(out, self.op.normalize_tree(built), ca * cb * F(sign))
        return OperadElement(self.op, self.out, new_ins, out)

    def compose(self, inputs) -> "OperadElement":
        """Full composition a(b_1 (x) ... (x) b_n)."""
        assert len(inputs) == self.arity
        for j, b in enumerate(inputs):
            if self.ins[j] != b.out:
                raise ValueError(f"colour mismatch at input {j + 1}")
        new_ins = tuple(c for b in inputs for c in b.ins)
        offsets = []
        acc = 0
        for b in inputs:
            offsets.append(acc)
            acc += b.arity
        out: dict = {}
        for ta, ca in self.terms.items():
            # relabel a's leaf j to the first label of block j (a placeholder);
            # substitution then replaces it by the relabelled input tree
            for combo in itertools.product(*(b.terms.items() for b in inputs)):
                coeff = ca
                kids = {}
                for j, (tb, cb) in enumerate(combo):
                    coeff *= cb
                    kids[j + 1] = relabel(tb, {l: l + offsets[j] for l in range(1, inputs[j].arity + 1)})
                built, sign = self.op.substitute(ta, kids)
                out = vec_add(out, self.op.normalize_tree(built), coeff * F(sign))
        return OperadElement(self.op, self.out, new_ins, out)

    def weight_bounds(self):
        ws = [tree_weight(t) for t in self.terms]
        return (min(ws), max(ws)) if ws else (0, 0)


class Derivation:
    """Degree -1 derivation of a free operad, given by values on generators."""

    def __init__(self, op: FreeOperad, values: dict):
        self.op = op
        self.values = dict(values)
        for g, val in self.values.items():
            info = op.gen_info(g)
            if val.is_zero():
                continue
            assert val.out == info.out and val.ins == info.ins, g
            for t in val.terms:
                assert op.tree_degree(t) == info.degree - 1, (g, tree_str(t))

    def value(self, g) -> OperadElement:
        info = self.op.gen_info(g)
        v = self.values.get(g)
        if v is None:
            return self.op.element(info.out, info.ins, {})
        return v

    def d_tree(self, t: Tree) -> dict:
        """Differential of a canonical tree: hit every vertex in pre-order,
        with the Koszul sign of the vertex degrees already passed."""
        op = self.op
        out: dict = {}
        pre = []

        def collect(sub, path):
            if is_leaf(sub):
                return
            pre.append((path, sub))
            for idx, c in enumerate(sub[2]):
                collect(c, path + (idx,))

        collect(t, ())
        prefix = 0
        for path, sub in pre:
            g = sub[1]
            val = self.value(g)
            if not val.is_zero():
                for u, cu in val.terms.items():
                    kids = {p + 1: c for p, c in enumerate(sub[2])}
                    built, sign = op.substitute(u, kids)
                    full = _replace_at(t, path, built)
                    sgn = F(sign) * (F(-1) if prefix % 2 else ONE)
                    for tn, cn in op.normalize_tree(full).items():
                        v = out.get(tn, F(0)) + sgn * cu * cn
                        if v:
                            out[tn] = v
                        else:
                            out.pop(tn, None)
            prefix += op.gen_info(g).degree
        return out

    def apply(self, elem: OperadElement) -> OperadElement:
        return elem.map_terms(self.d_tree)

    def is_minimal(self) -> bool:
        """True when every stored value lies in weight >= 2."""
        for val in self.values.values():
            for t in val.terms:
                if tree_weight(t) < 2:
                    return False
        return True


def _replace_at(t: Tree, path, new_sub) -> Tree:
    if not path:
        return new_sub
    idx = path[0]
    children = list(t[2])
    children[idx] = _replace_at(children[idx], path[1:], new_sub)
    return ("N", t[1], tuple(children))
