"""Coloured collections with symmetric-group actions and their composition
product.

A `ColouredSigmaModule` stores, per arity n, a basis of named elements with a
degree, an output colour and a word of n input colours, together with the
action of every adjacent transposition s_i as an exact sparse matrix.  The
matrix for a general permutation is composed on demand and cached; the braid
and involution relations of the generators are verified once at construction,
so the composite is well defined.

`CompositionProduct` realizes the composite A o B of two such modules slice by
slice: raw monomials a (x) b_1 (x) ... (x) b_m (x) sigma are divided by the
span of the two coinvariance moves (factor-wise actions inside the blocks, and
block rearrangements with their Koszul signs).  The quotient basis is the set
of non-pivot monomials under lexicographic elimination, which makes every
normal form canonical and reproducible.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from . import perms
from .linalg import (
    ChainComplexSlice,
    GradedSpace,
    HomologyData,
    RowReducer,
    _order,
    vec_add,
    vec_eq,
    vec_scale,
)

F = Fraction
ONE = F(1)


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    out: str
    ins: tuple

    @property
    def arity(self) -> int:
        return len(self.ins)


class ColouredSigmaModule:
    """Arity-indexed coloured basis with adjacent-transposition actions.

    `actions[(n, i)]` maps a basis name of arity n to the sparse row of its
    image under s_i; a missing key means the action of s_i is undefined
    (illegal) rather than zero, except that arity <= 1 needs no actions.
    An optional arity- and colour-preserving `differential` of degree -1 may
    be attached; it must commute with the action.
    """

    def __init__(self, colours, elements, actions=None, differential=None, validate=True):
        self.colours = tuple(colours)
        self.elements = [e if isinstance(e, BasisElement) else BasisElement(*e) for e in elements]
        self.by_name = {e.name: e for e in self.elements}
        if len(self.by_name) != len(self.elements):
            raise ValueError("duplicate basis names")
        self.actions = {k: dict(v) for k, v in (actions or {}).items()}
        self.differential = {k: dict(v) for k, v in (differential or {}).items()}
        self._matrix_cache: dict = {}
        if validate:
            self._validate()

    # -- structure ---------------------------------------------------------

    def arities(self):
        return sorted({e.arity for e in self.elements})

    def basis(self, n: int):
        return [e for e in self.elements if e.arity == n]

    def slice_names(self, out, ins):
        ins = tuple(ins)
        return [e.name for e in self.elements if e.out == out and e.ins == ins]

    def _validate(self):
        for e in self.elements:
            if e.out not in self.colours or any(c not in self.colours for c in e.ins):
                raise ValueError(f"{e.name}: colour outside the declared set")
            if e.degree < 0:
                raise ValueError(f"{e.name}: negative degree")
        for n in self.arities():
            names = {e.name for e in self.basis(n)}
            for i in range(1, n):
                mat = self.actions.get((n, i))
                if mat is None:
                    raise ValueError(f"missing action for s_{i} in arity {n}")
                if set(mat) != names:
                    raise ValueError(f"action s_{i} arity {n}: wrong domain")
                for b, row in mat.items():
                    e = self.by_name[b]
                    want = perms.act_tuple(e.ins, perms.transposition(n, i))
                    for t, c in row.items():
                        te = self.by_name[t]
                        if c and (te.ins != want or te.out != e.out or te.degree != e.degree):
                            raise ValueError(f"action s_{i}: {b}->{t} breaks colours/degree")
            # involution and braid relations
            for i in range(1, n):
                for b in sorted(names):
                    if not vec_eq(self._apply_word({b: ONE}, n, [i, i]), {b: ONE}):
                        raise ValueError(f"s_{i}^2 != id in arity {n}")
            for i in range(1, n - 1):
                for b in sorted(names):
                    lhs = self._apply_word({b: ONE}, n, [i, i + 1, i])
                    rhs = self._apply_word({b: ONE}, n, [i + 1, i, i + 1])
                    if not vec_eq(lhs, rhs):
                        raise ValueError(f"braid relation fails in arity {n} at s_{i}")
            for i in range(1, n):
                for j in range(i + 2, n):
                    for b in sorted(names):
                        lhs = self._apply_word({b: ONE}, n, [i, j])
                        rhs = self._apply_word({b: ONE}, n, [j, i])
                        if not vec_eq(lhs, rhs):
                            raise ValueError(f"s_{i} s_{j} do not commute in arity {n}")
        for b, img in self.differential.items():
            e = self.by_name[b]
            for t, c in img.items():
                te = self.by_name[t]
                if c and (te.degree != e.degree - 1 or te.out != e.out or te.ins != e.ins):
                    raise ValueError(f"differential {b}->{t} breaks degree or colours")
        for b in self.differential:
            if self.d(self.d({b: ONE})):
                raise ValueError(f"d^2 != 0 at {b}")
        # differential commutes with the action
        for (n, i), mat in self.actions.items():
            for b in mat:
                lhs = self.d(self._apply_word({b: ONE}, n, [i]))
                rhs = self._apply_word(self.d({b: ONE}), n, [i])
                if not vec_eq(lhs, rhs):
                    raise ValueError(f"differential not equivariant at {b}, s_{i}")

    # -- action and differential -------------------------------------------

    def _apply_word(self, vec, n, word):
        for i in word:
            mat = self.actions[(n, i)]
            out = {}
            for b, c in vec.items():
                out = vec_add(out, mat[b], c)
            vec = out
        return vec

    def act(self, vec: dict, sigma) -> dict:
        """Right action of sigma on a vector supported in one arity."""
        if not vec:
            return {}
        n = self.by_name[next(iter(vec))].arity
        if sigma == perms.identity(n):
            return dict(vec)
        key = (n, sigma)
        if key not in self._matrix_cache:
            word = perms.adjacent_factorization(sigma)
            mat = {}
            for e in self.basis(n):
                mat[e.name] = self._apply_word({e.name: ONE}, n, word)
            self._matrix_cache[key] = mat
        mat = self._matrix_cache[key]
        out: dict = {}
        for b, c in vec.items():
            out = vec_add(out, mat[b], c)
        return out

    def d(self, vec: dict) -> dict:
        out: dict = {}
        for b, c in vec.items():
            img = self.differential.get(b)
            if img:
                out = vec_add(out, img, c)
        return out

    # -- slices --------------------------------------------------------------

    def slice_complex(self, out, ins) -> ChainComplexSlice:
        names = self.slice_names(out, ins)
        basis = tuple((n, self.by_name[n].degree) for n in names)
        diff = {n: self.differential[n] for n in names if self.differential.get(n)}
        return ChainComplexSlice(GradedSpace(basis), diff)

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        arities = {}
        for n in self.arities():
            arities[str(n)] = {
                "basis": [
                    {"name": e.name, "degree": e.degree, "out": e.out, "in": list(e.ins)}
                    for e in self.basis(n)
                ],
                "transposition_actions": {
                    f"s_{i}": {
                        b: [[t, f"{c.numerator}/{c.denominator}"] for t, c in sorted(row.items())]
                        for b, row in sorted(self.actions[(n, i)].items())
                    }
                    for i in range(1, n)
                },
            }
        return {"colours": list(self.colours), "arities": arities}

    @classmethod
    def from_json(cls, data: dict) -> "ColouredSigmaModule":
        elements = []
        actions = {}
        for n_str, block in data["arities"].items():
            n = int(n_str)
            for b in block["basis"]:
                elements.append(BasisElement(b["name"], b["degree"], b["out"], tuple(b["in"])))
            for key, mat in block.get("transposition_actions", {}).items():
                i = int(key.split("_")[1])
                actions[(n, i)] = {
                    b: {t: F(c) for t, c in rows} for b, rows in mat.items()
                }
        return cls(data["colours"], elements, actions)


def free_sigma_module(colours, seeds, twist_sign=False, differential=None):
    """Module with basis (seed, sigma) for sigma in Sigma_n, free right action.

    Each seed is (name, degree, out colour, input colour word); the element
    named ``name[sigma]`` has input colours ``ins . sigma``.  With
    `twist_sign` the regular representation is twisted by the sign character.
    """
    elements = []
    actions: dict = {}
    seeds = [s if isinstance(s, BasisElement) else BasisElement(*s) for s in seeds]
    for seed in seeds:
        n = seed.arity
        for sigma in perms.all_perms(n):
            elements.append(
                BasisElement(
                    f"{seed.name}[{perms.perm_str(sigma)}]",
                    seed.degree,
                    seed.out,
                    perms.act_tuple(seed.ins, sigma),
                )
            )
        for i in range(1, n):
            mat = actions.setdefault((n, i), {})
            for sigma in perms.all_perms(n):
                tgt = perms.compose(sigma, perms.transposition(n, i))
                c = F(-1) if twist_sign else ONE
                mat[f"{seed.name}[{perms.perm_str(sigma)}]"] = {
                    f"{seed.name}[{perms.perm_str(tgt)}]": c
                }
    return ColouredSigmaModule(colours, elements, actions, differential)


# ---------------------------------------------------------------------------
# composition product
# ---------------------------------------------------------------------------

RawKey = tuple  # (a_name, (b_names...), sigma)


class CompositionProduct:
    """Slice-wise model of A o B with canonical (non-pivot) normal forms."""

    def __init__(self, a: ColouredSigmaModule, b: ColouredSigmaModule):
        if set(a.colours) != set(b.colours):
            raise ValueError("colour mismatch")
        self.a = a
        self.b = b
        self._slices: dict = {}

    # raw monomials -----------------------------------------------------------

    def raw_monomials(self, out, ins):
        ins = tuple(ins)
        n = len(ins)
        raws = []
        for m in self.a.arities():
            for ae in self.a.basis(m):
                if ae.out != out:
                    continue
                # blocks: b_i with out(b_i) = ins(a)_i, sum of arities = n
                choices = [
                    [be for be in self.b.elements if be.out == w]
                    for w in ae.ins
                ]
                for combo in itertools.product(*choices):
                    if sum(be.arity for be in combo) != n:
                        continue
                    wvec = tuple(c for be in combo for c in be.ins)
                    for sigma in perms.all_perms(n):
                        if perms.act_tuple(wvec, sigma) == ins:
                            raws.append((ae.name, tuple(be.name for be in combo), sigma))
        return sorted(raws, key=repr)

    def raw_degree(self, raw: RawKey) -> int:
        a_name, b_names, _ = raw
        return self.a.by_name[a_name].degree + sum(self.b.by_name[x].degree for x in b_names)

    # coinvariance moves --------------------------------------------------------

    def _lambda_move(self, raw: RawKey, block: int, i: int) -> dict:
        """Action of id x..x s_i x..x id (inside `block`) on a raw monomial."""
        a_name, b_names, sigma = raw
        lengths = tuple(self.b.by_name[x].arity for x in b_names)
        lam = perms.cross(
            *[
                perms.transposition(l, i) if k == block else perms.identity(l)
                for k, l in enumerate(lengths)
            ]
        )
        new_sigma = perms.compose(perms.inverse(lam), sigma)
        acted = self.b.act({b_names[block]: ONE}, perms.transposition(lengths[block], i))
        out = {}
        for t, c in acted.items():
            bn = list(b_names)
            bn[block] = t
            out[(a_name, tuple(bn), new_sigma)] = c
        return out

    def _tau_move(self, raw: RawKey, p: int) -> dict:
        """Action of the adjacent block swap s_p of Sigma_m, with Koszul sign."""
        a_name, b_names, sigma = raw
        m = len(b_names)
        lengths = tuple(self.b.by_name[x].arity for x in b_names)
        degs = tuple(self.b.by_name[x].degree for x in b_names)
        tau = perms.transposition(m, p)
        sign = ONE if (degs[p - 1] * degs[p]) % 2 == 0 else F(-1)
        new_sigma = perms.compose(perms.inverse(perms.block_perm(tau, lengths)), sigma)
        new_b = perms.act_tuple(b_names, tau)
        acted_a = self.a.act({a_name: ONE}, tau)
        out = {}
        for t, c in acted_a.items():
            out[(t, new_b, new_sigma)] = c * sign
        return out

    # quotient slices -----------------------------------------------------------

    def slice(self, out, ins):
        key = (out, tuple(ins))
        if key in self._slices:
            return self._slices[key]
        raws = self.raw_monomials(out, ins)
        order = _order(raws)
        red = RowReducer(order)
        for raw in raws:
            a_name, b_names, _ = raw
            lengths = [self.b.by_name[x].arity for x in b_names]
            for block, l in enumerate(lengths):
                for i in range(1, l):
                    red.add(vec_add({raw: ONE}, self._lambda_move(raw, block, i), F(-1)))
            for p in range(1, len(b_names)):
                red.add(vec_add({raw: ONE}, self._tau_move(raw, p), F(-1)))
        kept = [r for r in raws if r not in red.pivots]

        def project(v: dict) -> dict:
            out_v: dict = {}
            for raw, c in v.items():
                out_v = vec_add(out_v, red.reduce({raw: ONE}), c)
            return out_v

        data = _Slice(self, kept, project)
        self._slices[key] = data
        return data

    def dim(self, out, ins, degree=None) -> int:
        sl = self.slice(out, ins)
        if degree is None:
            return len(sl.basis)
        return sum(1 for r in sl.basis if self.raw_degree(r) == degree)

    def normal_form(self, vec: dict) -> dict:
        """Reduce a raw vector inside the closure of its support under the
        coinvariance moves, without assembling the whole slice."""
        closure = set()
        queue = list(vec)
        while queue:
            raw = queue.pop()
            if raw in closure:
                continue
            closure.add(raw)
            a_name, b_names, _ = raw
            lengths = [self.b.by_name[x].arity for x in b_names]
            moved = []
            for block, l in enumerate(lengths):
                for i in range(1, l):
                    moved.append(self._lambda_move(raw, block, i))
            for p in range(1, len(b_names)):
                moved.append(self._tau_move(raw, p))
            for mv in moved:
                queue.extend(k for k in mv if k not in closure)
        red = RowReducer(_order(closure))
        for raw in sorted(closure, key=repr):
            a_name, b_names, _ = raw
            lengths = [self.b.by_name[x].arity for x in b_names]
            for block, l in enumerate(lengths):
                for i in range(1, l):
                    red.add(vec_add({raw: ONE}, self._lambda_move(raw, block, i), F(-1)))
            for p in range(1, len(b_names)):
                red.add(vec_add({raw: ONE}, self._tau_move(raw, p), F(-1)))
        out: dict = {}
        for raw, c in vec.items():
            out = vec_add(out, red.reduce({raw: ONE}), c)
        return out

    def d_raw(self, raw: RawKey) -> dict:
        """Differential of a raw monomial (before projection)."""
        a_name, b_names, sigma = raw
        out: dict = {}
        for t, c in self.a.d({a_name: ONE}).items():
            out[(t, b_names, sigma)] = c
        prefix = self.a.by_name[a_name].degree
        for i, bn in enumerate(b_names):
            s = ONE if prefix % 2 == 0 else F(-1)
            for t, c in self.b.d({bn: ONE}).items():
                names = list(b_names)
                names[i] = t
                key = (a_name, tuple(names), sigma)
                out[key] = out.get(key, F(0)) + s * c
            prefix += self.b.by_name[bn].degree
        return {k: v for k, v in out.items() if v}


class _Slice:
    """One (out, ins) slice of a composition product: quotient basis,
    projection and induced chain complex."""

    def __init__(self, product: CompositionProduct, basis, project):
        self.product = product
        self.basis = basis
        self.project = project

    def complex(self) -> ChainComplexSlice:
        graded = tuple((r, self.product.raw_degree(r)) for r in self.basis)
        diff = {}
        for r in self.basis:
            img = self.project(self.product.d_raw(r))
            if img:
                diff[r] = img
        return ChainComplexSlice(GradedSpace(graded), diff)


# ---------------------------------------------------------------------------
# homology of a module, with induced actions
# ---------------------------------------------------------------------------

def homology_module(m: ColouredSigmaModule) -> ColouredSigmaModule:
    """H(m) as a coloured Sigma-module with the induced action."""
    slices = {}
    for e in m.elements:
        slices.setdefault((e.out, e.ins), None)
    data = {key: HomologyData(m.slice_complex(*key)) for key in slices}

    def h_name(key, degree, i):
        out, ins = key
        return f"H({out};{','.join(ins)})_{degree}_{i}"

    elements = []
    rep_of = {}
    for key in sorted(data, key=repr):
        hd = data[key]
        for degree in sorted(hd.reps):
            for i, z in enumerate(hd.reps[degree]):
                name = h_name(key, degree, i)
                elements.append(BasisElement(name, degree, key[0], key[1]))
                rep_of[name] = (key, degree, z)

    actions = {}
    arities = {len(key[1]) for key in data}
    for n in arities:
        for i in range(1, n):
            mat = {}
            for e in elements:
                if len(e.ins) != n:
                    continue
                key, degree, z = rep_of[e.name]
                tgt_key = (key[0], perms.act_tuple(key[1], perms.transposition(n, i)))
                img = m.act(z, perms.transposition(n, i))
                coords = data[tgt_key].reduce(degree, img)
                row = {}
                for j, c in enumerate(coords):
                    if c:
                        row[h_name(tgt_key, degree, j)] = c
                mat[e.name] = row
            actions[(n, i)] = mat
    return ColouredSigmaModule(m.colours, elements, actions)


# ---------------------------------------------------------------------------
# Kunneth report
# ---------------------------------------------------------------------------

def kunneth_check(a: ColouredSigmaModule, b: ColouredSigmaModule, max_arity=None):
    """Compare dim H(A o B) with dim (H(A) o H(B)) on every slice.

    Returns (passed, report) where report lists per-slice dimension tables.
    """
    ha = homology_module(a)
    hb = homology_module(b)
    left = CompositionProduct(a, b)
    right = CompositionProduct(ha, hb)
    report = []
    passed = True
    arities = set()
    for ae in a.elements:
        choices = [[e.arity for e in b.elements if e.out == w] for w in ae.ins]
        for combo in itertools.product(*choices):
            arities.add(sum(combo))
    arities = sorted(arities)
    if max_arity is not None:
        arities = [n for n in arities if n <= max_arity]
    colours = a.colours
    for n in arities:
        for out in colours:
            for ins in itertools.product(colours, repeat=n):
                lc = left.slice(out, ins)
                if not lc.basis and not right.slice(out, ins).basis:
                    continue
                hl = HomologyData(lc.complex()).dims()
                hr = {}
                for r in right.slice(out, ins).basis:
                    d = right.raw_degree(r)
                    hr[d] = hr.get(d, 0) + 1
                ok = hl == hr
                passed = passed and ok
                report.append(
                    {"out": out, "ins": list(ins), "H(AoB)": hl, "H(A)oH(B)": hr, "pass": ok}
                )
    return passed, report
