"""Exact rational linear algebra over named bases.

Vectors are sparse dicts {basis name: Fraction}; zero coefficients are never
stored.  Everything is computed by Gaussian elimination with a fixed,
deterministic pivot order: columns are always processed in lexicographic
order of their basis names, and free variables of a solve are set to zero,
so any two runs produce identical output.

`GradedSpace` / `LinearMap` / `ChainComplexSlice` package the graded bases,
degree-shifted maps and differentials used by the homological routines:
`homology`, `solve`, `coinvariants`.
"""
from __future__ import annotations

from fractions import Fraction
from dataclasses import dataclass, field

Vec = dict  # basis name -> Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_add(a: Vec, b: Vec, coeff: Fraction = ONE) -> Vec:
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, ZERO) + coeff * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def vec_scale(a: Vec, c: Fraction) -> Vec:
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}


def vec_eq(a: Vec, b: Vec) -> bool:
    return not vec_add(a, b, Fraction(-1))


class RowReducer:
    """Incremental exact row echelon form with a fixed column order.

    Rows are reduced against the pivots seen so far; `add` returns the
    reduced remainder (empty when the row was in the span).  Pivot choice is
    deterministic: the least column (in the given order) of the reduced row.
    """

    def __init__(self, column_order: dict):
        # column name -> sort index
        self.column_order = column_order
        self.pivots: dict = {}  # column name -> reduced row with that pivot

    def reduce(self, row: Vec) -> Vec:
        row = dict(row)
        while True:
            hit = None
            for c in row:
                if c in self.pivots:
                    if hit is None or self.column_order[c] < self.column_order[hit]:
                        hit = c
            if hit is None:
                return row
            row = vec_add(row, self.pivots[hit], -row[hit])

    def add(self, row: Vec) -> Vec:
        red = self.reduce(row)
        if red:
            piv = min(red, key=self.column_order.__getitem__)
            red = vec_scale(red, 1 / red[piv])
            self.pivots[piv] = red
        return red

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _order(names) -> dict:
    return {n: i for i, n in enumerate(sorted(names, key=repr))}


def rank_of(rows, columns=None) -> int:
    cols = set()
    for r in rows:
        cols.update(r)
    red = RowReducer(_order(columns if columns is not None else cols))
    for r in rows:
        red.add(r)
    return red.rank


class NoSolution(Exception):
    """Raised when a linear system d(x) = b has no solution."""


def solve(columns, apply_map, b: Vec) -> Vec:
    """First solution of sum_j x_j * apply_map(col_j) = b, free variables zero.

    `columns` is the ordered list of unknowns (processed lexicographically by
    repr); `apply_map(col)` is the image vector of the unknown `col`.
    Raises NoSolution when b is not in the image.
    """
    cols = sorted(columns, key=repr)
    # Eliminate in the row space of the images, tracking the preimage
    # combination of every pivot row.
    row_names: set = set(b)
    images = []
    for c in cols:
        img = apply_map(c)
        images.append(img)
        row_names.update(img)
    order = _order(row_names)
    pivots: dict = {}  # row-space pivot name -> (reduced image, preimage vec)

    def reduce_pair(img: Vec, pre: Vec):
        img = dict(img)
        pre = dict(pre)
        while True:
            hit = None
            for r in img:
                if r in pivots:
                    if hit is None or order[r] < order[hit]:
                        hit = r
            if hit is None:
                return img, pre
            pimg, ppre = pivots[hit]
            c = -img[hit]
            img = vec_add(img, pimg, c)
            pre = vec_add(pre, ppre, c)
        return img, pre

    for c, img in zip(cols, images):
        red, pre = reduce_pair(img, {c: ONE})
        if red:
            piv = min(red, key=order.__getitem__)
            inv = 1 / red[piv]
            pivots[piv] = (vec_scale(red, inv), vec_scale(pre, inv))

    rem, sol = reduce_pair(b, {})
    if rem:
        raise NoSolution(rem)
    return {k: -v for k, v in sol.items() if v}


@dataclass(frozen=True)
class GradedSpace:
    """A finite list of (name, degree) with unique names and degrees >= 0."""

    basis: tuple

    def __post_init__(self):
        names = [n for n, _ in self.basis]
        if len(set(names)) != len(names):
            raise ValueError("duplicate basis names")
        if any(d < 0 for _, d in self.basis):
            raise ValueError("negative degree")

    def names(self, degree=None):
        if degree is None:
            return [n for n, _ in self.basis]
        return [n for n, d in self.basis if d == degree]

    def degree_of(self, name):
        for n, d in self.basis:
            if n == name:
                return d
        raise KeyError(name)

    def degrees(self):
        return sorted({d for _, d in self.basis})

    def dim(self, degree=None) -> int:
        if degree is None:
            return len(self.basis)
        return sum(1 for _, d in self.basis if d == degree)


@dataclass
class LinearMap:
    """Sparse degree-homogeneous map between graded spaces."""

    source: GradedSpace
    target: GradedSpace
    entries: dict  # source name -> {target name: Fraction}
    shift: int = 0

    def __post_init__(self):
        tdeg = dict(self.target.basis)
        sdeg = dict(self.source.basis)
        for s, col in self.entries.items():
            for t, c in col.items():
                if c and tdeg[t] != sdeg[s] + self.shift:
                    raise ValueError(f"entry {s}->{t} violates shift {self.shift}")

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for s, c in v.items():
            col = self.entries.get(s)
            if col:
                out = vec_add(out, col, c)
        return out

    def then(self, other: "LinearMap") -> "LinearMap":
        entries = {}
        for s in self.entries:
            img = other.apply(self.entries[s])
            if img:
                entries[s] = img
        return LinearMap(self.source, other.target, entries, self.shift + other.shift)


@dataclass
class ChainComplexSlice:
    """A finite graded space with a degree -1 differential, d*d = 0."""

    space: GradedSpace
    differential: dict = field(default_factory=dict)  # name -> Vec in degree-1

    def __post_init__(self):
        deg = dict(self.space.basis)
        for s, img in self.differential.items():
            for t, c in img.items():
                if c and deg[t] != deg[s] - 1:
                    raise ValueError(f"differential {s}->{t} not of degree -1")
        for s in self.space.names():
            dd = self.d(self.d({s: ONE}))
            if dd:
                raise ValueError(f"d^2 != 0 at {s}: {dd}")

    def d(self, v: Vec) -> Vec:
        out: Vec = {}
        for s, c in v.items():
            img = self.differential.get(s)
            if img:
                out = vec_add(out, img, c)
        return out


class HomologyData:
    """Homology of one slice, with a projection of cycles onto chosen
    representatives.

    For every degree `n`, `reps[n]` is a list of cycle vectors spanning a
    complement of the boundaries inside the cycles; `reduce(n, cycle)`
    rewrites a cycle as coordinates with respect to `reps[n]`.
    """

    def __init__(self, c: ChainComplexSlice):
        self.slice = c
        degrees = c.space.degrees()
        self.reps: dict[int, list] = {}
        self._boundary: dict[int, RowReducer] = {}
        self._pivots: dict[int, list] = {}  # degree -> pivot column per rep
        for n in degrees:
            names_n = sorted(c.space.names(n), key=repr)
            order = _order(names_n)
            # boundaries from degree n+1
            bred = RowReducer(order)
            for s in sorted(c.space.names(n + 1), key=repr):
                bred.add(c.d({s: ONE}))
            self._boundary[n] = bred
            # kernel of d_n, reduced mod boundaries, then put in reduced
            # echelon form so each pivot occurs in exactly one representative
            kernel = _kernel_basis(names_n, lambda v: c.d(v))
            rows, pivs = [], []
            for z in kernel:
                z = bred.reduce(z)
                for p, r in zip(pivs, rows):
                    if p in z:
                        z = vec_add(z, r, -z[p])
                if z:
                    piv = min(z, key=order.__getitem__)
                    z = vec_scale(z, 1 / z[piv])
                    rows = [vec_add(r, z, -r.get(piv, ZERO)) for r in rows]
                    rows.append(z)
                    pivs.append(piv)
            self.reps[n] = rows
            self._pivots[n] = pivs

    def dim(self, n: int) -> int:
        return len(self.reps.get(n, ()))

    def dims(self) -> dict:
        return {n: len(r) for n, r in self.reps.items() if r}

    def reduce(self, n: int, cycle: Vec) -> list:
        """Coordinates of a cycle in the representative basis of H_n."""
        if self.slice.d(cycle):
            raise ValueError("not a cycle")
        v = self._boundary[n].reduce(cycle)
        pivs = self._pivots.get(n, [])
        out = [v.get(p, ZERO) for p in pivs]
        for coeff, rep in zip(out, self.reps.get(n, [])):
            if coeff:
                v = vec_add(v, rep, -coeff)
        if v:
            raise ValueError("cycle not in homology span after boundary reduction")
        return out


def _kernel_basis(columns, apply_map) -> list:
    """Kernel of the map given on the listed columns, deterministic basis."""
    cols = sorted(columns, key=repr)
    row_names = set()
    images = {}
    for c in cols:
        img = apply_map({c: ONE})
        images[c] = img
        row_names.update(img)
    order = _order(row_names)
    pivots: dict = {}  # row name -> (image, preimage)
    kernel = []
    for c in cols:
        img, pre = dict(images[c]), {c: ONE}
        while True:
            hit = None
            for r in img:
                if r in pivots:
                    if hit is None or order[r] < order[hit]:
                        hit = r
            if hit is None:
                break
            pimg, ppre = pivots[hit]
            k = -img[hit]
            img = vec_add(img, pimg, k)
            pre = vec_add(pre, ppre, k)
        if img:
            piv = min(img, key=order.__getitem__)
            inv = 1 / img[piv]
            pivots[piv] = (vec_scale(img, inv), vec_scale(pre, inv))
        else:
            kernel.append(pre)
    return kernel


def homology(c: ChainComplexSlice) -> list:
    """[(degree, dim, representatives)] for every degree with a nonzero space."""
    data = HomologyData(c)
    out = []
    for n in c.space.degrees():
        out.append((n, data.dim(n), data.reps[n]))
    return out


def homology_dims(c: ChainComplexSlice) -> dict:
    return HomologyData(c).dims()


def coinvariants(c: ChainComplexSlice, action: dict) -> tuple:
    """Quotient of the slice by v - v.g over the given group generators.

    `action` maps a generator label to {name: Vec} (its matrix).  The
    differential must commute with every generator.  Returns
    (quotient ChainComplexSlice, projection: Vec -> Vec on quotient names).
    """
    deg = dict(c.space.basis)

    def act(g, v: Vec) -> Vec:
        mat = action[g]
        out: Vec = {}
        for s, coeff in v.items():
            out = vec_add(out, mat[s], coeff)
        return out

    for g in action:
        for s in c.space.names():
            lhs = c.d(act(g, {s: ONE}))
            rhs = act(g, c.d({s: ONE}))
            if not vec_eq(lhs, rhs):
                raise ValueError(f"differential not equivariant at {s} under {g}")

    # relation span per degree
    reducers: dict[int, RowReducer] = {}
    for n in c.space.degrees():
        names_n = sorted(c.space.names(n), key=repr)
        red = RowReducer(_order(names_n))
        for g in sorted(action, key=repr):
            for s in names_n:
                red.add(vec_add({s: ONE}, act(g, {s: ONE}), Fraction(-1)))
        reducers[n] = red

    def project(v: Vec) -> Vec:
        out: Vec = {}
        for s, coeff in v.items():
            r = reducers[deg[s]].reduce({s: ONE})
            out = vec_add(out, r, coeff)
        return out

    basis = []
    for n in c.space.degrees():
        for s in sorted(c.space.names(n), key=repr):
            if s not in reducers[n].pivots:
                basis.append((s, n))
    space = GradedSpace(tuple(basis))
    diff = {}
    kept = {s for s, _ in basis}
    for s, n in basis:
        img = project(c.d({s: ONE}))
        assert set(img) <= kept
        if img:
            diff[s] = img
    return ChainComplexSlice(space, diff), project
