import itertools
import random
from fractions import Fraction

import pytest

from opresolve import perms
from opresolve.freeop import (
    Derivation,
    FreeOperad,
    OperadElement,
    leaf,
    node,
    tree_leaves,
    tree_str,
    tree_weight,
)
from opresolve.sigma import BasisElement, ColouredSigmaModule, free_sigma_module

F = Fraction


def _operad(seeds, colours=("A",), twist=False):
    return FreeOperad(free_sigma_module(colours, seeds, twist_sign=twist))


@pytest.fixture
def binary_op():
    return _operad([("m", 0, "A", ("A", "A"))])


@pytest.fixture
def graded_op():
    # one binary degree-0, two unary degree-1, one unary degree-0 generator
    gens = ColouredSigmaModule(
        ("A",),
        [
            BasisElement("m[12]", 0, "A", ("A", "A")),
            BasisElement("m[21]", 0, "A", ("A", "A")),
            BasisElement("u", 1, "A", ("A",)),
            BasisElement("v", 1, "A", ("A",)),
            BasisElement("w", 0, "A", ("A",)),
        ],
        {(2, 1): {"m[12]": {"m[21]": F(1)}, "m[21]": {"m[12]": F(1)}}},
    )
    return FreeOperad(gens)


def test_unit_laws(graded_op):
    op = graded_op
    a = op.single("m[12]")
    unit = op.unit("A")
    assert a.graft(1, unit) == a
    assert a.graft(2, unit) == a
    assert unit.graft(1, a) == a
    u = op.single("u")
    assert u.graft(1, unit) == u
    assert unit.graft(1, u) == u


def test_nested_associativity(graded_op):
    op = graded_op
    a = op.single("m[12]")
    b = op.single("m[21]")
    c = op.single("u")
    # (a o_1 b) o_j c = a o_1 (b o_{j} c) for j inside b
    for j in (1, 2):
        lhs = a.graft(1, b).graft(j, c)
        rhs = a.graft(1, b.graft(j, c))
        assert lhs == rhs


def test_disjoint_associativity_koszul_sign(graded_op):
    op = graded_op
    a = op.single("m[12]")
    for bn, cn in itertools.product(["u", "v", "w"], repeat=2):
        b, c = op.single(bn), op.single(cn)
        db = op.gen_info(bn).degree
        dc = op.gen_info(cn).degree
        lhs = a.graft(1, b).graft(2, c)
        rhs = a.graft(2, c).graft(1, b)
        assert lhs == rhs.scale(F((-1) ** (db * dc))), (bn, cn)


def test_act_is_right_action(binary_op):
    op = binary_op
    rng = random.Random(2)
    a = op.single("m[12]").graft(2, op.single("m[21]"))  # arity 3
    for _ in range(20):
        s = tuple(rng.sample(range(1, 4), 3))
        t = tuple(rng.sample(range(1, 4), 3))
        assert a.act(s).act(t) == a.act(perms.compose(s, t))
    assert a.act(perms.identity(3)) == a


def test_act_identity_and_involution_sign(graded_op):
    op = graded_op
    a = op.single("m[12]")
    assert a.act(perms.identity(2)) == a
    swapped = a.act((2, 1))
    assert swapped == op.single("m[21]")
    assert swapped.act((2, 1)) == a


def test_orbit_of_free_binary_generator(binary_op):
    op = binary_op
    a = op.single("m[12]")
    orbit = {repr(a.act(s)) for s in perms.all_perms(2)}
    assert len(orbit) == 2


def test_full_composition_equivariance(graded_op):
    # a(b_1,...,b_n).sigma = koszul(deg b, sigma) * (a.sigma)(b_{sigma(1)},...)
    op = graded_op
    rng = random.Random(4)
    a = op.single("m[12]")
    pool = ["u", "v", "w"]
    for _ in range(15):
        bs = [op.single(rng.choice(pool)) for _ in range(2)]
        sigma = tuple(rng.sample(range(1, 3), 2))
        lhs = a.compose(bs).act(sigma)
        degs = [op.gen_info(next(iter(b.terms))[1]).degree for b in bs]
        sign = perms.koszul_sign(degs, sigma)
        permuted = [bs[sigma[j] - 1] for j in range(2)]
        rhs = a.act(sigma).compose(permuted).scale(F(sign))
        assert lhs == rhs


def test_normal_form_random_presentations(binary_op):
    """Random planar scrambles of the same abstract element normalize equally."""
    op = binary_op
    rng = random.Random(8)
    a = op.single("m[12]").graft(1, op.single("m[21]")).graft(3, op.single("m[12]"))
    (t0, c0), = ((t, c) for t, c in sorted(a.terms.items())[:1])
    for _ in range(10):
        sigma = tuple(rng.sample(range(1, 5), 4))
        back = a.act(sigma).act(perms.inverse(sigma))
        assert back == a


def test_weight_grading(binary_op):
    op = binary_op
    a = op.single("m[12]")
    b = a.graft(1, a)
    assert a.weight_bounds() == (1, 1)
    assert b.weight_bounds() == (2, 2)
    for t in b.act((3, 1, 2)).terms:
        assert tree_weight(t) == 2


def test_enumerate_slice_counts(binary_op):
    op = binary_op
    assert len(op.enumerate_slice("A", ("A",), 0)) == 1  # the unit leaf
    assert len(op.enumerate_slice("A", ("A", "A"), 0)) == 2
    assert len(op.enumerate_slice("A", ("A", "A", "A"), 0)) == 12


def test_enumerate_slice_colour_constraints():
    op = _operad([("m", 0, "B", ("A", "B"))], colours=("A", "B"))
    assert len(op.enumerate_slice("B", ("A", "B"), 0)) == 1
    assert len(op.enumerate_slice("B", ("B", "A"), 0)) == 1  # the twisted generator
    assert op.enumerate_slice("A", ("A", "B"), 0) == []


def test_derivation_leibniz_and_square(graded_op):
    op = graded_op
    # d(u) = w, d(v) = w, d(m) = 0: a valid degree -1 derivation with d^2 = 0
    d = Derivation(
        op,
        {
            "u": op.single("w"),
            "v": op.single("w"),
        },
    )
    rng = random.Random(10)
    singles = ["m[12]", "m[21]", "u", "v", "w"]
    for _ in range(20):
        a = op.single(rng.choice(singles))
        b = op.single(rng.choice(singles))
        i = rng.randint(1, a.arity)
        da = d.apply(a)
        db = d.apply(b)
        lhs = d.apply(a.graft(i, b))
        adeg = op.gen_info(next(iter(a.terms))[1]).degree
        rhs = da.graft(i, b) + a.graft(i, db).scale(F((-1) ** adeg))
        assert lhs == rhs, (repr(a), i, repr(b))
    # d^2 = 0 on iterated composites
    x = op.single("u").graft(1, op.single("v")).graft(1, op.single("u"))
    assert d.apply(d.apply(x)).is_zero()


def test_derivation_commutes_with_act(graded_op):
    op = graded_op
    d = Derivation(op, {"u": op.single("w"), "v": op.single("w")})
    a = op.single("m[12]").graft(1, op.single("m[21]"))
    a = a.graft(1, op.single("u")).graft(3, op.single("v"))
    for sigma in perms.all_perms(3):
        assert d.apply(a.act(sigma)) == d.apply(a).act(sigma)


def test_is_minimal(graded_op):
    op = graded_op
    zero = Derivation(op, {})
    assert zero.is_minimal()
    weight1 = Derivation(op, {"u": op.single("w")})
    assert not weight1.is_minimal()
    weight2 = Derivation(
        op, {"u": op.single("w").graft(1, op.single("w"))}
    )
    assert weight2.is_minimal()


def test_colour_mismatch_raises():
    op = _operad([("m", 0, "B", ("A", "B"))], colours=("A", "B"))
    a = op.single("m[12]")
    with pytest.raises(ValueError):
        a.graft(1, a)  # input 1 wants colour A, a produces B
    with pytest.raises(ValueError):
        a.graft(5, a)


def test_acyclicity_guard():
    op = _operad([("e", 0, "A", ("A",))])
    assert not op.check_unary_degree_zero_acyclic()
    op2 = _operad([("e", 0, "B", ("A",))], colours=("A", "B"))
    assert op2.check_unary_degree_zero_acyclic()
