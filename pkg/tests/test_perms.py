import random

from opresolve.perms import (
    adjacent_factorization,
    act_tuple,
    all_perms,
    block_perm,
    compose,
    cross,
    identity,
    inverse,
    koszul_sign,
    parse_perm,
    perm_str,
    sign,
    transposition,
)


def test_cross_worked_example():
    assert cross((2, 1), (1,), (3, 1, 2)) == (2, 1, 3, 6, 4, 5)


def test_cross_identity():
    assert cross(identity(2), identity(3)) == identity(5)
    assert cross((2, 1), (2, 1)) == (2, 1, 4, 3)


def test_block_perm_worked_example():
    assert block_perm((2, 3, 1), (2, 1, 3)) == (3, 4, 5, 6, 1, 2)


def test_block_perm_identity_and_empty_block():
    assert block_perm(identity(3), (2, 2, 1)) == identity(5)
    assert block_perm((2, 1), (0, 2)) == (1, 2)
    assert block_perm((2, 1), (2, 0)) == (1, 2)


def test_block_perm_unit_lengths_is_tau():
    for tau in all_perms(4):
        assert block_perm(tau, (1, 1, 1, 1)) == tau


def test_rebracketing_identities_from_worked_examples():
    # [521643] = [251436]([21] x id x [312])
    s = (2, 5, 1, 4, 3, 6)
    assert compose(s, cross((2, 1), (1,), (3, 1, 2))) == (5, 2, 1, 6, 4, 3)
    # [143625] = [251436] . block([231], (2,1,3))
    assert compose(s, block_perm((2, 3, 1), (2, 1, 3))) == (1, 4, 3, 6, 2, 5)


def test_compose_inverse_sign():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 7)
        p = tuple(rng.sample(range(1, n + 1), n))
        q = tuple(rng.sample(range(1, n + 1), n))
        assert compose(p, inverse(p)) == identity(n)
        assert compose(inverse(p), p) == identity(n)
        assert sign(compose(p, q)) == sign(p) * sign(q)


def test_adjacent_factorization_rebuilds():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 7)
        p = tuple(rng.sample(range(1, n + 1), n))
        q = identity(n)
        for i in adjacent_factorization(p):
            q = compose(q, transposition(n, i))
        assert q == p


def test_act_tuple_is_right_action():
    rng = random.Random(3)
    vec = ("a", "b", "c", "d")
    for _ in range(30):
        p = tuple(rng.sample(range(1, 5), 4))
        q = tuple(rng.sample(range(1, 5), 4))
        assert act_tuple(act_tuple(vec, p), q) == act_tuple(vec, compose(p, q))


def test_koszul_sign_adjacent_and_composition():
    # one odd-odd adjacent swap
    assert koszul_sign((1, 1), (2, 1)) == -1
    assert koszul_sign((1, 0), (2, 1)) == 1
    assert koszul_sign((0, 0, 0), (3, 1, 2)) == 1
    # cocycle property: sign(d, pq) = sign(d, p) * sign(d.p, q)
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(2, 6)
        d = tuple(rng.randint(0, 3) for _ in range(n))
        p = tuple(rng.sample(range(1, n + 1), n))
        q = tuple(rng.sample(range(1, n + 1), n))
        lhs = koszul_sign(d, compose(p, q))
        rhs = koszul_sign(d, p) * koszul_sign(act_tuple(d, p), q)
        assert lhs == rhs


def test_perm_str_roundtrip():
    for p in all_perms(4):
        assert parse_perm(perm_str(p)) == p
    big = tuple(range(12, 0, -1))
    assert parse_perm(perm_str(big)) == big


def test_block_perm_cross_compatibility():
    # block_perm(tau sigma) = block_perm(tau, lengths.sigma) block_perm(sigma, lengths)
    rng = random.Random(13)
    for _ in range(40):
        m = rng.randint(1, 4)
        lengths = tuple(rng.randint(0, 3) for _ in range(m))
        tau = tuple(rng.sample(range(1, m + 1), m))
        sig = tuple(rng.sample(range(1, m + 1), m))
        lhs = block_perm(compose(tau, sig), lengths)
        rhs = compose(block_perm(tau, lengths), block_perm(sig, act_tuple(lengths, tau)))
        assert lhs == rhs
