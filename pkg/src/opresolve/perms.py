"""Permutation calculus on one-line notation.

A permutation of {1..n} is stored as a tuple ``p`` with ``p[i-1] = p(i)``
(the one-line notation [p(1)p(2)...p(n)]).  Composition is composition of
functions, ``compose(s, t)(i) = s(t(i))``, so right actions satisfy
``x.(s*t) = (x.s).t``.

Besides the group operations this module provides the two block
constructions used throughout the package: the inclusion
``Sigma_{l1} x ... x Sigma_{lm} -> Sigma_n`` (``cross``) and the block
permutation of ``tau`` with respect to a tuple of block lengths
(``block_perm``), plus the Koszul sign of rearranging a word of graded
symbols.
"""
from __future__ import annotations

import itertools

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def is_permutation(p) -> bool:
    return sorted(p) == list(range(1, len(p) + 1))


def compose(s: Perm, t: Perm) -> Perm:
    """(s*t)(i) = s(t(i)); apply t first."""
    assert len(s) == len(t)
    return tuple(s[t[i] - 1] for i in range(len(t)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v - 1] = i + 1
    return tuple(inv)


def transposition(n: int, i: int) -> Perm:
    """The adjacent transposition s_i = (i, i+1) in Sigma_n."""
    assert 1 <= i < n
    p = list(range(1, n + 1))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def sign(p: Perm) -> int:
    inv = 0
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                inv += 1
    return -1 if inv % 2 else 1


def adjacent_factorization(p: Perm) -> list[int]:
    """Indices i1,...,ik with p = s_{i1} s_{i2} ... s_{ik}.

    Obtained by bubble-sorting the one-line word to the identity: if
    p·s_{j1}···s_{jk} = id then p = s_{jk}···s_{j1}, and right-multiplying
    by s_i swaps positions i, i+1 of the word.
    """
    word = list(p)
    swaps = []
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                swaps.append(i + 1)
                changed = True
    return swaps[::-1]


def act_tuple(vec: tuple, p: Perm) -> tuple:
    """Right action on words: (v . p)_i = v_{p(i)}."""
    assert len(vec) == len(p)
    return tuple(vec[p[i] - 1] for i in range(len(p)))


def cross(*perms: Perm) -> Perm:
    """Block-diagonal inclusion of a product of symmetric groups.

    (l1,...,lm blocks; an empty factor contributes nothing.)
    """
    out: list[int] = []
    offset = 0
    for lam in perms:
        out.extend(offset + lam[j] for j in range(len(lam)))
        offset += len(lam)
    return tuple(out)


def block_perm(tau: Perm, lengths: tuple[int, ...]) -> Perm:
    """The (l1,...,lm)-block permutation of tau.

    Sends position l_{tau(1)}+...+l_{tau(i-1)}+j to l_1+...+l_{tau(i)-1}+j;
    blocks of length 0 are simply omitted.
    """
    assert len(tau) == len(lengths)
    src_offset = [0] * len(lengths)
    for i in range(1, len(lengths)):
        src_offset[i] = src_offset[i - 1] + lengths[i - 1]
    out: list[int] = []
    for i in range(len(tau)):
        b = tau[i] - 1
        out.extend(src_offset[b] + j for j in range(1, lengths[b] + 1))
    return tuple(out)


def koszul_sign(degrees, p: Perm) -> int:
    """Sign of rearranging a word of graded symbols into (w_{p(1)},...,w_{p(n)}).

    A pair i<j contributes (-1)^{d_i d_j} when it ends up inverted.
    """
    assert len(degrees) == len(p)
    inv = inverse(p)
    e = 0
    for i in range(len(p)):
        if degrees[i] % 2 == 0:
            continue
        for j in range(i + 1, len(p)):
            if degrees[j] % 2 and inv[i] > inv[j]:
                e += 1
    return -1 if e % 2 else 1


def all_perms(n: int):
    """All of Sigma_n in lexicographic order."""
    return (tuple(p) for p in itertools.permutations(range(1, n + 1)))


def perm_str(p: Perm) -> str:
    if len(p) < 10:
        return "".join(str(v) for v in p)
    return ",".join(str(v) for v in p)


def parse_perm(s: str) -> Perm:
    if "," in s:
        return tuple(int(v) for v in s.split(","))
    return tuple(int(c) for c in s)
