"""Shared builders for randomized suites: valid random Sigma-modules and
equivariant complexes (differentials built from iso-cones so d^2 = 0 holds by
construction, then mixed by twisted targets)."""
from fractions import Fraction

from opresolve import perms
from opresolve.linalg import ChainComplexSlice, GradedSpace
from opresolve.sigma import BasisElement, ColouredSigmaModule

F = Fraction


def random_sigma_module(rng, colours=("A", "B"), n_blocks=2, max_arity=3, max_degree=3,
                        with_differential=True):
    """A random coloured Sigma-module built from valid blocks.

    Block types: free orbit k[Sigma_n] (optionally sign-twisted) on a random
    colour word, or a one-dimensional trivial/sign representation on a
    constant colour word.  Optionally each block gets a cone partner one
    degree down with an equivariant iso differential onto a twisted copy.
    """
    elements = []
    actions = {}
    seeds = []  # (kind, name, arity, degree, out, ins)
    uid = 0

    def add_block(kind, arity, degree, out, ins):
        nonlocal uid
        name = f"{kind}{uid}"
        uid += 1
        if kind in ("triv", "sign"):
            elements.append(BasisElement(name, degree, out, ins))
            c = F(1) if kind == "triv" else F(-1)
            for i in range(1, arity):
                actions.setdefault((arity, i), {})[name] = {name: c}
        else:
            for sigma in perms.all_perms(arity):
                elements.append(
                    BasisElement(f"{name}[{perms.perm_str(sigma)}]", degree, out,
                                 perms.act_tuple(ins, sigma))
                )
            for i in range(1, arity):
                mat = actions.setdefault((arity, i), {})
                for sigma in perms.all_perms(arity):
                    tgt = perms.compose(sigma, perms.transposition(arity, i))
                    c = F(-1) if kind == "freesign" else F(1)
                    mat[f"{name}[{perms.perm_str(sigma)}]"] = {
                        f"{name}[{perms.perm_str(tgt)}]": c
                    }
        seeds.append((kind, name, arity, degree, out, ins))
        return name

    diff_pairs = []
    for _ in range(n_blocks):
        arity = rng.randint(1, max_arity)
        kind = rng.choice(["free", "freesign", "triv", "sign"])
        out = rng.choice(colours)
        if kind in ("triv", "sign"):
            v = rng.choice(colours)
            ins = tuple([v] * arity)
        else:
            ins = tuple(rng.choice(colours) for _ in range(arity))
        degree = rng.randint(0, max_degree)
        top = add_block(kind, arity, degree, out, ins)
        if with_differential and degree >= 1 and rng.random() < 0.6:
            bot = add_block(kind, arity, degree - 1, out, ins)
            diff_pairs.append((kind, top, bot, arity))

    module = ColouredSigmaModule(colours, elements, actions)
    if not diff_pairs:
        return module

    differential = {}
    for kind, top, bot, arity in diff_pairs:
        c = F(rng.choice([1, -1]) * rng.randint(1, 3))
        if kind in ("triv", "sign"):
            differential[top] = {bot: c}
        else:
            ins = next(s[5] for s in seeds if s[1] == top)
            stab = [p for p in perms.all_perms(arity) if perms.act_tuple(ins, p) == ins]
            rho = rng.choice(stab)
            value = {f"{bot}[{perms.perm_str(rho)}]": c}
            for sigma in perms.all_perms(arity):
                # top[sigma] = chi(sigma) * (top[id].sigma) in the twisted case
                chi = F(perms.sign(sigma)) if kind == "freesign" else F(1)
                key = f"{top}[{perms.perm_str(sigma)}]"
                differential[key] = {
                    t: chi * v for t, v in module.act(value, sigma).items()
                }
    return ColouredSigmaModule(colours, elements, actions, differential)


def symmetric_group_elements(n):
    return {perms.perm_str(p): p for p in perms.all_perms(n)}


def random_equivariant_complex(rng, n, n_blocks=3, max_degree=3):
    """(ChainComplexSlice, generator action dict, full action dict) over k[Sigma_n].

    Blocks are regular / trivial / sign representations; differentials are
    equivariant isos between same-type blocks in adjacent degrees.
    """
    basis = []
    act_elem = {perms.perm_str(p): {} for p in perms.all_perms(n)}
    diff = {}
    uid = 0

    def add(kind, degree):
        nonlocal uid
        tag = f"{kind}{uid}"
        uid += 1
        if kind == "reg":
            names = {p: f"{tag}[{perms.perm_str(p)}]" for p in perms.all_perms(n)}
            for p, name in names.items():
                basis.append((name, degree))
                for g in perms.all_perms(n):
                    act_elem[perms.perm_str(g)][name] = {names[perms.compose(p, g)]: F(1)}
            return ("reg", names)
        basis.append((tag, degree))
        for g in perms.all_perms(n):
            c = F(1) if kind == "triv" else F(perms.sign(g))
            act_elem[perms.perm_str(g)][tag] = {tag: c}
        return (kind, tag)

    for _ in range(n_blocks):
        kind = rng.choice(["reg", "triv", "sign"])
        degree = rng.randint(0, max_degree)
        top = add(kind, degree)
        if degree >= 1 and rng.random() < 0.6:
            bot = add(kind, degree - 1)
            c = F(rng.choice([1, -1]) * rng.randint(1, 2))
            if kind == "reg":
                rho = tuple(rng.sample(range(1, n + 1), n))
                for p, name in top[1].items():
                    diff[name] = {bot[1][perms.compose(rho, p)]: c}
            else:
                diff[top[1]] = {bot[1]: c}

    space = GradedSpace(tuple(basis))
    c = ChainComplexSlice(space, diff)
    gen_mats = {}
    for i in range(1, n):
        g = perms.perm_str(perms.transposition(n, i))
        gen_mats[f"s{i}"] = act_elem[g]
    return c, gen_mats, act_elem
