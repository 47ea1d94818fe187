"""Small algebras and random rationals shared by the tests."""
import random
from fractions import Fraction as F

from liekit.algebra import LieAlgebra
from liekit.automorphisms import AutomorphismShape
from liekit.derivations import free_row2_columns


def rand_q(rng, lo=-5, hi=5, den=4):
    return F(rng.randint(lo, hi), rng.randint(1, den))


def rand_vec(rng, n, **kw):
    return tuple(rand_q(rng, **kw) for _ in range(n))


def random_automorphism(rng, m):
    """A random realization of the triangular automorphism shape of Q_{2m+1}."""
    n = 2 * m + 1
    nz = lambda: rand_q(rng) or F(1)  # noqa: E731
    return AutomorphismShape(
        m, nz(), nz(),
        {k: rand_q(rng) for k in range(3, n + 1)},
        {k: rand_q(rng) for k in free_row2_columns(m)},
    ).realize()


def sl2():
    # basis h, e, f
    return LieAlgebra.from_brackets(3, {(1, 2): {2: 2}, (1, 3): {3: -2}, (2, 3): {1: 1}}, ["h", "e", "f"])


def heisenberg():
    return LieAlgebra.from_brackets(3, {(1, 2): {3: 1}})


def model_filiform(n):
    return LieAlgebra.from_brackets(n, {(1, k): {k + 1: 1} for k in range(2, n)})


def random_nilpotent4(seed):
    rng = random.Random(seed)
    x, y, z, w = (rand_q(rng) or F(1) for _ in range(4))
    return LieAlgebra.from_brackets(4, {(1, 2): {3: x, 4: y}, (1, 3): {4: z}, (2, 3): {4: w}})


def solvable_example():
    # a non-nilpotent solvable algebra: h acting diagonally on the Heisenberg algebra
    return LieAlgebra.from_brackets(4, {(1, 2): {3: 1}, (4, 1): {1: 1}, (4, 2): {2: 2}, (4, 3): {3: 3}})


LIE_EXAMPLES = {
    "sl2": sl2,
    "heisenberg": heisenberg,
    "filiform5": lambda: model_filiform(5),
    "nilpotent4": lambda: random_nilpotent4(1),
    "solvable4": solvable_example,
}
