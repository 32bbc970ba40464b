"""Seeded random generators shared by the test modules.

Everything is deterministic: each suite passes an explicit seed, so a failure
reproduces exactly.
"""

from __future__ import annotations

import random
from itertools import combinations

from crfkit.scalar import GaussRational, Patch, PolyScalar
from crfkit.tensor import DiffForm, Endomorphism, Multivector


def random_poly(rng: random.Random, patch: Patch, deg: int = 2,
                terms: int = 3, real: bool = False) -> PolyScalar:
    out = PolyScalar.zero(patch)
    for _ in range(terms):
        exp = [0] * patch.dim
        for _ in range(rng.randint(0, deg)):
            exp[rng.randrange(patch.dim)] += 1
        im = 0 if real else rng.randint(-1, 1)
        out = out + PolyScalar(patch, {tuple(exp): GaussRational(rng.randint(-3, 3), im)})
    return out


def random_multivector(rng, patch, k, deg=2, real=False) -> Multivector:
    comps = {}
    for idx in combinations(range(patch.dim), k):
        if rng.random() < 0.75:
            comps[idx] = random_poly(rng, patch, deg, real=real)
    return Multivector(patch, k, comps)


def random_form(rng, patch, k, deg=2, real=False) -> DiffForm:
    comps = {}
    for idx in combinations(range(patch.dim), k):
        if rng.random() < 0.75:
            comps[idx] = random_poly(rng, patch, deg, real=real)
    return DiffForm(patch, k, comps)


def random_endomorphism(rng, patch, deg=1) -> Endomorphism:
    return Endomorphism(patch, [[random_poly(rng, patch, deg, terms=2)
                                 for _ in range(patch.dim)]
                                for _ in range(patch.dim)])


def sgn(e: int) -> int:
    return -1 if e % 2 else 1
