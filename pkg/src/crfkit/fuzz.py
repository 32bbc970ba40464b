"""Seeded generators of compatible pairs and random tensors.

The pair generator starts from a constant normal form (complex blocks plus a
kernel block, with a constant eigen-split bivector), then optionally applies
a polynomial gauge conjugation and a scalar rescaling of the bivector.  Both
moves preserve the pointwise compatibility identities, so every emitted pair
is quasi-classical; integrability varies, which is exactly what the
three-route equivalence suite wants to see.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .scalar import GaussRational, Patch, PolyScalar
from .structures import StructureInstance
from .tensor import DiffForm, Endomorphism, Multivector


def random_gauss(rng: random.Random, span: int = 3, imag: bool = True) -> GaussRational:
    return GaussRational(rng.randint(-span, span),
                         rng.randint(-1, 1) if imag else 0)


def random_poly(rng: random.Random, patch: Patch, deg: int = 2,
                terms: int = 3, real: bool = False) -> PolyScalar:
    out = PolyScalar.zero(patch)
    for _ in range(terms):
        exp = [0] * patch.dim
        for _ in range(rng.randint(0, deg)):
            exp[rng.randrange(patch.dim)] += 1
        out = out + PolyScalar(patch, {tuple(exp): random_gauss(rng, imag=not real)})
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


def _block_normal_form(rng: random.Random, dim: int) -> tuple[Endomorphism, Multivector, int]:
    """Constant endomorphism with c complex blocks and a kernel block, plus
    a constant compatible bivector supported on the complex blocks."""
    patch = Patch(tuple(f"x{i+1}" for i in range(dim)))
    c = rng.randint(0, dim // 2)
    zero = PolyScalar.zero(patch)
    one = PolyScalar.const(patch, 1)
    rows = [[zero] * dim for _ in range(dim)]
    for k in range(c):
        rows[2 * k][2 * k + 1] = -one
        rows[2 * k + 1][2 * k] = one
    a = Endomorphism(patch, rows)
    # eigen fields h_k = d/dx_{2k+1} - i d/dx_{2k+2}
    hs = []
    for k in range(c):
        hs.append(Multivector(patch, 1, {
            (2 * k,): one,
            (2 * k + 1,): PolyScalar.const(patch, GaussRational(0, -1))}))
    pi = Multivector.zero(patch, 2)
    for k, l in combinations(range(c), 2):
        coeff = random_gauss(rng)
        if coeff.is_zero():
            continue
        term = PolyScalar.const(patch, coeff) * hs[k].wedge(hs[l])
        pi = pi + term + term.conjugate()
    return a, pi, c


def _gauge(rng: random.Random, a: Endomorphism, pi: Multivector
           ) -> tuple[Endomorphism, Multivector]:
    """Conjugate by S = Id + N with N a single strictly-triangular polynomial
    entry (so N^2 = 0 and S^-1 = Id - N); a bundle gauge, not a coordinate
    change, so it preserves the pointwise compatibility but usually breaks
    integrability."""
    patch = a.patch
    n = patch.dim
    if n < 2:
        return a, pi
    i = rng.randrange(n - 1)
    j = rng.randrange(i + 1, n)
    entry = random_poly(rng, patch, deg=1, terms=2, real=True)
    zero = PolyScalar.zero(patch)
    rows = [[zero] * n for _ in range(n)]
    rows[i][j] = entry
    nmat = Endomorphism(patch, rows)
    s = Endomorphism.identity(patch) + nmat
    s_inv = Endomorphism.identity(patch) - nmat
    a2 = s.compose(a).compose(s_inv)
    # push the bivector through S leg by leg
    comps = {}
    for (p, q), cpq in pi.comps.items():
        vp = s.apply(Multivector.basis(patch, p))
        vq = s.apply(Multivector.basis(patch, q))
        term = cpq * vp.wedge(vq)
        for idx, c in term.comps.items():
            prev = comps.get(idx)
            comps[idx] = c if prev is None else prev + c
    pi2 = Multivector(patch, 2, comps)
    return a2, pi2


def fuzz_pair(rng: random.Random) -> StructureInstance:
    """One seeded quasi-classical pair in dimension <= 6 with coefficient
    degree <= 2."""
    dim = rng.randint(2, 6)
    a, pi, c = _block_normal_form(rng, dim)
    move = rng.random()
    if move < 0.4:
        a, pi = _gauge(rng, a, pi)
    elif move < 0.7:
        f = random_poly(rng, a.patch, deg=1, terms=2, real=True)
        pi = f * pi
    name = f"fuzz(dim={dim},c={c},move={move:.2f})"
    return StructureInstance(patch=a.patch, a=a, pi=pi, name=name)


def fuzz_corpus(seed: int, count: int) -> list[StructureInstance]:
    rng = random.Random(seed)
    return [fuzz_pair(rng) for _ in range(count)]
