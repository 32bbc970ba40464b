"""Truncated Lichnerowicz complex: coboundary, bigrading, spectral terms.

Truncation policy: multivectors with polynomial coefficients of total degree
at most D form a subcomplex iff the bivector has coefficient degree at most
one (the coboundary shifts coefficient degree by deg pi - 1).  Anything
computed here is a dimension of the *truncated* complex, never a claim about
the full cohomology.  Bidegree tables additionally need constant projector
matrices so that the graded pieces are free modules with monomial bases;
that restricts the spectral machinery to constant endomorphism blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb

from . import exactlinalg
from .report import CheckReport, PreconditionError, ReportBuilder
from .scalar import GR_ONE, GR_ZERO, GaussRational, Patch, PolyScalar
from .structures import AdaptedFrame
from .tensor import (DiffForm, Endomorphism, Multivector, basis_form,
                     basis_vector, evaluate, interior_product, lie_derivative,
                     pair, poisson_bracket_1forms, schouten_bracket, sharp)


class TruncationError(ValueError):
    """Input outside the policy that keeps the truncated space a subcomplex."""


# -- coboundary ----------------------------------------------------------------

def d_pi(pi: Multivector, w: Multivector) -> Multivector:
    """Lichnerowicz coboundary as the graded bracket: -[pi, w].

    Squares to zero exactly when pi is Poisson; callers that need the
    coboundary property check [pi,pi] themselves.
    """
    return -1 * schouten_bracket(pi, w)


def d_pi_coboundary(pi: Multivector, w: Multivector) -> Multivector:
    """The same coboundary through the argument-expansion formula:

    (d w)(l_0..l_k) = sum_h (-1)^h (sharp l_h)(w(.. no l_h ..))
                    + sum_{h<s} (-1)^{h+s} w({l_h,l_s}, .. no l_h, l_s ..)

    Kept as an independent computation path; agreement with d_pi pins the
    bracket normalization.
    """
    patch = w.patch
    k = w.k
    if k + 1 > patch.dim:
        return Multivector.zero(patch, k + 1)
    coframe = [basis_form(patch, i) for i in range(patch.dim)]
    brackets = {}
    for h, s in combinations(range(patch.dim), 2):
        brackets[(h, s)] = poisson_bracket_1forms(pi, coframe[h], coframe[s])
    comps = {}
    for idx in combinations(range(patch.dim), k + 1):
        total = PolyScalar.zero(patch)
        for hpos, h in enumerate(idx):
            rest = [coframe[i] for i in idx if i != h]
            inner = evaluate(w, rest)
            term = lie_derivative(sharp(pi, coframe[h]), inner)
            total = total + (term if hpos % 2 == 0 else -term)
        for hpos, spos in combinations(range(k + 1), 2):
            h, s = idx[hpos], idx[spos]
            rest = [coframe[i] for i in idx if i != h and i != s]
            args = [brackets[(h, s)]] + rest
            term = evaluate(w, args)
            total = total + (term if (hpos + spos) % 2 == 0 else -term)
        if not total.is_zero():
            comps[idx] = total
    return Multivector(patch, k + 1, comps, _clean=True)


# -- bigrading -----------------------------------------------------------------

def bigrade(w: Multivector, pr_q: Endomorphism, pr_p: Endomorphism
            ) -> dict[tuple[int, int], Multivector]:
    """Split a multivector by kernel/image leg counts.

    Returns nonzero components keyed by (kernel degree, image degree);
    summing the components recovers w exactly.
    """
    patch = w.patch
    out: dict[tuple[int, int], Multivector] = {}
    if w.k == 0:
        if not w.is_zero():
            out[(0, 0)] = w
        return out
    q_cols = [pr_q.apply(basis_vector(patch, i)) for i in range(patch.dim)]
    p_cols = [pr_p.apply(basis_vector(patch, i)) for i in range(patch.dim)]
    acc: dict[tuple[int, int], dict] = {}
    for idx, c in w.comps.items():
        for choice in product((0, 1), repeat=w.k):
            legs = [q_cols[i] if ch == 0 else p_cols[i]
                    for i, ch in zip(idx, choice)]
            term = legs[0]
            for leg in legs[1:]:
                term = term.wedge(leg)
                if term.is_zero():
                    break
            if term.is_zero():
                continue
            term = c * term
            key = (choice.count(0), choice.count(1))
            bucket = acc.setdefault(key, {})
            for tidx, tc in term.comps.items():
                prev = bucket.get(tidx)
                s = tc if prev is None else prev + tc
                if s.is_zero():
                    bucket.pop(tidx, None)
                else:
                    bucket[tidx] = s
    for key, bucket in sorted(acc.items()):
        mv = Multivector(patch, w.k, bucket, _clean=True)
        if not mv.is_zero():
            out[key] = mv
    return out


@dataclass
class SigmaSplit:
    prime: Multivector          # bidegree increment (-1, +2)
    second: Multivector         # bidegree increment (0, +1)
    residual: dict              # anything else; nonzero means not integrable


def sigma_split(pi: Multivector, w: Multivector, pr_q: Endomorphism,
                pr_p: Endomorphism) -> SigmaSplit:
    """Split d_pi w of a bihomogeneous w into its two lawful bidegrees."""
    grades = bigrade(w, pr_q, pr_p)
    if len(grades) > 1:
        raise PreconditionError(
            f"input is not bihomogeneous: grades {sorted(grades)}")
    (i, j) = next(iter(grades)) if grades else (0, 0)
    dw = d_pi(pi, w)
    parts = bigrade(dw, pr_q, pr_p)
    prime = parts.pop((i - 1, j + 2), Multivector.zero(w.patch, w.k + 1))
    second = parts.pop((i, j + 1), Multivector.zero(w.patch, w.k + 1))
    return SigmaSplit(prime=prime, second=second, residual=parts)


def sigma_prime_formula(pi, w, i, j, alphas, betas) -> PolyScalar:
    """Direct argument-expansion value of the (-1,+2) part on
    (i-1) kernel-annihilator arguments and (j+2) image-annihilator ones."""
    assert len(alphas) == i - 1 and len(betas) == j + 2
    total = PolyScalar.zero(w.patch)
    for h, k in combinations(range(j + 2), 2):
        br = poisson_bracket_1forms(pi, betas[h], betas[k])
        rest = [b for t, b in enumerate(betas) if t != h and t != k]
        term = evaluate(w, [br] + list(alphas) + rest)
        total = total + (term if (h + k) % 2 == 0 else -term)
    return total


def sigma_second_formula(pi, w, i, j, alphas, betas) -> PolyScalar:
    """Direct argument-expansion value of the (0,+1) part on i kernel
    annihilators and (j+1) image annihilators, signs taken verbatim."""
    assert len(alphas) == i and len(betas) == j + 1
    total = PolyScalar.zero(w.patch)
    for h in range(j + 1):
        rest = [b for t, b in enumerate(betas) if t != h]
        inner = evaluate(w, list(alphas) + rest)
        term = lie_derivative(sharp(pi, betas[h]), inner)
        total = total + (term if (i + h) % 2 == 0 else -term)
    for h in range(i):
        for k in range(j + 1):
            br = poisson_bracket_1forms(pi, alphas[h], betas[k])
            ra = [a for t, a in enumerate(alphas) if t != h]
            rb = [b for t, b in enumerate(betas) if t != k]
            term = evaluate(w, [br] + ra + rb)
            total = total + (term if (i + h + k) % 2 == 0 else -term)
    for h, k in combinations(range(j + 1), 2):
        br = poisson_bracket_1forms(pi, betas[h], betas[k])
        rest = [b for t, b in enumerate(betas) if t != h and t != k]
        term = evaluate(w, list(alphas) + [br] + rest)
        total = total + (term if (h + k) % 2 == 0 else -term)
    return total


# -- triple grading ---------------------------------------------------------------

def triple_grade(w: Multivector, frame: AdaptedFrame
                 ) -> dict[tuple[int, int, int], Multivector]:
    """Refine the image legs of w into +i and -i frame legs.

    Keys are (kernel, +i, -i) leg counts; components sum back to w.
    """
    kappas, kappa_bars, xis = frame.dual_cobasis()
    h = list(frame.h)
    hbar = [v.conjugate() for v in h]
    q = list(frame.q)
    fields = q + h + hbar
    covs = xis + kappas + kappa_bars
    nq, nh = len(q), len(h)
    patch = w.patch
    out: dict[tuple[int, int, int], Multivector] = {}
    if w.k == 0:
        if not w.is_zero():
            out[(0, 0, 0)] = w
        return out
    n = patch.dim
    acc: dict[tuple[int, int, int], Multivector] = {}
    for sel in combinations(range(n), w.k):
        coeff = evaluate(w, [covs[s] for s in sel])
        if coeff.is_zero():
            continue
        term = fields[sel[0]]
        for s in sel[1:]:
            term = term.wedge(fields[s])
        term = coeff * term
        a = sum(1 for s in sel if s < nq)
        bcount = sum(1 for s in sel if nq <= s < nq + nh)
        c = w.k - a - bcount
        key = (a, bcount, c)
        prev = acc.get(key)
        acc[key] = term if prev is None else prev + term
    for key in sorted(acc):
        if not acc[key].is_zero():
            out[key] = acc[key]
    return out


@dataclass
class SigmaSecondSplit:
    raising_h: Multivector      # (a, b, c) -> (a, b+1, c)
    raising_hbar: Multivector   # (a, b, c) -> (a, b, c+1)
    residual: dict


def sigma_pp_split(pi: Multivector, w: Multivector, pr_q: Endomorphism,
                   pr_p: Endomorphism, frame: AdaptedFrame) -> SigmaSecondSplit:
    """Split the (0,+1) part of the coboundary of a triple-homogeneous w by
    which eigen slot it raises."""
    grades = triple_grade(w, frame)
    if len(grades) > 1:
        raise PreconditionError(
            f"input is not triple-homogeneous: grades {sorted(grades)}")
    (a, b, c) = next(iter(grades)) if grades else (0, 0, 0)
    second = sigma_split(pi, w, pr_q, pr_p).second
    parts = triple_grade(second, frame)
    rh = parts.pop((a, b + 1, c), Multivector.zero(w.patch, w.k + 1))
    rhb = parts.pop((a, b, c + 1), Multivector.zero(w.patch, w.k + 1))
    return SigmaSecondSplit(raising_h=rh, raising_hbar=rhb, residual=parts)


# -- truncated spaces and matrices -------------------------------------------------

def monomials_upto(dim: int, bound: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree <= bound, lexicographically sorted."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, slots - 1)

    rec([], bound, dim)
    out.sort()
    return out


def truncated_dim(dim: int, k: int, bound: int) -> int:
    return comb(dim, k) * comb(dim + bound, bound)


@dataclass
class TruncatedSpace:
    """Monomial-times-wedge basis of degree-k multivectors with coefficient
    degree <= bound; basis order is (monomial, index tuple) lexicographic."""

    patch: Patch
    k: int
    bound: int
    basis: list = field(init=False)
    index: dict = field(init=False)

    def __post_init__(self):
        monos = monomials_upto(self.patch.dim, self.bound)
        idxs = list(combinations(range(self.patch.dim), self.k))
        self.basis = [(m, i) for m in monos for i in idxs]
        self.index = {b: n for n, b in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def element(self, n: int) -> Multivector:
        mono, idx = self.basis[n]
        return Multivector(self.patch, self.k,
                           {idx: PolyScalar(self.patch, {mono: GR_ONE}, _clean=True)},
                           _clean=True)

    def to_vector(self, w: Multivector) -> list[GaussRational]:
        if w.k != self.k:
            raise TruncationError(f"degree {w.k} element in degree-{self.k} space")
        vec = [GR_ZERO] * self.dimension
        for idx, c in w.comps.items():
            for mono, coeff in c.terms.items():
                key = (mono, idx)
                pos = self.index.get(key)
                if pos is None:
                    raise TruncationError(
                        f"coefficient degree {sum(mono)} exceeds bound {self.bound}")
                vec[pos] = vec[pos] + coeff
        return vec

    def from_vector(self, vec) -> Multivector:
        comps: dict = {}
        for val, (mono, idx) in zip(vec, self.basis):
            if val.is_zero():
                continue
            prev = comps.get(idx, PolyScalar.zero(self.patch))
            comps[idx] = prev + PolyScalar(self.patch, {mono: val}, _clean=True)
        return Multivector(self.patch, self.k, comps, _clean=True)


def operator_matrix(op, dom: TruncatedSpace, cod: TruncatedSpace):
    """Column-by-column matrix of a linear operator between truncated spaces."""
    cols = [cod.to_vector(op(dom.element(n))) for n in range(dom.dimension)]
    return [[cols[c][r] for c in range(dom.dimension)]
            for r in range(cod.dimension)]


def pi_degree(pi: Multivector) -> int:
    return max((c.total_degree() for c in pi.comps.values()), default=-1)


def _require_truncatable(pi: Multivector):
    if pi_degree(pi) > 1:
        raise TruncationError(
            "bivector coefficients have degree >= 2; the degree-bounded "
            "spaces are not a subcomplex, refusing to truncate")


def _require_poisson(pi: Multivector):
    br = schouten_bracket(pi, pi)
    if not br.is_zero():
        raise PreconditionError("bivector is not Poisson", witness=br)


def poisson_cohomology(pi: Multivector, bound: int, k_max: int) -> list[int]:
    """Betti numbers of the truncated complex for k = 0..k_max."""
    _require_poisson(pi)
    _require_truncatable(pi)
    patch = pi.patch
    k_max = min(k_max, patch.dim)
    spaces = [TruncatedSpace(patch, k, bound) for k in range(k_max + 2)]
    ranks = []
    for k in range(k_max + 1):
        if k + 1 > patch.dim:
            ranks.append(0)
            continue
        m = operator_matrix(lambda w: d_pi(pi, w), spaces[k], spaces[k + 1])
        ranks.append(exactlinalg.rank(m))
    dims = []
    for k in range(k_max + 1):
        incoming = ranks[k - 1] if k > 0 else 0
        dims.append(spaces[k].dimension - ranks[k] - incoming)
    return dims


# -- bigraded truncation and spectral terms -----------------------------------------

def _constant_matrix(e: Endomorphism):
    out = []
    for i in range(e.patch.dim):
        row = []
        for j in range(e.patch.dim):
            entry = e.entry(i, j)
            if not entry.is_constant():
                raise TruncationError(
                    "bidegree tables need constant projectors; endomorphism "
                    "block has non-constant entries")
            row.append(entry.constant_value())
        out.append(row)
    return out


def _wedge_vectors(vectors, patch: Patch) -> dict[tuple[int, ...], GaussRational]:
    """Components of a wedge of constant vectors: index-tuple minors."""
    k = len(vectors)
    out = {}
    for idx in combinations(range(patch.dim), k):
        mat = [[vectors[c][r] for c in range(k)] for r in idx]
        d = _num_det(mat)
        if not d.is_zero():
            out[idx] = d
    return out


def _num_det(m) -> GaussRational:
    n = len(m)
    if n == 0:
        return GR_ONE
    total = GR_ZERO
    from itertools import permutations as perms
    for p in perms(range(n)):
        transpositions = 0
        visited = [False] * n
        for start in range(n):
            cur = start
            while not visited[cur]:
                visited[cur] = True
                cur = p[cur]
                if not visited[cur]:
                    transpositions += 1
        term = GR_ONE if transpositions % 2 == 0 else -GR_ONE
        for r in range(n):
            term = term * m[r][p[r]]
            if term.is_zero():
                break
        total = total + term
    return total


@dataclass
class BigradedModel:
    """Adapted free-module bases for the bidegree pieces at one truncation."""

    patch: Patch
    bound: int
    q_basis: list            # constant kernel-direction vectors
    p_basis: list            # constant image-direction vectors
    monos: list
    wedge_coords: dict       # k -> matrix adapted-wedges -> coordinate wedges
    wedge_inverse: dict      # k -> its inverse
    wedge_keys: dict         # k -> list of (q_tuple, p_tuple)

    @property
    def q_rank(self):
        return len(self.q_basis)

    @property
    def p_rank(self):
        return len(self.p_basis)

    def space_dim(self, qd: int, pd: int) -> int:
        return comb(self.q_rank, qd) * comb(self.p_rank, pd) * len(self.monos)


def bigraded_model(a: Endomorphism, bound: int) -> BigradedModel:
    patch = a.patch
    amat = _constant_matrix(a)
    n = patch.dim
    a2 = [[sum((amat[i][l] * amat[l][j] for l in range(n)), GR_ZERO)
           for j in range(n)] for i in range(n)]
    prq = [[a2[i][j] + (GR_ONE if i == j else GR_ZERO) for j in range(n)]
           for i in range(n)]
    prp = [[-a2[i][j] for j in range(n)] for i in range(n)]
    q_basis = exactlinalg.column_space_basis(prq)
    p_basis = exactlinalg.column_space_basis(prp)
    if len(q_basis) + len(p_basis) != n:
        raise TruncationError("projector ranks do not fill the dimension")
    monos = monomials_upto(n, bound)
    model = BigradedModel(patch=patch, bound=bound, q_basis=q_basis,
                          p_basis=p_basis, monos=monos, wedge_coords={},
                          wedge_inverse={}, wedge_keys={})
    for k in range(n + 1):
        keys = []
        cols = []
        coord_idx = list(combinations(range(n), k))
        pos = {idx: t for t, idx in enumerate(coord_idx)}
        for qd in range(min(k, len(q_basis)) + 1):
            pd = k - qd
            if pd > len(p_basis):
                continue
            for qt in combinations(range(len(q_basis)), qd):
                for pt in combinations(range(len(p_basis)), pd):
                    vectors = [q_basis[t] for t in qt] + [p_basis[t] for t in pt]
                    comps = _wedge_vectors(vectors, patch)
                    col = [GR_ZERO] * len(coord_idx)
                    for idx, val in comps.items():
                        col[pos[idx]] = val
                    keys.append((qt, pt))
                    cols.append(col)
        mat = [[cols[c][r] for c in range(len(cols))] for r in range(len(coord_idx))]
        inv = exactlinalg.invert(mat) if mat else []
        if mat and inv is None:
            raise TruncationError("adapted wedge basis is singular")
        model.wedge_coords[k] = mat
        model.wedge_inverse[k] = inv
        model.wedge_keys[k] = keys
    return model


def expand_bigraded(model: BigradedModel, w: Multivector
                    ) -> dict[tuple[int, int], dict]:
    """Coefficients of w in the adapted (monomial, q-wedge, p-wedge) basis,
    grouped by bidegree."""
    patch = model.patch
    k = w.k
    coord_idx = list(combinations(range(patch.dim), k))
    pos = {idx: t for t, idx in enumerate(coord_idx)}
    inv = model.wedge_inverse[k]
    keys = model.wedge_keys[k]
    out: dict[tuple[int, int], dict] = {}
    per_mono: dict[tuple, list] = {}
    for idx, c in w.comps.items():
        for mono, coeff in c.terms.items():
            vec = per_mono.setdefault(mono, [GR_ZERO] * len(coord_idx))
            vec[pos[idx]] = vec[pos[idx]] + coeff
    for mono, vec in per_mono.items():
        coords = [sum((inv[r][c] * vec[c] for c in range(len(vec))), GR_ZERO)
                  for r in range(len(keys))]
        for val, (qt, pt) in zip(coords, keys):
            if val.is_zero():
                continue
            key = (len(qt), len(pt))
            bucket = out.setdefault(key, {})
            bucket[(mono, qt, pt)] = bucket.get((mono, qt, pt), GR_ZERO) + val
    return out


@dataclass
class SpectralTables:
    bound: int
    q_rank: int
    p_rank: int
    e1: dict                 # (i, j) -> dim, i = image degree, j = kernel degree
    e2: dict
    e3: dict
    sigma_prime_on_e2: dict  # (i, j) -> matrix (lists) E2^{ij} -> E2^{i+2, j-1}


def _bigraded_space(model: BigradedModel, qd: int, pd: int):
    """Deterministic basis list of the (qd, pd) piece at the model bound."""
    qts = list(combinations(range(model.q_rank), qd))
    pts = list(combinations(range(model.p_rank), pd))
    basis = [(m, qt, pt) for m in model.monos for qt in qts for pt in pts]
    return basis, {b: n for n, b in enumerate(basis)}


def _adapted_to_multivector(model: BigradedModel, items) -> Multivector:
    patch = model.patch
    total = None
    for (mono, qt, pt), val in items:
        vectors = [model.q_basis[t] for t in qt] + [model.p_basis[t] for t in pt]
        comps = _wedge_vectors(vectors, patch)
        mv = Multivector(patch, len(vectors),
                         {idx: PolyScalar(patch, {mono: val * c}, _clean=True)
                          for idx, c in comps.items()}, _clean=True)
        total = mv if total is None else total + mv
    return total


def _sigma_matrices(pi: Multivector, model: BigradedModel, reverse: bool = False):
    """Matrices of the (0,+1) and (-1,+2) parts on every bidegree piece.

    Returns ({(qd,pd): matrix}, {(qd,pd): matrix}); raises if the coboundary
    of any basis element leaves the two lawful bidegrees.
    """
    second = {}
    prime = {}
    qr, pr_ = model.q_rank, model.p_rank
    spaces = {}
    for qd in range(qr + 1):
        for pd in range(pr_ + 1):
            basis, index = _bigraded_space(model, qd, pd)
            if reverse:
                basis = list(reversed(basis))
                index = {b: n for n, b in enumerate(basis)}
            spaces[(qd, pd)] = (basis, index)
    for (qd, pd), (basis, _) in spaces.items():
        tgt2 = spaces.get((qd, pd + 1))
        tgtp = spaces.get((qd - 1, pd + 2))
        m2 = [[GR_ZERO] * len(basis) for _ in range(len(tgt2[0]) if tgt2 else 0)]
        mp = [[GR_ZERO] * len(basis) for _ in range(len(tgtp[0]) if tgtp else 0)]
        for col, key in enumerate(basis):
            w = _adapted_to_multivector(model, [(key, GR_ONE)])
            dw = d_pi(pi, w)
            if dw.is_zero():
                continue
            parts = expand_bigraded(model, dw)
            for (bq, bp), bucket in parts.items():
                if (bq, bp) == (qd, pd + 1):
                    _, tindex = tgt2
                    for bkey, val in bucket.items():
                        m2[tindex[bkey]][col] = val
                elif (bq, bp) == (qd - 1, pd + 2):
                    _, tindex = tgtp
                    for bkey, val in bucket.items():
                        mp[tindex[bkey]][col] = val
                else:
                    raise PreconditionError(
                        f"coboundary leaves lawful bidegrees at {(qd, pd)} -> {(bq, bp)}; "
                        "instance is not integrable")
        second[(qd, pd)] = m2
        prime[(qd, pd)] = mp
    return second, prime, spaces


def spectral_terms(pi: Multivector, a: Endomorphism, bound: int,
                   reverse_order: bool = False) -> SpectralTables:
    """Dimension tables of the first pages and the induced degree-(+2,-1)
    action on the second page.

    Table keys (i, j): i is the image degree, j the kernel degree, matching
    the page convention E_1^{ij} = (kernel degree j, image degree i) piece.
    """
    _require_poisson(pi)
    _require_truncatable(pi)
    model = bigraded_model(a, bound)
    second, prime, spaces = _sigma_matrices(pi, model, reverse=reverse_order)
    qr, pr_ = model.q_rank, model.p_rank
    e1 = {}
    for j in range(qr + 1):
        for i in range(pr_ + 1):
            e1[(i, j)] = model.space_dim(j, i)
    ranks2 = {key: exactlinalg.rank(m) if m else 0 for key, m in second.items()}
    e2 = {}
    for j in range(qr + 1):
        for i in range(pr_ + 1):
            out_rank = ranks2.get((j, i), 0)
            in_rank = ranks2.get((j, i - 1), 0) if i > 0 else 0
            e2[(i, j)] = e1[(i, j)] - out_rank - in_rank
    # representatives of E2 and the induced action
    reps = {}
    for j in range(qr + 1):
        for i in range(pr_ + 1):
            m_out = second.get((j, i), [])
            basis, _ = spaces[(j, i)]
            ker = exactlinalg.kernel_basis(m_out, len(basis)) if basis else []
            m_in = second.get((j, i - 1)) if i > 0 else None
            img = _image_vectors(m_in) if m_in else []
            reps[(i, j)] = _quotient_representatives(ker, img, len(basis))
    sigma_e2 = {}
    for j in range(qr + 1):
        for i in range(pr_ + 1):
            srcs = reps[(i, j)]
            tgt_key = (i + 2, j - 1)
            if j - 1 < 0 or i + 2 > pr_ or not srcs:
                continue
            tgts = reps.get(tgt_key, [])
            m_prime = prime.get((j, i), [])
            cols = []
            tgt_basis, _ = spaces[(j - 1, i + 2)]
            m_in_tgt = second.get((j - 1, i + 1))
            img_tgt = _image_vectors(m_in_tgt) if m_in_tgt else []
            for v in srcs:
                u = _mat_vec(m_prime, v) if m_prime else [GR_ZERO] * len(tgt_basis)
                coords = _class_coordinates(u, tgts, img_tgt, len(tgt_basis))
                if coords is None:
                    raise PreconditionError(
                        "induced action not well defined on representatives")
                cols.append(coords)
            sigma_e2[(i, j)] = [[cols[c][r] for c in range(len(cols))]
                                for r in range(len(tgts))]
    e3 = {}
    for j in range(qr + 1):
        for i in range(pr_ + 1):
            out_m = sigma_e2.get((i, j))
            out_rank = exactlinalg.rank(out_m) if out_m else 0
            in_m = sigma_e2.get((i - 2, j + 1))
            in_rank = exactlinalg.rank(in_m) if in_m else 0
            e3[(i, j)] = e2[(i, j)] - out_rank - in_rank
    fmt = {k: [[str(e) for e in row] for row in m] for k, m in sigma_e2.items()}
    return SpectralTables(bound=bound, q_rank=qr, p_rank=pr_,
                          e1=e1, e2=e2, e3=e3, sigma_prime_on_e2=fmt)


def _image_vectors(m) -> list:
    """Column-space spanning vectors of a matrix, as column vectors."""
    if not m or not m[0]:
        return []
    return exactlinalg.column_space_basis(m)


def _mat_vec(m, v):
    return [sum((row[c] * v[c] for c in range(len(v))), GR_ZERO) for row in m]


def _quotient_representatives(kernel, image, dim):
    """Kernel vectors completing the image to a basis of the kernel: the
    deterministic representatives of the quotient."""
    if dim == 0:
        return []
    rows = [list(v) for v in image]
    reps = []
    base_rank = exactlinalg.rank(rows) if rows else 0
    cur_rank = base_rank
    for v in kernel:
        cand = rows + [list(v)]
        r = exactlinalg.rank(cand)
        if r > cur_rank:
            rows = cand
            cur_rank = r
            reps.append(v)
    return reps


def _class_coordinates(u, reps, image, dim):
    """Coordinates of u in the representative basis, modulo the image."""
    cols = [list(r) for r in reps] + [list(v) for v in image]
    if not cols:
        return [] if all(e.is_zero() for e in u) else None
    mat = [[cols[c][r] for c in range(len(cols))] for r in range(dim)]
    sol = exactlinalg.solve(mat, list(u))
    if sol is None:
        return None
    return sol[:len(reps)]


# -- quotient algebroid on the image dual --------------------------------------------

def quotient_bracket_representative(pi: Multivector, pr_p: Endomorphism,
                                    alpha: DiffForm, beta: DiffForm) -> DiffForm:
    """Canonical representative of the induced bracket of classes: project
    both arguments onto the image-annihilator complement, bracket, and
    project the result."""
    ra = pr_p.apply_form(alpha)
    rb = pr_p.apply_form(beta)
    return pr_p.apply_form(poisson_bracket_1forms(pi, ra, rb))


def check_quotient_well_defined(pi: Multivector, pr_p: Endomorphism) -> CheckReport:
    """Well-definedness of the induced bracket on classes modulo the
    distribution annihilator, plus the stronger ideal property reported
    separately, plus the Jacobi identity on canonical representatives."""
    from .structures import check_nonholonomic_poisson_submanifold
    b = ReportBuilder("quotient algebroid on the image dual")
    pre = check_nonholonomic_poisson_submanifold(pi, pr_p)
    prec = b.cond("prop4.1:pre", "distribution is a (non)holonomic Poisson submanifold")
    for cond in pre.conditions:
        if not cond.passed and not cond.informational:
            for w in cond.witnesses:
                prec.fail(f"{cond.cond_id} {w.where}", w.value)
    if not prec._result.passed:
        return b.report()
    patch = pi.patch
    comp = Endomorphism.identity(patch) - pr_p
    ann_p = [comp.apply_form(basis_form(patch, j)) for j in range(patch.dim)]
    ca = b.cond("prop4.1:(a)", "brackets against annihilator classes have zero anchor")
    for a_i in range(patch.dim):
        alpha = basis_form(patch, a_i)
        for b_i, beta in enumerate(ann_p):
            if beta.is_zero():
                continue
            br = poisson_bracket_1forms(pi, alpha, beta)
            ca.require_zero(sharp(pi, br), f"(d{patch.coords[a_i]}, ann[{b_i}])")
    cb = b.cond("prop4.1:(b)",
                "stronger ideal property: such brackets lie in the annihilator",
                informational=True)
    for a_i in range(patch.dim):
        alpha = basis_form(patch, a_i)
        for b_i, beta in enumerate(ann_p):
            if beta.is_zero():
                continue
            br = poisson_bracket_1forms(pi, alpha, beta)
            cb.require_zero(pr_p.apply_form(br), f"(d{patch.coords[a_i]}, ann[{b_i}])")
    cj = b.cond("prop4.1:jacobi", "Jacobi identity on canonical representatives")
    coframe = [basis_form(patch, j) for j in range(patch.dim)]
    for x in range(patch.dim):
        for y in range(patch.dim):
            for z in range(patch.dim):
                t1 = quotient_bracket_representative(
                    pi, pr_p, quotient_bracket_representative(pi, pr_p, coframe[x], coframe[y]),
                    coframe[z])
                t2 = quotient_bracket_representative(
                    pi, pr_p, quotient_bracket_representative(pi, pr_p, coframe[y], coframe[z]),
                    coframe[x])
                t3 = quotient_bracket_representative(
                    pi, pr_p, quotient_bracket_representative(pi, pr_p, coframe[z], coframe[x]),
                    coframe[y])
                cj.require_zero(t1 + t2 + t3,
                                f"({patch.coords[x]}, {patch.coords[y]}, {patch.coords[z]})")
    return b.report()
