"""Jeffrey-Kirwan residues on complete simplicial fans, plus Brion evaluation.

The residue acts on Laurent monomials in one coordinate per fan generator,
viewed as rational functions on the relation space of the generators.  A
basic fraction 1/prod_{i in I} x_i whose denominator forms are a basis
evaluates to 1/Vol(sigma) when the complementary generators span a maximal
cone sigma of the fan, and to 0 otherwise; everything else reduces to basic
fractions by rewriting one numerator variable at a time against a basis
chosen from the denominator support.  The reduction involves choices; the
result provably does not depend on them, and a seeded tie-break mode exists
so tests can assert exactly that.
"""

from __future__ import annotations

import itertools
import logging
import random
from fractions import Fraction

from .lattice import (
    GeometryError,
    InvariantError,
    cone_volume,
    det_int,
    dot,
    invert_rational,
    matrix_rank,
    solve_rational,
)
from .poly import poly_eval

log = logging.getLogger(__name__)

#: Hard cap on worklist expansions per residue computation.
MAX_TERMS = 10**6


class LexTieBreak:
    """Deterministic choices: smallest numerator index, lex-first basis."""

    def numerator_index(self, candidates):
        return candidates[0]

    def basis_order(self, subsets):
        return subsets


class SeededTieBreak:
    """Randomized but reproducible choices, for independence testing only."""

    def __init__(self, seed):
        self.rng = random.Random(seed)

    def numerator_index(self, candidates):
        return self.rng.choice(candidates)

    def basis_order(self, subsets):
        subsets = list(subsets)
        self.rng.shuffle(subsets)
        return subsets


class JKEngine:
    """Residue calculator bound to one complete simplicial fan."""

    def __init__(self, generators, max_cones, volumes=None):
        from .lattice import relations_among

        self.generators = tuple(tuple(g) for g in generators)
        self.max_cones = tuple(tuple(sorted(c)) for c in max_cones)
        self.n = len(self.generators)
        self.kernel = tuple(relations_among(self.generators))
        self.dim = len(self.kernel)
        # Restricting the i-th coordinate to the relation space, written in
        # kernel-basis coordinates, is just the i-th column of the basis.
        self.forms = tuple(
            tuple(row[i] for row in self.kernel) for i in range(self.n)
        )
        self._cone_lookup = {}
        for cone in self.max_cones:
            vol = (volumes or {}).get(cone) or cone_volume(
                [self.generators[i] for i in cone]
            )
            if vol == 0:
                raise GeometryError(f"maximal cone {cone} is degenerate")
            self._cone_lookup[frozenset(cone)] = vol

    # -- basic fractions ----------------------------------------------------

    def basic_value(self, support):
        """Value of 1/prod_{i in support} x_i when the support forms a basis."""
        support = sorted(support)
        if len(support) != self.dim:
            raise GeometryError(
                f"basic fraction needs {self.dim} denominator indices, got {len(support)}"
            )
        if matrix_rank([self.forms[i] for i in support]) != self.dim:
            raise GeometryError(
                "denominator forms are linearly dependent; not a basic fraction"
            )
        complement = frozenset(range(self.n)) - frozenset(support)
        vol = self._cone_lookup.get(complement)
        return Fraction(0) if vol is None else Fraction(1, vol)

    # -- general monomials --------------------------------------------------

    def residue(self, exponents, tie_break=None):
        """Residue of the Laurent monomial prod x_i^{exponents[i]}.

        The total degree must be -dim of the relation space.  All arithmetic
        is exact; the answer is independent of the tie-break strategy.
        """
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) != self.n:
            raise GeometryError("exponent vector length does not match generator count")
        if self.dim == 0:
            raise GeometryError("the relation space is trivial; no residue to take")
        if sum(exponents) != -self.dim:
            raise GeometryError(
                f"residue needs total degree {-self.dim}, got {sum(exponents)}"
            )
        chooser = tie_break or LexTieBreak()
        num = tuple(max(e, 0) for e in exponents)
        den = tuple(max(-e, 0) for e in exponents)
        work = [(Fraction(1), num, den)]
        total = Fraction(0)
        steps = 0
        while work:
            steps += 1
            if steps > MAX_TERMS:
                raise InvariantError("residue worklist exceeded the term cap")
            coeff, num, den = work.pop()
            if coeff == 0:
                continue
            support = [i for i, e in enumerate(den) if e > 0]
            if matrix_rank([self.forms[i] for i in support]) < self.dim:
                continue  # degenerate: denominator forms do not span
            positives = [j for j, e in enumerate(num) if e > 0]
            if not positives:
                # Constant numerator; the degree bookkeeping forces a basic
                # fraction here (all denominator exponents are one).
                total += coeff * self.basic_value(support)
                continue
            j = chooser.numerator_index(positives)
            basis = self._pick_basis(support, chooser)
            mat = [[self.forms[b][k] for b in basis] for k in range(self.dim)]
            sol = solve_rational(mat, self.forms[j])
            if sol is None:
                raise InvariantError("basis solve failed for a spanning subset")
            num_child = tuple(e - int(i == j) for i, e in enumerate(num))
            for b, c in zip(basis, sol):
                if c == 0:
                    continue
                den_child = tuple(e - int(i == b) for i, e in enumerate(den))
                work.append((coeff * c, num_child, den_child))
        return total

    def residue_of_terms(self, terms):
        """Sum of residues over (coefficient, exponent vector) pairs."""
        total = Fraction(0)
        for coeff, exps in terms:
            coeff = Fraction(coeff)
            if coeff:
                total += coeff * self.residue(exps)
        return total

    def _pick_basis(self, support, chooser):
        subsets = itertools.combinations(sorted(support), self.dim)
        for subset in chooser.basis_order(list(subsets)):
            if matrix_rank([self.forms[i] for i in subset]) == self.dim:
                return subset
        raise InvariantError("no basis found in a spanning denominator support")


def restricted_forms(generators):
    """Per-generator linear forms on the relation space, plus its basis.

    Returns (kernel_basis, forms); the identity sum_i <w, v_i> x_i|_R = 0
    holds for every dual vector w, which callers use as a self-check.
    """
    from .lattice import relations_among

    kernel = tuple(relations_among(generators))
    forms = tuple(tuple(row[i] for row in kernel) for i in range(len(generators)))
    return kernel, forms


def jk_basic(engine, indices):
    """Spec surface: value of the basic fraction with the given denominator."""
    return engine.basic_value(indices)


def jk_residue(engine, exponents, tie_break=None):
    """Spec surface: residue of a Laurent monomial exponent vector."""
    return engine.residue(exponents, tie_break=tie_break)


# ---------------------------------------------------------------------------
# Brion evaluation of top-degree cohomology products
# ---------------------------------------------------------------------------

def _primes(count):
    ps = []
    n = 2
    while len(ps) < count:
        if all(n % p for p in ps if p * p <= n):
            ps.append(n)
        n += 1
    return ps


_POINT_POOL = _primes(256)


def _generic_point(attempt, rank):
    start = attempt * rank
    if start + rank > len(_POINT_POOL):
        raise InvariantError("ran out of generic evaluation points")
    return [Fraction(p) for p in _POINT_POOL[start:start + rank]]


def evaluate_top_class(fan_like, polynomial, allow_incomplete=False):
    """Evaluate a top-degree polynomial in the generator classes over a fan.

    ``fan_like`` needs ``generators`` and ``max_cones``.  The polynomial maps
    exponent tuples (one slot per generator) to rational coefficients and must
    be homogeneous of degree equal to the ambient rank.  Evaluation sums, over
    maximal cones, the polynomial at the cone's dual-basis coordinates of a
    generic rational point divided by the product of those coordinates times
    the cone volume.  Two different generic points must agree exactly; that
    constancy is asserted, and pole hits retry with the next point.
    """
    generators = [tuple(g) for g in fan_like.generators]
    max_cones = [tuple(c) for c in fan_like.max_cones]
    if not polynomial:
        return Fraction(0)
    rank = len(generators[0])
    degrees = {sum(exps) for exps in polynomial}
    if degrees != {rank}:
        raise GeometryError(
            f"expected a homogeneous degree-{rank} polynomial, got degrees {sorted(degrees)}"
        )
    if not allow_incomplete:
        from .fan import _wall_census

        census = _wall_census(max_cones)
        if any(len(owners) != 2 for owners in census.values()):
            raise GeometryError(
                "fan is not complete; pass allow_incomplete=True only for "
                "classes vanishing on the boundary"
            )

    duals = {}
    vols = {}
    for cone in max_cones:
        mat = [[generators[i][k] for i in cone] for k in range(rank)]
        det = det_int(mat)
        if det == 0:
            raise GeometryError(f"maximal cone {cone} is degenerate")
        vols[cone] = abs(det)
        duals[cone] = invert_rational(mat)

    values = []
    attempt = 0
    while len(values) < 2:
        point = _generic_point(attempt, rank)
        attempt += 1
        total = Fraction(0)
        hit_pole = False
        for cone in max_cones:
            coords = [dot(row, point) for row in duals[cone]]
            if any(c == 0 for c in coords):
                hit_pole = True
                break
            vals = [Fraction(0)] * len(generators)
            denom = Fraction(1, vols[cone])
            for i, c in zip(cone, coords):
                vals[i] = c
                denom /= c
            total += poly_eval(polynomial, vals) * denom
        if hit_pole:
            log.debug("generic point %d hit a pole; retrying", attempt - 1)
            continue
        values.append(total)
    if values[0] != values[1]:
        raise InvariantError(
            "Brion sum is not constant across generic points; the class is "
            f"not in the boundary-vanishing algebra ({values[0]} vs {values[1]})"
        )
    return values[0]
