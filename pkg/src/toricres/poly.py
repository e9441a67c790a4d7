"""Sparse exact polynomials as {exponent tuple: Fraction} mappings.

Just enough arithmetic for expanding cohomology classes and Hessian
polynomials; everything stays exact.
"""

from __future__ import annotations

from fractions import Fraction


def poly_from_terms(terms):
    """Build a polynomial from (coefficient, exponents) pairs, dropping zeros."""
    out = {}
    for coeff, exps in terms:
        coeff = Fraction(coeff)
        key = tuple(int(e) for e in exps)
        val = out.get(key, Fraction(0)) + coeff
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


def monomial(exps, coeff=1):
    coeff = Fraction(coeff)
    return {tuple(int(e) for e in exps): coeff} if coeff else {}


def poly_add(p, q):
    out = dict(p)
    for key, c in q.items():
        val = out.get(key, Fraction(0)) + c
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


def poly_scale(c, p):
    c = Fraction(c)
    if not c:
        return {}
    return {key: c * v for key, v in p.items()}


def poly_mul(p, q):
    out = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            key = tuple(a + b for a, b in zip(k1, k2))
            val = out.get(key, Fraction(0)) + c1 * c2
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def poly_pow(p, n):
    if n < 0:
        raise ValueError("negative polynomial power")
    if not p and n == 0:
        raise ValueError("0**0 polynomial power is ambiguous here")
    result = None
    for _ in range(n):
        result = dict(p) if result is None else poly_mul(result, p)
    if result is None:
        # Empty product: the constant 1 needs an arity, take it from p.
        width = len(next(iter(p)))
        result = {(0,) * width: Fraction(1)}
    return result


def poly_degree_set(p):
    return {sum(exps) for exps in p}


def poly_eval(p, values):
    """Evaluate at a list of Fractions (one per variable slot)."""
    total = Fraction(0)
    for exps, coeff in p.items():
        term = coeff
        for i, e in enumerate(exps):
            if e == 0:
                continue
            base = values[i]
            if base == 0:
                term = Fraction(0)
                break
            term *= base ** e
        total += term
    return total
