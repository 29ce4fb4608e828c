"""Shared test helpers: seeded random generators for coefficients, series,
hypersurfaces, families, ODEs, and maps. Everything is exact; randomness is
always drawn through a caller-provided random.Random so failures reproduce."""

import random

import pytest

from crnf.hypersurface import RealHypersurface
from crnf.rationals import GaussRat, Q
from crnf.series import MultiSeries


def rand_rat(rng, max_num=6, max_den=3, allow_zero=True):
    num = rng.randint(-max_num, max_num)
    if not allow_zero and num == 0:
        num = 1
    return Q(num, rng.randint(1, max_den))


def rand_gauss(rng, max_num=6, max_den=3, real=False, allow_zero=True):
    re = rand_rat(rng, max_num, max_den, allow_zero=allow_zero)
    im = Q(0) if real else rand_rat(rng, max_num, max_den)
    return GaussRat(re, im)


def rand_series(rng, vars, order, density=0.4, max_num=6, real=False,
                min_degree=0):
    """Sparse random series: each admissible monomial kept with p=density."""
    vars = tuple(vars)
    terms = {}
    for exps in _exps_upto(len(vars), order):
        if sum(exps) < min_degree:
            continue
        if rng.random() < density:
            c = rand_gauss(rng, max_num=max_num, real=real)
            if c:
                terms[exps] = c
    return MultiSeries(vars, order, terms)


def _exps_upto(n, order):
    if n == 1:
        for d in range(order + 1):
            yield (d,)
        return
    for d in range(order + 1):
        for rest in _exps_upto(n - 1, order - d):
            yield (d,) + rest


def rand_useries(rng, budget, var="u", density=0.7, max_num=6, real=False,
                 min_degree=0):
    terms = {}
    for d in range(min_degree, budget + 1):
        if rng.random() < density:
            c = rand_gauss(rng, max_num=max_num, real=real)
            if c:
                terms[(d,)] = c
    return MultiSeries((var,), budget, terms)


def conj_useries(s):
    return MultiSeries(s.vars, s.order,
                       {e: c.conjugate() for e, c in s.terms.items()},
                       _checked=True)


def rand_hypersurface(rng, m, order, eps=None, density=0.6, max_num=6,
                      pairs=None, fuchsian=False):
    """Random valid hypersurface: Hermitian family with exact coefficients.

    pairs defaults to every (k,l), k,l >= 2, k <= l, k+l <= order; the
    Hermitian partner is filled in automatically. With fuchsian=True every
    generated series respects the vanishing-order bounds.
    """
    if eps is None:
        eps = rng.choice((1, -1))
    if pairs is None:
        pairs = [(k, l) for k in range(2, order - 1)
                 for l in range(k, order - k + 1)]
    hkl = {}
    for k, l in pairs:
        budget = order - k - l
        if budget < 0:
            continue
        min_degree = _fuchsian_floor(m, k, l) if fuchsian else 0
        if min_degree > budget:
            continue
        s = rand_useries(rng, budget, density=density, max_num=max_num,
                         real=(k == l), min_degree=min_degree)
        if not s.terms:
            continue
        if k == l:
            hkl[(k, l)] = s
        else:
            hkl[(k, l)] = s
            hkl[(l, k)] = conj_useries(s)
    return RealHypersurface(m, eps, order, hkl)


def rand_family(rng, m, order, sign=None, density=0.6, max_num=6, kmax=None):
    """Random admissible curve family; tail slices are drawn independently,
    so the result is generically not the family of any real hypersurface."""
    from crnf.segre import SegreFamily

    if sign is None:
        sign = rng.choice((1, -1))
    top = kmax if kmax is not None else order - 2
    phikl = {}
    for k in range(2, top + 1):
        for l in range(2, top + 1):
            budget = order - k - l
            if budget < 0:
                continue
            s = rand_useries(rng, budget, var="eta", density=density,
                             max_num=max_num)
            if s.terms:
                phikl[(k, l)] = s
    return SegreFamily(m, sign, order, phikl)


def rand_nmap(rng, m, order, density=0.5, max_num=5):
    """Random normalized map (z, w) -> (z + f, w + w g0 + w^m g)."""
    from crnf.ode import NormalizedMap

    vars = ("z", "w")
    f = MultiSeries.zero(vars, order)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            if (a, b) in ((0, 0), (1, 0)):
                continue
            if rng.random() < density:
                f = f + MultiSeries.monomial(
                    rand_gauss(rng, max_num=max_num), (a, b), vars, order)
    g = MultiSeries.zero(vars, order - m)
    for a in range(1, order - m + 1):
        for b in range(1, order - m + 1 - a):
            if rng.random() < density:
                g = g + MultiSeries.monomial(
                    rand_gauss(rng, max_num=max_num), (a, b), vars,
                    order - m)
    g0 = rand_useries(rng, order - 1, var="w", density=density,
                      max_num=max_num, min_degree=1)
    if m > 1:
        fixed = {}
        for (j,), c in g0.terms.items():
            fixed[(j,)] = GaussRat(c.re) if j < m else c
        g0 = MultiSeries(("w",), g0.order, fixed)
    return NormalizedMap(m, order, f, g0, g)


def rand_cauchy(rng, m, order, density=0.7, max_num=5):
    """Random boundary data with zero constant terms and real low g0."""
    from crnf.ode import CauchyData

    f0 = rand_useries(rng, order, var="w", density=density,
                      max_num=max_num, min_degree=1)
    f1 = rand_useries(rng, order - 1, var="w", density=density,
                      max_num=max_num, min_degree=1)
    g0 = rand_useries(rng, order - 1, var="w", density=density,
                      max_num=max_num, min_degree=1)
    if m > 1:
        fixed = {}
        for (j,), c in g0.terms.items():
            fixed[(j,)] = GaussRat(c.re) if j < m else c
        g0 = MultiSeries(("w",), g0.order, fixed)
    g1 = rand_useries(rng, order - m - 1, var="w", density=density,
                      max_num=max_num, min_degree=1)
    return CauchyData(m, order, f0, f1, g0, g1)


def _fuchsian_floor(m, k, l):
    k, l = min(k, l), max(k, l)
    if (k, l) == (2, 2):
        return m - 1
    if (k, l) in ((2, 3), (3, 3)):
        return 2 * m - 2
    if k == 2:
        return max(2 * m - l + 2, 0)
    return max(2 * m - k - l + 5, 0)


@pytest.fixture
def rng():
    return random.Random(20260816)
