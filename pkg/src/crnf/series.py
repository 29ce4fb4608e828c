"""Truncated multivariate formal power series over Gaussian rationals.

A MultiSeries is a finite dict {exponent tuple: GaussRat} together with a
variable tuple and a truncation order: it represents its true value modulo
total degree > order. Orders are tracked honestly: differentiation lowers
the order by one, integration raises it, coefficient views budget for the
degrees they strip. Binary operations insist on identical variable tuples
and orders so that truncation mistakes surface as errors instead of wrong
coefficients.

All values are immutable; every operation returns a new series.
"""

from __future__ import annotations

from .rationals import GaussRat, ONE, ZERO, Q

__all__ = ["MultiSeries", "solve_implicit"]

_MAX_VARS = 4


def _as_coeff(c):
    if isinstance(c, GaussRat):
        return c
    return GaussRat(c)


class MultiSeries:
    __slots__ = ("vars", "order", "terms", "_sorted_cache")

    def __init__(self, vars, order, terms=None, _checked=False):
        vars = tuple(vars)
        if not (1 <= len(vars) <= _MAX_VARS):
            raise ValueError(f"variable count must be 1..{_MAX_VARS}, got {len(vars)}")
        if len(set(vars)) != len(vars):
            raise ValueError(f"duplicate variable names in {vars}")
        if order < 0:
            raise ValueError("order must be nonnegative")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "order", order)
        if terms is None:
            terms = {}
        if not _checked:
            clean = {}
            n = len(vars)
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent tuple {exps} for vars {vars}")
                c = _as_coeff(c)
                if sum(exps) <= order and c:
                    clean[exps] = c
            terms = clean
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_sorted_cache", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultiSeries is immutable")

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(vars, order):
        return MultiSeries(vars, order, {}, _checked=True)

    @staticmethod
    def constant(c, vars, order):
        c = _as_coeff(c)
        z = (0,) * len(tuple(vars))
        return MultiSeries(vars, order, {z: c} if c else {}, _checked=True)

    @staticmethod
    def one(vars, order):
        return MultiSeries.constant(1, vars, order)

    @staticmethod
    def variable(name, vars, order):
        vars = tuple(vars)
        i = vars.index(name)
        exps = tuple(1 if j == i else 0 for j in range(len(vars)))
        if order < 1:
            return MultiSeries.zero(vars, order)
        return MultiSeries(vars, order, {exps: ONE}, _checked=True)

    @staticmethod
    def monomial(c, exps, vars, order):
        c = _as_coeff(c)
        exps = tuple(exps)
        if not c or sum(exps) > order:
            return MultiSeries.zero(vars, order)
        return MultiSeries(vars, order, {exps: c}, _checked=True)

    # -- basic queries --------------------------------------------------

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), ZERO)

    def is_unit(self):
        return bool(self.constant_term())

    def min_degree(self):
        """Smallest total degree of a stored term; order+1 if zero."""
        if not self.terms:
            return self.order + 1
        return min(sum(e) for e in self.terms)

    def coeff(self, exps):
        """The Gaussian-rational coefficient of one monomial."""
        return self.terms.get(tuple(exps), ZERO)

    def _sorted(self):
        s = self._sorted_cache
        if s is None:
            s = sorted(((sum(e), e, c) for e, c in self.terms.items()),
                       key=lambda t: (t[0], t[1]))
            object.__setattr__(self, "_sorted_cache", s)
        return s

    # -- ring operations -------------------------------------------------

    def _compat(self, other):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            return self + MultiSeries.constant(other, self.vars, self.order)
        self._compat(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e)
            s = c if acc is None else acc + c
            if s:
                out[e] = s
            elif acc is not None:
                del out[e]
        return MultiSeries(self.vars, self.order, out, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries(self.vars, self.order,
                           {e: -c for e, c in self.terms.items()}, _checked=True)

    def __sub__(self, other):
        if not isinstance(other, MultiSeries):
            return self - MultiSeries.constant(other, self.vars, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _as_coeff(c)
        if not c:
            return MultiSeries.zero(self.vars, self.order)
        return MultiSeries(self.vars, self.order,
                           {e: c * v for e, v in self.terms.items()}, _checked=True)

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        self._compat(other)
        order = self.order
        a = self._sorted()
        b = other._sorted()
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for da, ea, ca in a:
            rem = order - da
            for db, eb, cb in b:
                if db > rem:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                acc = out.get(e)
                s = c if acc is None else acc + c
                if s:
                    out[e] = s
                elif acc is not None:
                    del out[e]
        return MultiSeries(self.vars, order, out, _checked=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("series powers take nonnegative integer exponents")
        out = MultiSeries.one(self.vars, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self.vars == other.vars and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, self.order, frozenset(self.terms.items())))

    # -- truncation and reshaping ------------------------------------------

    def truncate(self, order):
        """Restrict to total degree <= order (order may only decrease)."""
        if order > self.order:
            raise ValueError("truncate cannot raise the order; use assume_order")
        if order == self.order:
            return self
        out = {e: c for e, c in self.terms.items() if sum(e) <= order}
        return MultiSeries(self.vars, order, out, _checked=True)

    def assume_order(self, order):
        """Reinterpret at a higher order.

        Only valid when the caller knows the value exactly (e.g. a stored
        polynomial); the series data is unchanged.
        """
        if order < self.order:
            return self.truncate(order)
        return MultiSeries(self.vars, order, self.terms, _checked=True)

    def rename_vars(self, new_vars):
        new_vars = tuple(new_vars)
        if len(new_vars) != len(self.vars):
            raise ValueError("rename must keep the variable count")
        return MultiSeries(new_vars, self.order, self.terms, _checked=True)

    def embed(self, new_vars):
        """View in a larger variable tuple containing the current one."""
        new_vars = tuple(new_vars)
        pos = [new_vars.index(v) for v in self.vars]
        n = len(new_vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for p, x in zip(pos, e):
                ne[p] = x
            out[tuple(ne)] = c
        return MultiSeries(new_vars, self.order, out, _checked=True)

    def restrict(self, var):
        """Set one variable to zero and drop it from the variable tuple."""
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                out[e[:i] + e[i + 1:]] = c
        if not rest:
            raise ValueError("cannot drop the last variable; use constant_term")
        return MultiSeries(rest, self.order, out, _checked=True)

    # -- calculus -----------------------------------------------------------

    def diff(self, var):
        """Exact partial derivative. Order drops by one."""
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return MultiSeries(self.vars, max(self.order - 1, 0), out)

    def integrate(self, var):
        """Antiderivative with zero constant slice. Order rises by one."""
        i = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            ne = e[:i] + (e[i] + 1,) + e[i + 1:]
            out[ne] = c / GaussRat(e[i] + 1)
        return MultiSeries(self.vars, self.order + 1, out, _checked=True)

    # -- monomial shifts ------------------------------------------------------

    def mul_monomial(self, exps, c=1):
        """Multiply by c * prod(var^exp). Order rises by the monomial degree."""
        exps = tuple(exps)
        c = _as_coeff(c)
        d = sum(exps)
        out = {}
        if c:
            for e, v in self.terms.items():
                out[tuple(x + y for x, y in zip(e, exps))] = v * c
        return MultiSeries(self.vars, self.order + d, out, _checked=True)

    def div_monomial(self, exps):
        """Exact division by a monomial; raises if any term is not divisible."""
        exps = tuple(exps)
        d = sum(exps)
        out = {}
        for e, v in self.terms.items():
            ne = tuple(x - y for x, y in zip(e, exps))
            if any(x < 0 for x in ne):
                raise ValueError(f"term {e} not divisible by monomial {exps}")
            out[ne] = v
        return MultiSeries(self.vars, self.order - d, out, _checked=True)

    # -- coefficient views ----------------------------------------------------

    def coeff_view(self, group_vars):
        """Group by exponents of group_vars.

        Returns {exponent tuple over group_vars: MultiSeries in the remaining
        variables}. Each slice keeps the honest order budget
        (self.order minus the stripped degree).
        """
        group_vars = tuple(group_vars)
        gi = [self.vars.index(v) for v in group_vars]
        rest = tuple(v for v in self.vars if v not in group_vars)
        if not rest:
            raise ValueError("coeff_view must leave at least one variable")
        ri = [self.vars.index(v) for v in rest]
        buckets = {}
        for e, c in self.terms.items():
            ge = tuple(e[i] for i in gi)
            re_ = tuple(e[i] for i in ri)
            buckets.setdefault(ge, {})[re_] = c
        out = {}
        for ge, terms in buckets.items():
            out[ge] = MultiSeries(rest, self.order - sum(ge), terms)
        return out

    def coeff_slice(self, var, k):
        """The coefficient of var^k, as a series in the remaining variables."""
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        if not rest:
            raise ValueError("coeff_slice must leave at least one variable")
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[e[:i] + e[i + 1:]] = c
        return MultiSeries(rest, self.order - k, out)

    # -- conjugation ------------------------------------------------------------

    def conj(self):
        """Conjugate every coefficient (variables are left untouched)."""
        return MultiSeries(self.vars, self.order,
                           {e: c.conjugate() for e, c in self.terms.items()},
                           _checked=True)

    # -- composition -------------------------------------------------------------

    def substitute(self, images):
        """Substitute a series with zero constant term for every variable.

        images maps each variable name to a MultiSeries; all images must
        share one variable tuple and order, and each must have zero
        constant term (so the composition is well defined on truncations).
        """
        imgs = [images[v] for v in self.vars]
        tvars, torder = imgs[0].vars, imgs[0].order
        for s in imgs:
            if s.vars != tvars or s.order != torder:
                raise ValueError("all substitution images must share vars and order")
            if s.constant_term():
                raise ValueError("substitution images must have zero constant term")
        mindeg = [max(s.min_degree(), 1) for s in imgs]
        pows = [[MultiSeries.one(tvars, torder), s] for s in imgs]

        def power(i, e):
            p = pows[i]
            while len(p) <= e:
                p.append(p[-1] * p[1])
            return p[e]

        acc = {}
        for e, c in self.terms.items():
            if sum(x * d for x, d in zip(e, mindeg)) > torder:
                continue
            term = None
            for i, x in enumerate(e):
                if x:
                    term = power(i, x) if term is None else term * power(i, x)
            if term is None:
                term = MultiSeries.one(tvars, torder)
            for te, tc in term.terms.items():
                v = tc * c
                old = acc.get(te)
                s = v if old is None else old + v
                if s:
                    acc[te] = s
                elif old is not None:
                    del acc[te]
        return MultiSeries(tvars, torder, acc, _checked=True)

    # -- units, exponentials, logarithms ---------------------------------------

    def invert_unit(self):
        """Multiplicative inverse of a series with nonzero constant term."""
        c0 = self.constant_term()
        if not c0:
            raise ValueError("invert_unit requires a nonzero constant term")
        inv0 = c0.inverse()
        n = self.scale(inv0) - MultiSeries.one(self.vars, self.order)
        out = MultiSeries.one(self.vars, self.order)
        p = MultiSeries.one(self.vars, self.order)
        sign = -1
        for _ in range(self.order // max(n.min_degree(), 1) if not n.is_zero() else 0):
            p = p * n
            if p.is_zero():
                break
            out = out + p.scale(GaussRat(sign))
            sign = -sign
        return out.scale(inv0)

    def exp_nilpotent(self):
        """exp of a series with zero constant term (finite sum on truncations)."""
        if self.constant_term():
            raise ValueError("exp_nilpotent requires zero constant term")
        out = MultiSeries.one(self.vars, self.order)
        p = MultiSeries.one(self.vars, self.order)
        fact = 1
        steps = self.order // max(self.min_degree(), 1) if not self.is_zero() else 0
        for j in range(1, steps + 1):
            p = p * self
            if p.is_zero():
                break
            fact *= j
            out = out + p.scale(GaussRat(Q(1, fact)))
        return out

    def log_unit(self):
        """log of a series with constant term 1 (finite sum on truncations)."""
        if self.constant_term() != ONE:
            raise ValueError("log_unit requires constant term exactly 1")
        n = self - MultiSeries.one(self.vars, self.order)
        out = MultiSeries.zero(self.vars, self.order)
        p = MultiSeries.one(self.vars, self.order)
        sign = 1
        steps = self.order // max(n.min_degree(), 1) if not n.is_zero() else 0
        for j in range(1, steps + 1):
            p = p * n
            if p.is_zero():
                break
            out = out + p.scale(GaussRat(Q(sign, j)))
            sign = -sign
        return out

    # -- serialization -------------------------------------------------------------

    def term_records(self):
        """Sorted list of {"exponents": [...], "re": str, "im": str}."""
        recs = []
        for e in sorted(self.terms):
            c = self.terms[e]
            pair = c.to_pair()
            recs.append({"exponents": list(e), "re": pair[0], "im": pair[1]})
        return recs

    @staticmethod
    def from_term_records(records, vars, order):
        terms = {}
        for r in records:
            c = GaussRat.from_pair([r["re"], r["im"]])
            terms[tuple(r["exponents"])] = c
        return MultiSeries(vars, order, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for _, e, c in self._sorted():
            mono = "*".join(f"{v}^{x}" if x > 1 else v
                            for v, x in zip(self.vars, e) if x)
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiSeries({self.vars}, order={self.order}, {len(self.terms)} terms)"


def solve_implicit(equations, param_vars, unknown_vars, order):
    """Solve F(p, u) = 0 for u(p) with u(0) = 0, degree by degree.

    equations: list of MultiSeries in param_vars + unknown_vars (that exact
    variable order), one per unknown. The constant Jacobian dF/du at 0 must
    be invertible; the iteration u <- u - J0^{-1} F(p, u) then gains at
    least one degree per pass on truncations.

    Returns the list of unknown series in param_vars at the given order.
    """
    from .linalg import gauss_solve

    param_vars = tuple(param_vars)
    unknown_vars = tuple(unknown_vars)
    all_vars = param_vars + unknown_vars
    n = len(unknown_vars)
    if len(equations) != n:
        raise ValueError("need exactly one equation per unknown")
    for eq in equations:
        if eq.vars != all_vars:
            raise ValueError(f"equations must use variables {all_vars}")

    zero_exp = (0,) * len(all_vars)
    for eq in equations:
        if eq.terms.get(zero_exp):
            raise ValueError("equations must vanish at the origin")

    # constant Jacobian in the unknowns
    jac = []
    for eq in equations:
        row = []
        for j in range(n):
            e = [0] * len(all_vars)
            e[len(param_vars) + j] = 1
            row.append(eq.coeff(tuple(e)))
        jac.append(row)

    ident = gauss_solve(jac, None, inverse=True)
    if ident is None:
        raise ValueError("constant Jacobian in the unknowns is singular")
    jinv = ident

    params = [MultiSeries.variable(v, param_vars, order) for v in param_vars]
    unknowns = [MultiSeries.zero(param_vars, order) for _ in range(n)]
    eqs = [eq.truncate(order) if eq.order > order else eq.assume_order(order)
           for eq in equations]

    for _ in range(order + 1):
        images = {v: params[i] for i, v in enumerate(param_vars)}
        images.update({v: unknowns[j] for j, v in enumerate(unknown_vars)})
        vals = [eq.substitute(images) for eq in eqs]
        if all(v.is_zero() for v in vals):
            break
        newu = []
        for i in range(n):
            corr = MultiSeries.zero(param_vars, order)
            for j in range(n):
                if jinv[i][j]:
                    corr = corr + vals[j].scale(jinv[i][j])
            newu.append(unknowns[i] - corr)
        if newu == unknowns:
            break
        unknowns = newu
    return unknowns
