"""Admissible defining data for m-infinite-type hypersurface germs.

Three equivalent encodings and the conversions between them:

* RealHypersurface: the real defining function

      v = (1/2) u^m ( eps |z|^2 + sum_{k,l>=2} h_kl(u) z^k zbar^l ),

  stored through its coefficient family h_kl (series in u).
* ComplexDefining: the graph form w = Theta(z, zbar, wbar).
* ExponentialForm: the factored form

      w = wbar exp( i wbar^(m-1) phi(z, zbar, wbar) ),
      phi = eps z zbar + sum_{k,l>=2} phi_kl(wbar) z^k zbar^l.

On the hypersurface w = u + i v, so w = u + (i/2) u^m h; the prefactor
1/2 is fixed here once and used everywhere.

Truncation bookkeeping: a structure of order n knows h_kl (phi_kl) up
to u-degree n-k-l and the three-variable defining series up to total
degree n+m; every conversion preserves exactly that much.
"""

from __future__ import annotations

from .rationals import GaussRat, I, Q, rat_from_str
from .series import MultiSeries, solve_implicit

__all__ = ["RealHypersurface", "ExponentialForm", "ComplexDefining", "useries"]

_HALF = GaussRat(Q(1, 2))
_NEG_HALF_I = GaussRat(0, Q(-1, 2))


def useries(coeffs, order, var="u"):
    """Univariate series from a coefficient list indexed by degree."""
    coeffs = list(coeffs)
    if len(coeffs) > order + 1:
        raise ValueError(f"{len(coeffs)} coefficients exceed degree budget {order}")
    return MultiSeries((var,), order, {(j,): c for j, c in enumerate(coeffs)})


def _as_useries(val, budget, var="u"):
    """Coerce one coefficient-family entry to a series in var at the budget.

    Lists are exact polynomials; series must already be known at least
    to the budget (accepting shorter knowledge would fake precision).
    """
    if isinstance(val, MultiSeries):
        if len(val.vars) != 1:
            raise ValueError("coefficient entries must be univariate series")
        if val.order < budget:
            raise ValueError(
                f"entry known to degree {val.order}, budget needs {budget}")
        s = val.truncate(budget)
        return s if s.vars == (var,) else s.rename_vars((var,))
    if isinstance(val, (list, tuple)):
        return useries(val, budget, var)
    return MultiSeries.constant(val, (var,), budget)


def _family_json(family):
    """Coefficient family -> {"k,l": [[re, im], ...]} with canonical order."""
    out = {}
    for (k, l) in sorted(family):
        s = family[(k, l)]
        out[f"{k},{l}"] = [s.coeff((j,)).to_pair() for j in range(s.order + 1)]
    return out


def _family_from_json(obj):
    fam = {}
    for key, coeffs in obj.items():
        k, l = (int(x) for x in key.split(","))
        fam[(k, l)] = [GaussRat.from_pair(p) for p in coeffs]
    return fam


def _store_family(hkl, order):
    stored = {}
    for key, val in (hkl or {}).items():
        k, l = int(key[0]), int(key[1])
        if k < 0 or l < 0 or k + l > order:
            raise ValueError(f"cannot store index ({k},{l}) at order {order}")
        s = _as_useries(val, order - k - l)
        if not s.is_zero():
            stored[(k, l)] = s
    return stored


class RealHypersurface:
    """One admissible real defining function, held as its h_kl family.

    The constructor only rejects structurally unstorable data; validity
    (Hermitian reality, index bounds, eps = +-1) is reported by
    validate() so that bad inputs can be diagnosed rather than thrown.
    """

    __slots__ = ("m", "eps", "order", "hkl")

    def __init__(self, m, eps, order, hkl=None):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < 2:
            raise ValueError("order must be an integer >= 2")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "eps", int(eps))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "hkl", _store_family(hkl, order))

    def __setattr__(self, name, value):
        raise AttributeError("RealHypersurface is immutable")

    def __eq__(self, other):
        if not isinstance(other, RealHypersurface):
            return NotImplemented
        return (self.m, self.eps, self.order, self.hkl) == \
            (other.m, other.eps, other.order, other.hkl)

    def __repr__(self):
        keys = ",".join(f"({k},{l})" for k, l in sorted(self.hkl))
        return (f"RealHypersurface(m={self.m}, eps={self.eps}, "
                f"order={self.order}, h=[{keys}])")

    def _get(self, k, l):
        s = self.hkl.get((k, l))
        if s is None:
            return MultiSeries.zero(("u",), max(self.order - k - l, 0))
        return s

    # -- validity -------------------------------------------------------

    def validate(self):
        """List of violation messages; empty means admissible."""
        report = []
        if self.eps not in (1, -1):
            report.append(f"eps must be +1 or -1, got {self.eps}")
        for (k, l) in sorted(self.hkl):
            if k < 2 or l < 2:
                report.append(f"index violation: h[{k},{l}] needs k,l >= 2")
        done = set()
        for (k, l) in sorted(self.hkl):
            if (k, l) in done:
                continue
            done.add((k, l))
            done.add((l, k))
            s = self.hkl[(k, l)]
            if k == l:
                if s.conj() != s:
                    report.append(f"reality violation: h[{k},{k}] not real")
                continue
            t = self.hkl.get((l, k))
            t = t if t is not None else MultiSeries.zero(("u",), s.order)
            if t.conj() != s:
                report.append(
                    f"reality violation: h[{l},{k}] != conj(h[{k},{l}])")
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid hypersurface data: " + "; ".join(bad))
        return self

    def check_structure(self):
        """Reject structural violations only (eps, index bounds).

        The conversions are formal coefficient transforms and stay exact
        inverses on non-Hermitian families, so they only need this weaker
        gate; Hermitian reality is enforced by check() where a genuinely
        real hypersurface is required.
        """
        bad = [v for v in self.validate() if "reality" not in v]
        if bad:
            raise ValueError("invalid hypersurface data: " + "; ".join(bad))
        return self

    # -- materialized forms ----------------------------------------------

    def defining_series(self):
        """v as a series in (z, zb, u), known to total degree order+m."""
        m = self.m
        terms = {(1, 1, m): GaussRat(Q(self.eps, 2))}
        for (k, l), s in self.hkl.items():
            for (j,), c in s.terms.items():
                terms[(k, l, j + m)] = c * _HALF
        return MultiSeries(("z", "zb", "u"), self.order + m, terms,
                           _checked=True)

    def _theta(self):
        """Solve (Theta - wb)/2i = v(z, zb, (Theta + wb)/2) for Theta."""
        n, m = self.order, self.m
        big = n + m
        pv = ("z", "zb", "wb")
        av = pv + ("t",)
        f = self.defining_series()
        zv = MultiSeries.variable("z", av, big)
        zbv = MultiSeries.variable("zb", av, big)
        wbv = MultiSeries.variable("wb", av, big)
        tv = MultiSeries.variable("t", av, big)
        fsub = f.substitute({"z": zv, "zb": zbv, "u": wbv + tv.scale(_HALF)})
        eq = tv.scale(_NEG_HALF_I) - fsub
        sol = solve_implicit([eq], pv, ("t",), big)[0]
        return sol + MultiSeries.variable("wb", pv, big)

    def to_complex_defining(self):
        self.check_structure()
        return ComplexDefining(self._theta(), self.m, self.order)

    def to_exponential(self):
        """The phi_kl family with w = wb exp(i wb^(m-1) phi) on M."""
        self.check_structure()
        n, m = self.order, self.m
        theta = self._theta()
        ratio = theta.div_monomial((0, 0, 1))      # unit, constant term 1
        phi_full = ratio.log_unit().div_monomial((0, 0, m - 1)).scale(-I)
        view = phi_full.coeff_view(("z", "zb"))
        lead = view.pop((1, 1), None)
        if lead is None or lead != MultiSeries.constant(self.eps, ("wb",),
                                                        lead.order):
            raise ValueError("exponential form: leading z*zb slice is not eps")
        phikl = {}
        for (k, l), s in sorted(view.items()):
            if k < 2 or l < 2:
                raise ValueError(
                    f"exponential form: unexpected z^{k} zb^{l} slice")
            phikl[(k, l)] = s.rename_vars(("w",))
        return ExponentialForm(m, self.eps, n, phikl)

    # -- membership tests ---------------------------------------------------

    def is_normal_form(self):
        """(True, None) or (False, first violated condition)."""
        self.check()
        for name, (k, l) in (("h22", (2, 2)), ("h23", (2, 3)),
                             ("h32", (3, 2))):
            if any(e != (0,) for e in self._get(k, l).terms):
                return False, f"{name} is not constant"
        for (j,), c in self._get(3, 3).terms.items():
            if j not in (0, self.m - 1):
                return False, "h33 has a term beyond r + s*u^(m-1)"
            if c.im:
                return False, "h33 coefficients must be real"
        return True, None

    def _fuchsian_bound(self, k, l):
        m = self.m
        k, l = min(k, l), max(k, l)
        if (k, l) == (2, 2):
            return m - 1
        if (k, l) in ((2, 3), (3, 3)):
            return 2 * m - 2
        if k == 2 and 4 <= l <= 2 * m + 1:
            return 2 * m - l + 2
        if k >= 3 and 7 <= k + l <= 2 * m + 4:
            return 2 * m - k - l + 5
        return 0

    def is_fuchsian(self):
        """(bool, list of violated vanishing-order bounds)."""
        self.check()
        if self.m == 1:
            return True, []
        viol = []
        for (k, l), s in sorted(self.hkl.items()):
            bound = self._fuchsian_bound(k, l)
            if s.min_degree() < bound:
                viol.append(
                    f"ord h[{k},{l}] = {s.min_degree()} < {bound}")
        return not viol, viol

    def is_fuchsian_normal_form(self):
        ok, _ = self.is_fuchsian()
        if not ok:
            return False
        m = self.m
        shape = (((2, 2), m - 1), ((2, 3), 2 * m - 2),
                 ((3, 2), 2 * m - 2), ((3, 3), 2 * m - 2))
        for (k, l), d in shape:
            if any(e != (d,) for e in self._get(k, l).terms):
                return False
        return True

    # -- group action -----------------------------------------------------------

    def apply_dilation(self, lam, mu):
        """Push forward under (z, w) -> (lam z, mu w).

        Requires mu^(1-m) = +|lam|^2 or -|lam|^2 exactly; the sign
        multiplies eps on the image.  For odd m the left side is a
        positive rational, so eps never flips; for even m a negative mu
        realizes the sign -1 and flips eps.
        """
        self.check()
        lam = lam if isinstance(lam, GaussRat) else GaussRat(lam)
        mu = _real_rat(mu)
        if not lam or not mu:
            raise ValueError("dilation parameters must be nonzero")
        m = self.m
        base = mu ** (1 - m)
        norm = lam * lam.conjugate()
        if base == norm:
            sign = 1
        elif base == -norm:
            sign = -1
        else:
            raise ValueError(
                "dilation constraint mu^(1-m) = +-|lam|^2 violated")
        mu_inv = mu.inverse()
        lam_inv = lam.inverse()
        lamc_inv = lam.conjugate().inverse()
        new = {}
        for (k, l), s in self.hkl.items():
            fac = base * lam_inv ** k * lamc_inv ** l
            terms = {(j,): c * fac * mu_inv ** j
                     for (j,), c in s.terms.items()}
            new[(k, l)] = MultiSeries(("u",), s.order, terms, _checked=True)
        return RealHypersurface(m, sign * self.eps, self.order, new)

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self):
        return {"m": self.m, "eps": self.eps, "order": self.order,
                "h": _family_json(self.hkl)}

    @staticmethod
    def from_json_dict(d):
        return RealHypersurface(int(d["m"]), int(d["eps"]), int(d["order"]),
                                _family_from_json(d.get("h", {})))


def _real_rat(x):
    if isinstance(x, GaussRat):
        if x.im:
            raise ValueError("expected a real rational")
        return x
    if isinstance(x, str):
        return GaussRat(rat_from_str(x))
    return GaussRat(x)


class ExponentialForm:
    """The phi_kl family of w = wb exp(i wb^(m-1) phi); leading term eps z zb."""

    __slots__ = ("m", "eps", "order", "phikl")

    def __init__(self, m, eps, order, phikl=None):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < 2:
            raise ValueError("order must be an integer >= 2")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "eps", int(eps))
        object.__setattr__(self, "order", order)
        fam = {}
        for key, val in (phikl or {}).items():
            k, l = int(key[0]), int(key[1])
            if k < 0 or l < 0 or k + l > order:
                raise ValueError(f"cannot store index ({k},{l}) at order {order}")
            s = _as_useries(val, order - k - l, var="w")
            if not s.is_zero():
                fam[(k, l)] = s
        object.__setattr__(self, "phikl", fam)

    def __setattr__(self, name, value):
        raise AttributeError("ExponentialForm is immutable")

    def __eq__(self, other):
        if not isinstance(other, ExponentialForm):
            return NotImplemented
        return (self.m, self.eps, self.order, self.phikl) == \
            (other.m, other.eps, other.order, other.phikl)

    def __repr__(self):
        keys = ",".join(f"({k},{l})" for k, l in sorted(self.phikl))
        return (f"ExponentialForm(m={self.m}, eps={self.eps}, "
                f"order={self.order}, phi=[{keys}])")

    def _get(self, k, l):
        s = self.phikl.get((k, l))
        if s is None:
            return MultiSeries.zero(("w",), max(self.order - k - l, 0))
        return s

    def validate(self):
        report = []
        if self.eps not in (1, -1):
            report.append(f"eps must be +1 or -1, got {self.eps}")
        for (k, l) in sorted(self.phikl):
            if k < 2 or l < 2:
                report.append(f"index violation: phi[{k},{l}] needs k,l >= 2")
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid exponential form: " + "; ".join(bad))
        return self

    def full_series(self, vars=("z", "zb", "wb")):
        """phi as one series eps*z*zb + sum phi_kl(w) z^k zb^l.

        vars names the (z, zb, w) slots, in that order.
        """
        terms = {(1, 1, 0): GaussRat(self.eps)}
        for (k, l), s in self.phikl.items():
            for (j,), c in s.terms.items():
                terms[(k, l, j)] = c
        return MultiSeries(vars, self.order, terms, _checked=True)

    def theta_series(self, vars=("z", "zb", "wb")):
        """Theta = wb exp(i wb^(m-1) phi), known to degree order+m."""
        m = self.m
        expo = self.full_series(vars).mul_monomial((0, 0, m - 1)).scale(I)
        return expo.exp_nilpotent().mul_monomial((0, 0, 1))

    def to_hypersurface(self):
        """Invert the exponential identity back to the h_kl family.

        The result is only Hermitian when phi came from a real
        hypersurface; validity is the caller's question to ask.
        """
        self.check()
        n, m = self.order, self.m
        big = n + m
        pv = ("z", "zb", "u")
        av = pv + ("s",)
        theta = self.theta_series()
        zv = MultiSeries.variable("z", av, big)
        zbv = MultiSeries.variable("zb", av, big)
        uv = MultiSeries.variable("u", av, big)
        sv = MultiSeries.variable("s", av, big)
        tsub = theta.substitute({"z": zv, "zb": zbv, "wb": uv - sv.scale(I)})
        eq = uv + sv.scale(I) - tsub
        v = solve_implicit([eq], pv, ("s",), big)[0]
        h_full = v.div_monomial((0, 0, m)).scale(2)
        view = h_full.coeff_view(("z", "zb"))
        lead = view.pop((1, 1), None)
        if lead is None or lead != MultiSeries.constant(self.eps, ("u",),
                                                        lead.order):
            raise ValueError("defining family: leading z*zb slice is not eps")
        hkl = {}
        for (k, l), s in sorted(view.items()):
            if k < 2 or l < 2:
                raise ValueError(
                    f"defining family: unexpected z^{k} zb^{l} slice")
            hkl[(k, l)] = s
        return RealHypersurface(m, self.eps, n, hkl)

    def to_json_dict(self):
        return {"m": self.m, "eps": self.eps, "order": self.order,
                "phi": _family_json(self.phikl)}

    @staticmethod
    def from_json_dict(d):
        return ExponentialForm(int(d["m"]), int(d["eps"]), int(d["order"]),
                               _family_from_json(d.get("phi", {})))


class ComplexDefining:
    """The graph form w = Theta(z, zb, wb), known to degree order+m.

    Normal coordinates mean Theta(z,0,wb) = Theta(0,zb,wb) = wb, and a
    real underlying hypersurface is equivalent to the involution
    identity Theta(z, zb, conj Theta(zb, z, w)) = w.
    """

    __slots__ = ("Theta", "m", "order")

    def __init__(self, Theta, m, order):
        if Theta.vars != ("z", "zb", "wb"):
            raise ValueError('Theta must be a series in ("z", "zb", "wb")')
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if Theta.order < order + m:
            raise ValueError(
                f"Theta known to degree {Theta.order}, need {order + m}")
        object.__setattr__(self, "Theta", Theta.truncate(order + m))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexDefining is immutable")

    def __eq__(self, other):
        if not isinstance(other, ComplexDefining):
            return NotImplemented
        return (self.m, self.order, self.Theta) == \
            (other.m, other.order, other.Theta)

    def __repr__(self):
        return (f"ComplexDefining(m={self.m}, order={self.order}, "
                f"{len(self.Theta.terms)} terms)")

    def normality_residuals(self):
        """(Theta(z,0,wb)-wb, Theta(0,zb,wb)-wb, reality residual)."""
        t = self.Theta
        big = t.order
        r1 = t.restrict("zb") - MultiSeries.variable("wb", ("z", "wb"), big)
        r2 = t.restrict("z") - MultiSeries.variable("wb", ("zb", "wb"), big)
        swapped = MultiSeries(
            t.vars, big,
            {(b, a, c): v for (a, b, c), v in t.terms.items()},
            _checked=True).conj()
        images = {"z": MultiSeries.variable("z", t.vars, big),
                  "zb": MultiSeries.variable("zb", t.vars, big),
                  "wb": swapped}
        r3 = t.substitute(images) - MultiSeries.variable("wb", t.vars, big)
        return r1, r2, r3
