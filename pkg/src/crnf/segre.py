"""Families of plane curves attached to infinite-type hypersurfaces.

A family of order n holds, for one integer m >= 1 and one sign in
{+1, -1}, the curve family

    w = eta exp( i eta^(m-1) phi(z, xi, eta) ),
    phi = sign z xi + sum_{k,l>=2} phi_kl(eta) z^k xi^l,

where (xi, eta) label the curves: geometrically they are conjugated
parameters, treated here as independent formal variables.  phi_kl is
known to eta-degree n-k-l and the graph function to total degree n+m,
matching the hypersurface bookkeeping.

Stored coefficients are the raw exponent data: the sign sits on the
leading z*xi term only.  An alternative bookkeeping normalizes the sign
out of the whole exponent, listing sign*phi_kl instead; both views
coincide on sign = +1 families, and the tests bridge them explicitly
where closed forms are stated in the normalized view.

Beyond the family itself the module provides the dual family (the same
incidence relation read with space and parameter slots exchanged, then
re-solved for the graph), the conjugated family (the graph function
with conjugated coefficients), the reality criterion dual == conjugate,
and the recovery of the parameter-side half of a product map from its
space-side half.
"""

from __future__ import annotations

from .hypersurface import ExponentialForm, _as_useries, _family_from_json, _family_json
from .rationals import GaussRat, I
from .series import MultiSeries, solve_implicit

__all__ = [
    "SegreFamily",
    "ProductMap",
    "segre_of_hypersurface",
    "recover_parameter_map",
    "recover_parameter_series",
]

_NEG_I = GaussRat(0, -1)


class SegreFamily:
    """One admissible curve family, held through its phi_kl data."""

    __slots__ = ("m", "sign", "order", "phikl")

    def __init__(self, m, sign, order, phikl=None):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < 2:
            raise ValueError("order must be an integer >= 2")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sign", int(sign))
        object.__setattr__(self, "order", order)
        fam = {}
        for key, val in (phikl or {}).items():
            k, l = int(key[0]), int(key[1])
            if k < 0 or l < 0 or k + l > order:
                raise ValueError(f"cannot store index ({k},{l}) at order {order}")
            s = _as_useries(val, order - k - l, var="eta")
            if not s.is_zero():
                fam[(k, l)] = s
        object.__setattr__(self, "phikl", fam)

    def __setattr__(self, name, value):
        raise AttributeError("SegreFamily is immutable")

    def __eq__(self, other):
        if not isinstance(other, SegreFamily):
            return NotImplemented
        return (self.m, self.sign, self.order, self.phikl) == \
            (other.m, other.sign, other.order, other.phikl)

    def __repr__(self):
        keys = ",".join(f"({k},{l})" for k, l in sorted(self.phikl))
        return (f"SegreFamily(m={self.m}, sign={self.sign}, "
                f"order={self.order}, phi=[{keys}])")

    def _get(self, k, l):
        s = self.phikl.get((k, l))
        if s is None:
            return MultiSeries.zero(("eta",), max(self.order - k - l, 0))
        return s

    def validate(self):
        report = []
        if self.sign not in (1, -1):
            report.append(f"sign must be +1 or -1, got {self.sign}")
        for (k, l) in sorted(self.phikl):
            if k < 2 or l < 2:
                report.append(f"index violation: phi[{k},{l}] needs k,l >= 2")
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid curve family: " + "; ".join(bad))
        return self

    def full_series(self, vars=("z", "xi", "eta")):
        """phi as one series sign*z*xi + sum phi_kl z^k xi^l.

        vars names the (z, xi, eta) slots, in that order; passing a
        permuted tuple evaluates phi with relabeled slots.
        """
        terms = {(1, 1, 0): GaussRat(self.sign)}
        for (k, l), s in self.phikl.items():
            for (j,), c in s.terms.items():
                terms[(k, l, j)] = c
        return MultiSeries(vars, self.order, terms, _checked=True)

    def graph_series(self, vars=("z", "xi", "eta")):
        """The graph function eta exp(i eta^(m-1) phi), known to order+m."""
        expo = self.full_series(vars).mul_monomial((0, 0, self.m - 1)).scale(I)
        return expo.exp_nilpotent().mul_monomial((0, 0, 1))

    # -- the three family constructions ------------------------------------

    def dual(self):
        """The family read with space and parameter slots exchanged.

        The incidence relation eta = graph(xi, z, w) cuts, for each
        parameter pair, a curve in the original space; solving it for w
        yields an admissible family again, with the sign flipped.  Tail
        budgets come out the same as the input's.
        """
        self.check()
        n, m = self.order, self.m
        big = n + m
        pv = ("z", "xi", "eta")
        av = pv + ("s",)
        # graph with the two space slots exchanged, as a function of
        # (xi, z, w); the third slot is the unknown of the elimination
        swapped = self.graph_series(("xi", "z", "w"))
        zv = MultiSeries.variable("z", av, big)
        xiv = MultiSeries.variable("xi", av, big)
        etav = MultiSeries.variable("eta", av, big)
        sv = MultiSeries.variable("s", av, big)
        eq = swapped.substitute({"xi": xiv, "z": zv, "w": etav + sv}) - etav
        branch = solve_implicit([eq], pv, ("s",), big)[0] \
            + MultiSeries.variable("eta", pv, big)
        # peel the exponent back off: branch = eta exp(i eta^(m-1) psi)
        unit = branch.div_monomial((0, 0, 1))
        psi = unit.log_unit().scale(_NEG_I).div_monomial((0, 0, m - 1))
        view = psi.coeff_view(("z", "xi"))
        lead = view.pop((1, 1), None)
        want = MultiSeries.constant(GaussRat(-self.sign), ("eta",), n - 2)
        if lead != want:
            raise RuntimeError("dual elimination lost the leading term")
        fam = {}
        for (k, l), s in view.items():
            if k < 2 or l < 2:
                raise RuntimeError(
                    f"dual elimination produced a low index ({k},{l})")
            fam[(k, l)] = s
        return SegreFamily(m, -self.sign, n, fam)

    def conjugate(self):
        """The family whose graph function has conjugated coefficients.

        Conjugating w = eta exp(i eta^(m-1) phi) conjugates the i in the
        exponent as well, so in the stored data the sign flips and every
        phi_kl becomes -conj(phi_kl).
        """
        self.check()
        fam = {kl: s.conj().scale(-1) for kl, s in self.phikl.items()}
        return SegreFamily(self.m, -self.sign, self.order, fam)

    def reality_check(self):
        """Whether the family can come from a real structure.

        The criterion is dual == conjugate, coefficientwise up to order.
        Returns (True, None), or (False, message) naming the first
        mismatch in index order.
        """
        d = self.dual()
        c = self.conjugate()
        for (k, l) in sorted(set(d.phikl) | set(c.phikl)):
            if d._get(k, l) != c._get(k, l):
                return False, (
                    f"dual and conjugated families differ at ({k},{l})")
        return True, None

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {"m": self.m, "sign": self.sign, "order": self.order,
                "phi": _family_json(self.phikl)}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["m"]), int(obj["sign"]), int(obj["order"]),
                   _family_from_json(obj["phi"]))


def segre_of_hypersurface(phi):
    """Read an exponential form as a curve family over (xi, eta).

    Pure relabeling: the conjugated space variable becomes the curve
    label xi, the conjugated transverse variable becomes eta, and the
    family sign is the defining-function sign.
    """
    if not isinstance(phi, ExponentialForm):
        raise TypeError("expected an ExponentialForm")
    phi.check()
    return SegreFamily(phi.m, phi.eps, phi.order, phi.phikl)


class ProductMap:
    """Space and parameter halves of one family-to-family map.

    Both halves are normalized unipotent maps; the parameter half acts
    on the curve labels (xi, eta).
    """

    __slots__ = ("space", "parameter")

    def __init__(self, space, parameter):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "parameter", parameter)

    def __setattr__(self, name, value):
        raise AttributeError("ProductMap is immutable")

    def __eq__(self, other):
        if not isinstance(other, ProductMap):
            return NotImplemented
        return (self.space, self.parameter) == (other.space, other.parameter)

    def __repr__(self):
        return f"ProductMap(space={self.space!r}, parameter={self.parameter!r})"

    @property
    def m(self):
        return self.space.m


def recover_parameter_series(source, target, image_z, image_w):
    """Parameter half of a product map, from the space-half images.

    image_z and image_w are the images of z and w under the space map,
    as series in ("z", "w") sharing one order, fixing the origin, with
    invertible linear part, image_w(0, w) = w * unit and d/dz image_w
    (0, w) = O(w^m).  Returns the conjugated parameter pair (lam_bar,
    omega_bar) as series in ("xi", "eta"), solved from the z^0 and z^1
    slices of the incidence identity, then verifies the full identity
    before returning; a nonzero residual raises, since then no
    parameter half exists.

    The pair is honest to xi,eta-degree min(order-1, map_order-m-1),
    one less than the family order when the space map is supplied with
    enough slack (map order >= family order + m).
    """
    if source.m != target.m or source.order != target.order:
        raise ValueError("source and target families must share m and order")
    if source.sign != target.sign:
        raise ValueError("source and target families must share the sign")
    source.check()
    target.check()
    if image_z.vars != ("z", "w") or image_w.vars != ("z", "w"):
        raise ValueError('space-map images must be series in ("z", "w")')
    if image_z.order != image_w.order:
        raise ValueError("space-map images must share one order")
    if image_z.constant_term() or image_w.constant_term():
        raise ValueError("the space map must fix the origin")
    n, m, eps = source.order, source.m, source.sign
    nh = image_z.order
    t_ord = min(n - 1, nh - 1 - m)
    if t_ord < 1:
        raise ValueError(
            f"space map of order {nh} is too short for family order {n}")
    ieps = GaussRat(0, eps)

    # boundary data of the space map along z = 0
    f0 = _zslice(image_z, 0)                      # z-image at z = 0
    fz0 = _zslice(image_z.diff("z"), 0)
    fw0 = f0.diff("w")
    wslice = _zslice(image_w, 0)                  # w-image at z = 0
    g0w = wslice.div_monomial((1,))
    gw0 = wslice.diff("w")
    gz0 = _zslice(image_w.diff("z"), 0)
    lam0 = fz0.coeff((0,))
    mu0 = g0w.coeff((0,))
    if not lam0 or not mu0:
        raise ValueError("the space map must have an invertible linear part")
    try:
        gz0m = gz0.div_monomial((m,))             # O(w^m) by the map shape
    except ValueError:
        raise ValueError(
            "d/dz of the w-image must vanish to order m along z = 0")

    # target-family data: the exponent unit, and the slope of the graph
    # in the first slot normalized to a unit
    rho2_unit = target.full_series().mul_monomial((0, 0, m - 1)) \
        .scale(I).exp_nilpotent()                 # known to degree n+m-1
    slope = source.full_series().diff("z").div_monomial((0, 1, 0)).scale(eps)
    sigma = slope * rho2_unit.truncate(slope.order)
    # every use below carries a factor of the label unknown, so the
    # padded top slice cannot reach degrees <= t_ord
    sigma = sigma.assume_order(slope.order + 1)

    # unknowns: L is the conjugated first label image; the second label
    # image is eta * mu0 * (1 + t)
    av = ("xi", "eta", "L", "t")
    xiv = MultiSeries.variable("xi", av, t_ord)
    etav = MultiSeries.variable("eta", av, t_ord)
    lv = MultiSeries.variable("L", av, t_ord)
    tv = MultiSeries.variable("t", av, t_ord)
    onep = MultiSeries.one(av, t_ord) + tv

    def emb(s1):
        return s1.truncate(t_ord).rename_vars(("eta",)).embed(av)

    images = {"z": emb(f0), "xi": lv,
              "eta": (etav + etav * tv).scale(mu0)}
    eq1 = rho2_unit.substitute(images) * onep.scale(mu0) - emb(g0w)

    onepm = MultiSeries.one(av, t_ord)
    for _ in range(m):
        onepm = onepm * onep
    cross = MultiSeries(av, t_ord, {(1, m, 0, 0): ieps}) if 1 + m <= t_ord \
        else MultiSeries.zero(av, t_ord)
    denom = emb(fz0) + cross * emb(fw0)
    lhs2 = emb(gz0m) + xiv.scale(ieps) * emb(gw0)
    eq2 = sigma.substitute(images) * lv.scale(ieps * mu0 ** m) * onepm * denom \
        - lhs2

    lam_bar, tser = solve_implicit([eq1, eq2], ("xi", "eta"), ("L", "t"), t_ord)
    omega_bar = (tser.mul_monomial((0, 1))
                 + MultiSeries.variable("eta", ("xi", "eta"), t_ord + 1)) \
        .scale(mu0)

    _verify_product(source, target, image_z, image_w, lam_bar, omega_bar)
    return lam_bar, omega_bar


def _zslice(s, k):
    """Coefficient of z^k as a series in the remaining variable."""
    view = s.coeff_view(("z",))
    got = view.get((k,))
    if got is not None:
        return got
    return MultiSeries.zero(s.vars[1:], max(s.order - k, 0))


def _verify_product(source, target, image_z, image_w, lam_bar, omega_bar):
    """Check the incidence identity of the full product map up to order."""
    n, m = source.order, source.m
    r_ord = min(n, lam_bar.order + 1)
    pv = ("z", "xi", "eta")
    zv = MultiSeries.variable("z", pv, r_ord)
    rho1 = source.graph_series().truncate(r_ord)
    sub_zw = {"z": zv, "w": rho1}
    lhs = image_w.truncate(r_ord).substitute(sub_zw)
    # the top slice of lam_bar enters the target graph multiplied by
    # at least eta^(m-1) * z * eta, so padding it is invisible here
    images = {"z": image_z.truncate(r_ord).substitute(sub_zw),
              "xi": lam_bar.assume_order(r_ord).embed(pv),
              "eta": omega_bar.truncate(r_ord).embed(pv)}
    rhs = target.graph_series().truncate(r_ord).substitute(images)
    res = lhs - rhs
    if not res.is_zero():
        raise ValueError(
            "the space map does not send the source family into the "
            f"target family (residual from degree {res.min_degree()})")


def recover_parameter_map(source, target, space_map):
    """Complete a normalized space map to a product map between families.

    space_map sends every curve of the source family to a curve of the
    target family; the recovered parameter half says which curve goes
    where, conjugated back to the unbarred labels and packaged as a
    normalized map in (xi, eta).  Raises if the space map does not
    actually map family to family.
    """
    from .ode import NormalizedMap  # deferred: that module builds on this one

    space_map.check()
    if space_map.m != source.m:
        raise ValueError("space map and families must share m")
    image_z, image_w = space_map.series_pair()
    lam_bar, omega_bar = recover_parameter_series(
        source, target, image_z, image_w)
    parameter = NormalizedMap.from_series_pair(
        source.m, lam_bar.conj(), omega_bar.conj())
    return ProductMap(space_map, parameter)
