"""Singular second-order ODEs w'' = w^m Phi(z, w, w'/w^m) attached to curve
families, and their transformation theory.

A curve family w = eta*exp(i*eta^(m-1)*phi) determines a unique ODE of this
shape that every member solves; conversely the ODE determines the family
from its linear seed. Both directions are implemented exactly: elimination
via the implicit function theorem one way, a z-degree fixed point the
other. The transformation rule for maps (z, w) -> (z + f, w + w*g0 + w^m*g)
is an identity in the free variables (z, w, zeta) and is evaluated by
series division, never by PDE solving; the Cauchy extension then restores
the O(zeta^2) shape degree by degree, one Cramer step each.

Truncation bookkeeping: an ODE of order N knows Phi through total degree N
in (z, w, zeta). Producing it from a family costs the two z-derivatives
(order N+2 in), and transforming it under a map of order n yields order
min(N, n-m-2); the lost degrees sit in the second jets and the w^m
division, not in the implementation.
"""

from .rationals import GaussRat, I, Q
from .series import MultiSeries, solve_implicit
from .hypersurface import RealHypersurface, _as_useries
from .segre import SegreFamily

_NEG_I = GaussRat(0, -1)


def _two_var(val, vars, budget, what):
    if isinstance(val, MultiSeries):
        if val.vars != tuple(vars):
            raise ValueError(f"{what} must be a series in {vars}")
        if val.order < budget:
            raise ValueError(
                f"{what} known to degree {val.order}, budget needs {budget}")
        return val.truncate(budget)
    if not val:
        return MultiSeries.zero(tuple(vars), budget)
    raise ValueError(f"{what} must be a MultiSeries or 0")


class SingularODE:
    """w'' = w^m Phi(z, w, zeta) with zeta standing for w'/w^m.

    Phi is a series in (z, w, zeta) at total order `order`. Members of the
    class proper satisfy Phi = O(zeta^2); transform_ode may return objects
    violating that (with the zeta^0, zeta^1 parts exposed for the Cauchy
    solver), which validate() reports.
    """

    __slots__ = ("m", "order", "phi")

    def __init__(self, m, order, phi):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < 2:
            raise ValueError("order must be an integer >= 2")
        if not isinstance(phi, MultiSeries) or len(phi.vars) != 3:
            raise ValueError("phi must be a series in (z, w, zeta)")
        if phi.vars != ("z", "w", "zeta"):
            phi = phi.rename_vars(("z", "w", "zeta"))
        if phi.order < order:
            raise ValueError(
                f"phi known to degree {phi.order}, order claims {order}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "phi", phi.truncate(order))

    def __setattr__(self, name, value):
        raise AttributeError("SingularODE is immutable")

    def __eq__(self, other):
        if not isinstance(other, SingularODE):
            return NotImplemented
        return (self.m, self.order, self.phi) == \
            (other.m, other.order, other.phi)

    def __repr__(self):
        return f"SingularODE(m={self.m}, order={self.order}, phi={self.phi})"

    def validate(self):
        report = []
        low = sorted(e for e in self.phi.terms if e[2] < 2)
        if low:
            report.append(
                f"phi must be O(zeta^2); offending exponents {low[:3]}")
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid singular ODE: " + "; ".join(bad))
        return self

    # -- coefficient views --------------------------------------------------

    def phi_k(self, k):
        """Coefficient of zeta^k, as a series in (z, w)."""
        return self.phi.coeff_slice("zeta", k)

    def coeff_A(self, j):
        """w-series at z^j zeta^2."""
        return self.phi_k(2).coeff_slice("z", j)

    def coeff_B(self, j):
        """w-series at z^j zeta^3."""
        return self.phi_k(3).coeff_slice("z", j)

    def coeff_C(self, j):
        """w-series at z^j zeta^4."""
        return self.phi_k(4).coeff_slice("z", j)

    # -- serialization --------------------------------------------------------

    def to_json(self):
        return {"m": self.m, "order": self.order,
                "phi": self.phi.term_records()}

    @classmethod
    def from_json(cls, data):
        phi = MultiSeries.from_term_records(
            data["phi"], ("z", "w", "zeta"), int(data["order"]))
        return cls(int(data["m"]), int(data["order"]), phi)


def low_order_invariants(E):
    """The four lowest Phi coefficients (z^0 and z^1 of zeta^2, zeta^3).

    These are unchanged by every normalized map, so they separate
    equivalence classes before any normalization work is done.
    """
    p = E.phi
    return (p.coeff((0, 0, 2)), p.coeff((1, 0, 2)),
            p.coeff((0, 0, 3)), p.coeff((1, 0, 3)))


class NormalizedMap:
    """Map (z, w) -> (z + f, w + w*g0(w) + w^m*g) with the slice
    normalizations f(0,0) = 0, f_z(0,0) = 0, g0(0) = 0, g = O(zw), and g0
    real through degree m-1 (void for m = 1).

    The variable pair is read from the component series, so the same class
    carries parameter-side maps in (xi, eta). Budgets: f to total degree
    `order`, g0 to order-1, g to order-m, making both images honest to
    `order`.
    """

    __slots__ = ("m", "order", "f", "g0", "g")

    def __init__(self, m, order, f, g0, g, vars=("z", "w")):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < m + 1:
            raise ValueError(f"order must be an integer >= m+1 = {m + 1}")
        vars = tuple(vars)
        if isinstance(f, MultiSeries):
            vars = f.vars
        elif isinstance(g, MultiSeries):
            vars = g.vars
        if len(vars) != 2:
            raise ValueError("component variables must be a pair")
        f = _two_var(f, vars, order, "f")
        g = _two_var(g, vars, order - m, "g")
        g0 = _as_useries(g0, order - 1, var=vars[1])
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g0", g0)
        object.__setattr__(self, "g", g)

    def __setattr__(self, name, value):
        raise AttributeError("NormalizedMap is immutable")

    def __eq__(self, other):
        if not isinstance(other, NormalizedMap):
            return NotImplemented
        return (self.m, self.order, self.f, self.g0, self.g) == \
            (other.m, other.order, other.f, other.g0, other.g)

    def __repr__(self):
        return (f"NormalizedMap(m={self.m}, order={self.order}, f={self.f}, "
                f"g0={self.g0}, g={self.g})")

    @property
    def vars(self):
        return self.f.vars

    def validate(self):
        report = []
        if self.f.coeff((0, 0)):
            report.append("f must vanish at the origin")
        if self.f.coeff((1, 0)):
            report.append("f must have no linear term in the first variable")
        if self.g0.coeff((0,)):
            report.append("g0 must vanish at the origin")
        bad = sorted(e for e in self.g.terms if e[0] == 0 or e[1] == 0)
        if bad:
            report.append(f"g must be O(zw); offending exponents {bad[:3]}")
        for j in range(1, min(self.m, self.g0.order + 1)):
            if self.g0.coeff((j,)).im:
                report.append(
                    f"g0 must have real coefficients through degree m-1;"
                    f" degree {j} is not real")
                break
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid normalized map: " + "; ".join(bad))
        return self

    # -- images ---------------------------------------------------------------

    def series_pair(self):
        """(image of the first variable, image of the second), both honest
        to `order`."""
        zn, wn = self.vars
        zv = MultiSeries.variable(zn, self.vars, self.order)
        wv = MultiSeries.variable(wn, self.vars, self.order)
        wg0 = self.g0.embed(self.vars).mul_monomial((0, 1))
        wmg = self.g.mul_monomial((0, self.m))
        return zv + self.f, wv + wg0 + wmg

    @classmethod
    def from_series_pair(cls, m, image_z, image_w, order=None):
        """Recover the normalized components from the two images.

        The images must share a two-variable tuple and one order; the pure
        second-variable part of image_w must be divisible by it and the
        rest by its m-th power, or the map is not of the normalized shape.
        """
        if not isinstance(image_z, MultiSeries) or \
                not isinstance(image_w, MultiSeries):
            raise ValueError("images must be MultiSeries")
        vars = image_z.vars
        if len(vars) != 2 or image_w.vars != vars:
            raise ValueError("images must share one two-variable tuple")
        if order is None:
            order = min(image_z.order, image_w.order)
        zn, wn = vars
        f = image_z.truncate(order) - MultiSeries.variable(zn, vars, order)
        resid = image_w.truncate(order) - MultiSeries.variable(wn, vars,
                                                               order)
        pure = resid.coeff_slice(zn, 0)
        try:
            g0 = pure.div_monomial((1,))
        except ValueError:
            raise ValueError(
                "the pure part of the second image minus the variable must"
                " be O(w)")
        mixed = resid - pure.embed(vars)
        try:
            g = mixed.div_monomial((0, m))
        except ValueError:
            raise ValueError(
                "the z-dependent part of the second image must be O(w^m)")
        return cls(m, order, f, g0, g, vars=vars)

    @classmethod
    def identity(cls, m, order, vars=("z", "w")):
        vars = tuple(vars)
        return cls(m, order, MultiSeries.zero(vars, order), 0,
                   MultiSeries.zero(vars, order - m), vars=vars)

    def boundary_data(self):
        """Cauchy data of the map: the z^0 and z^1 slices of (f, g) with
        the pure-w component."""
        zn, wn = self.vars
        f0 = self.f.coeff_slice(zn, 0).rename_vars(("w",))
        f1 = self.f.coeff_slice(zn, 1).rename_vars(("w",))
        g1 = self.g.coeff_slice(zn, 1).rename_vars(("w",))
        g0 = self.g0.rename_vars(("w",))
        return CauchyData(self.m, self.order, f0, f1, g0, g1)

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        return {"m": self.m, "order": self.order, "vars": list(self.vars),
                "f": self.f.term_records(),
                "g0": self.g0.term_records(),
                "g": self.g.term_records()}

    @classmethod
    def from_json(cls, data):
        m, order = int(data["m"]), int(data["order"])
        vars = tuple(data["vars"])
        f = MultiSeries.from_term_records(data["f"], vars, order)
        g = MultiSeries.from_term_records(data["g"], vars, order - m)
        g0 = MultiSeries.from_term_records(data["g0"], (vars[1],), order - 1)
        return cls(m, order, f, g0, g, vars=vars)


def compose_maps(inner, outer):
    """The normalized map doing `inner` first, then `outer`."""
    if inner.m != outer.m:
        raise ValueError("maps must share m")
    if inner.vars != outer.vars:
        raise ValueError("maps must share their variable pair")
    order = min(inner.order, outer.order)
    zi, wi = inner.series_pair()
    zo, wo = outer.series_pair()
    zn, wn = inner.vars
    images = {zn: zi.truncate(order), wn: wi.truncate(order)}
    return NormalizedMap.from_series_pair(
        inner.m, zo.truncate(order).substitute(images),
        wo.truncate(order).substitute(images), order=order)


class CauchyData:
    """Boundary values (f0, f1, g0, g1) seeding a normalized map: the
    first image restricted to z = 0 and its z-derivative there, the pure-w
    part of the second image, and the z-derivative slice of its O(w^m)
    part. All four vanish at the origin. Budgets follow the map they seed:
    f0 to `order`, f1 and g0 to order-1, g1 to order-m-1.
    """

    __slots__ = ("m", "order", "f0", "f1", "g0", "g1")

    def __init__(self, m, order, f0, f1, g0, g1):
        if not isinstance(m, int) or m < 1:
            raise ValueError("m must be a positive integer")
        if not isinstance(order, int) or order < m + 1:
            raise ValueError(f"order must be an integer >= m+1 = {m + 1}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "f0", _as_useries(f0, order, var="w"))
        object.__setattr__(self, "f1", _as_useries(f1, order - 1, var="w"))
        object.__setattr__(self, "g0", _as_useries(g0, order - 1, var="w"))
        object.__setattr__(self, "g1",
                           _as_useries(g1, order - m - 1, var="w"))

    def __setattr__(self, name, value):
        raise AttributeError("CauchyData is immutable")

    def __eq__(self, other):
        if not isinstance(other, CauchyData):
            return NotImplemented
        return (self.m, self.order, self.f0, self.f1, self.g0, self.g1) == \
            (other.m, other.order, other.f0, other.f1, other.g0, other.g1)

    def __repr__(self):
        return (f"CauchyData(m={self.m}, order={self.order}, f0={self.f0}, "
                f"f1={self.f1}, g0={self.g0}, g1={self.g1})")

    def validate(self):
        report = []
        for name in ("f0", "f1", "g0", "g1"):
            if getattr(self, name).coeff((0,)):
                report.append(f"{name} must vanish at the origin")
        return report

    def check(self):
        bad = self.validate()
        if bad:
            raise ValueError("invalid cauchy data: " + "; ".join(bad))
        return self


# -- family -> ODE by elimination ---------------------------------------------


def _unit_power(u, p, order):
    """u^p truncated, with p >= 0."""
    out = MultiSeries.one(u.vars, order)
    base = u.truncate(order)
    for _ in range(p):
        out = out * base
    return out


def ode_of_segre(S):
    """The singular ODE every member of the family solves.

    Differentiate the graph w = eta*exp(i*eta^(m-1)*phi) twice, invert
    (xi, eta) -> (w, w'/w^m) at fixed z, and substitute into w''/w^m.
    Costs the two z-derivatives: the result carries order S.order - 2. The
    zeta^0 and zeta^1 parts of the result vanish identically; a leftover
    means the inversion lost the family structure and raises.
    """
    if not isinstance(S, SegreFamily):
        raise TypeError("expected a SegreFamily")
    S.check()
    n, m = S.order, S.m
    N = n - 2
    if N < 2:
        raise ValueError(f"family order {n} leaves no ODE content")
    fv = ("z", "xi", "eta")
    phi = S.full_series(fv)
    unit_inv = phi.mul_monomial((0, 0, m - 1)).scale(_NEG_I).exp_nilpotent()
    phi_z = phi.diff("z")
    phi_zz = phi_z.diff("z")

    # w''/w^m along the family, in family coordinates
    usq = phi_z * phi_z
    pre = (phi_zz.scale(I)
           - usq.mul_monomial((0, 0, m - 1)).truncate(N)) \
        * _unit_power(unit_inv, m - 1, N)

    # invert the parameter-to-jet correspondence at fixed z, staged so
    # every ring stays within four variables: first eta from the graph
    # value, then xi from the slope value
    v1 = ("z", "w", "xi", "eta")
    graph = S.graph_series(fv)
    eq1 = graph.truncate(N).embed(v1) - MultiSeries.variable("w", v1, N)
    eta_of = solve_implicit([eq1], ("z", "w", "xi"), ("eta",), N)[0]
    slope = (phi_z.truncate(N) * _unit_power(unit_inv, m - 1, N)).scale(I)
    v2 = ("z", "w", "xi")
    slope = slope.substitute({"z": MultiSeries.variable("z", v2, N),
                              "xi": MultiSeries.variable("xi", v2, N),
                              "eta": eta_of})
    v3 = ("z", "w", "zeta", "xi")
    eq2 = slope.embed(v3) - MultiSeries.variable("zeta", v3, N)
    back_xi = solve_implicit([eq2], ("z", "w", "zeta"), ("xi",), N)[0]
    pv = ("z", "w", "zeta")
    back_eta = eta_of.substitute({"z": MultiSeries.variable("z", pv, N),
                                  "w": MultiSeries.variable("w", pv, N),
                                  "xi": back_xi})
    out = pre.substitute({"z": MultiSeries.variable("z", pv, N),
                          "xi": back_xi, "eta": back_eta})
    stray = sorted(e for e in out.terms if e[2] < 2)
    if stray:
        raise RuntimeError(
            f"family elimination left low jet-degree terms at {stray[:3]}")
    return SingularODE(m, N, out)


# -- ODE -> family by a fixed point ---------------------------------------------


def _family_rhs(E, phi, N):
    """Second z-derivative every member of the E-family must have, given
    the current phi, honest to order N."""
    m = E.m
    fv = phi.vars
    unit = phi.mul_monomial((0, 0, m - 1)).scale(I).exp_nilpotent()
    unit_inv = phi.mul_monomial((0, 0, m - 1)).scale(_NEG_I).exp_nilpotent()
    phi_z = phi.diff("z")
    w_img = unit.truncate(N).mul_monomial((0, 0, 1)).truncate(N)
    slope = (phi_z.truncate(N) * _unit_power(unit_inv, m - 1, N)).scale(I)
    comp = E.phi.truncate(N).substitute(
        {"z": MultiSeries.variable("z", fv, N), "w": w_img, "zeta": slope})
    usq = phi_z * phi_z
    return (_unit_power(unit, m - 1, N) * comp).scale(_NEG_I) \
        - usq.mul_monomial((0, 0, m - 1)).truncate(N).scale(I)


def segre_of_ode(E, sign):
    """The family of the given sign whose members solve E.

    Solves for phi by a z-degree fixed point seeded with sign*z*xi; gains
    back the two derivative degrees, so the family carries order
    E.order + 2. The transversality identities (phi vanishes with xi, and
    its xi-linear slice is exactly sign*z) hold automatically and are
    asserted.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    E.check()
    N, m = E.order, E.m
    nf = N + 2
    fv = ("z", "xi", "eta")
    seed = MultiSeries.monomial(GaussRat(sign), (1, 1, 0), fv, nf)
    phi = seed
    for _ in range(nf + 2):
        rhs = _family_rhs(E, phi, N)
        new = seed + rhs.integrate("z").integrate("z")
        if new == phi:
            break
        phi = new
    else:
        raise RuntimeError("family reconstruction did not stabilize")

    view = phi.coeff_view(("z", "xi"))
    lead = view.pop((1, 1), None)
    if lead is None or \
            lead != MultiSeries.constant(sign, ("eta",), lead.order):
        raise RuntimeError("family reconstruction lost its linear seed")
    fam = {}
    for (k, l), s in view.items():
        if s.is_zero():
            continue
        if k < 2 or l < 2:
            raise RuntimeError(
                f"family reconstruction produced a stray ({k},{l}) slice")
        fam[(k, l)] = s
    return SegreFamily(m, sign, nf, fam)


def family_ode_residual(S, E):
    """Residual of the family equation for the pair (S, E); zero iff every
    member of S solves E at the shared truncation."""
    if S.m != E.m:
        raise ValueError("family and ODE must share m")
    N = min(E.order, S.order - 2)
    phi = S.full_series(("z", "xi", "eta"))
    return phi.diff("z").diff("z").truncate(N) - _family_rhs(E, phi, N)


# -- the transformation rule ------------------------------------------------------


def _map_jets(H):
    """Second-order jet data of the full images, in (z, w) names."""
    ftil, gtil = H.series_pair()
    gcomp_z = H.g.diff(H.vars[0])
    if H.vars != ("z", "w"):
        ftil = ftil.rename_vars(("z", "w"))
        gtil = gtil.rename_vars(("z", "w"))
        gcomp_z = gcomp_z.rename_vars(("z", "w"))
    j = {"ftil": ftil, "gtil": gtil, "gcz": gcomp_z,
         "fz": ftil.diff("z"), "fw": ftil.diff("w"),
         "gz": gtil.diff("z"), "gw": gtil.diff("w")}
    j["fzz"], j["fzw"], j["fww"] = \
        j["fz"].diff("z"), j["fz"].diff("w"), j["fw"].diff("w")
    j["gzz"], j["gzw"], j["gww"] = \
        j["gz"].diff("z"), j["gz"].diff("w"), j["gw"].diff("w")
    return j


def _jet_bracket(a, b, c, d):
    """a*b - c*d with the order alignment the jets need."""
    r = min(a.order, b.order, c.order, d.order)
    return a.truncate(r) * b.truncate(r) - c.truncate(r) * d.truncate(r)


def _transform_pieces(Estar, H, W):
    """Numerator and Jacobian of the transformation identity at order W.

    Returns (num, J) with num a series in (z, w, zeta) and J a unit series
    in (z, w); the transformed coefficient function is num / J.
    """
    m = Estar.m
    j = _map_jets(H)
    J = _jet_bracket(j["fz"], j["gw"], j["fw"], j["gz"])
    if not J.is_unit():
        raise ValueError("the map is degenerate: vanishing jacobian")

    # every z-derivative of the second image is divisible by w^m
    i0 = _jet_bracket(j["gz"], j["fzz"], j["fz"], j["gzz"]) \
        .div_monomial((0, m))
    i1 = _jet_bracket(j["gw"], j["fzz"], j["fw"], j["gzz"]) \
        + _jet_bracket(j["gz"], j["fzw"], j["fz"], j["gzw"]).scale(2)
    i2 = _jet_bracket(j["gz"], j["fww"], j["fz"], j["gww"]) \
        + _jet_bracket(j["gw"], j["fzw"], j["fw"], j["gzw"]).scale(2)
    i3 = _jet_bracket(j["gw"], j["fww"], j["fw"], j["gww"])

    pv = ("z", "w", "zeta")

    def emb(s):
        return s.truncate(W).embed(pv)

    iblock = emb(i0) \
        + emb(i1).mul_monomial((0, 0, 1)).truncate(W) \
        + emb(i2).mul_monomial((0, m, 2)).truncate(W) \
        + emb(i3).mul_monomial((0, 2 * m, 3)).truncate(W)

    fzeta = emb(j["fz"]) + emb(j["fw"]).mul_monomial((0, m, 1)).truncate(W)
    gum = _unit_power(emb(j["gtil"].div_monomial((0, 1))), m, W)
    pref = fzeta * fzeta * fzeta * gum

    bracket = emb(j["gcz"]) + emb(j["gw"]).mul_monomial((0, 0, 1)) \
        .truncate(W)
    zimg = bracket * (gum * fzeta).invert_unit()
    comp = Estar.phi.truncate(W).substitute(
        {"z": emb(j["ftil"]), "w": emb(j["gtil"]), "zeta": zimg})
    return pref * comp + iblock, J


def transform_ode(Estar, H):
    """Pull the ODE back along the normalized map: Estar lives in the
    image coordinates, the result in the source ones.

    Evaluates the jet-prolongation identity at order
    min(Estar.order, H.order - m - 2); the result is the unique
    coefficient function solved by the H-preimages of the solutions of
    Estar. Its zeta^0 and zeta^1 parts generally do not vanish (and the
    returned object then fails check()): killing them is the Cauchy
    solver's job. Estar itself may be such a raw object: the rule is an
    action on arbitrary coefficient functions and composes under
    compose_maps.
    """
    if not isinstance(Estar, SingularODE):
        raise TypeError("expected a SingularODE")
    H.check()
    if Estar.m != H.m:
        raise ValueError("ODE and map must share m")
    W = min(Estar.order, H.order - Estar.m - 2)
    if W < 2:
        raise ValueError(
            f"map order {H.order} leaves no content at ODE order"
            f" {Estar.order}")
    num, J = _transform_pieces(Estar, H, W)
    out = num * J.truncate(W).embed(("z", "w", "zeta")).invert_unit()
    return SingularODE(Estar.m, W, out)


# -- the Cauchy extension ---------------------------------------------------------


def cauchy_extend(Estar, Y):
    """The normalized map with boundary data Y whose pullback of Estar is
    again O(zeta^2), together with that pullback.

    Solved degree by degree in z: at each degree the two low jet-degree
    slices of the transformed numerator are affine in the top unknown
    slices of (f, g), with a 2x2 series matrix of unit determinant (one
    Cramer step each). The zeta^1 slice is honest to one w-order less
    than the zeta^0 slice, so after each Cramer step the g-slice is
    refined one order higher through the zeta^0 equation alone; that
    works because the f-slice enters it against g1, which vanishes at
    w = 0. The f-slices beyond the solvable budget are completed by
    zero. The map carries Estar.order; the returned ODE carries
    Estar.order - m - 2 and is asserted to have vanishing zeta^0,
    zeta^1 parts.
    """
    Estar.check()
    Y.check()
    if Estar.m != Y.m:
        raise ValueError("ODE and data must share m")
    N, m = Estar.order, Estar.m
    if Y.order < N:
        raise ValueError(
            f"cauchy data of order {Y.order} cannot seed a map of order"
            f" {N}")
    W = N - m - 2
    if W < 2:
        raise ValueError(f"ODE order {N} leaves no room for the extension")
    vars = ("z", "w")
    f = Y.f0.truncate(N).embed(vars) \
        + Y.f1.truncate(N - 1).embed(vars).mul_monomial((1, 0))
    g = Y.g1.truncate(N - m - 1).embed(vars).mul_monomial((1, 0))
    g0 = Y.g0.truncate(N - 1)

    # the Cramer matrix of every degree step, as w-series
    a11 = Y.g1.truncate(N - m - 1)
    a12 = (MultiSeries.one(("w",), N - 1) + Y.f1.truncate(N - 1)).scale(-1)
    a21 = MultiSeries.one(("w",), N - 2) + g0.truncate(N - 2) \
        + g0.diff("w").mul_monomial((1,)).truncate(N - 2)
    a22 = Y.f0.diff("w").mul_monomial((m,)).truncate(N - 1).scale(-1)

    for jdeg in range(2, N - m + 1):
        d = jdeg - 2
        b0 = W - d
        if b0 < 0:
            break
        b1 = b0 - 1
        H = NormalizedMap(m, N, f, g0, g, vars=vars)
        num, _ = _transform_pieces(Estar, H, W)
        s0 = num.coeff_slice("zeta", 0).coeff_slice("z", d).truncate(b0)
        scale = Q(-1, jdeg * (jdeg - 1))
        if b1 >= 0:
            s1 = num.coeff_slice("zeta", 1).coeff_slice("z", d).truncate(b1)
            if s0.is_zero() and s1.is_zero():
                continue
            det = a11.truncate(b1) * a22.truncate(b1) \
                - a12.truncate(b1) * a21.truncate(b1)
            ff = ((a22.truncate(b1) * s0.truncate(b1)
                   - a12.truncate(b1) * s1)
                  * det.invert_unit()).scale(scale)
        else:
            if s0.is_zero():
                continue
            ff = MultiSeries.zero(("w",), 0)
        # g1 = w * (a11/w), so the f-slice cannot reach w-order b0 here
        cross = (a11.div_monomial((1,)).truncate(max(b1, 0))
                 * ff.truncate(max(b1, 0))).mul_monomial((1,)).truncate(b0)
        gg = (s0.scale(scale) - cross) * a12.truncate(b0).invert_unit()
        if b1 >= 0:
            f = f + ff.embed(vars).mul_monomial((jdeg, 0)).assume_order(N)
        g = g + gg.embed(vars).mul_monomial((jdeg, 0)).assume_order(N - m)

    H = NormalizedMap(m, N, f, g0, g, vars=vars)
    out = transform_ode(Estar, H)
    if not (out.phi_k(0).is_zero() and out.phi_k(1).is_zero()):
        raise RuntimeError("cauchy extension left low jet-degree terms")
    return H, out


# -- closed-form transfer from a hypersurface ---------------------------------------


def transfer_from_h(h):
    """Low-index ODE coefficient slices straight from the defining data.

    Returns {"A0", "A1", "B0", "B1"}: the z^0 and z^1 slices of the zeta^2
    and zeta^3 coefficient functions of the associated ODE, as w-series,
    bypassing the exponential form and the elimination:

        A0 = m w^(m-1) - 2i h22
        A1 = -6i h32
        B0 = -2 eps h23
        B1 = -6 eps h33 + 8 h22^2 - i h22' w^m + m(m+1)/4 w^(2m-2)

    The defining-function sign eps rides along exactly on the h23 and
    h33 terms (the slices of odd conjugated degree); everything else is
    sign-free.
    """
    if not isinstance(h, RealHypersurface):
        raise TypeError("expected a RealHypersurface")
    h.check()
    m, n = h.m, h.order
    if n < 6:
        raise ValueError(f"order {n} leaves no slice content")

    def grab(k, l, budget):
        s = h.hkl.get((k, l))
        if s is None:
            return MultiSeries.zero(("w",), budget)
        return s.rename_vars(("w",)).truncate(budget)

    def wpow(p, c, budget):
        return MultiSeries.monomial(c, (p,), ("w",), budget)

    bA0, bA1, bB1 = n - 4, n - 5, n - 6
    h22 = grab(2, 2, bA0)
    a0 = wpow(m - 1, Q(m), bA0) + h22.scale(GaussRat(0, -2))
    a1 = grab(3, 2, bA1).scale(GaussRat(0, -6))
    b0 = grab(2, 3, bA1).scale(Q(-2 * h.eps))
    h22b = h22.truncate(bB1)
    b1 = (grab(3, 3, bB1).scale(Q(-6 * h.eps))
          + (h22b * h22b).scale(8)
          + h22.diff("w").mul_monomial((m,)).truncate(bB1).scale(_NEG_I)
          + wpow(2 * m - 2, Q(m * (m + 1), 4), bB1))
    return {"A0": a0, "A1": a1, "B0": b0, "B1": b1}


def low_slice_forms(S):
    """The eight closed forms predicting the low coefficient slices of
    ode_of_segre(S) from the family data alone.

    Returns {"A0", "A1", "A2", "B0", "B1", "B2", "C0", "C1"} as w-series
    at the budgets the associated ODE carries them. With sigma the
    family sign and phi_kl the stored slices:

        A0 = w^(m-1) - 2i phi22          B0 = -2 sigma phi23
        A1 = -6i phi32                   C0 =  2i phi24
        A2 = -12i phi42
        B1 = -6 sigma phi33 + 8 phi22^2
             - 2i(m-1) w^(m-1) phi22 + 2i w^m phi22'
        B2 = -12 sigma phi43 + 36 phi22 phi32
             - 6i(m-1) w^(m-1) phi32 + 6i w^m phi32'
        C1 =  6i phi34 - 20i sigma phi22 phi23
             - 4 sigma (m-1) w^(m-1) phi23 + 2 sigma w^m phi23'

    Terms whose slice has odd conjugated degree carry sigma; the rest
    are sign-free.
    """
    if not isinstance(S, SegreFamily):
        raise TypeError("expected a SegreFamily")
    S.check()
    if S.order < 7:
        raise ValueError(f"order {S.order} leaves no slice content")
    m, sg = S.m, S.sign
    N = S.order - 2

    def slot(k, l, budget):
        s = S.phikl.get((k, l))
        if s is None:
            return MultiSeries.zero(("w",), budget)
        return s.rename_vars(("w",)).truncate(budget)

    def dslot(k, l, budget):
        s = S.phikl.get((k, l))
        if s is None:
            return MultiSeries.zero(("w",), budget)
        return s.rename_vars(("w",)).diff("w").mul_monomial((m,)) \
            .truncate(budget)

    def hook(k, l, budget):
        return slot(k, l, budget).mul_monomial((m - 1,)).truncate(budget) \
            .scale(m - 1)

    out = {}
    b = N - 2
    out["A0"] = MultiSeries.monomial(1, (m - 1,), ("w",), b) \
        + slot(2, 2, b).scale(GaussRat(0, -2))
    out["A1"] = slot(3, 2, N - 3).scale(GaussRat(0, -6))
    out["A2"] = slot(4, 2, N - 4).scale(GaussRat(0, -12))
    out["B0"] = slot(2, 3, N - 3).scale(Q(-2 * sg))
    out["C0"] = slot(2, 4, N - 4).scale(GaussRat(0, 2))
    b = N - 4
    out["B1"] = (slot(3, 3, b).scale(Q(-6 * sg))
                 + (slot(2, 2, b) * slot(2, 2, b)).scale(8)
                 + hook(2, 2, b).scale(GaussRat(0, -2))
                 + dslot(2, 2, b).scale(GaussRat(0, 2)))
    b = N - 5
    out["B2"] = (slot(4, 3, b).scale(Q(-12 * sg))
                 + (slot(2, 2, b) * slot(3, 2, b)).scale(36)
                 + hook(3, 2, b).scale(GaussRat(0, -6))
                 + dslot(3, 2, b).scale(GaussRat(0, 6)))
    out["C1"] = (slot(3, 4, b).scale(GaussRat(0, 6))
                 + (slot(2, 2, b) * slot(2, 3, b)).scale(GaussRat(0, -20 * sg))
                 + hook(2, 3, b).scale(Q(-4 * sg))
                 + dslot(2, 3, b).scale(Q(2 * sg)))
    return out
