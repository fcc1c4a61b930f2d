"""Pointwise evaluation of Fubini-Study metrics at rational and monomial points.

Only these two point classes are supported: both evaluate exactly in
value-group arithmetic.  A monomial point is the multiplicative seminorm
sending a polynomial to the max of its term norms at prescribed log-radii;
a rational point evaluates sections exactly in Q.
"""

import re
from dataclasses import dataclass

from .ratio import Rat, rat, rat_str
from .section_algebra import (
    DiagonalMetric,
    GradedSection,
    monomial_basis,
    unpack_exponents,
)
from .valued_arith import GammaValue, Prime, valuation


class VanishingFrameError(ValueError):
    pass


class RationalPoint:
    """Projective point with rational coordinates.

    Normalized so the first coordinate of maximal absolute value is 1;
    section values at the normalized coordinates then represent the
    evaluation metric directly.
    """

    __slots__ = ("prime", "coords")

    def __init__(self, prime: Prime, coords):
        coords = [rat(c) for c in coords]
        if all(c == 0 for c in coords):
            raise ValueError("projective point needs a nonzero coordinate")
        vals = [valuation(c, prime) for c in coords]
        i0 = vals.index(min(vals))
        self.prime = prime
        self.coords = tuple(c / coords[i0] for c in coords)

    @property
    def nvars(self) -> int:
        return len(self.coords)

    @property
    def pivot_index(self) -> int:
        return next(i for i, c in enumerate(self.coords) if c == 1)

    def section_value(self, s: GradedSection):
        """Valuation of s at the normalized coordinates; None if s vanishes."""
        v = s.evaluate(self.coords)
        if v == 0:
            return None
        return valuation(v, self.prime)

    def __repr__(self):
        return f"RationalPoint([{':'.join(rat_str(c) for c in self.coords)}])"


class MonomialPoint:
    """Gauss point given by one log-radius per coordinate.

    rho entries are GammaValues; None marks a zero coordinate (radius 0).
    At least one entry must be finite.  |T^J| at the point is
    sum_i j_i * rho_i in value scale, and section values take the max of
    term norms, which is multiplicative.
    """

    __slots__ = ("prime", "rho")

    def __init__(self, prime: Prime, rho):
        rho = tuple(None if r is None else r for r in rho)
        if all(r is None for r in rho):
            raise ValueError("monomial point needs a finite radius")
        self.prime = prime
        self.rho = rho

    @property
    def nvars(self) -> int:
        return len(self.rho)

    @property
    def arity(self) -> int:
        return next(r.arity for r in self.rho if r is not None)

    def monomial_value(self, J):
        total = None
        for j, r in zip(J, self.rho):
            if j == 0:
                continue
            if r is None:
                return None
            w = r.scale(j)
            total = w if total is None else total + w
        return GammaValue.zero(self.arity) if total is None else total

    def section_value(self, s: GradedSection):
        """Value of |s| at the point; None iff every term dies on a zero radius."""
        best = None
        p = self.prime
        for J, c in s.items_lex():
            g = self.monomial_value(J)
            if g is None:
                continue
            g = g.shift(valuation(c, p))
            if best is None or g < best:
                best = g
        return best

    def __repr__(self):
        entries = ", ".join("inf" if r is None else repr(r) for r in self.rho)
        return f"MonomialPoint(({entries}))"


Point = (RationalPoint, MonomialPoint)


@dataclass(frozen=True)
class Frame:
    """A monomial multi-index serving as local frame; must not vanish at the point."""

    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _unify(g: GammaValue, arity: int) -> GammaValue:
    if g.arity == arity:
        return g
    if g.arity == 0:
        return GammaValue(g.primary, (Rat(0),) * arity)
    raise ValueError("incompatible perturbation arity")


def _point_monomial_value(x, J):
    """Valuation-scale |T^J|(x): rational -> Rat/int, monomial -> GammaValue."""
    if isinstance(x, RationalPoint):
        s = GradedSection.monomial(x.nvars, J)
        return x.section_value(s)
    return x.monomial_value(J)


def _point_section_value(x, s: GradedSection):
    return x.section_value(s)


def eval_metric(basis, weights, x, e: Frame):
    """Fiber value |e(x)| of the Fubini-Study metric of an orthogonal basis.

    basis is an orthogonal family spanning the degree-n sections, with
    weights their values; the result is the smallest of
    |e(x)/s_j(x)| * ||s_j|| over the basis, i.e. in value scale the largest
    of v(e(x)) - v(s_j(x)) + w_j, terms with s_j(x) = 0 dropped.
    """
    arity = weights[0].arity
    v_e = _point_monomial_value(x, e.exponents)
    if v_e is None:
        raise VanishingFrameError("frame vanishes at the point")
    if isinstance(v_e, GammaValue):
        v_e = _unify(v_e, arity)
    best = None
    for s_j, w_j in zip(basis, weights):
        v_j = _point_section_value(x, s_j)
        if v_j is None:
            continue
        if isinstance(v_e, GammaValue):
            g = _unify(w_j, arity) + v_e - _unify(v_j, arity)
        else:
            g = _unify(w_j, arity).shift(v_e - v_j)
        if best is None or g > best:
            best = g
    if best is None:
        raise ValueError("every basis section vanishes at the point")
    return best


def eval_dual_metric(basis, weights, x, e_dual: Frame):
    """Fiber value of the dual metric on the frame dual to T^(e_dual).

    In value scale the smallest of v(s_j(x)) - v(e(x)) - w_j; pairs with
    eval_metric to exactly zero at every point.
    """
    arity = weights[0].arity
    v_e = _point_monomial_value(x, e_dual.exponents)
    if v_e is None:
        raise VanishingFrameError("frame vanishes at the point")
    if isinstance(v_e, GammaValue):
        v_e = _unify(v_e, arity)
    best = None
    for s_j, w_j in zip(basis, weights):
        v_j = _point_section_value(x, s_j)
        if v_j is None:
            continue
        if isinstance(v_e, GammaValue):
            g = _unify(v_j, arity) - v_e - _unify(w_j, arity)
        else:
            g = (-_unify(w_j, arity)).shift(v_j - v_e)
        if best is None or g < best:
            best = g
    if best is None:
        raise ValueError("every basis section vanishes at the point")
    return best


def fs_value(metric: DiagonalMetric, n: int, x, e: Frame):
    """|e(x)| under FS of the degree-n Gauss norm of the metric."""
    keys = monomial_basis(metric.nvars, n)
    basis = [
        GradedSection(metric.nvars, n, {k: Rat(1)}) for k in keys
    ]
    weights = [metric.weight_of_key(k) for k in keys]
    return eval_metric(basis, weights, x, e)


@dataclass
class DistanceResult:
    sampled: object  # GammaValue lower bound from the sample, or None
    exact: object  # exact distance for same-basis diagonal metrics, or None

    def bound(self):
        return self.exact if self.exact is not None else self.sampled


def metric_distance(phi1: DiagonalMetric, phi2: DiagonalMetric, sample=()):
    """Distance between two metrics.

    The sampled field is max |log ratio| over the given (point, frame)
    pairs, a lower bound for the true supremum.  When both metrics are
    diagonal in the same coordinates the exact distance max_i |w_i - w'_i|
    is also returned (attained at coordinate points).
    """
    exact = None
    if phi1.prime == phi2.prime and phi1.nvars == phi2.nvars:
        arity = max(phi1.arity, phi2.arity)
        diffs = [
            abs(_unify(a, arity) - _unify(b, arity))
            for a, b in zip(phi1.radii, phi2.radii)
        ]
        exact = max(diffs, key=lambda g: g._key())
    sampled = None
    for x, e in sample:
        v1 = fs_value(phi1, e.degree, x, e)
        v2 = fs_value(phi2, e.degree, x, e)
        arity = max(v1.arity, v2.arity)
        d = abs(_unify(v1, arity) - _unify(v2, arity))
        if sampled is None or d > sampled:
            sampled = d
    return DistanceResult(sampled=sampled, exact=exact)


def fs_idempotence_check(metric: DiagonalMetric, n: int, sample) -> bool:
    """Whether FS of the degree-n Gauss norm equals n times the metric
    at every sampled (point, frame); frames are degree-n monomials."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for x, e in sample:
        lhs = fs_value(metric, n, x, e)
        rhs = None
        for i, j in enumerate(e.exponents):
            if j == 0:
                continue
            part = fs_value(metric, 1, x, Frame(tuple(int(a == i) for a in range(metric.nvars))))
            part = part.scale(j)
            rhs = part if rhs is None else rhs + part
        arity = max(lhs.arity, rhs.arity)
        if _unify(lhs, arity) != _unify(rhs, arity):
            return False
    return True


def disc_membership(metric: DiagonalMetric, n: int, x: MonomialPoint, eps) -> bool:
    """Whether the dual-space point lies in the closed dual disc bundle of
    radius e^eps: every degree-n monomial satisfies |s(z)| <= e^(n eps) ||s||.

    x prescribes |T_i(z)| as radii; eps is rational, in units of log p.
    """
    eps = rat(eps)
    arity = max(metric.arity, x.arity)
    for key in monomial_basis(metric.nvars, n):
        J = unpack_exponents(key, metric.nvars)
        val_at_z = x.monomial_value(J)
        if val_at_z is None:
            continue
        bound = _unify(metric.weight_of_key(key), arity).shift(-eps * n)
        if _unify(val_at_z, arity) < bound:
            return False
    return True


# --- point literals -----------------------------------------------------------

_RP_RE = re.compile(r"^\[(?P<body>[^\]]*)\]$")
_MP_RE = re.compile(r"^rho=\((?P<body>[^)]*)\)$")


def parse_point(text: str, prime: Prime):
    """Parse '[a0:a1:...:ad]' or 'rho=(q0,...,qd)'.

    Monomial-point entries are 'num/den', 'inf' for a zero coordinate, or
    'num/den|p1|p2|...' to carry perturbation coordinates.
    """
    text = text.strip()
    m = _RP_RE.match(text)
    if m:
        coords = [rat(part.strip()) for part in m.group("body").split(":")]
        return RationalPoint(prime, coords)
    m = _MP_RE.match(text)
    if m:
        rho = []
        for part in m.group("body").split(","):
            part = part.strip()
            if part == "inf":
                rho.append(None)
            elif "|" in part:
                head, *tail = part.split("|")
                rho.append(GammaValue(rat(head), tuple(rat(x) for x in tail)))
            else:
                rho.append(GammaValue(rat(part)))
        return MonomialPoint(prime, rho)
    raise ValueError(f"unrecognized point literal {text!r}")


def point_to_str(x) -> str:
    if isinstance(x, RationalPoint):
        return "[" + ":".join(rat_str(c) for c in x.coords) + "]"
    parts = []
    for r in x.rho:
        if r is None:
            parts.append("inf")
        elif r.pert:
            parts.append("|".join([rat_str(r.primary)] + [rat_str(q) for q in r.pert]))
        else:
            parts.append(rat_str(r.primary))
    return "rho=(" + ",".join(parts) + ")"
