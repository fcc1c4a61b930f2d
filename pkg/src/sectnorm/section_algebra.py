"""Graded algebra of homogeneous polynomial sections with Gauss norms.

Sections of the degree-n piece are sparse homogeneous polynomials in
nvars = d+1 variables T0..Td.  Exponent multi-indices are packed into a
single int with T0 in the most significant field, so ascending packed
keys is ascending lexicographic order on (j0, ..., jd) and every
iteration below is reproducible.
"""

import re
from math import comb

from .kernels import mul_terms, scale_terms
from .ratio import Rat, rat, rat_str
from .valued_arith import GammaValue, Prime, norm_max, valuation

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
MAX_EXP = EXP_MASK


class DegreeOverflow(OverflowError):
    pass


def pack_exponents(J) -> int:
    key = 0
    for j in J:
        if j > MAX_EXP:
            raise DegreeOverflow(f"exponent {j} exceeds packed width {MAX_EXP}")
        key = (key << EXP_BITS) | j
    return key


def unpack_exponents(key: int, nvars: int) -> tuple:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & EXP_MASK
        key >>= EXP_BITS
    return tuple(out)


def monomial_basis(nvars: int, degree: int) -> list:
    """Packed keys of all degree-n monomials, ascending (= lex on exponents)."""

    def gen(prefix_key, rem_vars, rem_deg):
        if rem_vars == 1:
            yield (prefix_key << EXP_BITS) | rem_deg
            return
        for j in range(rem_deg + 1):
            yield from gen((prefix_key << EXP_BITS) | j, rem_vars - 1, rem_deg - j)

    if degree > MAX_EXP:
        raise DegreeOverflow(f"degree {degree} exceeds packed width {MAX_EXP}")
    return list(gen(0, nvars, degree))


def space_dim(d: int, degree: int) -> int:
    """dim of the degree-n piece on P^d."""
    return comb(degree + d, d)


class GradedSection:
    """A sparse homogeneous polynomial; stored coefficients are nonzero."""

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars: int, degree: int, terms: dict):
        self.nvars = nvars
        self.degree = degree
        self.terms = terms

    @classmethod
    def from_exponent_map(cls, nvars: int, emap: dict) -> "GradedSection":
        """Build from {exponent tuple: coeff}; zero coefficients are dropped."""
        terms = {}
        degree = None
        for J, c in emap.items():
            c = rat(c)
            if c == 0:
                continue
            if len(J) != nvars:
                raise ValueError(f"exponent tuple {J} has wrong arity")
            if degree is None:
                degree = sum(J)
            elif sum(J) != degree:
                raise ValueError("inhomogeneous terms")
            terms[pack_exponents(J)] = c
        if degree is None:
            raise ValueError("zero section needs an explicit degree; use zero()")
        return cls(nvars, degree, terms)

    @classmethod
    def monomial(cls, nvars: int, J, coeff=1) -> "GradedSection":
        return cls.from_exponent_map(nvars, {tuple(J): coeff})

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "GradedSection":
        return cls(nvars, degree, {})

    def is_zero(self) -> bool:
        return not self.terms

    def items_lex(self):
        """(exponent tuple, coeff) pairs in deterministic lex order."""
        for key in sorted(self.terms):
            yield unpack_exponents(key, self.nvars), self.terms[key]

    def coefficient(self, J):
        return self.terms.get(pack_exponents(J), Rat(0))

    def __add__(self, other: "GradedSection") -> "GradedSection":
        self._match(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            c = out.get(k)
            if c is None:
                out[k] = v
            else:
                c = c + v
                if c:
                    out[k] = c
                else:
                    del out[k]
        return GradedSection(self.nvars, self.degree, out)

    def __sub__(self, other: "GradedSection") -> "GradedSection":
        return self + other.scale(-1)

    def scale(self, c) -> "GradedSection":
        c = rat(c)
        if c == 0:
            return GradedSection.zero(self.nvars, self.degree)
        return GradedSection(self.nvars, self.degree, scale_terms(self.terms, c))

    def _match(self, other: "GradedSection"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")
        if self.degree != other.degree:
            raise ValueError("degree mismatch")

    def evaluate(self, coords) -> "Rat":
        """Exact value at affine coordinates (one rational per variable)."""
        coords = [rat(c) for c in coords]
        total = Rat(0)
        for key, c in self.terms.items():
            v = c
            k = key
            for i in range(self.nvars - 1, -1, -1):
                e = k & EXP_MASK
                if e:
                    v *= coords[i] ** e
                k >>= EXP_BITS
            total += v
        return total

    def __eq__(self, other):
        return (
            isinstance(other, GradedSection)
            and self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.degree, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"GradedSection({section_to_str(self)!r})"


def multiply(a: GradedSection, b: GradedSection) -> GradedSection:
    if a.nvars != b.nvars:
        raise ValueError("variable count mismatch")
    if a.degree + b.degree > MAX_EXP:
        raise DegreeOverflow(f"product degree {a.degree + b.degree} over cap")
    return GradedSection(a.nvars, a.degree + b.degree, mul_terms(a.terms, b.terms))


def power(s: GradedSection, m: int) -> GradedSection:
    """s**m by repeated squaring (m >= 1)."""
    if m < 1:
        raise ValueError("power requires m >= 1")
    acc = None
    base = s
    while m:
        if m & 1:
            acc = base if acc is None else multiply(acc, base)
        m >>= 1
        if m:
            base = multiply(base, base)
    return acc


class DiagonalMetric:
    """Metric data: one log-radius per coordinate section Ti.

    The degree-n norm it induces is the Gauss norm
    max_J |f_J| * prod_i radius_i**j_i; radii are stored as GammaValues
    (valuation scale: ||Ti|| = p**(-radii[i].primary) times perturbation).
    """

    __slots__ = ("prime", "radii")

    def __init__(self, prime: Prime, radii):
        self.prime = prime
        self.radii = tuple(radii)
        arity = self.radii[0].arity
        if any(r.arity != arity for r in self.radii):
            raise ValueError("mixed perturbation arity in radii")

    @property
    def nvars(self) -> int:
        return len(self.radii)

    @property
    def dim(self) -> int:
        return len(self.radii) - 1

    @property
    def arity(self) -> int:
        return self.radii[0].arity

    def weight_of_key(self, key: int) -> GammaValue:
        total = None
        for i in range(self.nvars - 1, -1, -1):
            e = key & EXP_MASK
            key >>= EXP_BITS
            if e:
                w = self.radii[i].scale(e)
                total = w if total is None else total + w
        return GammaValue.zero(self.arity) if total is None else total

    def weight_of_exponents(self, J) -> GammaValue:
        return self.weight_of_key(pack_exponents(J))

    def with_unit_perturbations(self) -> "DiagonalMetric":
        """Attach one independent infinitesimal per coordinate (arity = d+1)."""
        m = self.nvars
        return DiagonalMetric(
            self.prime,
            tuple(
                GammaValue(r.primary, tuple(rat(int(i == j)) for j in range(m)))
                for i, r in enumerate(self.radii)
            ),
        )

    def project_primary(self) -> "DiagonalMetric":
        return DiagonalMetric(
            self.prime, tuple(r.project_primary() for r in self.radii)
        )

    def __eq__(self, other):
        return (
            isinstance(other, DiagonalMetric)
            and self.prime == other.prime
            and self.radii == other.radii
        )

    def __hash__(self):
        return hash((self.prime, self.radii))

    def __repr__(self):
        return f"DiagonalMetric(p={self.prime.p}, radii={list(self.radii)})"


def gauss_norm(metric: DiagonalMetric, s: GradedSection):
    """Norm of s under the degree-n Gauss norm; None encodes norm zero.

    Returned as a GammaValue: the largest term norm, i.e. the smallest
    value of v_p(f_J) + sum_i j_i * radius_i over stored terms.
    """
    p = metric.prime
    best = None
    for key, c in s.terms.items():
        g = metric.weight_of_key(key).shift(valuation(c, p))
        if best is None or g < best:
            best = g
    return best


class GradedElement:
    """Finite family of homogeneous components, one per degree."""

    __slots__ = ("nvars", "components")

    def __init__(self, components: dict):
        comps = {}
        nvars = None
        for n, s in components.items():
            if s.is_zero():
                continue
            if s.degree != n:
                raise ValueError(f"component at degree {n} has degree {s.degree}")
            if nvars is None:
                nvars = s.nvars
            elif s.nvars != nvars:
                raise ValueError("variable count mismatch")
            comps[n] = s
        self.nvars = nvars
        self.components = comps

    def is_zero(self) -> bool:
        return not self.components

    def __mul__(self, other: "GradedElement") -> "GradedElement":
        out = {}
        for m, a in self.components.items():
            for n, b in other.components.items():
                prod = multiply(a, b)
                cur = out.get(m + n)
                out[m + n] = prod if cur is None else cur + prod
        return GradedElement(out)

    def __pow__(self, m: int) -> "GradedElement":
        if m < 1:
            raise ValueError("power requires m >= 1")
        acc = None
        base = self
        while m:
            if m & 1:
                acc = base if acc is None else acc * base
            m >>= 1
            if m:
                base = base * base
        return acc


def algebra_norm(metric: DiagonalMetric, s: GradedElement):
    """sup over degrees of the component Gauss norms; None for s = 0."""
    return norm_max(*(gauss_norm(metric, c) for c in s.components.values()))


def spectral_seminorm(normf, s: GradedSection, depth: int) -> list:
    """Doubling-power seminorm estimates [normf(s^(2^k)) / 2^k for k = 0..depth].

    Entries are GammaValues (None once the power has norm zero).  For a
    sub-multiplicative normf the norm sequence is non-increasing, which in
    value scale means non-decreasing; that is asserted up to exact ties.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    seq = []
    cur = s
    for k in range(depth + 1):
        if k > 0:
            cur = multiply(cur, cur)
        g = normf(cur)
        seq.append(None if g is None else g.scale(Rat(1) / (1 << k)))
    for a, b in zip(seq, seq[1:]):
        if a is not None and b is not None:
            assert b >= a, "estimates increased: norm is not sub-multiplicative"
        else:
            assert a is None or b is None or False
    return seq


# --- section literals -------------------------------------------------------

_TERM_RE = re.compile(r"^(?:(?P<coeff>-?\d+(?:/\d+)?)\s*\*?\s*)?(?P<mono>.*)$")
_FACTOR_RE = re.compile(r"T(?P<idx>\d+)(?:\^(?P<exp>\d+))?")


def parse_section(text: str, nvars: int) -> GradedSection:
    """Parse 'c*T0^a0 T1^a1 ... +/- ...' into a section; must be homogeneous."""
    stripped = text.replace("-", "+-").strip()
    if stripped.startswith("+"):
        stripped = stripped[1:]
    emap = {}
    for raw in stripped.split("+"):
        raw = raw.strip()
        if not raw:
            continue
        sign = 1
        if raw.startswith("-"):
            sign = -1
            raw = raw[1:].strip()
        m = _TERM_RE.match(raw)
        coeff = rat(m.group("coeff")) if m.group("coeff") else Rat(1)
        mono = m.group("mono").strip()
        J = [0] * nvars
        consumed = 0
        for fm in _FACTOR_RE.finditer(mono):
            idx = int(fm.group("idx"))
            if idx >= nvars:
                raise ValueError(f"variable T{idx} out of range in {text!r}")
            J[idx] += int(fm.group("exp") or 1)
            consumed += len(fm.group(0))
        if len(mono.replace(" ", "")) != consumed:
            raise ValueError(f"unparsed monomial text in term {raw!r}")
        key = tuple(J)
        emap[key] = emap.get(key, Rat(0)) + sign * coeff
    degrees = {sum(J) for J in emap}
    if len(degrees) > 1:
        raise ValueError(f"inhomogeneous section literal {text!r}")
    emap = {J: c for J, c in emap.items() if c != 0}
    if not emap:
        raise ValueError(f"literal {text!r} is zero; zero sections need a degree")
    return GradedSection.from_exponent_map(nvars, emap)


def section_to_str(s: GradedSection) -> str:
    if s.is_zero():
        return "0"
    parts = []
    for J, c in s.items_lex():
        mono = " ".join(
            f"T{i}^{e}" if e > 1 else f"T{i}" for i, e in enumerate(J) if e
        )
        if not mono:
            parts.append(rat_str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append(f"-{mono}")
        else:
            parts.append(f"{rat_str(c)}*{mono}")
    text = " + ".join(parts)
    return text.replace("+ -", "- ")
