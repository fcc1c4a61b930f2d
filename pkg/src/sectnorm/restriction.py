"""Subvarieties of P^d, per-degree quotient norms, restricted sup norms.

The degree-n quotient norm is produced by eliminating the degree-n part of
the subvariety ideal inside the monomial presentation of the ambient Gauss
norm.  The elimination leaves a monomial transversal on which the quotient
norm is diagonal, and reduction against the eliminated rows produces the
norm-minimizing lift of any class.

Restricted sup norms are computed exactly for rational points (pointwise
evaluation) and for linear subvarieties (pull back through the
parametrization and read the Gauss norm in an orthogonalized coordinate
system on the subvariety); for general subvarieties only the spectral
doubling sequence is available.
"""

import logging
import threading
from math import comb

from .ratio import Rat, rat
from .section_algebra import (
    DiagonalMetric,
    GradedSection,
    gauss_norm,
    monomial_basis,
    multiply,
    space_dim,
)
from .normed_space import WeightedNorm, weighted_echelon
from .points_metrics import Frame, RationalPoint, fs_value
from .valued_arith import GammaValue, Prime

logger = logging.getLogger(__name__)

KIND_RATIONAL_POINT = "rational_point"
KIND_LINEAR = "linear"
KIND_GENERAL = "general"


class SubvarietyError(ValueError):
    pass


def _nullspace(rows):
    """Basis of {c : M c = 0} for M given by rows; exact over Q."""
    m = len(rows)
    n = len(rows[0])
    mat = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][col]
        mat[r] = [x / inv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(col)
        r += 1
    basis = []
    free = [c for c in range(n) if c not in piv_cols]
    for fc in free:
        vec = [Rat(0)] * n
        vec[fc] = Rat(1)
        for i, pc in enumerate(piv_cols):
            vec[pc] = -mat[i][fc]
        basis.append(tuple(vec))
    return basis


class Subvariety:
    """A closed subvariety of P^d cut out by homogeneous ideal generators.

    kind tags the cases with extra exact structure: a rational point, a
    linear subvariety carrying an explicit parametrization P^e -> P^d
    (rows of the matrix are the images of the coordinate sections of P^e),
    or a general ideal.
    """

    def __init__(self, nvars, generators, kind, parametrization=None,
                 point=None, quotient_dims=None):
        if not generators:
            raise SubvarietyError("at least one ideal generator required")
        for g in generators:
            if g.nvars != nvars:
                raise SubvarietyError("generator variable count mismatch")
            if g.is_zero():
                raise SubvarietyError("zero generator")
        self.nvars = nvars
        self.generators = list(generators)
        self.kind = kind
        self.parametrization = parametrization
        self.point = point
        self.quotient_dims = quotient_dims
        self._cache = {}
        self._lock = threading.Lock()

    @classmethod
    def at_rational_point(cls, point: RationalPoint) -> "Subvariety":
        n = point.nvars
        i0 = point.pivot_index
        gens = []
        for j in range(n):
            if j == i0:
                continue
            emap = {}
            ej = [0] * n
            ej[j] = 1
            emap[tuple(ej)] = Rat(1)
            e0 = [0] * n
            e0[i0] = 1
            emap[tuple(e0)] = -point.coords[j]
            gens.append(GradedSection.from_exponent_map(n, {k: v for k, v in emap.items() if v != 0}))
        return cls(
            n, gens, KIND_RATIONAL_POINT,
            parametrization=[point.coords], point=point,
            quotient_dims=lambda deg: 1,
        )

    @classmethod
    def linear(cls, parametrization) -> "Subvariety":
        rows = [tuple(rat(x) for x in row) for row in parametrization]
        nvars = len(rows[0])
        e1 = len(rows)
        if e1 >= nvars:
            raise SubvarietyError("parametrization must have fewer rows than columns")
        if len(_nullspace([[rows[a][i] for a in range(e1)] for i in range(nvars)])) != 0:
            raise SubvarietyError("parametrization rows are dependent")
        forms = _nullspace(rows)
        gens = []
        for c in forms:
            emap = {}
            for i, ci in enumerate(c):
                if ci != 0:
                    J = [0] * nvars
                    J[i] = 1
                    emap[tuple(J)] = ci
            gens.append(GradedSection.from_exponent_map(nvars, emap))
        e = e1 - 1
        return cls(
            nvars, gens, KIND_LINEAR, parametrization=rows,
            quotient_dims=lambda deg: comb(deg + e, e),
        )

    @classmethod
    def general(cls, generators, quotient_dims=None) -> "Subvariety":
        return cls(generators[0].nvars, generators, KIND_GENERAL,
                   quotient_dims=quotient_dims)

    @property
    def dim_ambient(self) -> int:
        return self.nvars - 1

    @property
    def max_generator_degree(self) -> int:
        return max(g.degree for g in self.generators)

    def _cached(self, key, build):
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        value = build()
        with self._lock:
            return self._cache.setdefault(key, value)

    def __repr__(self):
        return f"Subvariety(kind={self.kind}, gens={len(self.generators)}, P^{self.dim_ambient})"


def _degree_products(Y: Subvariety, n: int):
    """Rows m * g over all generators g and complementary-degree monomials m."""
    if n < Y.max_generator_degree:
        raise ValueError(
            f"degree {n} below the largest generator degree {Y.max_generator_degree}"
        )
    rows = []
    for g in Y.generators:
        rem = n - g.degree
        if rem < 0:
            continue
        for mk in monomial_basis(Y.nvars, rem):
            mono = GradedSection(Y.nvars, rem, {mk: Rat(1)})
            rows.append(multiply(mono, g).terms)
    return rows


def ideal_degree_part(Y: Subvariety, n: int):
    """A k-basis of the degree-n part of the generated ideal.

    For rational points and linear subvarieties this is the full degree-n
    ideal in every degree; for general kind it can be smaller below the
    saturation degree, which is logged.
    """
    rows = _degree_products(Y, n)
    zero = GammaValue.zero(0)
    ech = weighted_echelon(Prime(2), rows, lambda col: zero, on_dependent="drop")
    basis = [GradedSection(Y.nvars, n, dict(row)) for _, row, _ in ech.pivots]
    if Y.kind == KIND_GENERAL and Y.quotient_dims is None:
        logger.warning(
            "general subvariety without a dimension hint: degree-%d ideal part "
            "may be smaller than the saturated ideal", n,
        )
    return basis


class RestrictedDegree:
    """Quotient data of one graded piece: eliminated ideal plus transversal.

    complement lists the packed keys of the monomial transversal; the
    quotient norm is diagonal there, so the class norm of a section is the
    Gauss value of its reduction and reduce() is the minimizing lift.
    """

    def __init__(self, metric, subvariety, n, echelon, complement, certified):
        self.metric = metric
        self.subvariety = subvariety
        self.n = n
        self.echelon = echelon
        self.complement = complement
        self.saturation_certified = certified

    @property
    def nvars(self) -> int:
        return self.metric.nvars

    @property
    def dim_total(self) -> int:
        return space_dim(self.metric.dim, self.n)

    @property
    def dim_ideal(self) -> int:
        return self.echelon.rank

    @property
    def dim_quotient(self) -> int:
        return len(self.complement)

    def reduce(self, s: GradedSection) -> GradedSection:
        """Norm-minimizing representative of class(s), supported on the transversal."""
        if s.degree != self.n:
            raise ValueError("degree mismatch")
        return GradedSection(self.nvars, self.n, self.echelon.reduce(s.terms))

    def class_value(self, s: GradedSection):
        """Quotient norm of class(s); None iff s lies in the ideal part."""
        if s.degree != self.n:
            raise ValueError("degree mismatch")
        return self.echelon.reduced_value(s.terms)

    def ideal_basis(self):
        return [
            GradedSection(self.nvars, self.n, dict(row))
            for _, row, _ in self.echelon.pivots
        ]

    def transversal_sections(self):
        return [
            GradedSection(self.nvars, self.n, {key: Rat(1)})
            for key in self.complement
        ]

    def quotient_presentation(self) -> WeightedNorm:
        """Diagonal presentation in the transversal-class coordinates."""
        return WeightedNorm.diagonal(
            self.metric.prime,
            [self.metric.weight_of_key(key) for key in self.complement],
        )


def quotient_norm_n(metric: DiagonalMetric, Y: Subvariety, n: int) -> RestrictedDegree:
    """Build (with caching) the degree-n quotient norm data for (metric, Y)."""

    def build():
        rows = _degree_products(Y, n)
        wcache = {}

        def weight_of(key):
            w = wcache.get(key)
            if w is None:
                w = metric.weight_of_key(key)
                wcache[key] = w
            return w

        ech = weighted_echelon(metric.prime, rows, weight_of, on_dependent="drop")
        complement = [k for k in monomial_basis(Y.nvars, n) if not ech.is_pivot(k)]
        certified = _saturation_certificate(Y, n, ech.rank)
        if certified is False:
            logger.warning(
                "degree-%d ideal part of a general subvariety is not certified "
                "saturated (quotient dim %d)", n, len(complement),
            )
        return RestrictedDegree(metric, Y, n, ech, complement, certified)

    return Y._cached((metric, n), build)


def _saturation_certificate(Y: Subvariety, n: int, rank: int):
    """True when the generated degree-n part provably equals the ideal part."""
    if Y.kind in (KIND_RATIONAL_POINT, KIND_LINEAR):
        expected = space_dim(Y.dim_ambient, n) - Y.quotient_dims(n)
        if rank != expected:
            raise SubvarietyError(
                f"degree-{n} ideal rank {rank} != expected {expected}"
            )
        return True
    if Y.quotient_dims is not None:
        expected_q = Y.quotient_dims(n)
        if expected_q is not None:
            return rank == space_dim(Y.dim_ambient, n) - expected_q
    # rank-stabilization heuristic: a matching quotient dimension one degree
    # up certifies only dimension-zero subvarieties; anything else is surfaced
    q_n = space_dim(Y.dim_ambient, n) - rank
    rows_up = _degree_products(Y, n + 1)
    zero = GammaValue.zero(0)
    ech_up = weighted_echelon(Prime(2), rows_up, lambda col: zero, on_dependent="drop")
    q_up = space_dim(Y.dim_ambient, n + 1) - ech_up.rank
    return q_up == q_n


def sup_norm_exact(metric: DiagonalMetric, Y: Subvariety, t: GradedSection):
    """Exact restricted sup norm of class(t); rational-point and linear kinds only."""
    if Y.kind == KIND_RATIONAL_POINT:
        y = Y.point
        v_t = y.section_value(t)
        if v_t is None:
            return None
        i0 = y.pivot_index
        frame = Frame(tuple(t.degree * int(i == i0) for i in range(Y.nvars)))
        return fs_value(metric, t.degree, y, frame).shift(v_t)
    if Y.kind == KIND_LINEAR:
        sub_metric, subs_forms = _linear_restriction_data(metric, Y)
        pulled = substitute_linear(t, subs_forms)
        if pulled.is_zero():
            return None
        return gauss_norm(sub_metric, pulled)
    raise SubvarietyError(
        "exact restricted sup norms need a rational point or linear subvariety; "
        "use sup_norm_spectral"
    )


def _linear_restriction_data(metric: DiagonalMetric, Y: Subvariety):
    """Orthogonalized coordinates for the restricted degree-1 quotient norm.

    Eliminating the kernel of the restriction map V_1(P^d) -> V_1(P^e)
    against the ambient radii leaves complement coordinates whose images
    form an orthogonal basis of the quotient norm on V_1(P^e); sections are
    rewritten in those coordinates and measured by their Gauss norm there.
    """

    def build():
        from .normed_space import invert_matrix

        M = Y.parametrization
        e1 = len(M)
        nv = Y.nvars
        res_cols = [tuple(M[a][i] for a in range(e1)) for i in range(nv)]
        kernel = _nullspace([[res_cols[i][a] for i in range(nv)] for a in range(e1)])
        rows = [{i: c for i, c in enumerate(vec) if c != 0} for vec in kernel]
        ech = weighted_echelon(
            metric.prime, rows, lambda i: metric.radii[i], on_dependent="raise"
        )
        complement = [i for i in range(nv) if not ech.is_pivot(i)]
        B = [list(res_cols[c]) for c in complement]
        Binv = invert_matrix(B)
        if Binv is None:
            raise SubvarietyError("degenerate parametrization")
        subs_forms = []
        for i in range(nv):
            lam = [
                sum(res_cols[i][a] * Binv[a][j] for a in range(e1))
                for j in range(e1)
            ]
            emap = {}
            for j, c in enumerate(lam):
                if c != 0:
                    J = [0] * e1
                    J[j] = 1
                    emap[tuple(J)] = c
            if emap:
                subs_forms.append(GradedSection.from_exponent_map(e1, emap))
            else:
                subs_forms.append(GradedSection.zero(e1, 1))
        sub_metric = DiagonalMetric(
            metric.prime, [metric.radii[c] for c in complement]
        )
        return sub_metric, subs_forms

    return Y._cached(("linear_restriction", metric), build)


def pullback_forms(parametrization):
    """The coordinate restrictions res(T_i) as degree-1 sections on P^e."""
    e1 = len(parametrization)
    forms = []
    for i in range(len(parametrization[0])):
        emap = {}
        for a in range(e1):
            c = parametrization[a][i]
            if c != 0:
                J = [0] * e1
                J[a] = 1
                emap[tuple(J)] = c
        forms.append(
            GradedSection.from_exponent_map(e1, emap)
            if emap else GradedSection.zero(e1, 1)
        )
    return forms


def substitute_linear(s: GradedSection, forms) -> GradedSection:
    """Substitute T_i -> forms[i] (degree-1 sections in the target variables)."""
    new_nvars = forms[0].nvars
    powers = [[GradedSection(new_nvars, 0, {0: Rat(1)})] for _ in forms]

    def power_of(i, e):
        col = powers[i]
        while len(col) <= e:
            col.append(multiply(col[-1], forms[i]))
        return col[e]

    total = GradedSection.zero(new_nvars, s.degree)
    for J, c in s.items_lex():
        term = None
        for i, e in enumerate(J):
            if e == 0:
                continue
            f = power_of(i, e)
            term = f if term is None else multiply(term, f)
        if term is None:
            term = GradedSection(new_nvars, 0, {0: Rat(1)})
        total = total + term.scale(c)
    return total


def sup_norm_spectral(metric: DiagonalMetric, Y: Subvariety, t: GradedSection,
                      depth: int, degree_cap=None):
    """Doubling-power estimates of the restricted sup norm of class(t).

    Entry k is the quotient norm of class(t^(2^k)) divided by 2^k (value
    scale).  The sequence decreases (in norm) to the restricted sup norm;
    every entry is an upper bound for it.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = t.degree
    cap = degree_cap if degree_cap is not None else 64 * n
    if (1 << depth) * n > cap:
        raise ValueError(
            f"top power degree {(1 << depth) * n} exceeds the cap {cap}"
        )
    seq = []
    cur = t
    for k in range(depth + 1):
        if k > 0:
            cur = multiply(cur, cur)
        rd = quotient_norm_n(metric, Y, n * (1 << k))
        g = rd.class_value(cur)
        seq.append(None if g is None else g.scale(Rat(1) / (1 << k)))
    for a, b in zip(seq, seq[1:]):
        if a is not None and b is not None:
            assert b >= a, "spectral estimates increased"
    return seq


def extension_lift(metric: DiagonalMetric, Y: Subvariety, t: GradedSection) -> GradedSection:
    """A lift of class(t) whose Gauss norm equals the quotient norm of the class."""
    rd = quotient_norm_n(metric, Y, t.degree)
    return rd.reduce(t)
