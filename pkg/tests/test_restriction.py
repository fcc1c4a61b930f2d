import random

import pytest

from sectnorm.points_metrics import RationalPoint
from sectnorm.ratio import Rat, rat
from sectnorm.restriction import (
    Subvariety,
    SubvarietyError,
    extension_lift,
    ideal_degree_part,
    quotient_norm_n,
    substitute_linear,
    sup_norm_exact,
    sup_norm_spectral,
)
from sectnorm.section_algebra import (
    DiagonalMetric,
    GradedSection,
    gauss_norm,
    monomial_basis,
    multiply,
    parse_section,
    space_dim,
)
from sectnorm.normed_space import weighted_echelon
from sectnorm.valued_arith import GammaValue, Prime

from helpers import (
    assert_quotient_certificate,
    dense_membership,
    quotient_enumeration,
    to_frac,
)

P2 = Prime(2)


def metric(p, *primaries):
    return DiagonalMetric(Prime(p), [GammaValue(x) for x in primaries])


def line_in_P2():
    return Subvariety.linear([[1, 0, -1], [0, 1, -1]])  # V(T0 + T1 + T2)


def test_ideal_degree_part_coordinate_hyperplane():
    Y = Subvariety.general([parse_section("T0", 2)], quotient_dims=lambda n: n + 1)
    basis = ideal_degree_part(Y, 2)
    got = {frozenset(s.terms.items()) for s in basis}
    want = {
        frozenset(parse_section("T0^2", 2).terms.items()),
        frozenset(parse_section("T0 T1", 2).terms.items()),
    }
    assert got == want


def test_ideal_degree_part_rational_point():
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    basis = ideal_degree_part(Y, 2)
    assert len(basis) == 2
    keys = monomial_basis(2, 2)
    col = {k: i for i, k in enumerate(keys)}
    rows = [{col[k]: v for k, v in s.terms.items()} for s in basis]
    for lit in ("T0^2 - T0 T1", "T0 T1 - T1^2", "T0^2 - T1^2"):
        s = parse_section(lit, 2)
        assert dense_membership(rows, {col[k]: v for k, v in s.terms.items()}, len(keys))


def test_ideal_degree_part_hilbert_dimension_of_line():
    Y = line_in_P2()
    for n in range(1, 7):
        # ideal of a line in P^2: codimension n+1 in each degree
        assert len(ideal_degree_part(Y, n)) == space_dim(2, n) - (n + 1)


def test_ideal_degree_part_degree_too_small():
    Y = Subvariety.general([parse_section("T0^2 + T1 T2", 3)])
    with pytest.raises(ValueError):
        ideal_degree_part(Y, 1)


def test_quotient_norm_coordinate_hyperplane_is_orthogonal():
    Y = Subvariety.general(
        [parse_section("T0", 2)], quotient_dims=lambda n: 1
    )
    m = metric(2, 0, 0)
    # V(T0) in P^1 is the point [0:1]; class(T1^n) keeps norm 1
    for n in (1, 2, 4):
        rd = quotient_norm_n(m, Y, n)
        assert rd.class_value(parse_section(f"T1^{n}", 2)) == GammaValue(0)


def test_quotient_norm_rational_point_examples():
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    m = metric(2, 0, 1)
    for n in (1, 2, 3, 5):
        rd = quotient_norm_n(m, Y, n)
        t = parse_section(f"T0^{n}", 2)
        assert rd.class_value(t) == GammaValue(n)  # norm 2^-n
        # minimizing lift and certificate for exactness
        assert_quotient_certificate(m, Y, n, t, GammaValue(n), rd.reduce(t))
    mu = metric(2, 0, 0)
    for n in (1, 3):
        rd = quotient_norm_n(mu, Y, n)
        t = parse_section(f"T0^{n}", 2)
        assert rd.class_value(t) == GammaValue(0)  # ultrametric forces norm 1
        assert_quotient_certificate(mu, Y, n, t, GammaValue(0), rd.reduce(t))


def test_quotient_norm_dimensions():
    Y = line_in_P2()
    m = metric(2, 0, 1, 2)
    for n in (1, 2, 4):
        rd = quotient_norm_n(m, Y, n)
        assert rd.dim_ideal + rd.dim_quotient == rd.dim_total
        assert rd.dim_quotient == n + 1
        assert rd.saturation_certified is True
        pres = rd.quotient_presentation()
        assert pres.dim == rd.dim_quotient


def test_quotient_window_enumeration_cross_check():
    # dim V_n <= 10, one or two kernel generators, exhaustive window
    m = metric(2, 0, 1)
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 2]))
    n = 2
    rd = quotient_norm_n(m, Y, n)
    keys = monomial_basis(2, n)
    col = {k: i for i, k in enumerate(keys)}
    weights = [to_frac(m.weight_of_key(k).primary) for k in keys]
    kernel_rows = [
        {col[k]: v for k, v in s.terms.items()} for s in rd.ideal_basis()
    ]
    for t in rd.transversal_sections():
        got = rd.class_value(t)
        brute = quotient_enumeration(
            2, weights, kernel_rows, {col[k]: v for k, v in t.terms.items()}, B=3
        )
        assert to_frac(got.primary) == brute


def test_quotient_values_pivot_invariant():
    # reversed tie-breaking must not change any class value
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    m = metric(2, 0, 0)
    from helpers import products_rows

    n = 4
    rd = quotient_norm_n(m, Y, n)
    rows = products_rows(Y, n)
    rev = weighted_echelon(
        m.prime, rows, m.weight_of_key, on_dependent="drop", reverse_ties=True
    )
    rng = random.Random(3)
    keys = monomial_basis(2, n)
    for _ in range(25):
        terms = {
            k: rat(rng.choice([1, 3, -1, 2])) * rat(2) ** rng.randint(-2, 2)
            for k in keys
            if rng.random() < 0.6
        }
        if not terms:
            continue
        s = GradedSection(2, n, terms)
        assert rd.class_value(s) == rev.reduced_value(s.terms)
    # weight classes modulo the value group agree between the two runs
    def weight_classes(ech):
        return sorted(
            (to_frac(w.primary) % 1, w.pert) for _, _, w in ech.pivots
        )

    assert weight_classes(rd.echelon) == weight_classes(rev)


def test_sup_norm_exact_rational_point():
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    m = metric(2, 0, 1)
    for n in (1, 2, 4):
        t = parse_section(f"T0^{n}", 2)
        assert sup_norm_exact(m, Y, t) == GammaValue(n)
    # a class in the ideal has restricted norm zero
    assert sup_norm_exact(m, Y, parse_section("T0 - T1", 2)) is None


def test_sup_norm_exact_coordinate_restriction():
    # Y a coordinate line in P^2: restriction just drops the dead variable
    Y = Subvariety.linear([[0, 1, 0], [0, 0, 1]])  # V(T0)
    m = metric(2, 0, 0, 0)
    t = parse_section("T0^2 + T1 T2 + 4*T2^2", 3)
    got = sup_norm_exact(m, Y, t)
    restricted = parse_section("T0 T1 + 4*T1^2", 2)  # T1, T2 become the coordinates
    assert got == gauss_norm(metric(2, 0, 0), restricted)


def test_rational_point_quotient_equals_sup():
    # diagonal Fubini-Study metrics at rational points: the ratio is 1
    rng = random.Random(91)
    for p, coords, radii in [
        (2, [1, 1], (0, 1)),
        (2, [1, 2], (0, 1)),
        (3, [1, 3, 2], (0, 1, 2)),
        (2, [1, 1, 1], (0, 0, 0)),
    ]:
        prime = Prime(p)
        Y = Subvariety.at_rational_point(RationalPoint(prime, coords))
        m = DiagonalMetric(prime, [GammaValue(r) for r in radii])
        for n in range(1, 6):
            rd = quotient_norm_n(m, Y, n)
            for t in rd.transversal_sections():
                assert rd.class_value(t) == sup_norm_exact(m, Y, t)
            keys = monomial_basis(len(coords), n)
            terms = {
                k: rat(rng.choice([1, 2, 3, -1])) * rat(p) ** rng.randint(-2, 2)
                for k in keys
                if rng.random() < 0.5
            }
            if terms:
                s = GradedSection(len(coords), n, terms)
                assert rd.class_value(s) == sup_norm_exact(m, Y, s)


def test_quotient_dominates_sup_on_linear():
    Y = line_in_P2()
    m = metric(2, 0, 1, 2)
    rng = random.Random(55)
    for n in (1, 2, 3):
        rd = quotient_norm_n(m, Y, n)
        for _ in range(10):
            terms = {
                k: rat(rng.choice([1, 3, 5, -1])) * rat(2) ** rng.randint(-2, 2)
                for k in monomial_basis(3, n)
                if rng.random() < 0.5
            }
            if not terms:
                continue
            t = GradedSection(3, n, terms)
            quot = rd.class_value(t)
            sup = sup_norm_exact(m, Y, t)
            if quot is None:
                assert sup is None
                continue
            assert sup >= quot  # value scale: quotient norm >= sup norm


def test_sup_norm_spectral_cross_checks():
    m = metric(2, 0, 1)
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    t = parse_section("T0", 2)
    exact = sup_norm_exact(m, Y, t)
    seq = sup_norm_spectral(m, Y, t, 4)
    assert seq[-1] == exact  # constant at the exact value for a point
    mline = metric(2, 0, 1, 2)
    Yl = line_in_P2()
    t2 = parse_section("T0 + 3*T1", 3)
    exact2 = sup_norm_exact(mline, Yl, t2)
    seq2 = sup_norm_spectral(mline, Yl, t2, 4)
    assert seq2[-1].primary == exact2.primary
    # weakly decreasing norms = weakly increasing values
    vals = [g.primary for g in seq2]
    assert vals == sorted(vals)
    # in the ideal: the whole column is zero
    tz = parse_section("T0 + T1 + T2", 3)
    assert all(g is None for g in sup_norm_spectral(mline, Yl, tz, 3))


def test_sup_norm_spectral_degree_cap():
    m = metric(2, 0, 1)
    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    with pytest.raises(ValueError):
        sup_norm_spectral(m, Y, parse_section("T0", 2), 7)  # 128 > 64 default


def test_sup_norm_exact_rejects_general():
    Y = Subvariety.general([parse_section("T0 T2 - T1^2", 3)])
    with pytest.raises(SubvarietyError):
        sup_norm_exact(metric(2, 0, 0, 0), Y, parse_section("T0^2", 3))


def test_extension_lift_examples():
    Y0 = Subvariety.general([parse_section("T0", 2)], quotient_dims=lambda n: 1)
    m = metric(2, 0, 0)
    t = parse_section("T1^3", 2)
    assert extension_lift(m, Y0, t) == t  # canonical lift survives

    Y = Subvariety.at_rational_point(RationalPoint(P2, [1, 1]))
    m2 = metric(2, 0, 1)
    t2 = parse_section("T0^3", 2)
    lift = extension_lift(m2, Y, t2)
    assert gauss_norm(m2, lift) == GammaValue(3)
    assert lift == parse_section("T1^3", 2)
    # round trip: the lift represents the same class
    rd = quotient_norm_n(m2, Y, 3)
    assert rd.reduce(lift - t2).is_zero()


def test_extension_lift_certificates():
    rng = random.Random(77)
    Y = line_in_P2()
    m = metric(2, 0, 1, 2)
    for n in (2, 3):
        rd = quotient_norm_n(m, Y, n)
        for _ in range(5):
            terms = {
                k: rat(rng.choice([1, 3, -1])) * rat(2) ** rng.randint(-1, 1)
                for k in monomial_basis(3, n)
                if rng.random() < 0.5
            }
            if not terms:
                continue
            t = GradedSection(3, n, terms)
            lift = extension_lift(m, Y, t)
            assert_quotient_certificate(m, Y, n, t, rd.class_value(t), lift)


def test_quotient_submultiplicative_across_degrees():
    Y = line_in_P2()
    m = metric(2, 0, 1, 2)
    rng = random.Random(101)
    for _ in range(15):
        na, nb = rng.randint(1, 2), rng.randint(1, 2)
        a = GradedSection(
            3, na,
            {
                k: rat(rng.choice([1, 3, -1]))
                for k in monomial_basis(3, na)
                if rng.random() < 0.7
            } or {monomial_basis(3, na)[0]: Rat(1)},
        )
        b = GradedSection(
            3, nb,
            {
                k: rat(rng.choice([1, 5, -1]))
                for k in monomial_basis(3, nb)
                if rng.random() < 0.7
            } or {monomial_basis(3, nb)[0]: Rat(1)},
        )
        qa = quotient_norm_n(m, Y, na).class_value(a)
        qb = quotient_norm_n(m, Y, nb).class_value(b)
        qab = quotient_norm_n(m, Y, na + nb).class_value(multiply(a, b))
        if qab is None:
            continue
        assert qab >= qa + qb  # value scale of ||ab|| <= ||a|| ||b||


def test_general_kind_conic_with_hint():
    # the conic T0 T2 = T1^2 is a curve of degree 2: quotient dims 2n+1
    Y = Subvariety.general(
        [parse_section("T0 T2 - T1^2", 3)], quotient_dims=lambda n: 2 * n + 1
    )
    m = metric(2, 0, 1, 2)
    for n in (2, 3):
        rd = quotient_norm_n(m, Y, n)
        assert rd.dim_quotient == 2 * n + 1
        assert rd.saturation_certified is True
        for t in rd.transversal_sections()[:3]:
            assert_quotient_certificate(m, Y, n, t, rd.class_value(t), rd.reduce(t))
    # spectral estimates exist and decrease in norm
    t = parse_section("T0^2", 3)
    seq = sup_norm_spectral(m, Y, t, 3, degree_cap=16)
    vals = [g.primary for g in seq]
    assert vals == sorted(vals)


def test_general_kind_without_hint_is_flagged():
    Y = Subvariety.general([parse_section("T0 T2 - T1^2", 3)])
    m = metric(2, 0, 0, 0)
    rd = quotient_norm_n(m, Y, 2)
    assert rd.saturation_certified is False  # positive-dimensional, no hint


def test_substitute_linear_composition():
    # T0 -> S0 + S1, T1 -> S1 on a small section
    forms = [parse_section("T0 + T1", 2), parse_section("T1", 2)]
    s = parse_section("T0^2 - 2*T0 T1", 2)
    got = substitute_linear(s, forms)
    want = parse_section("T0^2 - T1^2", 2)  # (S0+S1)^2 - 2(S0+S1)S1
    assert got == want


def test_linear_subvariety_constructor_validation():
    with pytest.raises(SubvarietyError):
        Subvariety.linear([[1, 0, 0], [2, 0, 0]])  # dependent rows
    with pytest.raises(SubvarietyError):
        Subvariety.linear([[1, 0], [0, 1]])  # not a proper subvariety
