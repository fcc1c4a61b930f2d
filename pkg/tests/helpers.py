"""Independent oracles for the norm computations.

Everything here is deliberately separate from the library's elimination
machinery: plain dense Gaussian elimination over fractions.Fraction,
windowed enumeration of coset representatives, and a weak-duality
certificate checker.  Oracles compare values, never implementations.
"""

from fractions import Fraction
from math import inf

from sectnorm.ratio import Rat
from sectnorm.section_algebra import GradedSection, monomial_basis, multiply


def to_frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def frac_valuation(x, p: int):
    x = to_frac(x)
    if x == 0:
        return inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def gauss_primary(terms: dict, weights, p: int):
    """min over entries of v_p(coeff) + weight (primary scale); inf for zero."""
    best = inf
    for col, c in terms.items():
        val = frac_valuation(c, p) + weights[col]
        if val < best:
            best = val
    return best


def dense_membership(rows, target: dict, ncols: int) -> bool:
    """Whether target lies in the row span; plain fraction elimination."""
    mat = [[to_frac(r.get(c, 0)) for c in range(ncols)] for r in rows]
    vec = [to_frac(target.get(c, 0)) for c in range(ncols)]
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        invc = mat[r][col]
        mat[r] = [x / invc for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                g = mat[i][col]
                mat[i] = [a - g * b for a, b in zip(mat[i], mat[r])]
        if vec[col] != 0:
            g = vec[col]
            vec = [a - g * b for a, b in zip(vec, mat[r])]
        r += 1
    return all(x == 0 for x in vec)


def window_candidates(p: int, B: int):
    """All a * p^-B with |a| <= p^(2B+1): valuations in [-B, B] plus digit room."""
    bound = p ** (2 * B + 1)
    step = Fraction(1, p**B)
    return [a * step for a in range(-bound, bound + 1)]


def quotient_enumeration(p: int, weights, kernel_rows, lift: dict, B: int):
    """Brute-force min of the coset norm over windowed coefficient vectors.

    Columns are 0..len(weights)-1; returns the minimal primary value over
    lift - sum c_i row_i with every c_i in the window (inf if some
    candidate is exactly zero).  Every candidate is a true coset member, so
    the result is always an upper bound for the quotient norm.
    """
    cands = window_candidates(p, B)
    ncols = len(weights)
    base = [to_frac(lift.get(c, 0)) for c in range(ncols)]
    rows = [[to_frac(r.get(c, 0)) for c in range(ncols)] for r in kernel_rows]

    def value(vec):
        return gauss_primary({c: v for c, v in enumerate(vec) if v != 0}, weights, p)

    best = value(base)

    def rec(i, cur):
        nonlocal best
        if i == len(rows):
            v = value(cur)
            if v > best:
                best = v
            return
        for c in cands:
            rec(i + 1, [a - c * b for a, b in zip(cur, rows[i])] if c else cur)

    rec(0, base)
    return best


def products_rows(Y, n: int):
    """Degree-n multiples of the generators, as packed-key term dicts."""
    rows = []
    for g in Y.generators:
        rem = n - g.degree
        if rem < 0:
            continue
        for mk in monomial_basis(Y.nvars, rem):
            mono = GradedSection(Y.nvars, rem, {mk: Rat(1)})
            rows.append(multiply(mono, g).terms)
    return rows


def assert_quotient_certificate(metric, Y, n: int, t: GradedSection, claimed, lift):
    """Weak-duality certificate that `claimed` is exactly the quotient norm.

    All checks are independent of the elimination that produced the claim:
      1. lift - t lies in the span of the generator multiples (membership by
         dense fraction elimination), so lift represents class(t);
      2. the Gauss value of lift equals claimed (an attained upper bound);
      3. a functional vanishing on every generator multiple, with closed-form
         dual norm p^(w_cmax), pairs with t at the claimed value (the
         matching lower bound).
    """
    from sectnorm.restriction import quotient_norm_n

    p = metric.prime.p
    keys = monomial_basis(Y.nvars, n)
    col_of = {k: i for i, k in enumerate(keys)}
    weights = [to_frac(metric.weight_of_key(k).primary) for k in keys]
    rows = [{col_of[k]: v for k, v in r.items()} for r in products_rows(Y, n)]

    diff = dict(lift.terms)
    for k, v in t.terms.items():
        cur = diff.get(k, Rat(0)) - v
        if cur:
            diff[k] = cur
        elif k in diff:
            del diff[k]
    assert dense_membership(
        rows, {col_of[k]: v for k, v in diff.items()}, len(keys)
    ), "claimed lift does not represent the class"

    if claimed is None:
        assert lift.is_zero(), "zero quotient norm with a nonzero minimizing lift"
        assert dense_membership(
            rows, {col_of[k]: v for k, v in t.terms.items()}, len(keys)
        ), "claimed zero class is not in the ideal"
        return

    lift_cols = {col_of[k]: v for k, v in lift.terms.items()}
    lift_val = gauss_primary(lift_cols, weights, p)
    assert lift_val == to_frac(claimed.primary), (
        f"lift value {lift_val} != claimed {claimed.primary}"
    )

    cmax = min(
        c for c, v in lift_cols.items()
        if frac_valuation(v, p) + weights[c] == lift_val
    )
    # functional: coefficient of cmax after reduction against the echelon rows
    rd = quotient_norm_n(metric, Y, n)
    ell = {cmax: Fraction(1)}
    for col, row, _ in rd.echelon.pivots:
        coeff = row.get(keys[cmax])
        if coeff:
            ell[col_of[col]] = -to_frac(coeff)

    for r in rows:
        pairing = sum(ell.get(c, Fraction(0)) * to_frac(v) for c, v in r.items())
        assert pairing == 0, "certificate functional does not kill the ideal"

    dual_val = min(frac_valuation(v, p) - weights[c] for c, v in ell.items())
    assert dual_val == -weights[cmax], "certificate functional has wrong dual norm"

    pairing_t = sum(
        ell.get(col_of[k], Fraction(0)) * to_frac(v) for k, v in t.terms.items()
    )
    assert pairing_t != 0, "duality pairing vanished on a nonzero class"
    assert frac_valuation(pairing_t, p) + weights[cmax] == to_frac(claimed.primary), (
        "duality pairing does not attain the claimed value"
    )
