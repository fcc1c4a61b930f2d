"""Finite-dimensional ultrametric normed spaces: evaluation, orthogonalization,
quotient and dual norms.

A WeightedNorm presents a norm by an orthogonal basis with GammaValue
weights; the norm of sum c_i e_i is by definition max_i |c_i| * p**(-w_i).
The central algorithm is a valuation-aware Gauss-Jordan elimination: the
pivot of a row is always an entry of maximal term norm, which makes the
resulting rows an orthogonal basis of their span, presents quotient norms
diagonally on the untouched coordinates, and yields minimizing coset
representatives by plain reduction.
"""

from .kernels import row_axpy
from .ratio import Rat, rat
from .valued_arith import Prime, valuation


class OutsideSpanError(ValueError):
    pass


class DependentSpanError(ValueError):
    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


class NotComplementaryError(ValueError):
    pass


KVector = tuple


def kvector(values) -> KVector:
    return tuple(rat(v) for v in values)


class WeightedNorm:
    """Orthogonal presentation of an ultrametric norm.

    basis vectors are expressed in a fixed ambient coordinate system (their
    length may exceed dim when presenting a subspace); weights[i] is the
    value of the i-th basis vector, norm p**(-weights[i].primary) times
    perturbation.
    """

    __slots__ = ("prime", "basis", "weights")

    def __init__(self, prime: Prime, basis, weights):
        self.prime = prime
        self.basis = [kvector(b) for b in basis]
        self.weights = list(weights)
        if len(self.basis) != len(self.weights):
            raise ValueError("basis/weights length mismatch")
        if not self.basis:
            raise ValueError("empty presentation")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_len(self) -> int:
        return len(self.basis[0])

    @classmethod
    def diagonal(cls, prime: Prime, weights) -> "WeightedNorm":
        weights = list(weights)
        n = len(weights)
        basis = [tuple(Rat(int(i == j)) for j in range(n)) for i in range(n)]
        return cls(prime, basis, weights)

    def coordinates(self, v) -> list:
        """Exact coordinates of v in this basis; raises if v is outside the span."""
        coords = solve_in_span(self.basis, kvector(v))
        if coords is None:
            raise OutsideSpanError("vector outside the span of the basis")
        return coords

    def __eq__(self, other):
        return (
            isinstance(other, WeightedNorm)
            and self.prime == other.prime
            and self.basis == other.basis
            and self.weights == other.weights
        )

    def __repr__(self):
        return f"WeightedNorm(dim={self.dim}, weights={self.weights})"


def vector_norm(N: WeightedNorm, v):
    """Norm of v in the presentation N; None encodes the zero norm."""
    coords = N.coordinates(v)
    p = N.prime
    best = None
    for c, w in zip(coords, N.weights):
        if c == 0:
            continue
        g = w.shift(valuation(c, p))
        if best is None or g < best:
            best = g
    return best


# --- exact linear algebra over Q (unweighted) --------------------------------


def solve_in_span(basis, v):
    """Coefficients c with sum c_i basis_i = v, or None if inconsistent."""
    m = len(basis[0])
    n = len(basis)
    if len(v) != m:
        raise ValueError("ambient dimension mismatch")
    # augmented columns: basis vectors | v
    rows = [[basis[j][i] for j in range(n)] + [v[i]] for i in range(m)]
    piv_cols = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    coords = [Rat(0)] * n
    for i, col in enumerate(piv_cols):
        coords[col] = rows[i][n]
    return coords


def invert_matrix(rows):
    """Inverse of a square matrix given as a list of rows; None if singular."""
    n = len(rows)
    aug = [list(r) + [Rat(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [x / inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


# --- valuation-aware elimination ---------------------------------------------


class _LiveRow:
    __slots__ = ("data", "hist", "best", "index")

    def __init__(self, data, hist, index):
        self.data = data
        self.hist = hist
        self.index = index
        self.best = None  # (gamma_key, col, gamma)


class WeightedEchelon:
    """Gauss-Jordan form of a family of sparse rows under a diagonal norm.

    pivots is a list of (column, row_dict, weight) in extraction order; each
    row is normalized (coefficient 1 at its pivot column, zero at every
    other pivot column) and its pivot attains the row's norm, so the rows
    are an orthogonal basis of the span and the quotient norm is diagonal
    on the complement columns.
    """

    def __init__(self, prime: Prime, weight_of, pivots, dependents):
        self.prime = prime
        self.weight_of = weight_of
        self.pivots = pivots
        self.dependents = dependents
        self._by_col = {col: row for col, row, _ in pivots}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_columns(self):
        return [col for col, _, _ in self.pivots]

    def is_pivot(self, col) -> bool:
        return col in self._by_col

    def reduce(self, vec: dict) -> dict:
        """Minimizing coset representative: zero out all pivot coordinates."""
        out = dict(vec)
        for col, row, _ in self.pivots:
            c = out.get(col)
            if c:
                row_axpy(out, row, c)
        return out

    def reduced_value(self, vec: dict):
        """Quotient norm of the class of vec: Gauss value of its reduction."""
        red = self.reduce(vec)
        best = None
        p = self.prime
        for col, c in red.items():
            g = self.weight_of(col).shift(valuation(c, p))
            if best is None or g < best:
                best = g
        return best


def weighted_echelon(
    prime: Prime,
    rows,
    weight_of,
    on_dependent: str = "drop",
    reverse_ties: bool = False,
    track_relations: bool = False,
) -> WeightedEchelon:
    """Eliminate sparse rows, always pivoting on a term of maximal norm.

    The pivot is the (row, column) pair whose term norm |coeff|*p**(-w_col)
    is largest, i.e. whose value v_p(coeff) + w_col is smallest; ties go to
    the lowest column id then the lowest row index (both reversed under
    reverse_ties).  on_dependent: 'drop' collects vanishing rows, 'raise'
    raises DependentSpanError with the discovered relation.
    """
    track = track_relations or on_dependent == "raise"
    live = []
    for i, r in enumerate(rows):
        data = {k: rat(v) for k, v in r.items() if v != 0}
        hist = {i: Rat(1)} if track else None
        live.append(_LiveRow(data, hist, i))

    dependents = []

    def tie(col, idx):
        return (-col, -idx) if reverse_ties else (col, idx)

    def refresh(row: _LiveRow):
        best = None
        for col, c in row.data.items():
            g = weight_of(col).shift(valuation(c, prime))
            cand = (g._key(), tie(col, row.index)[0])
            if best is None or cand < best[0]:
                best = (cand, col, g)
        row.best = best

    active = []
    for row in live:
        if not row.data:
            dependents.append((row.index, row.hist))
            if on_dependent == "raise":
                raise DependentSpanError(
                    "dependent input rows (zero row)", relation=row.hist
                )
            continue
        refresh(row)
        active.append(row)

    pivots = []
    while active:
        best_row = min(
            active, key=lambda r: (r.best[0][0], r.best[0][1], tie(0, r.index)[1])
        )
        col = best_row.best[1]
        active.remove(best_row)
        inv = best_row.data[col]
        if inv != 1:
            best_row.data = {k: v / inv for k, v in best_row.data.items()}
            if track:
                best_row.hist = {k: v / inv for k, v in best_row.hist.items()}
        nxt = []
        for row in active:
            c = row.data.get(col)
            if c:
                row_axpy(row.data, best_row.data, c)
                if track:
                    row_axpy(row.hist, best_row.hist, c)
                if not row.data:
                    dependents.append((row.index, row.hist))
                    if on_dependent == "raise":
                        raise DependentSpanError(
                            "dependent input rows", relation=row.hist
                        )
                    continue
                refresh(row)
            nxt.append(row)
        active = nxt
        pivots.append((col, best_row))

    # back-substitution: make every pivot column private to its own row;
    # later rows are already clear at earlier pivot columns, so norms and
    # pivot attainment are preserved.
    for i in range(len(pivots) - 2, -1, -1):
        col_i, row_i = pivots[i]
        for j in range(i + 1, len(pivots)):
            col_j, row_j = pivots[j]
            c = row_i.data.get(col_j)
            if c:
                row_axpy(row_i.data, row_j.data, c)
                if track:
                    row_axpy(row_i.hist, row_j.hist, c)

    final = [(col, row.data, weight_of(col)) for col, row in pivots]
    return WeightedEchelon(prime, weight_of, final, dependents)


# --- the module operations ----------------------------------------------------


def orthogonalize(ambient: WeightedNorm, span, reverse_ties: bool = False) -> WeightedNorm:
    """Orthogonal presentation of span(vectors) inside the ambient norm.

    Zero vectors are stripped; a genuine dependency raises
    DependentSpanError carrying the discovered relation (coefficients
    indexed by position in the input list).
    """
    vecs = [kvector(v) for v in span]
    nonzero = [(i, v) for i, v in enumerate(vecs) if any(c != 0 for c in v)]
    if not nonzero:
        raise ValueError("span contains no nonzero vectors")
    coords = []
    for _, v in nonzero:
        coords.append(ambient.coordinates(v))
    rows = [{i: c for i, c in enumerate(cs) if c != 0} for cs in coords]

    def weight_of(i):
        return ambient.weights[i]

    try:
        ech = weighted_echelon(
            ambient.prime, rows, weight_of, on_dependent="raise",
            reverse_ties=reverse_ties,
        )
    except DependentSpanError as err:
        relation = [Rat(0)] * len(vecs)
        for local_idx, c in (err.relation or {}).items():
            relation[nonzero[local_idx][0]] = c
        raise DependentSpanError(str(err), relation=relation) from None

    basis = []
    weights = []
    m = ambient.ambient_len
    for col, row, w in ech.pivots:
        vec = [Rat(0)] * m
        for i, c in row.items():
            b = ambient.basis[i]
            for a in range(m):
                if b[a] != 0:
                    vec[a] += c * b[a]
        basis.append(tuple(vec))
        weights.append(w)
    return WeightedNorm(ambient.prime, basis, weights)


def quotient_norm(ambient: WeightedNorm, kernel, target_basis) -> WeightedNorm:
    """Quotient norm presentation on span(target classes) modulo span(kernel).

    The returned presentation lives in target coordinates: a class given by
    coordinates q (meaning sum q_t * class(target_t)) has quotient norm
    vector_norm of q.  The infimum over cosets is attained; minimizing
    lifts are the reductions against the eliminated kernel.
    """
    if not kernel:
        if len(target_basis) != ambient.dim:
            raise NotComplementaryError("target is not a basis of the quotient")
        coord_rows = [ambient.coordinates(t) for t in target_basis]
        inv = invert_matrix(coord_rows)
        if inv is None:
            raise NotComplementaryError("target classes are dependent")
        cols = [tuple(row[j] for row in inv) for j in range(ambient.dim)]
        return WeightedNorm(ambient.prime, cols, list(ambient.weights))

    kern_coords = [ambient.coordinates(v) for v in kernel]
    rows = [{i: c for i, c in enumerate(cs) if c != 0} for cs in kern_coords]

    def weight_of(i):
        return ambient.weights[i]

    try:
        ech = weighted_echelon(ambient.prime, rows, weight_of, on_dependent="raise")
    except DependentSpanError as err:
        raise DependentSpanError("kernel vectors are dependent", err.relation) from None

    complement = [i for i in range(ambient.dim) if not ech.is_pivot(i)]
    if len(target_basis) != len(complement):
        raise NotComplementaryError(
            f"target size {len(target_basis)} != quotient dimension {len(complement)}"
        )
    # reduced representative of each target class, read on complement columns
    reduced_rows = []
    for t in target_basis:
        red = ech.reduce(
            {i: c for i, c in enumerate(ambient.coordinates(t)) if c != 0}
        )
        reduced_rows.append([red.get(i, Rat(0)) for i in complement])
    inv = invert_matrix(reduced_rows)
    if inv is None:
        raise NotComplementaryError("target classes do not span the quotient")
    # row j of the inverse = class of complement coordinate j in target coordinates
    basis = [tuple(inv[j]) for j in range(len(complement))]
    weights = [ambient.weights[i] for i in complement]
    return WeightedNorm(ambient.prime, basis, weights)


def dual_norm(N: WeightedNorm) -> WeightedNorm:
    """Dual presentation: dual basis with negated weights.

    Requires a nondegenerate square presentation (basis spans the ambient
    coordinate space).  Applying it twice returns the original presentation.
    """
    if N.dim != N.ambient_len:
        raise ValueError("dual norm needs a square nondegenerate presentation")
    cols = [[N.basis[j][i] for j in range(N.dim)] for i in range(N.dim)]
    inv = invert_matrix(cols)
    if inv is None:
        raise ValueError("degenerate presentation")
    dual_basis = [tuple(inv[i]) for i in range(N.dim)]
    return WeightedNorm(N.prime, dual_basis, [-w for w in N.weights])
