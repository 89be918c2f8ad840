"""Exact rational matrices.

Small kernel used by every exact module: immutable matrices over exact
rationals, Gaussian elimination, and the definiteness tests (Sylvester
minors and an independent LDL^T-style elimination) that the positivity
layer cross-checks against each other.

Scalars are ``gmpy2.mpq`` when available (several times faster), with a
transparent ``fractions.Fraction`` fallback; both are exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

try:
    from gmpy2 import mpq as _mk_rat
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    _mk_rat = Fraction

Rat = _mk_rat
_RAT_TYPE = type(_mk_rat(0))
F0 = _mk_rat(0)
F1 = _mk_rat(1)


def rat(x):
    """Coerce ints, "p/q" strings, Fractions and mpq to the exact scalar type."""
    if type(x) is _RAT_TYPE:
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(x, (int, str, Fraction)):
        return _mk_rat(x)
    if isinstance(x, _RAT_TYPE):
        return x
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Mat:
    """Immutable exact rational matrix."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rs = tuple(
            tuple(x if type(x) is _RAT_TYPE else rat(x) for x in row) for row in rows
        )
        if rs:
            w = len(rs[0])
            if any(len(r) != w for r in rs):
                raise ValueError("ragged rows")
        object.__setattr__(self, "rows", rs)

    def __setattr__(self, *a):
        raise AttributeError("Mat is immutable")

    # construction -----------------------------------------------------
    @staticmethod
    def zeros(r: int, c: int) -> "Mat":
        return Mat([[F0] * c for _ in range(r)])

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat([[F1 if i == j else F0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_cols(cols: Sequence[Sequence]) -> "Mat":
        cols = [tuple(rat(x) for x in c) for c in cols]
        if not cols:
            raise ValueError("from_cols needs the row count; use zeros")
        r = len(cols[0])
        return Mat([[c[i] for c in cols] for i in range(r)])

    @staticmethod
    def col_vector(entries: Sequence) -> "Mat":
        return Mat([[rat(x)] for x in entries])

    # shape ------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def cols(self) -> list[tuple[Fraction, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    # algebra ------------------------------------------------------------
    def t(self) -> "Mat":
        return Mat(zip(*self.rows)) if self.rows else self

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows])

    def scale(self, s) -> "Mat":
        s = rat(s)
        return Mat([[s * a for a in r] for r in self.rows])

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        bt = list(zip(*other.rows)) if other.rows else []
        out = []
        for ra in self.rows:
            out.append([sum(a * b for a, b in zip(ra, col) if a) for col in bt])
        return Mat(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Mat[{body}]"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def is_antisymmetric(self) -> bool:
        n = self.nrows
        return n == self.ncols and all(
            self.rows[i][j] == -self.rows[j][i] for i in range(n) for j in range(i + 1)
        )

    def hstack(self, other: "Mat") -> "Mat":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Mat([ra + rb for ra, rb in zip(self.rows, other.rows)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self.rows[i][j] for j in cols] for i in rows])

    # elimination --------------------------------------------------------
    def rref(self) -> tuple["Mat", tuple[int, ...]]:
        """Reduced row echelon form and pivot column indices."""
        m = [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        pivots = []
        pr = 0
        for pc in range(nc):
            piv = next((i for i in range(pr, nr) if m[i][pc] != 0), None)
            if piv is None:
                continue
            m[pr], m[piv] = m[piv], m[pr]
            inv = 1 / m[pr][pc]
            m[pr] = [x * inv for x in m[pr]]
            for i in range(nr):
                if i != pr and m[i][pc] != 0:
                    f = m[i][pc]
                    m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
            pivots.append(pc)
            pr += 1
            if pr == nr:
                break
        return Mat(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> "Mat":
        """Matrix whose columns span the kernel (ncols x nullity)."""
        R, pivots = self.rref()
        nc = self.ncols
        free = [j for j in range(nc) if j not in pivots]
        cols = []
        for f in free:
            v = [F0] * nc
            v[f] = F1
            for r, p in enumerate(pivots):
                v[p] = -R.rows[r][f]
            cols.append(v)
        if not cols:
            return Mat([[] for _ in range(nc)]) if nc else Mat([])
        return Mat.from_cols(cols)

    def solve(self, b: "Mat") -> "Mat | None":
        """One exact solution of self @ x = b, or None if inconsistent."""
        aug = self.hstack(b)
        R, pivots = aug.rref()
        nc = self.ncols
        if any(p >= nc for p in pivots):
            return None
        xcols = []
        for k in range(b.ncols):
            x = [F0] * nc
            for r, p in enumerate(pivots):
                x[p] = R.rows[r][nc + k]
            xcols.append(x)
        return Mat.from_cols(xcols) if xcols else Mat([[] for _ in range(nc)])

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        if n == 0:
            return F1
        m = [list(r) for r in self.rows]
        d = F1
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return F0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d *= m[c][c]
            inv = 1 / m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def inverse(self) -> "Mat":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of non-square matrix")
        R, pivots = self.hstack(Mat.identity(n)).rref()
        if len(pivots) != n or any(p >= n for p in pivots):
            raise ValueError("matrix is singular")
        return Mat([r[n:] for r in R.rows])


# definiteness --------------------------------------------------------------

def leading_principal_minors(a: Mat) -> list[Fraction]:
    n = a.nrows
    return [a.submatrix(range(k), range(k)).det() for k in range(1, n + 1)]


def is_positive_definite_minors(a: Mat) -> bool:
    """Sylvester test: every leading principal minor is positive."""
    if not a.is_symmetric():
        raise ValueError("definiteness test needs a symmetric matrix")
    return all(d > 0 for d in leading_principal_minors(a))


def is_positive_definite_ldl(a: Mat) -> bool:
    """Independent oracle: symmetric elimination, all pivots positive."""
    if not a.is_symmetric():
        raise ValueError("definiteness test needs a symmetric matrix")
    n = a.nrows
    m = [list(r) for r in a.rows]
    for k in range(n):
        p = m[k][k]
        if p <= 0:
            return False
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / p
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
        for i in range(k + 1, n):
            m[k][i] = F0
            m[i][k] = F0
    return True


def is_positive_semidefinite(a: Mat) -> bool:
    """Exact PSD test by symmetric elimination with diagonal pivoting."""
    if not a.is_symmetric():
        raise ValueError("definiteness test needs a symmetric matrix")
    m = [list(r) for r in a.rows]
    active = list(range(a.nrows))
    while active:
        if any(m[i][i] < 0 for i in active):
            return False
        k = next((i for i in active if m[i][i] > 0), None)
        if k is None:
            # zero diagonal on a PSD matrix forces zero off-diagonals
            return all(m[i][j] == 0 for i in active for j in active)
        active.remove(k)
        p = m[k][k]
        for i in active:
            if m[i][k] != 0:
                f = m[i][k] / p
                for j in active:
                    m[i][j] -= f * m[k][j]
    return True


def non_positive_direction(a: Mat) -> Mat | None:
    """A column vector x with x^T a x <= 0, or None when a is positive definite.

    Tracks the congruence transform through the elimination so the witness
    is exact in the original coordinates.
    """
    if not a.is_symmetric():
        raise ValueError("definiteness test needs a symmetric matrix")
    n = a.nrows
    m = [list(r) for r in a.rows]
    # basis[j] = original-coordinate vector currently representing e_j
    basis = [[F1 if i == j else F0 for i in range(n)] for j in range(n)]

    def vec(j):
        return Mat.col_vector(basis[j])

    for k in range(n):
        p = m[k][k]
        if p < 0:
            return vec(k)
        if p == 0:
            l = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
            if l is None:
                return vec(k)  # null direction, x^T a x = 0
            # block [[0, b], [b, d]] is indefinite: pick t with 2bt + d < 0
            b, d = m[k][l], m[l][l]
            t = (-d - 1) / (2 * b)
            w = [t * u + v for u, v in zip(basis[k], basis[l])]
            return Mat.col_vector(w)
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / p
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
                m[k][i] = m[i][k] = F0
                # column op on the tracked basis: e_i <- e_i - f e_k
                basis[i] = [u - f * v for u, v in zip(basis[i], basis[k])]
    return None


def gershgorin_lower_bound(a: Mat) -> Fraction:
    """Exact rational lower bound for the smallest eigenvalue."""
    if not a.is_symmetric():
        raise ValueError("needs a symmetric matrix")
    bounds = []
    for i, row in enumerate(a.rows):
        off = sum(abs(x) for j, x in enumerate(row) if j != i)
        bounds.append(row[i] - off)
    return min(bounds) if bounds else F0
