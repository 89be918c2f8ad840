"""Exact symplectic linear algebra over the rationals.

Conventions fixed once for the whole package:

* the standard form on dimension 2n, in basis order
  (q_1..q_n, p_1..p_n), pairs ``omega(dq_i, dp_i) = +1``;
* the graph form of a Lagrangian plane L transverse to the vertical nu of a
  polarization (tau, nu) is the symmetric matrix M on tau with
  ``M[i][j] = omega(t_i, v_j)`` where ``t_j + v_j in L`` and ``v_j in nu``.
  In dimension 2 with tau = span(dq), nu = span(dp) the plane
  span(dq + c*dp) has graph form ``[c]``, so span(dq + dp) is the positive
  graph.

Everything here is exact: no floats, no tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import (
    F0,
    F1,
    Mat,
    is_positive_definite_minors,
    rat,
)


@dataclass(frozen=True)
class SymplecticSpace:
    """A 2n-dimensional vector space with an exact antisymmetric nondegenerate form.

    ``dim_half = 0`` is allowed so that symplectic quotients can degenerate
    to the zero space.
    """

    dim_half: int
    form: Mat

    def __post_init__(self):
        n = self.dim_half
        if n < 0:
            raise ValueError("dim_half must be >= 0")
        if self.form.shape != (2 * n, 2 * n):
            raise ValueError("form must be 2n x 2n")
        if not self.form.is_antisymmetric():
            raise ValueError("form must be antisymmetric")
        if n > 0 and self.form.det() == 0:
            raise ValueError("form must be nondegenerate")

    @staticmethod
    def standard(n: int) -> "SymplecticSpace":
        rows = [[F0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            rows[i][n + i] = F1
            rows[n + i][i] = -F1
        return SymplecticSpace(n, Mat(rows))

    @property
    def dim(self) -> int:
        return 2 * self.dim_half

    def pairing(self, u: Mat, v: Mat) -> Fraction:
        """omega(u, v) for column vectors u, v."""
        return (u.t() @ self.form @ v)[0, 0]


@dataclass(frozen=True)
class Subspace:
    """A subspace given by a basis matrix (columns span, full column rank)."""

    ambient: SymplecticSpace
    basis: Mat

    def __post_init__(self):
        if self.basis.nrows != self.ambient.dim:
            raise ValueError("basis rows must match ambient dimension")
        k = self.basis.ncols
        if k > self.ambient.dim:
            raise ValueError("too many basis vectors")
        if k and self.basis.rank() != k:
            raise ValueError("basis columns must be linearly independent")

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def contains(self, v: Mat) -> bool:
        if v.is_zero():
            return True
        if self.dim == 0:
            return False
        return self.basis.hstack(v).rank() == self.dim

    def equals(self, other: "Subspace") -> bool:
        """Span equality, decided by mutual rank tests."""
        if self.ambient.dim != other.ambient.dim or self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        return self.basis.hstack(other.basis).rank() == self.dim

    def omega_restriction(self) -> Mat:
        return self.basis.t() @ self.ambient.form @ self.basis


class LagrangianPlane(Subspace):
    """A half-dimensional subspace on which the form vanishes."""

    def __post_init__(self):
        super().__post_init__()
        if self.dim != self.ambient.dim_half:
            raise ValueError("a Lagrangian plane must have dimension n")
        if not self.omega_restriction().is_zero():
            raise ValueError("the form does not vanish on this subspace")


@dataclass(frozen=True)
class QuadraticForm:
    """A symmetric exact-rational matrix, evaluated as x^T M x."""

    dim: int
    matrix: Mat

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise ValueError("matrix shape must match dim")
        if not self.matrix.is_symmetric():
            raise ValueError("matrix must be symmetric")

    def value(self, x: Mat) -> Fraction:
        return (x.t() @ self.matrix @ x)[0, 0]

    def is_zero(self) -> bool:
        return self.matrix.is_zero()


# basic predicates ----------------------------------------------------------

def symplectic_complement(s: Subspace) -> Subspace:
    """W^perp = kernel of the pairing against W; dim 2n - dim W."""
    if s.dim == 0:
        return Subspace(s.ambient, Mat.identity(s.ambient.dim))
    constraints = s.basis.t() @ s.ambient.form  # k x 2n
    return Subspace(s.ambient, constraints.nullspace())


def is_isotropic(s: Subspace) -> bool:
    return s.omega_restriction().is_zero()


def is_coisotropic(s: Subspace) -> bool:
    perp = symplectic_complement(s)
    if perp.dim == 0:
        return True
    return s.basis.hstack(perp.basis).rank() == s.dim


def transverse(a: Subspace, b: Subspace) -> bool:
    """True iff the two subspaces together span the ambient space."""
    if a.ambient.dim != b.ambient.dim:
        raise ValueError("subspaces live in different ambient dimensions")
    if a.dim + b.dim < a.ambient.dim:
        return False
    return a.basis.hstack(b.basis).rank() == a.ambient.dim


def lagrangian(space: SymplecticSpace, columns) -> LagrangianPlane:
    return LagrangianPlane(space, columns if isinstance(columns, Mat) else Mat.from_cols(columns))


# symplectic reduction ------------------------------------------------------

class SymplecticReduction:
    """Reduction data for a coisotropic W: the quotient W / W^perp.

    Fixes once a basis of W extending a basis of W^perp; the completing
    vectors project to a basis of the quotient, and the induced form is
    omega evaluated on them.  All planes reduced through one instance land
    in the same coordinates, so they can be compared downstream.
    """

    def __init__(self, w: Subspace):
        if not is_coisotropic(w):
            raise ValueError("reduction requires a coisotropic subspace")
        self.w = w
        self.perp = symplectic_complement(w)
        space = w.ambient
        # extend perp basis to a basis of W by greedy column selection
        cols = list(self.perp.basis.cols()) if self.perp.dim else []
        chosen = []
        for c in w.basis.cols():
            trial = cols + chosen + [c]
            if Mat.from_cols(trial).rank() == len(trial):
                chosen.append(c)
        if len(cols) + len(chosen) != w.dim:
            raise AssertionError("failed to extend W^perp basis inside W")
        self.quotient_lifts = chosen  # vectors of W projecting to quotient basis
        self.w_basis = Mat.from_cols(cols + chosen) if (cols or chosen) else Mat([[] for _ in range(space.dim)])
        k = len(chosen)
        if k % 2 != 0:
            raise AssertionError("quotient of a coisotropic by its perp is even-dimensional")
        rows = [[F0] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                rows[i][j] = space.pairing(Mat.col_vector(chosen[i]), Mat.col_vector(chosen[j]))
        self.reduced_space = SymplecticSpace(k // 2, Mat(rows))

    def reduce_subspace(self, s: Subspace) -> Subspace:
        """[S]^W = (S intersect W + W^perp) / W^perp in quotient coordinates."""
        space = self.w.ambient
        gens = []
        if s.dim and self.w.dim:
            # S intersect W: nullspace of [B_S | -B_W]
            combo = s.basis.hstack(-self.w.basis).nullspace()
            for c in combo.cols():
                v = s.basis @ Mat.col_vector(c[: s.dim])
                gens.append(v)
        nperp = self.perp.dim
        k = len(self.quotient_lifts)
        qcols = []
        for v in gens:
            coords = self.w_basis.solve(v) if self.w_basis.ncols else None
            if coords is None:
                raise AssertionError("intersection vector not in W")
            qcols.append(tuple(coords.col(0))[nperp : nperp + k])
        if not qcols:
            return Subspace(self.reduced_space, Mat([[] for _ in range(k)]))
        m = Mat.from_cols(qcols)
        # column-reduce to an independent spanning set
        r, pivots = m.t().rref()
        rows = [r.rows[i] for i in range(len(pivots))]
        basis = Mat(rows).t() if rows else Mat([[] for _ in range(k)])
        return Subspace(self.reduced_space, basis)

    def reduce_lagrangian(self, plane: Subspace) -> LagrangianPlane:
        red = self.reduce_subspace(plane)
        return LagrangianPlane(red.ambient, red.basis)


def reduce(plane: Subspace, w: Subspace) -> LagrangianPlane:
    """Symplectic reduction [L]^W of a Lagrangian plane by a coisotropic W.

    Rank drop in L intersect W is absorbed by the quotient: the result is
    always Lagrangian in the reduced space.
    """
    return SymplecticReduction(w).reduce_lagrangian(plane)


# graph forms ---------------------------------------------------------------

def _check_polarization(tau: LagrangianPlane, nu: LagrangianPlane):
    if not transverse(tau, nu):
        raise ValueError("(tau, nu) is not a polarization: not transverse")


def graph_form(L: LagrangianPlane, tau: LagrangianPlane, nu: LagrangianPlane) -> QuadraticForm:
    """The quadratic form on tau whose differential's graph is L.

    For each basis vector t_j of tau solve t_j + v_j in L with v_j in nu;
    the matrix is M[i][j] = omega(t_i, v_j), symmetric because L is
    Lagrangian.  Requires L transverse to nu.
    """
    _check_polarization(tau, nu)
    if not transverse(L, nu):
        raise ValueError("graph form undefined: L is not transverse to nu")
    space = L.ambient
    n = space.dim_half
    # solve [B_L | -B_nu] [a; b] = t_j  =>  v_j = B_nu b
    system = L.basis.hstack(-nu.basis)
    sols = system.solve(tau.basis)
    if sols is None:
        raise AssertionError("transverse solve failed")
    vparts = nu.basis @ Mat([sols.rows[i] for i in range(n, 2 * n)])
    m = tau.basis.t() @ space.form @ vparts
    if not m.is_symmetric():
        raise AssertionError("graph form came out asymmetric; inputs not Lagrangian?")
    return QuadraticForm(n, m)


def plane_from_graph_form(matrix: Mat | QuadraticForm, tau: LagrangianPlane, nu: LagrangianPlane) -> LagrangianPlane:
    """Inverse of graph_form: the plane over tau whose graph form is the given matrix."""
    m = matrix.matrix if isinstance(matrix, QuadraticForm) else matrix
    _check_polarization(tau, nu)
    space = tau.ambient
    n = space.dim_half
    if m.shape != (n, n) or not m.is_symmetric():
        raise ValueError("graph matrix must be symmetric n x n")
    g = tau.basis.t() @ space.form @ nu.basis  # pairing tau x nu, invertible
    x = g.inverse() @ m
    cols = []
    for j in range(n):
        v = [tau.basis.rows[i][j] for i in range(2 * n)]
        w = nu.basis @ Mat.col_vector(x.col(j))
        cols.append([a + w.rows[i][0] for i, a in enumerate(v)])
    return lagrangian(space, cols)


def is_positive_definite(q: QuadraticForm) -> bool:
    """Sylvester criterion on leading principal minors, exact arithmetic."""
    return is_positive_definite_minors(q.matrix)


def lagrangian_complement(L: LagrangianPlane) -> LagrangianPlane:
    """A Lagrangian plane transverse to L, built deterministically.

    Take any linear complement C, then shear it back onto a Lagrangian:
    H = {c + phi(c)} where omega(c, phi(c')) = -omega(c, c')/2 under the
    perfect pairing between C and L.
    """
    space = L.ambient
    n = space.dim_half
    if n == 0:
        return LagrangianPlane(space, Mat([]))
    cols = list(L.basis.cols())
    comp = []
    for j in range(2 * n):
        e = [F1 if i == j else F0 for i in range(2 * n)]
        trial = cols + comp + [tuple(e)]
        if Mat.from_cols(trial).rank() == len(trial):
            comp.append(tuple(e))
        if len(comp) == n:
            break
    c = Mat.from_cols(comp)
    # pairing P[i][k] = omega(c_i, l_k) is invertible
    p = c.t() @ space.form @ L.basis
    beta = c.t() @ space.form @ c
    # phi columns: solve P y_j = -beta_col_j / 2
    y = p.inverse() @ beta.scale(Fraction(-1, 2))
    h = []
    for j in range(n):
        shear = L.basis @ Mat.col_vector(y.col(j))
        h.append([a + shear.rows[i][0] for i, a in enumerate(c.col(j))])
    return lagrangian(space, h)
