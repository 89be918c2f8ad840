"""A-type local models: the canonical flag, classification of compatible
symplectic forms by sign vectors, linear normalization of stabilized pairs,
ridge models, and simple front scenes for rendering.

Coordinates for the extended A-model in dimension 2n are ordered
(x_0..x_{n-1}, p_0..p_{n-1}).  The canonical flag is
``V_i = span(dx_{n-1}, ..., dx_{n-i})`` for i <= n and
``V_{n+j} = span(all dx) + span(dp_0, ..., dp_{j-1})``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rational import F0, F1, Mat, rat
from .symplin import LagrangianPlane, SymplecticSpace, lagrangian


@dataclass(frozen=True)
class FlagData:
    """A full flag V_1 c ... c V_{2n-1} in a 2n-dimensional space."""

    space: SymplecticSpace
    subspaces: tuple[Mat, ...]  # bases of V_1 .. V_{2n-1}

    def __post_init__(self):
        dim = self.space.dim
        if len(self.subspaces) != dim - 1:
            raise ValueError("a full flag lists V_1 .. V_{2n-1}")
        prev = None
        for i, b in enumerate(self.subspaces, start=1):
            if b.nrows != dim or b.ncols != i or b.rank() != i:
                raise ValueError(f"V_{i} must have dimension {i}")
            if prev is not None and prev.hstack(b).rank() != i:
                raise ValueError(f"V_{i-1} is not contained in V_{i}")
            prev = b

    @property
    def n(self) -> int:
        return self.space.dim_half

    def v(self, i: int) -> Mat:
        """Basis of V_i (V_0 empty, V_2n full)."""
        if i == 0:
            return Mat([[] for _ in range(self.space.dim)])
        if i == self.space.dim:
            return Mat.identity(self.space.dim)
        return self.subspaces[i - 1]


def canonical_flag(n: int) -> FlagData:
    """The flag of the extended A-model in T*R^n."""
    space = SymplecticSpace.standard(n)
    dim = 2 * n

    def e(j):
        return [F1 if i == j else F0 for i in range(dim)]

    subs = []
    cols: list = []
    for i in range(1, n + 1):
        cols.append(e(n - i))
        subs.append(Mat.from_cols(list(cols)))
    for j in range(1, n):
        cols.append(e(n + j - 1))
        subs.append(Mat.from_cols(list(cols)))
    return FlagData(space, tuple(subs[: dim - 1]))


@dataclass(frozen=True)
class FlagRejection:
    """Names the first flag-compatibility condition a form violates."""

    condition: str


def _isotropic(omega: Mat, basis: Mat) -> bool:
    return (basis.t() @ omega @ basis).is_zero()


def _perp_basis(omega: Mat, basis: Mat) -> Mat:
    return (basis.t() @ omega).nullspace()


def omega_component(omega: Mat, flag: FlagData):
    """Sign vector classifying the component of the form among those
    compatible with the flag, or a FlagRejection naming the first failure.

    Compatibility: V_j isotropic for j <= n, coisotropic for j >= n and
    V_j-perp = V_{2n-j}.  In a basis adapted to the flag the form has
    antidiagonal block A whose n corner pivots are nonzero; their signs
    are the classifier (they orient the quotients V_{2n-j}/V_j).
    """
    dim = flag.space.dim
    n = flag.n
    if omega.shape != (dim, dim):
        raise ValueError("form has wrong shape")
    if not omega.is_antisymmetric():
        raise ValueError("form must be antisymmetric")
    if omega.det() == 0:
        raise ValueError("form must be nondegenerate")
    for j in range(1, n + 1):
        if not _isotropic(omega, flag.v(j)):
            return FlagRejection(f"V_{j} is not isotropic")
    for j in range(1, n + 1):
        perp = _perp_basis(omega, flag.v(j))
        vj2 = flag.v(2 * n - j)
        if perp.ncols != 2 * n - j or perp.hstack(vj2).rank() != 2 * n - j:
            return FlagRejection(f"V_{j}-perp is not V_{2*n-j}")
    # coisotropy of V_j for j >= n follows from the perp condition; check anyway
    for j in range(n, 2 * n):
        vj = flag.v(j)
        perp = _perp_basis(omega, vj)
        if perp.ncols and perp.hstack(vj).rank() != vj.ncols:
            return FlagRejection(f"V_{j} is not coisotropic")
    u, a = adapted_block_data(omega, flag)
    signs = []
    for i in range(n):
        piv = a[i, n - 1 - i]
        if piv == 0:
            return FlagRejection(f"degenerate pairing at V_{i+1}")
        signs.append(1 if piv > 0 else -1)
    return tuple(signs)


def adapted_block_data(omega: Mat, flag: FlagData) -> tuple[Mat, Mat]:
    """Adapted basis U and block A with U^T omega U = [[0, A], [-A^T, 0]].

    U's first n columns run through the flag increments of V_1..V_n, the
    rest through V_{n+1}..V_{2n} corrected inside the flag so the second
    diagonal block vanishes; A is zero strictly above its antidiagonal.
    """
    dim = flag.space.dim
    n = flag.n
    cols: list[tuple] = []
    for i in range(1, dim + 1):
        vi = flag.v(i)
        for c in vi.cols():
            trial = cols + [c]
            if Mat.from_cols(trial).rank() == len(trial):
                cols.append(c)
                break
        else:
            raise AssertionError("flag increment extraction failed")

    def pair(u, v):
        return (Mat.col_vector(u).t() @ omega @ Mat.col_vector(v))[0, 0]

    # zero out pairings among the second-half vectors using x-directions
    for j in range(2, n + 1):  # 1-indexed over u_{n+j}
        for i in range(1, j):
            beta = pair(cols[n + j - 1], cols[n + i - 1])
            if beta == 0:
                continue
            k = n - i + 1  # antidiagonal partner of u_{n+i}
            denom = pair(cols[k - 1], cols[n + i - 1])
            if denom == 0:
                raise AssertionError("antidiagonal pivot vanished during correction")
            f = beta / denom
            cols[n + j - 1] = tuple(x - f * y for x, y in zip(cols[n + j - 1], cols[k - 1]))
    u = Mat.from_cols(cols)
    m = u.t() @ omega @ u
    a = m.submatrix(range(n), range(n, 2 * n))
    return u, a


def form_with_signs(n: int, signs, subdiag=None, lower_right=None) -> Mat:
    """A member of the flag-compatible class with the prescribed sign vector.

    Freedom below the antidiagonal of the pairing block and in the
    antisymmetric momentum-momentum block is exposed for test generators.
    """
    signs = tuple(signs)
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be a vector of +-1 of length n")
    a = [[F0] * n for _ in range(n)]
    for i in range(n):
        a[i][n - 1 - i] = Fraction(signs[i])
    if subdiag:
        for (i, j), val in subdiag.items():
            if i + j < n - 1:
                raise ValueError("entries strictly above the antidiagonal must vanish")
            if i + j == n - 1:
                raise ValueError("use signs for antidiagonal entries")
            a[i][j] = rat(val)
    d = [[F0] * n for _ in range(n)]
    if lower_right:
        for (i, j), val in lower_right.items():
            d[i][j] = rat(val)
            d[j][i] = -rat(val)
    amat = Mat(a)
    rows = []
    for i in range(n):
        rows.append([F0] * n + list(amat.rows[i]))
    for i in range(n):
        rows.append([-amat.rows[j][i] for j in range(n)] + d[i])
    m_adapted = Mat(rows)
    # adapted basis of the canonical flag is a permutation of coordinates
    flag = canonical_flag(n)
    u0 = Mat.from_cols([flag_increment for flag_increment in _canonical_adapted_cols(n)])
    u0inv = u0.inverse()
    return u0inv.t() @ m_adapted @ u0inv


def _canonical_adapted_cols(n: int):
    dim = 2 * n
    cols = []
    for i in range(1, n + 1):  # x_{n-1}, x_{n-2}, ..., x_0
        j = n - i
        cols.append([F1 if r == j else F0 for r in range(dim)])
    for j in range(n):  # p_0, p_1, ...
        cols.append([F1 if r == n + j else F0 for r in range(dim)])
    return cols


def same_orientation_structure(omega0: Mat, omega1: Mat, flag: FlagData) -> bool:
    """Equal sign vectors, i.e. same connected component of compatible forms."""
    s0 = omega_component(omega0, flag)
    s1 = omega_component(omega1, flag)
    if isinstance(s0, FlagRejection):
        raise ValueError(f"omega0 rejected: {s0.condition}")
    if isinstance(s1, FlagRejection):
        raise ValueError(f"omega1 rejected: {s1.condition}")
    return s0 == s1


def convex_interpolation_check(omega0: Mat, omega1: Mat, flag: FlagData, samples: int) -> bool:
    """Exact check that the segment between two same-component forms stays
    nondegenerate and flag-compatible at rational sample times.

    By convexity of the components a failure is an implementation bug,
    never expected behavior.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if not same_orientation_structure(omega0, omega1, flag):
        raise ValueError("forms lie in different components (sign vectors differ)")
    for i in range(samples):
        t = Fraction(i, samples - 1)
        omega_t = omega0.scale(1 - t) + omega1.scale(t)
        if omega_t.det() == 0:
            return False
        if isinstance(omega_component(omega_t, flag), FlagRejection):
            return False
    return True


# stabilized normalization ---------------------------------------------------

def _block_indices(n_t: int, d: int):
    b1 = list(range(2 * n_t))
    f = list(range(2 * n_t, 2 * n_t + d))
    g = list(range(2 * n_t + d, 2 * n_t + 2 * d))
    return b1, f, g


def standard_stabilized_form(n_t: int, d: int) -> Mat:
    """Block diagonal standard form on R^{2n_T} x (R^d x R^d)."""
    dim = 2 * n_t + 2 * d
    rows = [[F0] * dim for _ in range(dim)]
    for i in range(n_t):
        rows[i][n_t + i] = F1
        rows[n_t + i][i] = -F1
    for i in range(d):
        rows[2 * n_t + i][2 * n_t + d + i] = F1
        rows[2 * n_t + d + i][2 * n_t + i] = -F1
    return Mat(rows)


def _model_planes(n_t: int, d: int) -> list[list[int]]:
    """Coordinate index sets of the model piece tangents, stabilized by the base.

    P_j swaps the first j base directions of the A-model for the first j
    momentum directions: x_j..x_{n-1}, p_0..p_{j-1}, plus the stabilization
    base block.
    """
    base = list(range(2 * n_t, 2 * n_t + d))
    planes = []
    for j in range(n_t + 1):
        idx = list(range(j, n_t)) + [n_t + i for i in range(j)] + base
        planes.append(idx)
    return planes


def _check_model_lagrangian(omega: Mat, n_t: int, d: int, name: str):
    dim = 2 * n_t + 2 * d
    if omega.shape != (dim, dim) or not omega.is_antisymmetric() or omega.det() == 0:
        raise ValueError(f"{name} is not a symplectic form of dimension {dim}")
    for j, idx in enumerate(_model_planes(n_t, d)):
        sub = omega.submatrix(idx, idx)
        if not sub.is_zero():
            raise ValueError(f"{name} does not make model piece {j} isotropic")


def normalize_stabilized_pair(omega0: Mat, omega1: Mat, n_t: int, d: int, free_block: Mat | None = None) -> Mat:
    """The linear map fixing the stabilized model and matching the two forms
    on the stabilization pairings.

    Psi is the identity on the span E of the model; on the complementary
    fiber directions it is the unique correction (with the free symmetric
    block set to zero, or to ``free_block``) such that pairings of fiber
    vectors against everything agree with the first form.
    """
    _check_model_lagrangian(omega0, n_t, d, "omega0")
    _check_model_lagrangian(omega1, n_t, d, "omega1")
    b1, f, g = _block_indices(n_t, d)
    dim = 2 * n_t + 2 * d
    if d == 0:
        return Mat.identity(dim)

    def col(i):
        return Mat.col_vector([F1 if r == i else F0 for r in range(dim)])

    def w(omega, i, j):
        return omega[i, j]

    # C: fiber-to-fiber block from the base pairings
    m1 = Mat([[w(omega1, g[k], f[i]) for k in range(d)] for i in range(d)])
    m0 = Mat([[w(omega0, g[j], f[i]) for j in range(d)] for i in range(d)])
    if m1.det() == 0 or m0.det() == 0:
        raise ValueError("base/fiber pairing degenerate; not a stabilized pair")
    c = m1.inverse() @ m0

    # delta1: correction inside the model block
    w1_b1 = Mat([[w(omega1, b1[r], b1[l]) for r in range(2 * n_t)] for l in range(2 * n_t)])
    if 2 * n_t and w1_b1.det() == 0:
        raise ValueError("omega1 degenerates on the model block")
    delta1_cols = []
    for j in range(d):
        rhs = []
        for l in range(2 * n_t):
            cg = sum(c[k, j] * w(omega1, g[k], b1[l]) for k in range(d))
            rhs.append(w(omega0, g[j], b1[l]) - cg)
        if 2 * n_t:
            y = w1_b1.solve(Mat.col_vector(rhs))
            delta1_cols.append(tuple(y.col(0)))
        else:
            delta1_cols.append(tuple())

    def psi_tilde_col(j):
        v = [F0] * dim
        for k in range(d):
            v[g[k]] += c[k, j]
        for r in range(2 * n_t):
            v[b1[r]] += delta1_cols[j][r] if delta1_cols[j] else F0
        return Mat.col_vector(v)

    tilde = [psi_tilde_col(j) for j in range(d)]

    def pair1(u, v):
        return (u.t() @ omega1 @ v)[0, 0]

    t = Mat([[pair1(tilde[j], tilde[l]) - w(omega0, g[j], g[l]) for l in range(d)] for j in range(d)])
    if not t.is_antisymmetric():
        raise AssertionError("fiber residual pairing should be antisymmetric")
    s = t.scale(Fraction(-1, 2))
    if free_block is not None:
        if free_block.shape != (d, d) or not free_block.is_symmetric():
            raise ValueError("free_block must be symmetric d x d")
        s = s + free_block
    # P[j][i] = omega1(psi~ g_j, f_i) equals omega0(g_j, f_i) by construction
    p = Mat([[pair1(tilde[j], col(f[i])) for i in range(d)] for j in range(d)])
    x = p.inverse() @ s

    cols = []
    for i in range(dim):
        if i in g:
            j = g.index(i)
            v = [tilde[j].rows[r][0] for r in range(dim)]
            for fi in range(d):
                v[f[fi]] += x[fi, j]
            cols.append(v)
        else:
            cols.append([F1 if r == i else F0 for r in range(dim)])
    return Mat.from_cols(cols)


def stabilized_pair_residuals(psi: Mat, omega0: Mat, omega1: Mat, n_t: int, d: int) -> dict[str, Fraction]:
    """Exact residuals of the normalization contract; all should be zero.

    'model_identity': Psi restricted to the model span E;
    'base_pairings': pairings of any vector against base directions;
    'fiber_pairings': pairings of fiber vectors against fiber and model
    directions.
    """
    b1, f, g = _block_indices(n_t, d)
    dim = 2 * n_t + 2 * d
    pulled = psi.t() @ omega1 @ psi
    res = {"model_identity": F0, "base_pairings": F0, "fiber_pairings": F0}
    e_idx = b1 + f
    for i in e_idx:
        for r in range(dim):
            want = F1 if r == i else F0
            res["model_identity"] = max(res["model_identity"], abs(psi[r, i] - want))
    for i in f:
        for v in range(dim):
            res["base_pairings"] = max(res["base_pairings"], abs(pulled[v, i] - omega0[v, i]))
    for i in g:
        for v in g + b1:
            res["fiber_pairings"] = max(res["fiber_pairings"], abs(pulled[i, v] - omega0[i, v]))
    return res


# ridge models ---------------------------------------------------------------

@dataclass(frozen=True)
class RidgeModel:
    """The product of k ridge corners with an (n-k)-dimensional zero section."""

    k: int
    n: int

    def __post_init__(self):
        if not (0 <= self.k <= self.n):
            raise ValueError("need 0 <= k <= n")


def _classify_point(model: RidgeModel, point) -> list[str]:
    """Per-factor stratum: 'q' leg, 'p' leg, 'corner', or 'base'."""
    coords = [rat(x) for x in point]
    if len(coords) != 2 * model.n:
        raise ValueError("point must have 2n coordinates (q_1..q_n, p_1..p_n)")
    q = coords[: model.n]
    p = coords[model.n :]
    strata = []
    for i in range(model.n):
        if i < model.k:
            if q[i] < 0 or p[i] < 0 or q[i] * p[i] != 0:
                raise ValueError(f"point is off the model in ridge factor {i + 1}")
            if q[i] == 0 and p[i] == 0:
                strata.append("corner")
            elif p[i] == 0:
                strata.append("q")
            else:
                strata.append("p")
        else:
            if p[i] != 0:
                raise ValueError(f"point is off the zero section in factor {i + 1}")
            strata.append("base")
    return strata


def ridge_stratify(model: RidgeModel, point) -> int:
    """The ridge order at the point: the number of corner factors."""
    return sum(1 for s in _classify_point(model, point) if s == "corner")


def ridge_tangent_planes(model: RidgeModel, point) -> list[LagrangianPlane]:
    """Tangent planes of the local smooth pieces through the point.

    Each corner factor contributes both its q-line and p-line, so an
    order-j stratum carries exactly 2^j planes; the deepest corner of the
    full ridge carries the 2^n coordinate Lagrangians.
    """
    strata = _classify_point(model, point)
    n = model.n
    space = SymplecticSpace.standard(n)
    options = []
    for i, s in enumerate(strata):
        if s == "corner":
            options.append((i, ("q", "p")))
        elif s == "p":
            options.append((i, ("p",)))
        else:
            options.append((i, ("q",)))
    planes = []
    import itertools

    for choice in itertools.product(*(opt for (_, opt) in options)):
        cols = []
        for (i, _), which in zip(options, choice):
            j = i if which == "q" else n + i
            cols.append([F1 if r == j else F0 for r in range(2 * n)])
        planes.append(lagrangian(space, cols))
    return planes


# front scenes ---------------------------------------------------------------

@dataclass(frozen=True)
class ScenePath:
    label: str
    points: tuple[tuple[float, float], ...]
    kind: str = "curve"  # curve | arrow


@dataclass(frozen=True)
class FrontScene:
    model: str
    orientation: int
    paths: tuple[ScenePath, ...]
    viewbox: tuple[float, float, float, float] = (-1.5, -1.5, 3.0, 3.0)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "model": self.model,
            "orientation": self.orientation,
            "viewbox": list(self.viewbox),
            "paths": [
                {"label": p.label, "kind": p.kind, "points": [[float(x), float(y)] for (x, y) in p.points]}
                for p in self.paths
            ],
        }

    def to_svg(self) -> str:
        x0, y0, w, h = self.viewbox
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="400" height="400" '
            f'viewBox="{x0:.4f} {y0:.4f} {w:.4f} {h:.4f}">',
            f'<!-- model={self.model} orientation={self.orientation} -->',
        ]
        for p in self.paths:
            pts = " ".join(f"{x:.4f},{-y:.4f}" for (x, y) in p.points)
            color = "#c0392b" if p.kind == "arrow" else "#2c3e50"
            width = 0.02 if p.kind == "arrow" else 0.03
            lines.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="{width:.3f}" points="{pts}">'
                f"<title>{p.label}</title></polyline>"
            )
        lines.append("</svg>")
        return "\n".join(lines) + "\n"


def _arrow(label: str, base: tuple[float, float], tip: tuple[float, float]) -> ScenePath:
    bx, by = base
    tx, ty = tip
    dx, dy = tx - bx, ty - by
    import math

    ln = math.hypot(dx, dy) or 1.0
    ux, uy = dx / ln, dy / ln
    head = 0.08
    left = (tx - head * (ux - 0.6 * uy), ty - head * (uy + 0.6 * ux))
    right = (tx - head * (ux + 0.6 * uy), ty - head * (uy - 0.6 * ux))
    return ScenePath(label, (base, tip, left, tip, right), kind="arrow")


_MODEL_ALIASES = {
    "a2": "a2",
    "a3": "a3",
    "a2_times_interval": "a2xI",
    "a2xi": "a2xI",
    "ridge": "ridge1",
    "ridge1": "ridge1",
    "ridge2": "ridge2",
}


def render_front(model: str, orientation_choice: int = 0, out: str | None = None) -> FrontScene:
    """Build the front scene for a supported local model and optionally write SVG.

    ``orientation_choice`` selects among the finitely many orientation
    classes by flipping coorientation arrows (one bit per root edge of the
    model's tree).
    """
    key = _MODEL_ALIASES.get(model.lower())
    if key is None:
        raise ValueError(f"unknown model {model!r}")
    bit = 1 if (orientation_choice & 1) else 0
    sgn = -1.0 if bit else 1.0
    paths: list[ScenePath] = []
    if key == "a2":
        paths.append(ScenePath("zero section", ((-1.2, 0.0), (1.2, 0.0))))
        paths.append(ScenePath("conormal ray", ((0.0, 0.0), (0.0, 1.1 * sgn))))
        paths.append(_arrow("coorientation", (0.0, 0.0), (0.35 * sgn, 0.0)))
    elif key == "a3":
        import numpy as _np

        xs = _np.linspace(0.0, 1.1, 40)
        front = tuple((float(x), float(x * x)) for x in xs)
        paths.append(ScenePath("zero section (base)", ((-1.2, -1.2), (1.2, -1.2), (1.2, 1.2), (-1.2, 1.2), (-1.2, -1.2))))
        paths.append(ScenePath("cusp front x0=x1^2, x1>=0", front))
        for x in (0.35, 0.7, 1.0):
            nx, ny = -2.0 * x, 1.0
            import math

            ln = math.hypot(nx, ny)
            paths.append(_arrow("coorientation", (x, x * x), (x + 0.25 * sgn * nx / ln, x * x + 0.25 * sgn * ny / ln)))
    elif key == "a2xI":
        paths.append(ScenePath("zero section (base)", ((-1.2, -1.2), (1.2, -1.2), (1.2, 1.2), (-1.2, 1.2), (-1.2, -1.2))))
        paths.append(ScenePath("front segment", ((0.0, -1.0), (0.0, 1.0))))
        for y in (-0.6, 0.0, 0.6):
            paths.append(_arrow("coorientation", (0.0, y), (0.35 * sgn, y)))
    elif key == "ridge1":
        paths.append(ScenePath("zero section", ((-1.2, 0.0), (1.2, 0.0))))
        paths.append(ScenePath("ridge corner p=|q|", ((-1.1, 1.1), (0.0, 0.0), (1.1, 1.1))))
    else:  # ridge2: base projection of the order-2 ridge
        paths.append(ScenePath("q1 axis", ((0.0, 0.0), (1.2, 0.0))))
        paths.append(ScenePath("q2 axis", ((0.0, 0.0), (0.0, 1.2))))
        paths.append(ScenePath("quadrant boundary", ((1.2, 0.0), (0.0, 0.0), (0.0, 1.2))))
        paths.append(_arrow("inner conormal", (0.6, 0.0), (0.6, 0.3)))
        paths.append(_arrow("inner conormal", (0.0, 0.6), (0.3, 0.6)))
    scene = FrontScene(key, orientation_choice, tuple(paths))
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(scene.to_svg())
    return scene
