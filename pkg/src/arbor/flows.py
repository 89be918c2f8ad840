"""Floating-point laboratory for explicit Liouville dynamics.

Morse-Bott normal forms on T*R with a quintic cutoff, Lyapunov margins on
grids, backward-flow skeleton estimation with a fixed-step 4th order
integrator, and earthquake isotopies of the zero section with exact
polynomial fault data (tangent jumps, transversality scans).

Point layout for a k-factor model is ``(q_1..q_k, p_1..p_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


# cutoff ---------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSpline:
    """Quintic smoothstep cutoff: 1 on (-inf, -eps], 0 on [0, inf),
    strictly decreasing in between, C^2 at the knots."""

    eps: float = 0.2

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def _u(self, q):
        return np.clip(-np.asarray(q, dtype=float) / self.eps, 0.0, 1.0)

    def value(self, q):
        u = self._u(q)
        return u ** 3 * (10.0 - 15.0 * u + 6.0 * u ** 2)

    def derivative(self, q):
        q = np.asarray(q, dtype=float)
        u = self._u(q)
        inside = (q > -self.eps) & (q < 0.0)
        return np.where(inside, 30.0 * u ** 2 * (1.0 - u) ** 2 * (-1.0 / self.eps), 0.0)

    def integral_tq(self, q):
        """h(q) = integral_0^q psi(t) t dt, closed form per piece."""
        q = np.asarray(q, dtype=float)
        e = self.eps
        u = self._u(q)
        # int_0^u S(s) s ds with S the smoothstep, scaled back by eps^2
        inner = e * e * ((6.0 / 7.0) * u ** 7 - 2.5 * u ** 6 + 2.0 * u ** 5)
        deep = inner * 0 + e * e * ((6.0 / 7.0) - 2.5 + 2.0) + (q * q - e * e) / 2.0
        return np.where(q >= 0.0, 0.0, np.where(q >= -e, inner, deep))

    def knot_check(self) -> bool:
        """The three defining constraints, sampled at and between the knots."""
        qs = np.linspace(-2 * self.eps, self.eps, 101)
        v = self.value(qs)
        ok = np.all(v[qs >= 0] == 0.0) and np.all(v[qs <= -self.eps] == 1.0)
        inside = (qs > -self.eps) & (qs < 0)
        return bool(ok and np.all(self.derivative(qs[inside]) < 0) and np.all(v[inside] < 1.0))


# model ----------------------------------------------------------------------

@dataclass(frozen=True)
class MBFactor:
    index: int  # 0 or 1
    cutoff: CutoffSpline = field(default_factory=CutoffSpline)

    def __post_init__(self):
        if self.index not in (0, 1):
            raise ValueError("factor index must be 0 or 1")


@dataclass(frozen=True)
class MorseBottModel:
    """Product of 2-dimensional Weinstein normal forms for Morse-Bott boundary."""

    factors: tuple[MBFactor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one factor")
        for f in self.factors:
            if not f.cutoff.knot_check():
                raise ValueError("cutoff violates its defining constraints")

    @staticmethod
    def single(index: int, eps: float = 0.2) -> "MorseBottModel":
        return MorseBottModel((MBFactor(index, CutoffSpline(eps)),))

    @property
    def dim(self) -> int:
        return 2 * len(self.factors)


def _factor_field(f: MBFactor, q, p):
    psi = f.cutoff.value(q)
    dpsi = f.cutoff.derivative(q)
    if f.index == 1:
        # Z = (1 + psi + psi' q) p d_p - psi q d_q
        return (-psi * q, (1.0 + psi + dpsi * q) * p)
    # index 0: Z = (1 - (psi + psi' q)/2) p d_p + psi q / 2 d_q
    return (0.5 * psi * q, (1.0 - 0.5 * (psi + dpsi * q)) * p)


def liouville_field(m: MorseBottModel, point) -> np.ndarray:
    """The model Liouville field, factor by factor (direct sum on products)."""
    x = np.asarray(point, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    k = len(m.factors)
    if pts.shape[1] != 2 * k:
        raise ValueError(f"points must have {2 * k} coordinates")
    out = np.empty_like(pts)
    for i, f in enumerate(m.factors):
        dq, dp = _factor_field(f, pts[:, i], pts[:, k + i])
        out[:, i] = dq
        out[:, k + i] = dp
    return out[0] if single else out


def _factor_lyapunov_grad(f: MBFactor, q, p):
    """(d phi / dq, d phi / dp) for the factor's Lyapunov candidate.

    Index 1: phi = p^2 - h(q); index 0: phi = p^2 + h(q), with
    h(q) = integral_0^q psi(t) t dt.
    """
    psi = f.cutoff.value(q)
    sign = -1.0 if f.index == 1 else 1.0
    return (sign * psi * q, 2.0 * p)


def critical_distance(m: MorseBottModel, points: np.ndarray) -> np.ndarray:
    """Distance to the critical set, the product of half-lines {p=0, q>=0}."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = len(m.factors)
    d2 = np.zeros(pts.shape[0])
    for i in range(k):
        q = pts[:, i]
        p = pts[:, k + i]
        d2 += p ** 2 + np.where(q < 0, q, 0.0) ** 2
    return np.sqrt(d2)


@dataclass(frozen=True)
class GridSpec:
    q_range: tuple[float, float] = (-2.0, 2.0)
    p_range: tuple[float, float] = (-2.0, 2.0)
    nq: int = 200
    np_: int = 200
    margin: float = 1e-3

    def points(self) -> np.ndarray:
        qs = np.linspace(*self.q_range, self.nq)
        ps = np.linspace(*self.p_range, self.np_)
        qq, pp = np.meshgrid(qs, ps, indexing="ij")
        return np.column_stack([qq.ravel(), pp.ravel()])


@dataclass(frozen=True)
class FlowReport:
    lyapunov_margin: float | None = None
    grid_meta: dict | None = None
    violations: tuple = ()
    skeleton_estimate: np.ndarray | None = None
    horizon: float | None = None
    step: float | None = None
    trajectories: np.ndarray | None = None


def lyapunov_check(m: MorseBottModel, grid) -> FlowReport:
    """d phi (Z) over the grid; the margin is the minimum over sampled points.

    For a single factor ``grid`` is a GridSpec (its band around the
    critical set is excluded) or an explicit (N, 2) array, which must stay
    off the critical set.  Multi-factor margins add factorwise: the
    evaluated quantity is separable, so the minimum over the product grid
    is the sum of per-factor minima.
    """
    if len(m.factors) > 1:
        if not isinstance(grid, (list, tuple)) or len(grid) != len(m.factors):
            raise ValueError("product models need one grid per factor")
        margin = 0.0
        metas = []
        for f, g in zip(m.factors, grid):
            rep = lyapunov_check(MorseBottModel((f,)), g)
            margin += rep.lyapunov_margin
            metas.append(rep.grid_meta)
        return FlowReport(lyapunov_margin=margin, grid_meta={"factors": metas})

    f = m.factors[0]
    if isinstance(grid, GridSpec):
        pts = grid.points()
        keep = critical_distance(m, pts) > grid.margin
        pts = pts[keep]
        meta = {
            "q_range": grid.q_range,
            "p_range": grid.p_range,
            "shape": [grid.nq, grid.np_],
            "margin": grid.margin,
            "evaluated": int(pts.shape[0]),
        }
        if pts.shape[0] == 0:
            raise ValueError("grid is entirely inside the excluded band")
    else:
        pts = np.atleast_2d(np.asarray(grid, dtype=float))
        if np.any(critical_distance(m, pts) == 0.0):
            raise ValueError("grid touches the critical set")
        meta = {"explicit_points": int(pts.shape[0])}
    z = liouville_field(m, pts)
    gq, gp = _factor_lyapunov_grad(f, pts[:, 0], pts[:, 1])
    dphi = gq * z[:, 0] + gp * z[:, 1]
    bad = np.nonzero(dphi <= 0.0)[0]
    violations = tuple((int(i), float(dphi[i])) for i in bad[:16])
    return FlowReport(lyapunov_margin=float(dphi.min()), grid_meta=meta, violations=violations)


def skeleton_estimate(
    m: MorseBottModel,
    seeds,
    horizon: float,
    step: float,
    record: int = 0,
) -> FlowReport:
    """Backward-flow endpoints after the given horizon (4th order fixed step).

    ``record`` > 0 stores every record-th state, seeds included, in
    ``trajectories`` with shape (stored_steps, N, dim).  Divergence aborts
    with the index of the offending seed.
    """
    if horizon <= 0 or step <= 0:
        raise ValueError("horizon and step must be positive")
    x = np.atleast_2d(np.asarray(seeds, dtype=float)).copy()
    n_steps = int(round(horizon / step))
    stored = [x.copy()] if record else None

    def rhs(y):
        return -liouville_field(m, y)

    for it in range(n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * step * k1)
        k3 = rhs(x + 0.5 * step * k2)
        k4 = rhs(x + step * k3)
        x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1e8):
            bad = np.nonzero(~np.isfinite(x).all(axis=1) | (np.abs(x) > 1e8).any(axis=1))[0]
            raise ValueError(f"integration diverged for seed {int(bad[0])}")
        if record and (it + 1) % record == 0:
            stored.append(x.copy())
    return FlowReport(
        skeleton_estimate=x,
        horizon=horizon,
        step=step,
        trajectories=np.array(stored) if stored else None,
    )


def forward_flow(m: MorseBottModel, seeds, time: float, step: float) -> np.ndarray:
    """Forward Liouville flow by the same integrator (for scaling checks)."""
    x = np.atleast_2d(np.asarray(seeds, dtype=float)).copy()
    n_steps = int(round(time / step))
    for _ in range(n_steps):
        k1 = liouville_field(m, x)
        k2 = liouville_field(m, x + 0.5 * step * k1)
        k3 = liouville_field(m, x + 0.5 * step * k2)
        k4 = liouville_field(m, x + step * k3)
        x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def liouville_form_value(m: MorseBottModel, point, vector) -> float:
    """lambda(v) at a point: the standard p dq plus d f_k per factor.

    lambda_k = p dq + d(f_k) with f_1 = psi p q and f_0 = -psi p q / 2.
    """
    x = np.asarray(point, dtype=float)
    v = np.asarray(vector, dtype=float)
    k = len(m.factors)
    total = 0.0
    for i, f in enumerate(m.factors):
        q, p = x[i], x[k + i]
        vq, vp = v[i], v[k + i]
        psi = float(f.cutoff.value(q))
        dpsi = float(f.cutoff.derivative(q))
        c = 1.0 if f.index == 1 else -0.5
        # d(c psi p q) = c (psi' p q + psi p) dq + c psi q dp
        total += p * vq + c * ((dpsi * p * q + psi * p) * vq + psi * q * vp)
    return float(total)


# earthquakes ------------------------------------------------------------------

class PolyFault:
    """A polynomial fault function with exact gradient and Hessian.

    ``terms`` maps exponent tuples to coefficients, e.g. the affine fault
    a.q + b in two variables is {(1, 0): a1, (0, 1): a2, (0,)*2: b}.
    """

    def __init__(self, dim: int, terms: dict[tuple, float]):
        self.dim = dim
        self.terms = {tuple(int(e) for e in k): float(v) for k, v in terms.items()}
        for k in self.terms:
            if len(k) != dim or any(e < 0 for e in k):
                raise ValueError(f"bad exponent tuple {k}")

    @staticmethod
    def affine(a: Sequence[float], b: float = 0.0) -> "PolyFault":
        dim = len(a)
        terms = {tuple(1 if i == j else 0 for i in range(dim)): float(a[j]) for j in range(dim)}
        terms[(0,) * dim] = float(b)
        return PolyFault(dim, terms)

    def value(self, q) -> float:
        q = np.asarray(q, dtype=float)
        return float(sum(c * np.prod(q ** np.array(k)) for k, c in self.terms.items()))

    def grad(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        g = np.zeros(self.dim)
        for k, c in self.terms.items():
            for i, e in enumerate(k):
                if e:
                    kk = np.array(k, dtype=float)
                    kk[i] -= 1
                    g[i] += c * e * np.prod(q ** kk)
        return g

    def hess(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        h = np.zeros((self.dim, self.dim))
        for k, c in self.terms.items():
            for i, ei in enumerate(k):
                if not ei:
                    continue
                for j, ej in enumerate(k):
                    kk = np.array(k, dtype=float)
                    if i == j:
                        if ei < 2:
                            continue
                        kk[i] -= 2
                        h[i][j] += c * ei * (ei - 1) * np.prod(q ** kk)
                    else:
                        if not ej:
                            continue
                        kk[i] -= 1
                        kk[j] -= 1
                        h[i][j] += c * ei * ej * np.prod(q ** kk)
        return h


@dataclass(frozen=True)
class BumpCutoff:
    """Smooth bump in the fault value: 1 for |s| <= r0, 0 for |s| >= r1."""

    r0: float = 0.5
    r1: float = 1.0

    def __post_init__(self):
        if not (0 < self.r0 < self.r1):
            raise ValueError("need 0 < r0 < r1")

    def _stage(self, s):
        return np.clip((np.abs(s) - self.r0) / (self.r1 - self.r0), 0.0, 1.0)

    def value(self, s):
        u = self._stage(s)
        return 1.0 - u ** 3 * (10.0 - 15.0 * u + 6.0 * u ** 2)

    def d1(self, s):
        s = np.asarray(s, dtype=float)
        u = self._stage(s)
        inside = (np.abs(s) > self.r0) & (np.abs(s) < self.r1)
        du = np.sign(s) / (self.r1 - self.r0)
        return np.where(inside, -30.0 * u ** 2 * (1.0 - u) ** 2 * du, 0.0)

    def d2(self, s):
        s = np.asarray(s, dtype=float)
        u = self._stage(s)
        inside = (np.abs(s) > self.r0) & (np.abs(s) < self.r1)
        du = 1.0 / (self.r1 - self.r0)
        return np.where(inside, -30.0 * (2 * u - 6 * u ** 2 + 4 * u ** 3) * du * du, 0.0)


@dataclass(frozen=True)
class EarthquakeSpec:
    """Faults, cutoffs and time for the graph family p = t dPhi(q)."""

    dim: int
    faults: tuple[PolyFault, ...]
    cutoffs: tuple[BumpCutoff, ...]
    t: float = 1.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("time must be nonnegative")
        if len(self.faults) != len(self.cutoffs):
            raise ValueError("one cutoff per fault")
        for f in self.faults:
            if f.dim != self.dim:
                raise ValueError("fault dimension mismatch")

    @staticmethod
    def single_fault_1d(t: float = 1.0) -> "EarthquakeSpec":
        return EarthquakeSpec(1, (PolyFault.affine([1.0]),), (BumpCutoff(),), t)

    def on_fault(self, q, tol: float = 1e-12) -> list[int]:
        return [j for j, f in enumerate(self.faults) if abs(f.value(q)) <= tol]


def _term_value_grad(e: EarthquakeSpec, j: int, q):
    f = e.faults[j]
    beta = e.cutoffs[j]
    phi = f.value(q)
    plus = max(phi, 0.0)
    gphi = f.grad(q)
    theta = float(beta.value(phi))
    dtheta = float(beta.d1(phi)) * gphi
    val = theta * plus * plus
    grad = plus * plus * dtheta + 2.0 * theta * plus * gphi
    return val, grad


def generating_value_grad(e: EarthquakeSpec, q) -> tuple[float, np.ndarray]:
    """Phi(q) and its exact gradient (C^1 across the faults)."""
    q = np.asarray(q, dtype=float)
    total = 0.0
    g = np.zeros(e.dim)
    for j in range(len(e.faults)):
        v, gr = _term_value_grad(e, j, q)
        total += v
        g += gr
    return total, g


def section_hessian(e: EarthquakeSpec, q, sides: dict[int, int] | None = None, tol: float = 1e-12) -> np.ndarray:
    """Hessian of Phi at q; on a fault the branch is chosen by ``sides``.

    ``sides[j] = +1`` takes the active-side limit across fault j, -1 the
    inactive side.  Faults not listed must be off their zero set.
    """
    q = np.asarray(q, dtype=float)
    sides = sides or {}
    h = np.zeros((e.dim, e.dim))
    for j, f in enumerate(e.faults):
        beta = e.cutoffs[j]
        phi = f.value(q)
        on = abs(phi) <= tol
        if on and j not in sides:
            raise ValueError(f"point lies on fault {j}; pass a side for it")
        if on:
            if sides[j] > 0:
                g = f.grad(q)
                h += 2.0 * float(beta.value(0.0)) * np.outer(g, g)
            continue
        if phi < 0:
            continue
        g = f.grad(q)
        hf = f.hess(q)
        b0 = float(beta.value(phi))
        b1 = float(beta.d1(phi))
        b2 = float(beta.d2(phi))
        gg = np.outer(g, g)
        # Hess(theta(phi) phi^2) with theta = beta o phi
        h += (phi * phi) * (b2 * gg + b1 * hf)
        h += 2.0 * phi * b1 * (gg + gg)
        h += 2.0 * b0 * (gg + phi * hf)
    return e.t * h


@dataclass(frozen=True)
class SectionPoint:
    q: np.ndarray
    p: np.ndarray
    tangent_form: np.ndarray | None  # t * Hess Phi off faults
    one_sided: dict | None  # fault -> (plus side, minus side) forms


def earthquake_section(e: EarthquakeSpec, q) -> SectionPoint:
    """The graph point p = t dPhi(q) with tangent data.

    Off the faults the tangent plane is the graph of the (scaled) Hessian;
    on a single fault both one-sided forms are returned.
    """
    q = np.asarray(q, dtype=float)
    _, g = generating_value_grad(e, q)
    p = e.t * g
    on = e.on_fault(q)
    if not on:
        return SectionPoint(q, p, section_hessian(e, q), None)
    sided = {}
    for j in on:
        base = {k: 1 for k in on if k != j}
        plus = section_hessian(e, q, sides={**base, j: 1})
        minus = section_hessian(e, q, sides={**base, j: -1})
        sided[j] = (plus, minus)
    return SectionPoint(q, p, None, sided)


def rank_one_jump(
    d: np.ndarray,
    fault_tangent: np.ndarray | None,
    ratio_tol: float = 1e-6,
    abs_tol: float = 1e-12,
) -> bool:
    """Numerical rank-1 test with optional kernel alignment.

    The leading singular value must clear ``abs_tol`` and dominate the
    second by ``ratio_tol``; when a fault tangent basis is supplied, the
    jump must annihilate it to the same relative precision.
    """
    s = np.linalg.svd(d, compute_uv=False)
    if s[0] <= abs_tol:
        return False
    if len(s) > 1 and s[1] / s[0] >= ratio_tol:
        return False
    if fault_tangent is not None and fault_tangent.size:
        resid = np.abs(d @ fault_tangent).max()
        if resid >= ratio_tol * s[0]:
            return False
    return True


def tectonic_jump_check(e: EarthquakeSpec, fault: int, samples, ratio_tol: float = 1e-6) -> bool:
    """Rank-1 jump of the one-sided tangent forms across one fault.

    Samples must lie on the chosen fault and off all others (fault
    intersections raise).  When the cutoff is locally constant at the
    fault the jump kernel must contain the fault tangent.
    """
    f = e.faults[fault]
    for q in samples:
        q = np.asarray(q, dtype=float)
        on = e.on_fault(q)
        if fault not in on:
            raise ValueError("sample does not lie on the chosen fault")
        if len(on) > 1:
            raise ValueError("sample lies on a fault intersection")
        if not np.linalg.norm(f.grad(q)) > 0:
            raise ValueError("fault gradient vanishes on its zero set")
        plus = section_hessian(e, q, sides={fault: 1})
        minus = section_hessian(e, q, sides={fault: -1})
        aligned = float(e.cutoffs[fault].d1(0.0)) == 0.0
        tangent = None
        if aligned and e.dim > 1:
            g = f.grad(q)
            basis = np.linalg.svd(np.outer(g, g))[0][:, 1:]
            tangent = basis
        if not rank_one_jump(plus - minus, tangent, ratio_tol):
            return False
    return True


def graph_tangent_basis(e: EarthquakeSpec, q) -> np.ndarray:
    """Column basis of the section's tangent plane at an off-fault point."""
    s = section_hessian(e, q)
    n = e.dim
    return np.vstack([np.eye(n), s])


def transversality_scan(
    e: EarthquakeSpec,
    eta,
    grid_points,
    rel_tol: float = 1e-7,
) -> list[int]:
    """Indices of grid points where the section tangent meets eta degenerately.

    ``eta`` is a constant 2n x n basis or a callable q -> basis.  An empty
    result certifies transversality at the sampled resolution.
    """
    bad = []
    for i, q in enumerate(np.atleast_2d(np.asarray(grid_points, dtype=float))):
        if e.on_fault(q):
            continue  # tangent is not single-valued on a ridge
        basis_l = graph_tangent_basis(e, q)
        basis_e = eta(q) if callable(eta) else np.asarray(eta, dtype=float)
        joint = np.hstack([basis_l, basis_e])
        s = np.linalg.svd(joint, compute_uv=False)
        if s[-1] < rel_tol * s[0]:
            bad.append(i)
    return bad
