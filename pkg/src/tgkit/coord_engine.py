"""Chart-level metric engine.

Christoffel symbols (exact partials or central finite differences with one
Richardson level), geodesic integration (fixed-step RK4), second fundamental
forms of level-set hypersurfaces, warped and twisted product builders with
their conservation-law and eikonal checks, numeric Frenet data of sampled
curves, and pointwise curvature for cross-engine comparisons.
"""
from __future__ import annotations

import dataclasses
import typing

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (BadParams, DegeneratePlane, DimensionMismatch,
                     IrregularCurve, MetricDegenerate, TgkitError)
from .tg_analysis import FrenetData


# ------------------------------------------------------------- scalar fields

class ScalarField:
    """Scalar function with optional exact gradient / Hessian evaluators.

    Missing derivatives fall back to central differences with one
    Richardson extrapolation level.
    """

    def __init__(self, fn, grad=None, hess=None, fd_step=1e-5):
        self.fn = fn
        self._grad = grad
        self._hess = hess
        self.fd_step = fd_step

    @property
    def has_grad(self):
        return self._grad is not None

    def value(self, x):
        return float(self.fn(np.asarray(x, float)))

    def _steps(self, x):
        return self.fd_step * np.maximum(1.0, np.abs(x))

    def gradient(self, x):
        x = np.asarray(x, float)
        if self._grad is not None:
            return np.asarray(self._grad(x), float)
        h = self._steps(x)
        g = np.empty(len(x))
        for k in range(len(x)):
            e = np.zeros(len(x))
            e[k] = h[k]
            d1 = (self.fn(x + e) - self.fn(x - e)) / (2 * h[k])
            d2 = (self.fn(x + e / 2) - self.fn(x - e / 2)) / h[k]
            g[k] = (4 * d2 - d1) / 3
        return g

    def hessian(self, x):
        x = np.asarray(x, float)
        if self._hess is not None:
            return np.asarray(self._hess(x), float)
        h = self._steps(x)
        n = len(x)
        H = np.empty((n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = h[k]
            d1 = (self.gradient(x + e) - self.gradient(x - e)) / (2 * h[k])
            d2 = (self.gradient(x + e / 2) - self.gradient(x - e / 2)) / h[k]
            H[k] = (4 * d2 - d1) / 3
        return 0.5 * (H + H.T)


# ------------------------------------------------------------------- metrics

class CoordinateMetric:
    """Metric tensor evaluator on a chart.

    gram_at(point) -> symmetric positive definite matrix; partials_at, when
    given, returns dg[k][i][j] = d g_ij / d x^k exactly.
    """

    def __init__(self, dim, gram_at, partials_at=None, fd_step=1e-5):
        self.dim = int(dim)
        self.gram_at = gram_at
        self.partials_at = partials_at
        self.fd_step = float(fd_step)

    def gram(self, x):
        x = np.asarray(x, float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point has shape {x.shape}, metric dim {self.dim}")
        g = np.asarray(self.gram_at(x), float)
        if g.shape != (self.dim, self.dim) or not np.isfinite(g).all():
            raise MetricDegenerate(f"gram not finite at {x.tolist()}")
        if np.abs(g - g.T).max() > 1e-12:
            raise MetricDegenerate(f"gram not symmetric at {x.tolist()}")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise MetricDegenerate(f"gram not positive definite at {x.tolist()}")
        return g

    def partials(self, x, exact=None):
        """dg[k][i][j]; exact=None auto-selects, True/False forces a path."""
        x = np.asarray(x, float)
        use_exact = self.partials_at is not None if exact is None else exact
        if use_exact:
            if self.partials_at is None:
                raise TgkitError("no exact partials available")
            return np.asarray(self.partials_at(x), float)
        n = self.dim
        dg = np.empty((n, n, n))
        for k in range(n):
            h = self.fd_step * max(1.0, abs(x[k]))
            e = np.zeros(n)
            e[k] = h
            d1 = (np.asarray(self.gram_at(x + e), float)
                  - np.asarray(self.gram_at(x - e), float)) / (2 * h)
            d2 = (np.asarray(self.gram_at(x + e / 2), float)
                  - np.asarray(self.gram_at(x - e / 2), float)) / h
            dg[k] = (4 * d2 - d1) / 3
        return dg


def christoffel(CM: CoordinateMetric, x, exact=None):
    """Gamma[k][i][j] = Gamma^k_{ij}, symmetric in (i, j)."""
    g = CM.gram(x)
    gi = np.linalg.inv(g)
    dg = CM.partials(x, exact=exact)
    # W[i][j][l] = d_i g_jl + d_j g_il - d_l g_ij
    W = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    # note: indices of W as written are (i, j, l) via dg[k,i,j] = d_k g_ij:
    #   dg            -> d_i g_jl needs axes (i, j, l): that is dg itself
    #   transpose(1,0,2) -> d_j g_il
    #   transpose(1,2,0) -> d_l g_ij
    G = 0.5 * np.einsum('kl,ijl->kij', gi, W)
    return 0.5 * (G + np.transpose(G, (0, 2, 1)))


# ----------------------------------------------------------------- geodesics

@dataclasses.dataclass(frozen=True)
class GeodesicTrajectory:
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    step: float
    speed_drift: float     # max relative speed change per unit time


def geodesic_integrate(CM: CoordinateMetric, x0, v0, tmax, h=1e-3,
                       tol: Tolerances = DEFAULT) -> GeodesicTrajectory:
    """Fixed-step RK4 on the geodesic equation."""
    x0 = np.asarray(x0, float)
    v0 = np.asarray(v0, float)
    g0 = CM.gram(x0)
    s0 = float(np.sqrt(v0 @ g0 @ v0))
    if s0 <= 0.0:
        raise BadParams("initial velocity has zero length")
    if tmax <= 0 or h <= 0:
        raise BadParams("tmax and step must be positive")
    nsteps = max(1, round(tmax / h))
    h = tmax / nsteps

    def accel(x, v):
        G = christoffel(CM, x)
        return -np.einsum('kij,i,j->k', G, v, v)

    times = np.empty(nsteps + 1)
    points = np.empty((nsteps + 1, CM.dim))
    vels = np.empty((nsteps + 1, CM.dim))
    times[0], points[0], vels[0] = 0.0, x0, v0
    x, v = x0.copy(), v0.copy()
    for i in range(nsteps):
        k1x, k1v = v, accel(x, v)
        k2x, k2v = v + 0.5 * h * k1v, accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v = v + 0.5 * h * k2v, accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v = v + h * k3v, accel(x + h * k3x, v + h * k3v)
        x = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        times[i + 1] = (i + 1) * h
        points[i + 1] = x
        vels[i + 1] = v
    if not (np.isfinite(points).all() and np.isfinite(vels).all()):
        raise TgkitError(f"geodesic integration diverged (step {h:.3e})")
    speeds = np.sqrt(np.einsum('ni,nij,nj->n',
                               vels, np.stack([CM.gram(p) for p in points]), vels))
    rel = np.abs(speeds - s0) / s0
    with np.errstate(divide='ignore'):
        rates = rel[1:] / np.maximum(times[1:], h)
    drift = float(rates.max()) if len(rates) else 0.0
    if not np.isfinite(drift) or drift > tol.speed_reject:
        raise TgkitError(f"speed drift {drift:.3e} per unit time; step rejected")
    return GeodesicTrajectory(times, points, vels, h, drift)


def export_trajectory_csv(traj: GeodesicTrajectory, path):
    """UTF-8 CSV with header t, x1..xn, v1..vn."""
    n = traj.points.shape[1]
    header = ",".join(["t"] + [f"x{i + 1}" for i in range(n)]
                      + [f"v{i + 1}" for i in range(n)])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for t, x, v in zip(traj.times, traj.points, traj.velocities):
            row = [repr(float(t))] + [repr(float(c)) for c in x] + [repr(float(c)) for c in v]
            fh.write(",".join(row) + "\n")


# ------------------------------------------------------------- hypersurfaces

class LevelSetHypersurface:
    """The zero set {h = 0} of a scalar field with nonvanishing gradient."""

    def __init__(self, field: ScalarField):
        self.field = field

    def normal(self, CM: CoordinateMetric, x):
        g = CM.gram(x)
        dh = self.field.gradient(x)
        if np.linalg.norm(dh) <= 1e-8:
            raise MetricDegenerate(f"level-set gradient vanishes at {np.asarray(x).tolist()}")
        grad = np.linalg.solve(g, dh)
        return grad / np.sqrt(grad @ g @ grad)


class SffResult(typing.NamedTuple):
    matrix: np.ndarray      # coordinate tangent frame
    max_norm: float         # largest entry in an orthonormalized tangent frame


def second_fundamental_form(CM: CoordinateMetric, H: LevelSetHypersurface, x,
                            tol: Tolerances = DEFAULT) -> SffResult:
    """II(X, Y) = -<nabla_X Y, xi> = Hess h(X, Y) / |grad h|_g on {h = 0}."""
    x = np.asarray(x, float)
    if abs(H.field.value(x)) >= 1e-10:
        raise BadParams(f"point not on the hypersurface (h = {H.field.value(x):.3e})")
    g = CM.gram(x)
    dh = H.field.gradient(x)
    if np.linalg.norm(dh) <= 1e-8:
        raise MetricDegenerate("level-set gradient vanishes")
    G = christoffel(CM, x)
    hess = H.field.hessian(x) - np.einsum('kij,k->ij', G, dh)
    gradnorm = float(np.sqrt(dh @ np.linalg.solve(g, dh)))
    # tangent coordinate frame by eliminating the largest-gradient coordinate
    m = int(np.argmax(np.abs(dh)))
    n = CM.dim
    tang = []
    for a in range(n):
        if a == m:
            continue
        e = np.eye(n)[a] - (dh[a] / dh[m]) * np.eye(n)[m]
        tang.append(e)
    Tmat = np.stack(tang, axis=1)
    sff = Tmat.T @ hess @ Tmat / gradnorm
    # orthonormalize the tangent frame in g for the reported max norm
    Q = Tmat.copy()
    for j in range(Q.shape[1]):
        v = Q[:, j]
        for i in range(j):
            v = v - (Q[:, i] @ g @ v) * Q[:, i]
        Q[:, j] = v / np.sqrt(v @ g @ v)
    sff_onb = Q.T @ (hess / gradnorm) @ Q
    return SffResult(sff, float(np.abs(sff_onb).max()))


# ---------------------------------------------------------- product builders

def build_warped_product(m: int, base: CoordinateMetric, logf: ScalarField) -> CoordinateMetric:
    """e^{2 logf(u)} sum_a (dv^a)^2 + base, flat v-coordinates first."""
    if m < 1:
        raise BadParams("flat factor dimension must be at least 1")
    nb = base.dim
    dim = m + nb

    def gram_at(x):
        u = x[m:]
        g = np.zeros((dim, dim))
        f2 = np.exp(2.0 * logf.value(u))
        g[:m, :m] = f2 * np.eye(m)
        g[m:, m:] = base.gram(u)
        return g

    partials_at = None
    if base.partials_at is not None and logf.has_grad:
        def partials_at(x):
            u = x[m:]
            dg = np.zeros((dim, dim, dim))
            f2 = np.exp(2.0 * logf.value(u))
            dphi = logf.gradient(u)
            dbase = base.partials(u, exact=True)
            for k in range(nb):
                dg[m + k, :m, :m] = 2.0 * dphi[k] * f2 * np.eye(m)
                dg[m + k, m:, m:] = dbase[k]
            return dg

    return CoordinateMetric(dim, gram_at, partials_at,
                            fd_step=base.fd_step)


@dataclasses.dataclass(frozen=True)
class TwistedProductSpec:
    """Data for the twisted metric e^{2 phi(t,u)} dt^2 + base(u).

    e^{-phi} = sinh(alpha(u)) cos(kappa t + beta(u)) + cosh(alpha(u));
    the anchor is a base point where alpha vanishes, so phi(anchor, t) = 0.
    """
    base: CoordinateMetric
    alpha: ScalarField
    beta: ScalarField
    kappa: float
    k: float
    anchor: np.ndarray

    def __post_init__(self):
        if self.kappa == 0:
            raise BadParams("kappa must be nonzero")
        if self.k <= 0:
            raise BadParams("k must be positive")
        anchor = np.asarray(self.anchor, float)
        object.__setattr__(self, 'anchor', anchor)
        a0 = self.alpha.value(anchor)
        if abs(a0) > 1e-10:
            raise BadParams(f"alpha({anchor.tolist()}) = {a0:.3e}, anchor needs alpha = 0")


def twisting_phi(spec: TwistedProductSpec, t, u):
    """(phi, phi_t, phi_tt) of the closed-form twisting function."""
    a = spec.alpha.value(u)
    b = spec.beta.value(u)
    sa, ca = np.sinh(a), np.cosh(a)
    ang = spec.kappa * t + b
    F = sa * np.cos(ang) + ca
    if F <= 0:      # impossible for real alpha; guarded anyway
        raise TgkitError(f"e^{{-phi}} = {F:.3e} <= 0 at t={t}, u={np.asarray(u).tolist()}")
    Ft = -spec.kappa * sa * np.sin(ang)
    Ftt = -spec.kappa ** 2 * sa * np.cos(ang)
    phi = -np.log(F)
    phi_t = -Ft / F
    phi_tt = -Ftt / F + (Ft / F) ** 2
    return float(phi), float(phi_t), float(phi_tt)


def build_twisted_product(spec: TwistedProductSpec) -> CoordinateMetric:
    """Coordinates (t, u^1..u^{n-1}); g_tt = e^{2 phi}, base block-diagonal."""
    nb = spec.base.dim
    dim = nb + 1

    def gram_at(x):
        t, u = x[0], x[1:]
        phi, _, _ = twisting_phi(spec, t, u)
        g = np.zeros((dim, dim))
        g[0, 0] = np.exp(2.0 * phi)
        g[1:, 1:] = spec.base.gram(u)
        return g

    partials_at = None
    if (spec.base.partials_at is not None and spec.alpha.has_grad
            and spec.beta.has_grad):
        def partials_at(x):
            t, u = x[0], x[1:]
            a = spec.alpha.value(u)
            b = spec.beta.value(u)
            sa, ca = np.sinh(a), np.cosh(a)
            ang = spec.kappa * t + b
            F = sa * np.cos(ang) + ca
            da = spec.alpha.gradient(u)
            db = spec.beta.gradient(u)
            Ft = -spec.kappa * sa * np.sin(ang)
            Fu = (ca * np.cos(ang) + sa) * da - sa * np.sin(ang) * db
            dg = np.zeros((dim, dim, dim))
            dg[0, 0, 0] = -2.0 * F ** -3.0 * Ft
            dbase = spec.base.partials(u, exact=True)
            for kk in range(nb):
                dg[1 + kk, 0, 0] = -2.0 * F ** -3.0 * Fu[kk]
                dg[1 + kk, 1:, 1:] = dbase[kk]
            return dg

    return CoordinateMetric(dim, gram_at, partials_at, fd_step=spec.base.fd_step)


def twisting_ode_residual(spec: TwistedProductSpec, t_vals, u_points,
                          phi_eval=None) -> float:
    """max |d/dt (e^{-phi} phi_t^2 + kappa^2 (e^phi + e^{-phi}))| on the grid.

    phi_eval(t, u) -> (phi, phi_t, phi_tt) overrides the closed form, so a
    perturbed candidate runs through the identical differentiation.
    """
    ev = phi_eval or (lambda t, u: twisting_phi(spec, t, u))
    k2 = spec.kappa ** 2
    worst = 0.0
    for u in np.atleast_2d(np.asarray(u_points, float)):
        for t in np.asarray(t_vals, float).ravel():
            phi, pt, ptt = ev(t, u)
            em, ep = np.exp(-phi), np.exp(phi)
            dq = em * pt * (2.0 * ptt - pt * pt) + k2 * pt * (ep - em)
            worst = max(worst, abs(float(dq)))
    return worst


class EikonalResiduals(typing.NamedTuple):
    grad_alpha_residual: float
    grad_beta_residual: float
    beta_applicable: bool


def eikonal_residuals(spec: TwistedProductSpec, u_points) -> EikonalResiduals:
    """max ||grad alpha|^2 - k^2| and max |sinh^2(alpha) |grad beta|^2 - k^2|.

    The beta residual is skipped (not applicable) where alpha vanishes,
    matching the polar-type degeneracy at the anchor.
    """
    k2 = spec.k ** 2
    ra = 0.0
    rb = 0.0
    any_beta = False
    for u in np.atleast_2d(np.asarray(u_points, float)):
        ginv = np.linalg.inv(spec.base.gram(u))
        da = spec.alpha.gradient(u)
        ra = max(ra, abs(float(da @ ginv @ da) - k2))
        a = spec.alpha.value(u)
        if abs(a) > 1e-12:
            db = spec.beta.gradient(u)
            rb = max(rb, abs(np.sinh(a) ** 2 * float(db @ ginv @ db) - k2))
            any_beta = True
    return EikonalResiduals(ra, rb if any_beta else float('nan'), any_beta)


# ------------------------------------------------------- pointwise curvature

def riemann_at(CM: CoordinateMetric, x, step=1e-3):
    """R[i][j][k][l] = <R(d_i, d_j) d_k, d_l> at x (FD of Christoffel)."""
    x = np.asarray(x, float)
    n = CM.dim
    dG = np.empty((n, n, n, n))
    for k in range(n):
        h = step * max(1.0, abs(x[k]))
        e = np.zeros(n)
        e[k] = h
        d1 = (christoffel(CM, x + e) - christoffel(CM, x - e)) / (2 * h)
        d2 = (christoffel(CM, x + e / 2) - christoffel(CM, x - e / 2)) / h
        dG[k] = (4 * d2 - d1) / 3
    G = christoffel(CM, x)
    # R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
    Rup = (np.einsum('iljk->lijk', dG[:, :, :, :])
           - np.einsum('jlik->lijk', dG[:, :, :, :])
           + np.einsum('lim,mjk->lijk', G, G)
           - np.einsum('ljm,mik->lijk', G, G))
    g = CM.gram(x)
    return np.einsum('lijk,lm->ijkm', Rup, g)


def sectional_at(CM: CoordinateMetric, x, u, v, tol: Tolerances = DEFAULT,
                 step=1e-3) -> float:
    g = CM.gram(np.asarray(x, float))
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    den = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    if den <= tol.degenerate_plane:
        raise DegeneratePlane(f"Gram determinant {den:.3e}")
    R = riemann_at(CM, x, step=step)
    return float(np.einsum('ijkl,i,j,k,l->', R, u, v, v, u) / den)


# ------------------------------------------------------------ numeric frenet

def _fd4(arr, h):
    """4th-order central first derivative along axis 0 (interior only)."""
    return (-arr[4:] + 8 * arr[3:-1] - 8 * arr[1:-3] + arr[:-4]) / (12.0 * h)


def _hermite_resample(times, points, new_times):
    """Cubic Hermite resample with FD slope estimates (loose accuracy)."""
    slopes = np.gradient(points, times, axis=0)
    idx = np.clip(np.searchsorted(times, new_times) - 1, 0, len(times) - 2)
    t0, t1 = times[idx], times[idx + 1]
    w = ((new_times - t0) / (t1 - t0))[:, None]
    p0, p1 = points[idx], points[idx + 1]
    m0, m1 = slopes[idx] * (t1 - t0)[:, None], slopes[idx + 1] * (t1 - t0)[:, None]
    h00 = 2 * w ** 3 - 3 * w ** 2 + 1
    h10 = w ** 3 - 2 * w ** 2 + w
    h01 = -2 * w ** 3 + 3 * w ** 2
    h11 = w ** 3 - w ** 2
    return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1


def _frenet_pipeline(CM, times, points, tol):
    h = times[1] - times[0]
    vel = _fd4(points, h)
    pts = points[2:-2]
    grams = np.stack([CM.gram(p) for p in pts])
    gammas = np.stack([christoffel(CM, p) for p in pts])
    speed = np.sqrt(np.einsum('ni,nij,nj->n', vel, grams, vel))
    if speed.min() <= 1e-8:
        raise IrregularCurve(f"speed drops to {speed.min():.3e}")
    frames = [vel / speed[:, None]]
    ks = []
    trunc = float('nan')
    # the extra lap past dim - 1 only measures the frame-closure residual
    for _ in range(CM.dim):
        if len(frames[0]) < 9:
            break
        newest = frames[-1]
        dV = _fd4(newest, h)
        v_, s_ = vel[2:-2], speed[2:-2]
        G_, Gam_ = grams[2:-2], gammas[2:-2]
        Ds = (dV + np.einsum('nkij,ni,nj->nk', Gam_, v_, newest[2:-2])) / s_[:, None]
        w = Ds.copy()
        trimmed = [f[2:-2] for f in frames]
        for f in trimmed:
            w -= np.einsum('ni,nij,nj->n', w, G_, f)[:, None] * f
        knew = np.sqrt(np.einsum('ni,nij,nj->n', w, G_, w))
        kmed = float(np.median(knew))
        threshold = max(tol.eps_k, 1e-3 * max(1.0, ks[0] if ks else 0.0))
        if kmed < threshold or len(ks) == CM.dim - 1:
            trunc = kmed
            break
        ks.append(kmed)
        frames = trimmed + [w / knew[:, None]]
        vel, speed, grams, gammas = v_, s_, G_, Gam_
    return ks, frames, trunc


def frenet_numeric(CM: CoordinateMetric, times, points,
                   arclength_reparametrize=False,
                   tol: Tolerances = DEFAULT) -> FrenetData:
    """Frenet curvatures of a sampled curve by 4th-order finite differences.

    Uniform sampling required; the chain rule handles non-unit speed, so no
    reparametrization is needed for accuracy.  Error bars come from step
    halving; the order cutoff is max(eps_k, 1e-3 max(1, k1)), and the
    borderline flag marks a truncated curvature that exceeded the strict
    algebraic zero threshold.
    """
    times = np.asarray(times, float)
    points = np.asarray(points, float)
    if len(times) < 50:
        raise IrregularCurve(f"need at least 50 samples, got {len(times)}")
    if points.shape != (len(times), CM.dim):
        raise DimensionMismatch("points must be samples x dim")
    steps = np.diff(times)
    if steps.min() <= 0 or (steps.max() - steps.min()) > 1e-9 * steps.max():
        raise IrregularCurve("sampling must be uniform and increasing")
    if arclength_reparametrize:
        vel = np.gradient(points, times, axis=0)
        sp = np.sqrt(np.einsum('ni,nij,nj->n', vel,
                               np.stack([CM.gram(p) for p in points]), vel))
        s = np.concatenate([[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * steps)])
        new_s = np.linspace(0.0, s[-1], len(times))
        points = _hermite_resample(s, points, new_s)
        times = new_s
    ks, frames, trunc = _frenet_pipeline(CM, times, points, tol)
    ks2, _, _ = _frenet_pipeline(CM, times[::2], points[::2], tol)
    bars = {f"k{i + 1}": abs(ks[i] - ks2[i]) / 15.0
            for i in range(min(len(ks), len(ks2)))}
    mid = len(frames[0]) // 2
    frame = tuple(f[mid] for f in frames)
    borderline = bool(np.isfinite(trunc) and trunc >= tol.eps_k_warn)
    return FrenetData(len(ks), tuple(ks), frame, trunc, borderline, bars)
