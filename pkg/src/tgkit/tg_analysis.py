"""Totally geodesic hyperplane analysis on metric Lie algebras.

Certification, sphere-constrained search for hyperplane normals, algebraic
Frenet data of the normal orbit, the order-two helix witness with its
quotient bracket table, sl(2) recognition, and the trichotomy classifier
(geodesic normal / circle normal / order-two helix).
"""
from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (DimensionMismatch, IdealResidualExceeded, JacobiViolation,
                     NonUnitVector, NotHelixOrderTwo, NotRecognized,
                     NotTotallyGeodesic, TgkitError)
from .lie_core import (LieAlgebra, MetricLieAlgebra, Subspace, complement_onb,
                       curvature_tensor, levi_civita, wedge_coords)


# ---------------------------------------------------------------- subspaces

@dataclasses.dataclass(frozen=True)
class SubspaceWitness:
    kind: str          # 'bracket' or 'connection'
    i: int             # indices into the orthonormalized subspace basis
    j: int
    component: np.ndarray   # offending perpendicular component, input basis


@dataclasses.dataclass(frozen=True)
class SubspaceCheck:
    ok: bool
    residual: float
    witness: SubspaceWitness | None


def _subspace_onb(M: MetricLieAlgebra, S: Subspace):
    # orthonormal basis of S in frame coordinates, order- and
    # orientation-preserving (QR with positive diagonal)
    if S.dim == 0:
        return np.empty((M.dim, 0))
    B = np.stack([M.to_onb(S.basis[:, k]) for k in range(S.dim)], axis=1)
    Q, R = np.linalg.qr(B)
    for k in range(Q.shape[1]):
        if R[k, k] < 0:
            Q[:, k] = -Q[:, k]
    return Q


def tg_subspace_check(M: MetricLieAlgebra, S: Subspace, tol: Tolerances = None) -> SubspaceCheck:
    """Is S a totally geodesic subalgebra?  ([S,S] in S and nabla_S S in S.)"""
    tol = tol or M.tol
    if S.ambient_dim != M.dim:
        raise DimensionMismatch("subspace ambient dimension does not match algebra")
    U = _subspace_onb(M, S)
    P = np.eye(M.dim) - U @ U.T      # projector onto S^perp, frame coords
    c = M.onb_constants
    G = levi_civita(M, tol).coefficients
    best = 0.0
    witness = None
    m = U.shape[1]
    for i in range(m):
        for j in range(i + 1, m):
            v = np.einsum('p,q,pqk->k', U[:, i], U[:, j], c)
            perp = P @ v
            r = float(np.linalg.norm(perp))
            if r > best:
                best, witness = r, SubspaceWitness('bracket', i, j, M.from_onb(perp))
    for i in range(m):
        for j in range(m):
            v = np.einsum('p,q,pqk->k', U[:, i], U[:, j], G)
            perp = P @ v
            r = float(np.linalg.norm(perp))
            if r > best:
                best, witness = r, SubspaceWitness('connection', i, j, M.from_onb(perp))
    return SubspaceCheck(best < tol.tg_residual, best, witness)


def _unit_onb(M: MetricLieAlgebra, T, tol: Tolerances):
    T = np.asarray(T, float)
    nrm = M.norm(T)
    if abs(nrm - 1.0) > tol.unit_norm:
        raise NonUnitVector(f"|T| = {nrm!r}, expected 1")
    return M.to_onb(T)


def hyperplane_tg_residual(M: MetricLieAlgebra, T, tol: Tolerances = None) -> float:
    """max |<nabla_X Y, T>| over an orthonormal basis X, Y of T^perp.

    Zero iff the left-invariant distribution T^perp is integrable with
    totally geodesic leaves.
    """
    tol = tol or M.tol
    t = _unit_onb(M, T, tol)
    G = levi_civita(M, tol).coefficients
    Q = complement_onb(t)
    Mmat = np.einsum('ijk,k->ij', G, t)
    return float(np.abs(Q.T @ Mmat @ Q).max())


# ------------------------------------------------------------------- search

@dataclasses.dataclass(frozen=True)
class SearchConfig:
    n_starts: int = 64
    seed: int = 0
    max_iter: int = 200
    newton_iter: int = 6
    residual_threshold: float = DEFAULT.search_residual


@dataclasses.dataclass(frozen=True)
class SearchResult:
    normals: list
    residuals: list
    continuum: bool

    def __iter__(self):
        return iter(self.normals)

    def __len__(self):
        return len(self.normals)


def _search_objective(G):
    def f_grad(t):
        Mm = np.einsum('ijk,k->ij', G, t)
        P = np.eye(len(t)) - np.outer(t, t)
        PMP = P @ Mm @ P
        f = float(np.sum(PMP * PMP))
        g3 = np.einsum('ij,ijk->k', PMP, G)
        grad = 2.0 * (g3 - PMP @ Mm.T @ t - P @ Mm.T @ P @ Mm @ t)
        return f, grad
    return f_grad


def _descend(f_grad, t, max_iter):
    f, g = f_grad(t)
    for _ in range(max_iter):
        rg = g - (g @ t) * t
        gn = float(rg @ rg)
        if gn < 1e-28:
            break
        alpha = 1.0
        while alpha > 1e-12:
            cand = t - alpha * rg
            cand = cand / np.linalg.norm(cand)
            fc, gc = f_grad(cand)
            if fc <= f - 1e-4 * alpha * gn:
                t, f, g = cand, fc, gc
                break
            alpha *= 0.5
        else:
            break
    return t, f


def _newton_polish(f_grad, t, iters):
    n = len(t)
    for _ in range(iters):
        Q = complement_onb(t)

        def chart_grad(xi):
            u = t + Q @ xi
            nu = np.linalg.norm(u)
            tt = u / nu
            _, g = f_grad(tt)
            return Q.T @ (g - (g @ tt) * tt) / nu

        g0 = chart_grad(np.zeros(n - 1))
        if float(g0 @ g0) < 1e-32:
            break
        h = 1e-6
        H = np.empty((n - 1, n - 1))
        for j in range(n - 1):
            e = np.zeros(n - 1)
            e[j] = h
            H[:, j] = (chart_grad(e) - chart_grad(-e)) / (2 * h)
        H = 0.5 * (H + H.T)
        scale = np.abs(H).max()
        if scale < 1e-14:
            break
        try:
            delta = np.linalg.solve(H + 1e-12 * scale * np.eye(n - 1), -g0)
        except np.linalg.LinAlgError:
            break
        cand = t + Q @ delta
        cand = cand / np.linalg.norm(cand)
        f_old, _ = f_grad(t)
        f_new, _ = f_grad(cand)
        if f_new <= f_old:
            t = cand
        else:
            break
    return t


def _sign_normalize(v, eps=1e-8):
    for x in v:
        if abs(x) > eps:
            return v + 0.0 if x > 0 else -v + 0.0
    return v + 0.0


def search_tg_hyperplanes(M: MetricLieAlgebra, config: SearchConfig = None,
                          tol: Tolerances = None) -> SearchResult:
    """Multistart projected descent for unit normals of TG hyperplanes.

    Deterministic for a fixed config.seed; results are sign-normalized,
    deduplicated, lexicographically sorted, and expressed in the input
    basis.
    """
    tol = tol or M.tol
    config = config or SearchConfig()
    n = M.dim
    G = levi_civita(M, tol).coefficients
    f_grad = _search_objective(G)
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_starts)
    found = []
    for s in seeds:
        rng = np.random.Generator(np.random.PCG64(s))
        t = rng.standard_normal(n)
        t /= np.linalg.norm(t)
        t, f = _descend(f_grad, t, config.max_iter)
        t = _newton_polish(f_grad, t, config.newton_iter)
        x = M.from_onb(t)
        x = x / M.norm(x)
        try:
            r = hyperplane_tg_residual(M, x, tol)
        except NonUnitVector:     # pragma: no cover - normalization above
            continue
        if r < config.residual_threshold:
            found.append((_sign_normalize(x), r))
    # merge sign classes closer than the dedup angle (gram inner product)
    merged = []
    cos_thresh = math.cos(tol.dedup_angle)
    for x, r in found:
        for k, (y, ry) in enumerate(merged):
            if abs(float(x @ M.gram @ y)) >= cos_thresh:
                if r < ry:
                    merged[k] = (x, r)
                break
        else:
            merged.append((x, r))
    merged.sort(key=lambda pair: tuple(np.round(pair[0], 9)))
    normals = [x for x, _ in merged]
    residuals = [r for _, r in merged]
    return SearchResult(normals, residuals, len(merged) > tol.continuum_minima)


# ------------------------------------------------------------------- frenet

@dataclasses.dataclass(frozen=True)
class FrenetData:
    order: int
    curvatures: tuple           # k_1 .. k_p, all above the zero threshold
    frame: tuple                # eps_1 .. eps_{p+1}, input basis
    truncation_residual: float  # first rejected curvature (nan if none seen)
    borderline: bool            # truncation fell in [eps_k_warn, eps_k)
    error_bars: dict | None = None


def frenet_orbit(M: MetricLieAlgebra, T, p_max: int = None,
                 tol: Tolerances = None) -> FrenetData:
    """Frenet apparatus of the one-parameter orbit of T.

    eps_1 = T; w_s = nabla_{eps_1} eps_s + k_{s-1} eps_{s-1};
    k_s = |w_s|; stops at k_s < eps_k or s = p_max.
    """
    tol = tol or M.tol
    t = _unit_onb(M, T, tol)
    n = M.dim
    if p_max is None:
        p_max = n - 1
    if not 1 <= p_max <= n - 1:
        raise DimensionMismatch(f"p_max must be in [1, {n - 1}]")
    G = levi_civita(M, tol).coefficients
    frame = [t]
    ks = []
    trunc = float('nan')
    borderline = False
    for s in range(1, p_max + 1):
        w = np.einsum('ijk,i,j->k', G, frame[0], frame[-1])
        if s >= 2:
            w = w + ks[-1] * frame[-2]
        k = float(np.linalg.norm(w))
        if k < tol.eps_k:
            trunc = k
            borderline = k >= tol.eps_k_warn
            break
        ks.append(k)
        frame.append(w / k)
    # frame orthonormality and the recursion identity are construction
    # guarantees; check both anyway
    F = np.stack(frame, axis=1)
    onb_res = np.abs(F.T @ F - np.eye(len(frame))).max()
    if onb_res > 1e-10:                     # pragma: no cover - unreachable
        raise TgkitError(f"Frenet frame lost orthonormality ({onb_res:.3e})")
    for s in range(1, len(ks) + 1):
        w = np.einsum('ijk,i,j->k', G, frame[0], frame[s - 1])
        if s >= 2:
            w = w + ks[s - 2] * frame[s - 2]
        res = np.linalg.norm(w - ks[s - 1] * frame[s])
        if res > tol.frenet_recursion:      # pragma: no cover - unreachable
            raise TgkitError(f"Frenet recursion residual {res:.3e}")
    return FrenetData(len(ks), tuple(ks),
                      tuple(M.from_onb(v) for v in frame),
                      trunc, borderline)


# ------------------------------------------------------------- helix witness

@dataclasses.dataclass(frozen=True)
class HelixWitness:
    T: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    Lambda: Subspace
    s: Subspace
    ideal_I: Subspace
    quotient_constants: np.ndarray
    recovered_a: float
    recovered_b: float
    residuals: dict


def _quotient_table_residual(q, k1, k2):
    # expected: [T,N1] = k2 N2 - k1 T ; [T,N2] = -k2 N1 ; [N1,N2] = -k1 N2
    target = np.zeros((3, 3, 3))
    target[0, 1] = (-k1, 0.0, k2)
    target[0, 2] = (0.0, -k2, 0.0)
    target[1, 2] = (0.0, 0.0, -k1)
    target -= np.transpose(target, (1, 0, 2))
    return float(np.abs(q - target).max())


def helix_witness(M: MetricLieAlgebra, T, tol: Tolerances = None) -> HelixWitness:
    """Certificate for an order-two helix orbit: span, ideal, quotient table.

    Raises NotHelixOrderTwo unless the orbit's Frenet order is exactly 2,
    and IdealResidualExceeded when the orthogonal complement of the helix
    span fails to be an ideal (which falsifies the TG hypothesis for T).
    """
    tol = tol or M.tol
    n = M.dim
    fd = frenet_orbit(M, T, p_max=min(3, n - 1), tol=tol)
    if fd.order != 2:
        raise NotHelixOrderTwo(fd.order)
    k1, k2 = fd.curvatures
    B = np.stack([M.to_onb(v) for v in fd.frame], axis=1)     # n x 3, frame coords
    # orthonormal basis of the complement via SVD null space
    _, sv, vt = np.linalg.svd(B.T)
    I_basis = vt[3:].T                                        # n x (n-3)
    c = M.onb_constants
    ideal_res = 0.0
    if I_basis.shape[1] > 0:
        br = np.einsum('pqk,qu->puk', c, I_basis)             # [e_p, u] for u in I
        lam_comp = np.einsum('puk,km->pum', br, B)            # Lambda components
        ideal_res = float(np.abs(lam_comp).max())
    if ideal_res > tol.ideal:
        raise IdealResidualExceeded(ideal_res)
    q = np.einsum('ip,jq,ijk,km->pqm', B, B, c, B)            # quotient constants
    table_res = _quotient_table_residual(q, k1, k2)
    rec = _recognize(q, np.eye(3), tol, seed=0)
    witness = HelixWitness(
        T=fd.frame[0], N1=fd.frame[1], N2=fd.frame[2],
        Lambda=Subspace(n, np.stack([fd.frame[0], fd.frame[1], fd.frame[2]], axis=1),
                        orthonormal=True),
        s=Subspace(n, np.stack([fd.frame[1], fd.frame[2]], axis=1), orthonormal=True),
        ideal_I=Subspace(n, np.stack([M.from_onb(I_basis[:, k])
                                      for k in range(I_basis.shape[1])], axis=1)
                         if I_basis.shape[1] else np.empty((n, 0)),
                         orthonormal=True),
        quotient_constants=q,
        recovered_a=k2 / 2.0,
        recovered_b=k1 / 2.0,
        residuals={'ideal_residual': ideal_res,
                   'bracket_table_residual': table_res,
                   'sl2_residual': rec.residual},
    )
    if table_res > tol.bracket_table:
        raise NotRecognized(f"quotient bracket table residual {table_res:.3e}")
    return witness


# --------------------------------------------------------------- recognition

@dataclasses.dataclass(frozen=True)
class Sl2Recognition:
    a: float
    b: float
    residual: float
    frame: tuple     # (T', N1', N2') in the input basis of the 3-dim algebra

    def __iter__(self):
        return iter((self.a, self.b))


def _recognize(constants, gram, tol, seed):
    try:
        L = LieAlgebra(constants, tol)
    except JacobiViolation as e:
        raise NotRecognized(f"not a Lie algebra (jacobi residual {e.residual:.3e})")
    if L.dim != 3:
        raise DimensionMismatch("sl(2) recognition needs a 3-dim algebra")
    c = L.structure_constants
    killing = np.einsum('imk,jkm->ij', c, c)
    ev = np.linalg.eigvalsh(killing)
    if np.abs(ev).min() <= 1e-6 * max(np.abs(ev).max(), 1e-300):
        raise NotRecognized("Killing form degenerate (algebra not semisimple)")
    if (ev < 0).sum() != 1:
        raise NotRecognized("Killing signature is not (+,+,-)")
    M = MetricLieAlgebra(L, gram, tol)
    result = search_tg_hyperplanes(M, SearchConfig(n_starts=32, seed=seed), tol)
    for T in result.normals:
        fd = frenet_orbit(M, T, p_max=2, tol=tol)
        if fd.order != 2:
            continue
        k1, k2 = fd.curvatures
        B = np.stack([M.to_onb(v) for v in fd.frame], axis=1)
        q = np.einsum('ip,jq,ijk,km->pqm', B, B, M.onb_constants, B)
        res = _quotient_table_residual(q, k1, k2)
        if res <= tol.sl2_match:
            return Sl2Recognition(k2 / 2.0, k1 / 2.0, res, tuple(fd.frame))
    raise NotRecognized("no orthonormal frame matches the bracket table")


def sl2_recognize(constants, gram=None, tol: Tolerances = DEFAULT,
                  seed: int = 0) -> Sl2Recognition:
    """Match a 3-dim metric Lie algebra against the two-parameter family.

    Returns the recovered (a, b) = (k2/2, k1/2) with the bracket-table
    residual and the matched frame; unpacks as the pair (a, b).
    """
    if gram is None:
        gram = np.eye(3)
    return _recognize(np.asarray(constants, float), np.asarray(gram, float), tol, seed)


# ----------------------------------------------------------- classification

class CaseTag(str, enum.Enum):
    GEODESIC_NORMAL = "GeodesicNormal"
    CIRCLE_NORMAL = "CircleNormal"
    HELIX_ORDER_TWO = "HelixOrderTwo"
    HIGHER_ORDER = "HigherOrder"


@dataclasses.dataclass(frozen=True)
class CharacterSpace:
    functionals: np.ndarray    # rows are functionals annihilating [g,g]
    derived_dim: int           # n - rank of span{[e_i,e_j]}


def character_space(L: LieAlgebra, tol: Tolerances = DEFAULT) -> CharacterSpace:
    c = L.structure_constants
    n = L.dim
    rows = c.reshape(n * n, n)
    _, sv, vt = np.linalg.svd(rows)
    rank = int((sv > 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)).sum())
    functionals = vt[rank:]
    if functionals.size:
        worst = np.abs(np.einsum('fk,ijk->fij', functionals, c)).max()
        if worst > 1e-10:     # pragma: no cover - nullspace is exact
            raise TgkitError(f"character space annihilation failed ({worst:.3e})")
    return CharacterSpace(functionals, n - rank)


def codazzi_residual(M: MetricLieAlgebra, T, tol: Tolerances = None) -> float:
    """max |<R(X,Y)Z, T>| over orthonormal X, Y, Z spanning T^perp."""
    tol = tol or M.tol
    t = _unit_onb(M, T, tol)
    R = curvature_tensor(M, tol).components
    Q = complement_onb(t)
    proj = np.einsum('ia,jb,kc,ijkl,l->abc', Q, Q, Q, R, t)
    return float(np.abs(proj).max())


@dataclasses.dataclass(frozen=True)
class ClassificationReport:
    case_tag: CaseTag
    frenet: FrenetData
    witness: HelixWitness | None
    character_hint: np.ndarray | None
    eigenvalue_lambda: float | None
    residuals: dict


def _wedge_eigen_lambda(M, t_onb, tol):
    # every T^X must live in one eigenspace of the curvature operator,
    # with a single eigenvalue shared across X
    cd = curvature_tensor(M, tol)
    Q = complement_onb(t_onb)
    lam = None
    worst = 0.0
    for i in range(Q.shape[1]):
        w = wedge_coords(t_onb, Q[:, i])
        rw = cd.operator_matrix @ w
        li = float(w @ rw)      # |w| = 1 for orthonormal T, X
        worst = max(worst, float(np.linalg.norm(rw - li * w)))
        if lam is None:
            lam = li
        elif abs(li - lam) > tol.eigen_membership:
            return None, max(worst, abs(li - lam))
    return (lam if worst <= tol.eigen_membership else None), worst


def jacobi_adapted_wedge_residual(M: MetricLieAlgebra, T, tol: Tolerances = None) -> float:
    """After diagonalizing the Jacobi operator on T^perp, the wedges of T
    with that eigenbasis must be eigenvectors of the curvature operator."""
    tol = tol or M.tol
    t = _unit_onb(M, T, tol)
    cd = curvature_tensor(M, tol)
    R = cd.components
    Q = complement_onb(t)
    J = np.einsum('ia,ijkl,j,k,lb->ab', Q, R, t, t, Q)
    _, vecs = np.linalg.eigh(0.5 * (J + J.T))
    basis = Q @ vecs
    worst = 0.0
    for i in range(basis.shape[1]):
        w = wedge_coords(t, basis[:, i])
        rw = cd.operator_matrix @ w
        li = float(w @ rw)
        worst = max(worst, float(np.linalg.norm(rw - li * w)))
    return worst


def normal_curvature_identity(M: MetricLieAlgebra, T, fd: FrenetData = None,
                              tol: Tolerances = None) -> float:
    """Residual of <T,[X,T]> = k1 <N1, X> over the basis (0 when k1 = 0)."""
    tol = tol or M.tol
    fd = fd or frenet_orbit(M, T, tol=tol)
    T = np.asarray(T, float)
    k1 = fd.curvatures[0] if fd.order >= 1 else 0.0
    n1 = fd.frame[1] if fd.order >= 1 else np.zeros(M.dim)
    worst = 0.0
    for i in range(M.dim):
        e = np.eye(M.dim)[i]
        lhs = M.inner(T, M.algebra.bracket(e, T))
        rhs = k1 * M.inner(n1, e)
        worst = max(worst, abs(lhs - rhs))
    return worst


def second_normal_identity(M: MetricLieAlgebra, T, fd: FrenetData = None,
                           tol: Tolerances = None) -> float:
    """Residual of N2 = k2^{-1} [T, N1] + k2^{-1} k1 T for order-2 orbits."""
    tol = tol or M.tol
    fd = fd or frenet_orbit(M, T, tol=tol)
    if fd.order < 2:
        raise NotHelixOrderTwo(fd.order)
    k1, k2 = fd.curvatures[:2]
    T = np.asarray(T, float)
    v = fd.frame[2] - (M.algebra.bracket(T, fd.frame[1]) + k1 * T) / k2
    return M.norm(v)


def classify_case(M: MetricLieAlgebra, T, tol: Tolerances = None) -> ClassificationReport:
    """Trichotomy for a certified TG hyperplane normal.

    GeodesicNormal / CircleNormal / HelixOrderTwo by the Frenet order of
    the normal orbit; HigherOrder flags a falsified prediction.
    """
    tol = tol or M.tol
    res = hyperplane_tg_residual(M, T, tol)
    if res >= tol.tg_residual:
        raise NotTotallyGeodesic(res)
    fd = frenet_orbit(M, T, tol=tol)
    residuals = {'tg_residual': res, 'codazzi_residual': codazzi_residual(M, T, tol)}
    witness = None
    hint = None
    lam = None
    if fd.order == 0:
        tag = CaseTag.GEODESIC_NORMAL
        lam, memb = _wedge_eigen_lambda(M, M.to_onb(np.asarray(T, float) / M.norm(T)), tol)
        residuals['eigen_membership'] = memb
    elif fd.order == 1:
        tag = CaseTag.CIRCLE_NORMAL
        hint = fd.curvatures[0] * (M.gram @ fd.frame[1])
        c = M.algebra.structure_constants
        residuals['character_annihilation'] = float(
            np.abs(np.einsum('k,ijk->ij', hint, c)).max())
    elif fd.order == 2:
        tag = CaseTag.HELIX_ORDER_TWO
        witness = helix_witness(M, T, tol)
        residuals.update(witness.residuals)
    else:
        tag = CaseTag.HIGHER_ORDER
    return ClassificationReport(tag, fd, witness, hint, lam, residuals)
