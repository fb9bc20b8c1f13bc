"""Independent reference implementations used as test oracles.

Everything here is deliberately written with plain loops so that a bug in
the vectorized library code cannot hide in a shared einsum.
"""

import numpy as np


def koszul_loops(c):
    """Connection coefficients from structure constants, orthonormal frame.

    G[i][j][k] = <nabla_{e_i} e_j, e_k> via the Koszul formula with all
    metric-derivative terms dropped (left-invariant fields, orthonormal
    frame): 1/2 (<[ei,ej],ek> - <[ej,ek],ei> + <[ek,ei],ej>).
    """
    n = c.shape[0]
    G = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                G[i, j, k] = 0.5 * (c[i, j, k] - c[j, k, i] + c[k, i, j])
    return G


def curvature_loops(c, G):
    """R[i][j][k][l] = <R(ei,ej)ek, el> assembled term by term.

    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
    """
    n = c.shape[0]
    R = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = 0.0
                    for m in range(n):
                        s += G[j, k, m] * G[i, m, l]
                        s -= G[i, k, m] * G[j, m, l]
                        s -= c[i, j, m] * G[m, k, l]
                    R[i, j, k, l] = s
    return R


def operator_loops(R):
    """Curvature operator on lexicographic wedge pairs, entry by entry."""
    n = R.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = len(pairs)
    op = np.zeros((m, m))
    for p, (i, j) in enumerate(pairs):
        for q, (k, l) in enumerate(pairs):
            op[p, q] = R[i, j, l, k]
    return op


def jacobi_loops(c):
    """Max norm of the cyclic sum [[x,y],z] + [[y,z],x] + [[z,x],y]."""
    n = c.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v = np.zeros(n)
                for m in range(n):
                    v += c[i, j, m] * c[m, k]
                    v += c[j, k, m] * c[m, i]
                    v += c[k, i, m] * c[m, j]
                worst = max(worst, np.abs(v).max())
    return worst


def sl2_rep_constants(a, b):
    """sl2 structure constants straight from 2x2 commutators.

    Solves the 4x3 linear system per bracket with lstsq, which is an
    independent route from the package's triangular expansion.
    """
    E = [a * np.array([[0., 1.], [-1., 0.]]),
         2 * b * np.array([[0., 1.], [0., 0.]]),
         b * np.array([[1., 0.], [0., -1.]])]
    M = np.stack([e.ravel() for e in E], axis=1)
    c = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            br = (E[i] @ E[j] - E[j] @ E[i]).ravel()
            c[i, j], _, _, _ = np.linalg.lstsq(M, br, rcond=None)
    return c


def rotate_constants(c, Q):
    """Structure constants in the rotated basis f_a = sum_i Q[i,a] e_i.

    Q orthogonal, so the inverse change is the transpose.
    """
    return np.einsum('ia,jb,kd,ijk->abd', Q, Q, Q, c)


def random_orthogonal(rng, n):
    A = rng.normal(size=(n, n))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def random_spd(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + 0.5 * np.eye(n)


def direct_sum(c1, c2):
    """Structure constants of the direct sum (block diagonal, zero mixing)."""
    n1, n2 = c1.shape[0], c2.shape[0]
    n = n1 + n2
    c = np.zeros((n, n, n))
    c[:n1, :n1, :n1] = c1
    c[n1:, n1:, n1:] = c2
    return c
