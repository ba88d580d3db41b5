"""Independent numerical routes used to cross-check the primary formulas.

Everything in this module recomputes geometric quantities from raw metric
evaluations and finite differences only, deliberately avoiding the closed
forms and analytic derivatives used by the primary code paths.  Tests compare
the two routes; production code should not depend on this module.
"""

from __future__ import annotations

import numpy as np

from .ambient import Signature, frame_gram
from .numdiff import central_diff, gradient


def lie_bracket_fd(field_x, field_y, p: np.ndarray, h: float) -> np.ndarray:
    """[X, Y] at p from central differences of the component functions."""
    p = np.asarray(p, dtype=float)
    jx = gradient(field_x, p, h)
    jy = gradient(field_y, p, h)
    x0 = np.asarray(field_x(p), dtype=float)
    y0 = np.asarray(field_y(p), dtype=float)
    return x0 @ jy - y0 @ jx


def koszul_table(ambient, sig: Signature, p: np.ndarray, h: float) -> np.ndarray:
    """Connection coefficients of the frame legs straight from the Koszul formula.

    Uses only metric evaluations, finite-difference directional derivatives of
    inner products and finite-difference Lie brackets of the frame fields.
    Returns the same (3, 3, 3) layout as the primary connection table.
    """
    p = np.asarray(p, dtype=float)

    def leg(i):
        return lambda q: ambient.frame(q)[:, i]

    legs = [leg(i) for i in range(3)]

    def ip(i, j, q):
        fi = np.asarray(legs[i](q), dtype=float)
        fj = np.asarray(legs[j](q), dtype=float)
        return float(fi @ ambient.metric(sig, q) @ fj)

    def dirderiv(i, j, k):
        # derivative of <leg_j, leg_k> along leg_i, following the straight
        # coordinate line through p with velocity leg_i(p)
        vel = np.asarray(legs[i](p), dtype=float)
        return central_diff(lambda t: ip(j, k, p + t * vel), 0.0, h)

    brackets = [[lie_bracket_fd(legs[i], legs[j], p, h) for j in range(3)] for i in range(3)]
    g = ambient.metric(sig, p)

    def bk(i, j, k):
        return float(np.asarray(brackets[i][j]) @ g @ np.asarray(legs[k](p)))

    eps = np.array([1.0, 1.0, sig.eps3])
    table = np.empty((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                two = (
                    dirderiv(i, j, k)
                    + dirderiv(j, k, i)
                    - dirderiv(k, i, j)
                    + bk(i, j, k)
                    - bk(j, k, i)
                    + bk(k, i, j)
                )
                table[i, j, k] = eps[k] * 0.5 * two
    return table


def christoffels_fd(metric_fn, p: np.ndarray, h: float) -> np.ndarray:
    """Coordinate Christoffel symbols Gamma[c, a, b] of an arbitrary metric field."""
    p = np.asarray(p, dtype=float)
    n = p.size
    dg = gradient(metric_fn, p, h)
    ginv = np.linalg.inv(np.asarray(metric_fn(p), dtype=float))
    gam = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            vec = dg[a][b] + dg[b][a] - dg[:, a, b]
            gam[:, a, b] = 0.5 * (ginv @ vec)
    return gam


def curvature_fd(metric_fn, p: np.ndarray, h_outer: float, h_inner: float) -> np.ndarray:
    """Curvature tensor components R[rho, sigma, mu, nu] from nested differences.

    Sign convention matches the package's curvature operator: contracting as
    ``R[:, s, m, n] z^s x^m y^n`` yields the operator applied to (x, y, z).
    """
    p = np.asarray(p, dtype=float)
    n = p.size

    def gam(q):
        return christoffels_fd(metric_fn, q, h_inner)

    dgam = gradient(gam, p, h_outer)
    g0 = gam(p)
    riem = np.zeros((n, n, n, n))
    for rho in range(n):
        for s in range(n):
            for m in range(n):
                for nu in range(n):
                    val = dgam[m][rho, nu, s] - dgam[nu][rho, m, s]
                    val += float(g0[rho, m] @ g0[:, nu, s]) - float(g0[rho, nu] @ g0[:, m, s])
                    riem[rho, s, m, nu] = -val
    return riem


def curvature_from_tables(ambient, sig: Signature) -> np.ndarray:
    """Frame curvature components from the constant connection tables (twisted case).

    Valid only when the connection coefficients are position independent,
    i.e. for tau != 0.  Returns R[k, i, j, :] = operator on (leg_i, leg_j,
    leg_k) in frame components.
    """
    table = ambient.connection_table(sig, np.zeros(3))
    out = np.empty((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            bracket = table[i, j] - table[j, i]
            for k in range(3):
                nab_j_k = table[j, k]
                nab_i_k = table[i, k]
                first = sum(nab_j_k[m] * table[i, m] for m in range(3))
                second = sum(nab_i_k[m] * table[j, m] for m in range(3))
                third = sum(bracket[m] * table[m, k] for m in range(3))
                out[k, i, j] = third - (first - second)
    return out


def brioschi_curvature(first_form, uv: tuple[float, float], h: float) -> float:
    """Gauss curvature of a 2D metric from its coefficients alone.

    ``first_form(u, v)`` returns the triple (E, F, G).  All derivatives come
    from a 3x3 central stencil of spacing h.
    """
    u, v = float(uv[0]), float(uv[1])
    vals = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            vals[(i, j)] = np.asarray(first_form(u + i * h, v + j * h), dtype=float)

    e0, f0, g0 = vals[(0, 0)]
    du = (vals[(1, 0)] - vals[(-1, 0)]) / (2.0 * h)
    dv = (vals[(0, 1)] - vals[(0, -1)]) / (2.0 * h)
    dvv = (vals[(0, 1)] - 2.0 * vals[(0, 0)] + vals[(0, -1)]) / (h * h)
    duu = (vals[(1, 0)] - 2.0 * vals[(0, 0)] + vals[(-1, 0)]) / (h * h)
    duv = (vals[(1, 1)] - vals[(1, -1)] - vals[(-1, 1)] + vals[(-1, -1)]) / (4.0 * h * h)

    e_u, f_u, g_u = du
    e_v, f_v, g_v = dv
    e_vv = dvv[0]
    g_uu = duu[2]
    f_uv = duv[1]

    m1 = np.array(
        [
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e0, f0],
            [0.5 * g_v, f0, g0],
        ]
    )
    m2 = np.array(
        [
            [0.0, 0.5 * e_v, 0.5 * g_u],
            [0.5 * e_v, e0, f0],
            [0.5 * g_u, f0, g0],
        ]
    )
    det_form = e0 * g0 - f0 * f0
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (det_form * det_form))


def frame_orthonormality_defect(ambient, sig: Signature, p: np.ndarray) -> float:
    """Largest deviation of the frame Gram matrix from its required constant value."""
    m = ambient.frame(p)
    g = ambient.metric(sig, p)
    return float(np.max(np.abs(m.T @ g @ m - frame_gram(sig))))
