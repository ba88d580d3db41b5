"""Coordinate model of the shared homogeneous 3-space and its two metrics.

One parameter pair (kappa, tau) fixes a domain in R^3 and two metrics on it:
a Riemannian one ("R") and a Lorentzian one ("L") that differ only in the
sign of the square of the fiber 1-form.  Both admit the same canonical
orthonormal frame whose third leg is the unit fiber direction; frame
components are therefore the common currency of every computation here.

Conventions fixed in this module:

* ``Signature.R`` / ``Signature.L`` select the metric; the frame Gram matrix
  is diag(1, 1, +1) resp. diag(1, 1, -1).
* The vector product ``wedge`` of either metric is defined by
  <u ^ v, w> = det(u, v, w) in positively oriented frame components.
* The curvature operator ``curvature_frame`` uses the convention in which
  the sectional curvature of a plane spanned by suitable unit vectors u, v
  is <R(u, v)u, v> with a plus sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigInvalid, DomainViolation
from .numdiff import FDSteps, central_diff

DOMAIN_MARGIN = 1e-6


class Signature(str, enum.Enum):
    """Which of the two metrics on the shared domain is meant."""

    R = "R"
    L = "L"

    @property
    def eps3(self) -> float:
        """Sign of the squared norm of the unit fiber direction."""
        return 1.0 if self is Signature.R else -1.0


SIGNATURES = (Signature.R, Signature.L)


def frame_gram(sig: Signature) -> np.ndarray:
    return np.diag([1.0, 1.0, sig.eps3])


@dataclass(frozen=True)
class SpaceParams:
    """Curvature parameters of the model: base curvature kappa, bundle twist tau."""

    kappa: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau)):
            raise ConfigInvalid(f"parameters must be finite, got {self.kappa}, {self.tau}")

    @property
    def twist_rate(self) -> float:
        """Rotation rate of the horizontal frame legs along the fiber.

        Equals kappa / (2 tau) when tau != 0.  In the product case tau = 0 the
        frame does not rotate, which the value 0 encodes.
        """
        if self.tau == 0.0:
            return 0.0
        return self.kappa / (2.0 * self.tau)

    @property
    def disk_radius(self) -> float | None:
        """Radius of the base disk when kappa < 0, else None (all of R^2)."""
        if self.kappa < 0.0:
            return 2.0 / math.sqrt(-self.kappa)
        return None

    def key(self) -> tuple[float, float]:
        return (self.kappa, self.tau)

    def label(self) -> str:
        return f"{self.kappa:g},{self.tau:g}"


def wedge_frame(sig: Signature, uf: np.ndarray, vf: np.ndarray) -> np.ndarray:
    """Vector product in frame components, defined by <u^v, w>_sig = det(u, v, w).

    For the Riemannian metric this is the ordinary cross product; for the
    Lorentzian one the third component acquires the sign of the fiber leg.
    """
    c = np.cross(uf, vf)
    if sig is Signature.L:
        c = c.copy()
        c[2] = -c[2]
    return c


def split_frame(vf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split frame components into horizontal and vertical (fiber) parts."""
    h = np.array([vf[0], vf[1], 0.0])
    v = np.array([0.0, 0.0, vf[2]])
    return h, v


def connection_gap_frame(tau: float, xf: np.ndarray, yf: np.ndarray) -> np.ndarray:
    """Difference of the two Levi-Civita connections as a tensor, frame components.

    Bilinear in the two arguments; vanishes identically when tau = 0 and
    whenever both arguments are horizontal or both are vertical.
    """
    xh, xv = split_frame(np.asarray(xf, dtype=float))
    yh, yv = split_frame(np.asarray(yf, dtype=float))
    return 2.0 * tau * (np.cross(xh, yv) - np.cross(xv, yh))


def curvature_frame(
    params: SpaceParams, sig: Signature, xf: np.ndarray, yf: np.ndarray, zf: np.ndarray
) -> np.ndarray:
    """Curvature operator R(x, y)z of the chosen metric, in frame components.

    Valid at every point of the model because the coefficients are constant in
    the canonical frame.  Sign convention: <R(u, v)u, v> is the sectional
    curvature of a nondegenerate plane spanned by an adapted pair u, v.
    """
    k, t = params.kappa, params.tau
    g = frame_gram(sig)
    x = np.asarray(xf, dtype=float)
    y = np.asarray(yf, dtype=float)
    z = np.asarray(zf, dtype=float)
    fiber = np.array([0.0, 0.0, 1.0])
    e3 = sig.eps3

    def ip(a, b):
        return float(a @ g @ b)

    xz, yz = ip(x, z), ip(y, z)
    xv, yv, zv = e3 * x[2], e3 * y[2], e3 * z[2]

    if sig is Signature.R:
        c0, c1 = k - 3.0 * t * t, k - 4.0 * t * t
        out = c0 * (xz * y - yz * x)
        out = out + c1 * (zv * (yv * x - xv * y) + (yz * xv - xz * yv) * fiber)
    else:
        c0, c1 = k + 3.0 * t * t, k + 4.0 * t * t
        out = c0 * (xz * y - yz * x)
        out = out - c1 * (zv * (yv * x - xv * y) + (yz * xv - xz * yv) * fiber)
    return out


class CoordinateAmbient:
    """The coordinate chart of the model: R^3, or a solid cylinder over a disk.

    Provides metric evaluation, the canonical frame with analytic first
    derivatives, frame/coordinate conversion, vector products, connection
    coefficient tables and covariant differentiation along curves, for both
    metrics at once.
    """

    dim = 3

    def __init__(self, params: SpaceParams, steps: FDSteps | None = None):
        self.params = params
        self.steps = steps if steps is not None else FDSteps.from_env()
        self._table_cache: dict = {}

    # -- domain ------------------------------------------------------------

    def contains(self, p: np.ndarray) -> bool:
        p = np.asarray(p, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            return False
        r = self.params.disk_radius
        if r is None:
            return True
        return float(p[0] ** 2 + p[1] ** 2) < (1.0 - DOMAIN_MARGIN) * r * r

    def validate_point(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if not self.contains(p):
            raise DomainViolation(
                f"point {p!r} outside the model domain for kappa={self.params.kappa}"
            )
        return p

    # -- metric ------------------------------------------------------------

    def conformal_factor(self, p: np.ndarray) -> float:
        """Scale factor of the horizontal part of the metric at p."""
        k = self.params.kappa
        return 1.0 / (1.0 + 0.25 * k * (p[0] ** 2 + p[1] ** 2))

    def fiber_form(self, p: np.ndarray) -> np.ndarray:
        """Covector whose kernel is the horizontal distribution; value 1 on the fiber."""
        lam = self.conformal_factor(p)
        t = self.params.tau
        return np.array([t * lam * p[1], -t * lam * p[0], 1.0])

    def metric(self, sig: Signature, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        lam = self.conformal_factor(p)
        theta = self.fiber_form(p)
        g = np.diag([lam * lam, lam * lam, 0.0])
        return g + sig.eps3 * np.outer(theta, theta)

    def inner(self, sig: Signature, p: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(u, dtype=float) @ self.metric(sig, p) @ np.asarray(v, dtype=float))

    def fiber_direction(self, p: np.ndarray) -> np.ndarray:
        """The distinguished unit vertical field; equals the third frame leg."""
        return np.array([0.0, 0.0, 1.0])

    # -- canonical frame ---------------------------------------------------

    def frame(self, p: np.ndarray) -> np.ndarray:
        """Matrix whose columns are the canonical frame in coordinates."""
        p = np.asarray(p, dtype=float)
        k, t = self.params.kappa, self.params.tau
        s = self.params.twist_rate
        li = 1.0 + 0.25 * k * (p[0] ** 2 + p[1] ** 2)
        c, sn = math.cos(s * p[2]), math.sin(s * p[2])
        x, y = p[0], p[1]
        return np.array(
            [
                [li * c, -li * sn, 0.0],
                [li * sn, li * c, 0.0],
                [t * (x * sn - y * c), t * (x * c + y * sn), 1.0],
            ]
        )

    def frame_partials(self, p: np.ndarray) -> np.ndarray:
        """Analytic coordinate partials of the frame matrix, shape (3, 3, 3).

        Entry [a] is the partial derivative of frame(p) along coordinate a.
        """
        p = np.asarray(p, dtype=float)
        k, t = self.params.kappa, self.params.tau
        s = self.params.twist_rate
        li = 1.0 + 0.25 * k * (p[0] ** 2 + p[1] ** 2)
        c, sn = math.cos(s * p[2]), math.sin(s * p[2])
        x, y = p[0], p[1]
        dx_li = 0.5 * k * x
        dy_li = 0.5 * k * y
        d = np.zeros((3, 3, 3))
        d[0] = [
            [dx_li * c, -dx_li * sn, 0.0],
            [dx_li * sn, dx_li * c, 0.0],
            [t * sn, t * c, 0.0],
        ]
        d[1] = [
            [dy_li * c, -dy_li * sn, 0.0],
            [dy_li * sn, dy_li * c, 0.0],
            [-t * c, t * sn, 0.0],
        ]
        d[2] = [
            [-li * s * sn, -li * s * c, 0.0],
            [li * s * c, -li * s * sn, 0.0],
            [t * s * (x * c + y * sn), t * s * (y * c - x * sn), 0.0],
        ]
        return d

    def to_frame(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Components of a coordinate vector in the canonical frame at p."""
        return np.linalg.solve(self.frame(p), np.asarray(v, dtype=float))

    def to_coord(self, p: np.ndarray, vf: np.ndarray) -> np.ndarray:
        """Coordinate components of a vector given in the canonical frame at p."""
        return self.frame(p) @ np.asarray(vf, dtype=float)

    def wedge(self, sig: Signature, p: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Vector product of two coordinate vectors, returned in coordinates."""
        uf = self.to_frame(p, u)
        vf = self.to_frame(p, v)
        return self.to_coord(p, wedge_frame(sig, uf, vf))

    # -- connection --------------------------------------------------------

    def connection_table(self, sig: Signature, p: np.ndarray) -> np.ndarray:
        """Frame components of the covariant derivatives of the frame legs.

        Entry [i, j] is the derivative of leg j along leg i.  Constant in p
        for tau != 0; in the product case tau = 0 the coefficients depend on
        the base point, so they are assembled per point from finite
        differences of the metric and cached.
        """
        k, t = self.params.kappa, self.params.tau
        if t != 0.0:
            gam = np.zeros((3, 3, 3))
            if sig is Signature.R:
                a = (k - 2.0 * t * t) / (2.0 * t)
                gam[0, 1] = [0.0, 0.0, t]
                gam[0, 2] = [0.0, -t, 0.0]
                gam[1, 0] = [0.0, 0.0, -t]
                gam[1, 2] = [t, 0.0, 0.0]
                gam[2, 0] = [0.0, a, 0.0]
                gam[2, 1] = [-a, 0.0, 0.0]
            else:
                b = (k + 2.0 * t * t) / (2.0 * t)
                gam[0, 1] = [0.0, 0.0, t]
                gam[0, 2] = [0.0, t, 0.0]
                gam[1, 0] = [0.0, 0.0, -t]
                gam[1, 2] = [-t, 0.0, 0.0]
                gam[2, 0] = [0.0, b, 0.0]
                gam[2, 1] = [-b, 0.0, 0.0]
            return gam
        key = (sig, float(p[0]), float(p[1]))
        hit = self._table_cache.get(key)
        if hit is not None:
            return hit
        gam = self._table_from_metric(sig, np.asarray(p, dtype=float))
        self._table_cache[key] = gam
        return gam

    def christoffels(self, sig: Signature, p: np.ndarray, h: float | None = None) -> np.ndarray:
        """Coordinate Christoffel symbols Gamma[c, a, b] from central differences."""
        p = np.asarray(p, dtype=float)
        h = self.steps.first if h is None else h
        dg = np.empty((3, 3, 3))
        for a in range(3):
            e = np.zeros(3)
            e[a] = 1.0
            dg[a] = central_diff(lambda s: self.metric(sig, p + s * e), 0.0, h)
        ginv = np.linalg.inv(self.metric(sig, p))
        gam = np.empty((3, 3, 3))
        for c in range(3):
            for a in range(3):
                for b in range(3):
                    gam[c, a, b] = 0.5 * float(
                        ginv[c] @ (dg[a][b] + dg[b][a] - np.array([dg[d][a, b] for d in range(3)]))
                    )
        return gam

    def _table_from_metric(self, sig: Signature, p: np.ndarray) -> np.ndarray:
        gam_c = self.christoffels(sig, p)
        m = self.frame(p)
        dm = self.frame_partials(p)
        table = np.empty((3, 3, 3))
        for i in range(3):
            for j in range(3):
                vec = np.zeros(3)
                for a in range(3):
                    vec += m[a, i] * (dm[a][:, j] + gam_c[:, a, :] @ m[:, j])
                table[i, j] = np.linalg.solve(m, vec)
        return table

    def curve_through(self, p: np.ndarray, vel: np.ndarray) -> Callable[[float], np.ndarray]:
        """A curve in the model through p with the given initial velocity."""
        p = np.asarray(p, dtype=float)
        vel = np.asarray(vel, dtype=float)
        return lambda t: p + t * vel

    def cov_deriv_on_curve(
        self,
        sig: Signature,
        curve: Callable[[float], np.ndarray],
        field: Callable[[float], np.ndarray],
        h: float,
        velocity: np.ndarray | None = None,
    ) -> np.ndarray:
        """Covariant derivative of a vector field along a curve at parameter 0.

        ``field(t)`` gives coordinate components at curve(t).  The derivative
        part is taken on frame components, so only the field values at the
        three stencil parameters and the connection table at the center are
        needed.  Returns coordinate components at curve(0).
        """
        p0 = np.asarray(curve(0.0), dtype=float)
        if velocity is None:
            velocity = central_diff(curve, 0.0, h)
        vel_f = self.to_frame(p0, velocity)
        f0 = self.to_frame(p0, field(0.0))
        df = central_diff(lambda t: self.to_frame(curve(t), field(t)), 0.0, h)
        table = self.connection_table(sig, p0)
        corr = np.zeros(3)
        for i in range(3):
            for j in range(3):
                corr += vel_f[i] * f0[j] * table[i, j]
        return self.to_coord(p0, df + corr)

    # -- derived tensors ----------------------------------------------------

    def connection_gap(self, p: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Difference tensor of the two connections on coordinate vectors, in coordinates."""
        xf = self.to_frame(p, x)
        yf = self.to_frame(p, y)
        return self.to_coord(p, connection_gap_frame(self.params.tau, xf, yf))

    def curvature(
        self, sig: Signature, p: np.ndarray, x: np.ndarray, y: np.ndarray, z: np.ndarray
    ) -> np.ndarray:
        """Curvature operator on coordinate vectors, returned in coordinates."""
        rf = curvature_frame(
            self.params, sig, self.to_frame(p, x), self.to_frame(p, y), self.to_frame(p, z)
        )
        return self.to_coord(p, rf)
