"""Analytic divergence-free fields built from curl of cut-off vector potentials.

All fields here are exactly solenoidal: they are curls of compactly supported
potentials, evaluated through closed-form value/Jacobian expressions.  Second
derivatives come from central differences of the analytic Jacobian, which is
accurate enough for the sup-norm measurements this package performs.

The translational construction carries a factor 1/2: curl of the plateau
potential alone yields twice the intended plateau value, and the plateau value
(not the raw curl formula) is the contract every consumer relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OverlappingSupports

# ---------------------------------------------------------------------------
# smooth cut-off chi: 1 on [0, 1/2), smooth descent, 0 beyond 3/4
# ---------------------------------------------------------------------------


def _phi(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _phi1(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos]) / t[pos] ** 2
    return out


def _phi2(t):
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = np.exp(-1.0 / tp) * (1.0 / tp**4 - 2.0 / tp**3)
    return out


def cutoff_eval(z):
    """Evaluate the smooth cut-off profile.

    Parameters
    ----------
    z : array_like, nonnegative
        Radial argument.

    Returns
    -------
    (chi, dchi, d2chi) : ndarrays
        Profile value in [0, 1] (exactly 1 for z < 1/2, exactly 0 for
        z > 3/4) and its first two derivatives, which vanish on both
        plateaus.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("cutoff argument must be nonnegative")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    # map the transition [1/2, 3/4] onto [1, 0] and use the standard
    # exp(-1/t) partition-of-unity step
    u = 3.0 - 4.0 * z
    f, g = _phi(u), _phi(1.0 - u)
    f1, g1 = _phi1(u), -_phi1(1.0 - u)
    f2, g2 = _phi2(u), _phi2(1.0 - u)
    psi = f + g
    psi1 = f1 + g1
    psi2 = f2 + g2
    with np.errstate(divide="ignore", invalid="ignore"):
        s0 = f / psi
        s1 = f1 / psi - f * psi1 / psi**2
        s2 = (
            f2 / psi
            - 2.0 * f1 * psi1 / psi**2
            - f * psi2 / psi**2
            + 2.0 * f * psi1**2 / psi**3
        )
    hi = u >= 1.0
    lo = u <= 0.0
    for arr, hival in ((s0, 1.0), (s1, 0.0), (s2, 0.0)):
        arr[hi] = hival
        arr[lo] = 0.0
    chi, dchi, d2chi = s0, -4.0 * s1, 16.0 * s2
    if scalar:
        return float(chi[0]), float(dchi[0]), float(d2chi[0])
    return chi, dchi, d2chi


class CutoffProfile:
    """Fixed analytic cut-off; callable returning (chi, chi', chi'')."""

    plateau_end = 0.5
    support_end = 0.75

    def __call__(self, z):
        return cutoff_eval(z)


def tmatrix(x) -> np.ndarray:
    """Skew matrix with tmatrix(x) @ z == cross(z, x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("tmatrix takes a single 3-vector")
    return np.array(
        [
            [0.0, x[2], -x[1]],
            [-x[2], 0.0, x[0]],
            [x[1], -x[0], 0.0],
        ]
    )


@dataclass(frozen=True)
class RigidMotion:
    """Rigid velocity field w(x) = translation + angular x (x - center)."""

    center: np.ndarray
    translation: np.ndarray
    angular: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))
        object.__setattr__(self, "angular", np.asarray(self.angular, dtype=float))

    def velocity(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.translation + np.cross(self.angular, pts - self.center)


# ---------------------------------------------------------------------------
# analytic field interface
# ---------------------------------------------------------------------------

_EIJK = np.zeros((3, 3, 3))
_EIJK[0, 1, 2] = _EIJK[1, 2, 0] = _EIJK[2, 0, 1] = 1.0
_EIJK[0, 2, 1] = _EIJK[1, 0, 2] = _EIJK[2, 1, 0] = -1.0


class AnalyticField:
    """Smooth vector field exposing value, Jacobian and Hessian at any point.

    Subclasses implement ``value`` and ``jacobian``; the Hessian defaults to
    central differences of the Jacobian with a step tied to the field's
    intrinsic length scale.
    """

    scale: float = 1.0

    def value(self, t: float, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, t: float, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, t: float, pts: np.ndarray) -> np.ndarray:
        """H[m, a, b, c] = d^2 field_a / dx_b dx_c, by FD of the Jacobian."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        step = 1e-4 * self.scale
        out = np.zeros(pts.shape[:1] + (3, 3, 3))
        for c in range(3):
            e = np.zeros(3)
            e[c] = step
            jp = self.jacobian(t, pts + e)
            jm = self.jacobian(t, pts - e)
            out[:, :, :, c] = (jp - jm) / (2.0 * step)
        return out

    def divergence(self, t: float, pts: np.ndarray) -> np.ndarray:
        jac = self.jacobian(t, pts)
        return np.trace(jac, axis1=-2, axis2=-1)

    def gradient_bound(self, t: float) -> float:
        """Crude sup estimate of |jacobian| for step-size heuristics."""
        pts = self._probe_points()
        if pts.size == 0:
            return 0.0
        jac = self.jacobian(t, pts)
        return float(np.sqrt((jac**2).sum(axis=(1, 2))).max())

    def _probe_points(self) -> np.ndarray:
        return np.zeros((0, 3))


class CallableField(AnalyticField):
    """Wrap a plain callable (t, pts) -> values as an AnalyticField.

    The Jacobian falls back to 4th-order central differences of the values
    when no closed form is supplied.
    """

    def __init__(self, value_fn, jac_fn=None, scale=1.0):
        self._value_fn = value_fn
        self._jac_fn = jac_fn
        self.scale = float(scale)

    def value(self, t, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self._value_fn(t, pts), dtype=float)

    def jacobian(self, t, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._jac_fn is not None:
            return np.asarray(self._jac_fn(t, pts), dtype=float)
        step = 1e-3 * self.scale
        out = np.zeros(pts.shape[:1] + (3, 3))
        for b in range(3):
            e = np.zeros(3)
            e[b] = step
            f1 = self.value(t, pts + e)
            f_1 = self.value(t, pts - e)
            f2 = self.value(t, pts + 2 * e)
            f_2 = self.value(t, pts - 2 * e)
            out[:, :, b] = (8.0 * (f1 - f_1) - (f2 - f_2)) / (12.0 * step)
        return out


class CurlBumpField(AnalyticField):
    """Superposition of curl-built bumps around separated centers.

    Each constituent n contributes, with d = x - center_n and s = |d| / eps_n,

    * a translational part with plateau value z_n(t) for s < 1/2 (the 1/2
      normalization of the curl is built in), and
    * a rotational part with plateau value omega_n(t) x d,

    both vanishing for s > 3/4.  Supports must be pairwise disjoint, which
    makes every point see at most one constituent.
    """

    def __init__(self, centers, eps, translations=None, angulars=None,
                 check_disjoint=True):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        n = self.centers.shape[0]
        self.eps = np.broadcast_to(np.asarray(eps, dtype=float), (n,)).copy()
        self._trans = self._as_supplier(translations, n)
        self._ang = self._as_supplier(angulars, n)
        self.scale = float(self.eps.min()) if n else 1.0
        if check_disjoint and n > 1:
            d = np.linalg.norm(self.centers[:, None, :] - self.centers[None, :, :], axis=-1)
            np.fill_diagonal(d, np.inf)
            lim = 0.75 * (self.eps[:, None] + self.eps[None, :])
            if np.any(d < lim):
                i, j = np.unravel_index(np.argmin(d - lim), d.shape)
                raise OverlappingSupports(
                    f"centers {i} and {j} at distance {d[i, j]:.4g} "
                    f"< support sum {lim[i, j]:.4g}"
                )

    @staticmethod
    def _as_supplier(values, n):
        if values is None:
            zero = np.zeros((n, 3))
            return lambda t: zero
        if callable(values):
            return lambda t: np.atleast_2d(np.asarray(values(t), dtype=float))
        arr = np.atleast_2d(np.asarray(values, dtype=float)).copy()
        return lambda t: arr

    def _eval(self, t, pts, want_jac):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        m = pts.shape[0]
        val = np.zeros((m, 3))
        jac = np.zeros((m, 3, 3)) if want_jac else None
        zs = self._trans(t)
        oms = self._ang(t)
        for n in range(self.centers.shape[0]):
            eps = self.eps[n]
            d = pts - self.centers[n]
            dist = np.linalg.norm(d, axis=-1)
            s = dist / eps
            inside = s < 0.75
            if not inside.any():
                continue
            z, om = zs[n], oms[n]
            di, si = d[inside], s[inside]
            chi, chi1, chi2 = cutoff_eval(si)
            # plateau short-circuit keeps s -> 0 exact
            plateau = si < 0.5
            shell = ~plateau
            v = np.zeros((di.shape[0], 3))
            v[plateau] = z + np.cross(om, di[plateau])
            if want_jac:
                jloc = np.zeros((di.shape[0], 3, 3))
                tom = np.einsum("ajb,j->ab", _EIJK, om)
                jloc[plateau] = tom
            if shell.any():
                ds, dd = si[shell], di[shell]
                dn = ds * eps
                dhat = dd / dn[:, None]
                c0, c1, c2 = chi[shell], chi1[shell], chi2[shell]
                zd = dd @ z
                # translation: 0.5 * curl(chi * cross(z, d))
                P = c0 + 0.5 * ds * c1
                Q = c1 / (2.0 * eps * eps * ds)
                vt = P[:, None] * z - (Q * zd)[:, None] * dd
                # rotation: curl(-chi * |d|^2/2 * omega)
                T = c1 * ds**2 * eps / 2.0
                wxdhat = np.cross(np.broadcast_to(om, dd.shape), dhat)
                wxd = np.cross(np.broadcast_to(om, dd.shape), dd)
                vr = T[:, None] * wxdhat + c0[:, None] * wxd
                v[shell] = vt + vr
                if want_jac:
                    P1 = 1.5 * c1 + 0.5 * ds * c2
                    Q1 = (c2 * ds - c1) / (2.0 * eps**2 * ds**2)
                    jt = (
                        (P1 / eps)[:, None, None] * z[None, :, None] * dhat[:, None, :]
                        - (Q1 / eps * zd)[:, None, None] * dd[:, :, None] * dhat[:, None, :]
                        - Q[:, None, None]
                        * (dd[:, :, None] * z[None, None, :] + zd[:, None, None] * np.eye(3))
                    )
                    T1 = (c2 * ds**2 + 2.0 * c1 * ds) * eps / 2.0
                    ddhat = (np.eye(3)[None] - dhat[:, :, None] * dhat[:, None, :]) / dn[:, None, None]
                    jr = (
                        (T1 / eps)[:, None, None] * wxdhat[:, :, None] * dhat[:, None, :]
                        + np.einsum("ajc,j,nbc->nab", _EIJK, om, T[:, None, None] * ddhat)
                        + (c1 / eps)[:, None, None] * wxd[:, :, None] * dhat[:, None, :]
                        + c0[:, None, None] * tom[None]
                    )
                    jloc[shell] = jt + jr
            val[inside] += v
            if want_jac:
                jac[inside] += jloc
        return (val, jac) if want_jac else (val, None)

    def value(self, t, pts):
        return self._eval(t, pts, want_jac=False)[0]

    def jacobian(self, t, pts):
        return self._eval(t, pts, want_jac=True)[1]

    def hessian(self, t, pts):
        # per-constituent FD step: supports are disjoint, so each point can
        # use the local length scale
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(pts.shape[:1] + (3, 3, 3))
        for n in range(self.centers.shape[0]):
            eps = self.eps[n]
            dist = np.linalg.norm(pts - self.centers[n], axis=-1)
            # widen by the FD step so edge points see the full stencil
            sel = dist < 0.76 * eps
            if not sel.any():
                continue
            sub = pts[sel]
            step = 1e-4 * eps
            for c in range(3):
                e = np.zeros(3)
                e[c] = step
                jp = self.jacobian(t, sub + e)
                jm = self.jacobian(t, sub - e)
                out[sel, :, :, c] = (jp - jm) / (2.0 * step)
        return out

    def _probe_points(self):
        # mid-shell samples where the gradient peaks
        dirs = np.concatenate([np.eye(3), -np.eye(3)])
        pts = (
            self.centers[:, None, :] + 0.625 * self.eps[:, None, None] * dirs[None, :, :]
        )
        return pts.reshape(-1, 3)


# ---------------------------------------------------------------------------
# public constructors
# ---------------------------------------------------------------------------


def lambda_field(cfg, translations) -> CurlBumpField:
    """Divergence-free transport field gluing per-particle translations.

    Equals ``translations[n](t)`` on a plateau of radius eps/2 around each
    initial center and vanishes past distance (3/4) eps.  Raises
    OverlappingSupports when two centers sit closer than (3/2) eps.
    """
    eps = cfg.regime.eps
    return CurlBumpField(cfg.centers, eps, translations=translations)


def rigid_extension(cfg, motions, scale: float = 1.0) -> CurlBumpField:
    """Solenoidal extension of per-particle rigid velocities.

    Reproduces h' + omega x (x - h) on the plateau |x - h| < scale*r/4 of
    each particle; supported in |x - h| < 3*scale*r/8.  The H1 norm scales
    like sqrt(N r) * (sup|h'| + r sup|omega|), measured by quadrature.
    """
    centers = np.array([m.center for m in motions])
    trans = np.array([m.translation for m in motions])
    angs = np.array([m.angular for m in motions])
    if centers.shape[0] != cfg.count:
        raise ValueError("one rigid motion per particle required")
    eps_eff = 0.5 * scale * cfg.radius
    return CurlBumpField(centers, eps_eff, translations=trans, angulars=angs,
                         check_disjoint=False)


def probe_field(kind: str, r: float, z, center=(0.0, 0.0, 0.0)) -> CurlBumpField:
    """Compactly supported probe around a point.

    kind='translation': plateau value z for |x - center| < r/4.
    kind='rotation':    plateau value z x (x - center).
    Both vanish for |x - center| > 3r/8 and are exactly divergence free.
    """
    z = np.asarray(z, dtype=float)
    if kind == "translation":
        return CurlBumpField([center], 0.5 * r, translations=z[None, :])
    if kind == "rotation":
        return CurlBumpField([center], 0.5 * r, angulars=z[None, :])
    raise ValueError(f"unknown probe kind {kind!r}")


def analytic_norms(field: AnalyticField, region, t: float = 0.0,
                   panels: int = 8, gauss: int = 4):
    """(L2 norm, H1 seminorm) of an analytic field over a box region.

    Composite Gauss-Legendre quadrature: `panels` subdivisions per axis with
    a `gauss`-point rule in each panel.
    """
    lo = np.asarray(region.lo, dtype=float)
    hi = np.asarray(region.hi, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(gauss)
    axes_pts, axes_w = [], []
    for ax in range(3):
        edges = np.linspace(lo[ax], hi[ax], panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        axes_pts.append((mid[:, None] + half[:, None] * nodes[None, :]).ravel())
        axes_w.append((half[:, None] * weights[None, :]).ravel())
    X, Y, Z = np.meshgrid(*axes_pts, indexing="ij")
    W = (
        axes_w[0][:, None, None]
        * axes_w[1][None, :, None]
        * axes_w[2][None, None, :]
    ).ravel()
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    v = field.value(t, pts)
    j = field.jacobian(t, pts)
    l2 = float(np.sqrt(np.sum(W * (v**2).sum(axis=1))))
    h1 = float(np.sqrt(np.sum(W * (j**2).sum(axis=(1, 2)))))
    return l2, h1
