"""Particle configurations at the critical scaling, their validation and
empirical densities, plus heavy-particle mass/inertia bookkeeping.

Everything here is a pure function of its inputs; configurations are frozen
after construction and safe to share between study workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoAdmissiblePlacement, SeedExhausted, UnsupportedDimension

# separation factors used by the generator: strictly above the admissibility
# thresholds (2 eps pairwise, eps to the boundary) so rounding never bites
LATTICE_SPACING_FACTOR = 2.5
BOUNDARY_MARGIN_FACTOR = 1.5


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned box domain."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or len(lo) not in (2, 3):
            raise ValueError("DomainBox needs matching 2- or 3-vectors")
        if not all(h > l for l, h in zip(lo, hi)):
            raise ValueError("upper corner must exceed lower corner componentwise")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lengths(self) -> np.ndarray:
        return np.array(self.hi) - np.array(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @classmethod
    def unit(cls, dim: int = 3) -> "DomainBox":
        return cls((0.0,) * dim, (1.0,) * dim)


@dataclass(frozen=True)
class ScalingRegime:
    """Radius and density laws tied to the separation parameter eps.

    3D: r = prefactor * eps**alpha (alpha = 3 is the critical scaling where
    the collective drag stays finite; desk studies may lower alpha so the
    obstacles remain grid-resolvable, and report that).
    2D: r solves -eps^2 log r = C2d exactly.
    rho_exponent sets the heavy-particle density law rho_S = eps**(-rho_exponent).
    """

    dim: int = 3
    eps: float = 0.1
    alpha: float = 3.0
    prefactor: float = 1.0
    C2d: float = 0.05
    rho_exponent: float = 10.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.alpha < 1.0:
            raise ValueError("alpha must be >= 1")
        if self.C2d <= 0:
            raise ValueError("C2d must be positive")

    @property
    def radius(self) -> float:
        if self.dim == 3:
            return self.prefactor * self.eps**self.alpha
        return float(np.exp(-self.C2d / self.eps**2))

    @property
    def rho_solid(self) -> float:
        return self.eps ** (-self.rho_exponent)

    def with_eps(self, eps: float) -> "ScalingRegime":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class ParticleConfiguration:
    """Initial centers, common radius and the geometry they live in."""

    regime: ScalingRegime
    domain: DomainBox
    centers: np.ndarray
    radius: float
    count: int

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.size == 0:
            centers = centers.reshape(0, self.domain.dim)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "count", int(centers.shape[0]))
        if centers.shape[0] and centers.shape[1] != self.domain.dim:
            raise ValueError("center dimension does not match the domain")

    @property
    def eps(self) -> float:
        return self.regime.eps

    def to_json(self) -> str:
        data = {
            "dim": self.domain.dim,
            "eps": self.regime.eps,
            "alpha": self.regime.alpha,
            "radius": self.radius,
            "domain": {"lo": list(self.domain.lo), "hi": list(self.domain.hi)},
            "centers": [list(c) for c in self.centers],
        }
        if self.domain.dim == 2:
            data["c2d"] = self.regime.C2d
        if self.regime.prefactor != 1.0:
            data["prefactor"] = self.regime.prefactor
        return json.dumps(data, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ParticleConfiguration":
        data = json.loads(text)
        regime = ScalingRegime(
            dim=data["dim"],
            eps=data["eps"],
            alpha=data.get("alpha", 3.0),
            prefactor=data.get("prefactor", 1.0),
            C2d=data.get("c2d", 0.05),
        )
        domain = DomainBox(tuple(data["domain"]["lo"]), tuple(data["domain"]["hi"]))
        centers = np.array(data["centers"], dtype=float)
        return cls(regime, domain, centers, data["radius"], len(centers))


@dataclass(frozen=True)
class HeavyParticleParams:
    """Mass and inertia of a uniform heavy ball.

    Uses the normalization m = rho_S r^3 (no 4 pi/3 factor) and the solid
    sphere ratio J = (2/5) m r^2.
    """

    rho_solid: float
    mass: float
    inertia: float
    radius: float

    def __post_init__(self):
        if self.mass and abs(self.inertia - 0.4 * self.mass * self.radius**2) > 1e-12 * max(self.inertia, 1.0):
            raise ValueError("inertia must equal (2/5) m r^2")


@dataclass
class DensityField:
    """Cell-wise approximation of the limit obstacle density."""

    lo: np.ndarray
    cell_size: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.cell_size = np.asarray(self.cell_size, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("density values must be nonnegative")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_size))

    def total_mass(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def scaled(self, factor: float) -> "DensityField":
        return DensityField(self.lo, self.cell_size, self.values * factor)

    def resample(self, lo, lengths, shape) -> np.ndarray:
        """Volume-weighted average onto another uniform grid covering the
        same box; returns the per-cell values."""
        lo = np.asarray(lo, dtype=float)
        lengths = np.asarray(lengths, dtype=float)
        out = self.values
        for ax in range(self.dim):
            w = _overlap_weights(
                self.lo[ax], self.cell_size[ax], self.values.shape[ax],
                lo[ax], lengths[ax] / shape[ax], shape[ax],
            )
            out = np.moveaxis(np.tensordot(w, np.moveaxis(out, ax, 0), axes=(1, 0)), 0, ax)
        return out


def _overlap_weights(lo_a, h_a, n_a, lo_b, h_b, n_b) -> np.ndarray:
    """W[i, j] = |cell_b_i intersect cell_a_j| / h_b (rows average to 1)."""
    a_edges = lo_a + h_a * np.arange(n_a + 1)
    b_edges = lo_b + h_b * np.arange(n_b + 1)
    left = np.maximum(b_edges[:-1, None], a_edges[None, :-1])
    right = np.minimum(b_edges[1:, None], a_edges[None, 1:])
    return np.clip(right - left, 0.0, None) / h_b


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def generate_configuration(domain: DomainBox, regime: ScalingRegime,
                           mode: str = "lattice", seed: int = 0,
                           reject_cap: int = 20000) -> ParticleConfiguration:
    """Place particle centers with pairwise distance > 2 eps and boundary
    margin > eps.

    lattice mode is deterministic: a regular grid with spacing 2.5 eps and
    margin 1.5 eps, centered in the box.  random mode draws uniform samples
    inside the margin-shrunk box, rejecting violations, until it reaches the
    lattice count for the same geometry or the rejection cap fires.
    """
    if regime.dim != domain.dim:
        raise ValueError("regime and domain dimension disagree")
    eps = regime.eps
    spacing = LATTICE_SPACING_FACTOR * eps
    margin = BOUNDARY_MARGIN_FACTOR * eps
    lengths = domain.lengths
    counts = np.floor((lengths - 2.0 * margin) / spacing).astype(int) + 1
    if np.any(lengths <= 2.0 * margin) or np.any(counts < 1):
        raise NoAdmissiblePlacement(
            f"eps={eps} leaves no admissible center in box lengths {lengths}"
        )
    if mode == "lattice":
        axes = []
        for ax in range(domain.dim):
            span = spacing * (counts[ax] - 1)
            start = domain.lo[ax] + margin + 0.5 * (lengths[ax] - 2.0 * margin - span)
            axes.append(start + spacing * np.arange(counts[ax]))
        mesh = np.meshgrid(*axes, indexing="ij")
        centers = np.stack([m.ravel() for m in mesh], axis=-1)
    elif mode == "random":
        target = int(np.prod(counts))
        rng = np.random.default_rng(seed)
        lo = np.array(domain.lo) + margin
        hi = np.array(domain.hi) - margin
        centers_list: list[np.ndarray] = []
        rejects = 0
        while len(centers_list) < target:
            cand = rng.uniform(lo, hi)
            if centers_list:
                dmin = np.min(np.linalg.norm(np.array(centers_list) - cand, axis=1))
                if dmin <= 2.0 * eps:
                    rejects += 1
                    if rejects > reject_cap:
                        raise SeedExhausted(
                            f"placed {len(centers_list)}/{target} before hitting the "
                            f"rejection cap {reject_cap}"
                        )
                    continue
            centers_list.append(cand)
        centers = np.array(centers_list)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ParticleConfiguration(regime, domain, centers, regime.radius, len(centers))


@dataclass(frozen=True)
class Violation:
    kind: str           # 'pair' or 'boundary'
    index: tuple
    distance: float
    threshold: float


@dataclass
class ValidationReport:
    """Initial-placement violations plus the runtime separation check."""

    violations: list = field(default_factory=list)
    runtime_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def runtime_ok(self) -> bool:
        return not self.runtime_violations


def validate_configuration(cfg: ParticleConfiguration,
                           moved_centers=None) -> ValidationReport:
    """Check pairwise > 2 eps and boundary > eps on the initial centers, and
    the weaker runtime thresholds (pairwise > eps, boundary > eps/2) on
    moved centers (defaults to the initial ones)."""
    report = ValidationReport()
    eps = cfg.eps
    _collect(cfg.centers, cfg.domain, 2.0 * eps, eps, report.violations)
    moved = cfg.centers if moved_centers is None else np.atleast_2d(moved_centers)
    _collect(moved, cfg.domain, eps, 0.5 * eps, report.runtime_violations)
    return report


def _collect(centers, domain, pair_thresh, bdry_thresh, out):
    n = centers.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(centers[i] - centers[j]))
            if d <= pair_thresh:
                out.append(Violation("pair", (i, j), d, pair_thresh))
    lo = np.array(domain.lo)
    hi = np.array(domain.hi)
    for i in range(n):
        d = float(min(np.min(centers[i] - lo), np.min(hi - centers[i])))
        if d <= bdry_thresh:
            out.append(Violation("boundary", (i,), d, bdry_thresh))


def empirical_density(cfg: ParticleConfiguration, cell_size: float) -> DensityField:
    """Histogram of eps^dim * sum of center deltas onto cells of roughly the
    requested size (adjusted so the cells tile the box exactly).

    Cell value = eps^dim * (count in cell) / cell volume, so the total
    integral is exactly eps^dim * N.
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    dim = cfg.domain.dim
    lengths = cfg.domain.lengths
    shape = np.maximum(np.round(lengths / cell_size).astype(int), 1)
    cs = lengths / shape
    if cfg.count == 0:
        values = np.zeros(shape)
    else:
        edges = [cfg.domain.lo[ax] + cs[ax] * np.arange(shape[ax] + 1) for ax in range(dim)]
        values, _ = np.histogramdd(cfg.centers, bins=edges)
    weight = cfg.eps**dim / float(np.prod(cs))
    return DensityField(np.array(cfg.domain.lo), cs, values * weight)


def heavy_particle_params(regime: ScalingRegime, rho_solid: float | None = None):
    """Mass, inertia and the heaviness indicators for one particle.

    Returns (HeavyParticleParams, report dict).  The report carries the
    heaviness indicator rho_S * eps^(19/2), the a-priori angular velocity
    bound r |omega| <= (rho_S eps^9)^(-1/2), and a DegenerateMass flag when
    rho_S = 0.
    """
    if regime.dim != 3:
        raise UnsupportedDimension("heavy regime is stated in 3D only")
    rho = regime.rho_solid if rho_solid is None else float(rho_solid)
    r = regime.radius
    m = rho * r**3
    J = 0.4 * m * r**2
    eps = regime.eps
    report = {
        "indicator": rho * eps ** 9.5,
        "angular_bound": float("inf") if rho == 0 else (rho * eps**9) ** -0.5,
        "degenerate_mass": rho == 0.0,
        "drift_scale": float("inf") if m == 0 else r**0.5 / m,
    }
    return HeavyParticleParams(rho, m, J, r), report
