"""Measure-preserving twist maps of the closed unit disk.

The built-in map family is composed radial twists: inside a support disk of
radius R centred at c, a point at distance r rotates about c by
2*pi*angle*profile(r/R); outside it is fixed.  The profile is the C^1 bump
(1-u^2)^2, which vanishes to first order at the support edge, so every map
is a diffeomorphism that is the identity near the disk boundary, and radial
rotation makes it area preserving.  Points are complex numbers.

Each map carries a canonical isotopy from the identity: the twists run one
after another, each scaling its angle linearly in time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TwistSpec",
    "MapSpec",
    "MeasureSpec",
    "Configuration",
    "base_config",
    "evaluate",
    "evaluate_many",
    "isotopy_path",
    "sample",
    "omega_check",
    "jacobian_check",
]

PROFILES = {"quartic_bump": lambda u: (1.0 - u * u) ** 2}


@dataclass(frozen=True)
class TwistSpec:
    """One radial twist: support strictly inside the open unit disk."""

    center: complex
    radius: float
    angle: float  # total turns at the support centre
    profile: str = "quartic_bump"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise ValueError("twist radius must be positive")
        if abs(self.center) + self.radius >= 1.0:
            raise ValueError("twist support must stay inside the open unit disk")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")

    def inverse(self) -> "TwistSpec":
        return TwistSpec(self.center, self.radius, -self.angle, self.profile)


@dataclass(frozen=True)
class MapSpec:
    """Composition of twists, leftmost applied first; empty = identity."""

    twists: tuple[TwistSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(self.twists))

    def inverse(self) -> "MapSpec":
        return MapSpec(tuple(t.inverse() for t in reversed(self.twists)))

    def conjugated_by(self, h: "MapSpec") -> "MapSpec":
        """The composition h o self o h^-1 as a twist list."""
        return MapSpec(h.inverse().twists + self.twists + h.twists)

    @classmethod
    def identity(cls) -> "MapSpec":
        return cls(())


def _twist_point(t: TwistSpec, p: complex, fraction: float = 1.0) -> complex:
    d = p - t.center
    r = abs(d)
    if r >= t.radius:
        return p
    theta = 2.0 * math.pi * t.angle * fraction * PROFILES[t.profile](r / t.radius)
    return t.center + d * cmath.exp(1j * theta)


def evaluate(m: MapSpec, p: complex) -> complex:
    """Apply the composed map to one point of the closed disk."""
    p = complex(p)
    if abs(p) > 1.0 + 1e-12:
        raise ValueError(f"point {p} outside the closed unit disk")
    for t in m.twists:
        p = _twist_point(t, p)
    return p


def evaluate_many(m: MapSpec, pts: np.ndarray) -> np.ndarray:
    """Vectorised evaluate over an array of complex points."""
    pts = np.asarray(pts, dtype=complex).copy()
    for t in m.twists:
        d = pts - t.center
        r = np.abs(d)
        inside = r < t.radius
        if np.any(inside):
            u = r[inside] / t.radius
            theta = 2.0 * math.pi * t.angle * (1.0 - u * u) ** 2
            pts[inside] = t.center + d[inside] * np.exp(1j * theta)
    return pts


def isotopy_path(m: MapSpec, p: complex, steps_per_twist: int = 16) -> list[complex]:
    """Sampled track of p under the canonical isotopy from the identity.

    Each twist occupies an equal time block and turns on linearly inside
    it.  The first sample is p and the last equals evaluate(m, p).
    """
    if steps_per_twist < 1:
        raise ValueError("steps_per_twist must be >= 1")
    p = complex(p)
    path = [p]
    if not m.twists:
        path.append(p)
        return path
    cur = p
    for t in m.twists:
        for s in range(1, steps_per_twist + 1):
            path.append(_twist_point(t, cur, s / steps_per_twist))
        cur = path[-1]
    return path


def isotopy_paths_many(m: MapSpec, pts: np.ndarray, steps_per_twist: int) -> np.ndarray:
    """Vectorised isotopy tracks; shape (samples, npts) complex."""
    pts = np.asarray(pts, dtype=complex)
    if not m.twists:
        return np.stack([pts, pts])
    rows = [pts.copy()]
    cur = pts.copy()
    for t in m.twists:
        d = cur - t.center
        r = np.abs(d)
        inside = r < t.radius
        u = np.where(inside, r / t.radius, 0.0)
        theta_full = 2.0 * math.pi * t.angle * (1.0 - u * u) ** 2
        for s in range(1, steps_per_twist + 1):
            step = cur.copy()
            frac = s / steps_per_twist
            step[inside] = t.center + d[inside] * np.exp(1j * theta_full[inside] * frac)
            rows.append(step)
        cur = rows[-1].copy()
    return np.stack(rows)


@dataclass(frozen=True)
class MeasureSpec:
    """Samplable probability measures on the disk.

    kind "area" is normalised Lebesgue measure, "radial" has density
    proportional to the named profile of |p|, "dirac" is a point mass and
    "finite" is uniform on a finite point set.  A "pushforward" wraps a
    base measure with a map applied to every draw (used for conjugation
    experiments).
    """

    kind: str
    point: complex = 0j
    points: tuple[complex, ...] = ()
    profile: str = "quartic_bump"
    base: "MeasureSpec | None" = None
    push: MapSpec | None = None

    def __post_init__(self):
        if self.kind not in ("area", "radial", "dirac", "finite", "pushforward"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "points", tuple(complex(q) for q in self.points))
        if self.kind == "finite" and not self.points:
            raise ValueError("finite measure needs a nonempty point set")
        if self.kind == "pushforward" and (self.base is None or self.push is None):
            raise ValueError("pushforward needs base measure and map")

    def is_atomic(self) -> bool:
        if self.kind in ("dirac", "finite"):
            return True
        if self.kind == "pushforward":
            return self.base.is_atomic()
        return False

    def pushforward(self, h: MapSpec) -> "MeasureSpec":
        if self.kind == "dirac":
            return MeasureSpec("dirac", point=evaluate(h, self.point))
        if self.kind == "finite":
            return MeasureSpec("finite", points=tuple(evaluate(h, q) for q in self.points))
        return MeasureSpec("pushforward", base=self, push=h)


def sample(ms: MeasureSpec, rng: np.random.Generator) -> complex:
    """One draw; consumes the generator stream deterministically."""
    if ms.kind == "dirac":
        return ms.point
    if ms.kind == "finite":
        return ms.points[int(rng.integers(0, len(ms.points)))]
    if ms.kind == "area":
        r = math.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * math.pi)
        return r * cmath.exp(1j * phi)
    if ms.kind == "radial":
        f = PROFILES[ms.profile]
        while True:
            r = math.sqrt(rng.uniform())
            phi = rng.uniform(0.0, 2.0 * math.pi)
            if rng.uniform() <= f(r):
                return r * cmath.exp(1j * phi)
    # pushforward
    return evaluate(ms.push, sample(ms.base, rng))


@dataclass(frozen=True)
class Configuration:
    """Labelled tuple of pairwise distinct points in the open disk."""

    points: tuple[complex, ...]

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i] == pts[j]:
                    raise ValueError(f"configuration points {i} and {j} coincide")

    def __len__(self) -> int:
        return len(self.points)

    def mapped(self, m: MapSpec, power: int = 1) -> "Configuration":
        pts = list(self.points)
        for _ in range(power):
            pts = [evaluate(m, p) for p in pts]
        return Configuration(tuple(pts))


def base_config(n: int, angle: float = 0.0) -> Configuration:
    """n reference points equally spaced on a diameter, rotated by angle."""
    rot = cmath.exp(1j * angle)
    return Configuration(tuple(rot * (-1.0 + 2.0 * k / (n + 1)) for k in range(1, n + 1)))


def omega_check(P: Configuration, Q: Configuration, tol: float = 1e-12) -> bool:
    """Whether the straight legs joining Q to P are pairwise disjoint.

    The two legs of strands i and j share the height parameter, so they
    meet iff the planar segment from q_i - q_j to p_i - p_j passes through
    the origin.  Returns False when any pair comes within tol of doing so.
    """
    if len(P) != len(Q):
        raise ValueError("configurations differ in size")
    n = len(P)
    for i in range(n):
        for j in range(i + 1, n):
            d0 = Q.points[i] - Q.points[j]
            d1 = P.points[i] - P.points[j]
            if _segment_min_abs(d0, d1) <= tol:
                return False
    return True


def _segment_min_abs(z0: complex, z1: complex) -> float:
    """min_{t in [0,1]} |(1-t) z0 + t z1| in closed form."""
    dz = z1 - z0
    dd = (dz.real * dz.real + dz.imag * dz.imag)
    if dd == 0.0:
        return abs(z0)
    t = -(z0.real * dz.real + z0.imag * dz.imag) / dd
    t = min(1.0, max(0.0, t))
    return abs(z0 + t * dz)


def jacobian_check(m: MapSpec, p: complex, h: float = 1e-4) -> float:
    """Central-difference Jacobian determinant; 1 + O(h^2) for twist maps."""
    p = complex(p)
    if abs(p) + h >= 1.0:
        raise ValueError("finite-difference stencil leaves the disk")
    xp, xm = p + h, p - h
    yp, ym = p + 1j * h, p - 1j * h
    fxp, fxm = evaluate(m, xp), evaluate(m, xm)
    fyp, fym = evaluate(m, yp), evaluate(m, ym)
    ddx = xp.real - xm.real  # realized stencil spacing, exact for identity
    ddy = yp.imag - ym.imag
    dxu, dxv = (fxp.real - fxm.real) / ddx, (fxp.imag - fxm.imag) / ddx
    dyu, dyv = (fyp.real - fym.real) / ddy, (fyp.imag - fym.imag) / ddy
    return dxu * dyv - dxv * dyu
