"""Orbit braids: from sampled strand paths to pure braid words.

A braid is read off a bundle of disjoint paths by projecting onto a line
and recording transpositions of the projected order.  The word of a map
iterate is built from three stages, matching the cylinder picture: straight
legs from the reference configuration to the sample points, the isotopy
tracks of the map applied N times, and straight legs back.  The whole
construction is repeated at doubled time resolution until the resulting
normal form is stable twice in a row.

Sign convention: when two neighbouring strands exchange projected order,
the letter is positive iff the strand moving toward larger projection
passes on the negative side of the perpendicular coordinate.  Two points
making half a counterclockwise turn about their midpoint therefore produce
the positive generator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .braids import BraidWord, free_cancel, is_pure
from .diskmaps import Configuration, MapSpec, base_config, isotopy_paths_many, omega_check
from .normalform import normal_form

__all__ = [
    "PathBundle",
    "DegenerateInput",
    "OmegaViolation",
    "NonStabilizing",
    "crossings_to_braid",
    "orbit_braid",
    "orbit_braid_with_info",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
MAX_AXIS_RETRIES = 8
MAX_DOUBLINGS = 12


class DegenerateInput(ValueError):
    """Projection ties persist after axis retries."""


class OmegaViolation(ValueError):
    """The straight legs of the construction would intersect."""


class NonStabilizing(RuntimeError):
    """The extracted word kept changing up to the resolution cap."""


class _NeedsRefinement(Exception):
    """Internal: crossing bookkeeping failed at this resolution."""


@dataclass(frozen=True)
class PathBundle:
    """Labelled strand paths over a common time grid."""

    times: np.ndarray  # (T,)
    points: np.ndarray  # (T, n) complex
    stages: np.ndarray | None = None  # (T,) small ints, for trace dumps

    def __post_init__(self):
        if self.points.ndim != 2 or len(self.times) != len(self.points):
            raise ValueError("times and points shapes disagree")


@dataclass
class ExtractionInfo:
    resolution: int = 0
    doublings: int = 0
    axis_angle: float = 0.0
    axis_retries: int = 0
    letters_raw: int = 0
    crossing_times: list = field(default_factory=list)
    bundle: PathBundle | None = None


def crossings_to_braid(pb: PathBundle, axis_angle: float = 0.0, info: ExtractionInfo | None = None) -> BraidWord:
    """Read a braid word from the bundle by projected order transpositions.

    Raises DegenerateInput when two strands share a projection value at a
    sample time (callers retry with a rotated axis) and _NeedsRefinement
    when simultaneous events cannot be serialised as adjacent swaps.
    """
    rot = cmath.exp(-1j * axis_angle)
    z = pb.points * rot
    proj = z.real
    perp = z.imag
    T, n = proj.shape
    scale = max(1.0, float(np.max(np.abs(proj))))
    # ties at sample times are degenerate for the ordering
    srt = np.sort(proj, axis=1)
    if np.min(np.diff(srt, axis=1)) <= 1e-13 * scale:
        raise DegenerateInput("projection tie at a sample time")

    order = list(np.argsort(proj[0]))  # strand ids by increasing projection
    posn = [0] * n
    for k, s in enumerate(order):
        posn[s] = k

    letters: list[int] = []
    diffs = proj[:, :, None] - proj[:, None, :]  # (T, n, n)
    flips = np.sign(diffs[:-1]) * np.sign(diffs[1:]) < 0
    intervals = np.nonzero(flips.any(axis=(1, 2)))[0]
    for k in intervals:
        events = []
        for i in range(n):
            for j in range(i + 1, n):
                if flips[k, i, j]:
                    d0 = diffs[k, i, j]
                    d1 = diffs[k + 1, i, j]
                    tau = d0 / (d0 - d1)
                    events.append((tau, i, j))
        events.sort(key=lambda e: (e[0], min(posn[e[1]], posn[e[2]])))
        for tau, i, j in events:
            pi, pj = posn[i], posn[j]
            if abs(pi - pj) != 1:
                raise _NeedsRefinement(f"non-adjacent swap at interval {k}")
            lower = i if proj[k, i] < proj[k, j] else j  # strand moving up
            upper = j if lower == i else i
            perp_lower = perp[k, lower] + tau * (perp[k + 1, lower] - perp[k, lower])
            perp_upper = perp[k, upper] + tau * (perp[k + 1, upper] - perp[k, upper])
            if perp_lower == perp_upper:
                raise _NeedsRefinement(f"perpendicular tie at interval {k}")
            sign = 1 if perp_lower < perp_upper else -1
            letters.append(sign * (min(pi, pj) + 1))
            if info is not None:
                t0, t1 = pb.times[k], pb.times[k + 1]
                info.crossing_times.append((float(t0 + tau * (t1 - t0)), letters[-1]))
            order[pi], order[pj] = order[pj], order[pi]
            posn[i], posn[j] = pj, pi
        if order != list(np.argsort(proj[k + 1])):
            raise _NeedsRefinement(f"order mismatch after interval {k}")
    if info is not None:
        info.letters_raw = len(letters)
    return BraidWord(n, tuple(letters))


def _segment_rows(a: np.ndarray, b: np.ndarray, steps: int) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, steps + 1)[:, None]
    return a[None, :] * (1.0 - ts) + b[None, :] * ts


def _build_bundle(P: Configuration, Q: Configuration, m: MapSpec, N: int, steps_per_twist: int) -> PathBundle:
    q = np.array(Q.points, dtype=complex)
    p = np.array(P.points, dtype=complex)
    seg_steps = max(4, steps_per_twist // 2)
    rows = [_segment_rows(q, p, seg_steps)]
    stages = [np.full(seg_steps + 1, 1, dtype=np.int8)]
    cur = p
    for _ in range(N):
        track = isotopy_paths_many(m, cur, steps_per_twist)
        rows.append(track[1:])
        stages.append(np.full(len(track) - 1, 2, dtype=np.int8))
        cur = track[-1]
    rows.append(_segment_rows(cur, q, seg_steps)[1:])
    stages.append(np.full(seg_steps, 3, dtype=np.int8))
    points = np.concatenate(rows, axis=0)
    stage_ids = np.concatenate(stages)
    # time axis follows the three-stage cylinder split 0..1/3..2/3..1
    T = len(points)
    n1 = seg_steps + 1
    n3 = seg_steps
    n2 = T - n1 - n3
    times = np.concatenate(
        [
            np.linspace(0.0, 1.0 / 3.0, n1),
            np.linspace(1.0 / 3.0, 2.0 / 3.0, n2 + 1)[1:],
            np.linspace(2.0 / 3.0, 1.0, n3 + 1)[1:],
        ]
    )
    return PathBundle(times, points, stage_ids)


def orbit_braid_with_info(
    P: Configuration,
    m: MapSpec,
    N: int = 1,
    resolution: int = 32,
    base_angle: float = 0.0,
    Q: Configuration | None = None,
) -> tuple[BraidWord, ExtractionInfo]:
    """Extract the pure braid of N map iterates started at P.

    Checks the admissibility of both ends, then doubles the sampling
    resolution until the braid normal form is unchanged through two
    consecutive doublings.  Projection ties trigger axis retries along a
    golden-angle sequence before the input is declared degenerate.
    """
    n = len(P)
    if Q is None:
        Q = base_config(n, base_angle)
    if not omega_check(P, Q):
        raise OmegaViolation("start configuration fails the admissibility check")
    if not omega_check(P.mapped(m, N), Q):
        raise OmegaViolation("end configuration fails the admissibility check")

    info = ExtractionInfo(resolution=resolution, axis_angle=base_angle)
    history: list = []
    extracted_any = False
    steps = resolution
    for doubling in range(MAX_DOUBLINGS):
        bundle = _build_bundle(P, Q, m, N, steps)
        word = None
        for retry in range(MAX_AXIS_RETRIES):
            axis = base_angle + retry * GOLDEN_ANGLE
            try:
                trace_info = ExtractionInfo(resolution=steps, axis_angle=axis, axis_retries=retry)
                word = crossings_to_braid(bundle, axis, trace_info)
            except DegenerateInput:
                continue
            except _NeedsRefinement:
                word = None
                break
            word = free_cancel(word)
            if not is_pure(word):  # missed crossings; finer sampling required
                word = None
                break
            info.axis_angle = axis
            info.axis_retries = retry
            info.crossing_times = trace_info.crossing_times
            info.letters_raw = trace_info.letters_raw
            break
        if word is not None:
            extracted_any = True
            history.append(normal_form(word))
            if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
                info.resolution = steps
                info.doublings = doubling
                info.bundle = bundle
                return word, info
        else:
            history.clear()  # stabilisation must be consecutive
        steps *= 2
    if not extracted_any:
        raise DegenerateInput("projection ties persist across axis retries and resolutions")
    raise NonStabilizing(f"braid word did not stabilise below resolution {steps}")


def orbit_braid(
    P: Configuration,
    m: MapSpec,
    N: int = 1,
    resolution: int = 32,
    base_angle: float = 0.0,
    Q: Configuration | None = None,
) -> BraidWord:
    word, _ = orbit_braid_with_info(P, m, N, resolution, base_angle, Q)
    return word
