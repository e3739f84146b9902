"""Point-process sampling of GBS and UAV positions plus distance densities.

Ground stations are a binomial point process on a disk; the swarm is a
hard-core process realized by simple sequential inhibition (dart throwing
with rejection).  The closed-form model consumes the distance densities
defined here; the Monte Carlo engine consumes the sampled layouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .scenario import ScenarioConfig

__all__ = [
    "PlacementError",
    "GbsLayout",
    "SwarmLayout",
    "sample_uniform_disk",
    "sample_hardcore_disk",
    "sample_gbs_layout",
    "sample_swarm_layout",
    "gbs_distance_pdf",
    "pair_distance_pdf",
    "pair_distance_truncation",
    "uav_pair_distance_pdf",
    "layout_to_csv",
]

_CANDIDATE_BLOCK = 64


class PlacementError(RuntimeError):
    """Hard-core placement failed within the attempt budget."""


@dataclass(frozen=True)
class GbsLayout:
    """Sampled ground-station positions around the swarm's ground projection.

    ``positions`` are planar coordinates (m) relative to the point under the
    swarm center; ``center_distances`` are 3D distances (m) from each GBS to
    the swarm center at altitude.
    """

    positions: np.ndarray  # (M, 2)
    available_idx: np.ndarray  # (M0,) indices of GBSs serving the swarm
    occupied_idx: np.ndarray  # (M1,) indices of interfering GBSs
    center_distances: np.ndarray  # (M,)


@dataclass(frozen=True)
class SwarmLayout:
    """Sampled UAV positions (m) and their pairwise distances.

    ``positions`` are 3D with a common altitude; ``head_idx`` designates the
    UAV whose uplink pilot provides the transmit-weight channel estimates.
    """

    positions: np.ndarray  # (N, 3)
    head_idx: int
    pair_distances: np.ndarray  # (N, N), symmetric, zero diagonal


def sample_uniform_disk(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. uniform points on the disk of the given radius, as (n, 2)."""
    r = radius * np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def sample_hardcore_disk(
    n: int,
    radius: float,
    d_min: float,
    rng: np.random.Generator,
    attempts_per_point: int = 10_000,
    layout_retries: int = 100,
) -> np.ndarray:
    """Sequential inhibition: uniform darts rejected within d_min of a point.

    A point gets ``attempts_per_point`` darts; if the layout wedges (some
    point cannot be placed) the whole layout is redrawn, up to
    ``layout_retries`` times, after which ``PlacementError`` is raised rather
    than relaxing the separation constraint.
    """
    if n == 0:
        return np.empty((0, 2))
    dmin2 = d_min * d_min
    for _ in range(layout_retries):
        pts = np.empty((n, 2))
        count = 0
        budget = attempts_per_point
        buf = np.empty((0, 2))
        pos = 0
        wedged = False
        while count < n:
            if pos >= len(buf):
                block = min(_CANDIDATE_BLOCK, budget)
                if block == 0:
                    wedged = True
                    break
                buf = sample_uniform_disk(block, radius, rng)
                pos = 0
                budget -= block
            x, y = buf[pos]
            pos += 1
            if count == 0 or np.min((pts[:count, 0] - x) ** 2 + (pts[:count, 1] - y) ** 2) >= dmin2:
                pts[count, 0] = x
                pts[count, 1] = y
                count += 1
                budget = attempts_per_point
        if not wedged:
            return pts
    raise PlacementError(
        f"could not place {n} points with separation {d_min} in radius {radius} "
        f"({layout_retries} layouts x {attempts_per_point} attempts per point)"
    )


def sample_gbs_layout(config: ScenarioConfig, rng: np.random.Generator) -> GbsLayout:
    """Sample available and occupied GBS positions as independent uniforms.

    The first ``m_available`` indices are the serving set, the rest the
    interfering set; both sets are i.i.d. uniform on the coverage disk.
    """
    m = config.m_total
    positions = sample_uniform_disk(m, config.coverage_radius_m, rng)
    planar2 = positions[:, 0] ** 2 + positions[:, 1] ** 2
    center_distances = np.sqrt(planar2 + config.swarm_altitude_m**2)
    return GbsLayout(
        positions=positions,
        available_idx=np.arange(config.m_available),
        occupied_idx=np.arange(config.m_available, m),
        center_distances=center_distances,
    )


def sample_swarm_layout(config: ScenarioConfig, rng: np.random.Generator) -> SwarmLayout:
    """Sample the hard-core swarm at the configured altitude; head is UAV 0."""
    planar = sample_hardcore_disk(
        config.n_uavs, config.swarm_radius_m, config.min_separation_m, rng
    )
    positions = np.column_stack([planar, np.full(config.n_uavs, config.swarm_altitude_m)])
    diff = planar[:, None, :] - planar[None, :, :]
    pair = np.sqrt((diff**2).sum(axis=-1))
    return SwarmLayout(positions=positions, head_idx=0, pair_distances=pair)


# --- distance densities -------------------------------------------------------


def gbs_distance_pdf(u: float, config: ScenarioConfig) -> float:
    """Density of the 3D distance from a uniform GBS to the swarm center.

    2u / R^2 on [H, sqrt(R^2 + H^2)], zero outside.
    """
    r2 = config.coverage_radius_m**2
    if u < config.swarm_altitude_m or u > config.max_link_distance_m:
        return 0.0
    return 2.0 * u / r2


def pair_distance_pdf(w: float, radius: float) -> float:
    """Density of the distance between two uniform points in a disk, on [0, 2 radius]."""
    if w < 0.0 or w > 2.0 * radius:
        return 0.0
    x = w / (2.0 * radius)
    return (4.0 * w / (math.pi * radius**2)) * math.acos(x) - (
        2.0 * w**2 / (math.pi * radius**3)
    ) * math.sqrt(max(0.0, 1.0 - x * x))


@lru_cache(maxsize=None)
def pair_distance_truncation(radius: float, d_min: float) -> float:
    """Mass of the pair-distance density on [d_min, 2 radius]."""
    if d_min <= 0.0:
        return 1.0
    return specfun.adaptive_quad(
        lambda w: pair_distance_pdf(w, radius), d_min, 2.0 * radius, rel_tol=1e-12, abs_tol=1e-14
    )


def uav_pair_distance_pdf(w: float, config: ScenarioConfig) -> float:
    """Receiver-to-relay distance density under the simplified swarm model.

    The plain two-uniform-points density renormalized to [d_min, 2 R], which
    stands in for the intractable joint hard-core distances.
    """
    if w < config.min_separation_m or w > 2.0 * config.swarm_radius_m:
        return 0.0
    mass = pair_distance_truncation(config.swarm_radius_m, config.min_separation_m)
    return pair_distance_pdf(w, config.swarm_radius_m) / mass


def layout_to_csv(gbs: GbsLayout, swarm: SwarmLayout) -> str:
    """Debug dump of one sampled scene as CSV rows (x, y, z, role)."""
    lines = ["x,y,z,role"]
    avail = set(gbs.available_idx.tolist())
    for i, (x, y) in enumerate(gbs.positions):
        role = "gbs_available" if i in avail else "gbs_occupied"
        lines.append(f"{x!r},{y!r},0.0,{role}")
    for i, (x, y, z) in enumerate(swarm.positions):
        role = "uav_head" if i == swarm.head_idx else "uav"
        lines.append(f"{x!r},{y!r},{z!r},{role}")
    return "\n".join(lines) + "\n"
