"""Independent stochastic-geometry Monte-Carlo oracle.

Every analytical quantity in the package has a counterpart here that is
estimated from Poisson point process draws and explicit corridor geometry
rather than from the closed forms.  Estimators are deterministic in
(seed, parameters, trials): work is cut into fixed-size batches and each
batch consumes its own substream spawned from the master seed, so serial
and parallel execution agree bit for bit.

Blockage geometry: a link of length r is blocked when some non-endpoint
node centre falls inside the rectangle of width 2 r_b around the segment
whose longitudinal extent is [r_b, r - r_b] (area 2 r_b (r - 2 r_b), the
exact void-probability exponent of the analytic model).

The timeout estimator defaults to drawing an independent obstacle field
per link.  The analytic timeout multiplies the two void probabilities,
i.e. it treats the two corridors' blockage as conditionally independent;
with a single shared obstacle field the corridors overlap near the origin
and the empirical probability sits many sigma above the formula.  The
shared-field variant stays available for quantifying exactly that gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget, effective_noise, received_power
from .config import Deployment, SystemParams
from .misalignment import beam_misalignment, beam_switch_density
from .sensing import SensingAbility

__all__ = [
    "Scene",
    "McEstimate",
    "sample_scene",
    "is_blocked",
    "estimate_blockage",
    "estimate_timeout",
    "estimate_misalignment",
    "estimate_coverage",
    "nearest_two_distances",
    "default_window_radius",
]

_BATCH = 8192


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo estimate with its binomial standard error."""

    mean: float
    std_error: float
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.std_error < 0.0:
            raise ValueError("std_error must be >= 0")

    def sigmas_off(self, reference: float) -> float:
        """Distance from a reference value in standard errors."""
        if self.std_error == 0.0:
            return 0.0 if self.mean == reference else math.inf
        return (self.mean - reference) / self.std_error


@dataclass
class Scene:
    """One realisation of the node fields inside a simulation disc."""

    window_radius: float
    guard: float
    rng_seed: int
    bs_points: np.ndarray
    mt_points: np.ndarray
    blocker_points: np.ndarray


def _streams(seed: int, n: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _ppp_disc(rng, density: float, radius: float, r_inner: float = 0.0) -> np.ndarray:
    """Homogeneous PPP on the annulus r_inner <= r <= radius."""
    area = math.pi * (radius ** 2 - r_inner ** 2)
    n = rng.poisson(density * area) if density > 0.0 and area > 0.0 else 0
    if n == 0:
        return np.empty((0, 2))
    rr = np.sqrt(rng.random(n) * (radius ** 2 - r_inner ** 2) + r_inner ** 2)
    th = 2.0 * math.pi * rng.random(n)
    return np.column_stack([rr * np.cos(th), rr * np.sin(th)])


def sample_scene(deploy: Deployment, window_radius: float, seed: int,
                 guard: float = 0.0) -> Scene:
    """Draw independent node fields with the typical user at the origin."""
    if not window_radius > 0.0:
        raise ValueError("window_radius must be > 0")
    rngs = _streams(seed, 3)
    return Scene(
        window_radius=window_radius, guard=guard, rng_seed=seed,
        bs_points=_ppp_disc(rngs[0], deploy.lambda_b, window_radius),
        mt_points=_ppp_disc(rngs[1], deploy.lambda_m, window_radius),
        blocker_points=_ppp_disc(rngs[2], deploy.lambda_s, window_radius),
    )


def _corridor_hit(obstacles: np.ndarray, p_from: np.ndarray, p_to: np.ndarray,
                  r_b: float) -> bool:
    if obstacles.shape[0] == 0:
        return False
    d = p_to - p_from
    r = float(np.hypot(d[0], d[1]))
    if r < 2.0 * r_b:
        return False
    ux, uy = d[0] / r, d[1] / r
    rel = obstacles - p_from
    lon = rel[:, 0] * ux + rel[:, 1] * uy
    lat = -rel[:, 0] * uy + rel[:, 1] * ux
    return bool(np.any((np.abs(lat) < r_b) & (lon > r_b) & (lon < r - r_b)))


def is_blocked(scene: Scene, p_from, p_to, deploy: Deployment,
               include_bs: bool = True) -> bool:
    """Corridor test of the (p_from, p_to) link against a scene.

    Obstacles are the blocker and user fields, plus the node field itself
    when include_bs is set (interference links); points coinciding with
    either endpoint are excluded.
    """
    p_from = np.asarray(p_from, dtype=float)
    p_to = np.asarray(p_to, dtype=float)
    parts = [scene.blocker_points, scene.mt_points]
    if include_bs:
        parts.append(scene.bs_points)
    obstacles = np.vstack([p for p in parts if p.shape[0]]) if any(
        p.shape[0] for p in parts) else np.empty((0, 2))
    if obstacles.shape[0]:
        keep = (np.hypot(*(obstacles - p_from).T) > 1e-9) & \
               (np.hypot(*(obstacles - p_to).T) > 1e-9)
        obstacles = obstacles[keep]
    return _corridor_hit(obstacles, p_from, p_to, deploy.r_b)


def _blocked_bulk(obs_x, obs_y, counts, bs_x, bs_y, r_b):
    """Vectorised corridor test; one segment origin->(bs_x, bs_y) per trial.

    obs_* are flattened obstacle coordinates grouped by trial with sizes
    `counts`; returns a boolean 'blocked' per trial.
    """
    n_trials = bs_x.size
    r = np.hypot(bs_x, bs_y)
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(r > 0, bs_x / np.maximum(r, 1e-300), 0.0)
        uy = np.where(r > 0, bs_y / np.maximum(r, 1e-300), 0.0)
    idx = np.repeat(np.arange(n_trials), counts)
    lon = obs_x * ux[idx] + obs_y * uy[idx]
    lat = -obs_x * uy[idx] + obs_y * ux[idx]
    hit = (np.abs(lat) < r_b) & (lon > r_b) & (lon < r[idx] - r_b)
    return np.bincount(idx[hit], minlength=n_trials) > 0


def _obstacle_field(rng, density: float, radii: np.ndarray):
    """Per-trial PPP discs with individual radii; returns flat coords + counts."""
    means = density * math.pi * radii ** 2
    counts = rng.poisson(means)
    total = int(counts.sum())
    if total == 0:
        return (np.empty(0), np.empty(0), counts)
    rad = np.repeat(radii, counts) * np.sqrt(rng.random(total))
    ang = 2.0 * math.pi * rng.random(total)
    return rad * np.cos(ang), rad * np.sin(ang), counts


def estimate_blockage(deploy: Deployment, r: float, trials: int,
                      seed: int) -> McEstimate:
    """Empirical corridor-blockage frequency of a link of length r.

    Obstacles are the user and blocker fields (density lambda_m + lambda_s),
    matching the analytic link-blockage law.
    """
    if r < 2.0 * deploy.r_b:
        raise ValueError("estimate_blockage requires r >= 2 r_b")
    density = deploy.lambda_m + deploy.lambda_s
    n_batches = (trials + _BATCH - 1) // _BATCH
    rngs = _streams(seed, n_batches)
    hits = 0
    done = 0
    for k in range(n_batches):
        b = min(_BATCH, trials - done)
        radii = np.full(b, r + deploy.r_b)
        ox, oy, counts = _obstacle_field(rngs[k], density, radii)
        blocked = _blocked_bulk(ox, oy, counts,
                                np.full(b, r), np.zeros(b), deploy.r_b)
        hits += int(blocked.sum())
        done += b
    p = hits / trials
    return McEstimate(mean=p, std_error=math.sqrt(p * (1 - p) / trials), trials=trials)


def _nearest_two_batch(rng, deploy: Deployment, b: int):
    """Positions of the two nearest nodes to the origin for b trials."""
    # window large enough that the second-nearest lies inside w.h.p.
    r_win = math.sqrt(36.0 / (deploy.lambda_b * math.pi))
    mean = deploy.lambda_b * math.pi * r_win ** 2  # = 36
    counts = rng.poisson(mean, size=b)
    counts = np.maximum(counts, 2)  # probability ~1e-9 guard, keeps shapes sane
    max_n = int(counts.max())
    u = rng.random((b, max_n))
    rad = r_win * np.sqrt(u)
    ang = 2.0 * math.pi * rng.random((b, max_n))
    col = np.arange(max_n)
    rad = np.where(col[None, :] < counts[:, None], rad, np.inf)
    order = np.argpartition(rad, 1, axis=1)[:, :2]
    rows = np.arange(b)[:, None]
    r12 = rad[rows, order]
    a12 = ang[rows, order]
    swap = r12[:, 0] > r12[:, 1]
    r12[swap] = r12[swap][:, ::-1]
    a12[swap] = a12[swap][:, ::-1]
    return r12, a12


def nearest_two_distances(deploy: Deployment, samples: int, seed: int):
    """Sampled (r1, r2) distances of the two nearest nodes to the origin."""
    n_batches = (samples + _BATCH - 1) // _BATCH
    rngs = _streams(seed, n_batches)
    out = np.empty((samples, 2))
    done = 0
    for k in range(n_batches):
        b = min(_BATCH, samples - done)
        r12, _ = _nearest_two_batch(rngs[k], deploy, b)
        out[done:done + b] = r12
        done += b
    return out[:, 0], out[:, 1]


def estimate_timeout(deploy: Deployment, trials: int, seed: int,
                     shared_obstacles: bool = False) -> McEstimate:
    """Fraction of scenes whose two nearest nodes are both corridor-blocked.

    By default each link's corridor is tested against its own obstacle
    field, matching the analytic factorisation of the two blockage events;
    shared_obstacles=True uses one common field instead (physically shared
    geometry, which the closed form does not model).
    """
    if trials < 1000:
        raise ValueError("estimate_timeout needs at least 1e3 trials")
    density = deploy.lambda_m + deploy.lambda_s
    n_batches = (trials + _BATCH - 1) // _BATCH
    rngs = _streams(seed, n_batches)
    hits = 0
    done = 0
    for k in range(n_batches):
        rng = rngs[k]
        b = min(_BATCH, trials - done)
        r12, a12 = _nearest_two_batch(rng, deploy, b)
        b1x, b1y = r12[:, 0] * np.cos(a12[:, 0]), r12[:, 0] * np.sin(a12[:, 0])
        b2x, b2y = r12[:, 1] * np.cos(a12[:, 1]), r12[:, 1] * np.sin(a12[:, 1])
        radii = r12[:, 1] + deploy.r_b
        ox, oy, counts = _obstacle_field(rng, density, radii)
        blocked1 = _blocked_bulk(ox, oy, counts, b1x, b1y, deploy.r_b)
        if shared_obstacles:
            blocked2 = _blocked_bulk(ox, oy, counts, b2x, b2y, deploy.r_b)
        else:
            ox2, oy2, counts2 = _obstacle_field(rng, density, radii)
            blocked2 = _blocked_bulk(ox2, oy2, counts2, b2x, b2y, deploy.r_b)
        hits += int((blocked1 & blocked2).sum())
        done += b
    p = hits / trials
    return McEstimate(mean=p, std_error=math.sqrt(p * (1 - p) / trials), trials=trials)


def estimate_misalignment(deploy: Deployment, ability: SensingAbility,
                          tau: float, trials: int, seed: int) -> dict:
    """Monte-Carlo counterparts of the misalignment constituents.

    The sensing-error event draws the beam-coverage length from its
    exponential law and the nearest node's blockage from corridor geometry;
    the timeout term reuses estimate_timeout.  Returns a dict with
    'p_err', 'p_to' and 'p_ms' estimates (p_ms as the additive bound).
    """
    mu_g = beam_switch_density(deploy)
    density = deploy.lambda_m + deploy.lambda_s
    lo = max((deploy.v - ability.delta_v) * tau - ability.delta_db, 0.0)
    hi = deploy.v * tau

    n_batches = (trials + _BATCH - 1) // _BATCH
    rngs = _streams(seed, n_batches)
    hits = 0
    done = 0
    for k in range(n_batches):
        rng = rngs[k]
        b = min(_BATCH, trials - done)
        d_b = rng.exponential(1.0 / mu_g, size=b)
        miss = (d_b > lo) & (d_b < hi)
        r12, a12 = _nearest_two_batch(rng, deploy, b)
        b1x, b1y = r12[:, 0] * np.cos(a12[:, 0]), r12[:, 0] * np.sin(a12[:, 0])
        ox, oy, counts = _obstacle_field(rng, density, r12[:, 0] + deploy.r_b)
        blocked1 = _blocked_bulk(ox, oy, counts, b1x, b1y, deploy.r_b)
        hits += int((miss & ~blocked1).sum())
        done += b
    p_err = hits / trials
    err_se = math.sqrt(p_err * (1 - p_err) / trials)
    to = estimate_timeout(deploy, trials, seed + 1)
    p_ms = min(p_err + to.mean, 1.0)
    se = math.sqrt(err_se ** 2 + to.std_error ** 2)
    return {
        "p_err": McEstimate(p_err, err_se, trials),
        "p_to": to,
        "p_ms": McEstimate(p_ms, se, trials),
    }


def default_window_radius(system: SystemParams, deploy: Deployment,
                          r1: float) -> float:
    """Simulation disc radius capturing the interference and noise tails."""
    reach = 14.0 / max(system.k_abs, 1e-2)
    lam = deploy.lambda_b + deploy.lambda_m + deploy.lambda_s
    reach = max(reach, 5.0 / max(2.0 * lam * deploy.r_b, 1e-3))
    return min(max(60.0, r1 + 20.0, reach), 1500.0)


def estimate_coverage(deploy: Deployment, budget: LinkBudget,
                      system: SystemParams, ability: SensingAbility,
                      r1: float, threshold: float, trials: int, seed: int,
                      lower_bound_mode: str = "theorem",
                      window_radius: float | None = None) -> McEstimate:
    """Fraction of trials with aligned beams and SINR above the threshold.

    The serving node is pinned at distance r1; interfering nodes are a PPP
    on the annulus between the lower-bound radius (2 r_b in theorem mode,
    r1 in derivation mode) and the window edge.  Every node re-radiates
    absorption noise; a node interferes at full power when its sweep/
    misalignment and orientation marks fire and its corridor to the origin
    is geometrically unblocked (other nodes, users and blockers all count
    as obstacles).  Alignment is an independent Bernoulli with the
    analytic misalignment probability for the given ability.
    """
    if r1 < 2.0 * deploy.r_b:
        raise ValueError("estimate_coverage requires r1 >= 2 r_b")
    if threshold <= 0.0:
        raise ValueError("threshold must be > 0")
    if lower_bound_mode not in ("theorem", "derivation"):
        raise ValueError("lower_bound_mode must be 'theorem' or 'derivation'")

    p_ms = beam_misalignment(deploy, ability, system.tau).p_ms
    r_lo = 2.0 * deploy.r_b if lower_bound_mode == "theorem" else r1
    r_win = window_radius or default_window_radius(system, deploy, r1)
    duty = deploy.n_b * system.t_ssb / system.tau
    q_mark = (duty + (1.0 - duty) * p_ms) / (deploy.n_b * deploy.n_m)
    k_over = budget.k_abs / (deploy.n_b * deploy.n_m)
    margin = received_power(budget, r1) / threshold - \
        effective_noise(budget, deploy, system, r1)
    obstacle_density = deploy.lambda_m + deploy.lambda_s
    serving = np.array([r1, 0.0])

    n_batches = (trials + _BATCH - 1) // _BATCH
    rngs = _streams(seed, n_batches)
    hits = 0
    done = 0
    for k in range(n_batches):
        rng = rngs[k]
        b = min(_BATCH, trials - done)
        counts = rng.poisson(deploy.lambda_b * math.pi * (r_win ** 2 - r_lo ** 2),
                             size=b)
        total = int(counts.sum())
        rad = np.sqrt(rng.random(total) * (r_win ** 2 - r_lo ** 2) + r_lo ** 2)
        ang = 2.0 * math.pi * rng.random(total)
        idx = np.repeat(np.arange(b), counts)
        g = rad ** -2 * np.exp(-budget.k_abs * rad)
        i_eff = np.bincount(idx, weights=k_over * budget.a * g, minlength=b)

        marks = rng.random(total) < q_mark
        aligned = rng.random(b) >= p_ms

        if np.any(marks):
            # corridor test only for the rare marked candidates
            mark_trials = np.unique(idx[marks])
            for t in mark_trials:
                sel = (idx == t)
                bs_xy = np.column_stack([rad[sel] * np.cos(ang[sel]),
                                         rad[sel] * np.sin(ang[sel])])
                others = _ppp_disc(rng, obstacle_density, r_win)
                obstacles = np.vstack([bs_xy, serving[None, :], others]) \
                    if others.shape[0] else np.vstack([bs_xy, serving[None, :]])
                cand = np.where(marks & sel)[0]
                for j in cand:
                    pos = np.array([rad[j] * np.cos(ang[j]), rad[j] * np.sin(ang[j])])
                    keep = np.hypot(*(obstacles - pos).T) > 1e-9
                    if not _corridor_hit(obstacles[keep], np.zeros(2), pos, deploy.r_b):
                        i_eff[t] += budget.a * rad[j] ** -2 * math.exp(-budget.k_abs * rad[j])

        hits += int((aligned & (i_eff < margin)).sum())
        done += b
    p = hits / trials
    return McEstimate(mean=p, std_error=math.sqrt(p * (1 - p) / trials), trials=trials)
