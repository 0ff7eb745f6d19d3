"""Finite metric-measure spaces and annuli with disjoint doubles.

A constructive search for k annuli {A_i} whose doubles 2A_i are pairwise
disjoint on the cloud and whose masses satisfy mu(A_i) >= c mu(X) / k. The
search is a greedy heuristic; every result is re-checked by ``verify_packing``,
which shares no code with the search beyond the distance function.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .cpm_geometry import ProjectivePoint
from .cutoffs import Annulus

EPS = 1e-12


def fs_pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    return np.arccos(np.clip(np.abs(a @ np.conj(b).T), 0.0, 1.0))


def euclidean_pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return cdist(np.asarray(a, float), np.asarray(b, float))


METRICS: dict[str, Callable] = {"fs": fs_pairwise, "euclidean": euclidean_pairwise}

# Analytic covering constant of CP^m and the matching packing constant c, c^-1 = 8 N^12.
def cpm_covering_constant(m: int) -> int:
    return 9 ** (2 * m)


def theoretical_c(m: int) -> float:
    return 1.0 / (8.0 * float(cpm_covering_constant(m)) ** 12)


class PackingPreconditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightedPointCloud:
    points: np.ndarray
    weights: np.ndarray
    metric: str = "fs"

    def __post_init__(self):
        pts = np.asarray(self.points)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("empty point cloud")
        if w.shape != (len(pts),) or np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be nonnegative, one per point, not all zero")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.points)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def pairwise(self, a, b) -> np.ndarray:
        return METRICS[self.metric](np.atleast_2d(a), np.atleast_2d(b))

    def distances_to(self, center) -> np.ndarray:
        c = center.coords if isinstance(center, ProjectivePoint) else np.asarray(center)
        return self.pairwise(self.points, c[None, :])[:, 0]

    def scaled(self, s: float) -> "WeightedPointCloud":
        return WeightedPointCloud(self.points, self.weights * s, self.metric)

    def to_csv(self, path) -> None:
        cplx = np.iscomplexobj(self.points)
        d = self.points.shape[1]
        header = ["index"]
        header += [f"{p}{i}" for i in range(d) for p in ("re", "im")] if cplx else [f"x{i}" for i in range(d)]
        header.append("weight")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for i, (x, wt) in enumerate(zip(self.points, self.weights)):
                coords = [v for c in x for v in (repr(float(c.real)), repr(float(c.imag)))] if cplx else [repr(float(c)) for c in x]
                w.writerow([i, *coords, repr(float(wt))])

    @classmethod
    def from_csv(cls, path, metric: Optional[str] = None) -> "WeightedPointCloud":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], np.array(rows[1:], dtype=float)
        body = body[np.argsort(body[:, 0])]
        coords, weights = body[:, 1:-1], body[:, -1]
        if header[1].startswith("re"):
            pts = coords[:, 0::2] + 1j * coords[:, 1::2]
            metric = metric or "fs"
        else:
            pts = coords
            metric = metric or "euclidean"
        return cls(pts, weights, metric)


@dataclass
class PackingResult:
    annuli: list
    measures: np.ndarray
    double_measures: np.ndarray
    total: float
    k: int
    target_fraction: float
    satisfied: bool
    center_indices: list = field(default_factory=list)

    @property
    def achieved_fraction(self) -> float:
        if len(self.annuli) < self.k:
            return 0.0
        return float(np.min(self.measures) * self.k / self.total)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "total": self.total,
            "target_fraction": self.target_fraction,
            "achieved_fraction": self.achieved_fraction,
            "satisfied": self.satisfied,
            "annuli": [dict(a.to_json(), measure=float(m), double_measure=float(dm), center_index=int(ci))
                       for a, m, dm, ci in zip(self.annuli, self.measures, self.double_measures,
                                               self.center_indices)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def annulus_measure(cloud: WeightedPointCloud, a: Annulus, doubled: bool = False) -> float:
    """Mass of {inner <= d(x, center) < outer} (or of the doubled annulus)."""
    if doubled:
        a = a.doubled()
    d = cloud.distances_to(a.center)
    return float(cloud.weights[(d >= a.inner) & (d < a.outer)].sum())


def _above(x):
    # smallest convenient radius strictly greater than x
    return x * (1 + 4 * EPS) + EPS


def _choose_candidates(cloud, n_candidates, rng):
    n = len(cloud)
    if n <= n_candidates:
        return np.arange(n)
    p = cloud.weights / cloud.total
    nz = np.count_nonzero(p)
    size = min(n_candidates, nz)
    return np.sort(rng.choice(n, size=size, replace=False, p=p))


def _greedy(dist, order, sdist, cum, weights, k, target, max_outer):
    """Pick k annuli by smallest doubled mass; returns [(cand, inner, outer)] or None."""
    n = dist.shape[1]
    blocked = np.zeros(n, dtype=bool)
    chosen = []
    for _ in range(k):
        best = None
        for c in range(dist.shape[0]):
            sd, cw = sdist[c], cum[c]
            bpos = np.flatnonzero(blocked[order[c]])
            lo = np.concatenate([[-1], bpos])
            hi = np.concatenate([bpos, [n]])
            keep = hi - lo > 1
            lo, hi = lo[keep], hi[keep]
            if len(lo) == 0:
                continue
            b_lo = np.where(lo >= 0, sd[np.maximum(lo, 0)], -np.inf)
            b_hi = np.where(hi < n, sd[np.minimum(hi, n - 1)], np.inf)
            inner = np.where(lo >= 0, 2 * _above(b_lo), 0.0)
            start = np.searchsorted(sd, inner, side="left")
            before = np.where(start > 0, cw[np.maximum(start - 1, 0)], 0.0)
            j = np.searchsorted(cw, before + target * (1 - 1e-12), side="left")
            ok = j < n
            j = np.minimum(j, n - 1)
            outer = _above(sd[j])
            ok &= 2 * outer <= b_hi
            ok &= outer > inner
            if max_outer is not None:
                ok &= outer < max_outer
            if not ok.any():
                continue
            dstart = np.searchsorted(sd, inner / 2, side="left")
            dend = np.searchsorted(sd, 2 * outer, side="left")
            dmass = np.where(dend > 0, cw[np.maximum(dend - 1, 0)], 0.0) - np.where(
                dstart > 0, cw[np.maximum(dstart - 1, 0)], 0.0)
            dmass = np.where(ok, dmass, np.inf)
            g = int(np.argmin(dmass))
            key = (dmass[g], outer[g], c)
            if best is None or key < best[0]:
                best = (key, c, float(inner[g]), float(outer[g]))
        if best is None:
            return None
        _, c, r, R = best
        chosen.append((c, r, R))
        d = dist[c]
        blocked |= (d >= r / 2) & (d < 2 * R)
    return chosen


def _grow(dist, weights, chosen, max_outer, rounds=80, factor=1.15):
    """Enlarge annuli (outer up, inner down) while doubles stay disjoint."""
    n = dist.shape[1]
    k = len(chosen)
    rad = [[r, R] for _, r, R in chosen]
    rows = [dist[c] for c, _, _ in chosen]
    masks = [(rows[i] >= rad[i][0] / 2) & (rows[i] < 2 * rad[i][1]) for i in range(k)]
    counts = np.sum(masks, axis=0)
    caps = [_above(row.max()) for row in rows]
    if max_outer is not None:
        caps = [min(cp, np.nextafter(max_outer, 0)) for cp in caps]

    def mass(i):
        d = rows[i]
        return weights[(d >= rad[i][0]) & (d < rad[i][1])].sum()

    for _ in range(rounds):
        changed = False
        for i in sorted(range(k), key=mass):
            d = rows[i]
            others = (counts - masks[i]) > 0
            r, R = rad[i]
            ob = d[others]
            hi = ob[ob >= 2 * R].min(initial=np.inf)
            lo = ob[ob < r / 2].max(initial=-np.inf)
            new_R = min(R * factor, hi / 2, caps[i])
            if r > 0:
                new_r = r / factor
                if np.isfinite(lo):
                    new_r = max(new_r, 2 * _above(lo))
                elif new_r < 1e-6:
                    new_r = 0.0
                new_r = min(new_r, r)
            else:
                new_r = 0.0
            new_R = max(new_R, R)
            if new_R > R or new_r < r:
                rad[i] = [new_r, new_R]
                counts -= masks[i]
                masks[i] = (d >= new_r / 2) & (d < 2 * new_R)
                counts += masks[i]
                changed = True
        if not changed:
            break
    return [(c, r, R) for (c, _, _), (r, R) in zip(chosen, rad)]


def pack_annuli(cloud: WeightedPointCloud, k: int, c_target: float, seed: int = 0,
                n_candidates: int = 96, max_outer: Optional[float] = None,
                grow: bool = True, check_atoms: bool = True) -> PackingResult:
    """k annuli with disjoint doubles, each carrying at least c_target mu(X) / k.

    Centres are drawn from the cloud (weighted, seeded). Each greedy step takes
    the feasible annulus with least doubled mass; afterwards annuli are grown
    fairly. If k annuli at the requested mass are not found, the target is
    halved until they are, and the result is flagged unsatisfied.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not 0 < c_target <= 1:
        raise ValueError("c_target must lie in (0, 1]")
    total = cloud.total
    if check_atoms and cloud.weights.max() > c_target * total / (2 * k):
        raise PackingPreconditionError(
            f"heaviest atom {cloud.weights.max():.3g} exceeds c mu(X)/(2k) = {c_target * total / (2 * k):.3g}")
    rng = np.random.default_rng(seed)
    cand = _choose_candidates(cloud, n_candidates, rng)
    centers = [ProjectivePoint(cloud.points[c]) if cloud.metric == "fs" else cloud.points[c] for c in cand]
    # same distance path as verify_packing, so boundary points agree bitwise
    dist = np.stack([cloud.distances_to(c) for c in centers])
    order = np.argsort(dist, axis=1, kind="stable")
    sdist = np.take_along_axis(dist, order, axis=1)
    cum = np.cumsum(cloud.weights[order], axis=1)

    target = c_target * total / k
    chosen = None
    for _ in range(60):
        chosen = _greedy(dist, order, sdist, cum, cloud.weights, k, target, max_outer)
        if chosen is not None:
            break
        target /= 2
    if chosen is None:
        return PackingResult([], np.zeros(0), np.zeros(0), total, k, c_target, False)
    if grow:
        chosen = _grow(dist, cloud.weights, chosen, max_outer)

    annuli, meas, dmeas, idx = [], [], [], []
    for c, r, R in chosen:
        a = Annulus(centers[c], r, R)
        d = dist[c]
        annuli.append(a)
        meas.append(cloud.weights[(d >= r) & (d < R)].sum())
        dmeas.append(cloud.weights[(d >= r / 2) & (d < 2 * R)].sum())
        idx.append(int(cand[c]))
    meas = np.array(meas)
    result = PackingResult(annuli, meas, np.array(dmeas), total, k, c_target, False, idx)
    result.satisfied = bool(result.achieved_fraction >= c_target * (1 - 1e-12))
    return result


def verify_packing(cloud: WeightedPointCloud, result: PackingResult, c_target: Optional[float] = None) -> dict:
    """Brute-force re-check: masses by direct summation, doubles pairwise disjoint."""
    c = result.target_fraction if c_target is None else c_target
    k = result.k
    member = []
    masses = []
    for a in result.annuli:
        d = cloud.distances_to(a.center)
        masses.append(float(cloud.weights[(d >= a.inner) & (d < a.outer)].sum()))
        member.append((d >= a.inner / 2) & (d < 2 * a.outer))
    overlaps = 0
    for i in range(len(member)):
        for j in range(i + 1, len(member)):
            overlaps += int(np.count_nonzero(member[i] & member[j]))
    need = c * cloud.total / k
    mass_ok = len(masses) == k and all(m >= need * (1 - 1e-12) for m in masses)
    return {
        "count_ok": len(result.annuli) == k,
        "disjoint_doubles": overlaps == 0,
        "overlapping_points": overlaps,
        "mass_ok": mass_ok,
        "masses": masses,
        "required": need,
        "ok": len(result.annuli) == k and overlaps == 0 and mass_ok,
    }


def covering_number(cloud: WeightedPointCloud, trials: int = 50, seed: int = 0,
                    max_ball: int = 1500) -> int:
    """Empirical covering constant: the largest greedy (r/2)-cover of a sampled ball.

    Each trial picks a cloud point p and a radius r, then covers the cloud
    points of B_p(r) greedily by balls of radius r/2 centred at those points.
    """
    if len(cloud) == 0:
        raise ValueError("empty cloud")
    if len(cloud) == 1:
        return 1
    rng = np.random.default_rng(seed)
    best = 1
    for _ in range(trials):
        p = int(rng.integers(len(cloud)))
        d = cloud.distances_to(cloud.points[p])
        srt = np.sort(d)
        lo = srt[min(20, len(srt) - 1)]
        hi = srt[min(max_ball, len(srt)) - 1]
        if hi <= 0:
            continue
        r = float(np.exp(rng.uniform(np.log(max(lo, hi * 1e-3)), np.log(hi)))) if hi > lo else hi
        ball = np.flatnonzero(d < r)
        if len(ball) <= 1:
            continue
        pd = cloud.pairwise(cloud.points[ball], cloud.points[ball]) < r / 2
        uncovered = np.ones(len(ball), dtype=bool)
        count = 0
        while uncovered.any():
            gain = pd[:, uncovered].sum(axis=1)
            j = int(np.argmax(gain))
            uncovered &= ~pd[j]
            count += 1
        best = max(best, count)
    return best
