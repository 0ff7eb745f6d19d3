"""Lipschitz test functions on CP^m built from the model eigenfunction.

psi is a bump on B_w(2R), psi_bar a collar vanishing on B_w(r/2), and their
product annulus_cutoff is supported in the doubled annulus 2A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpm_geometry import ProjectivePoint, fs_distance, model_eigenfunction, theta_flow

PSI_LOWER = 3 / 10
PSI_BAR_LOWER = 1 / 6
ANNULUS_LOWER = 1 / 20
ANNULUS_UPPER = 1 / 6


@dataclass(frozen=True)
class Annulus:
    """{x : inner <= d(x, center) < outer}; a ball when inner == 0."""

    center: ProjectivePoint
    inner: float
    outer: float

    def __post_init__(self):
        if not (0.0 <= self.inner < self.outer) or not np.isfinite(self.outer):
            raise ValueError(f"malformed annulus radii ({self.inner}, {self.outer})")

    def doubled(self) -> "Annulus":
        return Annulus(self.center, self.inner / 2, 2 * self.outer)

    def contains(self, points, distance=None) -> np.ndarray:
        d = fs_distance(points, self.center) if distance is None else distance
        return (d >= self.inner) & (d < self.outer)

    def to_json(self) -> dict:
        c = self.center
        center = c.to_json() if isinstance(c, ProjectivePoint) else np.asarray(c).tolist()
        return {"center": center, "inner": self.inner, "outer": self.outer}


def _flowed_model(t, w, p):
    return model_eigenfunction(w, theta_flow(t, w, p))


def psi(R: float, w, p) -> np.ndarray:
    """phi_w(theta_t p) - 1/2 on B_w(2R), zero outside, with t = 1 / tan(2R).

    theta_t carries B_w(2R) onto B_w(pi/4), where phi_w = 1/2.
    """
    if not 0.0 < R < np.pi / 4:
        raise ValueError(f"psi needs R in (0, pi/4), got {R}")
    t = 1.0 / np.tan(2 * R)
    inside = fs_distance(p, w) < 2 * R
    val = np.where(inside, _flowed_model(t, w, p) - 0.5, 0.0)
    return np.maximum(val, 0.0)


def psi_bar(r: float, w, p) -> np.ndarray:
    """(phi_w(theta_t p) + 1)^-1 - 2/3 off B_w(r/2), zero inside, t = 1 / tan(r/2)."""
    if not 0.0 < r < np.pi / 2:
        raise ValueError(f"psi_bar needs r in (0, pi/2), got {r}")
    t = 1.0 / np.tan(r / 2)
    outside = fs_distance(p, w) >= r / 2
    val = np.where(outside, 1.0 / (_flowed_model(t, w, p) + 1.0) - 2.0 / 3.0, 0.0)
    return np.maximum(val, 0.0)


def annulus_cutoff(a: Annulus, p) -> np.ndarray:
    """u_A = psi_R * psi_bar_r, or psi_R alone for a ball (inner == 0)."""
    if a.outer >= np.pi / 4:
        raise ValueError(f"cutoff needs outer radius < pi/4, got {a.outer}")
    u = psi(a.outer, a.center, p)
    if a.inner > 0:
        u = u * psi_bar(a.inner, a.center, p)
    return u


def psi_boundary_value(R: float) -> float:
    """psi on the sphere of radius R: (1 + tan^2 R / tan^2 2R)^-1 - 1/2."""
    return 1.0 / (1.0 + np.tan(R) ** 2 / np.tan(2 * R) ** 2) - 0.5


def psi_bar_boundary_value(r: float) -> float:
    """psi_bar on the sphere of radius r, via (1 + tan^2 r / tan^2(r/2))^-1."""
    phi = 1.0 / (1.0 + np.tan(r) ** 2 / np.tan(r / 2) ** 2)
    return 1.0 / (phi + 1.0) - 2.0 / 3.0
