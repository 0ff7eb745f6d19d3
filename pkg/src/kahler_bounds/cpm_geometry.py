"""Fubini-Study geometry of complex projective space CP^m.

The metric is normalised so that the diameter of CP^m is pi/2; for m = 1 this
is the round sphere of radius 1/2 (area pi, first eigenvalue 8).

Every function accepts either a :class:`ProjectivePoint` or a raw complex array
whose last axis holds homogeneous coordinates, so that the same code evaluates
one point or a whole vertex set at once.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOL = 1e-10
CUT_TOL = 1e-10


def _coords(p) -> np.ndarray:
    if isinstance(p, ProjectivePoint):
        return p.coords
    return np.asarray(p, dtype=complex)


def _unit(z: np.ndarray) -> np.ndarray:
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point [Z] of CP^m, stored in canonical form.

    Canonical form: unit norm, first coordinate of modulus > TOL made real
    positive. Equality is projective and tolerance based.
    """

    coords: np.ndarray

    def __post_init__(self):
        z = np.array(self.coords, dtype=complex).reshape(-1)
        if z.size < 2:
            raise ValueError("need at least two homogeneous coordinates")
        n = np.linalg.norm(z)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("homogeneous coordinates must not all vanish")
        z = z / n
        lead = np.flatnonzero(np.abs(z) > TOL)[0]
        z = z * (abs(z[lead]) / z[lead])
        z[lead] = abs(z[lead])
        z.setflags(write=False)
        object.__setattr__(self, "coords", z)

    @property
    def m(self) -> int:
        return self.coords.size - 1

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if other.m != self.m:
            return False
        return abs(abs(np.vdot(other.coords, self.coords)) - 1.0) < TOL

    def __hash__(self):
        # coarse rounding so that nearly equal points usually share a bucket
        return hash(tuple(np.round(self.coords, 6).tolist()))

    def __repr__(self):
        inner = ":".join(f"{c:.4g}" for c in self.coords)
        return f"ProjectivePoint([{inner}])"

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.coords]

    @classmethod
    def from_json(cls, data) -> "ProjectivePoint":
        arr = np.asarray(data, dtype=float)
        return cls(arr[:, 0] + 1j * arr[:, 1])


def fs_distance(p, q) -> np.ndarray:
    """Fubini-Study distance arccos(|<Z,W>| / |Z||W|), in [0, pi/2]."""
    z, w = _coords(p), _coords(q)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: CP^{z.shape[-1] - 1} vs CP^{w.shape[-1] - 1}")
    # averaging both orders makes the result exactly symmetric in floating point
    c = 0.5 * (np.abs(np.sum(np.conj(w) * z, axis=-1)) + np.abs(np.sum(np.conj(z) * w, axis=-1)))
    c = c / (np.linalg.norm(z, axis=-1) * np.linalg.norm(w, axis=-1))
    return np.arccos(np.clip(c, 0.0, 1.0))


def model_eigenfunction(w, p) -> np.ndarray:
    """phi_w(p) = |<Z,W>|^2 / (|Z|^2 |W|^2) = cos^2 dist(p, w).

    phi_w - 1/(m+1) is a first eigenfunction of the Laplacian on CP^m.
    """
    z, ww = _coords(p), _coords(w)
    if z.shape[-1] != ww.shape[-1]:
        raise ValueError("dimension mismatch")
    num = np.abs(np.sum(np.conj(ww) * z, axis=-1)) ** 2
    den = np.sum(np.abs(z) ** 2, axis=-1) * np.sum(np.abs(ww) ** 2, axis=-1)
    return num / den


def moment_map(p) -> np.ndarray:
    """tau([Z]) = i Z Z^* / Z^* Z, shape (..., m+1, m+1).

    Anti-Hermitian with trace i; -i*tau is the orthogonal projector onto [Z].
    """
    z = _coords(p)
    nrm2 = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    return 1j * z[..., :, None] * np.conj(z)[..., None, :] / nrm2


def theta_flow(t: float, w, p):
    """Dilation biholomorphism: fix the W-component, scale its complement by t.

    In the affine chart centred at w this is zeta -> t * zeta. Returns a
    ProjectivePoint when given one, otherwise a coordinate array.
    """
    if not t > 0:
        raise ValueError(f"flow parameter must be positive, got {t}")
    z, ww = _coords(p), _unit(_coords(w))
    along = np.sum(np.conj(ww) * z, axis=-1, keepdims=True) * ww
    out = along + t * (z - along)
    return ProjectivePoint(out) if isinstance(p, ProjectivePoint) else out


def ball_image_radius(t: float, r: float) -> float:
    """Radius of theta_flow(t, w, .)(B_w(r)), from tan(rho) = t tan(r)."""
    if not 0.0 < r < np.pi / 2:
        raise ValueError(f"radius must lie in (0, pi/2), got {r}")
    if not t > 0:
        raise ValueError(f"flow parameter must be positive, got {t}")
    return float(np.arctan(t * np.tan(r)))


def unitary_to_base(w) -> np.ndarray:
    """Unitary U with U w/|w| = e_0, a rotation in span{w, e_0} times a phase.

    U is the identity for w = e_0, so the chart at [1:0:...:0] is the standard
    one, zeta = (z_1/z_0, ..., z_m/z_0).
    """
    v = _unit(_coords(w))
    a = abs(v[0])
    phase = np.exp(-1j * np.angle(v[0])) if a > 0 else 1.0 + 0j
    x = v[1:] * phase
    n = v.size
    u = np.empty((n, n), dtype=complex)
    u[0, 0] = a
    u[0, 1:] = np.conj(x)
    u[1:, 0] = -x
    u[1:, 1:] = np.eye(n - 1) - np.outer(x, np.conj(x)) / (1.0 + a)
    return phase * u


def point_to_chart(w, p) -> np.ndarray:
    """Affine coordinates zeta in C^m of p in the chart centred at w.

    Raises for points on (or numerically at) the cut locus of w.
    """
    u = unitary_to_base(w)
    z = _unit(_coords(p)) @ u.T
    lead = z[..., 0]
    if np.any(np.abs(lead) < CUT_TOL):
        raise ValueError("point lies on the cut locus of the chart centre")
    return z[..., 1:] / lead[..., None]


def chart_to_point(w, zeta):
    """Inverse of point_to_chart: [U^* (1, zeta)]."""
    u = unitary_to_base(w)
    zeta = np.asarray(zeta, dtype=complex)
    ones = np.ones(zeta.shape[:-1] + (1,), dtype=complex)
    z = np.concatenate([ones, zeta], axis=-1) @ np.conj(u)
    if z.ndim == 1:
        return ProjectivePoint(z)
    return z


def pluecker_embed(basis: Sequence[Sequence[complex]]) -> ProjectivePoint:
    """[e_1 ^ ... ^ e_r] as the point of r x r minors, rows in lexicographic order."""
    a = np.asarray(basis, dtype=complex)
    if a.ndim != 2:
        raise ValueError("basis must be a list of vectors")
    r, n = a.shape
    if r > n or np.linalg.matrix_rank(a) < r:
        raise ValueError("basis vectors are linearly dependent")
    cols = a.T
    minors = [np.linalg.det(cols[list(rows)]) for rows in itertools.combinations(range(n), r)]
    return ProjectivePoint(np.array(minors))


# Chart formulas at the base point (any centre, by unitary equivariance).

def chart_fs_hermitian(zeta: np.ndarray) -> np.ndarray:
    """h_{a b} = d_a dbar_b log(1 + |zeta|^2), the FS Hermitian matrix in the chart."""
    zeta = np.asarray(zeta, dtype=complex)
    s = 1.0 + np.vdot(zeta, zeta).real
    return np.eye(zeta.size) / s - np.outer(np.conj(zeta), zeta) / s**2


def chart_gradient_model(zeta: np.ndarray) -> np.ndarray:
    """Riemannian gradient of f = (1 + |zeta|^2)^-1 under the chart FS metric.

    With g(X, Y) = Re sum h_ab X_a conj(Y_b) and df(Y) = 2 Re sum dbar_b f conj(Y_b),
    the gradient G solves h^T G = 2 dbar f.
    """
    zeta = np.asarray(zeta, dtype=complex)
    s = 1.0 + np.vdot(zeta, zeta).real
    dbar_f = -zeta / s**2
    return np.linalg.solve(chart_fs_hermitian(zeta).T, 2.0 * dbar_f)


def chart_fs_form(zeta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """omega_FS(X, Y) for complex chart tangent vectors X, Y."""
    h = chart_fs_hermitian(zeta)
    return float(-np.imag(np.asarray(x) @ h @ np.conj(y)))


def moment_form(w, zeta: np.ndarray, x: np.ndarray, y: np.ndarray,
                step: float = 1e-5, printed: bool = False) -> float:
    """-(i/2) sum_{jl} d' tau_jl ^ d'' tau_lj evaluated on chart vectors X, Y.

    Derivatives of the moment map come from central differences along the
    chart. With ``printed=True`` the full differentials d tau are wedged
    instead; that sum cancels pairwise and is identically zero.
    """
    zeta = np.asarray(zeta, dtype=complex)

    def dtau(v):
        plus = moment_map(chart_to_point(w, zeta + step * v))
        minus = moment_map(chart_to_point(w, zeta - step * v))
        return (plus - minus) / (2 * step)

    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    dx, dy, djx, djy = dtau(x), dtau(y), dtau(1j * x), dtau(1j * y)
    if printed:
        a_x, a_y, b_x, b_y = dx, dy, dx, dy
    else:
        a_x, a_y = (dx - 1j * djx) / 2, (dy - 1j * djy) / 2
        b_x, b_y = (dx + 1j * djx) / 2, (dy + 1j * djy) / 2
    wedge = np.sum(a_x * b_y.T) - np.sum(a_y * b_x.T)
    return float(np.real(-0.5j * wedge))


def random_points(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """n points uniform for the FS volume (normalised complex Gaussians)."""
    z = rng.standard_normal((n, m + 1)) + 1j * rng.standard_normal((n, m + 1))
    return _unit(z)


def random_special_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    from scipy.stats import unitary_group

    u = unitary_group.rvs(m + 1, random_state=rng)
    return u / np.linalg.det(u) ** (1.0 / (m + 1))


def sphere_points_at_distance(rng: np.random.Generator, w, r: float, n: int) -> np.ndarray:
    """n random points of the metric sphere of radius r about w (|zeta| = tan r)."""
    m = _coords(w).size - 1
    d = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    d = _unit(d) * np.tan(r)
    return chart_to_point(w, d)
