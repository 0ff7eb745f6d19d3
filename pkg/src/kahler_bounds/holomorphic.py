"""Rational maps CP^1 -> CP^m and the integrals behind the holomorphic degree."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cpm_geometry import moment_map
from .meshes import TriangulatedSurface
from .packing import WeightedPointCloud
from .spectra import assemble

VOL_CP1 = np.pi  # area of the radius-1/2 sphere


def _hom_roots(c: np.ndarray) -> np.ndarray:
    """Projective roots [z:w] (unit rows) of sum_a c_a z^(d-a) w^a."""
    d = len(c) - 1
    nz = np.flatnonzero(np.abs(c) > 0)
    if len(nz) == 0:
        raise ValueError("zero polynomial")
    lead = nz[0]
    affine = np.roots(c[lead:]) if d - lead > 0 else np.zeros(0)
    pts = [np.array([s, 1.0]) for s in affine]
    pts += [np.array([1.0, 0.0])] * lead  # roots at w = 0
    pts = np.array(pts, dtype=complex).reshape(-1, 2)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True) if len(pts) else pts


def _hom_eval(c: np.ndarray, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    r = np.full(np.shape(z), c[0], dtype=complex)
    wp = np.ones(np.shape(w), dtype=complex)
    for a in range(1, len(c)):
        wp = wp * w
        r = r * z + c[a] * wp
    return r


@dataclass(frozen=True, eq=False)
class RationalCurveMap:
    """[z:w] -> [P_0(z,w) : ... : P_m(z,w)], P_j homogeneous of common degree d.

    ``coefficients[j, a]`` multiplies z^(d-a) w^a. Construction rejects maps
    whose components share a projective root.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        if c.shape[0] < 2:
            raise ValueError("need at least two components")
        if not np.any(c != 0):
            raise ValueError("all components vanish")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        if self.degree > 0 and self.common_roots().size:
            raise ValueError("components share a common root; map is not defined everywhere")

    @property
    def m(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def degree(self) -> int:
        return self.coefficients.shape[1] - 1

    def common_roots(self, tol: float = 1e-8) -> np.ndarray:
        c = self.coefficients
        rows = [j for j in range(len(c)) if np.any(c[j] != 0)]
        # identically zero components vanish everywhere and are skipped
        base = _hom_roots(c[rows[0]])
        bad = []
        for p in base:
            vals = [abs(_hom_eval(c[j], p[0], p[1])) / np.linalg.norm(c[j]) for j in rows]
            if max(vals) < tol:
                bad.append(p)
        return np.array(bad).reshape(-1, 2)

    def is_constant(self) -> bool:
        if self.degree == 0:
            return True
        c = self.coefficients
        return np.linalg.matrix_rank(c, tol=1e-12 * np.abs(c).max()) <= 1

    @classmethod
    def from_roots(cls, roots, scales=None) -> "RationalCurveMap":
        """Component j = scales[j] * prod_i (b_i z - a_i w) over roots [a_i : b_i]."""
        comps = []
        for j, rts in enumerate(roots):
            poly = np.array([1.0 + 0j])
            for a, b in np.atleast_2d(rts):
                poly = np.convolve(poly, np.array([b, -a]))
            comps.append(poly * (1.0 if scales is None else scales[j]))
        return cls(np.array(comps))

    def precompose(self, u: np.ndarray) -> "RationalCurveMap":
        """The map Z -> P(u Z) for a 2x2 matrix u."""
        d = self.degree
        lin_z = np.array([u[0, 0], u[0, 1]])
        lin_w = np.array([u[1, 0], u[1, 1]])
        out = np.zeros_like(self.coefficients)
        for a in range(d + 1):
            term = np.array([1.0 + 0j])
            for _ in range(d - a):
                term = np.convolve(term, lin_z)
            for _ in range(a):
                term = np.convolve(term, lin_w)
            out = out + np.outer(self.coefficients[:, a], term)
        return RationalCurveMap(out)

    def to_json(self) -> list:
        return [[[float(x.real), float(x.imag)] for x in row] for row in self.coefficients]

    @classmethod
    def from_json(cls, data) -> "RationalCurveMap":
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError("map file must hold m+1 lists of [re, im] pairs")
        return cls(arr[..., 0] + 1j * arr[..., 1])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path) -> "RationalCurveMap":
        return cls.from_json(json.loads(Path(path).read_text()))


def identity_map() -> RationalCurveMap:
    return RationalCurveMap([[1, 0], [0, 1]])


def evaluate(f: RationalCurveMap, z) -> np.ndarray:
    """Image coordinates (..., m+1), unit norm, of points z (..., 2) of CP^1."""
    z = np.asarray(getattr(z, "coords", z), dtype=complex)
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    vals = np.stack([_hom_eval(c, z[..., 0], z[..., 1]) for c in f.coefficients], axis=-1)
    nrm = np.linalg.norm(vals, axis=-1, keepdims=True)
    if np.any(nrm < 1e-100):
        raise ValueError("map evaluates to the zero vector (common root)")
    return vals / nrm


def topological_degree(f: RationalCurveMap) -> int:
    """Degree of a map CP^1 -> CP^1, i.e. the number of preimages of a generic point."""
    if f.m != 1:
        raise ValueError("topological degree is defined here for maps to CP^1 only")
    if f.is_constant():
        raise ValueError("constant map has no degree")
    return f.degree


def _vertex_images(f: RationalCurveMap, mesh: TriangulatedSurface) -> np.ndarray:
    if mesh.cp1_param is None:
        raise ValueError("mesh carries no CP^1 parameter")
    return evaluate(f, mesh.cp1_param)


def moment_energy(f: RationalCurveMap, mesh: TriangulatedSurface, stiffness=None) -> float:
    """Discrete Dirichlet energy of the matrix entries of tau o f, summed.

    Pointwise |grad(tau o f)|^2 dA = 4 f^*(omega_FS) for holomorphic f, so this
    approaches 4 pi deg(f) for maps to CP^1.
    """
    if stiffness is None:
        stiffness, _ = assemble(mesh)
    tau = moment_map(_vertex_images(f, mesh)).reshape(mesh.n_vertices, -1)
    st = stiffness @ tau
    return float(np.real(np.sum(np.conj(tau) * st)))


def pullback_area(f: RationalCurveMap, mesh: TriangulatedSurface, stiffness=None) -> float:
    """Integral of f^*(omega_FS), computed as a quarter of ``moment_energy``."""
    return moment_energy(f, mesh, stiffness) / 4.0


@dataclass(frozen=True)
class HolomorphicDegree:
    numerator: float
    denominator: float

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


def holomorphic_degree(f: RationalCurveMap, mesh: TriangulatedSurface, exact: bool = True,
                       stiffness=None) -> HolomorphicDegree:
    """d = (integral of f^* omega_FS) / Vol_g for a complex curve.

    With ``exact`` and m = 1 the numerator is deg(f) * pi; otherwise the
    discrete pull-back area.
    """
    area = mesh.total_area()
    if area <= 0:
        raise ValueError("zero-area mesh")
    if exact and f.m == 1:
        num = topological_degree(f) * VOL_CP1
    else:
        num = pullback_area(f, mesh, stiffness)
    return HolomorphicDegree(float(num), area)


def pushforward_measure(f: RationalCurveMap, mesh: TriangulatedSurface) -> WeightedPointCloud:
    """Vertex images in CP^m weighted by conformal vertex areas."""
    return WeightedPointCloud(_vertex_images(f, mesh), mesh.vertex_areas(), "fs")


def random_rational_map(rng: np.random.Generator, degree: int, m: int = 1,
                        min_separation: float = 0.25) -> RationalCurveMap:
    """Product-of-linear-factors components with roots spread over CP^1.

    All (m+1)*degree roots are kept pairwise at FS distance >= min_separation,
    which keeps the map well conditioned on moderately fine meshes.
    """
    from .cpm_geometry import random_points
    from .packing import fs_pairwise

    need = (m + 1) * degree
    pts = np.zeros((0, 2), dtype=complex)
    sep = min_separation
    tries = 0
    while len(pts) < need:
        cand = random_points(rng, 1, 1)
        if len(pts) == 0 or fs_pairwise(cand, pts).min() >= sep:
            pts = np.vstack([pts, cand])
        tries += 1
        if tries > 5000:
            pts, tries, sep = np.zeros((0, 2), dtype=complex), 0, sep * 0.8
    roots = pts.reshape(m + 1, degree, 2)
    scales = np.exp(1j * rng.uniform(0, 2 * np.pi, m + 1)) * np.exp(rng.uniform(-0.3, 0.3, m + 1))
    return RationalCurveMap.from_roots(roots, scales)
