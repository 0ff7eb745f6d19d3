"""Closed triangulated surfaces with a conformal factor, generators and file I/O."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class TriangulatedSurface:
    """A closed oriented triangulated surface (Sigma, g).

    The metric is ``conformal_factor * background``: the background comes from
    ``vertices`` or, for abstract surfaces such as the flat torus, from
    ``edge_lengths`` (per triangle, length of the edge opposite each corner).
    ``cp1_param`` holds unit homogeneous coordinates on CP^1 per vertex for
    genus-0 meshes.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    conformal_factor: Optional[np.ndarray] = None
    genus: int = 0
    cp1_param: Optional[np.ndarray] = None
    edge_lengths: Optional[np.ndarray] = None
    name: str = field(default="mesh", compare=False)

    def __post_init__(self):
        tri = np.asarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "triangles", tri)
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        cf = np.ones(self.n_vertices) if self.conformal_factor is None else np.asarray(self.conformal_factor, float)
        object.__setattr__(self, "conformal_factor", cf)
        if cf.shape != (self.n_vertices,) or not np.all(cf > 0):
            raise MeshError("conformal factors must be positive, one per vertex")
        if tri.ndim != 2 or tri.shape[1] != 3 or tri.min() < 0 or tri.max() >= self.n_vertices:
            raise MeshError("triangles must be index triples into the vertex array")
        if self.cp1_param is not None and len(self.cp1_param) != self.n_vertices:
            raise MeshError("cp1_param needs one point per vertex")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def with_conformal_factor(self, factor) -> "TriangulatedSurface":
        return replace(self, conformal_factor=np.asarray(factor, dtype=float))

    def scaled(self, s: float) -> "TriangulatedSurface":
        return self.with_conformal_factor(self.conformal_factor * s)

    def lengths(self) -> np.ndarray:
        if self.edge_lengths is not None:
            return np.asarray(self.edge_lengths, dtype=float)
        v, t = self.vertices, self.triangles
        return np.stack([
            np.linalg.norm(v[t[:, 1]] - v[t[:, 2]], axis=1),
            np.linalg.norm(v[t[:, 2]] - v[t[:, 0]], axis=1),
            np.linalg.norm(v[t[:, 0]] - v[t[:, 1]], axis=1),
        ], axis=1)

    def background_areas(self) -> np.ndarray:
        # Kahan's stable Heron formula
        s = np.sort(self.lengths(), axis=1)[:, ::-1]
        a, b, c = s[:, 0], s[:, 1], s[:, 2]
        q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
        return 0.25 * np.sqrt(np.maximum(q, 0.0))

    def triangle_factors(self) -> np.ndarray:
        return self.conformal_factor[self.triangles].mean(axis=1)

    def areas(self) -> np.ndarray:
        """Triangle areas in the conformal metric."""
        return self.background_areas() * self.triangle_factors()

    def vertex_areas(self) -> np.ndarray:
        """One third of the incident conformal triangle areas."""
        a = np.repeat(self.areas() / 3.0, 3)
        return np.bincount(self.triangles.ravel(), weights=a, minlength=self.n_vertices)

    def total_area(self) -> float:
        return float(self.areas().sum())

    def validate(self) -> "TriangulatedSurface":
        """Check closedness, orientation, connectedness and the Euler characteristic."""
        t = self.triangles
        nv = self.n_vertices
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        codes = directed[:, 0] * nv + directed[:, 1]
        uniq, counts = np.unique(codes, return_counts=True)
        if np.any(counts > 1):
            raise MeshError("inconsistent orientation or non-manifold edge")
        reverse = directed[:, 1] * nv + directed[:, 0]
        if not np.all(np.isin(reverse, uniq)):
            raise MeshError("surface has boundary edges (not closed)")
        used = np.zeros(nv, dtype=bool)
        used[t.ravel()] = True
        if not used.all():
            raise MeshError("isolated vertices")
        adj = sp.coo_matrix((np.ones(len(directed)), (directed[:, 0], directed[:, 1])), shape=(nv, nv))
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise MeshError(f"surface has {ncomp} connected components")
        n_edges = len(directed) // 2
        chi = nv - n_edges + len(t)
        if chi != 2 - 2 * self.genus:
            raise MeshError(f"Euler characteristic {chi} does not match genus {self.genus}")
        areas = self.background_areas()
        if np.any(areas < 1e-14 * areas.mean()):
            raise MeshError("degenerate triangle")
        return self


def sphere_to_cp1(points: np.ndarray) -> np.ndarray:
    """Unit homogeneous coordinates [Z] with Z Z^*/|Z|^2 = (I + n.sigma)/2.

    Sends the round sphere of radius 1/2 isometrically onto (CP^1, g_FS).
    """
    n = points / np.linalg.norm(points, axis=1, keepdims=True)
    x, y, z = n[:, 0], n[:, 1], n[:, 2]
    north = np.stack([1 + z, x + 1j * y], axis=1)
    south = np.stack([x - 1j * y, 1 - z], axis=1)
    out = np.where((z >= 0)[:, None], north, south)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def cp1_to_sphere(z: np.ndarray, radius: float = 0.5) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    a, b = z[..., 0], z[..., 1]
    n1 = 2 * np.real(b * np.conj(a))
    n2 = 2 * np.imag(b * np.conj(a))
    n3 = np.abs(a) ** 2 - np.abs(b) ** 2
    return radius * np.stack([n1, n2, n3], axis=-1)


def icosphere(level: int, radius: float = 0.5) -> TriangulatedSurface:
    """Subdivided icosahedron on the sphere of the given radius (FS CP^1 by default)."""
    if not 0 <= level <= 8:
        raise MeshError("icosphere level must be in 0..8")
    p = (1 + 5**0.5) / 2
    v = np.array([[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
                  [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
                  [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]], dtype=float)
    f = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                  [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                  [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                  [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    for _ in range(level):
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        e.sort(axis=1)
        uniq, inv = np.unique(e, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        mids = v[uniq[:, 0]] + v[uniq[:, 1]]
        mids /= np.linalg.norm(mids, axis=1, keepdims=True)
        nf = len(f)
        ab, bc, ca = (len(v) + inv[:nf], len(v) + inv[nf:2 * nf], len(v) + inv[2 * nf:])
        a, b, c = f[:, 0], f[:, 1], f[:, 2]
        f = np.concatenate([np.stack([a, ab, ca], 1), np.stack([b, bc, ab], 1),
                            np.stack([c, ca, bc], 1), np.stack([ab, bc, ca], 1)])
        v = np.concatenate([v, mids])
    return TriangulatedSurface(radius * v, f, genus=0, cp1_param=sphere_to_cp1(v),
                               name=f"icosphere{level}")


def flat_torus(n: int, width: float = 1.0, height: float = 1.0) -> TriangulatedSurface:
    """n x n periodic grid of the flat torus [0,width) x [0,height), intrinsic lengths."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    idx = lambda a, b: (a % n) * n + (b % n)  # noqa: E731
    v00, v10, v01, v11 = idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)
    tri = np.concatenate([np.stack([v00, v10, v11], -1).reshape(-1, 3),
                          np.stack([v00, v11, v01], -1).reshape(-1, 3)])
    hx, hy = width / n, height / n
    diag = np.hypot(hx, hy)
    # first family: corners (0,0),(1,0),(1,1); second: (0,0),(1,1),(0,1)
    l1 = np.tile([hy, diag, hx], (n * n, 1))
    l2 = np.tile([hy, hx, diag], (n * n, 1))
    verts = np.stack([i.ravel() * hx, j.ravel() * hy, np.zeros(n * n)], axis=1)
    return TriangulatedSurface(verts, tri, genus=1, edge_lengths=np.concatenate([l1, l2]),
                               name=f"torus{n}")


def bumpy_factor(mesh: TriangulatedSurface, seed: int, bandwidth: int = 3,
                 amplitude: float = 0.4) -> np.ndarray:
    """exp(2u) for a random polynomial u of degree <= bandwidth on the unit sphere.

    Polynomials of degree L restricted to the sphere span the harmonics of
    degree <= L, so u is bandlimited. max |u| is scaled to ``amplitude``.
    """
    rng = np.random.default_rng(seed)
    n = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    u = np.zeros(mesh.n_vertices)
    for a in range(bandwidth + 1):
        for b in range(bandwidth + 1 - a):
            for c in range(bandwidth + 1 - a - b):
                if a + b + c == 0:
                    continue
                u += rng.standard_normal() * n[:, 0] ** a * n[:, 1] ** b * n[:, 2] ** c
    u *= amplitude / np.abs(u).max()
    return np.exp(2 * u)


def bumpy_sphere(level: int, seed: int, bandwidth: int = 3, amplitude: float = 0.4) -> TriangulatedSurface:
    base = icosphere(level)
    return replace(base.with_conformal_factor(bumpy_factor(base, seed, bandwidth, amplitude)),
                   name=f"bumpy{level}-s{seed}")


# ---------------------------------------------------------------- file I/O

def write_off(mesh: TriangulatedSurface, path) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {len(mesh.triangles)} 0\n")
        for x in mesh.vertices:
            fh.write(" ".join(repr(float(c)) for c in x) + "\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def _tokens(path):
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                yield line


def read_off(path, genus: int = 0) -> TriangulatedSurface:
    lines = _tokens(path)
    head = next(lines)
    if not head.startswith("OFF"):
        raise MeshError("missing OFF header")
    rest = head[3:].split()
    counts = rest if rest else next(lines).split()
    nv, nf = int(counts[0]), int(counts[1])
    verts = np.array([[float(c) for c in next(lines).split()[:3]] for _ in range(nv)])
    faces = []
    for _ in range(nf):
        parts = [int(c) for c in next(lines).split()]
        if parts[0] != 3:
            raise MeshError("only triangular faces are supported")
        faces.append(parts[1:4])
    return TriangulatedSurface(verts, np.array(faces), genus=genus, name=Path(path).stem)


def write_obj(mesh: TriangulatedSurface, path) -> None:
    with open(path, "w") as fh:
        for x in mesh.vertices:
            fh.write("v " + " ".join(repr(float(c)) for c in x) + "\n")
        for t in mesh.triangles + 1:
            fh.write(f"f {t[0]} {t[1]} {t[2]}\n")


def read_obj(path, genus: int = 0) -> TriangulatedSurface:
    verts, faces = [], []
    for line in _tokens(path):
        parts = line.split()
        if parts[0] == "v":
            verts.append([float(c) for c in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(p.split("/")[0]) for p in parts[1:]]
            if len(idx) != 3:
                raise MeshError("only triangular faces are supported")
            faces.append([i - 1 if i > 0 else len(verts) + i for i in idx])
    return TriangulatedSurface(np.array(verts), np.array(faces), genus=genus, name=Path(path).stem)


def read_mesh(path, genus: int = 0, sphere_param: bool = True) -> TriangulatedSurface:
    """Load OFF/OBJ; genus-0 meshes get a CP^1 parameter by radial projection."""
    path = Path(path)
    loader = {".off": read_off, ".obj": read_obj}.get(path.suffix.lower())
    if loader is None:
        raise MeshError(f"unsupported mesh format {path.suffix}")
    mesh = loader(path, genus=genus)
    if genus == 0 and sphere_param:
        mesh = replace(mesh, cp1_param=sphere_to_cp1(mesh.vertices - mesh.vertices.mean(axis=0)))
    return mesh


def write_conformal_csv(mesh: TriangulatedSurface, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex", "factor"])
        for i, f in enumerate(mesh.conformal_factor):
            w.writerow([i, repr(float(f))])


def read_conformal_csv(path, n_vertices: int) -> np.ndarray:
    out = np.full(n_vertices, np.nan)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[int(row["vertex"])] = float(row["factor"])
    if np.isnan(out).any():
        raise MeshError("conformal factor sidecar does not cover every vertex")
    return out
