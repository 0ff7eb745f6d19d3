"""P1 finite elements for the Laplace-Beltrami operator on conformal surfaces."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .meshes import MeshError, TriangulatedSurface

DENSE_LIMIT = 2000


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (n_vertices, count), mass-orthonormal columns
    residuals: np.ndarray

    @property
    def count(self) -> int:
        return len(self.eigenvalues)


def assemble(mesh: TriangulatedSurface, lumped: bool = False):
    """Cotangent stiffness and (consistent or lumped) mass matrices.

    Stiffness depends only on the background lengths, since the Dirichlet form
    is conformally invariant in two dimensions. The mass uses triangle areas
    scaled by the mean of the three vertex factors.
    """
    t = mesh.triangles
    lens = mesh.lengths()
    area = mesh.background_areas()
    if np.any(area < 1e-14 * area.mean()):
        raise MeshError("degenerate triangle")
    sq = lens**2
    # cot of the angle at corner c, opposite edge length lens[:, c]
    cot = (sq.sum(axis=1, keepdims=True) - 2 * sq) / (4 * area[:, None])
    n = mesh.n_vertices
    rows, cols, vals = [], [], []
    for c in range(3):
        i, j = t[:, (c + 1) % 3], t[:, (c + 2) % 3]
        w = 0.5 * cot[:, c]
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    stiff = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))

    a = area * mesh.triangle_factors()
    if lumped:
        mass = sp.diags(np.bincount(t.ravel(), weights=np.repeat(a / 3, 3), minlength=n)).tocsr()
    else:
        local = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]) / 12.0
        r = np.repeat(t, 3, axis=1).ravel()
        c = np.tile(t, (1, 3)).ravel()
        v = (a[:, None, None] * local[None]).ravel()
        mass = sp.csr_matrix((v, (r, c)), shape=(n, n))
    return stiff, mass


def spectrum(stiffness, mass, count: int, seed: int = 0, method: str = "auto",
             tol: float = 0.0, maxiter: int | None = None) -> SpectralDecomposition:
    """Smallest ``count`` generalized eigenpairs of S v = lambda M v.

    The sparse path runs shift-invert Lanczos (ARPACK) at a small negative shift;
    the dense path solves the full pencil and is used below DENSE_LIMIT vertices
    or on request.
    """
    n = stiffness.shape[0]
    if not 0 < count < n:
        raise ValueError(f"count must be in 1..{n - 1}")
    if method == "auto":
        method = "dense" if n < DENSE_LIMIT else "sparse"
    if method == "dense":
        vals, vecs = sla.eigh(stiffness.toarray(), mass.toarray(), subset_by_index=[0, count - 1])
    elif method == "sparse":
        vol = float(mass.sum())
        sigma = -1.0 / vol
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            vals, vecs = spla.eigsh(stiffness, k=count, M=mass, sigma=sigma, which="LM",
                                    v0=v0, tol=tol, maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise SpectrumError(f"eigensolver did not converge: {exc}") from exc
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    # deterministic signs and explicit M-normalisation
    norms = np.sqrt(np.einsum("ij,ij->j", vecs, mass @ vecs))
    vecs = vecs / norms
    pivot = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    res = np.linalg.norm(stiffness @ vecs - (mass @ vecs) * vals, axis=0)
    return SpectralDecomposition(vals, vecs, res)


def rayleigh_quotient(stiffness, mass, samples) -> float:
    v = np.asarray(samples, dtype=float)
    den = float(v @ (mass @ v))
    if den <= 0:
        raise ValueError("Rayleigh quotient of the zero function")
    return float(v @ (stiffness @ v)) / den


def weyl_slope(decomposition: SpectralDecomposition, mesh_or_area) -> float:
    """Least-squares slope of lambda_k against k on the upper half, times Vol/(4 pi)."""
    lam = decomposition.eigenvalues
    if len(lam) < 50:
        raise ValueError("need at least 50 eigenvalues for a Weyl slope")
    area = mesh_or_area.total_area() if isinstance(mesh_or_area, TriangulatedSurface) else float(mesh_or_area)
    k = np.arange(len(lam))
    half = len(lam) // 2
    slope = np.polyfit(k[half:], lam[half:], 1)[0]
    return float(slope * area / (4 * np.pi))


def mesh_spectrum(mesh: TriangulatedSurface, count: int, seed: int = 0, lumped: bool = False,
                  method: str = "auto") -> SpectralDecomposition:
    s, m = assemble(mesh, lumped=lumped)
    return spectrum(s, m, count, seed=seed, method=method)


def write_spectrum_csv(decomposition: SpectralDecomposition, path) -> None:
    with open(path, "w") as fh:
        fh.write("index,eigenvalue\n")
        for i, lam in enumerate(decomposition.eigenvalues):
            fh.write(f"{i},{lam:.17g}\n")


def read_spectrum_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1]


def write_eigenvectors(decomposition: SpectralDecomposition, path) -> None:
    """Flat little-endian float64 row-major matrix plus a JSON header alongside."""
    path = Path(path)
    vecs = np.ascontiguousarray(decomposition.eigenvectors, dtype="<f8")
    vecs.tofile(path)
    header = {"dims": list(vecs.shape), "layout": "row-major", "dtype": "float64",
              "endianness": "little", "rows": "vertex", "cols": "eigenpair"}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(header, indent=2))


def read_eigenvectors(path) -> np.ndarray:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    if header["layout"] != "row-major":
        raise ValueError("only row-major eigenvector files are supported")
    return np.fromfile(path, dtype="<f8").reshape(header["dims"])
