"""TOML-backed experiment configuration."""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .holomorphic import RationalCurveMap, identity_map, random_rational_map
from .meshes import (TriangulatedSurface, bumpy_sphere, flat_torus, icosphere, read_conformal_csv,
                     read_mesh)


class ConfigError(ValueError):
    pass


GENERATORS = ("icosphere", "bumpy", "torus", "file")
MAP_KINDS = ("identity", "random", "file")


@dataclass
class ExperimentConfig:
    # mesh source
    generator: str = "icosphere"
    level: int = 6
    torus_n: int = 120
    mesh_path: Optional[str] = None
    genus: int = 0
    conformal_path: Optional[str] = None
    conformal_seed: int = 0
    bandwidth: int = 3
    amplitude: float = 0.4
    # map
    map_kind: str = "identity"
    degree: int = 1
    map_path: Optional[str] = None
    m: int = 1
    # certificate
    k: list = field(default_factory=lambda: [1, 2, 4])
    c_target: float = 0.01
    # solver
    eig_count: int = 200
    residual_tol: float = 0.02
    rayleigh_tol: float = 0.01
    # sweeps
    cases: int = 50
    metrics: int = 20
    max_degree: int = 5
    max_k: int = 20
    sample_scale: float = 1.0
    psi_threshold: float = 0.3
    psi_bar_threshold: float = 1 / 6
    # run
    seed: int = 0
    strict: bool = False
    threads: int = 1
    out: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.generator not in GENERATORS:
            raise ConfigError(f"generator must be one of {GENERATORS}")
        if self.map_kind not in MAP_KINDS:
            raise ConfigError(f"map kind must be one of {MAP_KINDS}")
        for name in ("mesh_path", "conformal_path", "map_path"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"{name}: no such file {p}")
        if self.generator == "file" and self.mesh_path is None:
            raise ConfigError("generator 'file' needs mesh_path")
        if self.map_kind == "file" and self.map_path is None:
            raise ConfigError("map kind 'file' needs map_path")
        self.k = [int(k) for k in np.atleast_1d(self.k)]
        if min(self.k) < 1:
            raise ConfigError("k must be >= 1")
        positive = ("c_target", "residual_tol", "rayleigh_tol", "sample_scale", "amplitude")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.degree < 1 or self.m < 1 or self.threads < 1 or self.level < 0:
            raise ConfigError("degree, m and threads must be >= 1, level >= 0")
        return self

    @classmethod
    def from_toml(cls, path, **overrides) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        flat = {}
        for key, value in data.items():
            if isinstance(value, dict):  # sections are cosmetic
                flat.update(value)
            else:
                flat[key] = value
        known = {f.name for f in fields(cls)}
        unknown = set(flat) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        flat.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**flat).validate()

    def to_json(self) -> dict:
        return asdict(self)

    def build_mesh(self) -> TriangulatedSurface:
        if self.generator == "icosphere":
            mesh = icosphere(self.level)
        elif self.generator == "bumpy":
            mesh = bumpy_sphere(self.level, self.conformal_seed, self.bandwidth, self.amplitude)
        elif self.generator == "torus":
            mesh = flat_torus(self.torus_n)
        else:
            mesh = read_mesh(self.mesh_path, genus=self.genus).validate()
        if self.conformal_path is not None:
            mesh = mesh.with_conformal_factor(read_conformal_csv(self.conformal_path, mesh.n_vertices))
        return mesh

    def build_map(self) -> RationalCurveMap:
        if self.map_kind == "identity":
            return identity_map()
        if self.map_kind == "random":
            return random_rational_map(np.random.default_rng(self.seed), self.degree, self.m)
        return RationalCurveMap.load(self.map_path)
