"""Run configuration: a YAML file plus command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .dilation import AncillaW, DilationConfig, build_W
from .isometry import RadialProfile, radial_profile
from .phase import Coherent, Fock, RandomDensity, StateSpec, Superposition, Thermal, make_state


class ConfigError(ValueError):
    pass


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


@dataclass
class RunConfig:
    dims: tuple[int, int, int] = (24, 24, 2)
    profile: dict = field(default_factory=lambda: {"kind": "gaussian"})
    chi: dict = field(default_factory=lambda: {"fock": 0})
    W: dict = field(default_factory=lambda: {"kind": "qubit"})
    mu: dict = field(default_factory=lambda: {"fock": 0})
    state: dict = field(default_factory=lambda: {"kind": "superposition", "terms": [[0, 1], [1, 1]]})
    support: int = 8
    grid: dict = field(default_factory=dict)
    samples: int = 1000
    seed: int = 1
    renormalize: bool = True
    converge_dims: tuple[int, ...] = (16, 24, 32)
    out: str | None = None
    format: str = "csv"

    # ---- construction -------------------------------------------------

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> RunConfig:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.dims = tuple(int(d) for d in cfg.dims)
        cfg.converge_dims = tuple(int(d) for d in cfg.converge_dims)
        return cfg

    @classmethod
    def load(cls, path: str | Path | None) -> RunConfig:
        if path is None:
            return cls()
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a mapping")
        return cls.from_mapping(data)

    def override(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def echo(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__ if k not in ("out", "format")}

    # ---- validation into library objects ------------------------------

    def validate(self) -> Resolved:
        if len(self.dims) == 1:
            self.dims = (self.dims[0], self.dims[0], 2)
        elif len(self.dims) == 2:
            self.dims = (self.dims[0], self.dims[1], 2)
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise ConfigError(f"dims must be up to three positive integers, got {self.dims}")
        N_a, N_b, N_c = self.dims
        if N_a != N_b:
            raise ConfigError("N_a and N_b must be equal")
        if not 1 <= self.support <= N_a:
            raise ConfigError(f"support {self.support} must lie in 1..N_a")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.samples < 0:
            raise ConfigError("samples must be nonnegative")
        try:
            profile = self._profile()
            W = self._W()
            if W.dim != N_c:
                raise ConfigError(f"W acts on dimension {W.dim} but dims give N_c={N_c}")
            chi = self._ket(self.chi, N_b, "chi")
            mu_ket = self._ket(self.mu, W.dim, "mu")
            dil = DilationConfig(chi, W, np.outer(mu_ket, mu_ket.conj()))
            rho = make_state(self._state(), self.support)
        except ConfigError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        return Resolved(self, profile, dil, rho)

    def _profile(self) -> RadialProfile:
        p = dict(self.profile)
        kind = p.pop("kind", "gaussian")
        return radial_profile(kind, **p)

    def _W(self) -> AncillaW:
        kind = self.W.get("kind", "qubit")
        if kind == "pseudospin":
            return build_W("pseudospin", self.W.get("dim", self.dims[2]))
        return build_W(kind)

    @staticmethod
    def _ket(spec: dict, dim: int, name: str) -> np.ndarray:
        v = np.zeros(dim, dtype=complex)
        if "fock" in spec:
            n = int(spec["fock"])
            if not 0 <= n < dim:
                raise ConfigError(f"{name}: level {n} outside dimension {dim}")
            v[n] = 1.0
        elif "amplitudes" in spec:
            amps = [_complex(a) for a in spec["amplitudes"]]
            if len(amps) > dim:
                raise ConfigError(f"{name}: too many amplitudes for dimension {dim}")
            v[: len(amps)] = amps
            norm = np.linalg.norm(v)
            if norm == 0:
                raise ConfigError(f"{name}: zero vector")
            v /= norm
        else:
            raise ConfigError(f"{name}: give 'fock' or 'amplitudes'")
        return v

    def _state(self) -> StateSpec:
        s = dict(self.state)
        kind = s.get("kind")
        if kind == "fock":
            return Fock(int(s["n"]))
        if kind == "coherent":
            return Coherent(_complex(s["alpha"]))
        if kind == "superposition":
            return Superposition(tuple((int(n), _complex(a)) for n, a in s["terms"]))
        if kind == "thermal":
            return Thermal(float(s["nbar"]))
        if kind == "random":
            return RandomDensity(int(s.get("seed", self.seed)), int(s.get("rank", 1)))
        raise ConfigError(f"unknown state kind {kind!r}")


@dataclass
class Resolved:
    config: RunConfig
    profile: RadialProfile
    dilation: DilationConfig
    rho: np.ndarray
