"""Scenario configuration: flat ``section.key = value`` text files.

Example::

    # ohmic bath, correlated pure state
    bath.s = 1
    bath.lambda = 1.0
    bath.omega_c = 1.0
    bath.omega_tau_b = 10        # or bath.beta = 31.4 / inf
    qubit.preparation = pure     # pure | operators | uncorrelated
    qubit.a0 = 0.70710678
    qubit.a1 = 0.70710678
    qubit.omega0_beta = 0.1      # or qubit.omega0 = ...
    grid.t_min = 0
    grid.t_max = 5
    grid.points = 201
    grid.units = tau_b           # time | tau_b
    output.stem = fig4

``[section]`` headers are also accepted and prefix the keys below them
(``op.0`` under ``[qubit]`` is ``qubit.op.0``; keys already carrying the
section name are left alone).
Any key can be overridden from the environment as
``DEPHASING_<SECTION>__<KEY>``, e.g. ``DEPHASING_BATH__LAMBDA=2``.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .qubit import OperatorList, PureProjector
from .spectral import BathSpec, ExponentialCutoff, SpectralDensity, TabulatedCutoff

ENV_PREFIX = "DEPHASING_"

TOL_PROFILES = {
    "fast": {"rel": 1e-8, "abs": 1e-14},
    "strict": {"rel": 1e-12, "abs": 1e-18},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BathConfig:
    s: float = 1.0
    lam: float = 1.0
    omega_c: float = 1.0
    beta: float = math.inf
    cutoff: str = "exponential"
    cutoff_file: str | None = None


@dataclass(frozen=True)
class QubitConfig:
    preparation: str = "pure"
    a0: complex = complex(1.0 / math.sqrt(2.0))
    a1: complex = complex(1.0 / math.sqrt(2.0))
    omega0: float = 1.0
    ops: tuple = ()


@dataclass(frozen=True)
class GridConfig:
    t_min: float = 0.0
    t_max: float = 10.0
    points: int = 201
    spacing: str = "linear"
    units: str = "time"


@dataclass(frozen=True)
class TolConfig:
    rel: float = 1e-12
    abs: float = 1e-18
    method: str = "auto"


@dataclass(frozen=True)
class DiscreteConfig:
    modes: int = 2000
    omega_max: float | None = None


@dataclass(frozen=True)
class ValidateConfig:
    s_values: tuple = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0)
    points: int = 50
    t_min: float = 1e-2
    t_max: float = 100.0
    discrete_t_max: float = 20.0
    tol_closed: float = 1e-8
    tol_thermal: float = 1e-7
    tol_discrete: float = 1e-3


@dataclass(frozen=True)
class SweepConfig:
    param: str | None = None
    values: tuple = ()


@dataclass(frozen=True)
class ScenarioConfig:
    bath: BathConfig = field(default_factory=BathConfig)
    qubit: QubitConfig = field(default_factory=QubitConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    tol: TolConfig = field(default_factory=TolConfig)
    discrete: DiscreteConfig = field(default_factory=DiscreteConfig)
    validate: ValidateConfig = field(default_factory=ValidateConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    stem: str = "run"
    source: str | None = None

    def __post_init__(self):
        g = self.grid
        if g.points < 2:
            raise ConfigError("grid.points must be >= 2")
        if not g.t_min >= 0.0 or not g.t_max > g.t_min:
            raise ConfigError("need 0 <= grid.t_min < grid.t_max")
        if g.spacing not in ("linear", "log"):
            raise ConfigError("grid.spacing must be linear or log")
        if g.spacing == "log" and g.t_min <= 0.0:
            raise ConfigError("log spacing needs grid.t_min > 0")
        if g.units not in ("time", "tau_b"):
            raise ConfigError("grid.units must be time or tau_b")
        if g.units == "tau_b" and math.isinf(self.bath.beta):
            raise ConfigError("grid.units = tau_b needs a finite temperature")
        if self.qubit.preparation not in ("pure", "operators", "uncorrelated"):
            raise ConfigError("qubit.preparation must be pure, operators or uncorrelated")
        if self.qubit.preparation == "operators" and not self.qubit.ops:
            raise ConfigError("qubit.preparation = operators needs qubit.op.N entries")
        if self.tol.method not in ("auto", "closed", "quadrature"):
            raise ConfigError("tol.method must be auto, closed or quadrature")
        if self.discrete.modes < 1:
            raise ConfigError("discrete.modes must be >= 1")
        # surface physical-parameter errors as config errors
        try:
            self.bath_spec()
            self.preparation()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    # --- derived objects ---

    def spectral_density(self) -> SpectralDensity:
        b = self.bath
        if b.cutoff == "exponential":
            cutoff = ExponentialCutoff()
        elif b.cutoff == "tabulated":
            if not b.cutoff_file:
                raise ConfigError("bath.cutoff = tabulated needs bath.cutoff_file")
            path = Path(b.cutoff_file)
            if not path.is_absolute() and self.source:
                path = Path(self.source).parent / path
            try:
                data = np.loadtxt(path, ndmin=2)
            except OSError as exc:
                raise ConfigError(f"cannot read cutoff table {path}: {exc}") from exc
            cutoff = TabulatedCutoff(tuple(data[:, 0]), tuple(data[:, 1]))
        else:
            raise ConfigError(f"unknown cutoff {b.cutoff!r}")
        return SpectralDensity(b.lam, b.s, b.omega_c, cutoff)

    def bath_spec(self) -> BathSpec:
        return BathSpec(self.spectral_density(), self.bath.beta)

    def preparation(self):
        q = self.qubit
        if q.preparation == "operators":
            return OperatorList(tuple(q.ops), q.omega0)
        return PureProjector.normalized(q.a0, q.a1, q.omega0)

    @property
    def correlated(self) -> bool:
        return self.qubit.preparation != "uncorrelated"

    def times(self) -> np.ndarray:
        g = self.grid
        if g.spacing == "log":
            x = np.geomspace(g.t_min, g.t_max, g.points)
        else:
            x = np.linspace(g.t_min, g.t_max, g.points)
        if g.units == "tau_b":
            x = x * (self.bath.beta / math.pi)
        return x

    def with_param(self, param: str, value: float) -> "ScenarioConfig":
        """Copy with one sweep parameter (lambda | s | beta) replaced."""
        if param not in ("lambda", "s", "beta"):
            raise ConfigError(f"cannot sweep {param!r}; use lambda, s or beta")
        key = {"lambda": "lam"}.get(param, param)
        return dataclasses.replace(self, bath=dataclasses.replace(self.bath, **{key: float(value)}))

    def as_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            out[f.name] = dataclasses.asdict(val) if dataclasses.is_dataclass(val) else val
        out["qubit"]["a0"] = repr(self.qubit.a0)
        out["qubit"]["a1"] = repr(self.qubit.a1)
        out["qubit"]["ops"] = [[[repr(complex(x)) for x in row] for row in np.asarray(op)] for op in self.qubit.ops]
        return _jsonable(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


# --- parsing ---------------------------------------------------------------

def parse_text(text: str) -> dict[str, str]:
    """Flat ``{dotted.key: raw value}`` mapping from config text."""
    out: dict[str, str] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if section and not key.lower().startswith(section.lower() + "."):
            key = f"{section}.{key}"
        full = key
        out[full.lower()] = value
    return out


def env_overrides(environ=None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX) and "__" in name[len(ENV_PREFIX):]:
            key = name[len(ENV_PREFIX):].lower().replace("__", ".")
            out[key] = value
    return out


def _float(key, raw) -> float:
    text = raw.strip().lower()
    if text in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def _int(key, raw) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _complex(key, raw) -> complex:
    try:
        return complex(raw.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"{key}: expected a complex number, got {raw!r}") from None


def _floats(key, raw) -> tuple:
    parts = [p for p in raw.replace(";", ",").split(",") if p.strip()]
    return tuple(_float(key, p) for p in parts)


def parse_matrix(key: str, raw: str) -> np.ndarray:
    """``"r00, r01; r10, r11"`` with complex entries."""
    rows = [[_complex(key, c) for c in r.split(",")] for r in raw.split(";")]
    if any(len(r) != len(rows[0]) for r in rows):
        raise ConfigError(f"{key}: ragged matrix {raw!r}")
    mat = np.array(rows, dtype=complex)
    if mat.shape != (2, 2):
        raise ConfigError(f"{key}: expected a 2x2 matrix 'a, b; c, d', got {raw!r}")
    return mat


_SIMPLE = {
    "bath.s": ("bath", "s", _float),
    "bath.lambda": ("bath", "lam", _float),
    "bath.omega_c": ("bath", "omega_c", _float),
    "bath.beta": ("bath", "beta", _float),
    "bath.cutoff": ("bath", "cutoff", lambda k, v: v.strip().lower()),
    "bath.cutoff_file": ("bath", "cutoff_file", lambda k, v: v.strip()),
    "qubit.preparation": ("qubit", "preparation", lambda k, v: v.strip().lower()),
    "qubit.a0": ("qubit", "a0", _complex),
    "qubit.a1": ("qubit", "a1", _complex),
    "qubit.omega0": ("qubit", "omega0", _float),
    "grid.t_min": ("grid", "t_min", _float),
    "grid.t_max": ("grid", "t_max", _float),
    "grid.points": ("grid", "points", _int),
    "grid.spacing": ("grid", "spacing", lambda k, v: v.strip().lower()),
    "grid.units": ("grid", "units", lambda k, v: v.strip().lower()),
    "tol.rel": ("tol", "rel", _float),
    "tol.abs": ("tol", "abs", _float),
    "tol.method": ("tol", "method", lambda k, v: v.strip().lower()),
    "discrete.modes": ("discrete", "modes", _int),
    "discrete.omega_max": ("discrete", "omega_max", _float),
    "validate.s_values": ("validate", "s_values", _floats),
    "validate.points": ("validate", "points", _int),
    "validate.t_min": ("validate", "t_min", _float),
    "validate.t_max": ("validate", "t_max", _float),
    "validate.discrete_t_max": ("validate", "discrete_t_max", _float),
    "validate.tol_closed": ("validate", "tol_closed", _float),
    "validate.tol_thermal": ("validate", "tol_thermal", _float),
    "validate.tol_discrete": ("validate", "tol_discrete", _float),
    "sweep.param": ("sweep", "param", lambda k, v: v.strip().lower()),
    "sweep.values": ("sweep", "values", _floats),
}

_DERIVED = ("bath.omega_tau_b", "bath.omega_beta", "qubit.omega0_beta", "output.stem")


def build(flat: dict[str, str], tol_profile: str | None = None, source: str | None = None) -> ScenarioConfig:
    sections: dict[str, dict] = {"bath": {}, "qubit": {}, "grid": {}, "tol": {}, "discrete": {},
                                 "validate": {}, "sweep": {}}
    ops: dict[int, np.ndarray] = {}
    for key, raw in flat.items():
        if key in _SIMPLE:
            sec, name, conv = _SIMPLE[key]
            sections[sec][name] = conv(key, raw)
        elif key.startswith("qubit.op."):
            try:
                idx = int(key.rsplit(".", 1)[1])
            except ValueError:
                raise ConfigError(f"{key}: operator keys are qubit.op.<integer>") from None
            ops[idx] = parse_matrix(key, raw)
        elif key not in _DERIVED:
            raise ConfigError(f"unknown config key {key!r}")

    omega_c = sections["bath"].get("omega_c", BathConfig.omega_c)
    if "bath.omega_tau_b" in flat:
        if "beta" in sections["bath"]:
            raise ConfigError("give only one of bath.beta and bath.omega_tau_b")
        sections["bath"]["beta"] = math.pi * _float("bath.omega_tau_b", flat["bath.omega_tau_b"]) / omega_c
    if "bath.omega_beta" in flat:
        if "beta" in sections["bath"]:
            raise ConfigError("give only one of bath.beta, bath.omega_beta and bath.omega_tau_b")
        sections["bath"]["beta"] = _float("bath.omega_beta", flat["bath.omega_beta"]) / omega_c
    if "qubit.omega0_beta" in flat:
        if "omega0" in sections["qubit"]:
            raise ConfigError("give only one of qubit.omega0 and qubit.omega0_beta")
        beta = sections["bath"].get("beta", BathConfig.beta)
        if math.isinf(beta):
            raise ConfigError("qubit.omega0_beta needs a finite temperature")
        sections["qubit"]["omega0"] = _float("qubit.omega0_beta", flat["qubit.omega0_beta"]) / beta
    if ops:
        sections["qubit"]["ops"] = tuple(ops[k] for k in sorted(ops))
    if tol_profile is not None:
        if tol_profile not in TOL_PROFILES:
            raise ConfigError(f"unknown tolerance profile {tol_profile!r}")
        # an explicit profile on the command line wins over the file
        sections["tol"].update(TOL_PROFILES[tol_profile])
    try:
        return ScenarioConfig(
            bath=BathConfig(**sections["bath"]),
            qubit=QubitConfig(**sections["qubit"]),
            grid=GridConfig(**sections["grid"]),
            tol=TolConfig(**sections["tol"]),
            discrete=DiscreteConfig(**sections["discrete"]),
            validate=ValidateConfig(**sections["validate"]),
            sweep=SweepConfig(**sections["sweep"]),
            stem=flat.get("output.stem", "run").strip() or "run",
            source=source,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load(path: str | Path | None, tol_profile: str | None = None, environ=None) -> ScenarioConfig:
    """Read a config file (or defaults when ``path`` is None), apply env overrides, validate."""
    flat: dict[str, str] = {}
    source = None
    if path is not None:
        source = str(path)
        text = Path(path).read_text()  # OSError propagates: an I/O failure, not a parse error
        flat.update(parse_text(text))
    flat.update(env_overrides(environ))
    return build(flat, tol_profile=tol_profile, source=source)
