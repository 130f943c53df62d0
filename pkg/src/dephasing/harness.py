"""Batch computations behind the command line: time series, sweeps, validation, limits."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import decoherence as dec
from . import discrete, labels, qubit
from .config import ScenarioConfig
from .numerics import DivergenceError
from .spectral import BathSpec, SpectralDensity, classify_regime, reorganization_shift

COLUMNS = (
    "t", "gamma_vac", "gamma_th", "gamma_corr", "phi", "chi", "gamma_total",
    "re_coherence", "im_coherence", "abs_coherence", "bloch_norm", "entropy",
    "abs_coherence_uncorrelated",
)


class NumericalError(RuntimeError):
    """A computed column that must be finite is not."""


def _method(cfg: ScenarioConfig, bath: BathSpec) -> str:
    m = cfg.tol.method
    if m == "auto":
        return "closed" if bath.j.is_exponential else "quadrature"
    return m


def _num(x):
    """JSON-safe float: 'inf' strings for infinities, None stays None."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# --- time series -------------------------------------------------------------

def compute_series(cfg: ScenarioConfig) -> dict[str, np.ndarray]:
    bath = cfg.bath_spec()
    prep = cfg.preparation()
    t = cfg.times()
    method = _method(cfg, bath)
    rel = cfg.tol.rel
    gv = np.atleast_1d(dec.gamma_vac(bath, t, method, rel_tol=rel))
    gt = np.atleast_1d(dec.gamma_th(bath, t, method, rel_tol=rel))
    ph = np.atleast_1d(dec.phi(bath, t, method, rel_tol=rel))
    damp = np.exp(1j * prep.omega0 * t) * np.exp(-(gv + gt))

    if isinstance(prep, qubit.OperatorList):
        rho0 = qubit.reduced_initial_state(prep, bath)
        n0, n1, d = qubit._weighted_elements(prep, qubit._a(prep, bath))
        num = n0 * np.exp(1j * ph) + n1 * np.exp(-1j * ph)
        coh = damp * num / d
        sp0 = (n0 + n1) / d
        if n0 + n1 != 0:
            ratio = num / (n0 + n1)
            with np.errstate(divide="ignore"):
                gc = -np.log(np.abs(ratio))
            ch = np.unwrap(np.angle(ratio))
        else:
            gc = np.full_like(t, np.nan)
            ch = np.full_like(t, np.nan)
        m = float(rho0[1, 1].real - rho0[0, 0].real)
    else:
        sp0 = prep.sigma_plus
        m = prep.m
        if cfg.correlated:
            ctx = qubit.correlation_context(prep, bath)
            gc = np.atleast_1d(dec.gamma_corr(ctx, ph))
            ch = np.atleast_1d(dec.chi(ctx, ph))
            coh = sp0 * damp * (np.cos(ph) + 1j * ctx.kappa * np.sin(ph))
        else:
            gc = np.zeros_like(t)
            ch = np.zeros_like(t)
            coh = sp0 * damp
    v = np.minimum(1.0, np.sqrt(m * m + 4.0 * np.abs(coh) ** 2))
    cols = {
        "t": t, "gamma_vac": gv, "gamma_th": gt, "gamma_corr": gc, "phi": ph, "chi": ch,
        "gamma_total": gv + gt + gc,
        "re_coherence": coh.real, "im_coherence": coh.imag, "abs_coherence": np.abs(coh),
        "bloch_norm": v, "entropy": np.atleast_1d(qubit.entropy(v)),
        "abs_coherence_uncorrelated": np.abs(sp0) * np.exp(-(gv + gt)),
    }
    for name in ("gamma_vac", "gamma_th", "phi", "re_coherence", "im_coherence", "bloch_norm", "entropy"):
        if not np.all(np.isfinite(cols[name])):
            raise NumericalError(f"non-finite values in column {name}")
    return cols


def format_value(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, cols: dict[str, np.ndarray]) -> None:
    lines = [",".join(COLUMNS)]
    n = len(cols["t"])
    for i in range(n):
        lines.append(",".join(format_value(cols[c][i]) for c in COLUMNS))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# --- summary -------------------------------------------------------------------

def _limits_dict(lim: dec.LongTimeLimits) -> dict:
    return {
        "gamma_vac_inf": _num(lim.gamma_vac_inf),
        "gamma_th_inf": _num(lim.gamma_th_inf),
        "phi_inf": _num(lim.phi_inf),
        "gamma_corr_inf": _num(lim.gamma_corr_inf),
        "gamma_inf": _num(lim.gamma_inf),
    }


def _operator_corr_limit(prep, bath, phi_inf):
    if phi_inf is None:
        return None
    n0, n1, _ = qubit._weighted_elements(prep, qubit._a(prep, bath))
    if n0 + n1 == 0:
        return math.nan
    r = abs((n0 * np.exp(1j * phi_inf) + n1 * np.exp(-1j * phi_inf)) / (n0 + n1))
    return math.inf if r == 0.0 else -math.log(r)


def limits_report(cfg: ScenarioConfig) -> dict:
    bath = cfg.bath_spec()
    prep = cfg.preparation()
    j = bath.j
    ctx = None
    if isinstance(prep, qubit.PureProjector) and cfg.correlated:
        ctx = qubit.correlation_context(prep, bath)
    lim = dec.long_time_limits(bath, ctx)
    if isinstance(prep, qubit.OperatorList):
        lim = replace(lim, gamma_corr_inf=_operator_corr_limit(prep, bath, lim.phi_inf))
    bounds = dec.sufficiency_bounds(bath)
    try:
        reorg = reorganization_shift(j)
    except DivergenceError:
        reorg = math.inf
    regime = classify_regime(j.s)
    report = {
        "regime": {"kind": regime.kind, "decoherence": regime.decoherence},
        "limits": _limits_dict(lim),
        "bounds": {"vac_bound": _num(bounds.vac_bound), "th_bound": _num(bounds.th_bound)},
        "reorganization_shift": _num(reorg),
        "table1": labels.table_labels(j.s, j.lambda_s),
    }
    if isinstance(prep, qubit.PureProjector):
        report["entropy_limit"] = _num(qubit.entropy_limit(prep, bath, correlated=cfg.correlated))
    return report


def summarize(cfg: ScenarioConfig, cols: dict[str, np.ndarray]) -> dict:
    rep = limits_report(cfg)
    lim = rep["limits"]

    def as_limit(x):
        if x is None:
            return None
        return math.inf if x == "inf" else (math.nan if x == "nan" else float(x))

    rep["extrema"] = {
        name: labels.extrema_counts(cols[name])
        for name in ("gamma_vac", "gamma_th", "gamma_corr", "phi", "abs_coherence")
    }
    rep["observed"] = {
        "gamma_vac": labels.observed_label(cols["gamma_vac"], as_limit(lim["gamma_vac_inf"])),
        "gamma_th": labels.observed_label(cols["gamma_th"], as_limit(lim["gamma_th_inf"])),
        "gamma_corr": labels.observed_label(cols["gamma_corr"], as_limit(lim["gamma_corr_inf"])),
    }
    rep["gamma_corr_infinite_points"] = int(np.sum(np.isinf(cols["gamma_corr"])))
    rep["config"] = cfg.as_dict()
    rep["columns"] = list(COLUMNS)
    return rep


def write_json(path: Path, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg: ScenarioConfig, out_dir: Path, stem: str | None = None) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or cfg.stem
    cols = compute_series(cfg)
    summary = summarize(cfg, cols)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    write_csv(csv_path, cols)
    write_json(json_path, summary)
    return {"csv": str(csv_path), "json": str(json_path), "summary": summary}


def format_param(value: float) -> str:
    return "inf" if math.isinf(value) else format(value, "g")


def _sweep_one(args):
    cfg, param, value, out_dir = args
    stem = f"{cfg.stem}_{param}_{format_param(value)}"
    res = run(cfg.with_param(param, value), out_dir, stem)
    s = res["summary"]
    return {
        "value": _num(value), "csv": Path(res["csv"]).name, "json": Path(res["json"]).name,
        "regime": s["regime"], "limits": s["limits"], "table1": s["table1"], "observed": s["observed"],
    }


def sweep(cfg: ScenarioConfig, param: str, values, out_dir: Path, workers: int = 1) -> dict:
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    for v in values:
        cfg.with_param(param, v)  # validates the parameter name and value eagerly
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, param, v, out_dir) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_sweep_one, jobs))
    else:
        entries = [_sweep_one(j) for j in jobs]
    index = {"param": param, "stem": cfg.stem, "entries": entries}
    write_json(out_dir / f"{cfg.stem}_{param}_index.json", index)
    return index


# --- validation ------------------------------------------------------------------

def _rel_err(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(b), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b) / scale))


def _check(name, s, err, tol, status=None, note=None) -> dict:
    if status is None:
        status = "pass" if err <= tol else "fail"
    out = {"name": name, "s": s, "max_rel_error": _num(err), "tol": tol, "status": status}
    if note:
        out["note"] = note
    return out


def _validate_s(args) -> list[dict]:
    cfg, s = args
    v = cfg.validate
    base = cfg.spectral_density()
    j = SpectralDensity(base.lambda_s, s, base.Omega, base.cutoff)
    bath = BathSpec(j, cfg.bath.beta)
    t = np.geomspace(v.t_min, v.t_max, v.points) / j.Omega
    rel = cfg.tol.rel
    checks = []
    thermal = not bath.zero_temperature

    q_vac = np.atleast_1d(dec.gamma_vac(bath, t, "quadrature", rel_tol=rel))
    q_phi = np.atleast_1d(dec.phi(bath, t, "quadrature", rel_tol=rel))
    q_th = np.atleast_1d(dec.gamma_th(bath, t, "quadrature", rel_tol=rel)) if thermal else None
    if j.is_exponential:
        checks.append(_check("gamma_vac closed vs quadrature", s, _rel_err(q_vac, dec.gamma_vac(bath, t)), v.tol_closed))
        checks.append(_check("phi closed vs quadrature", s, _rel_err(q_phi, dec.phi(bath, t)), v.tol_closed))
        if thermal:
            checks.append(_check("gamma_th closed vs quadrature", s, _rel_err(q_th, dec.gamma_th(bath, t)),
                                 v.tol_thermal))
        else:
            checks.append(_check("gamma_th closed vs quadrature", s, 0.0, v.tol_thermal, "skipped",
                                 "zero temperature"))
    else:
        for name in ("gamma_vac", "phi", "gamma_th"):
            checks.append(_check(f"{name} closed vs quadrature", s, 0.0, v.tol_closed, "skipped",
                                 "closed forms need the exponential cutoff"))

    mask = t * j.Omega <= v.discrete_t_max
    db = discrete.discretize(j, cfg.discrete.modes, cfg.discrete.omega_max)
    cont_gamma = q_vac[mask] + (q_th[mask] if thermal else 0.0)
    checks.append(_check("gamma discrete vs continuum", s,
                         _rel_err(discrete.gamma_discrete(db, bath.beta, t[mask]), cont_gamma), v.tol_discrete,
                         note=None if thermal else "vacuum only"))
    checks.append(_check("phi discrete vs continuum", s,
                         _rel_err(discrete.phi_discrete(db, t[mask]), q_phi[mask]), v.tol_discrete))
    return checks


def validate(cfg: ScenarioConfig, workers: int = 1) -> dict:
    jobs = [(cfg, float(s)) for s in cfg.validate.s_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(_validate_s, jobs))
    else:
        groups = [_validate_s(j) for j in jobs]
    checks = [c for g in groups for c in g]
    passed = all(c["status"] != "fail" for c in checks)
    return {
        "passed": passed,
        "lambda": cfg.bath.lam, "omega_c": cfg.bath.omega_c, "beta": _num(cfg.bath.beta),
        "discrete_modes": cfg.discrete.modes,
        "checks": checks,
    }
