"""Command-line surface: one subcommand per experiment, CSV/JSON artifacts.

Artifact contract: the main table (CSV with `#`-prefixed metadata lines, or a
JSON document) is a pure function of the resolved config, so reruns are byte
identical; volatile facts (wall time) go to a `.meta.json` sidecar instead.
All files are written atomically and nothing partial survives a failure.

Exit codes: 0 success, 2 configuration error, 3 numerical check failed,
4 infeasible model (flux quantization, cluster separation, degenerate bands).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .continuum import (
    FourierPotential,
    continuum_hamiltonian,
    distances_decreasing,
    feasible_field,
    landau_torus_basis,
    strong_field_report,
)
from .disorder import anderson_realization, ensemble_dos, gap_fill_fraction
from .dynamics import defect_scaling
from .errors import ConfigError, InfeasibleModelError, NumericalCheckError
from .lattice import (
    FourierDispersion,
    RationalFlux,
    add_onsite_disorder,
    harper_family,
    hofstadter_family,
    peierls_quantize,
    symmetric_gauge_box,
)
from .spectra import (
    SpectrumSample,
    _point_to_intervals,
    band_intervals,
    chern_numbers,
    eigenvalues_hermitian,
    hausdorff,
    spectrum_union,
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict


@dataclass
class RunArtifact:
    command: str
    columns: list
    rows: list
    meta: dict
    notes: list = field(default_factory=list)
    ok: bool = True
    fail_code: int = 3


def _float_list(value):
    if isinstance(value, (list, tuple)):
        return [float(x) for x in value]
    return [float(tok) for tok in str(value).split(",") if tok.strip()]


def _str_list(value):
    if isinstance(value, (list, tuple)):
        return [str(x) for x in value]
    return [tok.strip() for tok in str(value).split(",") if tok.strip()]


def _field_value(value):
    """Field parameter given as a float or a fraction string like '1/8'."""
    return float(Fraction(str(value)))


def _bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).lower()
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


_DEFAULT_TIMES = [0.5 * i for i in range(11)]

# name -> (caster, default, help); None default means "required".
_SPECS = {
    "butterfly": {
        "qmax": (int, 20, "largest fiber denominator"),
        "kgrid": (int, 64, "k points per axis"),
    },
    "fiber-spectrum": {
        "flux": (str, None, "rational flux p/q"),
        "kgrid": (int, 200, "k points along k1"),
        "kgrid2": (int, 0, "k points along k2 (0 = same as kgrid)"),
        "gap_tol": (float, 0.0, "band merge tolerance (0 = automatic)"),
    },
    "harper-spectrum": {
        "flux": (str, None, "rational frequency p/q"),
        "thetagrid": (int, 64, "phase offsets sampled in [0, 1)"),
        "kgrid": (int, 64, "Bloch momenta sampled in [0, 2 pi)"),
        "gap_tol": (float, 0.0, "band merge tolerance (0 = automatic)"),
        "tol": (float, 1e-2, "pass threshold vs the 2D lattice spectrum"),
    },
    "peierls-check": {
        "flux": (_str_list, ["1/3", "2/5"], "flux values to test"),
        "kgrid": (int, 16, "k points per axis"),
        "tol": (float, 1e-10, "eigenvalue agreement threshold"),
    },
    "gauge-check": {
        "B": (_field_value, 0.125, "field parameter (float or p/q)"),
        "L": (int, 16, "torus side in sites"),
        "kgrid": (int, 64, "fiber k points per axis"),
        "gap_tol": (float, 1.0, "band merge tolerance"),
        "tol": (float, 0.05, "pass threshold on the Hausdorff distance"),
        "qmax": (int, 64, "denominator bound when snapping 2B to p/q"),
    },
    "chern": {
        "flux": (str, "1/3", "rational flux p/q"),
        "kgrid": (int, 30, "k points per axis"),
    },
    "continuum-spectrum": {
        "B": (_field_value, None, "field parameter"),
        "ncells": (int, 4, "potential cells per torus side"),
        "nlevels": (int, 6, "retained Landau levels"),
        "amplitude": (float, 1.0, "cosine potential amplitude"),
    },
    "lll-compare": {
        "B": (_float_list, [10.0, 20.0, 40.0], "field values"),
        "ncells": (int, 4, "potential cells per torus side"),
        "nlevels": (int, 6, "retained Landau levels"),
        "amplitude": (float, 1.0, "cosine potential amplitude"),
    },
    "dynamics-defect": {
        "B": (_float_list, [10.0, 20.0, 40.0], "field values"),
        "times": (_float_list, _DEFAULT_TIMES, "time grid"),
        "ncells": (int, 4, "potential cells per torus side"),
        "nlevels": (int, 6, "retained Landau levels"),
        "amplitude": (float, 1.0, "cosine potential amplitude"),
        "seed": (int, 7, "wave packet seed"),
    },
    "disorder-dos": {
        "flux": (str, "1/3", "rational flux p/q"),
        "L": (int, 30, "box side in sites"),
        "W": (float, 2.0, "disorder strength"),
        "dist": (str, "uniform", "coupling distribution (uniform|gaussian)"),
        "nseeds": (int, 20, "ensemble size"),
        "seed": (int, 0, "base seed"),
        "width": (float, 0.02, "DOS smoothing width"),
        "bins": (int, 200, "DOS bins"),
        "gap_tol": (float, 0.05, "band merge tolerance for the clean spectrum"),
        "kgrid": (int, 200, "k grid for the clean reference bands"),
    },
}

_COMMON = {
    "out": (str, "", "output table path ('' = print to stdout)"),
    "format": (str, "csv", "table format: csv or json"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxlab",
        description="magnetic lattice and Landau-level spectral experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in _SPECS.items():
        cmd = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        for key, (_, default, help_text) in spec.items():
            cmd.add_argument(
                f"--{key.replace('_', '-')}",
                dest=key,
                help=f"{help_text} (default: {default!r})",
            )
        for key, (_, default, help_text) in _COMMON.items():
            cmd.add_argument(
                f"--{key}", dest=key, help=f"{help_text} (default: {default!r})"
            )
        cmd.add_argument("--config", dest="config", help="JSON config file")
    return parser


def parse_config(args: argparse.Namespace) -> RunConfig:
    """Resolve defaults, config file, and flags (flags win) into a RunConfig."""
    command = args.command
    spec = dict(_SPECS[command])
    spec.update(_COMMON)
    params = {key: default for key, (_, default, _h) in spec.items()}

    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {config_path} is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {config_path} must hold a JSON object")
        for key, value in loaded.items():
            if key not in spec:
                raise ConfigError(
                    f"unknown config key {key!r} for {command}; "
                    f"valid keys: {', '.join(sorted(spec))}"
                )
            params[key] = value

    for key in spec:
        if hasattr(args, key):
            params[key] = getattr(args, key)

    resolved = {}
    for key, value in params.items():
        caster = spec[key][0]
        if value is None:
            raise ConfigError(f"{command} requires --{key.replace('_', '-')}")
        try:
            resolved[key] = caster(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})")
    if resolved["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown format {resolved['format']!r}; use csv or json")
    return RunConfig(command=command, params=resolved)


def _cmd_butterfly(p: dict) -> RunArtifact:
    if p["qmax"] < 1:
        raise ConfigError("qmax must be >= 1")
    if p["kgrid"] < 1:
        raise ConfigError("kgrid must be >= 1")
    fluxes = [RationalFlux(0, 1), RationalFlux(1, 1)]
    for q in range(2, p["qmax"] + 1):
        for num in range(1, q):
            if np.gcd(num, q) == 1:
                fluxes.append(RationalFlux(num, q))
    fluxes.sort(key=lambda f: (f.value, f.q))
    ks = 2.0 * np.pi * np.arange(p["kgrid"]) / p["kgrid"]
    rows = []
    for flux in fluxes:
        w = np.linalg.eigvalsh(hofstadter_family(flux).batch(ks, ks))
        per_band = w.reshape(-1, flux.q)
        lo = per_band.min(axis=0)
        hi = per_band.max(axis=0)
        quarts = np.quantile(per_band, [0.25, 0.5, 0.75], axis=0)
        for band in range(flux.q):
            rows.append(
                (
                    flux.p,
                    flux.q,
                    band,
                    float(lo[band]),
                    float(hi[band]),
                    float(quarts[0, band]),
                    float(quarts[1, band]),
                    float(quarts[2, band]),
                )
            )
    return RunArtifact(
        command="butterfly",
        columns=["p", "q", "band", "e_min", "e_max", "q25", "q50", "q75"],
        rows=rows,
        meta={"n_flux_values": len(fluxes)},
        notes=[f"butterfly: {len(fluxes)} flux values, {len(rows)} band rows"],
    )


def _cmd_fiber_spectrum(p: dict) -> RunArtifact:
    flux = RationalFlux.from_string(p["flux"])
    n2 = p["kgrid2"] or p["kgrid"]
    sample = spectrum_union(hofstadter_family(flux), p["kgrid"], n2)
    gap_tol = p["gap_tol"] if p["gap_tol"] > 0 else None
    bands = band_intervals(sample, gap_tol)
    rows = [(i, a, b) for i, (a, b) in enumerate(bands.intervals)]
    return RunArtifact(
        command="fiber-spectrum",
        columns=["band", "e_lo", "e_hi"],
        rows=rows,
        meta={
            "gap_tol_used": bands.gap_tol,
            "n_eigenvalues": int(sample.values.size),
            "e_min": float(sample.values[0]),
            "e_max": float(sample.values[-1]),
        },
        notes=[
            f"fiber-spectrum: {len(rows)} band(s) in "
            f"[{sample.values[0]:.6g}, {sample.values[-1]:.6g}]"
        ],
    )


def _cmd_harper_spectrum(p: dict) -> RunArtifact:
    flux = RationalFlux.from_string(p["flux"])
    family = harper_family(flux)
    ks = 2.0 * np.pi * np.arange(p["kgrid"]) / p["kgrid"]
    thetas = 2.0 * np.pi * np.arange(p["thetagrid"]) / p["thetagrid"]
    vals = np.sort(np.linalg.eigvalsh(family.batch(ks, thetas)).ravel())
    sample = SpectrumSample(
        values=vals,
        meta={"flux": p["flux"], "grid": [p["kgrid"], p["thetagrid"]]},
    )
    lattice_sample = spectrum_union(
        hofstadter_family(flux), p["kgrid"], p["thetagrid"]
    )
    dist = hausdorff(sample, lattice_sample)
    gap_tol = p["gap_tol"] if p["gap_tol"] > 0 else None
    bands = band_intervals(sample, gap_tol)
    rows = [(i, a, b) for i, (a, b) in enumerate(bands.intervals)]
    ok = dist <= p["tol"]
    return RunArtifact(
        command="harper-spectrum",
        columns=["band", "e_lo", "e_hi"],
        rows=rows,
        meta={
            "gap_tol_used": bands.gap_tol,
            "hausdorff_vs_lattice": dist,
            "tol": p["tol"],
        },
        notes=[
            f"harper-spectrum: hausdorff vs 2D lattice = {dist:.3e} "
            f"(tol {p['tol']:g}) -> {'pass' if ok else 'FAIL'}"
        ],
        ok=ok,
    )


def _cmd_peierls_check(p: dict) -> RunArtifact:
    disp = FourierDispersion.nearest_neighbor()
    ks = 2.0 * np.pi * np.arange(p["kgrid"]) / p["kgrid"]
    rows = []
    worst_overall = 0.0
    for flux_text in p["flux"]:
        flux = RationalFlux.from_string(flux_text)
        quantized = peierls_quantize(disp, flux)
        reference = hofstadter_family(flux)
        wq = np.linalg.eigvalsh(quantized.batch(ks, ks))
        wr = np.linalg.eigvalsh(reference.batch(ks, ks))
        worst = float(np.max(np.abs(wq - wr)))
        rows.append((flux.p, flux.q, worst))
        worst_overall = max(worst_overall, worst)
    ok = worst_overall <= p["tol"]
    return RunArtifact(
        command="peierls-check",
        columns=["p", "q", "max_eigenvalue_deviation"],
        rows=rows,
        meta={"tol": p["tol"], "kgrid": p["kgrid"]},
        notes=[
            f"peierls-check: max deviation {worst_overall:.3e} "
            f"(tol {p['tol']:g}) -> {'pass' if ok else 'FAIL'}"
        ],
        ok=ok,
    )


def _cmd_gauge_check(p: dict) -> RunArtifact:
    box = symmetric_gauge_box(p["B"], p["L"], boundary="magnetic-periodic")
    box_vals = eigenvalues_hermitian(box.matrix)
    box_bands = band_intervals(box_vals, p["gap_tol"])
    target = (2.0 * p["B"]) % 1.0
    flux = RationalFlux.from_float(target, q_max=p["qmax"])
    if abs(flux.value - target) > 1e-9:
        raise ConfigError(
            f"2B = {target:.12g} is not rational with denominator <= "
            f"{p['qmax']}; nearest is {flux.p}/{flux.q}"
        )
    fiber_sample = spectrum_union(hofstadter_family(flux), p["kgrid"])
    fiber_bands = band_intervals(fiber_sample, p["gap_tol"])
    dist = hausdorff(box_bands, fiber_bands)
    containment = max(
        _point_to_intervals(float(x), fiber_bands.intervals) for x in box_vals
    )
    ok = dist <= p["tol"]
    rows = [
        (
            p["B"],
            p["L"],
            flux.p,
            flux.q,
            dist,
            containment,
            len(box_bands.intervals),
            len(fiber_bands.intervals),
        )
    ]
    return RunArtifact(
        command="gauge-check",
        columns=[
            "B",
            "L",
            "fiber_p",
            "fiber_q",
            "hausdorff",
            "containment",
            "box_bands",
            "fiber_bands",
        ],
        rows=rows,
        meta={"tol": p["tol"], "gap_tol": p["gap_tol"], "kgrid": p["kgrid"]},
        notes=[
            f"gauge-check: hausdorff = {dist:.3e}, containment = "
            f"{containment:.3e} (tol {p['tol']:g}) -> {'pass' if ok else 'FAIL'}"
        ],
        ok=ok,
    )


def _cmd_chern(p: dict) -> RunArtifact:
    flux = RationalFlux.from_string(p["flux"])
    cherns = chern_numbers(hofstadter_family(flux), grid=p["kgrid"])
    total = sum(cherns)
    rows = [(band, c) for band, c in enumerate(cherns)]
    ok = total == 0
    return RunArtifact(
        command="chern",
        columns=["band", "chern"],
        rows=rows,
        meta={"kgrid": p["kgrid"], "sum": total},
        notes=[
            f"chern: {tuple(cherns)} sum {total} -> {'pass' if ok else 'FAIL'}"
        ],
        ok=ok,
    )


def _cmd_continuum_spectrum(p: dict) -> RunArtifact:
    potential = FourierPotential.cosine_xy(p["amplitude"])
    b_used, n_flux = feasible_field(p["B"], p["ncells"], potential.cell)
    basis = landau_torus_basis(b_used, n_flux, p["nlevels"], cell=potential.cell)
    ham = continuum_hamiltonian(basis, potential)
    w = np.linalg.eigvalsh(ham.matrix)
    rows = [(i, float(e)) for i, e in enumerate(w)]
    return RunArtifact(
        command="continuum-spectrum",
        columns=["index", "energy"],
        rows=rows,
        meta={
            "field_requested": p["B"],
            "field_used": b_used,
            "n_flux": n_flux,
            "n_cells": basis.n_cells,
            "n_levels": basis.n_levels,
        },
        notes=[
            f"continuum-spectrum: B = {b_used:.9g} ({n_flux} flux quanta), "
            f"{len(rows)} levels in [{w[0]:.6g}, {w[-1]:.6g}]"
        ],
    )


def _cmd_lll_compare(p: dict) -> RunArtifact:
    potential = FourierPotential.cosine_xy(p["amplitude"])
    report = strong_field_report(
        p["B"], potential, n_levels=p["nlevels"], n_cells=p["ncells"]
    )
    rows = [
        (
            r.field_requested,
            r.field,
            r.n_flux,
            r.cluster_gap,
            r.distance,
            r.coupling_next_level,
            r.separated,
        )
        for r in report
    ]
    all_separated = all(r.separated for r in report)
    monotone = distances_decreasing(report)
    ok = all_separated and (len(report) < 2 or monotone)
    notes = [
        "lll-compare: distances "
        + ", ".join(f"{r.distance:.4e}" for r in report)
        + (" strictly decreasing" if monotone else " NOT decreasing")
        + ("" if all_separated else "; some clusters not separated")
        + f" -> {'pass' if ok else 'FAIL'}"
    ]
    return RunArtifact(
        command="lll-compare",
        columns=[
            "field_requested",
            "field",
            "n_flux",
            "cluster_gap",
            "distance",
            "coupling_next_level",
            "separated",
        ],
        rows=rows,
        meta={"ncells": p["ncells"], "nlevels": p["nlevels"]},
        notes=notes,
        ok=ok,
        fail_code=4 if not all_separated else 3,
    )


def _cmd_dynamics_defect(p: dict) -> RunArtifact:
    potential = FourierPotential.cosine_xy(p["amplitude"])
    report = defect_scaling(
        p["B"],
        potential,
        p["times"],
        n_levels=p["nlevels"],
        n_cells=p["ncells"],
        seed=p["seed"],
    )
    rows = [
        (
            r.field_requested,
            r.field,
            r.n_flux,
            r.projector_distance,
            r.defect_zero,
            r.max_defect,
            r.slope,
            r.separated,
        )
        for r in report.rows
    ]
    all_separated = all(r.separated for r in report.rows)
    zero_ok = all(r.defect_zero < 1e-10 for r in report.rows if r.separated)
    bounded = all(r.max_defect <= 2.0 for r in report.rows if r.separated)
    ok = all_separated and report.monotone and zero_ok and bounded
    notes = [
        "dynamics-defect: slopes "
        + ", ".join(f"{r.slope:.4e}" for r in report.rows)
        + (" strictly decreasing" if report.monotone else " NOT decreasing")
        + ("" if all_separated else "; some clusters not separated")
        + f" -> {'pass' if ok else 'FAIL'}"
    ]
    return RunArtifact(
        command="dynamics-defect",
        columns=[
            "field_requested",
            "field",
            "n_flux",
            "projector_distance",
            "defect_zero",
            "max_defect",
            "slope",
            "separated",
        ],
        rows=rows,
        meta={
            "ncells": p["ncells"],
            "nlevels": p["nlevels"],
            "seed": p["seed"],
            "times": list(p["times"]),
        },
        notes=notes,
        ok=ok,
        fail_code=4 if not all_separated else 3,
    )


def _cmd_disorder_dos(p: dict) -> RunArtifact:
    flux = RationalFlux.from_string(p["flux"])
    b_box = flux.value / 2.0
    clean = symmetric_gauge_box(b_box, p["L"], boundary="magnetic-periodic")
    clean_vals = eigenvalues_hermitian(clean.matrix)
    # Clean gaps come from the dense fiber spectrum (the crystal's actual
    # band set): the finite box samples each band at only L^2 momenta, and
    # those within-band sampling holes would masquerade as gaps.
    reference = spectrum_union(hofstadter_family(flux), p["kgrid"])
    clean_bands = band_intervals(reference, p["gap_tol"])
    pad = 8.0 * p["width"]
    bounds = (float(clean_vals[0]) - pad - p["W"], float(clean_vals[-1]) + pad + p["W"])

    def builder(seed):
        noise = anderson_realization(p["L"], p["dist"], p["W"], seed)
        return add_onsite_disorder(clean, noise.onsite_values())

    stats = ensemble_dos(
        builder,
        p["nseeds"],
        p["seed"],
        width=p["width"],
        bins=p["bins"],
        bounds=bounds,
    )
    fill = gap_fill_fraction(clean_bands, stats)
    hist = stats.histogram
    centers = hist.centers
    rows = [
        (float(centers[i]), float(hist.density[i]), float(stats.stderr[i]))
        for i in range(len(centers))
    ]
    return RunArtifact(
        command="disorder-dos",
        columns=["energy", "density", "stderr"],
        rows=rows,
        meta={
            "gap_fill_fraction": fill,
            "clean_bands": [list(iv) for iv in clean_bands.intervals],
            "W": p["W"],
            "nseeds": p["nseeds"],
            "base_seed": p["seed"],
        },
        notes=[
            f"disorder-dos: W = {p['W']:g}, {p['nseeds']} seeds, "
            f"gap fill fraction = {fill:.4f}"
        ],
    )


_COMMANDS = {
    "butterfly": _cmd_butterfly,
    "fiber-spectrum": _cmd_fiber_spectrum,
    "harper-spectrum": _cmd_harper_spectrum,
    "peierls-check": _cmd_peierls_check,
    "gauge-check": _cmd_gauge_check,
    "chern": _cmd_chern,
    "continuum-spectrum": _cmd_continuum_spectrum,
    "lll-compare": _cmd_lll_compare,
    "dynamics-defect": _cmd_dynamics_defect,
    "disorder-dos": _cmd_disorder_dos,
}


def run_command(cfg: RunConfig) -> RunArtifact:
    return _COMMANDS[cfg.command](cfg.params)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _table_config(cfg: RunConfig) -> str:
    safe = {k: v for k, v in cfg.params.items() if k != "out"}
    return json.dumps(safe, sort_keys=True, separators=(",", ":"))


def render_csv(artifact: RunArtifact, cfg: RunConfig) -> str:
    lines = [
        f"# fluxlab {__version__}",
        f"# command: {artifact.command}",
        f"# config: {_table_config(cfg)}",
    ]
    for key in sorted(artifact.meta):
        lines.append(f"# {key}: {json.dumps(artifact.meta[key])}")
    lines.append(",".join(artifact.columns))
    for row in artifact.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(artifact: RunArtifact, cfg: RunConfig) -> str:
    doc = {
        "version": __version__,
        "command": artifact.command,
        "config": json.loads(_table_config(cfg)),
        "meta": artifact.meta,
        "columns": artifact.columns,
        "rows": [[_json_value(v) for v in row] for row in artifact.rows],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if np.isfinite(v) else repr(v)
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fluxlab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(artifact: RunArtifact, cfg: RunConfig, wall_time: float) -> None:
    text = (
        render_csv(artifact, cfg)
        if cfg.params["format"] == "csv"
        else render_json(artifact, cfg)
    )
    out = cfg.params["out"]
    if not out:
        sys.stdout.write(text)
        return
    sidecar = {
        "version": __version__,
        "command": artifact.command,
        "config": json.loads(_table_config(cfg)),
        "ok": artifact.ok,
        "rows": len(artifact.rows),
        "wall_time_s": wall_time,
    }
    sidecar_path = os.path.splitext(out)[0] + ".meta.json"
    written = []
    try:
        _atomic_write(out, text)
        written.append(out)
        _atomic_write(sidecar_path, json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
        written.append(sidecar_path)
    except BaseException:
        for path in written:
            if os.path.exists(path):
                os.unlink(path)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        cfg = parse_config(args)
        artifact = run_command(cfg)
        emit(artifact, cfg, wall_time=time.monotonic() - started)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfeasibleModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    for note in artifact.notes:
        print(note)
    if not artifact.ok:
        return artifact.fail_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
