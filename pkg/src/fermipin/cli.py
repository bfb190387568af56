"""Command-line front end for the solve -> spectrum -> pinning pipeline.

Each command computes a JSON-serializable payload first; the table and CSV
renderers format that same payload, so every output format carries identical
numbers.  Exit codes: 0 success, 2 argument/model/parse problems, 3
representability violations, 4 when imposed constraints leave no
determinants.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ci import CIVector, solve_ground
from .errors import (
    FermipinError,
    NoSurvivorsError,
    RepresentabilityError,
    SpectralRangeError,
)
from .fock import Determinant, census, enumerate_space, interleaved_layout
from .gpc import (
    DEFAULT_TIERS,
    Catalog,
    GPConstraint,
    PinningReport,
    catalog,
    classify_tier,
    evaluate,
    load_catalog_file,
)
from .integrals import (
    SpinOrbitalIntegrals,
    hubbard_chain,
    load_integral_file,
    pairing_model,
    to_spin_orbitals,
)
from .rdm import OccupationSpectrum, hf_distance, natural_spectrum, one_rdm
from .selection import SECTOR_PRESETS, filter_pinned, pinned_census, pinned_solve

LEADING_COEFFICIENTS = 8
DEGREE_NAMES = {0: "reference", 1: "singles", 2: "doubles", 3: "triples"}


@dataclass
class RunConfig:
    """Everything one invocation needs, resolved from the parsed flags."""

    command: str
    format: str = "table"
    output: str | None = None
    tiers: tuple[float, float, float] = DEFAULT_TIERS
    catalog_files: tuple[str, ...] = ()
    seed: int = 0

    model: str | None = None
    sites: int = 2
    t: float = 1.0
    U: float = 0.0
    periodic: bool = False
    levels: int = 2
    spacing: float = 1.0
    G: float = 0.0
    ordering: str = "interleaved"

    N: int | None = None
    sz: int | None = None
    rank: int | None = None
    m: int | None = None
    preset: str | None = None

    mu: tuple[int, ...] = ()
    auto: bool = False
    with_equalities: bool = False
    max_iterations: int = 100
    occupation_tol: float = 1e-10

    scan: str | None = None
    files: tuple[str, ...] = ()
    occupations: tuple[float, ...] | None = None
    random: int | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        values = {k: v for k, v in vars(args).items() if v is not None}
        mu = values.pop("mu", None)
        cfg = cls(**values)
        if mu is not None:
            if mu.strip() == "auto":
                cfg.auto = True
            else:
                cfg.mu = tuple(int(part) for part in mu.split(","))
        if cfg.command == "scan" and "format" not in values:
            cfg.format = "csv"
        return cfg


# ---------------------------------------------------------------------------
# model and catalog resolution


def _resolve_model(cfg: RunConfig, **overrides) -> tuple[SpinOrbitalIntegrals, str]:
    """Build spin-orbital integrals for the configured model."""
    if cfg.model is None:
        raise ValueError("this command needs --model")
    params = {"t": cfg.t, "U": cfg.U, "spacing": cfg.spacing, "G": cfg.G}
    params.update(overrides)
    if cfg.model == "hubbard":
        spatial = hubbard_chain(cfg.sites, params["t"], params["U"], cfg.periodic)
        name = f"hubbard(sites={cfg.sites}, t={params['t']:g}, U={params['U']:g})"
    elif cfg.model == "pairing":
        spatial = pairing_model(cfg.levels, params["spacing"], params["G"])
        name = f"pairing(levels={cfg.levels}, spacing={params['spacing']:g}, G={params['G']:g})"
    elif cfg.model.startswith("file:"):
        path = cfg.model[len("file:") :]
        spatial = load_integral_file(path)
        name = path
        if cfg.N is None:
            cfg.N = spatial.n_electrons
    else:
        raise ValueError(f"unknown model {cfg.model!r}")
    so = to_spin_orbitals(spatial, cfg.ordering)
    if cfg.rank is not None:
        so = so.truncated(cfg.rank)
    return so, name


def _resolve_space(cfg: RunConfig, ints: SpinOrbitalIntegrals):
    if cfg.N is None:
        raise ValueError("this command needs --N (electron count)")
    return enumerate_space(cfg.N, ints.m, ints.layout, cfg.sz)


def _resolve_catalog(cfg: RunConfig, N: int, m: int) -> Catalog:
    merged: Catalog | None = None
    try:
        merged = catalog(N, m)
    except FermipinError:
        pass
    for path in cfg.catalog_files:
        loaded = load_catalog_file(path)
        if (loaded.N, loaded.m) != (N, m):
            raise ValueError(
                f"catalog file {path} is for ({loaded.N},{loaded.m}), run needs ({N},{m})"
            )
        merged = loaded if merged is None else merged.merged(loaded)
    if merged is None:
        raise ValueError(
            f"no constraint catalog for (N, m) = ({N},{m}); supply one with --catalog"
        )
    return merged


def _chosen_constraints(
    cfg: RunConfig, cat: Catalog, spectrum: OccupationSpectrum | None
) -> tuple[GPConstraint, ...]:
    """Resolve --mu/--with-equalities/auto into concrete constraints."""
    if cfg.auto:
        if spectrum is None:
            raise ValueError("auto constraint selection needs a solved spectrum")
        chosen = list(cat.equalities)
        chosen += [
            c for c in cat.constraints if c.residual(spectrum.n) <= cfg.tiers[1]
        ]
        if not [c for c in chosen if not c.equality]:
            raise ValueError(
                "auto selection found no inequality within the "
                f"strong-quasipinning threshold {cfg.tiers[1]:g}; pass --mu explicitly"
            )
        return tuple(chosen)
    chosen = list(cat.equalities) if cfg.with_equalities else []
    chosen += [cat.find(mu) for mu in cfg.mu]
    if not chosen:
        raise ValueError("no constraints selected; pass --mu (or --with-equalities)")
    return tuple(chosen)


def _spectrum_of(state: CIVector) -> OccupationSpectrum:
    return natural_spectrum(one_rdm(state))


def _report_payload(report: PinningReport) -> dict:
    return json.loads(report.to_json())


# ---------------------------------------------------------------------------
# commands (each returns the JSON payload)


def cmd_solve(cfg: RunConfig) -> dict:
    ints, name = _resolve_model(cfg)
    space = _resolve_space(cfg, ints)
    state = solve_ground(ints, space)[0]
    spectrum = _spectrum_of(state)
    return {
        "command": "solve",
        "model": name,
        "N": space.N,
        "m": space.m,
        "sector": space.sector,
        "space_size": len(space),
        "energy": state.energy,
        "degenerate": state.degenerate,
        "occupations": [float(v) for v in spectrum.n],
        "leading": [
            {"determinant": list(det.orbitals()), "coefficient": c}
            for det, c in state.leading(LEADING_COEFFICIENTS)
        ],
    }


def cmd_analyze(cfg: RunConfig) -> dict:
    ints, name = _resolve_model(cfg)
    space = _resolve_space(cfg, ints)
    state = solve_ground(ints, space)[0]
    spectrum = _spectrum_of(state)
    cat = _resolve_catalog(cfg, space.N, space.m)
    report = evaluate(cat, spectrum, cfg.tiers)
    payload = {
        "command": "analyze",
        "model": name,
        "sector": space.sector,
        "space_size": len(space),
        "energy": state.energy,
        "occupations": [float(v) for v in spectrum.n],
    }
    payload.update(_report_payload(report))
    return payload


def cmd_census(cfg: RunConfig) -> dict:
    if cfg.preset is not None:
        try:
            preset = SECTOR_PRESETS[cfg.preset]
        except KeyError:
            raise ValueError(
                f"unknown preset {cfg.preset!r}; choose from {sorted(SECTOR_PRESETS)}"
            ) from None
        space = preset.space()
    else:
        if cfg.N is None or cfg.m is None:
            raise ValueError("census needs either --preset or both --N and --m")
        layout = interleaved_layout(cfg.m // 2) if cfg.sz is not None else None
        if layout is not None and layout.m != cfg.m:
            raise ValueError("--sz needs an even --m (interleaved layout)")
        space = enumerate_space(cfg.N, cfg.m, layout, cfg.sz)
    reference = Determinant.from_orbitals(range(1, space.N + 1), space.m)

    imposed: tuple[GPConstraint, ...] = ()
    if cfg.mu or cfg.with_equalities:
        cat = _resolve_catalog(cfg, space.N, space.m)
        imposed = _chosen_constraints(cfg, cat, None)
    survivors = filter_pinned(space, imposed).survivors if imposed else space
    if len(survivors) == 0:
        raise NoSurvivorsError("no determinant satisfies all imposed constraints")
    counts = census(survivors, reference)
    return {
        "command": "census",
        "N": space.N,
        "m": space.m,
        "sector": space.sector,
        "preset": cfg.preset,
        "imposed": [c.label for c in imposed],
        "base_size": len(space),
        "survivors": len(survivors),
        "removed": len(space) - len(survivors),
        "counts": {str(k): v for k, v in sorted(counts.counts.items())},
        "determinants": [list(d.orbitals()) for d in survivors],
    }


def cmd_truncate(cfg: RunConfig) -> dict:
    ints, name = _resolve_model(cfg)
    space = _resolve_space(cfg, ints)
    cat = _resolve_catalog(cfg, space.N, space.m)
    if cfg.auto:
        spectrum = _spectrum_of(solve_ground(ints, space)[0])
        constraints = _chosen_constraints(cfg, cat, spectrum)
    else:
        constraints = _chosen_constraints(cfg, cat, None)
    result = pinned_solve(
        ints, space, constraints, cfg.max_iterations, cfg.occupation_tol
    )
    payload = {
        "command": "truncate",
        "model": name,
        "sector": space.sector,
        "imposed": [c.label for c in constraints],
        "space_size": len(space),
        "survivor_count": len(result.survivors),
    }
    payload.update(json.loads(result.to_json()))
    payload["full_correlation_mha"] = 1000.0 * (
        payload["reference_energy"] - payload["full_energy"]
    )
    payload["pinned_correlation_mha"] = 1000.0 * (
        payload["reference_energy"] - payload["pinned_energy"]
    )
    return payload


def _scan_grid(cfg: RunConfig) -> tuple[str, list[tuple[str, dict]]]:
    """The scan axis: (parameter name, [(row label, model overrides)])."""
    if cfg.files:
        return "file", [(path, {"path": path}) for path in cfg.files]
    if cfg.scan is None:
        raise ValueError("scan needs --scan NAME=START:STOP:STEPS or --files")
    try:
        name, spec = cfg.scan.split("=", 1)
        start, stop, steps = spec.split(":")
        values = np.linspace(float(start), float(stop), int(steps))
    except ValueError as exc:
        raise ValueError(f"bad --scan {cfg.scan!r}: {exc}") from None
    allowed = {"hubbard": ("U", "t"), "pairing": ("G", "spacing")}.get(cfg.model, ())
    if name not in allowed:
        raise ValueError(
            f"cannot scan {name!r} for model {cfg.model!r}; choose from {allowed}"
        )
    return name, [(f"{v:.10g}", {name: v}) for v in values]


def _scan_ints(cfg: RunConfig, overrides: dict) -> SpinOrbitalIntegrals:
    if "path" in overrides:
        file_cfg = RunConfig(**{**vars(cfg), "model": f"file:{overrides['path']}"})
        ints, _ = _resolve_model(file_cfg)
        if cfg.N is None:
            cfg.N = file_cfg.N
        return ints
    ints, _ = _resolve_model(cfg, **overrides)
    return ints


def cmd_scan(cfg: RunConfig) -> dict:
    parameter, grid = _scan_grid(cfg)
    # the geometry and the catalog come from the first grid point; later
    # points that fail (or disagree) become NaN rows, and the scan goes on
    first = _scan_ints(cfg, grid[0][1])
    space = _resolve_space(cfg, first)
    cat = _resolve_catalog(cfg, space.N, space.m)
    constraints = cat.constraints + cat.equalities
    columns = (
        [parameter, "energy"]
        + [f"n{i}" for i in range(1, space.m + 1)]
        + [c.label for c in constraints]
        + ["xi"]
    )
    rows: list[dict] = []
    for label, overrides in grid:
        try:
            ints = _scan_ints(cfg, overrides)
            space = _resolve_space(cfg, ints)
            state = solve_ground(ints, space)[0]
            spectrum = _spectrum_of(state)
            report = evaluate(cat, spectrum, cfg.tiers)
            values = (
                [label, state.energy]
                + [float(v) for v in spectrum.n]
                + [report.residual(c.mu) for c in constraints]
                + [report.xi]
            )
            rows.append(dict(zip(columns, values)))
        except (FermipinError, OSError, ValueError) as exc:
            print(f"warning: {parameter}={label}: {exc}", file=sys.stderr)
            rows.append(
                {columns[0]: label, **{c: float("nan") for c in columns[1:]}}
            )
    return {"command": "scan", "parameter": parameter, "columns": columns, "rows": rows}


def cmd_polytope(cfg: RunConfig) -> dict:
    if cfg.N is None or cfg.m is None:
        raise ValueError("polytope needs --N and --m")
    cat = _resolve_catalog(cfg, cfg.N, cfg.m)
    spectra: list[tuple[str, OccupationSpectrum]] = []
    if cfg.occupations is not None:
        spectrum = OccupationSpectrum.from_occupations(cfg.occupations, N=cfg.N)
        spectra.append(("supplied", spectrum))
    else:
        count = cfg.random if cfg.random is not None else 1
        rng = np.random.default_rng(cfg.seed)
        space = enumerate_space(cfg.N, cfg.m)
        for k in range(count):
            coeffs = rng.standard_normal(len(space))
            coeffs /= np.linalg.norm(coeffs)
            spectra.append((f"random-{k}", _spectrum_of(CIVector(space, coeffs))))
    samples = []
    for label, spectrum in spectra:
        report = evaluate(cat, spectrum, cfg.tiers)
        samples.append(
            {
                "sample": label,
                "occupations": [float(v) for v in spectrum.n],
                **_report_payload(report),
            }
        )
    return {
        "command": "polytope",
        "N": cfg.N,
        "m": cfg.m,
        "seed": cfg.seed,
        "samples": samples,
    }


# ---------------------------------------------------------------------------
# rendering (tables and CSV are formatted from the JSON payload)


def _fmt(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _grid(rows: list[Sequence[str]], indent: str = "") -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        indent + "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    )


def _degree_name(degree: int) -> str:
    return DEGREE_NAMES.get(degree, f"degree-{degree}")


def _census_line(counts: dict) -> str:
    degrees = sorted(int(k) for k in counts)
    parts = [f"{_degree_name(d)} {counts[str(d)]}" for d in degrees]
    return ", ".join(parts)


def _report_table(payload: dict) -> list[str]:
    lines = []
    rows: list[Sequence[str]] = [("mu", "constraint", "residual", "tier")]
    for entry in payload["constraints"]:
        rows.append(
            (
                str(entry["mu"]),
                entry["formula"],
                f"{entry['residual']:.6e}",
                entry["tier"],
            )
        )
    lines.append(_grid(rows))
    if payload["equalities"]:
        lines.append("equalities (must vanish):")
        eq_rows: list[Sequence[str]] = [
            (str(e["mu"]), e["formula"], f"{e['residual']:.6e}")
            for e in payload["equalities"]
        ]
        lines.append(_grid(eq_rows, indent="  "))
    lines.append(f"xi (distance from the single-determinant vertex): {payload['xi']:.6e}")
    if payload.get("degeneracy_warning"):
        lines.append(
            "warning: degenerate occupations make some tier labels basis-dependent"
        )
    return lines


def _table_solve(payload: dict) -> str:
    lines = [
        f"model: {payload['model']}",
        f"space: N={payload['N']}, m={payload['m']}, sector={payload['sector']}, "
        f"{payload['space_size']} determinants",
        f"ground energy: {_fmt(payload['energy'])} Ha"
        + ("  (degenerate)" if payload["degenerate"] else ""),
        "occupations: " + "  ".join(f"{v:.8f}" for v in payload["occupations"]),
        "leading coefficients:",
    ]
    rows = [
        ("[" + ",".join(str(o) for o in e["determinant"]) + "]", f"{e['coefficient']:+.8f}")
        for e in payload["leading"]
    ]
    lines.append(_grid(rows, indent="  "))
    return "\n".join(lines)


def _table_analyze(payload: dict) -> str:
    lines = [
        f"model: {payload['model']}",
        f"(N, m) = ({payload['N']}, {payload['m']}), sector={payload['sector']}, "
        f"{payload['space_size']} determinants",
        f"ground energy: {_fmt(payload['energy'])} Ha",
        "occupations: " + "  ".join(f"{v:.8f}" for v in payload["occupations"]),
    ]
    lines += _report_table(payload)
    return "\n".join(lines)


def _table_census(payload: dict) -> str:
    source = payload["preset"] or f"(N, m) = ({payload['N']}, {payload['m']})"
    lines = [
        f"space: {source}, sector={payload['sector']}, {payload['base_size']} determinants"
    ]
    if payload["imposed"]:
        lines.append(
            f"imposed: {', '.join(payload['imposed'])}  "
            f"(survivors {payload['survivors']}, removed {payload['removed']})"
        )
    rows: list[Sequence[str]] = [("excitation", "count")]
    for degree in sorted(int(k) for k in payload["counts"]):
        rows.append((_degree_name(degree), str(payload["counts"][str(degree)])))
    rows.append(("total", str(payload["survivors"])))
    lines.append(_grid(rows))
    return "\n".join(lines)


def _table_truncate(payload: dict) -> str:
    recovered = 100.0 * payload["recovered_fraction"]
    lines = [
        f"model: {payload['model']}",
        f"imposed: {', '.join(payload['imposed'])}",
        f"determinants: {payload['space_size']} -> {payload['survivor_count']}",
        f"full energy:      {_fmt(payload['full_energy'])} Ha",
        f"pinned energy:    {_fmt(payload['pinned_energy'])} Ha",
        f"reference energy: {_fmt(payload['reference_energy'])} Ha",
        f"correlation: full {payload['full_correlation_mha']:.2f} mHa, "
        f"pinned {payload['pinned_correlation_mha']:.2f} mHa  "
        f"(recovered {recovered:.2f}%)",
        f"iterations: {payload['iterations']}"
        + ("" if payload["converged"] else "  (not converged)"),
        f"census full:   {_census_line(payload['census_full']['counts'])}",
        f"census pinned: {_census_line(payload['census_pinned']['counts'])}",
        "occupations: " + "  ".join(f"{v:.8f}" for v in payload["occupations"]),
    ]
    return "\n".join(lines)


def _table_scan(payload: dict) -> str:
    rows = [tuple(payload["columns"])] + [
        tuple(_fmt(row[c]) for c in payload["columns"]) for row in payload["rows"]
    ]
    return _grid(rows)


def _table_polytope(payload: dict) -> str:
    lines = [f"(N, m) = ({payload['N']}, {payload['m']})"]
    for sample in payload["samples"]:
        lines.append(f"sample {sample['sample']}:")
        lines.append(
            "  occupations: " + "  ".join(f"{v:.8f}" for v in sample["occupations"])
        )
        for block in _report_table(sample):
            lines += ["  " + line for line in block.split("\n")]
    return "\n".join(lines)


def _csv_rows(payload: dict) -> tuple[list[str], list[list]]:
    command = payload["command"]
    if command == "scan":
        cols = payload["columns"]
        return cols, [[row[c] for c in cols] for row in payload["rows"]]
    if command == "census":
        return ["degree", "count"], [
            [k, payload["counts"][k]] for k in sorted(payload["counts"], key=int)
        ]
    if command in ("analyze", "polytope"):
        samples = payload["samples"] if command == "polytope" else [payload]
        cols = ["sample", "mu", "formula", "residual", "tier"]
        rows = []
        for sample in samples:
            label = sample.get("sample", "ground")
            for entry in sample["constraints"]:
                rows.append(
                    [label, entry["mu"], entry["formula"], entry["residual"], entry["tier"]]
                )
            for entry in sample["equalities"]:
                rows.append(
                    [label, entry["mu"], entry["formula"], entry["residual"], "equality"]
                )
            rows.append([label, "xi", "", sample["xi"], ""])
        return cols, rows
    if command == "solve":
        cols = ["energy"] + [f"n{i}" for i in range(1, payload["m"] + 1)]
        return cols, [[payload["energy"], *payload["occupations"]]]
    if command == "truncate":
        cols = [
            "full_energy",
            "pinned_energy",
            "reference_energy",
            "full_correlation_mha",
            "pinned_correlation_mha",
            "recovered_fraction",
            "survivor_count",
            "iterations",
            "converged",
        ]
        return cols, [[payload[c] for c in cols]]
    raise ValueError(f"no CSV rendering for {command!r}")


_TABLES: dict[str, Callable[[dict], str]] = {
    "solve": _table_solve,
    "analyze": _table_analyze,
    "census": _table_census,
    "truncate": _table_truncate,
    "scan": _table_scan,
    "polytope": _table_polytope,
}


def _render(cfg: RunConfig, payload: dict) -> str:
    if cfg.format == "json":
        return json.dumps(payload, indent=2)
    if cfg.format == "csv":
        cols, rows = _csv_rows(payload)
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(cols)
        for row in rows:
            # floats are written with enough digits to round-trip exactly
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
        return out.getvalue().rstrip("\n")
    return _TABLES[payload["command"]](payload)


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("table", "json", "csv"), default=None)
    sub.add_argument("--output", help="write the report to this file")
    sub.add_argument(
        "--tiers",
        type=_parse_tiers,
        default=None,
        help="pinning thresholds a,b,c (default 1e-10,1e-4,1e-2)",
    )
    sub.add_argument(
        "--catalog",
        dest="catalog_files",
        action="append",
        default=None,
        help="append a constraint catalog file (repeatable)",
    )
    sub.add_argument("--seed", type=int, default=None)


def _add_model(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--model", help="hubbard, pairing, or file:<path>")
    sub.add_argument("--sites", type=int, default=None, help="hubbard chain length")
    sub.add_argument("--t", type=float, default=None, help="hubbard hopping")
    sub.add_argument("--U", type=float, default=None, help="hubbard on-site repulsion")
    sub.add_argument("--periodic", action="store_true", default=None)
    sub.add_argument("--levels", type=int, default=None, help="pairing level count")
    sub.add_argument("--spacing", type=float, default=None, help="pairing level spacing")
    sub.add_argument("--G", type=float, default=None, help="pairing strength")
    sub.add_argument("--N", type=int, default=None, help="number of electrons")
    sub.add_argument("--sz", type=int, default=None, help="2*S_z sector (omit for the full space)")
    sub.add_argument("--rank", type=int, default=None, help="keep only the first RANK spin orbitals")
    sub.add_argument("--ordering", choices=("interleaved", "blocked"), default=None)


def _parse_tiers(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--tiers needs exactly three values a,b,c")
    return tuple(parts)  # type: ignore[return-value]


def _parse_occupations(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermipin",
        description="Exact diagonalization and occupation-spectrum pinning analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="ground state, energy, and occupations")
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("analyze", help="solve, then evaluate every catalog constraint")
    _add_model(p)
    _add_common(p)

    p = sub.add_parser("census", help="excitation census, optionally after filtering")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--sz", type=int, default=None)
    p.add_argument("--preset", choices=sorted(SECTOR_PRESETS), default=None)
    p.add_argument("--mu", default=None, help="comma-separated constraint indices")
    p.add_argument("--with-equalities", action="store_true", default=None)
    _add_common(p)

    p = sub.add_parser("truncate", help="force-pinned truncated solve vs the full one")
    _add_model(p)
    p.add_argument("--mu", default=None, help="constraint indices, or 'auto'")
    p.add_argument("--with-equalities", action="store_true", default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--occupation-tol", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("scan", help="residual trajectories over a parameter grid")
    _add_model(p)
    p.add_argument("--scan", default=None, help="NAME=START:STOP:STEPS, e.g. U=0:8:9")
    p.add_argument("--files", nargs="+", default=None, help="integral files to scan over")
    _add_common(p)

    p = sub.add_parser("polytope", help="evaluate occupation vectors directly")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--occupations", type=_parse_occupations, default=None)
    p.add_argument("--random", type=int, default=None, help="sample this many random states")
    _add_common(p)

    return parser


_DISPATCH: dict[str, Callable[[RunConfig], dict]] = {
    "solve": cmd_solve,
    "analyze": cmd_analyze,
    "census": cmd_census,
    "truncate": cmd_truncate,
    "scan": cmd_scan,
    "polytope": cmd_polytope,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    cfg = RunConfig.from_args(args)
    try:
        payload = _DISPATCH[cfg.command](cfg)
        text = _render(cfg, payload)
    except NoSurvivorsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (RepresentabilityError, SpectralRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FermipinError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
