"""Command-line front end: ``idealphase {verify,phase,sample,converge}``."""

from __future__ import annotations

import argparse
import io
import json
import sys
import warnings

import numpy as np

from .config import ConfigError, RunConfig
from .dilation import build_U, build_V
from .isometry import build_isometry
from .measurement import PolarGrid, phase_marginal, sample_heterodyne
from .phase import PhaseGrid, ideal_phase_density
from .verify import non_increasing, run_checks

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        return float(f"{float(x):.17g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, tuple):
        return list(x)
    return x


def write_table(cfg: RunConfig, columns, rows, notes=(), footer=()):
    """Emit a table as CSV (with '#' comment rows) or as JSON with the same fields."""
    echo = json.dumps(cfg.echo(), sort_keys=True, default=_jsonable)
    if cfg.format == "json":
        doc = {
            "config": json.loads(echo),
            "warnings": list(notes),
            "columns": list(columns),
            "rows": [[_jsonable(v) for v in r] for r in rows],
            "footer": {k: _jsonable(v) for k, v in footer},
        }
        text = json.dumps(doc, indent=1, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# config: {echo}\n")
        for n in notes:
            buf.write(f"# {n}\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(fmt(v) for v in r) + "\n")
        for k, v in footer:
            buf.write(f"# {k}: {fmt(v)}\n")
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(cfg: RunConfig) -> int:
    res = cfg.validate()
    rep = run_checks(res)
    rows = [(c.name, c.value, c.relation, c.tolerance, c.passed) for c in rep]
    notes = [f"note: {c.name}: {c.note}" for c in rep if c.note]
    write_table(cfg, ["check", "value", "relation", "tolerance", "passed"], rows, notes,
                [("overall", "pass" if rep.passed else "fail")])
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_phase(cfg: RunConfig) -> int:
    res = cfg.validate()
    N_a = cfg.dims[0]
    grid = PolarGrid(
        float(cfg.grid.get("t_max") or PolarGrid.for_dimension(N_a).t_max),
        int(cfg.grid.get("n_radial", 512)),
        int(cfg.grid.get("M", max(256, 2 * N_a - 1))),
    )
    V = build_isometry(res.profile, K=cfg.support, N_a=N_a, renormalize=cfg.renormalize)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        q = phase_marginal(V, res.rho, grid)
        p = ideal_phase_density(res.rho, PhaseGrid(grid.M))
    notes = sorted({f"warning: {w.message}" for w in caught})
    diff = np.abs(p.density - q.density)
    rows = zip(p.grid.nodes, p.density, q.density, diff)
    footer = [("max_abs_diff", float(diff.max())), ("total_variation", q.total_variation(p)),
              ("marginal_raw_norm", q.raw_norm)]
    write_table(cfg, ["phi", "p_ideal", "p_marginal", "abs_diff"], rows, notes, footer)
    return EXIT_OK


def cmd_sample(cfg: RunConfig) -> int:
    res = cfg.validate()
    s = sample_heterodyne(res.profile, res.rho, cfg.samples, cfg.seed)
    rows = zip(s.samples.real, s.samples.imag)
    footer = [("samples", len(s)), ("sampler", s.provenance)]
    write_table(cfg, ["re_z", "im_z"], rows, (), footer)
    return EXIT_OK


def converge_table(cfg: RunConfig, res):
    rows = []
    for N in cfg.converge_dims:
        if N < cfg.support:
            raise ConfigError(f"converge dimension {N} below support {cfg.support}")
        Vt = build_isometry(res.profile, K=N, N_a=N, renormalize=cfg.renormalize)
        if cfg.renormalize:
            col = Vt.isometry_defect()
        else:
            col = float(np.max(Vt.column_defects[: cfg.support]))
        chi = np.zeros(N, dtype=complex)
        chi[: res.dilation.chi.size] = res.dilation.chi[:N]
        chi /= np.linalg.norm(chi)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            U = build_U(build_V(Vt, chi), res.dilation.W)
            Vs = build_isometry(res.profile, K=cfg.support, N_a=N, renormalize=cfg.renormalize)
            q = phase_marginal(Vs, res.rho)
        tv = q.total_variation(ideal_phase_density(res.rho, q.grid))
        rows.append((N, col, U.unitarity_defect, tv))
    return rows


def cmd_converge(cfg: RunConfig) -> int:
    res = cfg.validate()
    rows = converge_table(cfg, res)
    arr = np.array([r[1:] for r in rows], dtype=float)
    ok = {name: non_increasing(arr[:, i]) for i, name in enumerate(["column_defect", "u_defect", "tv"])}
    footer = [(f"non_increasing_{k}", v) for k, v in ok.items()]
    write_table(cfg, ["N", "column_defect", "u_defect", "tv_marginal_ideal"], rows, (), footer)
    return EXIT_OK if all(ok.values()) else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "phase": cmd_phase, "sample": cmd_sample, "converge": cmd_converge}


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s!r}")


def _dims(s: str):
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad dims {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idealphase", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="YAML run configuration")
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dims", type=_dims, help="N_a[,N_b[,N_c]]")
    parser.add_argument("--renormalize", type=_bool)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--converge-dims", type=_dims)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = RunConfig.load(args.config).override(
            out=args.out, format=args.format, seed=args.seed, dims=args.dims,
            renormalize=args.renormalize, samples=args.samples, converge_dims=args.converge_dims,
        )
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"idealphase: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
