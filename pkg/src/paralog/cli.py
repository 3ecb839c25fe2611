"""Command-line entry point: ``paralog <subcommand> [options]``.

Exit status is 0 when every asserted invariant holds, 1 when one fails (the
first failure is named on stderr) and 2 for usage errors such as an unknown
subcommand, an invalid configuration key or an unreadable input file.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import (reports_csv, split_table, theorem1_data, theorem1_reports,
                          theorem2_reports)
from .extension import ExtensionLayout, write_extension
from .families import GridIncompatible
from .grid import PGFError, read_pgf
from .inequality import get_bank, sharpness_probe, verify_theorem2
from .littlewood_paley import decompose, export_decomposition
from .norms import norm_report

__all__ = ["main", "build_parser"]

_OVERRIDES = (
    ("gamma", float, "Hölder exponent in (0, 1)"),
    ("nx", int, "spatial samples of the periodic box"),
    ("nt", int, "time samples of the periodic box"),
    ("T", float, "time horizon of Omega_T"),
    ("omega_intervals", int, "intervals per axis of the Omega_T grid"),
    ("family", str, "generator kind"),
    ("seeds", int, "family size"),
    ("seed", int, "master seed"),
    ("n_min", int, "smallest split level N"),
    ("n_max", int, "largest split level N"),
    ("out_dir", str, "artifact directory"),
)


class InvariantFailure(Exception):
    """An asserted invariant did not hold; the message names it."""


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value configuration file")
    for key, typ, helptext in _OVERRIDES:
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None,
                       help=helptext)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="family parameter (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paralog", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"paralog {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("norms", help="norm report for each input PGF")
    p.add_argument("inputs", nargs="+", type=Path)
    _add_common(p)

    p = sub.add_parser("decompose", help="export Littlewood-Paley blocks of a PGF")
    p.add_argument("input", type=Path)
    p.add_argument("--mode", choices=("inhomogeneous", "homogeneous"), default="inhomogeneous")
    _add_common(p)

    p = sub.add_parser("extend", help="extend a function on Omega_T to the periodic box")
    p.add_argument("input", type=Path)
    _add_common(p)

    p = sub.add_parser("verify-rn", help="whole-space inequality over a family")
    p.add_argument("--no-split", action="store_true", help="skip the split-bound columns")
    _add_common(p)

    p = sub.add_parser("verify-domain", help="bounded-domain inequality over a family")
    p.add_argument("--input", type=Path, help="verify this Omega_T PGF instead of a family")
    p.add_argument("--no-chain", action="store_true", help="skip the extension pipeline")
    _add_common(p)

    p = sub.add_parser("split-table", help="split bound against N for one family member")
    p.add_argument("--member", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("sharpness", help="lacunary growth table")
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("selftest", help="run the full invariant suite")
    _add_common(p)
    return parser


def _config(args) -> ExperimentConfig:
    overrides = {key: getattr(args, key) for key, _, _ in _OVERRIDES}
    for item in args.param:
        if "=" not in item:
            raise ConfigError("param", f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides["param." + k.strip()] = v.strip()
    return load_config(args.config, overrides)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _log(out: Path, command: str, cfg: ExperimentConfig) -> None:
    # timestamps go here, never into the CSV / JSON payloads
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    with open(out / "run.log", "a") as fh:
        fh.write(f"{stamp} {command} {json.dumps(cfg.to_dict(), sort_keys=True)}\n")


def _require_finite(reports) -> None:
    for r in reports:
        for name in ("lhs", "bmo", "holder", "l1", "rhs_factor", "implied_C"):
            v = getattr(r, name)
            if not math.isfinite(v):
                raise InvariantFailure(f"non-finite {name} for seed {r.seed}")
        if r.rhs_factor < 1.0:
            raise InvariantFailure(f"rhs_factor < 1 for seed {r.seed}")
        if r.implied_C < 0.0:
            raise InvariantFailure(f"negative implied_C for seed {r.seed}")
        for k, v in r.chain.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise InvariantFailure(f"non-finite chain entry {k} for seed {r.seed}")


def _emit_reports(reports, out: Path, stem: str) -> None:
    lines = "".join(r.to_json() + "\n" for r in reports)
    (out / f"{stem}.jsonl").write_text(lines)
    (out / f"{stem}.csv").write_text(reports_csv(reports))
    sys.stdout.write(lines)


# subcommands ----------------------------------------------------------

def cmd_norms(args, cfg) -> None:
    rows = []
    for path in args.inputs:
        f = read_pgf(path)
        bank = get_bank(f.spec, "inhomogeneous") if f.spec.periodic else None
        rep = norm_report(f, cfg.gamma, bank)
        rows.append(rep.to_json())
    payload = "".join(r + "\n" for r in rows)
    if args.out_dir is not None:
        out = _out_dir(cfg)
        (out / "norms.jsonl").write_text(payload)
        _log(out, "norms", cfg)
    sys.stdout.write(payload)


def cmd_decompose(args, cfg) -> None:
    f = read_pgf(args.input)
    bank = get_bank(f.spec, args.mode)
    dec = decompose(f, bank)
    out = _out_dir(cfg)
    export_decomposition(dec, out, bank, f)
    _log(out, "decompose", cfg)
    manifest = json.loads((out / "manifest.json").read_text())
    print(json.dumps(manifest))
    if manifest["partition_residual"] > 1e-10:
        raise InvariantFailure("partition of unity residual above 1e-10")
    if manifest["reconstruction_error"] > 1e-8 * max(1.0, float(abs(f.values).max())):
        raise InvariantFailure("block sum does not reproduce the input")


def cmd_extend(args, cfg) -> None:
    f = read_pgf(args.input)
    layout = ExtensionLayout(cfg.T, f.spec.n)
    out = _out_dir(cfg)
    path = out / (args.input.stem + "_ext.pgf")
    write_extension(path, f, layout, cfg.gamma)
    _log(out, "extend", cfg)
    print(json.dumps({"pgf": str(path), "sidecar": str(path.with_suffix(".json"))}))


def cmd_verify_rn(args, cfg) -> None:
    reports = theorem1_reports(cfg, split=not args.no_split)
    out = _out_dir(cfg)
    _emit_reports(reports, out, "verify_rn")
    _log(out, "verify-rn", cfg)
    _require_finite(reports)
    for r in reports:
        bound = r.chain.get("bound")
        if bound is not None and r.lhs > bound + r.chain["truncated"] + 1e-9 * max(1.0, r.lhs):
            raise InvariantFailure(f"split bound violated for seed {r.seed}")


def cmd_verify_domain(args, cfg) -> None:
    layout = cfg.layout()
    if args.input is not None:
        f = read_pgf(args.input)
        reports = [verify_theorem2(f, cfg.gamma, layout, chain=not args.no_chain,
                                   N_range=cfg.N_range)]
    else:
        reports = theorem2_reports(cfg, chain=not args.no_chain)
    out = _out_dir(cfg)
    _emit_reports(reports, out, "verify_domain")
    _log(out, "verify-domain", cfg)
    _require_finite(reports)
    for r in reports:
        if r.chain and not r.chain["restriction_le_ext"]:
            raise InvariantFailure(f"restriction exceeds the extension for seed {r.seed}")


def cmd_split_table(args, cfg) -> None:
    if not 0 <= args.member:
        raise ConfigError("member", "must be nonnegative")
    d = theorem1_data(cfg, args.member, 1)[0]
    n_star, table = split_table(d, cfg)
    out = _out_dir(cfg)
    cols = ("N", "A1", "A2", "A3", "bound", "lhs", "truncated", "optimal")
    lines = [",".join(cols)]
    for e in table:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in
                              (e.N, e.A1, e.A2, e.A3, e.bound, e.lhs, e.truncated,
                               int(e.N == n_star))))
    text = "\n".join(lines) + "\n"
    (out / "split_table.csv").write_text(text)
    _log(out, "split-table", cfg)
    sys.stdout.write(text)
    for e in table:
        if not e.holds():
            raise InvariantFailure(f"split bound violated at N = {e.N}")


def cmd_sharpness(args, cfg) -> None:
    if not 1 <= args.m_min <= args.m_max:
        raise ConfigError("m_max", f"need 1 <= m_min <= m_max, got {args.m_min}..{args.m_max}")
    try:
        rows = sharpness_probe(range(args.m_min, args.m_max + 1), cfg.grid(), cfg.gamma)
    except ValueError as exc:
        raise ConfigError("m_max", str(exc)) from None
    cols = ("M", "l_inf", "bmo", "holder", "inf_over_bmo", "ratio")
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(repr(getattr(r, c)) if c != "M" else str(r.M) for c in cols))
    text = "\n".join(lines) + "\n"
    out = _out_dir(cfg)
    (out / "sharpness.csv").write_text(text)
    _log(out, "sharpness", cfg)
    sys.stdout.write(text)
    growth = [r.inf_over_bmo for r in rows]
    if any(b <= a for a, b in zip(growth, growth[1:])):
        raise InvariantFailure("||f_M||_inf / ||f_M||_BMO is not increasing in M")
    ratio = [r.ratio for r in rows]
    if max(ratio) > 3.0 * min(ratio):
        raise InvariantFailure("ratio column leaves the 3x band")


def cmd_selftest(args, cfg) -> None:
    from .selftest import run_selftest

    checks = run_selftest(cfg, log=print)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        raise InvariantFailure(f"criterion {failed[0].criterion}: {failed[0].name}")


_COMMANDS = {
    "norms": cmd_norms,
    "decompose": cmd_decompose,
    "extend": cmd_extend,
    "verify-rn": cmd_verify_rn,
    "verify-domain": cmd_verify_domain,
    "split-table": cmd_split_table,
    "sharpness": cmd_sharpness,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)          # exits 2 on an unknown subcommand
    try:
        cfg = _config(args)
        _COMMANDS[args.command](args, cfg)
    except InvariantFailure as exc:
        print(f"paralog: invariant failed: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, PGFError, GridIncompatible, FileNotFoundError) as exc:
        print(f"paralog: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
