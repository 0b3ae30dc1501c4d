"""Command-line interface: compute, approx, verify, corpus.

Reports are JSON documents (optionally flattened to CSV) that echo the
resolved configuration, the tool version, and the tolerance policy, so
a report is reproducible from its own header.  Identical configuration
and seed produce byte-identical report files.

Exit codes: 0 success, 1 verification or numeric failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .corpus import corpus_entries, get_function
from .differences import (
    ModulusRequest,
    difference_field,
    modulus_mean,
    modulus_sup,
    total_mean_terms,
    total_sup_terms,
)
from .domain import Box, lp_quasinorm, sample_on_grid
from .polyapprox import (
    best_approx,
    best_constant,
    piecewise_constant_approx,
    taylor_polynomial,
)
from .verifier import (
    SUITE_NAMES,
    VerifierSettings,
    _jsonable,
    _p_str,
    run_suite,
)

SCHEMA_VERSION = 1

COMPUTE_OPS = ("modulus-sup", "modulus-mean", "total-omega", "total-w", "difference")
APPROX_OPS = ("best", "taylor", "constant", "piecewise")


class ConfigError(ValueError):
    """Invalid configuration or flags (exit code 2)."""


# ---------------------------------------------------------------------------
# Configuration


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",")) if text else ()


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",")) if text else ()


def _p_parse(text: str) -> float | None:
    if text == "":
        return None
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters; round-trips losslessly through the file format."""

    command: str = ""
    op: str = ""
    suite: str = "all"
    fn: str = ""
    tag: str = ""
    r: tuple[int, ...] = ()
    p: float | None = None
    t: tuple[float, ...] = ()
    box: tuple[float, ...] = ()
    grid: tuple[int, ...] = (32,)
    hsamples: int = 9
    splits: int = 2
    seed: int = 0
    jobs: int = 1
    out: str = ""
    format: str = "json"

    def to_strings(self) -> dict[str, str]:
        return {
            "command": self.command,
            "op": self.op,
            "suite": self.suite,
            "fn": self.fn,
            "tag": self.tag,
            "r": ",".join(str(v) for v in self.r),
            "p": "" if self.p is None else _p_str(self.p),
            "t": ",".join(repr(v) for v in self.t),
            "box": ",".join(repr(v) for v in self.box),
            "grid": ",".join(str(v) for v in self.grid),
            "hsamples": str(self.hsamples),
            "splits": str(self.splits),
            "seed": str(self.seed),
            "jobs": str(self.jobs),
            "out": self.out,
            "format": self.format,
        }

    @classmethod
    def from_strings(cls, data: dict[str, str]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for key, raw in data.items():
            raw = raw.strip()
            if key in ("command", "op", "suite", "fn", "tag", "out", "format"):
                kw[key] = raw
            elif key in ("r", "grid"):
                kw[key] = _ints(raw)
            elif key in ("t", "box"):
                kw[key] = _floats(raw)
            elif key == "p":
                kw[key] = _p_parse(raw)
            elif key in ("hsamples", "splits", "seed", "jobs"):
                kw[key] = int(raw)
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_ini(self) -> str:
        lines = ["[run]"]
        for key, value in self.to_strings().items():
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"bad config file: {exc}") from exc
        data: dict[str, str] = {}
        if parser.has_section("run"):
            data.update(dict(parser.items("run")))
        command = data.get("command", "")
        if command and parser.has_section(command):
            data.update(dict(parser.items(command)))
        return cls.from_strings(data)


def _load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return RunConfig.from_ini(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def _merge_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Apply explicitly-given CLI flags on top of the config file values."""
    updates = {}
    mapping = {
        "suite": args.suite,
        "fn": args.fn,
        "tag": args.tag,
        "out": args.out,
        "format": args.format,
    }
    for key, value in mapping.items():
        if value is not None:
            updates[key] = value
    if args.r is not None:
        updates["r"] = _ints(args.r)
    if args.p is not None:
        updates["p"] = _p_parse(args.p)
    if args.t is not None:
        updates["t"] = _floats(args.t)
    if args.box is not None:
        updates["box"] = _floats(args.box)
    if args.grid is not None:
        updates["grid"] = _ints(args.grid)
    for key in ("hsamples", "splits", "seed", "jobs"):
        value = getattr(args, key)
        if value is not None:
            updates[key] = value
    command = getattr(args, "command", None)
    if command:
        updates["command"] = command
    op = getattr(args, "op", None)
    if op:
        updates["op"] = op
    return replace(cfg, **updates)


# ---------------------------------------------------------------------------
# Shared helpers


def _resolve_box(cfg: RunConfig, dim: int) -> Box:
    if not cfg.box:
        return Box.unit(dim)
    flat = cfg.box
    if len(flat) != 2 * dim:
        raise ConfigError(
            f"--box needs {2 * dim} numbers (a,b per axis) for a {dim}-d function"
        )
    lower = flat[0::2]
    upper = flat[1::2]
    try:
        return Box(lower, upper)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_grid(cfg: RunConfig, dim: int) -> tuple[int, ...]:
    grid = cfg.grid
    if len(grid) == 1:
        grid = grid * dim
    if len(grid) != dim:
        raise ConfigError(f"--grid needs 1 or {dim} entries")
    if any(n < 1 for n in grid):
        raise ConfigError("grid entries must be positive")
    return grid


def _require_fn(cfg: RunConfig):
    if not cfg.fn:
        raise ConfigError("--fn is required (see `mixsmooth corpus` for names)")
    try:
        return get_function(cfg.fn)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def _require_r(cfg: RunConfig, dim: int) -> tuple[int, ...]:
    if not cfg.r:
        raise ConfigError("--r is required for this operation")
    r = cfg.r
    if len(r) == 1:
        r = r * dim
    if len(r) != dim:
        raise ConfigError(f"--r needs 1 or {dim} entries")
    return r


def _require_t(cfg: RunConfig, dim: int) -> tuple[float, ...]:
    if not cfg.t:
        raise ConfigError("--t is required for this operation")
    t = cfg.t
    if len(t) == 1:
        t = t * dim
    if len(t) != dim:
        raise ConfigError(f"--t needs 1 or {dim} entries")
    return t


def _require_p(cfg: RunConfig) -> float:
    if cfg.p is None:
        raise ConfigError("--p is required for this operation")
    if not cfg.p > 0:
        raise ConfigError("--p must be positive")
    return cfg.p


def _document(cfg: RunConfig, records: list[dict], summary: dict | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "mixsmooth", "version": __version__},
        "config": cfg.to_strings(),
        "records": records,
    }
    if summary is not None:
        doc["summary"] = summary
    return doc


def _flatten(record: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, prefix=f"{name}."))
        elif isinstance(value, list):
            out[name] = json.dumps(value, sort_keys=True)
        else:
            out[name] = value
    return out


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        rows = [_flatten(rec) for rec in doc["records"]]
        columns = sorted({k for row in rows for k in row})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()
    raise ConfigError(f"unknown output format {fmt!r}")


def _emit(cfg: RunConfig, doc: dict) -> None:
    text = _render(doc, cfg.format or "json")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _settings(cfg: RunConfig) -> VerifierSettings:
    grid = cfg.grid[0] if len(cfg.grid) == 1 else cfg.grid
    return VerifierSettings(grid=grid, h_samples=cfg.hsamples, seed=cfg.seed)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_compute(cfg: RunConfig) -> int:
    if cfg.op not in COMPUTE_OPS:
        raise ConfigError(f"compute operation must be one of {COMPUTE_OPS}")
    fn = _require_fn(cfg)
    box = _resolve_box(cfg, fn.dim)
    grid = _resolve_grid(cfg, fn.dim)
    r = _require_r(cfg, fn.dim)
    record: dict = {
        "op": cfg.op,
        "function": fn.name,
        "r": list(r),
        "box": [list(box.lower), list(box.upper)],
        "grid": list(grid),
    }
    if cfg.op == "difference":
        t = _require_t(cfg, fn.dim)
        record["h"] = list(t)
        field = difference_field(fn, r, t, box, grid)
        if field is None:
            record["empty_domain"] = True
            record["value"] = None
        else:
            record["empty_domain"] = False
            record["value"] = float(np.abs(field.values).max())
            record["domain"] = [list(field.box.lower), list(field.box.upper)]
            record["field_shape"] = list(field.spec)
    else:
        p = _require_p(cfg)
        t = _require_t(cfg, fn.dim)
        record["p"] = _p_str(p)
        record["t"] = list(t)
        record["h_samples"] = cfg.hsamples
        if cfg.op in ("modulus-sup", "modulus-mean"):
            req = ModulusRequest(
                r=r, t=t, p=p, box=box, h_samples=cfg.hsamples, density=grid
            )
            value = modulus_sup(req, fn) if cfg.op == "modulus-sup" else modulus_mean(req, fn)
            record["value"] = value
        else:
            terms_fn = total_sup_terms if cfg.op == "total-omega" else total_mean_terms
            if cfg.op == "total-w" and p == math.inf:
                terms_fn = total_sup_terms
            terms = terms_fn(
                fn, r, t, box, density=grid, h_samples=cfg.hsamples, p_values=[p]
            )
            record["terms"] = {
                ",".join(map(str, e)): terms[e][float(p)] for e in sorted(terms)
            }
            record["value"] = float(sum(terms[e][float(p)] for e in terms))
    _emit(cfg, _document(cfg, [_jsonable(record)]))
    return 0


def cmd_approx(cfg: RunConfig) -> int:
    if cfg.op not in APPROX_OPS:
        raise ConfigError(f"approx operation must be one of {APPROX_OPS}")
    fn = _require_fn(cfg)
    box = _resolve_box(cfg, fn.dim)
    grid = _resolve_grid(cfg, fn.dim)
    g = sample_on_grid(fn, box, grid)
    record: dict = {
        "op": cfg.op,
        "function": fn.name,
        "box": [list(box.lower), list(box.upper)],
        "grid": list(grid),
    }
    if cfg.op == "best":
        r = _require_r(cfg, fn.dim)
        p = _require_p(cfg)
        result = best_approx(g, r, p, seed=cfg.seed)
        record.update(
            {
                "r": list(r),
                "p": _p_str(p),
                "error": result.error,
                "converged": result.converged,
                "diagnostics": result.diagnostics,
                "coefficients": _coeff_list(result.polynomial.coeffs),
            }
        )
    elif cfg.op == "taylor":
        r = _require_r(cfg, fn.dim)
        p = cfg.p if cfg.p is not None else math.inf
        if not fn.has_derivatives:
            raise ConfigError(f"corpus entry {fn.name!r} has no derivative data")
        bundle = fn.bundle(r, box.lower)
        poly = taylor_polynomial(bundle, r)
        resid = g.values - poly(g.midpoints())
        from .domain import GridFunction

        record.update(
            {
                "r": list(r),
                "p": _p_str(p),
                "base_point": list(box.lower),
                "coefficients": _coeff_list(poly.coeffs),
                "error": lp_quasinorm(GridFunction(box, resid), p),
            }
        )
    elif cfg.op == "constant":
        p = _require_p(cfg)
        beta, err = best_constant(g, p)
        record.update({"p": _p_str(p), "beta": beta, "error": err})
    else:  # piecewise
        p = _require_p(cfg)
        pw, err = piecewise_constant_approx(g, cfg.splits, p)
        record.update(
            {
                "p": _p_str(p),
                "splits": cfg.splits,
                "error": err,
                "cell_constants": pw.betas.tolist(),
            }
        )
    _emit(cfg, _document(cfg, [_jsonable(record)]))
    return 0


def _coeff_list(coeffs: np.ndarray) -> list[dict]:
    out = []
    for idx in np.ndindex(coeffs.shape):
        out.append(
            {"exponents": [int(v) for v in idx], "coefficient": float(coeffs[idx])}
        )
    return out


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite not in SUITE_NAMES:
        raise ConfigError(f"--suite must be one of {SUITE_NAMES}")
    settings = _settings(cfg)
    kwargs: dict = {"jobs": cfg.jobs}
    if cfg.fn:
        kwargs["names"] = [ _require_fn(cfg).name ]
    if cfg.r:
        dim = 2 if not cfg.fn else get_function(cfg.fn).dim
        kwargs["orders"] = (_require_r(cfg, dim),)
    if cfg.p is not None:
        kwargs["p_values"] = (cfg.p,)
    reports = run_suite(cfg.suite, settings, **kwargs)
    records = [rep.to_record() for rep in reports]
    hard = [r for r in records if r["passed"] is not None]
    failed = [r for r in records if r["passed"] is False]
    summary = {
        "suite": cfg.suite,
        "total_checks": len(records),
        "hard_checks": len(hard),
        "hard_passed": sum(1 for r in hard if r["passed"]),
        "failed": len(failed),
        "vacuous": sum(1 for r in records if r["vacuous"]),
        "empirical_constants": {
            r["check"]: max(
                (
                    rec["empirical_constant"]
                    for rec in records
                    if rec["check"] == r["check"]
                    and isinstance(rec["empirical_constant"], float)
                ),
                default=None,
            )
            for r in records
        },
    }
    _emit(cfg, _document(cfg, records, summary))
    return 1 if failed else 0


def cmd_corpus(cfg: RunConfig) -> int:
    entries = corpus_entries(tag=cfg.tag or None)
    if cfg.fn:
        entries = [e for e in entries if e.name == cfg.fn]
    records = [
        {
            "name": e.name,
            "dim": e.dim,
            "tag": e.tag,
            "has_derivatives": e.has_derivatives,
            "polynomial_space": list(e.poly_space) if e.poly_space else None,
            "description": e.description,
        }
        for e in entries
    ]
    if cfg.out or cfg.format == "csv":
        _emit(cfg, _document(cfg, records))
    else:
        for rec in records:
            deriv = "derivatives" if rec["has_derivatives"] else "no derivatives"
            sys.stdout.write(
                f"{rec['name']:22s} d={rec['dim']}  {rec['tag']:16s} {deriv}  {rec['description']}\n"
            )
    return 0


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixsmooth",
        description="moduli of smoothness, best polynomial L_p approximation, "
        "and inequality verification on a shipped corpus",
    )
    parser.add_argument("--version", action="version", version=f"mixsmooth {__version__}")
    sub = parser.add_subparsers(dest="command")

    def add_common(sp):
        sp.add_argument("--config", default=None, help="config file (key = value sections)")
        sp.add_argument("--out", default=None, help="report file path (default stdout)")
        sp.add_argument("--format", default=None, choices=["json", "csv"])
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--jobs", type=int, default=None)
        sp.add_argument("--grid", default=None, help="grid points per axis, N or N,N,...")
        sp.add_argument("--hsamples", type=int, default=None, help="step samples per axis")
        sp.add_argument("--splits", type=int, default=None, help="per-axis subdivision count")
        sp.add_argument("--p", default=None, help="exponent, a number or 'inf'")
        sp.add_argument("--r", default=None, help="difference/degree orders, N or N,N,...")
        sp.add_argument("--t", default=None, help="step bounds, F or F,F,...")
        sp.add_argument("--box", default=None, help="box bounds a,b per axis")
        sp.add_argument("--suite", default=None, choices=list(SUITE_NAMES))
        sp.add_argument("--fn", default=None, help="corpus function name")
        sp.add_argument("--tag", default=None, help="smoothness tag filter (corpus)")

    sp = sub.add_parser("compute", help="moduli and difference fields")
    sp.add_argument("op", choices=list(COMPUTE_OPS))
    add_common(sp)
    sp = sub.add_parser("approx", help="polynomial / constant approximants")
    sp.add_argument("op", choices=list(APPROX_OPS))
    add_common(sp)
    sp = sub.add_parser("verify", help="inequality verification suites")
    add_common(sp)
    sp = sub.add_parser("corpus", help="list the shipped function corpus")
    add_common(sp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    try:
        cfg = _load_config(args.config) if args.config else RunConfig()
        cfg = _merge_flags(cfg, args)
        if cfg.format and cfg.format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {cfg.format!r}")
        handler = {
            "compute": cmd_compute,
            "approx": cmd_approx,
            "verify": cmd_verify,
            "corpus": cmd_corpus,
        }[cfg.command]
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return handler(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
