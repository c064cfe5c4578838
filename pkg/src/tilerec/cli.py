"""Command line: ``tilerec {gen,metric,flc,search,verify,render}``.

Exit codes: 0 success, 1 input or configuration error, 2 verification
failure, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import io as tio
from .complexity import classify_flc
from .errors import BudgetExhausted, ConfigError, InsufficientWindow
from .generators import GeneratorSpec, make_provider
from .geometry import Tolerances
from .ipsets import IPSetSpec
from .metrics import METRICS, metric_general
from .recurrence import VARIANTS, PatternF, search_witness, verify_witness
from .render import plot_class_counts, write_svg
from .tiling import StaticProvider

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("tilerec")


@dataclass(frozen=True)
class SearchConfig:
    pattern: tuple = ((1.0, 0.0), (0.0, 1.0))
    epsilon: float = 0.25
    variant: str = "thm1"
    n_budget: int = 60
    r_search: float = 50.0
    ip: IPSetSpec | None = None


@dataclass(frozen=True)
class MetricConfig:
    r_min: float = 0.01
    step: float = 1e-3
    N: int = 20
    delta: float = 0.01


@dataclass(frozen=True)
class RunConfig:
    generator: GeneratorSpec = field(default_factory=lambda: GeneratorSpec("lattice"))
    radius: float = 10.0
    tolerances: Tolerances = field(default_factory=Tolerances)
    search: SearchConfig = field(default_factory=SearchConfig)
    metric: MetricConfig = field(default_factory=MetricConfig)
    flc_radii: tuple = (10.0, 20.0, 40.0)
    threads: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"generator", "radius", "tolerances", "search", "metric", "flc", "threads"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = cls()
        if "generator" in d:
            cfg = replace(cfg, generator=GeneratorSpec.from_dict(d["generator"]))
        if "radius" in d:
            cfg = replace(cfg, radius=_positive(d["radius"], "radius"))
        if "threads" in d:
            cfg = replace(cfg, threads=_posint(d["threads"], "threads"))
        if "tolerances" in d:
            t = _section(d["tolerances"], "tolerances", {"geom", "iso", "area", "quantum", "delta"})
            cfg = replace(cfg, tolerances=Tolerances(**{k: _positive(v, f"tolerances.{k}") for k, v in t.items()}))
        if "search" in d:
            s = _section(d["search"], "search", {"pattern", "epsilon", "variant", "n_budget", "r_search", "ip"})
            kw = {}
            if "pattern" in s:
                kw["pattern"] = _pattern(s["pattern"]).vectors
            if "epsilon" in s:
                kw["epsilon"] = _positive(s["epsilon"], "search.epsilon")
            if "variant" in s:
                kw["variant"] = _variant(s["variant"])
            if "n_budget" in s:
                kw["n_budget"] = _nonneg_int(s["n_budget"], "search.n_budget")
            if "r_search" in s:
                kw["r_search"] = _positive(s["r_search"], "search.r_search")
            if s.get("ip") is not None:
                kw["ip"] = IPSetSpec.from_dict(s["ip"])
            cfg = replace(cfg, search=SearchConfig(**kw))
        if "metric" in d:
            m = _section(d["metric"], "metric", {"r_min", "step", "N", "delta"})
            kw = {k: _positive(v, f"metric.{k}") for k, v in m.items() if k != "N"}
            if "N" in m:
                kw["N"] = _posint(m["N"], "metric.N")
            if "r_min" in kw and not kw["r_min"] < 1 / math.sqrt(2):
                raise ConfigError("metric.r_min must be below 1/sqrt(2)")
            cfg = replace(cfg, metric=MetricConfig(**kw))
        if "flc" in d:
            f = _section(d["flc"], "flc", {"radii"})
            radii = f.get("radii", cfg.flc_radii)
            if not isinstance(radii, list) or len(radii) < 3:
                raise ConfigError("flc.radii must list at least three radii")
            radii = tuple(_positive(r, "flc.radii") for r in radii)
            if any(b <= a for a, b in zip(radii, radii[1:])):
                raise ConfigError("flc.radii must be increasing")
            cfg = replace(cfg, flc_radii=radii)
        return cfg


def _section(v, name: str, allowed: set) -> dict:
    if not isinstance(v, dict):
        raise ConfigError(f"'{name}' must be an object")
    extra = set(v) - allowed
    if extra:
        raise ConfigError(f"unknown keys in '{name}': {sorted(extra)}")
    return v


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _positive(v, name: str) -> float:
    if not _is_num(v) or v <= 0:
        raise ConfigError(f"{name} must be a positive number")
    return float(v)


def _posint(v, name: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ConfigError(f"{name} must be a positive integer")
    return v


def _nonneg_int(v, name: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise ConfigError(f"{name} must be a nonnegative integer")
    return v


def _variant(v) -> str:
    if v not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}")
    return v


def _pattern(v) -> PatternF:
    if not isinstance(v, list) or not all(isinstance(u, list) and len(u) == 2 and all(map(_is_num, u)) for u in v):
        raise ConfigError("pattern must be a list of [x, y] pairs")
    try:
        return PatternF(v)
    except ValueError as exc:
        raise ConfigError(f"invalid pattern: {exc}") from exc


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration JSON")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--threads", type=int, metavar="INT", help="worker threads for search")
    common.add_argument("--seed", type=int, metavar="INT", help="override the generator seed")
    common.add_argument("--radius", type=float, metavar="REAL",
                        help="window radius for gen, search radius for search")
    common.add_argument("--metric", choices=["d", "d1", "d2", "d3"], default="d1")
    common.add_argument("--variant", choices=list(VARIANTS))
    common.add_argument("--epsilon", type=float, metavar="REAL")
    common.add_argument("--n-budget", type=int, metavar="INT", dest="n_budget")
    common.add_argument("--ip", metavar="PATH", help="IP-set spec JSON restricting dilation factors")

    p = _Parser(prog="tilerec", description="Tiling metrics, local complexity and pattern recurrence.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("gen", parents=[common], help="write a tiling window")
    m = sub.add_parser("metric", parents=[common], help="distance interval between two windows")
    m.add_argument("file_a")
    m.add_argument("file_b")
    f = sub.add_parser("flc", parents=[common], help="two-tile census and FLC verdict")
    f.add_argument("window", nargs="?", help="window file (default: the configured generator)")
    s = sub.add_parser("search", parents=[common], help="search for a recurrence certificate")
    s.add_argument("window", nargs="?", help="window file (default: the configured generator)")
    v = sub.add_parser("verify", parents=[common], help="check a certificate against a window")
    v.add_argument("window")
    v.add_argument("certificate")
    r = sub.add_parser("render", parents=[common], help="draw a window as SVG")
    r.add_argument("window")
    r.add_argument("certificate", nargs="?")
    return p


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_dict(tio.read_json(args.config)) if args.config else RunConfig()
    if args.seed is not None:
        cfg = replace(cfg, generator=replace(cfg.generator, seed=args.seed))
    if args.threads is not None:
        cfg = replace(cfg, threads=_posint(args.threads, "--threads"))
    s = cfg.search
    if args.epsilon is not None:
        s = replace(s, epsilon=_positive(args.epsilon, "--epsilon"))
    if args.variant is not None:
        s = replace(s, variant=args.variant)
    if args.n_budget is not None:
        s = replace(s, n_budget=_nonneg_int(args.n_budget, "--n-budget"))
    if args.ip is not None:
        s = replace(s, ip=IPSetSpec.from_dict(tio.read_json(args.ip)))
    if args.radius is not None:
        r = _positive(args.radius, "--radius")
        s = replace(s, r_search=r)
        cfg = replace(cfg, radius=r)
    return replace(cfg, search=s)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _provider(cfg: RunConfig, window_path: str | None):
    if window_path:
        return StaticProvider(tio.load_window(window_path))
    return make_provider(cfg.generator)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args, cfg: RunConfig) -> int:
    w = make_provider(cfg.generator).window(cfg.radius)
    _emit(tio.dumps(tio.window_to_dict(w)), args.out)
    log.info("wrote %d tiles at radius %g", len(w), cfg.radius)
    return EXIT_OK


def cmd_metric(args, cfg: RunConfig) -> int:
    x = StaticProvider(tio.load_window(args.file_a))
    y = StaticProvider(tio.load_window(args.file_b))
    mc = cfg.metric
    if args.metric == "d":
        res = metric_general(x, y, mc.N, mc.delta)
    else:
        res = METRICS[args.metric](x, y, mc.r_min, mc.step, cfg.tolerances.geom)
    _emit(tio.dumps(res.to_dict()), args.out)
    return EXIT_OK


def cmd_flc(args, cfg: RunConfig) -> int:
    report = classify_flc(_provider(cfg, args.window), cfg.flc_radii, cfg.tolerances.quantum)
    _emit(tio.dumps(report.to_dict()), args.out)
    if args.out:
        fig = Path(args.out).with_suffix(".png")
        plot_class_counts(report, fig)
        log.info("figure written to %s", fig)
    return EXIT_OK


def cmd_search(args, cfg: RunConfig) -> int:
    s = cfg.search
    x = _provider(cfg, args.window)
    F = PatternF(s.pattern)
    try:
        cert = search_witness(x, F, s.epsilon, s.variant, s.n_budget, s.r_search, s.ip,
                              cfg.tolerances.geom, cfg.threads)
    except BudgetExhausted as exc:
        print(json.dumps({"status": "budget-exhausted", "reason": str(exc)}), file=sys.stderr)
        return EXIT_BUDGET
    if not verify_witness(x, F, cert, cfg.tolerances.geom):
        print(json.dumps({"status": "invalid", "reason": "search result failed verification"}), file=sys.stderr)
        return EXIT_INVALID
    _emit(tio.dumps(tio.certificate_to_dict(cert)), args.out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    w = tio.load_window(args.window)
    raw = tio.read_json(args.certificate)
    cert = tio.certificate_from_dict(raw, list(w.prototiles))
    F = cert.pattern if cert.pattern is not None else PatternF(cfg.search.pattern)
    try:
        ok = verify_witness(StaticProvider(w), F, cert, cfg.tolerances.geom)
        reason = "" if ok else "certificate conditions not met"
    except InsufficientWindow as exc:
        ok, reason = False, f"window too small: {exc}"
    report = {"valid": ok, "variant": cert.variant, "n": cert.n, "epsilon": cert.epsilon}
    if reason:
        report["reason"] = reason
    _emit(tio.dumps(report), args.out)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_render(args, cfg: RunConfig) -> int:
    w = tio.load_window(args.window)
    cert = F = None
    if args.certificate:
        cert = tio.certificate_from_dict(tio.read_json(args.certificate), list(w.prototiles))
        F = cert.pattern if cert.pattern is not None else PatternF(cfg.search.pattern)
    if args.out:
        write_svg(args.out, w, cert, F)
    else:
        from .render import render_svg
        sys.stdout.write(render_svg(w, cert, F))
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "metric": cmd_metric, "flc": cmd_flc, "search": cmd_search,
            "verify": cmd_verify, "render": cmd_render}


def _setup_logging() -> None:
    level = os.environ.get("TILEREC_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, InsufficientWindow, ValueError, OSError) as exc:
        print(f"tilerec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
