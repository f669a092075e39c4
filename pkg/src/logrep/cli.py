"""Command-line entry point: ``logrep <experiment> --seed N --out DIR``.

Exit status is 0 when every record passes, 1 when any fails (the first
failing record is echoed to stderr) and 2 for configuration errors.  Log
verbosity comes from ``LOGREP_LOG_LEVEL``.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .experiments import PARAMS, RUNNERS, run
from .reports import emit_csv_field, write_report

log = logging.getLogger("logrep")

CONFIG_KEYS = ("experiment", "seed", "output", "params")
SEED_MAX = 2 ** 64 - 1


class ConfigError(ValueError):
    """Malformed run configuration."""


@dataclass
class RunConfig:
    experiment: str
    seed: int = 0
    output: str = "results"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in RUNNERS:
            raise ConfigError(f"experiment: unknown value {self.experiment!r}; "
                              f"choose from {sorted(RUNNERS)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or not 0 <= self.seed <= SEED_MAX:
            raise ConfigError(f"seed: expected an integer in [0, 2^64), got {self.seed!r}")
        allowed = PARAMS[self.experiment]
        for key, value in self.params.items():
            if key not in allowed:
                raise ConfigError(f"params.{key}: unknown parameter for {self.experiment}; "
                                  f"allowed {sorted(allowed)}")
            self.params[key] = _coerce(key, value, allowed[key])


def _coerce(key, value, default):
    kind = type(default)
    try:
        if kind is list:
            if not isinstance(value, list):
                raise TypeError
            return [int(v) for v in value]
        if kind is int and (isinstance(value, bool) or float(value) != int(value)):
            raise TypeError
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"params.{key}: expected {kind.__name__}, got {value!r}") from None


def _line_of(text, key):
    for n, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return n
    return None


def load_config(path):
    """Strict JSON config; errors name the offending line and key."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    for key in raw:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown key {key!r}; "
                              f"allowed {list(CONFIG_KEYS)}")
    if "experiment" not in raw:
        raise ConfigError(f"{path}: missing key 'experiment'")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}:{_line_of(text, 'params')}: params must be an object")
    try:
        return RunConfig(raw["experiment"], raw.get("seed", 0), raw.get("output", "results"),
                         dict(params))
    except ConfigError as exc:
        bad = str(exc).split(":")[0].split(".")[-1]
        raise ConfigError(f"{path}:{_line_of(text, bad)}: {exc}") from None


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(prog="logrep", description=__doc__.splitlines()[0])
    parser.add_argument("experiment_pos", nargs="?", metavar="experiment",
                        choices=sorted(RUNNERS))
    parser.add_argument("--experiment", choices=sorted(RUNNERS))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--config")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    seen = set()
    for exp, params in PARAMS.items():
        for key, default in params.items():
            if key in seen:
                continue
            seen.add(key)
            kw = dict(dest=f"p_{key}", default=None, help=f"({exp}) default {default}")
            if isinstance(default, list):
                kw.update(nargs="+", type=int)
            else:
                kw.update(type=type(default))
            parser.add_argument(_flag(key), **kw)
    return parser


def resolve_config(args, parser):
    """Merge a config file (if any) with command-line overrides."""
    cfg = load_config(args.config) if args.config else None
    experiment = args.experiment or args.experiment_pos or (cfg.experiment if cfg else None)
    if experiment is None:
        parser.error("an experiment is required")
    params = dict(cfg.params) if cfg and cfg.experiment == experiment else {}
    for key in {k for p in PARAMS.values() for k in p}:
        value = getattr(args, f"p_{key}")
        if value is None:
            continue
        if key not in PARAMS[experiment]:
            raise ConfigError(f"{_flag(key)}: not a parameter of {experiment}")
        params[key] = value
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    output = args.out or (cfg.output if cfg else "results")
    return RunConfig(experiment, seed, output, params)


def run_experiment(cfg):
    """Run, write ``<output>/<experiment>.jsonl`` plus CSV dumps; return the exit status."""
    log.info("running %s with seed %d", cfg.experiment, cfg.seed)
    outcome = run(cfg.experiment, cfg.seed, cfg.params)
    out = Path(cfg.output)
    meta = {"experiment": cfg.experiment, "seed": cfg.seed, "params": cfg.params,
            "version": __version__, "records": len(outcome.records)}
    path = write_report(out / f"{cfg.experiment}.jsonl", outcome.records, meta)
    for name in sorted(outcome.fields):
        emit_csv_field(outcome.fields[name], out / f"{cfg.experiment}_{name}.csv")
    failed = [r for r in outcome.records if not r.passed]
    passed = len(outcome.records) - len(failed)
    print(f"{cfg.experiment}: {passed}/{len(outcome.records)} records pass -> {path}")
    if failed:
        print(f"first failing record: {failed[0].to_json()}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    logging.basicConfig(level=os.environ.get("LOGREP_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, parser)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
