"""Command-line front end: computations, verification suites, caching.

Exit codes: 0 success, 1 identity-check failure, 2 unsupported scope,
3 precision exhaustion.  Reports are versioned JSON with provenance
(path, precision, seed); results are cached content-addressed under
``TZ_CACHE_DIR`` with atomic write-rename.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from fractions import Fraction
from pathlib import Path

import click

from .exact import CycNum
from .field import BaseField, Cycle, UnsupportedFieldError
from .padic import PrecisionError, UnsupportedLocalError, M_DEFAULT
from .zeta import (
    Extension,
    all_characters,
    gauss_sum,
    get_ray,
    phi_field,
    phi_zero,
    prop21_check,
    theta_field,
    theta_zero,
    thm22_rhs,
    verify_thm22,
)

SCHEMA = "tz-report/1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SCOPE = 2
EXIT_PRECISION = 3


class IdentityFailure(Exception):
    """A verified identity did not hold; carries the diff report."""

    def __init__(self, payload):
        super().__init__("identity check failed")
        self.payload = payload


@dataclass
class RunConfig:
    field: str = "Q"
    cycle: str = ""
    p: int | None = None
    n: int | None = None
    M: int = M_DEFAULT
    cap: int | None = None
    seed: int = 0
    path: str = "direct"
    unit: str | None = None
    output: str | None = None
    cache: bool = True

    @classmethod
    def load(cls, config_path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        if config_path:
            with open(config_path, "rb") as fh:
                data.update(tomllib.load(fh))
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        bad = set(data) - known
        if bad:
            raise click.UsageError(f"unknown config keys: {sorted(bad)}")
        return cls(**data)


# -- cache -------------------------------------------------------------


def cache_dir() -> Path:
    root = os.environ.get("TZ_CACHE_DIR")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "tz"


def _cache_key(command: str, cfg: RunConfig) -> str:
    payload = json.dumps(
        {"schema": SCHEMA, "command": command, "config": asdict(cfg)},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def cache_get(key: str):
    path = cache_dir() / f"{key}.json"
    if path.exists():
        return path.read_text()
    return None


def cache_put(key: str, text: str):
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, d / f"{key}.json")
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


# -- report plumbing ---------------------------------------------------


def _emit(command: str, cfg: RunConfig, result: dict, ok: bool) -> str:
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": asdict(cfg),
        "provenance": {"path": cfg.path, "precision": cfg.M, "seed": cfg.seed},
        "ok": ok,
        "result": result,
    }
    return json.dumps(report, indent=2, sort_keys=True, default=str)


def _run(command: str, cfg: RunConfig, fn):
    """Execute fn() -> (result dict, ok), with caching and exit mapping."""
    key = _cache_key(command, cfg)
    text = cache_get(key) if cfg.cache else None
    if text is None:
        try:
            result, ok = fn()
        except (UnsupportedFieldError, UnsupportedLocalError) as exc:
            click.echo(f"scope error: {exc}", err=True)
            sys.exit(EXIT_SCOPE)
        except PrecisionError as exc:
            click.echo(f"precision error: {exc}", err=True)
            sys.exit(EXIT_PRECISION)
        except IdentityFailure as exc:
            text = _emit(command, cfg, exc.payload, False)
            _finish(cfg, text)
            sys.exit(EXIT_FAIL)
        text = _emit(command, cfg, result, ok)
        if cfg.cache and ok:
            cache_put(key, text)
    _finish(cfg, text)
    report = json.loads(text)
    sys.exit(EXIT_OK if report["ok"] else EXIT_FAIL)


def _finish(cfg: RunConfig, text: str):
    if cfg.output:
        Path(cfg.output).write_text(text)
    click.echo(text)


def _parse_instance(cfg: RunConfig):
    from .regulator import ScopeError

    try:
        k = BaseField.parse(cfg.field)
        k.check_supported()
        if not cfg.cycle:
            raise click.UsageError("a --cycle is required for this command")
        cycle = Cycle.parse(k, cfg.cycle)
    except (ValueError, ScopeError) as exc:
        click.echo(f"scope error: {exc}", err=True)
        sys.exit(EXIT_SCOPE)
    return k, cycle


def _ring_json(x) -> dict:
    return x.to_json()


# -- CLI ---------------------------------------------------------------


_common = [
    click.option("--field", default=None, help='Base field: "Q" or "Q(sqrtD)".'),
    click.option("--cycle", default=None, help='Cycle, e.g. "12*inf".'),
    click.option("--p", type=int, default=None, help="Odd prime p."),
    click.option("--n", type=int, default=None, help="Cyclotomic level n."),
    click.option("-M", "--prec", "M", type=int, default=None, help="Precision digits."),
    click.option("--cap", type=int, default=None, help="Series truncation cap."),
    click.option("--seed", type=int, default=None, help="Seed for randomized searches."),
    click.option("--path", default=None,
                 type=click.Choice(["direct", "thm22", "cor23", "series", "regulator"])),
    click.option("--unit", default=None, help="Rational unit, e.g. 4 or 7/4."),
    click.option("--output", default=None, help="Also write the report to this file."),
    click.option("--config", "config_path", default=None, help="TOML config file."),
    click.option("--cache/--no-cache", "use_cache", default=None),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


def _config(config_path, **kw) -> RunConfig:
    if kw.get("use_cache") is not None:
        kw["cache"] = kw.pop("use_cache")
    else:
        kw.pop("use_cache", None)
    return RunConfig.load(config_path, kw)


@click.group()
def main():
    """Exact twisted zeta elements, p-adic regulators, and their
    verification suites."""


@main.command()
@common_options
def theta(config_path, **kw):
    """The group-ring element Theta(0) of a cycle (or its field form)."""
    cfg = _config(config_path, **kw)

    def go():
        k, cycle = _parse_instance(cfg)
        ray = get_ray(cycle)
        if cfg.path == "direct":
            out = theta_zero(ray)
        else:
            out = theta_field(Extension(ray))
        return {"theta": _ring_json(out)}, True

    _run("theta", cfg, go)


@main.command()
@common_options
def phi(config_path, **kw):
    """Phi_m(0), by the defining sum or either identity path."""
    cfg = _config(config_path, **kw)

    def go():
        k, cycle = _parse_instance(cfg)
        ray = get_ray(cycle)
        if cfg.path == "thm22":
            out = thm22_rhs(ray).involution()
        elif cfg.path == "cor23":
            from .zeta import cor23_sum

            out = cor23_sum(Extension(ray))
        else:
            out = phi_zero(ray)
        return {"phi": _ring_json(out)}, True

    _run("phi", cfg, go)


@main.command()
@common_options
def gauss(config_path, **kw):
    """Gauss sums chi^{-1}(A_m) for all characters of the ray group."""
    cfg = _config(config_path, **kw)

    def go():
        k, cycle = _parse_instance(cfg)
        ray = get_ray(cycle)
        sums = []
        for idx, chi in enumerate(all_characters(ray.group)):
            g = gauss_sum(ray, chi)
            sums.append({"character": idx, "value": g.to_json()})
        return {"gauss_sums": sums}, True

    _run("gauss", cfg, go)


@main.group()
def verify():
    """Machine verification suites."""


def _verify_command(name):
    def deco(fn):
        @verify.command(name)
        @common_options
        def cmd(config_path, **kw):
            cfg = _config(config_path, **kw)
            _run(f"verify.{name}", cfg, lambda: fn(cfg))

        return cmd

    return deco


@_verify_command("thm2-2")
def _verify_thm22(cfg: RunConfig):
    k, cycle = _parse_instance(cfg)
    ok, lhs, rhs = verify_thm22(get_ray(cycle))
    detail = {"lhs": _ring_json(lhs), "rhs": _ring_json(rhs)}
    if not ok:
        raise IdentityFailure({"detail": detail})
    return {"detail": detail}, True


@_verify_command("prop2-1")
def _verify_prop21(cfg: RunConfig):
    k, cycle = _parse_instance(cfg)
    ok, detail = prop21_check(Extension(get_ray(cycle)))
    if not ok:
        raise IdentityFailure({"detail": detail})
    return {"detail": detail}, True


@_verify_command("integrality")
def _verify_integrality(cfg: RunConfig):
    from .regulator import (
        RegulatorContext,
        ScopeError,
        build_theta,
        integrality_check,
    )

    k, cycle = _parse_instance(cfg)
    if cfg.p is None:
        raise click.UsageError("--p is required")
    try:
        ctx = RegulatorContext(Extension(get_ray(cycle)), cfg.p, M=cfg.M)
        theta = build_theta(ctx, seed=cfg.seed)
        rep = integrality_check(ctx, [theta])
    except ScopeError as exc:
        click.echo(f"scope error: {exc}", err=True)
        sys.exit(EXIT_SCOPE)
    if not rep.integral:
        raise IdentityFailure({"report": rep.to_json()})
    return {"report": rep.to_json()}, True


@_verify_command("unramified")
def _verify_unramified(cfg: RunConfig):
    """Integrality with the unramified-prime bound delta included."""
    from .regulator import (
        RegulatorContext,
        ScopeError,
        build_theta,
        integrality_check,
    )

    k, cycle = _parse_instance(cfg)
    if cfg.p is None:
        raise click.UsageError("--p is required")
    try:
        ctx = RegulatorContext(Extension(get_ray(cycle)), cfg.p, M=cfg.M)
        if ctx.delta() == 0:
            click.echo("scope error: no unramified prime above p", err=True)
            sys.exit(EXIT_SCOPE)
        theta = build_theta(ctx, seed=cfg.seed)
        rep = integrality_check(ctx, [theta])
    except ScopeError as exc:
        click.echo(f"scope error: {exc}", err=True)
        sys.exit(EXIT_SCOPE)
    if not rep.integral:
        raise IdentityFailure({"report": rep.to_json()})
    return {"report": rep.to_json()}, True


@_verify_command("artin-hasse")
def _verify_artin_hasse(cfg: RunConfig):
    """Two-path agreement of the coefficients a_h at a cyclotomic level."""
    from .coleman import a_h_path
    from .regulator import SemilocalUnit, cyclotomic_context, s_value
    from .padic import _vp

    if cfg.p is None or cfg.n is None:
        raise click.UsageError("--p and --n are required")
    u = Fraction(cfg.unit or 4)
    ctx = cyclotomic_context(cfg.p, cfg.n, M=cfg.M)
    s = s_value(ctx, [SemilocalUnit.diagonal_rational(ctx, u)])
    labels = {g: ba[1] for g, ba in ctx.wirings[0].action.items()}
    rows = []
    ok = True
    for g, c in sorted(labels.items(), key=lambda t: t[1]):
        a, prec = a_h_path(cfg.p, cfg.n, c, u, cap=cfg.cap, M=cfg.M)
        sv = s.coeffs[g].rational_value()
        agree_to = _vp(a - sv, cfg.p) if a != sv else None
        good = agree_to is None or agree_to >= min(prec, cfg.n + 2)
        ok = ok and good
        rows.append({"sigma": c, "series": str(a), "regulator": str(sv),
                     "guaranteed": str(prec), "agree": good})
    if not ok:
        raise IdentityFailure({"rows": rows})
    return {"rows": rows}, True


@_verify_command("conj4-4")
def _verify_conj44(cfg: RunConfig):
    from .coleman import conj44_check

    if cfg.p is None or cfg.n is None:
        raise click.UsageError("--p and --n are required")
    units = [Fraction(cfg.unit)] if cfg.unit else [Fraction(4)]
    rep = conj44_check(cfg.p, cfg.n, units, M=cfg.M)
    if rep.skipped:
        click.echo(f"precision error: {rep.reason}", err=True)
        sys.exit(EXIT_PRECISION)
    if not rep.passed:
        raise IdentityFailure({"report": rep.to_json()})
    return {"report": rep.to_json()}, True


@main.group()
def cache():
    """Inspect or clear the result cache."""


@cache.command("ls")
def cache_ls():
    d = cache_dir()
    entries = sorted(p.name for p in d.glob("*.json")) if d.exists() else []
    click.echo(json.dumps({"dir": str(d), "entries": entries}, indent=2))


@cache.command("clear")
def cache_clear():
    d = cache_dir()
    n = 0
    if d.exists():
        for p in d.glob("*.json"):
            p.unlink()
            n += 1
    click.echo(json.dumps({"dir": str(d), "removed": n}))


if __name__ == "__main__":
    main()
