"""Command-line entry point."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Any, Iterator

import click

from .config import RunConfig, load_config
from .errors import (
    BadPotential,
    DomainError,
    MapSpecError,
    NoConsistentConstant,
    NotContact,
    NotHarmonic,
    NotPolynomial,
    NotPositive,
    OrderError,
    SingularError,
)
from .expr import parse_expr
from .fields import TRAJECTORY_COLUMNS, trajectory_rows
from .harmonic import SIGN_COLUMNS, gradient_harmonic, subharmonicity_scan
from .horizontal import assess_contact
from .mapspec import parse_grid, parse_map, parse_point, parse_s_range
from .reports import dumps, write_csv, write_json
from .schwarzian import schwarzian_values
from .suites import CASE_COLUMNS, SUITES, run_suite


logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

DOMAIN_ERRORS = (
    DomainError,
    SingularError,
    NotContact,
    NotPositive,
    NotHarmonic,
    BadPotential,
    NotPolynomial,
)


def _fail(message: str, code: int) -> None:
    click.echo(f"错误：{message}", err=True)
    raise SystemExit(code)


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except MapSpecError as exc:
        token = f" (at {exc.token!r})" if exc.token else ""
        _fail(f"{exc}{token}", EXIT_USAGE)
    except NoConsistentConstant as exc:
        _fail(str(exc), EXIT_FAILED)
    except OrderError as exc:
        _fail(str(exc), EXIT_USAGE)
    except DOMAIN_ERRORS as exc:
        _fail(str(exc), EXIT_DOMAIN)
    except ValueError as exc:
        # Configuration and argument validation.
        _fail(str(exc), EXIT_USAGE)


def _config(ctx: click.Context, **overrides: Any) -> RunConfig:
    return load_config(
        config_path=ctx.obj.get("config_path"),
        overrides=overrides,
        settings_path=ctx.obj.get("settings_path"),
    )


def _out_dir(out: str | None, config: RunConfig) -> Path:
    return Path(out).resolve() if out else Path(config.output_dir)


@click.group()
@click.option(
    "--config",
    "settings_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="key=value 形式的配置文件。",
)
@click.option("--verbose", is_flag=True, help="输出调试日志。")
@click.pass_context
def main(ctx: click.Context, settings_path: str | None, verbose: bool) -> None:
    """Heisenberg 群上 CR Schwarzian 算子的数值与精确检验工具。"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj.setdefault("settings_path", settings_path)


EVAL_CHOICES = ("s_cr", "s_cl", "pf", "contact", "all")


@main.command("eval")
@click.option("--map", "map_text", required=True, help="映射描述，如 inv∘rot(0.3)∘dil(2)。")
@click.option("--point", "point_text", required=True, help="求值点 x,y,t。")
@click.option("--which", type=click.Choice(EVAL_CHOICES), default="all", show_default=True)
@click.option("--order", type=int, default=None, help="jet 截断阶数（>= 3）。")
@click.option("--tol", type=float, default=None, help="相对容差。")
@click.pass_context
def eval_command(
    ctx: click.Context,
    map_text: str,
    point_text: str,
    which: str,
    order: int | None,
    tol: float | None,
) -> None:
    """在一点计算 S_CR、S_CL、Preschwarzian 或切触性判定。"""
    with _exit_codes():
        config = _config(ctx, order=order, tol_rel=tol)
        spec = parse_map(map_text)
        p = parse_point(point_text)
        if which == "contact":
            payload: dict[str, Any] = assess_contact(
                spec.map, p, config.contact_tolerance()
            ).to_json()
        else:
            values = schwarzian_values(spec.map, p, config.tolerance(), config.order).to_json()
            if which == "all":
                payload = values
            else:
                keys = ("point", "lambda", which, "contact_residuals", "notes")
                payload = {key: values[key] for key in keys}
        payload["map"] = spec.text
        payload["unchecked"] = spec.unchecked
    click.echo(dumps(payload), nl=False)


@main.command("verify")
@click.option("--suite", type=click.Choice(tuple(SUITES)), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--order", type=int, default=None)
@click.option("--tol", type=float, default=None, help="相对容差。")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="报告目录。")
@click.pass_context
def verify_command(
    ctx: click.Context,
    suite: str,
    seed: int | None,
    order: int | None,
    tol: float | None,
    out: str | None,
) -> None:
    """运行一组检验，写出 report.json 与 cases.csv。"""
    with _exit_codes():
        config = _config(ctx, seed=seed, order=order, tol_rel=tol)
        rows: list[dict[str, Any]] = []
        complete: dict[str, Any] | None = None
        for event in run_suite(suite, config):
            kind = event["type"]
            if kind == "status":
                click.echo(event["content"], err=True)
            elif kind == "case":
                rows.append(event["content"])
            elif kind == "error":
                click.echo(f"  ✗ {event['content']}", err=True)
                rows.append(event["row"])
            elif kind == "complete":
                complete = event

    if complete is None:
        _fail(f"suite {suite} ended without a result", EXIT_FAILED)
    target = _out_dir(out, config) / suite
    report = {
        "suite": suite,
        "passed": complete["passed"],
        "cases": complete["cases"],
        "failures": complete["failures"],
        "first_failure": complete["first_failure"],
        "summary": complete["summary"],
        "config": asdict(config),
    }
    write_json(target / "report.json", report)
    write_csv(target / "cases.csv", rows, CASE_COLUMNS)
    click.echo(str(target / "report.json"))
    click.echo(complete["content"], err=True)
    if not complete["passed"]:
        first = complete["first_failure"] or {}
        _fail(
            f"{suite}/{first.get('check')} case {first.get('case')} failed "
            f"at {first.get('point') or '-'}: {first.get('detail') or first.get('residual')}",
            EXIT_FAILED,
        )


@main.command("scan")
@click.option("--u", "u_text", default=None, help="次拉普拉斯调和函数 u，扫描 (Xu, Yu, Tu)。")
@click.option("--map", "map_text", default=None, help="或扫描任意映射。")
@click.option("--grid", "grid_text", default="-1:1:21,-1:1:21,0", show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV 输出路径。")
@click.pass_context
def scan_command(
    ctx: click.Context,
    u_text: str | None,
    map_text: str | None,
    grid_text: str,
    tol: float | None,
    out: str | None,
) -> None:
    """在格点上扫描次调和性符号，写出 CSV 与摘要 JSON。"""
    if (u_text is None) == (map_text is None):
        _fail("exactly one of --u and --map is required", EXIT_USAGE)
    with _exit_codes():
        config = _config(ctx, tol_rel=tol)
        target = (
            gradient_harmonic(parse_expr(u_text), config.tolerance())
            if u_text is not None
            else parse_map(map_text).map
        )
        report = subharmonicity_scan(target, parse_grid(grid_text), config.tolerance())
    path = Path(out).resolve() if out else Path(config.output_dir) / "scan.csv"
    write_csv(path, report.rows(), SIGN_COLUMNS)
    write_json(path.with_suffix(".json"), report.summary())
    click.echo(str(path))
    summary = report.summary()
    click.echo(
        f"{summary['points']} 个格点，{summary['singular_points']} 个奇异点，"
        f"{summary['violations']} 处符号违例",
        err=True,
    )
    if report.violations:
        _fail(f"sign violation: {report.first_violation}", EXIT_FAILED)


@main.command("flow")
@click.option("--h", "h_text", required=True, help="势函数 h(x)。")
@click.option("--s", "s_text", default="0..1", show_default=True, help="lo..hi 或单个数值。")
@click.option("--samples", type=int, default=21, show_default=True)
@click.option("--point", "point_text", default="0,0,0", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV 输出路径。")
@click.pass_context
def flow_command(
    ctx: click.Context,
    h_text: str,
    s_text: str,
    samples: int,
    point_text: str,
    out: str | None,
) -> None:
    """沿 v0 = h(x) 的流写出 λ、S_CR、S_CL 的轨迹 CSV。"""
    with _exit_codes():
        config = _config(ctx)
        h = parse_expr(h_text)
        rows = trajectory_rows(
            h, parse_s_range(s_text, samples), parse_point(point_text), config.tolerance()
        )
    path = Path(out).resolve() if out else Path(config.output_dir) / "flow.csv"
    write_csv(path, rows, TRAJECTORY_COLUMNS)
    click.echo(str(path))
