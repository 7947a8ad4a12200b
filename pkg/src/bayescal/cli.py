"""Command-line front end.

Config arguments accept either a path to a DesignSpec JSON file or the
name of a built-in preset (`bayescal presets` lists them). Every command
is deterministic given its inputs; exit codes are 0 on success, 2 for
usage/validation problems, and 3 when --strict escalates a numerical
precision warning.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import warnings
from contextlib import contextmanager

import click

from .calibrate import (
    SENSITIVITY_CSV_HEADER,
    CalibrationTarget,
    decide,
    oc_curve,
    sensitivity_table,
)
from .case_study import run_case_study
from .design import (
    DesignSpec,
    OCResult,
    canonical_json,
    prior_from_dict,
    spec_from_dict,
    validate,
)
from .engines import compute_oc
from .errors import BayescalError, PrecisionWarning, SpecValidationError
from .presets import list_presets, preset_document
from .simulate import simulate_oc

_METRIC_COLUMNS = ("bp", "bcp", "bt1e", "ft1e", "pid", "for", "gamma1")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _fail(message: str, code: int = 2) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _load_config(config: str) -> DesignSpec:
    try:
        if config in list_presets():
            doc = preset_document(config)
        elif config.endswith(".json") and config[:-5] in list_presets() and \
                not _exists(config):
            doc = preset_document(config[:-5])
        else:
            with open(config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        return spec_from_dict(doc)
    except FileNotFoundError:
        _fail(f"config not found: {config!r} (not a file and not a preset)")
    except json.JSONDecodeError as exc:
        _fail(f"config is not valid JSON: {exc}")
    except SpecValidationError as exc:
        _fail("invalid design spec:\n  " + "\n  ".join(exc.violations))


def _exists(path: str) -> bool:
    try:
        with open(path, "rb"):
            return True
    except OSError:
        return False


def _ensure_valid(spec: DesignSpec, *, require_threshold: bool) -> None:
    violations = validate(spec, require_threshold=require_threshold)
    if violations:
        _fail("invalid design spec:\n  " + "\n  ".join(violations))


@contextmanager
def _strictness(strict: bool):
    with warnings.catch_warnings():
        warnings.simplefilter("error" if strict else "default", PrecisionWarning)
        try:
            yield
        except PrecisionWarning as exc:
            click.echo(f"numeric precision failure: {exc}", err=True)
            sys.exit(3)
        except BayescalError as exc:
            _fail(str(exc))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")  # RFC 4180
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt4(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "   --"
    return f"{value:.4f}"


def _emit_oc(oc: OCResult, fmt: str) -> None:
    doc = oc.to_dict()
    if fmt == "json":
        click.echo(canonical_json(doc), nl=False)
    elif fmt == "csv":
        click.echo(_csv_text(list(_METRIC_COLUMNS),
                             [[_cell(doc[k]) for k in _METRIC_COLUMNS]]), nl=False)
    else:
        for key in _METRIC_COLUMNS:
            click.echo(f"{key:>7}  {_fmt4(doc[key])}")


_FORMAT = click.option("--format", "fmt", type=click.Choice(["pretty", "csv", "json"]),
                       default="pretty", show_default=True, help="Output format.")
_STRICT = click.option("--strict", is_flag=True,
                       help="Escalate numerical precision warnings to exit code 3.")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group()
def main() -> None:
    """Operating characteristics and threshold calibration for
    posterior-probability success rules."""


@main.command("validate")
@click.argument("config")
def validate_cmd(config: str) -> None:
    """Validate a design file; exit 0 when it satisfies every invariant."""
    spec = _load_config(config)
    _ensure_valid(spec, require_threshold=True)
    click.echo("ok")



@main.command()
@click.argument("config")
@click.option("--c", "c_override", type=float, default=None,
              help="Override the threshold from the config.")
@_FORMAT
@_STRICT
def oc(config: str, c_override: float | None, fmt: str, strict: bool) -> None:
    """Compute the six operating characteristics at a threshold."""
    spec = _load_config(config)
    if c_override is not None:
        spec = spec.with_threshold(c_override)
    _ensure_valid(spec, require_threshold=True)
    with _strictness(strict):
        result = compute_oc(spec)
    _emit_oc(result, fmt)


@main.command()
@click.argument("config")
@click.option("--c-min", type=float, required=True)
@click.option("--c-max", type=float, required=True)
@click.option("--steps", type=int, required=True)
@_FORMAT
@_STRICT
def curve(config: str, c_min: float, c_max: float, steps: int, fmt: str, strict: bool) -> None:
    """Evaluate the OC metrics over an ascending grid of thresholds."""
    spec = _load_config(config)
    _ensure_valid(spec, require_threshold=False)
    if not (0.0 < c_min < c_max < 1.0):
        _fail("grid bounds must satisfy 0 < c-min < c-max < 1")
    if steps < 2:
        _fail("steps must be >= 2")
    grid = [c_min + (c_max - c_min) * i / (steps - 1) for i in range(steps)]
    with _strictness(strict):
        points = oc_curve(spec, grid)
    rows = [{"c": c, **res.to_dict()} for c, res in points]
    if fmt == "json":
        click.echo(canonical_json(rows), nl=False)
    elif fmt == "csv":
        header = ["c", *_METRIC_COLUMNS]
        click.echo(_csv_text(header, [[_cell(r[k]) for k in header] for r in rows]),
                   nl=False)
    else:
        click.echo("      c " + "".join(f"{k:>9}" for k in _METRIC_COLUMNS))
        for r in rows:
            click.echo(f"{r['c']:.5f} " + "".join(f"{_fmt4(r[k]):>9}" for k in _METRIC_COLUMNS))


def _parse_target(text: str) -> CalibrationTarget:
    if "=" not in text:
        raise click.BadParameter("targets look like metric=level, e.g. pid=0.025")
    name, _, level_text = text.partition("=")
    name = name.strip().lower()
    try:
        level = float(level_text)
    except ValueError:
        raise click.BadParameter(f"level {level_text!r} is not a number")
    if name not in ("ft1e", "pid", "bt1e"):
        raise click.BadParameter("target metric must be one of ft1e, pid, bt1e")
    if not 0.0 < level < 1.0:
        raise click.BadParameter("target level must lie in (0,1)")
    return CalibrationTarget(name, level)


def _load_scenarios(path: str | None, spec: DesignSpec):
    if path is None:
        return [("design", spec.design_prior)]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        _fail(f"cannot read scenarios file: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"scenarios file is not valid JSON: {exc}")
    if not isinstance(doc, list) or not doc:
        _fail("scenarios file must be a non-empty JSON array of "
              '{"name": ..., "prior": {...}} entries')
    scenarios = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "name" not in entry or "prior" not in entry:
            _fail(f"scenarios[{i}]: needs 'name' and 'prior'")
        errors: list[str] = []
        prior = prior_from_dict(entry["prior"], f"scenarios[{i}].prior", errors)
        if errors or prior is None:
            _fail("invalid scenario prior:\n  " + "\n  ".join(errors))
        scenarios.append((str(entry["name"]), prior))
    return scenarios


def _sensitivity_rows_out(rows, fmt: str) -> None:
    records = [row.to_record() for row in rows]
    if fmt == "json":
        click.echo(canonical_json(records), nl=False)
        return
    header = SENSITIVITY_CSV_HEADER.split(",")
    table = []
    for rec in records:
        cells = []
        for key in header:
            value = rec[key] if key != "c_star" else (
                rec["c_star"] if rec["feasible"] else "INFEASIBLE")
            cells.append(_cell(value))
        table.append(cells)
    if fmt == "csv":
        click.echo(_csv_text(header, table), nl=False)
    else:
        click.echo("  ".join(f"{h:>12}" for h in header))
        for rec in records:
            cells = [f"{rec['scenario']:>12}", f"{rec['target_metric']:>12}",
                     f"{rec['target_level']:>12.4f}"]
            if rec["feasible"]:
                cells.append(f"{rec['c_star']:>12.4f}")
            else:
                cells.append(f"{'INFEASIBLE':>12}")
            for key in ("ft1e", "bt1e", "for", "bcp", "bp"):
                cells.append(f"{_fmt4(rec[key]):>12}")
            click.echo("  ".join(cells))


@main.command()
@click.argument("config")
@click.option("--target", "targets", multiple=True, required=True,
              help="metric=level; repeatable (ft1e, pid, or bt1e).")
@click.option("--scenarios", "scenarios_path", type=str, default=None,
              help="JSON file of named design-prior scenarios.")
@_FORMAT
@_STRICT
def calibrate(config: str, targets: tuple[str, ...], scenarios_path: str | None,
              fmt: str, strict: bool) -> None:
    """Calibrate the threshold c for one or more targets and scenarios."""
    spec = _load_config(config)
    _ensure_valid(spec, require_threshold=False)
    parsed = [_parse_target(t) for t in targets]
    scenarios = _load_scenarios(scenarios_path, spec)
    with _strictness(strict):
        rows = sensitivity_table(spec, scenarios, parsed)
    _sensitivity_rows_out(rows, fmt)


@main.command("case-study")
@_FORMAT
@_STRICT
def case_study_cmd(fmt: str, strict: bool) -> None:
    """Reproduce the CULPRIT-SHOCK calibration table with pass/fail flags."""
    with _strictness(strict):
        report = run_case_study()
    if fmt == "json":
        click.echo(canonical_json(report.to_dict()), nl=False)
        return
    if fmt == "csv":
        header = ["row", "check", "value", "reference", "tolerance", "passed"]
        rows = []
        for name, check in (("posterior_flat", report.posterior_flat),
                            ("posterior_matched", report.posterior_matched)):
            rows.append([name, check.name, _cell(check.value), _cell(check.reference),
                         _cell(check.tolerance), check.passed])
        for row in report.rows:
            for check in row.checks:
                rows.append([row.label, check.name, _cell(check.value),
                             _cell(check.reference), _cell(check.tolerance),
                             check.passed])
            rows.append([row.label, "decision", "SUCCESS" if row.decision_success else "FAIL",
                         "SUCCESS" if row.expected_success else "FAIL", "",
                         row.decision_success == row.expected_success])
        click.echo(_csv_text(header, rows), nl=False)
        return
    for check in (report.posterior_flat, report.posterior_matched):
        flag = "PASS" if check.passed else "FAIL"
        click.echo(f"[{flag}] {check.name}: {check.value:.4f} "
                   f"(reference {check.reference} +/- {check.tolerance})")
    for row in report.rows:
        flag = "PASS" if row.passed else "FAIL"
        decision = "SUCCESS" if row.decision_success else "FAIL"
        click.echo(f"[{flag}] {row.label}: c*={row.result.c_star:.4f} "
                   f"decision={decision}")
        for check in row.checks:
            mark = "ok" if check.passed else "MISMATCH"
            click.echo(f"        {check.name}: {check.value:.4f} vs "
                       f"{check.reference} (+/- {check.tolerance}) {mark}")
    click.echo(f"overall: {'PASS' if report.passed else 'FAIL'} "
               f"({report.elapsed_seconds:.1f} s)")


@main.command()
@click.argument("config")
@click.option("--sims", type=int, required=True, help="Number of simulations (>= 1).")
@click.option("--seed", type=int, default=0, show_default=True)
@_FORMAT
@_STRICT
def simulate(config: str, sims: int, seed: int, fmt: str, strict: bool) -> None:
    """Monte Carlo estimates of every metric, with closed-form deltas."""
    spec = _load_config(config)
    _ensure_valid(spec, require_threshold=True)
    if sims < 1:
        _fail("--sims must be >= 1")
    with _strictness(strict):
        report = simulate_oc(spec, sims, seed)
        closed = compute_oc(spec)
    doc = report.to_dict()
    closed_doc = closed.to_dict()
    deltas = {}
    for key in _METRIC_COLUMNS:
        est = doc["estimates"][key]
        ref = closed_doc[key]
        deltas[key] = None if est is None or ref is None else est - ref
    doc["closed_form"] = closed_doc
    doc["delta"] = deltas
    if fmt == "json":
        click.echo(canonical_json(doc), nl=False)
    elif fmt == "csv":
        header = ["metric", "estimate", "standard_error", "closed_form", "delta"]
        rows = [[key, _cell(doc["estimates"][key]), _cell(doc["standard_errors"][key]),
                 _cell(closed_doc[key]), _cell(deltas[key])]
                for key in _METRIC_COLUMNS]
        click.echo(_csv_text(header, rows), nl=False)
    else:
        click.echo(f"n_sims={report.n_sims} seed={report.seed} counts={report.counts}")
        click.echo("metric   estimate        se    closed     delta")
        for key in _METRIC_COLUMNS:
            se = doc["standard_errors"][key]
            click.echo(f"{key:>6} {_fmt4(doc['estimates'][key]):>9} {_fmt4(se):>9} "
                       f"{_fmt4(closed_doc[key]):>9} {_fmt4(deltas[key]):>9}")


@main.command()
@click.argument("name", required=False)
def presets(name: str | None) -> None:
    """List built-in presets, or print one as a config document."""
    if name is None:
        for preset in list_presets():
            click.echo(preset)
        return
    if name not in list_presets():
        _fail(f"unknown preset {name!r}")
    click.echo(canonical_json(preset_document(name)), nl=False)


@main.command("decide")
@click.argument("config")
@click.argument("observed")
@_FORMAT
def decide_cmd(config: str, observed: str, fmt: str) -> None:
    """Apply the success rule to observed data (JSON summary or @file)."""
    spec = _load_config(config)
    _ensure_valid(spec, require_threshold=True)
    try:
        if observed.startswith("@"):
            with open(observed[1:], "r", encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = json.loads(observed)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot parse observed data: {exc}")
    with _strictness(False):
        record = decide(spec, data)
    doc = {"posterior_probability": record.posterior_probability,
           "threshold": record.threshold, "success": record.success}
    if fmt == "json":
        click.echo(canonical_json(doc), nl=False)
    else:
        click.echo(f"posterior probability: {record.posterior_probability:.4f}")
        click.echo(f"threshold:            {record.threshold:.4f}")
        click.echo(f"decision:             {'SUCCESS' if record.success else 'FAIL'}")



@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8333, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service for the design explorer UI."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
