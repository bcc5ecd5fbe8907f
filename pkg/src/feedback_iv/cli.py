"""Command-line interface: ``fit``, ``diagnose``, ``simulate``, ``filter`` and ``calibrate``.

Exit codes: 0 success, 2 input or data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .diagnostics import TierThresholds, diagnose
from .errors import (
    DegenerateContrastError,
    DegenerateSeriesError,
    FeedbackIVError,
    InvalidInputError,
    MonteCarloFailure,
    NearSingularTransformError,
    NoConvergenceError,
    SingularDesignError,
    ZeroResidualError,
)
from .estimators import Dataset, fit_iv, ols_fit
from .inference import ContrastSpec, Regime, contrast_se
from .preprocess import FilterConfig, hamilton_filter
from .simulation import calibrate_from_data, load_sweep, run_sweep, sweep_csv

EXIT_OK = 0
EXIT_DATA = 2
EXIT_NUMERIC = 3

_MISSING = {"", "na", "nan", "n/a", "null", "none", "."}


class DataError(InvalidInputError):
    """Problem with an input file, reported with its location."""


@dataclass(frozen=True)
class Table:
    labels: tuple
    values: np.ndarray
    dates: tuple | None
    date_label: str | None
    digest: str

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.labels.index(name)]
        except ValueError:
            raise DataError(f"no column named {name!r}; available: {', '.join(self.labels)}") from None


def _parse_float(cell: str):
    try:
        v = float(cell)
    except ValueError:
        return None
    return v


def load_csv(path: str) -> Table:
    """Read a comma-separated file with a header row.

    A leading column is treated as dates when any of its cells is non-numeric.
    Missing or non-numeric cells elsewhere are errors naming the row and column.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        raise DataError(f"{path} is not UTF-8 text") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    if any(_parse_float(h) is not None for h in header if h):
        raise DataError(f"{path} must start with a header row")
    if len(set(header)) != len(header) or any(not h for h in header):
        raise DataError("header names must be unique and non-empty")
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DataError(f"line {i}: expected {len(header)} fields, found {len(r)}")
    first = [r[0].strip() for r in body]
    has_date = len(header) > 1 and any(c.lower() not in _MISSING and _parse_float(c) is None for c in first)
    start = 1 if has_date else 0
    labels = tuple(header[start:])
    if not labels:
        raise DataError("no numeric columns")
    values = np.empty((len(body), len(labels)))
    for i, r in enumerate(body):
        for j, cell in enumerate(r[start:]):
            c = cell.strip()
            where = f"line {i + 2}, column {labels[j]!r}"
            if c.lower() in _MISSING:
                raise DataError(f"missing value at {where}")
            v = _parse_float(c)
            if v is None:
                raise DataError(f"non-numeric value {c!r} at {where}")
            if not math.isfinite(v):
                raise DataError(f"non-finite value {c!r} at {where}")
            values[i, j] = v
    return Table(
        labels=labels,
        values=values,
        dates=tuple(first) if has_date else None,
        date_label=header[0] if has_date else None,
        digest=digest,
    )


def _regression(table: Table, outcome: str) -> Dataset:
    y = table.column(outcome)
    keep = [k for k, name in enumerate(table.labels) if name != outcome]
    if not keep:
        raise DataError("need at least one regressor besides the outcome")
    return Dataset(table.values[:, keep], y, labels=tuple(table.labels[k] for k in keep))


def _write_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _write_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _report(command: str, digest: str | None, t0: float, caught, **body) -> dict:
    return {
        "command": command,
        "input_digest": digest,
        "version": __version__,
        "timing_ms": (time.perf_counter() - t0) * 1e3,
        "warnings": sorted({str(w.message) for w in caught}),
        **body,
    }


def _contrasts(data: Dataset, which: str) -> list[ContrastSpec]:
    if which == "all":
        return [ContrastSpec.coordinate(data.K, k, data.labels[k]) for k in range(data.K)]
    if which == "feedback":
        alpha = calibrate_from_data(data.X, data.y).alphas[0]
        return [ContrastSpec(alpha, "feedback")]
    if which not in data.labels:
        raise DataError(f"contrast column {which!r} is not a regressor")
    return [ContrastSpec.coordinate(data.K, data.labels.index(which), which)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    table = load_csv(args.data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        data = _regression(table, args.outcome)
        if args.lags < 0:
            raise DataError("--lags must be non-negative")
        ols = ols_fit(data)
        iv = fit_iv(data, args.lags)
        regime = Regime.parse(args.regime)
        inference = [contrast_se(data, iv.gamma, iv, c, regime).to_dict() for c in _contrasts(data, args.contrast)]
        diag = diagnose(data, max(1, min(4, data.T - 1)))
    _write_json(
        _report(
            "fit",
            table.digest,
            t0,
            caught,
            outcome=args.outcome,
            labels=list(data.labels),
            lags=args.lags,
            fit={"ols": ols.to_dict(), "iv": iv.to_dict()},
            inference=inference,
            diagnostics=diag.to_dict(),
        ),
        args.out,
    )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    t0 = time.perf_counter()
    table = load_csv(args.data)
    outcome = args.outcome or table.labels[0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        data = _regression(table, outcome)
        diag = diagnose(data, args.lmax, TierThresholds(args.amber, args.red))
    _write_json(
        _report("diagnose", table.digest, t0, caught, outcome=outcome, labels=list(data.labels), diagnostics=diag.to_dict()),
        args.out,
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_sweep(args.spec)
    if args.reps < 2:
        raise DataError("--reps must be at least 2")
    rows = run_sweep(cfg, args.reps, args.seed, workers=args.workers)
    _write_text(sweep_csv(rows), args.out)
    return EXIT_OK


def cmd_filter(args) -> int:
    table = load_csv(args.data)
    cfg = FilterConfig(args.p, args.h)
    cols = [hamilton_filter(table.values[:, k], cfg, name=name) for k, name in enumerate(table.labels)]
    offset = cfg.p + cfg.h - 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(([table.date_label] if table.dates else []) + list(table.labels))
    for j in range(cols[0].size):
        lead = [table.dates[j + offset]] if table.dates else []
        w.writerow(lead + [repr(float(c[j])) for c in cols])
    _write_text(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    table = load_csv(args.data)
    data = _regression(table, args.outcome)
    spec = calibrate_from_data(data.X, data.y)
    _write_json(spec.to_dict(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feedback-iv", description="Feedback-robust estimation for time-series regressions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="OLS and IV fits with inference, as a JSON report")
    f.add_argument("--data", required=True)
    f.add_argument("--outcome", required=True)
    f.add_argument("--lags", type=int, default=1)
    f.add_argument("--contrast", default="all", help="regressor name, 'feedback' or 'all'")
    f.add_argument("--regime", default="moderate", choices=["moderate", "gaussian", "moderate_k", "gaussian_conservative"])
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("diagnose", help="lower-trace ratios and feedback screening")
    d.add_argument("--data", required=True)
    d.add_argument("--outcome", help="outcome column (default: first numeric column)")
    d.add_argument("--lmax", type=int, default=4)
    d.add_argument("--amber", type=float, default=0.05)
    d.add_argument("--red", type=float, default=0.10)
    d.add_argument("--out")
    d.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("simulate", help="Monte Carlo sweep to CSV")
    s.add_argument("--spec", required=True)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--workers", type=int, default=0, help="0 = automatic, capped by FEEDBACK_IV_THREADS")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    h = sub.add_parser("filter", help="Hamilton-filter every column")
    h.add_argument("--data", required=True)
    h.add_argument("--p", type=int, default=4)
    h.add_argument("--h", type=int, default=8)
    h.add_argument("--out")
    h.set_defaults(func=cmd_filter)

    c = sub.add_parser("calibrate", help="fixed-base DGP spec from observed data")
    c.add_argument("--data", required=True)
    c.add_argument("--outcome", required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_calibrate)
    return p


_NUMERIC = (NoConvergenceError, NearSingularTransformError, MonteCarloFailure, DegenerateContrastError)
_DATA = (InvalidInputError, SingularDesignError, DegenerateSeriesError, ZeroResidualError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_DATA
    try:
        return args.func(args)
    except _NUMERIC as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _DATA as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FeedbackIVError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
