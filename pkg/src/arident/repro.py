"""Scenario configs, run reports and acceptance-band verdicts.

A config file is INI-style text, one ``[scenario.<name>]`` section per
scenario::

    # white-noise AR(1), kappa = 100 batches of N = 1000
    [scenario.white-ar1-N]
    lambda = 0.3333333333333333
    q_variance = 4
    v_variance = 9
    mode = batch
    order = 1
    n = 1000
    kappa = 100
    mean_tol = 0.01

Band keys (``mean_tol``, ``var_min``, ``var_max``, ``variance_below``,
``min_bias`` with ``bias_reference``, ``ref_variance``, ``paper_value``)
are optional; each one present adds a check to the scenario's verdict.
"""

from __future__ import annotations

import configparser
import csv
import datetime as _dt
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

import numpy as np

from .ar import optimal_ar
from .errors import ConfigError, NumericalError, ValidationError
from .least_squares import batch_estimate, fit_ar, running_moments, summarize, write_batch_csv
from .moments import stationary_covariance
from .noise import NoiseSpec, SeededStream
from .system import SystemParams, simulate

__all__ = [
    "ScenarioConfig",
    "RunReport",
    "Check",
    "load_config",
    "parse_config",
    "resolve_config_path",
    "compute_theory",
    "run_scenario",
    "cmd_theory",
    "cmd_reproduce",
    "cmd_series",
    "series_rows",
    "series_header",
    "select",
    "SINGLE_RUN_NOTE",
]

MODES = ("theory", "single", "batch")
SINGLE_RUN_NOTE = (
    "single-run estimates depend on the unknown seed of the original runs; "
    "they are checked only for membership in a 3-sigma band around the optimum "
    "using the reference estimator variance, never as point values"
)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    lam: float
    q: NoiseSpec = field(default_factory=NoiseSpec)
    v: NoiseSpec = field(default_factory=NoiseSpec)
    n: int = 1000
    alpha: int = 1
    kappa: int = 100
    order: int = 1
    seed: int = 0
    burn_in: int = 1000
    mode: str = "batch"
    mean_tol: float | None = None
    var_min: float | None = None
    var_max: float | None = None
    variance_below: str | None = None
    min_bias: float | None = None
    bias_reference: str | None = None
    ref_variance: tuple | None = None
    paper_value: tuple | None = None

    def __post_init__(self):
        name = self.name
        if self.mode not in MODES:
            raise ConfigError(f"must be one of {', '.join(MODES)}", "mode", name)
        if self.order not in (1, 2):
            raise ConfigError(f"must be 1 or 2, got {self.order}", "order", name)
        if self.alpha < 1:
            raise ConfigError(f"must be a positive integer, got {self.alpha}", "alpha", name)
        if self.n < 3:
            raise ConfigError(f"must be >= 3, got {self.n}", "n", name)
        if self.burn_in < 0:
            raise ConfigError(f"must be >= 0, got {self.burn_in}", "burn_in", name)
        if self.mode == "batch" and self.kappa < 2:
            raise ConfigError(
                f"batch scenarios need kappa >= 2 (kappa = {self.kappa})", "kappa", name
            )
        if self.kappa < 1:
            raise ConfigError(f"must be >= 1, got {self.kappa}", "kappa", name)
        for key in ("ref_variance", "paper_value"):
            val = getattr(self, key)
            if val is not None and len(val) != self.order:
                raise ConfigError(f"needs {self.order} value(s), got {len(val)}", key, name)
        if (self.min_bias is None) != (self.bias_reference is None):
            raise ConfigError("min_bias and bias_reference go together", "min_bias", name)
        try:
            self.params
        except ValidationError as exc:
            raise ConfigError(str(exc), "lambda", name) from exc

    @property
    def params(self):
        return SystemParams(self.lam, self.q, self.v)

    @property
    def effective_n(self):
        return self.alpha * self.n

    def to_dict(self):
        d = asdict(self)
        d["q"] = {"mean": self.q.mean, "variance": self.q.variance, "kind": self.q.kind}
        d["v"] = {"mean": self.v.mean, "variance": self.v.variance, "kind": self.v.kind}
        for key in ("ref_variance", "paper_value"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("q", "v"):
            spec = d[key]
            d[key] = NoiseSpec(spec["mean"], spec["variance"], NoiseSpec.parse_kind(spec["kind"]))
        for key in ("ref_variance", "paper_value"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


# ---------------------------------------------------------------- config parsing

_INT_KEYS = {"n", "alpha", "kappa", "order", "seed", "burn_in"}
_FLOAT_KEYS = {"q_mean", "q_variance", "v_mean", "v_variance", "mean_tol", "var_min", "var_max",
               "min_bias"}
_LIST_KEYS = {"ref_variance", "paper_value"}
_STR_KEYS = {"q_kind", "mode", "variance_below", "bias_reference"}
_KNOWN = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS | _STR_KEYS | {"lambda"}


def _parse_real(text, key, name):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a decimal number, got {text!r}", key, name) from None
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {text!r}", key, name)
    return value


def _parse_int(text, key, name):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key, name) from None


def _section_to_scenario(name, section):
    unknown = set(section) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}", None, name)
    if "lambda" not in section:
        raise ConfigError("missing required key", "lambda", name)
    kw = {"name": name, "lam": _parse_real(section["lambda"], "lambda", name)}
    for key in _INT_KEYS & set(section):
        kw[key] = _parse_int(section[key], key, name)
    for key in ("mean_tol", "var_min", "var_max", "min_bias"):
        if key in section:
            kw[key] = _parse_real(section[key], key, name)
    for key in _LIST_KEYS & set(section):
        kw[key] = tuple(_parse_real(x, key, name) for x in section[key].split(","))
    for key in ("mode", "variance_below", "bias_reference"):
        if key in section:
            kw[key] = section[key].strip()

    def real(key, default):
        return _parse_real(section[key], key, name) if key in section else default

    try:
        coeff = NoiseSpec.parse_kind(section.get("q_kind", "white"))
        q = NoiseSpec(real("q_mean", 0.0), real("q_variance", 1.0), coeff)
    except ValidationError as exc:
        raise ConfigError(str(exc), "q_kind", name) from exc
    try:
        v = NoiseSpec.white(real("v_mean", 0.0), real("v_variance", 1.0))
    except ValidationError as exc:
        raise ConfigError(str(exc), "v_variance", name) from exc
    return ScenarioConfig(q=q, v=v, **kw)


def parse_config(text):
    """Parse config text into an ordered list of :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",), strict=True
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"scenario defined twice: {exc.section}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    scenarios = []
    for section in parser.sections():
        if not section.startswith("scenario.") or section == "scenario.":
            raise ConfigError(f"section headers must be [scenario.<name>], got [{section}]")
        name = section[len("scenario."):]
        scenarios.append(_section_to_scenario(name, parser[section]))
    names = {s.name for s in scenarios}
    for s in scenarios:
        for key in ("variance_below", "bias_reference"):
            ref = getattr(s, key)
            if ref is not None and ref not in names:
                raise ConfigError(f"refers to unknown scenario {ref!r}", key, s.name)
    return scenarios


def resolve_config_path(path):
    """Return ``path`` if it exists, else the bundled config with that file name."""
    if os.path.exists(path):
        return path
    bundled = resources.files("arident") / "data" / os.path.basename(path)
    if bundled.is_file():
        return str(bundled)
    raise ConfigError(f"config file not found: {path}")


def load_config(path):
    path = resolve_config_path(path)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)


def select(scenarios, name):
    for s in scenarios:
        if s.name == name:
            return s
    raise ConfigError(f"no scenario named {name!r}", "scenario")


# ---------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self):
        return asdict(self)


@dataclass
class RunReport:
    scenario: ScenarioConfig
    theory: dict
    empirical: dict | None = None
    deltas: dict | None = None
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    error: str | None = None
    error_kind: str | None = None
    timestamp: str | None = None

    @property
    def passed(self):
        return self.error is None and all(c.passed for c in self.checks)

    def to_dict(self, with_timestamp=True):
        d = {
            "scenario": self.scenario.to_dict(),
            "theory": self.theory,
            "empirical": self.empirical,
            "deltas": self.deltas,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "error": self.error,
            "error_kind": self.error_kind,
            "passed": self.passed,
        }
        if with_timestamp:
            d["timestamp"] = self.timestamp
        return d

    def to_json(self, with_timestamp=True):
        return json.dumps(self.to_dict(with_timestamp), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(
            scenario=ScenarioConfig.from_dict(d["scenario"]),
            theory=d["theory"],
            empirical=d.get("empirical"),
            deltas=d.get("deltas"),
            checks=[Check(**c) for c in d.get("checks", [])],
            notes=list(d.get("notes", [])),
            error=d.get("error"),
            error_kind=d.get("error_kind"),
            timestamp=d.get("timestamp"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def compute_theory(cfg):
    """Closed-form quantities for a scenario; the optimum for both AR families."""
    params = cfg.params
    cov = stationary_covariance(params, 2)
    families = {}
    for order in (1, 2):
        est = optimal_ar(cov, order)
        families[f"ar{order}"] = {
            "theta_star": [float(c) for c in est.coeffs],
            "pred_error_variance": float(est.pred_error_variance),
        }
    chosen = families[f"ar{cfg.order}"]
    return {
        "mean": float(cov.mean),
        "variance": float(cov[0]),
        "covariance": [float(c) for c in cov.values],
        "theta_star": chosen["theta_star"],
        "pred_error_variance": chosen["pred_error_variance"],
        "families": families,
    }


def _fmt(x):
    if np.ndim(x) == 0:
        return f"{float(x):.6g}"
    return "[" + ", ".join(f"{float(v):.6g}" for v in np.ravel(x)) + "]"


def run_scenario(cfg, workers=None):
    """Compute theory and (unless ``mode == 'theory'``) the empirical estimates.

    Cross-scenario checks (``variance_below``, ``bias_reference``) are filled
    in later by :func:`cmd_reproduce`.
    """
    report = RunReport(cfg, theory={}, timestamp=_now())
    try:
        report.theory = compute_theory(cfg)
        theta = np.array(report.theory["theta_star"])
        if cfg.mode == "single":
            traj = simulate(cfg.params, cfg.effective_n, cfg.burn_in, SeededStream(cfg.seed, 0))
            est = fit_ar(traj, cfg.order)
            report.empirical = {"estimate": est.to_dict()}
            report.deltas = {"theta": [float(x) for x in est.coeffs - theta]}
            report.notes.append(SINGLE_RUN_NOTE)
            _single_checks(report, cfg, est.coeffs, theta)
        elif cfg.mode == "batch":
            summary = batch_estimate(
                cfg.params, cfg.order, cfg.effective_n, cfg.kappa, cfg.seed, cfg.burn_in,
                workers=workers,
            )
            report.empirical = {
                "summary": summary.to_dict(),
                "estimates": [[float(x) for x in row] for row in summary.estimates],
            }
            report.deltas = {"theta": [float(x) for x in summary.emp_mean - theta]}
            report.notes.append("empirical variance uses the 1/kappa (biased) normalisation")
            _batch_checks(report, cfg, summary, theta)
    except ValidationError as exc:
        report.error, report.error_kind = str(exc), "validation"
    except NumericalError as exc:
        report.error, report.error_kind = str(exc), "numerical"
    return report


def _single_checks(report, cfg, coeffs, theta):
    if cfg.ref_variance is None:
        return
    half = 3.0 * np.sqrt(np.asarray(cfg.ref_variance))
    inside = bool(np.all(np.abs(coeffs - theta) <= half))
    report.checks.append(Check(
        "estimate_in_3sigma_band", inside,
        f"|{_fmt(coeffs)} - {_fmt(theta)}| <= {_fmt(half)}",
    ))
    if cfg.paper_value is not None:
        pv = np.asarray(cfg.paper_value)
        report.checks.append(Check(
            "paper_value_in_3sigma_band", bool(np.all(np.abs(pv - theta) <= half)),
            f"|{_fmt(pv)} - {_fmt(theta)}| <= {_fmt(half)}",
        ))


def _diag_variance(summary_dict):
    var = summary_dict["emp_variance"]
    return np.atleast_1d(np.diag(var) if isinstance(var, list) else var)


def _batch_checks(report, cfg, summary, theta):
    if cfg.mean_tol is not None:
        err = np.abs(summary.emp_mean - theta)
        report.checks.append(Check(
            "emp_mean_within_tol", bool(np.all(err <= cfg.mean_tol)),
            f"|{_fmt(summary.emp_mean)} - {_fmt(theta)}| = {_fmt(err)} <= {cfg.mean_tol:g}",
        ))
    diag = _diag_variance(summary.to_dict())
    if cfg.var_min is not None or cfg.var_max is not None:
        lo = -np.inf if cfg.var_min is None else cfg.var_min
        hi = np.inf if cfg.var_max is None else cfg.var_max
        report.checks.append(Check(
            "emp_variance_in_range", bool(np.all((diag >= lo) & (diag <= hi))),
            f"{_fmt(diag)} in [{lo:g}, {hi:g}]",
        ))


def _cross_checks(reports):
    by_name = {r.scenario.name: r for r in reports}
    for r in reports:
        cfg = r.scenario
        if r.error is not None or r.empirical is None:
            continue
        for ref in (cfg.variance_below, cfg.bias_reference):
            if ref is not None and ref not in by_name:
                r.notes.append(f"cross-scenario check against {ref!r} skipped: not in this run")
        if cfg.variance_below in by_name:
            other = by_name[cfg.variance_below]
            if other.empirical is None or "summary" not in other.empirical:
                r.checks.append(Check("variance_below", False, f"{other.scenario.name} has no batch summary"))
            else:
                mine = _diag_variance(r.empirical["summary"])
                theirs = _diag_variance(other.empirical["summary"])
                r.checks.append(Check(
                    "variance_below", bool(np.all(mine < theirs)),
                    f"{_fmt(mine)} < {_fmt(theirs)} ({other.scenario.name})",
                ))
        if cfg.bias_reference in by_name:
            ref = by_name[cfg.bias_reference]
            ref_theta = np.array(ref.theory["families"][f"ar{cfg.order}"]["theta_star"])
            if "summary" in r.empirical:
                emp = np.array(r.empirical["summary"]["emp_mean"])
            else:
                emp = np.array(r.empirical["estimate"]["coeffs"])
            dist = float(np.max(np.abs(emp - ref_theta)))
            r.theory["bias_reference_theta_star"] = [float(x) for x in ref_theta]
            r.checks.append(Check(
                "biased_away_from_reference", dist > cfg.min_bias,
                f"max|{_fmt(emp)} - {_fmt(ref_theta)}| = {dist:.6g} > {cfg.min_bias:g} "
                f"({ref.scenario.name})",
            ))


# ---------------------------------------------------------------- commands

def cmd_theory(cfg):
    """Theory-only report for one scenario."""
    return run_scenario(replace(cfg, mode="theory"))


def cmd_reproduce(scenarios, out_dir=None, workers=None, batch_workers=None):
    """Run every scenario; return ``(reports, exit_status)``.

    Exit status: 0 all bands pass, 1 a scenario failed validation, 2 a
    numerical failure, 3 a band failed. Reports keep config order whatever
    the completion order.
    """
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: run_scenario(s, batch_workers), scenarios))
    else:
        reports = [run_scenario(s, batch_workers) for s in scenarios]
    _cross_checks(reports)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for r in reports:
            with open(os.path.join(out_dir, f"{r.scenario.name}.json"), "w") as fh:
                fh.write(r.to_json() + "\n")
            if r.empirical is not None and "summary" in r.empirical:
                summary = _summary_from_report(r)
                write_batch_csv(summary, os.path.join(out_dir, f"{r.scenario.name}.csv"))

    kinds = {r.error_kind for r in reports}
    if "validation" in kinds:
        status = 1
    elif "numerical" in kinds:
        status = 2
    elif not all(r.passed for r in reports):
        status = 3
    else:
        status = 0
    return reports, status


def _summary_from_report(r):
    s = r.empirical["summary"]
    return summarize(np.array(r.empirical["estimates"]), s["order"], s["n"])


def series_rows(cfg, workers=None):
    """Per-batch estimates with running empirical mean and variance, as row dicts."""
    if cfg.kappa < 2:
        raise ConfigError(f"series needs kappa >= 2 (kappa = {cfg.kappa})", "kappa", cfg.name)
    summary = batch_estimate(
        cfg.params, cfg.order, cfg.effective_n, cfg.kappa, cfg.seed, cfg.burn_in, workers=workers
    )
    means, variances = running_moments(summary.estimates)
    rows = []
    for k, (est, m, v) in enumerate(zip(summary.estimates, means, variances), start=1):
        row = {"batch": k}
        row.update({f"phi{j + 1}": est[j] for j in range(cfg.order)})
        row.update({f"running_mean{j + 1}": m[j] for j in range(cfg.order)})
        row.update({f"running_var{j + 1}": v[j] for j in range(cfg.order)})
        rows.append(row)
    return rows, summary


def series_header(order):
    cols = ["batch"]
    for prefix in ("phi", "running_mean", "running_var"):
        cols += [f"{prefix}{j}" for j in range(1, order + 1)]
    return cols


def cmd_series(cfg, out=None, workers=None):
    """Write the running-statistics CSV; returns the CSV text."""
    rows, _ = series_rows(cfg, workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = series_header(cfg.order)
    w.writerow(header)
    for row in rows:
        w.writerow([row["batch"]] + [repr(float(row[c])) for c in header[1:]])
    text = buf.getvalue()
    if out is not None:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text

