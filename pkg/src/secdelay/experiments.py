"""Parameter sweeps, figure presets, the sweep-file grammar and CSV output.

Sweep files are line oriented::

    # comment (also allowed after a value)
    scenario  = backlogged, dynamic     # one or both traffic models
    split     = false, true
    lambda_l  = 0.05
    sweep     = lambda_l                # parameter varied along the grid
    grid      = 0.01:0.09:9             # start:stop:count, or a comma list
    series    = alpha                   # optional second parameter
    series_values = 3, 4, 5
    replications = 0                    # 0 = analytic only

Every key is optional; an empty file is the default operating point
evaluated analytically.  Keys and defaults are listed in ``KEYS``.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import analytic
from .core import (
    DEFAULT_R_E,
    DEFAULT_R_T,
    RateConfig,
    ScenarioConfig,
    SystemParams,
    Traffic,
)
from .simulator.attempts import Mode
from .simulator.replicate import (
    DEFAULT_HORIZON,
    DEFAULT_MESSAGES,
    replication_tasks,
    run_tasks,
    summarize,
)

METRICS = ("mean_delay", "secrecy_outage", "q_star", "p_cf")
SYSTEM_KEYS = ("lambda_l", "lambda_e", "r0", "alpha", "p", "xi")
RATE_KEYS = ("R_t", "R_e")
SWEEPABLE = SYSTEM_KEYS + RATE_KEYS
CSV_HEADER = (
    "scenario,split,lambda_l,lambda_e,r0,alpha,p,xi,R_t,R_e,metric,analytic,"
    "sim_mean,sim_ci_lo,sim_ci_hi,n_reps,censored_frac,seed"
).split(",")
PRESETS = ("fig5", "fig6", "fig7", "fig8", "fig9")


class ConfigError(ValueError):
    """Malformed or semantically invalid sweep configuration."""


class SweepError(ValueError):
    """A grid point could not be evaluated."""


@dataclass(frozen=True)
class SweepConfig:
    params: SystemParams = field(default_factory=SystemParams)
    rates: RateConfig = field(default_factory=RateConfig)
    scenarios: tuple[ScenarioConfig, ...] = (ScenarioConfig(),)
    sweep: str = "p"
    grid: tuple[float, ...] = ()
    series: str | None = None
    series_values: tuple[float, ...] = ()
    hold: str = "R_e"
    replications: int = 0
    torus_side: float | None = None
    horizon: int = DEFAULT_HORIZON
    warmup: int | None = None
    n_messages: int = DEFAULT_MESSAGES
    seed: int = 0
    mode: Mode = Mode.PHYSICAL
    outputs: tuple[str, ...] = METRICS

    def __post_init__(self):
        if not self.grid:
            object.__setattr__(self, "grid", (self.base_value(self.sweep),))
        _validate(self)

    def base_value(self, name: str) -> float:
        if name in SYSTEM_KEYS:
            return getattr(self.params, name)
        if name in RATE_KEYS:
            return getattr(self.rates, name)
        raise ConfigError(f"key 'sweep': cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")

    def points(self):
        """Yield ``(scenario, params, rates, label)`` in output order."""
        series = self.series_values if self.series else (None,)
        for scenario in self.scenarios:
            for s in series:
                for g in self.grid:
                    label = f"{self.sweep}={g!r}" + (f", {self.series}={s!r}" if self.series else "")
                    yield scenario, *self._resolve(s, g), f"{label} ({scenario.label})"

    def _resolve(self, series_value, grid_value):
        values = {k: getattr(self.params, k) for k in SYSTEM_KEYS}
        r_t, r_e = self.rates.R_t, self.rates.R_e
        r_s = r_t - r_e
        updates = []
        if self.series is not None:
            updates.append((self.series, series_value))
        updates.append((self.sweep, grid_value))
        for name, value in updates:
            if name in SYSTEM_KEYS:
                values[name] = value
            elif name == "R_t":
                r_t = value
                if self.hold == "R_s":
                    r_e = r_t - r_s
            elif name == "R_e":
                r_e = value
                if self.hold == "R_s":
                    r_t = r_e + r_s
        try:
            return SystemParams(**values), RateConfig(R_t=r_t, R_e=r_e)
        except ValueError as err:
            where = ", ".join(f"{n}={v!r}" for n, v in updates)
            raise SweepError(f"grid point {where}: {err}") from err


def _validate(cfg: SweepConfig) -> None:
    cfg.base_value(cfg.sweep)
    if cfg.series is not None:
        if cfg.series not in SWEEPABLE:
            raise ConfigError(f"key 'series': cannot vary {cfg.series!r}")
        if cfg.series == cfg.sweep:
            raise ConfigError("key 'series': must differ from the swept parameter")
        if not cfg.series_values:
            raise ConfigError("key 'series_values': required when 'series' is set")
    elif cfg.series_values:
        raise ConfigError("key 'series_values': given without 'series'")
    if cfg.hold not in ("R_e", "R_s"):
        raise ConfigError(f"key 'hold': expected R_e or R_s, got {cfg.hold!r}")
    if not cfg.scenarios:
        raise ConfigError("key 'scenario': at least one scenario is needed")
    if cfg.replications < 0:
        raise ConfigError("key 'replications': must be >= 0")
    if cfg.horizon < 1:
        raise ConfigError("key 'horizon': must be >= 1")
    if cfg.warmup is not None and not 0 <= cfg.warmup < cfg.horizon:
        raise ConfigError("key 'warmup': must satisfy 0 <= warmup < horizon")
    if cfg.n_messages < 1:
        raise ConfigError("key 'messages': must be >= 1")
    if cfg.torus_side is not None and not cfg.torus_side > 0:
        raise ConfigError("key 'torus_side': must be > 0")
    bad = [m for m in cfg.outputs if m not in METRICS]
    if bad or not cfg.outputs:
        raise ConfigError(f"key 'outputs': expected a subset of {', '.join(METRICS)}, got {bad or 'nothing'}")
    # every grid point must be a valid operating point
    for _ in cfg.points():
        pass


# ---------------------------------------------------------------------------
# config file grammar
# ---------------------------------------------------------------------------

_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# key -> (default shown in docs, parser)
KEYS = {
    "scenario": "backlogged",
    "split": "false",
    "lambda_l": "0.05",
    "lambda_e": "0.01",
    "r0": "1",
    "alpha": "4",
    "p": "0.8",
    "xi": "0.1",
    "R_t": "3",
    "R_e": "1",
    "sweep": "p",
    "grid": "(the base value of the swept parameter)",
    "series": "(none)",
    "series_values": "(none)",
    "hold": "R_e",
    "replications": "0",
    "torus_side": "40 * r0",
    "horizon": str(DEFAULT_HORIZON),
    "warmup": "horizon / 5",
    "messages": str(DEFAULT_MESSAGES),
    "seed": "0",
    "mode": "physical",
    "outputs": ", ".join(METRICS),
}


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a number, got {text!r}") from None
    return value


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected an integer, got {text!r}") from None


def _bool(key: str, text: str) -> bool:
    low = text.lower()
    if low in ("true", "on", "yes", "1"):
        return True
    if low in ("false", "off", "no", "0"):
        return False
    raise ConfigError(f"key {key!r}: expected true or false, got {text!r}")


def _grid(key: str, text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = [t.strip() for t in text.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"key {key!r}: range form is start:stop:count")
        start, stop = _float(key, parts[0]), _float(key, parts[1])
        count = _int(key, parts[2])
        if count < 1:
            raise ConfigError(f"key {key!r}: count must be >= 1")
        return tuple(float(round(v, 12)) for v in np.linspace(start, stop, count))
    values = tuple(_float(key, t) for t in _split_list(text))
    if not values:
        raise ConfigError(f"key {key!r}: grid must not be empty")
    return values


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_config(text: str) -> SweepConfig:
    """Parse the sweep-file grammar into a validated :class:`SweepConfig`."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line)
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ConfigError(f"line {lineno}, column {col}: expected 'key = value'")
        key_part, value = body.split("=", 1)
        key = key_part.strip()
        col = len(key_part) - len(key_part.lstrip()) + 1
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}, column {col}: invalid key {key!r}")
        if key not in KEYS:
            raise ConfigError(f"line {lineno}, column {col}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}, column {col}: duplicate key {key!r}")
        value = value.strip()
        if not value:
            vcol = len(key_part) + 2
            raise ConfigError(f"line {lineno}, column {vcol}: missing value for {key!r}")
        raw[key] = value
    return _build(raw)


def _build(raw: dict[str, str]) -> SweepConfig:
    sys_kw = {k: _float(k, raw[k]) for k in SYSTEM_KEYS if k in raw}
    try:
        params = SystemParams(**sys_kw)
    except ValueError as err:
        raise ConfigError(f"system parameters: {err}") from err
    try:
        rates = RateConfig(
            R_t=_float("R_t", raw["R_t"]) if "R_t" in raw else DEFAULT_R_T,
            R_e=_float("R_e", raw["R_e"]) if "R_e" in raw else DEFAULT_R_E,
        )
    except ValueError as err:
        raise ConfigError(f"key 'R_t'/'R_e': {err}") from err

    try:
        traffic = [Traffic(t.lower()) for t in _split_list(raw.get("scenario", "backlogged"))]
    except ValueError:
        raise ConfigError(f"key 'scenario': expected backlogged and/or dynamic, got {raw['scenario']!r}") from None
    splits = [_bool("split", t) for t in _split_list(raw.get("split", "false"))]
    scenarios = tuple(ScenarioConfig(t, s) for t in traffic for s in splits)
    try:
        mode = Mode(raw.get("mode", "physical").lower())
    except ValueError:
        raise ConfigError(f"key 'mode': expected physical, independent or meanfield, got {raw['mode']!r}") from None

    kw = dict(
        params=params,
        rates=rates,
        scenarios=scenarios,
        sweep=raw.get("sweep", "p"),
        grid=_grid("grid", raw["grid"]) if "grid" in raw else (),
        series=raw.get("series"),
        series_values=_grid("series_values", raw["series_values"]) if "series_values" in raw else (),
        hold=raw.get("hold", "R_e"),
        replications=_int("replications", raw.get("replications", "0")),
        torus_side=_float("torus_side", raw["torus_side"]) if "torus_side" in raw else None,
        horizon=_int("horizon", raw.get("horizon", str(DEFAULT_HORIZON))),
        warmup=_int("warmup", raw["warmup"]) if "warmup" in raw else None,
        n_messages=_int("messages", raw.get("messages", str(DEFAULT_MESSAGES))),
        seed=_int("seed", raw.get("seed", "0")),
        mode=mode,
        outputs=tuple(_split_list(raw.get("outputs", ", ".join(METRICS)))),
    )
    try:
        return SweepConfig(**kw)
    except SweepError as err:
        raise ConfigError(f"key {kw['sweep']!r}: {err}") from err


def serialize_config(cfg: SweepConfig) -> str:
    """Render a config in the file grammar; ``parse_config`` inverts it."""
    traffic = list(dict.fromkeys(s.traffic.value for s in cfg.scenarios))
    splits = list(dict.fromkeys("true" if s.split else "false" for s in cfg.scenarios))
    if len(cfg.scenarios) != len(traffic) * len(splits):
        raise ConfigError("scenarios must form a traffic x split product to be serialized")
    lines = [
        f"scenario = {', '.join(traffic)}",
        f"split = {', '.join(splits)}",
    ]
    lines += [f"{k} = {getattr(cfg.params, k)!r}" for k in SYSTEM_KEYS]
    lines += [f"R_t = {cfg.rates.R_t!r}", f"R_e = {cfg.rates.R_e!r}"]
    lines += [f"sweep = {cfg.sweep}", f"grid = {', '.join(repr(v) for v in cfg.grid)}"]
    if cfg.series is not None:
        lines += [f"series = {cfg.series}",
                  f"series_values = {', '.join(repr(v) for v in cfg.series_values)}"]
    lines += [
        f"hold = {cfg.hold}",
        f"replications = {cfg.replications}",
        f"horizon = {cfg.horizon}",
        f"messages = {cfg.n_messages}",
        f"seed = {cfg.seed}",
        f"mode = {cfg.mode.value}",
        f"outputs = {', '.join(cfg.outputs)}",
    ]
    if cfg.torus_side is not None:
        lines.append(f"torus_side = {cfg.torus_side!r}")
    if cfg.warmup is not None:
        lines.append(f"warmup = {cfg.warmup}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _lin(a: float, b: float, n: int) -> tuple[float, ...]:
    return tuple(float(round(v, 12)) for v in np.linspace(a, b, n))


def figure_preset(name: str) -> SweepConfig:
    """Sweep reproducing the axes of one evaluation figure.

    The alpha grid of fig7 is not fixed by the figure; {3, 4, 5} is used.
    """
    backlogged = (ScenarioConfig(Traffic.BACKLOGGED),)
    if name == "fig5":
        return SweepConfig(scenarios=backlogged, sweep="p", grid=_lin(0.05, 0.95, 19))
    if name == "fig6":
        return SweepConfig(scenarios=backlogged, sweep="lambda_l", grid=_lin(0.01, 0.2, 20))
    if name == "fig7":
        return SweepConfig(
            scenarios=backlogged, sweep="lambda_l", grid=_lin(0.01, 0.09, 9),
            series="alpha", series_values=(3.0, 4.0, 5.0),
        )
    if name == "fig8":
        # confidential rate R_s = 1 held while the codeword rate moves
        return SweepConfig(
            rates=RateConfig(R_t=3.0, R_e=2.0),
            scenarios=(ScenarioConfig(Traffic.DYNAMIC),),
            sweep="lambda_l", grid=_lin(0.01, 0.2, 20),
            series="R_t", series_values=(2.0, 3.0, 4.0), hold="R_s",
        )
    if name == "fig9":
        return SweepConfig(
            params=SystemParams(xi=0.2),
            scenarios=tuple(ScenarioConfig(t, s) for t in Traffic for s in (False, True)),
            sweep="lambda_l", grid=_lin(0.01, 0.2, 20),
        )
    raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    split: bool
    params: SystemParams
    rates: RateConfig
    metric: str
    analytic: float
    sim_mean: float | None = None
    sim_ci_lo: float | None = None
    sim_ci_hi: float | None = None
    n_reps: int = 0
    censored_frac: float | None = None
    seed: int = 0


def _sim_estimate(summary, metric):
    return {
        "mean_delay": summary.delay,
        "secrecy_outage": summary.outage,
        "q_star": summary.activity,
        "p_cf": summary.connection_failure,
    }[metric]


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[ResultRow]:
    """Evaluate every point of the sweep; simulate when ``replications > 0``.

    Rows come out in scenario, series, grid, metric order regardless of how
    the replications were scheduled.
    """
    points = list(cfg.points())
    analytic_values = []
    for scenario, params, rates, label in points:
        try:
            analytic_values.append(analytic.evaluate(params, rates, scenario).as_dict())
        except ValueError as err:
            raise SweepError(f"grid point {label}: {err}") from err

    summaries = [None] * len(points)
    if cfg.replications > 0:
        tasks, spans = [], []
        for i, (scenario, params, rates, _) in enumerate(points):
            t = replication_tasks(
                params, rates, scenario, cfg.replications, cfg.seed, cfg.mode,
                cfg.torus_side, cfg.n_messages, cfg.horizon, cfg.warmup, key=(i,),
            )
            spans.append((len(tasks), len(tasks) + len(t)))
            tasks.extend(t)
        results = run_tasks(tasks, workers)
        summaries = [summarize(results[a:b]) for a, b in spans]

    rows = []
    for (scenario, params, rates, _), values, summary in zip(points, analytic_values, summaries):
        for metric in cfg.outputs:
            row = ResultRow(
                scenario=scenario.traffic.value,
                split=scenario.split,
                params=params,
                rates=rates,
                metric=metric,
                analytic=values[metric],
                seed=cfg.seed,
            )
            if summary is not None:
                est = _sim_estimate(summary, metric)
                row = replace(
                    row,
                    sim_mean=est.mean,
                    sim_ci_lo=est.lo,
                    sim_ci_hi=est.hi,
                    n_reps=summary.n_reps,
                    censored_frac=summary.censored_fraction,
                )
            rows.append(row)
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def row_values(row: ResultRow) -> list[str]:
    p, r = row.params, row.rates
    return [
        row.scenario, _fmt(row.split),
        _fmt(p.lambda_l), _fmt(p.lambda_e), _fmt(p.r0), _fmt(p.alpha), _fmt(p.p), _fmt(p.xi),
        _fmt(r.R_t), _fmt(r.R_e),
        row.metric, _fmt(row.analytic),
        _fmt(row.sim_mean), _fmt(row.sim_ci_lo), _fmt(row.sim_ci_hi),
        str(row.n_reps), _fmt(row.censored_frac), str(row.seed),
    ]


def write_csv(rows: list[ResultRow], out) -> None:
    """Write rows to a path or an open text stream."""
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row_values(row))


def to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def column(rows: list[ResultRow], metric: str, scenario: str | None = None,
           split: bool | None = None, **match) -> list[ResultRow]:
    """Filter rows by metric, scenario/split and exact parameter values."""
    out = []
    for row in rows:
        if row.metric != metric:
            continue
        if scenario is not None and row.scenario != scenario:
            continue
        if split is not None and row.split != split:
            continue
        ok = True
        for k, v in match.items():
            have = getattr(row.params, k) if k in SYSTEM_KEYS else getattr(row.rates, k)
            ok &= have == v
        if ok:
            out.append(row)
    return out
