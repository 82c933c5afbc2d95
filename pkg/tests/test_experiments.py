import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secdelay import RateConfig, ScenarioConfig, SystemParams, Traffic
from secdelay.experiments import (
    CSV_HEADER,
    PRESETS,
    ConfigError,
    SweepConfig,
    SweepError,
    column,
    figure_preset,
    parse_config,
    run_sweep,
    serialize_config,
    to_csv,
)
from secdelay.simulator import Mode


def analytic(rows, metric, **kw):
    return np.array([r.analytic for r in column(rows, metric, **kw)])


# --- grammar --------------------------------------------------------------------------


def test_empty_file_is_defaults():
    cfg = parse_config("")
    assert cfg.params == SystemParams() and cfg.rates == RateConfig()
    assert cfg.scenarios == (ScenarioConfig(),)
    assert cfg.replications == 0
    assert cfg.grid == (0.8,)


def test_comments_and_lists():
    cfg = parse_config(
        "# header\n"
        "scenario = backlogged, dynamic   # both\n"
        "split = false, true\n"
        "\n"
        "sweep = lambda_l\n"
        "grid = 0.01:0.05:5\n"
        "mode = meanfield\n"
    )
    assert len(cfg.scenarios) == 4
    assert cfg.grid == (0.01, 0.02, 0.03, 0.04, 0.05)
    assert cfg.mode is Mode.MEANFIELD


def test_alpha_two_rejected():
    with pytest.raises(ConfigError, match="alpha"):
        parse_config("alpha = 2")


@pytest.mark.parametrize(
    "text, where",
    [
        ("p 0.5", "line 1, column 1"),
        ("\n  bogus = 1", "line 2, column 3"),
        ("p = 0.5\np = 0.6", "line 2, column 1"),
        ("p =", "line 1, column 4"),
        ("9x = 1", "line 1, column 1"),
    ],
)
def test_syntax_errors_carry_position(text, where):
    with pytest.raises(ConfigError, match=where):
        parse_config(text)


@pytest.mark.parametrize(
    "text, key",
    [
        ("p = abc", "'p'"),
        ("replications = 1.5", "'replications'"),
        ("split = maybe", "'split'"),
        ("scenario = bursty", "'scenario'"),
        ("mode = fast", "'mode'"),
        ("sweep = r0\ngrid = 1:2:0", "'grid'"),
        ("sweep = beta", "'sweep'"),
        ("outputs = delay", "'outputs'"),
        ("series = alpha", "'series_values'"),
        ("replications = -1", "'replications'"),
        ("sweep = p\ngrid = 0.5, 1.5", "'p'"),
    ],
)
def test_semantic_errors_name_key(text, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(text)


finite = dict(allow_nan=False, allow_infinity=False)

params_st = st.builds(
    SystemParams,
    lambda_l=st.floats(1e-4, 1.0, **finite),
    lambda_e=st.floats(0.0, 1.0, **finite),
    r0=st.floats(0.1, 5.0, **finite),
    alpha=st.floats(2.01, 8.0, **finite),
    p=st.floats(0.01, 1.0, **finite),
    xi=st.floats(0.0, 0.99, **finite),
)


@st.composite
def configs(draw):
    params = draw(params_st)
    r_e = draw(st.floats(0.0, 4.0, **finite))
    rates = RateConfig(R_t=r_e + draw(st.floats(0.0, 4.0, **finite)), R_e=r_e)
    traffic = draw(st.lists(st.sampled_from(list(Traffic)), min_size=1, max_size=2, unique=True))
    splits = draw(st.lists(st.booleans(), min_size=1, max_size=2, unique=True))
    sweep = draw(st.sampled_from(["lambda_l", "p", "xi", "alpha"]))
    ranges = {"lambda_l": (1e-4, 1.0), "p": (0.01, 1.0), "xi": (0.0, 0.99), "alpha": (2.01, 8.0)}
    grid = tuple(draw(st.lists(st.floats(*ranges[sweep], **finite), min_size=1, max_size=5)))
    series = draw(st.sampled_from([None, "R_e"]))
    series_values = ()
    if series:
        series_values = tuple(draw(st.lists(st.floats(0.0, rates.R_t, **finite), min_size=1, max_size=3)))
    horizon = draw(st.integers(1, 10**6))
    return SweepConfig(
        params=params, rates=rates,
        scenarios=tuple(ScenarioConfig(t, s) for t in traffic for s in splits),
        sweep=sweep, grid=grid, series=series, series_values=series_values,
        replications=draw(st.integers(0, 1000)),
        torus_side=draw(st.one_of(st.none(), st.floats(1.0, 500.0, **finite))),
        horizon=horizon,
        warmup=draw(st.one_of(st.none(), st.integers(0, horizon - 1))),
        n_messages=draw(st.integers(1, 10**6)),
        seed=draw(st.integers(0, 2**63)),
        mode=draw(st.sampled_from(list(Mode))),
        outputs=tuple(draw(st.lists(st.sampled_from(["mean_delay", "secrecy_outage", "q_star", "p_cf"]),
                                    min_size=1, max_size=4, unique=True))),
    )


@settings(max_examples=150, deadline=None)
@given(configs())
def test_round_trip(cfg):
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == text


# --- presets ----------------------------------------------------------------------------


def test_unknown_preset_lists_valid_names():
    with pytest.raises(ConfigError) as err:
        figure_preset("fig10")
    for name in PRESETS:
        assert name in str(err.value)


def test_fig5_defaults():
    cfg = figure_preset("fig5")
    assert cfg.sweep == "p" and cfg.params == SystemParams() and cfg.rates == RateConfig()
    assert cfg.scenarios == (ScenarioConfig(Traffic.BACKLOGGED),)


def test_fig8_holds_secrecy_rate():
    rows = run_sweep(figure_preset("fig8"))
    assert {r.rates.R_t - r.rates.R_e for r in rows} == {1.0}
    assert {r.rates.R_t for r in rows} == {2.0, 3.0, 4.0}
    assert {r.scenario for r in rows} == {"dynamic"}


def test_fig9_configuration():
    cfg = figure_preset("fig9")
    assert cfg.params.xi == 0.2
    assert set(cfg.scenarios) == {ScenarioConfig(t, s) for t in Traffic for s in (False, True)}


def test_delay_u_shaped_in_p():
    cfg = SweepConfig(sweep="p", grid=tuple(np.round(np.arange(1, 10) / 10, 12)), outputs=("mean_delay",))
    d = analytic(run_sweep(cfg), "mean_delay")
    k = int(np.argmin(d))
    assert 0 < k < len(d) - 1
    assert np.all(np.diff(d[: k + 1]) < 0) and np.all(np.diff(d[k:]) > 0)


def test_alpha_outage_crossover():
    cfg = SweepConfig(sweep="lambda_l", grid=(0.01, 0.02, 0.15, 0.2), series="alpha",
                      series_values=(3.0, 4.0), outputs=("secrecy_outage",))
    rows = run_sweep(cfg)
    a3 = analytic(rows, "secrecy_outage", alpha=3.0)
    a4 = analytic(rows, "secrecy_outage", alpha=4.0)
    assert np.all(a4[:2] > a3[:2])
    assert np.all(a4[2:] < a3[2:])


# --- sweeps and CSV ----------------------------------------------------------------------


def test_analytic_only_rows_have_empty_sim_columns():
    text = to_csv(run_sweep(parse_config("")))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 5
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[12:15] == ["", "", ""] and fields[15] == "0" and fields[16] == ""


def test_infinite_delay_literal():
    rows = run_sweep(parse_config("sweep = p\ngrid = 1.0\noutputs = mean_delay"))
    assert to_csv(rows).splitlines()[1].split(",")[11] == "inf"


def test_numeric_precision():
    row = to_csv(run_sweep(parse_config("outputs = mean_delay"))).splitlines()[1].split(",")
    digits = row[11].replace(".", "").lstrip("0")
    assert len(digits) >= 9
    assert float(row[11]) == pytest.approx(4.01858918731, rel=1e-11)


def test_rows_follow_grid_order():
    cfg = parse_config("sweep = lambda_l\ngrid = 0.09, 0.01, 0.05\noutputs = p_cf, mean_delay")
    rows = run_sweep(cfg)
    assert [r.params.lambda_l for r in rows] == [0.09, 0.09, 0.01, 0.01, 0.05, 0.05]
    assert [r.metric for r in rows[:2]] == ["p_cf", "mean_delay"]


def test_grid_error_identifies_point():
    with pytest.raises(SweepError, match="p=1.5"):
        SweepConfig(sweep="p", grid=(0.5, 1.5))


def test_domain_error_at_grid_point_identified():
    cfg = SweepConfig(rates=RateConfig(3, 1), sweep="R_e", grid=(1.0, 0.0))
    with pytest.raises(SweepError, match="R_e=0.0"):
        run_sweep(cfg)


def test_analytic_columns_independent_of_simulation_settings():
    base = "scenario = dynamic\nsweep = xi\ngrid = 0.05, 0.1\n"
    a = run_sweep(parse_config(base))
    b = run_sweep(parse_config(base + "replications = 2\nseed = 9\nhorizon = 1000\ntorus_side = 30\n"))
    assert [r.analytic for r in a] == [r.analytic for r in b]
    assert all(r.sim_mean is not None for r in b)


def test_simulated_sweep_byte_identical():
    text = "scenario = backlogged, dynamic\nsweep = xi\ngrid = 0.05, 0.1\nreplications = 2\nhorizon = 1000\nmessages = 100\nseed = 3\n"
    a = to_csv(run_sweep(parse_config(text)))
    b = to_csv(run_sweep(parse_config(text), workers=2))
    assert a == b
    c = to_csv(run_sweep(parse_config(text.replace("seed = 3", "seed = 4"))))
    assert c != a


def test_simulated_columns_bracket_mean():
    rows = run_sweep(parse_config("replications = 3\nmessages = 200"))
    for r in rows:
        assert r.n_reps == 3
        assert r.sim_ci_lo <= r.sim_mean <= r.sim_ci_hi or math.isinf(r.sim_mean)
