"""Tests for the suite runner: scheduling, validation, and report emission."""

import json

import pytest

from confgeo import cli
from confgeo.cli import ConfigError, SuiteConfig, validate_config
from confgeo.reports import ERROR, FAIL, PASS, SKIPPED, VACUOUS


def _cfg(**kw):
    base = dict(suite="core", dim=2, seeds=(1,), fmt="json")
    base.update(kw)
    return SuiteConfig(**base)


# -- configuration validation ------------------------------------------------

def test_unknown_suite_rejected():
    with pytest.raises(ConfigError, match="unknown suite"):
        validate_config(_cfg(suite="nope"))


def test_empty_seeds_rejected():
    with pytest.raises(ConfigError, match="seeds"):
        validate_config(_cfg(seeds=()))


def test_min_trust_floor():
    with pytest.raises(ConfigError, match="min-trust"):
        validate_config(_cfg(min_trust=0))


def test_excessive_min_trust_is_a_config_error():
    # caught by arithmetic on the schedule, before any check runs
    with pytest.raises(ConfigError, match="insufficient series order"):
        validate_config(_cfg(suite="core", dim=None, min_trust=99))


def test_dimension_outside_suite_rejected():
    with pytest.raises(ConfigError, match="not part of this suite"):
        validate_config(_cfg(suite="variational", dim=5))


def test_unknown_mutation_rejected():
    with pytest.raises(ConfigError, match="unknown mutation"):
        validate_config(_cfg(mutation="scramble-everything"))


def test_cli_exit_code_2_on_config_error(capsys):
    code = cli.main(["run", "--suite", "core", "--min-trust", "99"])
    assert code == 2
    err = capsys.readouterr().err
    assert "insufficient series order" in err


def test_series_order_must_be_positive():
    with pytest.raises(ConfigError, match="series order must be positive"):
        validate_config(_cfg(series_order=0))


# -- schedule shape ----------------------------------------------------------

def test_core_schedule_covers_modes_and_identities():
    jobs = cli.schedule(_cfg(dim=3, seeds=(1, 2)))
    names = sorted({j.name for j in jobs})
    assert "brst-nilpotency" in names
    assert "mode-split" in names
    assert "weyl-vanishes" in names
    per_seed = [j for j in jobs if j.name == "brst-nilpotency" and j.seed == 1]
    assert len(per_seed) == 3  # one per mode


def test_all_suite_unions_the_default_lanes():
    jobs = cli.schedule(_cfg(suite="all", dim=None))
    suites = {j.suite for j in jobs}
    assert suites == set(cli.DEFAULT_SUITES)


def test_extended_schedule_uses_one_seed():
    jobs = cli.schedule(_cfg(suite="extended", dim=None, seeds=(5, 6, 7)))
    assert {j.seed for j in jobs} == {5}
    assert {j.dim for j in jobs} == {6, 7, 8}


def test_mutation_schedule_is_a_single_designated_check():
    for mutation, name in (
        ("flip-sdxi-sign", "brst-nilpotency"),
        ("riemann-for-weyl", "weyl-schouten-descent"),
        ("flip-cotton-sign", "nablaW-cotton"),
        ("perturb-binomial", "euler-density-chain"),
        ("drop-symmetrization", "noether(p=1)"),
    ):
        jobs = cli.schedule(_cfg(suite="core", dim=None, mutation=mutation))
        assert [j.name for j in jobs] == [name]


# -- execution ---------------------------------------------------------------

def test_run_small_suite_passes():
    cfg = _cfg(dim=2, seeds=(1,))
    checks = cli.run_suite(cfg)
    assert checks
    assert all(c["status"] in (PASS, VACUOUS) for c in checks)
    assert cli.exit_code(checks) == 0


def test_checks_sorted_by_suite_name_dim_seed():
    cfg = _cfg(dim=2, seeds=(2, 1))
    checks = cli.run_suite(cfg)
    keys = [(c["suite"], c["name"], c["dim"], c["seed"],
             c["notes"].get("mode", "")) for c in checks]
    assert keys == sorted(keys)


def test_error_status_captures_exceptions():
    cfg = _cfg(dim=2, seeds=(1,))
    jobs = [cli.Job("core", "boom", 2, 1, lambda: 1 / 0)]
    ws = cli._Workspace(cfg)
    out = []
    import unittest.mock as mock
    with mock.patch.object(cli, "schedule", lambda c, w=None: jobs):
        out = cli.run_suite(cfg)
    assert out[0]["status"] == ERROR
    assert "division" in out[0]["notes"]["reason"]
    assert cli.exit_code(out) == 1


def test_budget_skips_remaining_extended_jobs():
    cfg = _cfg(suite="extended", dim=None, seeds=(1,), budget_secs=-1.0)
    checks = cli.run_suite(cfg)
    assert checks
    assert all(c["status"] == SKIPPED for c in checks)
    assert all(c["notes"]["reason"] == "budget exhausted" for c in checks)
    assert cli.exit_code(checks) == 0


# -- emission ----------------------------------------------------------------

def test_json_report_is_byte_identical_across_runs():
    cfg = _cfg(dim=2, seeds=(1,))
    first = cli.emit_report(cli.run_suite(cfg), cfg)
    second = cli.emit_report(cli.run_suite(cfg), cfg)
    assert first == second
    payload = json.loads(first)
    assert payload["version"]
    assert payload["config"]["suite"] == "core"
    for check in payload["checks"]:
        assert set(check) == {"name", "anchor", "dim", "seed", "status",
                              "trust", "residual_terms", "millis", "notes"}
        assert check["millis"] == 0  # timings off by default


def test_timings_flag_breaks_byte_identity_but_keeps_schema():
    cfg = _cfg(dim=2, seeds=(1,), timings=True)
    payload = json.loads(cli.emit_report(cli.run_suite(cfg), cfg))
    assert any(c["millis"] >= 0 for c in payload["checks"])


def test_text_report_one_line_per_check():
    cfg = _cfg(dim=2, seeds=(1,), fmt="text")
    checks = cli.run_suite(cfg)
    lines = cli.emit_report(checks, cfg).strip().split("\n")
    assert len(lines) == len(checks)
    assert all(line.split()[0] in (PASS, VACUOUS) for line in lines)


def test_cli_run_exit_zero(capsys):
    code = cli.main(["run", "--suite", "core", "--dim", "2", "--seed", "1",
                     "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["checks"]


def test_mutation_run_exits_one(capsys):
    code = cli.main(["run", "--mutation", "perturb-binomial", "--seed", "1"])
    assert code == 1
    out = capsys.readouterr().out
    assert "euler-density-chain" in out
    assert "fail" in out


# -- catalog -----------------------------------------------------------------

def test_list_catalog_names_every_suite():
    catalog = cli.list_suites()
    assert set(catalog) == set(cli.SUITES)
    assert {c["name"] for c in catalog["euler"]["checks"]} >= {
        "euler-density-chain", "euler-constant-fit"}


def test_list_text_output(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "euler" in out
    assert "ghost-gradient chain closes onto the Euler density" in out


def test_list_json_output(capsys):
    assert cli.main(["list", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["variational"]["dims"] == [3]


def test_catalog_anchors_match_emitted_reports():
    # anchors shown by list must not drift from what the checks emit
    cfg = _cfg(suite="variational", dim=3, seeds=(4,), series_order=4,
               min_trust=1)
    emitted = {c["name"]: c["anchor"] for c in cli.run_suite(cfg)}
    catalog = {c["name"]: c["anchor"]
               for c in cli.list_suites()["variational"]["checks"]}
    for name in ("noether(p=1)", "cotton-york-fit"):
        assert emitted[name] == catalog[name]
