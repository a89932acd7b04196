import json

import pytest

from glwb.campaigns import (
    PROPERTIES, CampaignProperty, CampaignRunner, Mismatch, get_property, run_campaign,
)
from glwb.config import create_workbench_config
from glwb.exceptions import CampaignError, CapExceeded


def small_config(**campaign):
    settings = {"formulas": 4, "structures": 2, "formula_size": 6, "states": 2, "workers": 2,
                "max_in_flight": 2, **campaign}
    return create_workbench_config({"campaign": settings})


@pytest.fixture
def runner():
    return CampaignRunner(small_config())


def test_every_property_is_described():
    assert "poison-agreement" in PROPERTIES
    assert all(prop.description for prop in PROPERTIES.values())


def test_unknown_property():
    with pytest.raises(CampaignError):
        get_property("no-such-property")


@pytest.mark.parametrize("name", [
    "empty-context-agreement", "duality", "parse-print", "normal-form", "correct-sharp",
    "correct-ctx", "poison-agreement",
])
async def test_properties_hold(runner, name):
    report = await runner.run(name, count=4, seed=3)
    assert report.ok, report.first_failure
    assert report.passed + report.skipped == 4


async def test_same_seed_same_results(runner):
    first = await runner.run("duality", count=6, seed=11)
    second = await runner.run("duality", count=6, seed=11)
    assert first.results() == second.results()


async def test_needs_a_task(runner):
    with pytest.raises(CampaignError):
        await runner.run("duality", count=0)


async def test_failures_and_skips_are_counted(runner, monkeypatch):
    def check(ctx):
        if ctx.index == 1:
            raise CapExceeded("too many states")
        if ctx.index >= 2:
            ctx.subject = f"task {ctx.index}"
            raise Mismatch("truth sets differ")

    monkeypatch.setitem(PROPERTIES, "flaky", CampaignProperty("flaky", "test property", check))
    report = await runner.run("flaky", count=4)
    assert (report.passed, report.skipped, report.failed) == (1, 1, 2)
    assert not report.ok
    assert report.first_failure == {"task": 2, "subject": "task 2", "detail": "truth sets differ"}
    assert report.metrics["counters"]["flaky.tasks"] == 4
    assert report.metrics["gauges"]["flaky.workers"] == 2


async def test_report_is_exported(tmp_path):
    path = tmp_path / "duality.json"
    runner = CampaignRunner(small_config(report_path=str(path)))
    report = await runner.run("duality", count=2)
    written = json.loads(path.read_text(encoding="utf-8"))
    assert written["property"] == "duality"
    assert written["ok"] == report.ok


def test_synchronous_entry_point():
    report = run_campaign("parse-print", small_config(), count=2, seed=1)
    assert report.tasks == 2
    assert report.seed == 1
