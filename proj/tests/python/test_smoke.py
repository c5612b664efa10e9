import pytest

import labelcov

POWER, POWER_HARNESS = labelcov.benchmark_source("power")


def test_benchmarks_listed():
    names = labelcov.benchmark_names()
    assert "power" in names and "search" in names


def test_run_power():
    assert labelcov.run(POWER, {"X": 2, "N": 10}) == {
        "outcome": "returned",
        "value": 1024,
        "steps": labelcov.run(POWER, {"X": 2, "N": 10})["steps"],
    }
    big = labelcov.run(POWER, {"X": 10, "N": 30})
    assert big["value"] == 10**30


def test_labels_and_annotation():
    labels = labelcov.labels(POWER, "DC")
    assert [l["id"] for l in labels] == [1, 2, 3, 4]
    assert labelcov.annotate(POWER, "DC").count("// label ") == 4


def test_instrument_modes():
    assert "__assert" in labelcov.instrument(POWER, "DC", "tight")
    assert "__covered" in labelcov.instrument(POWER, "DC", "optim")


def test_explore_power_bfs():
    harness = "X -10 10\nN 0 10\n"
    r = labelcov.explore(POWER, harness, strategy="bfs")
    assert r["paths_complete"] == 11
    ns = sorted(t["inputs"]["N"] for t in r["tests"])
    assert len(ns) == 3 and ns[0] == 0


def test_cover_reaches_all_decisions():
    r = labelcov.cover(POWER, "DC", POWER_HARNESS)
    assert (r["covered"], r["total"]) == (4, 4)
    assert r["report"].endswith("#coverage 4/4\n")
    assert all(t["kind"] != "rte" for t in r["kept"])


def test_bench_rows():
    rows = labelcov.bench(["search"], ["MCC"], ["ignore", "optim"])
    by_mode = {r["mode"]: r for r in rows}
    assert by_mode["optim"]["covered"] > by_mode["ignore"]["covered"]


def test_errors_carry_kind():
    with pytest.raises(labelcov.LabelcovError) as e:
        labelcov.annotate("int f(int x) { return x +; }", "DC")
    assert e.value.kind == "SyntaxError"
    with pytest.raises(labelcov.LabelcovError) as e:
        labelcov.annotate(POWER, "XYZ")
    assert e.value.kind == "UnsupportedCriterion"
