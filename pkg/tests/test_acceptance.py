"""Runs the twelve acceptance criteria at their stated tolerances.

One PASS/FAIL line per criterion is printed even under output capture.
"""

import pytest

from pcones.acceptance import CRITERIA, REJECT_ABOVE, load_floors, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.details


def test_floors_are_meaningful():
    floors = load_floors()
    assert floors["config"] == {"restarts": 50, "budget": 20000, "samples": 1000, "seed": 42, "max_condition": 1e3}
    entries = list(floors["selfdual"].values()) + list(floors["iso"].values())
    assert len(entries) == 11
    for entry in entries:
        assert entry["floor"] > REJECT_ABOVE
        assert entry["floor"] == min(entry["restart_violations"])


def test_floor_check_compares_against_the_stored_number():
    from types import SimpleNamespace

    from pcones.acceptance import _floor_check
    from pcones.duality import SearchVerdict

    floors = load_floors()
    floor = floors["selfdual"]["1.5/3"]["floor"]
    seed = floors["config"]["seed"]
    above = SimpleNamespace(best_violation=2 * floor, verdict=SearchVerdict.NO_ISO_FOUND)
    below = SimpleNamespace(best_violation=floor / 2, verdict=SearchVerdict.NO_ISO_FOUND)
    assert _floor_check(above, floor, seed, seed, 1.0)[0]
    # beating the 50-restart floor with fewer restarts would break the prefix argument
    assert not _floor_check(below, floor, seed, seed, 1.0)[0]
    # at other seeds only the rejection threshold applies
    ok, entry = _floor_check(below, floor, seed + 1, seed, 1.0)
    assert ok and not entry["floor_applies"]
