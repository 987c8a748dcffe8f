"""Tolerance bands and global top-z% membership per field."""
from __future__ import annotations

import math

import numpy as np
import pytest

from readscale.corpus import PublicationRecord
from readscale.topz import sigma_z, top_membership, top_share_report
from conftest import make_records


def test_sigma_z_exact_two_equal_fields():
    assert sigma_z(10.0, [100, 100]) == pytest.approx(3.0, abs=1e-12)


def test_sigma_z_symmetric_about_fifty():
    sizes = [60, 120, 300]
    for z in (1, 7, 23, 49.5):
        assert sigma_z(z, sizes) == pytest.approx(sigma_z(100 - z, sizes), abs=1e-12)


def test_sigma_z_scaling_with_field_sizes():
    sizes = [77, 140, 260, 300]
    doubled = [2 * n for n in sizes]
    assert sigma_z(15.0, doubled) == pytest.approx(sigma_z(15.0, sizes) / math.sqrt(2), abs=1e-12)


def test_sigma_z_formula_direct():
    z, sizes = 12.5, [50, 80, 200]
    expected = math.sqrt(z * (100 - z) / 3 * (1 / 50 + 1 / 80 + 1 / 200))
    assert sigma_z(z, sizes) == pytest.approx(expected, abs=1e-15)


def test_sigma_z_validation():
    with pytest.raises(ValueError):
        sigma_z(0.0, [10])
    with pytest.raises(ValueError):
        sigma_z(100.0, [10])
    with pytest.raises(ValueError):
        sigma_z(10.0, [])
    with pytest.raises(ValueError):
        sigma_z(10.0, [10, 0])


def test_top_membership_floor_rule():
    records = make_records(range(10, 0, -1), "A", 2010)  # reads 10..1
    assert top_membership(records, z=10) == {"a-0000"}
    assert top_membership(records, z=25) == {"a-0000", "a-0001"}  # floor(2.5) = 2
    assert top_membership(records, z=39.9) == {"a-0000", "a-0001", "a-0002"}


def test_top_membership_empty_selection_warns(caplog):
    records = make_records([5, 4, 3], "A", 2010)
    with caplog.at_level("WARNING"):
        selected = top_membership(records, z=10)  # floor(0.3) = 0
    assert selected == set()
    assert "selects nothing" in caplog.text


def test_tie_break_is_deterministic_by_id():
    records = [
        PublicationRecord("idC", "A", 2010, 5),
        PublicationRecord("idA", "A", 2010, 5),
        PublicationRecord("idB", "A", 2010, 3),
    ]
    assert top_membership(records, z=34) == {"idA"}  # k=1, lowest id among the tied
    assert top_membership(records, z=34, tie_rule="threshold") == {"idA", "idC"}


def test_threshold_rule_superset_of_rank_rule():
    rng = np.random.default_rng(41)
    records = make_records(rng.integers(0, 12, size=60).tolist(), "A", 2010)
    for z in (5, 10, 20, 50):
        rank_set = top_membership(records, z=z)
        thr_set = top_membership(records, z=z, tie_rule="threshold")
        assert rank_set <= thr_set


def test_top_membership_validation():
    records = make_records([3, 2, 1], "A", 2010)
    with pytest.raises(ValueError):
        top_membership(records, z=0)
    with pytest.raises(ValueError):
        top_membership(records, z=100)
    with pytest.raises(ValueError):
        top_membership(records, value_selector="log")
    with pytest.raises(ValueError):
        top_membership(records, tie_rule="coinflip")
    with pytest.raises(ValueError):
        top_membership([], z=10)


def test_share_report_hand_case():
    records = make_records([10, 9, 8, 1, 1], "A", 2010, prefix="a") + make_records(
        [7, 6, 2, 1, 1], "B", 2010, prefix="b"
    )
    report = top_share_report(records, z=20.0)
    assert report.n_c == 2 and report.n_i == {"A": 5, "B": 5}
    # global top-2 by reads is {10, 9}, both in field A
    assert report.per_field_share == {"A": 40.0, "B": 0.0}
    assert report.sigma_z == pytest.approx(math.sqrt(20 * 80 / 2 * (2 / 5)), abs=1e-12)


def test_shares_account_for_every_selected_record():
    rng = np.random.default_rng(13)
    records = []
    for i, n in enumerate((40, 90, 160)):
        records += make_records(
            rng.integers(0, 500, size=n).tolist(), f"F{i}", 2010, prefix=f"f{i}"
        )
    for z in (5, 10, 20):
        report = top_share_report(records, z=z)
        selected = top_membership(records, z=z)
        total = sum(report.per_field_share[f] * report.n_i[f] / 100.0 for f in report.n_i)
        assert total == pytest.approx(len(selected), abs=1e-9)


def test_extreme_concentration_fails_tolerance():
    records = make_records([1000 + i for i in range(10)], "Hot", 2010, prefix="h")
    records += make_records([1] * 90, "Cold", 2010, prefix="c")
    report = top_share_report(records, z=10.0)
    assert report.per_field_share["Hot"] == 100.0
    assert report.per_field_share["Cold"] == 0.0
    assert report.within_tolerance == 0


def test_identical_fields_sit_inside_the_band():
    # two fields with the same counts: each holds exactly z% of the top
    counts = list(range(1, 101))
    records = make_records(counts, "A", 2010, prefix="a") + make_records(
        counts, "B", 2010, prefix="b"
    )
    for z in (5, 10, 20):
        report = top_share_report(records, z=float(z), variant="rescaled")
        assert report.within_tolerance == 2


def test_rescaled_variant_normalizes_intensity_differences():
    rng = np.random.default_rng(29)
    base = rng.lognormal(0.0, 1.0, 150)
    records = []
    for i, scale in enumerate((1.0, 9.0, 40.0)):
        vals = base * scale  # identical shape, very different means
        records += [
            PublicationRecord(f"s{i}-{j:03d}", f"F{i}", 2010, float(v))
            for j, v in enumerate(vals)
        ]
    for z in (5, 10, 20):
        original = top_share_report(records, z=float(z), variant="original")
        rescaled = top_share_report(records, z=float(z), variant="rescaled")
        assert rescaled.within_tolerance == 3
        assert original.within_tolerance < 3


def test_per_field_rescaling_invariance_of_membership():
    rng = np.random.default_rng(61)
    records = []
    for i in range(4):
        vals = rng.lognormal(1.0 + 0.5 * i, 1.0, 80)
        records += [
            PublicationRecord(f"g{i}-{j:03d}", f"F{i}", 2010, float(v))
            for j, v in enumerate(vals)
        ]
    base = top_membership(records, "rescaled", z=10)
    boosted = [
        PublicationRecord(r.id, r.field, r.year, r.reads * 7.0 if r.field == "F2" else r.reads)
        for r in records
    ]
    assert top_membership(boosted, "rescaled", z=10) == base


def test_share_report_needs_two_fields():
    records = make_records([5, 3, 2], "Solo", 2010)
    with pytest.raises(ValueError):
        top_share_report(records, z=10.0)
