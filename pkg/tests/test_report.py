from pathlib import Path

import numpy as np
import pytest

from fuzzylb import build_comparison, emit_report, improvement_pct, mean_improvement

from reference_grid import (
    EXPECTED_MEAN_VS_RAND,
    EXPECTED_MEAN_VS_RR,
    EXPECTED_VS_RAND,
    EXPECTED_VS_RR,
    MEAN_RESPONSES,
    TASK_COUNTS,
    TOLERANCE_PP,
)

GOLDEN = Path(__file__).parent / "golden" / "comparison_report.txt"


def test_improvement_examples():
    assert improvement_pct(2, 1) == 50.0
    assert improvement_pct(16, 11) == 31.25
    assert improvement_pct(7.3, 7.3) == 0.0


def test_improvement_rejects_nonpositive_baseline():
    with pytest.raises(ValueError):
        improvement_pct(0, 1)
    with pytest.raises(ValueError):
        improvement_pct(-3, 1)


def test_improvement_complement_identity():
    rng = np.random.default_rng(8)
    for _ in range(100):
        baseline = float(rng.uniform(0.01, 50))
        fuzzy = float(rng.uniform(0, 50))
        assert improvement_pct(baseline, fuzzy) == pytest.approx(
            100.0 * (1.0 - fuzzy / baseline), rel=1e-12, abs=1e-12
        )


def test_mean_improvement_basics():
    assert mean_improvement([7.0]) == 7.0
    assert mean_improvement([1.0, 2.0, 3.0]) == 2.0
    with pytest.raises(ValueError):
        mean_improvement([])


def test_reference_grid_reproduces_expected_cells():
    table = build_comparison(TASK_COUNTS, MEAN_RESPONSES)
    for got, expected in zip(table.improvements["round_robin"], EXPECTED_VS_RR):
        assert abs(got - expected) < TOLERANCE_PP
    for got, expected in zip(table.improvements["randomize"], EXPECTED_VS_RAND):
        assert abs(got - expected) < TOLERANCE_PP


def test_reference_grid_reproduces_expected_means():
    table = build_comparison(TASK_COUNTS, MEAN_RESPONSES)
    assert abs(table.mean_improvements["round_robin"] - EXPECTED_MEAN_VS_RR) < TOLERANCE_PP
    assert abs(table.mean_improvements["randomize"] - EXPECTED_MEAN_VS_RAND) < TOLERANCE_PP


def test_build_comparison_rejects_ragged_input():
    with pytest.raises(ValueError):
        build_comparison((2, 4), {"fuzzy": (1.0,)})


def test_single_cell_csv_is_two_lines():
    table = build_comparison((4,), {"fuzzy": (1.5,)})
    lines = emit_report(table, format="csv").splitlines()
    assert len(lines) == 2
    assert lines[0] == "task_count,policy,mean_response,improvement_vs_rr,improvement_vs_rand"
    assert lines[1] == "4,fuzzy,1.500000,,"


def test_csv_shape_and_ordering():
    table = build_comparison(TASK_COUNTS, MEAN_RESPONSES)
    lines = emit_report(table, format="csv").splitlines()
    assert len(lines) == 1 + 15
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == [str(c) for c in TASK_COUNTS for _ in range(3)]
    assert [r[1] for r in rows[:3]] == ["fuzzy", "randomize", "round_robin"]
    # the fuzzy rows carry the reference improvement cells
    fuzzy_rows = [r for r in rows if r[1] == "fuzzy"]
    assert [float(r[3]) for r in fuzzy_rows] == [50.0, 33.3, 33.3, 22.2, 15.4]
    assert [float(r[4]) for r in fuzzy_rows] == [66.7, 50.0, 42.9, 36.4, 31.2]


def test_report_deterministic_bytes():
    table = build_comparison(TASK_COUNTS, MEAN_RESPONSES)
    for fmt in ("csv", "table"):
        assert emit_report(table, format=fmt).encode() == emit_report(table, format=fmt).encode()


def test_unknown_format_rejected():
    table = build_comparison((2,), {"fuzzy": (1.0,)})
    with pytest.raises(ValueError):
        emit_report(table, format="xml")


def test_text_table_matches_golden_file():
    table = build_comparison(TASK_COUNTS, MEAN_RESPONSES)
    assert emit_report(table, format="table") == GOLDEN.read_text()
