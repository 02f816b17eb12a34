import json
import pathlib

import pytest

import hamsim

ROOT = pathlib.Path(__file__).resolve().parents[2]


def test_version():
    assert hamsim.__version__.count(".") == 2


def test_hamiltonian_scalars():
    h = hamsim.hamiltonian(13, 1.0, 1)
    assert h["terms"] == 52
    assert h["alpha"] == pytest.approx(39 + sum(abs(x) for x in h["h"]))
    assert hamsim.hamiltonian(13, 1.0, 1)["h"] == h["h"]


def test_segment_counts():
    assert hamsim.pf_segments(13, order=4, bound="commutator") == 23268
    assert hamsim.pf_segments(13, order=1, bound="analytic") == 1242189557
    assert hamsim.qsp_segments(13) == 147
    assert hamsim.qsp_qubits(50) == 67
    assert hamsim.qsp_success_lb(1e-3) == pytest.approx(0.998)


def test_t_estimate():
    assert hamsim.t_estimate(0, 1e-3, 10) == 70
    assert hamsim.t_estimate(7562113, 1e-3) == pytest.approx(924482148, rel=0.01)


def test_estimate_report():
    rep = hamsim.estimate("pf", 13, order=4, bound="commutator")
    assert rep["counts_pre"]["CNOT"] == 18149040
    assert rep["qubits"] == 13
    assert rep["t_estimate"]["label"] == "ESTIMATE"
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "docs" / "report.schema.json").read_text())
    jsonschema.validate(rep, schema)


def test_placeholder_flags():
    rep = hamsim.estimate("qsp", 5, seeds=2)
    assert rep["functional"] is False
    assert rep["seeds"] == [1, 2]
    with pytest.raises(hamsim.PlaceholderAngles):
        hamsim.synth("qsp", 5)


def test_usage_errors():
    with pytest.raises(ValueError):
        hamsim.estimate("pf", 13, order=6, bound="commutator")


def test_synth_optimize_round_trip():
    text = hamsim.synth("pf", 4, order=2, t=1.0)
    before = hamsim.count_gates(text)
    after = hamsim.count_gates(hamsim.optimize(text))
    assert after["qubits"] == before["qubits"] == 4
    assert after["TOTAL"] < before["TOTAL"]


def test_sweep():
    rows = hamsim.sweep({"cells": [{"algorithm": "pf", "order": 4, "bound": "commutator", "n": [13, 16]}]})
    assert [r["counts_pre"]["CNOT"] for r in rows] == [18149040, 36402240]
    assert hamsim.sweep({"cells": [{"algorithm": "pf", "n": []}]}) == []
