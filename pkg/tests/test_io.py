import json

import numpy as np
import pytest

from qpinsker import io
from qpinsker.qkd import build_key_ensemble
from qpinsker.states import Ensemble, random_mixed


def test_operator_round_trip(tmp_path):
    rho = random_mixed(3, 11)
    path = tmp_path / "op.json"
    io.dump(io.operator_to_doc(rho, dims=None), path)
    loaded = io.load(path)
    assert loaded.kind == "operator"
    assert np.array_equal(loaded.value.matrix, rho.matrix)


def test_bipartite_dims_field(bell):
    loaded = io.parse_document(io.operator_to_doc(bell, dims=(2, 2)))
    assert loaded.dims == (2, 2)


def test_ensemble_round_trip():
    e = Ensemble([0.25, 0.75], [random_mixed(2, 1), random_mixed(2, 2)])
    back = io.doc_to_ensemble(io.ensemble_to_doc(e))
    assert np.array_equal(back.p, e.p)
    for a, b in zip(back.states, e.states):
        assert np.array_equal(a.matrix, b.matrix)


def test_key_ensemble_round_trip(ket0, ketplus):
    k = build_key_ensemble([ket0, ketplus], key_bits=1)
    doc = io.key_ensemble_to_doc(k)
    assert doc["key_bits"] == 1
    back = io.doc_to_key_ensemble(doc)
    assert back.m == 2 and back.key_bits == 1 and back.is_uniform
    doc = {"states": doc["states"], "probs": "uniform"}
    assert io.doc_to_key_ensemble(doc).is_uniform


def test_distribution_documents():
    assert io.parse_document(io.dist_to_doc([0.5, 0.5])).kind == "probs"
    loaded = io.parse_document(io.dist_to_doc(np.full((2, 2), 0.25)))
    assert loaded.kind == "joint" and loaded.value.shape == (2, 2)


@pytest.mark.parametrize("text", [
    '{"probs": [NaN, 1.0]}',
    '{"probs": [Infinity, 0]}',
    '{"dim": 1, "matrix": [[[-Infinity, 0]]]}',
])
def test_non_finite_rejected(text):
    with pytest.raises(io.DocumentError):
        io.parse_document(io.loads(text))


@pytest.mark.parametrize("doc", [
    {"dim": 2, "matrix": [[[1, 0]]]},
    {"dim": 0, "matrix": []},
    {"dim": 1, "matrix": [[[1, 0, 0]]]},
    {"dim": 1, "matrix": [[["1", 0]]]},
    {"probs": "half"},
    {"joint": []},
    {"something": 1},
    [1, 2],
    {"states": [{"dim": 1, "matrix": [[[1, 0]]]}], "key_bits": -1},
])
def test_malformed_documents(doc):
    with pytest.raises(io.DocumentError):
        if isinstance(doc, dict) and "key_bits" in doc:
            io.doc_to_key_ensemble(doc)
        else:
            io.parse_document(doc)


def test_malformed_json():
    with pytest.raises(io.DocumentError):
        io.loads("{not json")


def test_dump_is_json(tmp_path):
    path = tmp_path / "d.json"
    io.dump({"probs": [1.0]}, path)
    assert json.loads(path.read_text()) == {"probs": [1.0]}
