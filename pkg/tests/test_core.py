from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contrastive_vc.core import (
    EQUAL,
    KNEGATIVE,
    QUADRUPLET,
    CycleCertificate,
    EmbeddingModel,
    FeasibilityVerdict,
    HypothesisClass,
    MatrixModel,
    PartitionModel,
    QueryFile,
    QuerySet,
    Status,
    TreeModel,
    evaluate_label,
    induced_labels,
    label_margin,
    model_from_dict,
    validate_labels,
)
from contrastive_vc.errors import TieError, ValidationError


def test_queryset_rejects_bad_input():
    with pytest.raises(ValidationError):
        QuerySet(3, ((0, 1, 3),))
    with pytest.raises(ValidationError):
        QuerySet(3, ((0, 0, 1),))
    with pytest.raises(ValidationError):
        QuerySet(3, ((0, 1, 2), (0, 1, 2)))
    with pytest.raises(ValidationError):
        QuerySet(4, ((0, 1, 1, 0),), QUADRUPLET)
    with pytest.raises(ValidationError):
        QuerySet(4, ((0, 1, 2),), KNEGATIVE)
    with pytest.raises(ValidationError):
        QuerySet(4, ((0, 1, 2),), "pairs")
    assert len(QuerySet(3, ((0, 1, 2), (0, 1, 2)), allow_duplicates=True)) == 2


def test_quadruplet_may_share_a_point():
    qs = QuerySet(3, ((0, 1, 0, 2),), QUADRUPLET)
    assert qs.pairs(qs.queries[0]) == [(0, 1), (0, 2)]


def test_label_validation():
    qs = QuerySet(4, ((0, 1, 2, 3),), KNEGATIVE, k=2)
    assert validate_labels(qs, [2]) == (2,)
    with pytest.raises(ValidationError):
        validate_labels(qs, [3])
    with pytest.raises(ValidationError):
        validate_labels(qs, [EQUAL], allow_equal=True)
    tri = QuerySet(3, ((0, 1, 2),))
    with pytest.raises(ValidationError):
        validate_labels(tri, [EQUAL])
    assert validate_labels(tri, [EQUAL], allow_equal=True) == (EQUAL,)
    with pytest.raises(ValidationError):
        validate_labels(tri, [0, 1])


def test_hypothesis_class_round_trip_and_validation():
    for h in (HypothesisClass.arbitrary(), HypothesisClass.metric(), HypothesisClass.lp(3, 2),
              HypothesisClass.cosine(4), HypothesisClass.tree(), HypothesisClass.class_partition(),
              HypothesisClass.separated_l2(3, 0.25)):
        assert HypothesisClass.from_dict(h.to_dict()) == h
    with pytest.raises(ValidationError):
        HypothesisClass("lp", p=2)
    with pytest.raises(ValidationError):
        HypothesisClass.separated_l2(2, 1.5)
    with pytest.raises(ValidationError):
        HypothesisClass.from_dict({"variant": "tree", "colour": 1})


def test_triplet_labels_and_ties():
    m = MatrixModel(((0, 1, 2), (1, 0, 3), (2, 3, 0)))
    assert evaluate_label(m, (0, 1, 2)) == 0
    assert evaluate_label(m, (0, 2, 1)) == 1
    tie = MatrixModel(((0, 1, 1), (1, 0, 3), (1, 3, 0)))
    with pytest.raises(TieError):
        evaluate_label(tie, (0, 1, 2))


def test_partition_returns_equal_label_on_tie():
    m = PartitionModel((0, 0, 0, 1))
    assert evaluate_label(m, (0, 1, 2)) == EQUAL
    assert evaluate_label(m, (0, 1, 3)) == 0
    assert evaluate_label(m, (0, 3, 1)) == 1


def test_knegative_label_and_tie_only_at_minimum():
    pts = EmbeddingModel(((0,), (1,), (5,), (5,)), p=1)
    # candidates 2 and 3 tie but not at the minimum
    assert evaluate_label(pts, (0, 2, 1, 3), KNEGATIVE) == 1
    tied_min = EmbeddingModel(((0,), (1,), (1,), (5,)), p=1)
    with pytest.raises(TieError):
        evaluate_label(tied_min, (0, 1, 2, 3), KNEGATIVE)


def test_quadruplet_label():
    m = EmbeddingModel(((0,), (1,), (3,), (7,)), p=1)
    assert evaluate_label(m, (0, 1, 2, 3), QUADRUPLET) == 0
    assert evaluate_label(m, (2, 3, 0, 2), QUADRUPLET) == 1


def test_exact_cosine_matches_float():
    rng = np.random.default_rng(3)
    for _ in range(200):
        ints = rng.integers(-5, 6, size=(3, 3))
        if (np.abs(ints).sum(axis=1) == 0).any():
            continue
        exact = EmbeddingModel(tuple(map(tuple, ints.tolist())), metric="cosine")
        flt = EmbeddingModel(tuple(map(tuple, ints.astype(float).tolist())), metric="cosine")
        try:
            e = evaluate_label(exact, (0, 1, 2))
        except TieError:
            continue
        try:
            f = evaluate_label(flt, (0, 1, 2), tol=1e-12)
        except TieError:
            continue
        assert e == f


def test_tree_model_distances():
    t = TreeModel(5, ((0, 4, 1), (1, 4, 2), (2, 4, 3), (3, 4, Fraction(1, 2))), (0, 1, 2, 3))
    assert t.distance(0, 1) == 3
    assert t.distance(2, 3) == Fraction(7, 2)
    with pytest.raises(ValidationError):
        TreeModel(3, ((0, 1, 1), (1, 2, 1)), (0, 1))  # 1 is not a leaf


@given(st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=3, max_size=6))
@settings(max_examples=60, deadline=None)
def test_model_dict_round_trip(rows):
    m = EmbeddingModel(tuple(tuple(Fraction(v, 3) for v in r) for r in rows), p=2)
    back = model_from_dict(m.to_dict())
    assert back.points == m.points


def test_label_margin_sign():
    m = EmbeddingModel(((0,), (1,), (3,)), p=1)
    assert label_margin(m, (0, 1, 2), 0) == 2
    assert label_margin(m, (0, 1, 2), 1) == -2


def test_verdict_invariants():
    with pytest.raises(ValidationError):
        FeasibilityVerdict(Status.UNSAT)
    with pytest.raises(ValidationError):
        FeasibilityVerdict(Status.UNKNOWN, certificate=CycleCertificate(((0, 1),)))
    v = FeasibilityVerdict(Status.UNKNOWN)
    assert v.to_dict()["status"] == "UNKNOWN"


def test_query_file_round_trip_and_strictness():
    qf = QueryFile(QuerySet(4, ((0, 1, 2), (1, 2, 3))), HypothesisClass.lp(2, 1), (0, 1))
    back = QueryFile.from_json(qf.to_json())
    assert back == qf
    data = qf.to_dict()
    data["extra"] = 1
    with pytest.raises(ValidationError):
        QueryFile.from_dict(data)
    with pytest.raises(ValidationError):
        QueryFile.from_json("{not json")
    eq = QueryFile.from_dict({"n": 3, "kind": "triplet", "class": {"variant": "class_partition"},
                              "queries": [[0, 1, 2]], "labels": [EQUAL]})
    assert eq.labels == (EQUAL,)


def test_induced_labels_on_matrix():
    m = MatrixModel(((0, 1, 2, 3), (1, 0, 4, 5), (2, 4, 0, 6), (3, 5, 6, 0)))
    qs = QuerySet(4, ((0, 1, 2), (1, 3, 0), (2, 3, 1)))
    assert induced_labels(m, qs) == (0, 1, 1)
