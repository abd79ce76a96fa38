import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contrastive_vc.core import (
    DEFAULT_CONFIG,
    EQUAL,
    KNEGATIVE,
    QUADRUPLET,
    TRIPLET,
    HypothesisClass,
    QuerySet,
    Status,
    induced_labels,
)
from contrastive_vc.errors import BranchCapExceeded, CapExceeded, UnsupportedCombination
from contrastive_vc.realizability import (
    constraints,
    realize,
    realize_arbitrary,
    realize_class_partition,
    realize_line,
    realize_tree,
)
from oracles import line_grid_realizable, partition_realizable, ranking_realizable
from strategies import random_instance, random_query

C, R, P, T = 0, 1, 2, 3
CYCLE = QuerySet(4, ((C, R, P), (C, P, T), (C, T, R)))


def test_cycle_is_unsat_with_certificate():
    v = realize_arbitrary(CYCLE, (0, 0, 0))
    assert v.status == Status.UNSAT
    assert v.certificate.pairs == ((C, R), (C, P), (C, T))


def test_single_label_witness_values():
    qs = QuerySet(4, ((C, R, P),))
    v = realize_arbitrary(qs, (0,))
    vals = v.witness.values
    n_pairs = 6
    assert vals[C][R] == n_pairs + 1 and vals[C][P] == n_pairs + 2
    others = sorted(vals[u][w] for u in range(4) for w in range(u + 1, 4) if (u, w) not in ((C, R), (C, P)))
    assert others == list(range(n_pairs + 3, 2 * n_pairs + 1))


def test_path_family_all_labelings_metric():
    n = 5
    qs = QuerySet(n, tuple((i, j, j + 1) for i in range(n) for j in range(i + 1, n - 1)))
    for bits in range(2 ** len(qs)):
        labels = tuple((bits >> i) & 1 for i in range(len(qs)))
        v = realize(qs, labels, HypothesisClass.metric())
        assert v.sat and v.witness.is_metric()


def test_class_partition_examples():
    v = realize_class_partition(QuerySet(3, ((0, 1, 2),)), (0,))
    assert v.witness.classes == (0, 0, 1)
    v = realize_class_partition(QuerySet(3, ((0, 1, 2), (1, 2, 0))), (0, 0))
    assert v.status == Status.UNSAT
    assert v.certificate.different == (0, 2)
    v = realize_class_partition(QuerySet(4, ((0, 1, 2), (0, 1, 3))), (EQUAL, 0))
    assert v.witness.classes == (0, 0, 0, 1)


def test_class_partition_pads_to_two_classes():
    v = realize_class_partition(QuerySet(3, ((0, 1, 2),)), (EQUAL,))
    assert v.witness.n_classes >= 2


def test_branch_cap():
    qs = QuerySet(6, ((0, 1, 2), (3, 4, 5), (1, 2, 3)))
    cfg = DEFAULT_CONFIG.__class__(branch_cap=4)
    with pytest.raises(BranchCapExceeded):
        realize_class_partition(qs, (EQUAL, EQUAL, EQUAL), cfg)


def test_line_examples():
    v = realize_line(QuerySet(3, ((1, 0, 2),)), (0,))
    assert [p[0] for p in v.witness.points] == [0, 1, 3]
    assert realize_line(QuerySet(3, ((1, 0, 2), (1, 2, 0))), (0, 0)).status == Status.UNSAT
    assert realize_line(CYCLE, (0, 0, 0)).status == Status.UNSAT
    with pytest.raises(CapExceeded):
        realize_line(QuerySet(9, ()), ())


def test_tree_examples():
    v = realize_tree(QuerySet(4, ()), ())
    assert v.sat and v.witness.n_vertices == 5
    assert all(w == 1 for _, _, w in v.witness.edges)
    quartet = QuerySet(4, ((0, 1, 2), (0, 1, 3), (2, 3, 0), (2, 3, 1)))
    v = realize_tree(quartet, (0, 0, 0, 0))
    assert v.sat and v.witness.n_vertices == 6
    # the internal edge separates {0, 1} from {2, 3}
    t = v.witness
    assert t.distance(0, 1) < t.distance(0, 2) and t.distance(2, 3) < t.distance(1, 3)
    assert realize_tree(CYCLE, (0, 0, 0)).status == Status.UNSAT


def test_numeric_examples():
    from contrastive_vc.shattering import construct_lp
    c = construct_lp(4, 2, 2)
    for bits in range(4):
        labels = ((bits >> 1) & 1, bits & 1)
        assert realize(c.queries, labels, HypothesisClass.lp(2, 2)).sat
    assert realize(QuerySet(4, ()), (), HypothesisClass.lp(2, 2)).sat
    cfg = DEFAULT_CONFIG.__class__(restarts=3)
    assert realize(CYCLE, (0, 0, 0), HypothesisClass.lp(2, 2), cfg).status == Status.UNKNOWN


def test_numeric_separated_and_cosine():
    qs = QuerySet(4, ((0, 1, 2), (1, 2, 3)))
    v = realize(qs, (0, 1), HypothesisClass.separated_l2(2, 0.5))
    assert v.sat
    w = v.witness
    for (close, far) in constraints(qs, (0, 1)):
        assert w.distance(*far) > 1.5 * w.distance(*close)
    v = realize(qs, (1, 0), HypothesisClass.cosine(2))
    assert v.sat and v.witness.metric == "cosine"


def test_dispatch_errors():
    qs = QuerySet(4, ((0, 1, 2, 3),), QUADRUPLET)
    with pytest.raises(UnsupportedCombination):
        realize(qs, (0,), HypothesisClass.class_partition())
    with pytest.raises(UnsupportedCombination):
        realize(QuerySet(3, ()), (), HypothesisClass.lp(3, 2), exact_odd_p=True)


def test_exact_l1_matches_line_in_one_dimension():
    from contrastive_vc.realizability import realize_l1_exact
    rng = random.Random(5)
    for _ in range(40):
        qs, labels = random_instance(rng, n_max=4, m_max=4, kinds=(TRIPLET,))
        assert realize_l1_exact(qs, labels, 1).status == realize_line(qs, labels).status


def test_exact_l1_in_two_dimensions_beats_line():
    qs = QuerySet(4, ((0, 1, 2), (0, 2, 3), (1, 0, 3), (2, 0, 3), (1, 3, 2)))
    labels = (1, 1, 1, 1, 0)
    assert realize_line(qs, labels).status == Status.UNSAT
    v = realize(qs, labels, HypothesisClass.lp(1, 2), exact_odd_p=True)
    assert v.sat and induced_labels(v.witness, qs) == labels
    # no distance at all satisfies a comparison cycle
    assert realize(CYCLE, (0, 0, 0), HypothesisClass.lp(1, 2), exact_odd_p=True).status == Status.UNSAT


def test_arbitrary_matches_ranking_oracle():
    rng = random.Random(11)
    for _ in range(300):
        qs, labels = random_instance(rng)
        assert realize_arbitrary(qs, labels).sat == ranking_realizable(qs, labels)


def test_class_partition_matches_set_partition_oracle():
    rng = random.Random(12)
    for _ in range(300):
        qs, labels = random_instance(rng, n_max=6, m_max=5, kinds=(TRIPLET,), equal_prob=0.3)
        assert realize_class_partition(qs, labels).sat == partition_realizable(qs, labels)


def test_line_grid_hits_are_sat():
    rng = random.Random(13)
    for _ in range(150):
        qs, labels = random_instance(rng, n_max=4, m_max=4)
        if line_grid_realizable(qs, labels):
            assert realize_line(qs, labels).sat


@st.composite
def instances(draw, kinds=(TRIPLET, QUADRUPLET), n_max=5):
    seed = draw(st.integers(0, 2 ** 32))
    return random_instance(random.Random(seed), n_max=n_max, m_max=5, kinds=kinds)


@given(instances(n_max=5))
@settings(max_examples=60, deadline=None)
def test_line_sat_implies_tree_sat(inst):
    qs, labels = inst
    if realize_line(qs, labels).sat:
        assert realize_tree(qs, labels).sat


@given(instances(), st.integers(0, 2 ** 32))
@settings(max_examples=80, deadline=None)
def test_monotonicity(inst, seed):
    qs, labels = inst
    rng = random.Random(seed)
    for hclass in (HypothesisClass.arbitrary(), HypothesisClass.lp(1, 1)):
        v = realize(qs, labels, hclass)
        if v.sat and len(qs):
            drop = rng.randrange(len(qs))
            keep = [i for i in range(len(qs)) if i != drop]
            assert realize(qs.subset(keep), tuple(labels[i] for i in keep), hclass).sat
        elif not v.sat:
            extra = random_query(rng, qs.n, qs.kind)
            if extra not in qs.queries:
                bigger = qs.extended(extra)
                assert not realize(bigger, labels + (0,), hclass).sat


@given(instances())
@settings(max_examples=80, deadline=None)
def test_sat_witness_reproduces_labels(inst):
    qs, labels = inst
    for hclass in (HypothesisClass.metric(), HypothesisClass.lp(3, 1), HypothesisClass.tree()):
        v = realize(qs, labels, hclass)
        if v.sat:
            assert induced_labels(v.witness, qs) == labels


@given(instances(kinds=(TRIPLET,), n_max=4))
@settings(max_examples=25, deadline=None)
def test_numeric_sat_implies_arbitrary_sat(inst):
    qs, labels = inst
    cfg = DEFAULT_CONFIG.__class__(restarts=2)
    if realize(qs, labels, HypothesisClass.lp(2, 2), cfg).sat:
        assert realize_arbitrary(qs, labels).sat


def test_knegative_lowering():
    qs = QuerySet(4, ((0, 1, 2, 3),), KNEGATIVE, k=2)
    low = QuerySet(4, ((0, 1, 2), (0, 1, 3)))
    for h in (HypothesisClass.arbitrary(), HypothesisClass.lp(1, 1), HypothesisClass.class_partition()):
        assert realize(qs, (0,), h).status == realize(low, (0, 0), h).status


def test_quadruplet_shared_point_matches_triplet():
    quad = QuerySet(3, ((0, 1, 0, 2),), QUADRUPLET)
    tri = QuerySet(3, ((0, 1, 2),))
    for lab in (0, 1):
        assert realize(quad, (lab,), HypothesisClass.metric()).status == \
            realize(tri, (lab,), HypothesisClass.metric()).status


@pytest.mark.parametrize("workers", [1, 3])
def test_line_witness_independent_of_workers(workers):
    qs = QuerySet(5, ((0, 1, 2), (1, 3, 4), (2, 4, 0), (3, 0, 1)))
    v = realize_line(qs, (1, 0, 0, 1), workers=workers)
    assert v.witness.points == realize_line(qs, (1, 0, 0, 1), workers=1).witness.points


def test_line_witness_is_rational():
    v = realize_line(QuerySet(4, ((0, 1, 2), (3, 2, 1))), (0, 1))
    assert all(isinstance(p[0], (int, Fraction)) for p in v.witness.points)
