import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synclift.correlations import (
    CorrelationTable,
    check_table,
    correlation_from_rep,
    gram_psd_check,
    pipeline_correlations,
    table_distance,
)
from synclift.corpus import mub_rep
from synclift.exceptions import InvalidRep, ShapeMismatch
from synclift.lift import ApproxRepSequence
from synclift.player import PlayerRep, TraceSpec, block_direct_sum, deterministic_rep, random_rep

from conftest import brute_trace_product


@pytest.mark.parametrize("f", [(0, 1), (1, 1), (2, 0, 1)])
def test_deterministic_table(f):
    X, A = len(f), 3
    t = correlation_from_rep(deterministic_rep(list(f), X, A))
    for a, b, x, y in itertools.product(range(A), range(A), range(X), range(X)):
        assert t[a, b, x, y] == (1.0 if (a, b) == (f[x], f[y]) else 0.0)


def test_computational_basis_single_question():
    rep = PlayerRep(np.array([[np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]]))
    t = correlation_from_rep(rep)
    np.testing.assert_allclose(t.values[:, :, 0, 0], np.eye(2) / 2, atol=1e-15)


def test_mub_cross_question_uniform():
    t = correlation_from_rep(mub_rep())
    np.testing.assert_allclose(t.values[:, :, 0, 1], np.full((2, 2), 0.25), atol=1e-15)
    np.testing.assert_allclose(t.values[:, :, 1, 1], np.eye(2) / 2, atol=1e-15)


def test_invalid_rep_rejected():
    rep = random_rep(3, 2, 2, 1)
    pvms = rep.pvms.copy()
    pvms[0, 0] *= 0.9
    with pytest.raises(InvalidRep):
        correlation_from_rep(PlayerRep(pvms))


def _corpus():
    for dim in (1, 2, 3, 5, 8):
        for X in (1, 2, 3):
            for A in (1, 2, 3):
                if A <= dim:
                    yield random_rep(dim, X, A, 1000 * dim + 10 * X + A)


@pytest.mark.parametrize("rep", list(_corpus()), ids=lambda r: f"d{r.dim}x{r.questions}a{r.answers}")
def test_table_invariants(rep):
    t = correlation_from_rep(rep)
    report = check_table(t, 1e-10)
    assert report.valid, report
    assert report.symmetry_defect <= 1e-10
    assert gram_psd_check(rep).min_eigenvalue >= -1e-9


def test_brute_force_oracle_agreement():
    for dim in (1, 2, 3):
        for X in (1, 2, 3):
            for A in range(1, dim + 1):
                rep = random_rep(dim, X, A, 7 * dim + X + A)
                t = correlation_from_rep(rep)
                for a, b, x, y in itertools.product(range(A), range(A), range(X), range(X)):
                    expected = brute_trace_product(rep.pvms[x, a], rep.pvms[y, b]).real
                    assert abs(t[a, b, x, y] - expected) <= 1e-12


def test_convexity_of_block_traces():
    r1, r2 = random_rep(3, 2, 2, 5), random_rep(2, 2, 2, 6)
    for w in (0.0, 0.3, 0.75, 1.0):
        joint = correlation_from_rep(block_direct_sum([r1, r2]), TraceSpec((3, 2), (w, 1 - w)))
        mix = w * correlation_from_rep(r1).values + (1 - w) * correlation_from_rep(r2).values
        np.testing.assert_allclose(joint.values, mix, atol=1e-10)


def test_check_table_planted_sync_violation():
    v = np.zeros((2, 2, 1, 1))
    v[0, 0, 0, 0], v[0, 1, 0, 0] = 0.9, 0.1
    assert check_table(CorrelationTable(v)).max_synchronicity_defect == pytest.approx(0.1)


def test_uniform_table_from_maximally_mixed_rep():
    # oracle: dim-A representation with the same computational basis PVM for every question
    A, X = 3, 2
    basis = np.array([np.diag(np.eye(A)[a]) for a in range(A)])
    rep = PlayerRep(np.array([basis] * X))
    t = correlation_from_rep(rep)
    assert check_table(t).valid
    # the 1/A^2 table is valid as a table (it is the correlation of independent uniform answers)
    uniform = CorrelationTable(np.full((A, A, X, X), 1 / A**2))
    r = check_table(uniform)
    assert r.max_negativity == 0 and r.max_normalization_defect <= 1e-15 and r.symmetry_defect == 0


def test_gram_deterministic():
    g = gram_psd_check(deterministic_rep([0, 1], 2, 2))
    assert g.psd
    assert set(np.unique(g.matrix.real)) <= {0.0, 1.0}


def test_gram_flags_planted_non_gram_moments():
    # a non-Hermitian "measurement" with e @ e = -1: a finding, not an exception
    e = np.array([[0.0, 1.0], [-1.0, 0.0]])
    g = gram_psd_check(PlayerRep(e[None, None]))
    assert g.min_eigenvalue == pytest.approx(-1.0)
    assert not g.psd


def test_distance_examples():
    p = CorrelationTable(np.full((2, 2, 1, 1), 0.25))
    assert table_distance(p, p) == 0.0
    q_vals = p.values.copy()
    q_vals[0, 1, 0, 0] += 0.25
    q = CorrelationTable(q_vals)
    assert table_distance(p, q, "sup") == 0.25
    assert table_distance(p, q, "l1") == 0.25
    with pytest.raises(ShapeMismatch):
        table_distance(p, CorrelationTable(np.zeros((3, 3, 1, 1))))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), metric=st.sampled_from(["sup", "l1"]))
def test_distance_is_metric(seed, metric):
    rng = np.random.default_rng(seed)
    p, q, r = (CorrelationTable(rng.uniform(size=(2, 2, 3, 3))) for _ in range(3))
    assert table_distance(p, q, metric) == table_distance(q, p, metric)
    assert table_distance(p, r, metric) <= table_distance(p, q, metric) + table_distance(q, r, metric) + 1e-12


def test_pipeline_constant_exact():
    rep = random_rep(4, 2, 2, 7)
    seq = ApproxRepSequence([rep.pvms] * 3, 2, 2)
    report = pipeline_correlations(seq, correlation_from_rep(rep))
    assert report.per_index_distance == pytest.approx([0.0] * 3, abs=1e-12)
    assert report.status == ["ok"] * 3


def test_pipeline_shrinking_eps_converges():
    rep = random_rep(4, 2, 2, 7)
    seq = ApproxRepSequence.from_perturbations(rep, [2.0**-n for n in range(1, 13)], 100)
    report = pipeline_correlations(seq, correlation_from_rep(rep))
    assert report.final_distance <= 1e-3
    for d, b in zip(report.per_index_distance, report.certified_bound):
        assert d <= b


def test_pipeline_constant_eps_does_not_decay():
    rep = random_rep(4, 2, 2, 7)
    seq = ApproxRepSequence.from_perturbations(rep, [0.1] * 6, 3)
    report = pipeline_correlations(seq, correlation_from_rep(rep))
    assert all(st == "ok" for st in report.status)
    assert min(report.per_index_distance) > 1e-4
    assert max(report.per_index_distance) < 0.5


def test_pipeline_shape_mismatch():
    seq = ApproxRepSequence([random_rep(2, 2, 2, 0).pvms], 2, 2)
    with pytest.raises(ShapeMismatch):
        pipeline_correlations(seq, CorrelationTable(np.zeros((2, 2, 3, 3))))
