import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from closed_forms import n_star, n_tilde, t_between
from model import ModelParams, State
from smdp import (
    boundary_quantities,
    build_smdp,
    build_zero_n_smdp,
    dump_csv,
    state_index,
    zero_n_action_mask,
)
from utils.error_utils import ValidationError


def test_reference_size(reference):
    s = build_smdp(reference)
    assert s.levels == 101
    assert s.n_states == 202
    assert s.P.shape == (202, 2, 202)


def test_interior_row(reference):
    s = build_smdp(reference)
    moves = dict(s.transitions(State(3, 1), 1))
    assert moves == {State(4, 1): pytest.approx(0.4), State(2, 1): pytest.approx(0.6)}
    z = state_index(3, 0)
    assert s.tau[z, 1] == pytest.approx(0.2)
    # switching on from (3,0) pays s1 on top of the running and holding cost of the sojourn
    assert s.cost[z, 1] == pytest.approx(100.0 + (3.0 + 100.0) * 0.2)
    assert s.cost[z, 0] == pytest.approx(3.0 * 0.5)
    assert s.cost[state_index(3, 1), 0] == pytest.approx(100.0 + 3.0 * 0.5)


def test_boundary_rows(reference):
    s = build_smdp(reference)
    top = s.levels - 1
    for delta in (0, 1):
        assert dict(s.transitions(State(top, delta), 0)) == {State(top, 1): 1.0}
        moves = dict(s.transitions(State(top, delta), 1))
        out = reference.lam + top * reference.mu
        assert moves[State(top, 1)] == pytest.approx(reference.lam / out)
        assert moves[State(top - 1, 1)] == pytest.approx(top * reference.mu / out)
    T_top = t_between(reference, top)
    assert s.tau[state_index(top, 0), 0] == pytest.approx(1.0 / reference.lam + T_top)


def test_visit_counts(reference):
    bq = boundary_quantities(reference)
    assert bq.top == 100
    assert bq.m[0] == 1.0
    assert bq.m[1] == pytest.approx(2.0 / 102.0 * 103.0 / 101.0, rel=1e-14)
    assert bq.m[1] == pytest.approx(0.019996, abs=1e-6)
    assert not bq.m.flags.writeable


@pytest.mark.parametrize("kw", [
    {},
    {"lam": 30.0, "c": 5.0},
    {"lam": 0.3, "c": 12.0, "h": 2.0},
    {"lam": 8.0, "mu": 0.5, "c": 2.0},
])
def test_boundary_identities(reference, kw):
    p = reference.replace(**kw)
    s = build_smdp(p)
    bq = s.boundary
    top = bq.top
    out = p.lam + top * p.mu
    z = state_index(top, 1)
    # expected excursion time two ways
    assert bq.excursion_time == pytest.approx(s.tau[z, 1], rel=1e-8)
    # loop cost = first sojourn + lambda/out times the excursion cost
    assert bq.C_loop == pytest.approx((p.h * top + p.c) / out + p.lam / out * bq.C_excursion, rel=1e-8)
    assert s.cost[z, 1] == pytest.approx(bq.C_loop)
    assert s.cost[state_index(top, 0), 1] == pytest.approx(p.s1 + bq.C_loop)
    off = p.h * top / p.lam + p.s1 + bq.C_excursion
    assert s.cost[state_index(top, 0), 0] == pytest.approx(off)
    assert s.cost[z, 0] == pytest.approx(p.s0 + off)


def test_visit_counts_grow_below_rho():
    # n* = 3 while rho = 30: the counts rise before they decay
    p = ModelParams(lam=30.0, mu=1.0, h=1.0, c=2.0, s0=1.0, s1=1.0)
    bq = boundary_quantities(p)
    assert bq.m.max() > 1.0
    assert len(bq.m) > 30


@given(lam=st.floats(min_value=0.1, max_value=20.0), mu=st.floats(min_value=0.2, max_value=5.0),
       h=st.floats(min_value=0.2, max_value=5.0), c=st.floats(min_value=0.1, max_value=30.0),
       s0=st.floats(min_value=0.0, max_value=50.0), s1=st.floats(min_value=0.1, max_value=50.0))
@settings(max_examples=40, deadline=None)
def test_rows_are_stochastic(lam, mu, h, c, s0, s1):
    s = build_smdp(ModelParams(lam=lam, mu=mu, h=h, c=c, s0=s0, s1=s1))
    assert np.all(np.abs(s.P.sum(axis=2) - 1.0) <= 1e-12)
    assert np.all(s.tau > 0)
    assert np.all(s.P >= 0)


def test_single_level_instance():
    p = ModelParams(lam=1.0, mu=1.0, h=1.0, c=0.5, s0=0.1, s1=0.1)
    assert n_star(p) == 1
    s = build_smdp(p)
    assert s.n_states == 2
    assert dict(s.transitions(State(0, 1), 1)) == {State(0, 1): 1.0}
    assert dict(s.transitions(State(0, 0), 0)) == {State(0, 1): 1.0}
    assert np.all(s.tau > 0)


def test_interior_rows_do_not_depend_on_levels(reference):
    small = build_smdp(reference.replace(c=10.0))
    large = build_smdp(reference.replace(c=20.0))
    shared = 2 * (small.levels - 1)
    np.testing.assert_array_equal(small.P[:shared, :, :shared], large.P[:shared, :, :shared])
    np.testing.assert_array_equal(small.tau[:shared], large.tau[:shared])


def test_explicit_levels_and_restriction(reference):
    s = build_smdp(reference, levels=10)
    assert s.levels == 10
    only_on = np.zeros((20, 2), dtype=bool)
    only_on[:, 1] = True
    r = s.restricted(only_on)
    assert not r.allowed[:, 0].any()
    assert s.allowed.all()
    with pytest.raises(ValidationError):
        s.restricted(np.zeros((20, 2), dtype=bool))
    with pytest.raises(ValidationError):
        build_smdp(reference, levels=0)


def test_instance_is_frozen(reference):
    s = build_smdp(reference, levels=5)
    with pytest.raises(ValueError):
        s.P[0, 0, 0] = 0.5


def test_zero_n_instance(reference):
    s = build_zero_n_smdp(reference)
    assert s.levels == n_tilde(reference)
    mask = zero_n_action_mask(s.levels)
    np.testing.assert_array_equal(s.allowed, mask)
    assert mask[state_index(0, 1)].tolist() == [True, False]
    assert mask[state_index(5, 1)].tolist() == [False, True]
    assert mask[state_index(5, 0)].tolist() == [True, True]


def test_dump_csv(reference):
    s = build_smdp(reference, levels=4)
    buffer = io.StringIO()
    rows = dump_csv(s, buffer)
    header, *records = list(csv.reader(io.StringIO(buffer.getvalue())))
    assert header == ["state", "action", "next_state", "prob", "tau", "cost"]
    assert len(records) == rows
    assert any(r[:3] == ["(3,1)", "1", "(3,1)"] for r in records)
    assert all(float(r[3]) > 0 for r in records)
