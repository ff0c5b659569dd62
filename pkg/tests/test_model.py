import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from model import (
    Action,
    FullServicePolicy,
    MNPolicy,
    ModelParams,
    State,
    TablePolicy,
    parse_policy,
    policy_action,
    validate_params,
)
from utils.error_utils import ValidationError


def test_reference_instance_is_valid(reference):
    assert validate_params(reference) is reference
    assert reference.rho == 2.0


@pytest.mark.parametrize("changes, field", [
    ({"s0": 0.0, "s1": 0.0}, "s0"),
    ({"lambda": 0.0}, "lambda"),
    ({"mu": -1.0}, "mu"),
    ({"h": 0.0}, "h"),
    ({"c": 0.0}, "c"),
    ({"s1": -0.5}, "s1"),
    ({"c": math.inf}, "c"),
])
def test_validate_names_the_field(reference, changes, field):
    with pytest.raises(ValidationError) as info:
        reference.replace(**changes)
    assert info.value.field == field


def test_zero_switching_costs_rejected():
    with pytest.raises(ValidationError) as info:
        validate_params(ModelParams(lam=1.0, mu=1.0, h=1.0, c=1.0, s0=0.0, s1=0.0))
    assert info.value.field == "s0"


def test_from_mapping_round_trip(reference):
    assert ModelParams.from_mapping(reference.to_dict()) == reference


def test_from_mapping_missing_key(reference):
    data = reference.to_dict()
    del data["mu"]
    with pytest.raises(ValidationError) as info:
        ModelParams.from_mapping(data)
    assert info.value.field == "mu"


def test_from_mapping_rejects_text(reference):
    data = reference.to_dict()
    data["h"] = "cheap"
    with pytest.raises(ValidationError) as info:
        ModelParams.from_mapping(data)
    assert info.value.field == "h"


def test_replace_accepts_flat_keys(reference):
    changed = reference.replace(**{"lambda": 3.0})
    assert changed.lam == 3.0
    assert changed.rho == 3.0
    with pytest.raises(ValidationError):
        reference.replace(rho=4.0)


@pytest.mark.parametrize("state, expected", [
    (State(4, 1), Action.OFF),
    (State(5, 1), Action.ON),
    (State(38, 0), Action.OFF),
    (State(39, 0), Action.ON),
])
def test_mn_policy_actions(state, expected):
    assert policy_action(MNPolicy(4, 39), state) == expected


def test_full_service_never_switches_off():
    pol = FullServicePolicy(3)
    assert policy_action(pol, State(0, 1)) == Action.ON
    assert policy_action(pol, State(2, 0)) == Action.OFF
    assert policy_action(pol, State(3, 0)) == Action.ON


@given(M=st.integers(min_value=0, max_value=30), gap=st.integers(min_value=1, max_value=30))
def test_mn_rule_everywhere(M, gap):
    N = M + gap
    pol = MNPolicy(M, N)
    for i in range(N + 11):
        assert pol.decide(i, 1) == (0 if i <= M else 1)
        assert pol.decide(i, 0) == (0 if i < N else 1)


@given(M=st.integers(min_value=0, max_value=20), gap=st.integers(min_value=1, max_value=20),
       extra=st.integers(min_value=0, max_value=10))
def test_action_table_matches_decide(M, gap, extra):
    pol = MNPolicy(M, M + gap)
    levels = M + gap + extra + 1
    table = pol.action_table(levels)
    assert table.dtype == np.int8
    assert table.shape == (levels, 2)
    for i in range(levels):
        assert table[i, 0] == pol.decide(i, 0)
        assert table[i, 1] == pol.decide(i, 1)


@given(n=st.integers(min_value=0, max_value=50))
def test_full_service_table_all_on_when_running(n):
    table = FullServicePolicy(n).action_table(n + 5)
    assert table[:, 1].all()


def test_mn_invariants():
    with pytest.raises(ValidationError):
        MNPolicy(5, 5)
    with pytest.raises(ValidationError):
        MNPolicy(-1, 3)


def test_table_policy_tail_is_all_on():
    pol = TablePolicy(actions=((0, 0), (0, 1), (1, 1)), cutoff_level=2)
    assert pol.decide(1, 0) == 0
    assert pol.decide(2, 0) == 1
    assert pol.decide(50, 0) == 1
    assert pol.cutoff == 2
    with pytest.raises(ValidationError):
        TablePolicy(actions=((0, 2),), cutoff_level=1)


def test_regeneration_states():
    assert MNPolicy(4, 39).regeneration_state() == State(39, 0)
    assert FullServicePolicy(2).regeneration_state() == State(0, 1)
    switching = TablePolicy(actions=((0, 0), (0, 0), (0, 1), (0, 1)), cutoff_level=4)
    assert switching.regeneration_state() == State(4, 0)
    early_on = TablePolicy(actions=((0, 0), (0, 1), (1, 1), (0, 1)), cutoff_level=4)
    assert early_on.regeneration_state() == State(2, 0)
    always_on = TablePolicy(actions=((0, 1), (1, 1)), cutoff_level=2)
    assert always_on.regeneration_state() == State(0, 1)


def test_state_validation():
    with pytest.raises(ValidationError):
        State(-1, 0)
    with pytest.raises(ValidationError):
        State(0, 2)
    assert str(State(3, 1)) == "(3,1)"


@pytest.mark.parametrize("text, expected", [
    ("mn:4,39", MNPolicy(4, 39)),
    (" MN:0,47 ", MNPolicy(0, 47)),
    ("full:3", FullServicePolicy(3)),
    ("full", FullServicePolicy(0)),
])
def test_parse_policy(text, expected):
    assert parse_policy(text) == expected


@pytest.mark.parametrize("text", ["", "mn:4", "mn:a,b", "mn:5,5", "table:3", "full:x"])
def test_parse_policy_rejects(text):
    with pytest.raises(ValidationError) as info:
        parse_policy(text)
    assert info.value.field == "policy"


def test_label_round_trip():
    for pol in (MNPolicy(2, 9), FullServicePolicy(4)):
        assert parse_policy(pol.label()) == pol
