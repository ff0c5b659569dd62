import json

import pytest

from config import DEFAULTS, NumericSettings, default_config_path, get_config_value, load_config_file
from utils.error_utils import ValidationError


def test_defaults():
    assert DEFAULTS.series_rel_tol == 1e-14
    assert DEFAULTS.series_abs_floor == 1e-30
    assert DEFAULTS.support_threshold == 1e-9
    assert DEFAULTS.stall_threshold == 50
    assert DEFAULTS.truncation_margin == 40


def test_settings_overrides_and_unknown_keys():
    settings = NumericSettings.from_mapping({"support_threshold": 1e-10, "stall_threshold": 20.0, "lambda": 2})
    assert settings.support_threshold == 1e-10
    assert settings.stall_threshold == 20
    assert isinstance(settings.stall_threshold, int)
    assert settings.series_rel_tol == DEFAULTS.series_rel_tol


@pytest.mark.parametrize("key, value", [
    ("support_threshold", "small"),
    ("stall_threshold", 2.5),
    ("truncation_margin", 0),
    ("feasibility_tol", True),
])
def test_settings_reject_bad_values(key, value):
    with pytest.raises(ValidationError) as info:
        NumericSettings.from_mapping({key: value})
    assert info.value.field == key


def test_settings_base_is_kept():
    base = NumericSettings.from_mapping({"truncation_margin": 60})
    settings = NumericSettings.from_mapping({"sensitivity_tol": 1e-7}, base=base)
    assert settings.truncation_margin == 60
    assert settings.sensitivity_tol == 1e-7


def test_load_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"lambda": 2, "mu": 1}), encoding="utf-8")
    assert load_config_file(str(path)) == {"lambda": 2, "mu": 1}
    assert load_config_file(None) == {}


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ValidationError):
        load_config_file(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValidationError) as info:
        load_config_file(str(broken))
    assert "broken.json" in str(info.value)
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_config_file(str(listing))


def test_config_value_precedence(monkeypatch):
    flags = {"mu": None, "h": 3.0}
    file_doc = {"mu": 2.0, "h": 1.0}
    monkeypatch.setenv("CAPSWITCH_MU", "9")
    monkeypatch.setenv("CAPSWITCH_C", "7")
    assert get_config_value("h", flags, file_doc) == 3.0
    assert get_config_value("mu", flags, file_doc) == 2.0
    assert get_config_value("c", flags, file_doc) == "7"
    assert get_config_value("s0", flags, file_doc) is None


def test_default_config_path(monkeypatch):
    assert default_config_path() is None
    monkeypatch.setenv("CAPSWITCH_CONFIG", "/etc/capswitch.json")
    assert default_config_path() == "/etc/capswitch.json"
    monkeypatch.setenv("CAPSWITCH_CONFIG", "${HOME}/run.json")
    assert default_config_path() is None
