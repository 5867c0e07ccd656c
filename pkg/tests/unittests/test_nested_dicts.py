import pytest

from rectiforge.common.config.utils import (
    get_nested,
    set_nested,
    flatten,
    dotted_to_keys,
    unflatten_dotted,
    merge_nested,
)


@pytest.fixture
def d():
    return {
        "hb": {
            "harmonics": 8,
            "tolerances": {
                "abs": 1e-12,
                "rel": 1e-9,
            },
        },
        "media": {"stub mode": "bessel"},
    }


def test_get_nested(d):
    assert get_nested(d, ["hb", "harmonics"]) == 8
    assert get_nested(d, ["hb", "tolerances", "rel"]) == 1e-9

    assert get_nested(d, ["hb", "new"], create=True) == {}
    assert get_nested(d, ["hb", "new"]) == {}

    with pytest.raises(KeyError):
        get_nested(d, ["hb", "missing"])


def test_set_nested(d):
    set_nested(d, ["hb", "harmonics"], 12)
    assert d["hb"]["harmonics"] == 12

    set_nested(d, ["transient", "max periods"], 100)
    assert d["transient"]["max periods"] == 100


def test_flatten(d):
    assert flatten(d) == {
        "hb - harmonics": 8,
        "hb - tolerances - abs": 1e-12,
        "hb - tolerances - rel": 1e-9,
        "media - stub mode": "bessel",
    }

    # Nodes of type "dict" are leaves themselves
    assert flatten(
        d,
        leaf_criterium=lambda keys, node: (
            not isinstance(node, dict) or tuple(keys) == ("hb", "tolerances")
        ),
    ) == {
        "hb - harmonics": 8,
        "hb - tolerances": {"abs": 1e-12, "rel": 1e-9},
        "media - stub mode": "bessel",
    }


def test_dotted_keys():
    assert dotted_to_keys("hb.max_iterations") == ["hb", "max iterations"]
    assert dotted_to_keys("media.stub_mode") == ["media", "stub mode"]
    assert unflatten_dotted({"hb.harmonics": "12", "hb.step_limit": "0.05"}) == {
        "hb": {"harmonics": "12", "step limit": "0.05"}
    }


def test_merge_nested(d):
    merged = merge_nested(d, {"hb": {"harmonics": 4}, "dc": {"source steps": 5}})
    assert merged["hb"]["harmonics"] == 4
    assert merged["hb"]["tolerances"]["abs"] == 1e-12
    assert merged["dc"]["source steps"] == 5
    # The base is left untouched
    assert d["hb"]["harmonics"] == 8
    assert "dc" not in d
