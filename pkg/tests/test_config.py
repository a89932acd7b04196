import json

import pytest

from glwb.config import DEFAULT_CONFIG_PATH, create_workbench_config, load_config
from glwb.exceptions import ConfigurationError
from glwb.schemas import DEFAULT_AFRAK_MEMBERS


def test_defaults(config):
    assert config.semantics.state_cap == 10
    assert config.translate.context_budget == 729
    assert config.proof.afrak_schema_ids() == DEFAULT_AFRAK_MEMBERS
    assert config.logging.level == "INFO"


def test_packaged_defaults_validate():
    assert DEFAULT_CONFIG_PATH.exists()
    config = create_workbench_config(load_config())
    assert config.campaign.max_in_flight == 16


def test_default_file_matches_model_defaults():
    assert create_workbench_config(load_config()) == create_workbench_config({})


def test_evaluator_options(config):
    options = config.semantics.evaluator_options()
    assert options == {"cap": 10, "budget": 65536, "fast_path": True, "check_monotone": False}


@pytest.mark.parametrize("data", [
    {"logging": {"level": "chatty"}},
    {"semantics": {"state_cap": 0}},
    {"proof": {"afrak_members": ["SAsab", "Nope"]}},
    {"campaign": {"workers": "many"}},
])
def test_invalid_values(data):
    with pytest.raises(ConfigurationError):
        create_workbench_config(data)


def test_level_is_normalized():
    assert create_workbench_config({"logging": {"level": "debug"}}).logging.level == "DEBUG"


class TestLoad:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.yaml")

    def test_yaml(self, tmp_path):
        path = tmp_path / "settings.yml"
        path.write_text("campaign:\n  seed: 42\n", encoding="utf-8")
        assert create_workbench_config(load_config(path)).campaign.seed == 42

    def test_json(self, tmp_path):
        path = tmp_path / "settings.json"
        path.write_text(json.dumps({"translate": {"eliminate_bekic": True}}), encoding="utf-8")
        assert create_workbench_config(load_config(path)).translate.eliminate_bekic

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config(path) == {}

    @pytest.mark.parametrize("name,text", [
        ("settings.toml", "seed = 1\n"),
        ("broken.yaml", "campaign: [unclosed\n"),
        ("list.yaml", "- one\n- two\n"),
    ])
    def test_unreadable(self, tmp_path, name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config(path)
