import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvqa import config
from pvqa.errors import ConfigError
from pvqa.harness import build_problem

MINIMAL = "[execution]\nseed = 1\n"


def test_minimal_defaults():
    cfg = config.loads(MINIMAL)
    assert cfg.execution.seed == 1 and cfg.problem.bc == "dirichlet"
    assert cfg.optimizer_seed == 1


def test_optimizer_seed_overrides():
    cfg = config.loads(MINIMAL + "[optimizer]\nseed = 9\n")
    assert cfg.optimizer_seed == 9


@pytest.mark.parametrize("text, match", [
    ("[problem]\nqubits = 2\n", "seed"),
    (MINIMAL + "[problem]\nqbits = 2\n", "unknown key"),
    (MINIMAL + "[solver]\nx = 1\n", "unknown section"),
    (MINIMAL + "[transpile]\noptimization_level = 1\n", "reserved"),
    (MINIMAL + "[problem]\nqubits = 'two'\n", "must be int"),
    (MINIMAL + "[problem]\nqubits = true\n", "must be int"),
    (MINIMAL + "[problem]\nbc = 'robin'\n", "bc"),
    (MINIMAL + "[ansatz]\nfamily = 'mera'\n", "mera"),
    ("[execution]\nseed = 1\nmode = 'fast'\n", "mode"),
    (MINIMAL + "[problem]\nsource = 'missing.txt'\n", "does not exist"),
    (MINIMAL + "[noise]\nprofile = 'uniform-depolarizing'\n", "eps"),
    ("[execution\nseed = 1", "invalid TOML"),
])
def test_rejections(text, match):
    with pytest.raises(ConfigError, match=match):
        config.loads(text)


def test_duplicate_section_in_toml_rejected():
    with pytest.raises(ConfigError):
        config.loads(MINIMAL + "[execution]\nseed = 2\n")


def test_hash_ignores_output_directory_but_not_tags():
    a = config.loads(MINIMAL + "[output]\ndirectory = 'x'\n")
    b = config.loads(MINIMAL + "[output]\ndirectory = 'y'\n")
    c = config.loads(MINIMAL + "[output]\ntags = ['t']\n")
    assert a.config_hash() == b.config_hash() != c.config_hash()
    assert a.config_hash() == config.loads(MINIMAL + "[output]\ndirectory = 'x'\n").config_hash()


def test_hash_tracks_source_file_content(tmp_path):
    src = tmp_path / "f.txt"
    src.write_text("1\n2\n3\n4\n")
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL + "[problem]\nsource = 'f.txt'\n")
    h1 = config.load(path).config_hash()
    src.write_text("1\n2\n3\n5\n")
    assert config.load(path).config_hash() != h1


def test_file_source_is_read_relative_to_config(tmp_path):
    (tmp_path / "f.txt").write_text("1\n2\n3\n4\n")
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL + "[problem]\nsource = 'f.txt'\n")
    prob = build_problem(config.load(path))
    assert np.allclose(prob.source, [1, 2, 3, 4])


def test_periodic_file_source_is_projected(tmp_path, caplog):
    (tmp_path / "f.txt").write_text("1\n2\n3\n4\n")
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL + "[problem]\nbc = 'periodic'\nsource = 'f.txt'\n")
    prob = build_problem(config.load(path))
    assert abs(prob.source.mean()) < 1e-12
    assert "mean zero" in caplog.text


def test_periodic_constant_source_is_a_config_error():
    cfg = config.loads(MINIMAL + "[problem]\nbc = 'periodic'\nsource = 'ones'\n")
    with pytest.raises(ConfigError, match="constant"):
        build_problem(cfg)


configs = st.builds(
    dict,
    problem=st.fixed_dictionaries({
        "qubits": st.integers(1, 6),
        "bc": st.sampled_from(["dirichlet", "neumann", "periodic"]),
        "source": st.sampled_from(["ones", "alternating", "sine"]),
        "grid_spacing": st.floats(0.01, 10),
    }),
    ansatz=st.fixed_dictionaries({"family": st.sampled_from(["hea", "mps", "custom-mps", "ttnpp"]),
                                  "layers": st.integers(1, 4)}),
    optimizer=st.fixed_dictionaries(
        {"method": st.sampled_from(["nelder-mead", "powell"]), "max_evals": st.integers(1, 5000),
         "restarts": st.integers(0, 10), "scale": st.floats(0.01, 20)},
        optional={"seed": st.integers(0, 2**31)}),
    execution=st.fixed_dictionaries({"seed": st.integers(0, 2**31),
                                     "mode": st.sampled_from(["exact", "shots"]),
                                     "shots": st.integers(1, 10**6)}),
    output=st.fixed_dictionaries({"tags": st.lists(st.text(min_size=1, max_size=5), max_size=3)}),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_parse_emit_parse_fixpoint(data):
    cfg = config.from_dict(data)
    text = config.dumps(cfg)
    again = config.loads(text)
    assert again == cfg
    assert config.dumps(again) == text
    assert again.config_hash() == cfg.config_hash()


def test_distinct_configs_distinct_hashes():
    base = config.loads(MINIMAL)
    other = dataclasses.replace(base, execution=dataclasses.replace(base.execution, seed=2))
    assert base.config_hash() != other.config_hash()
