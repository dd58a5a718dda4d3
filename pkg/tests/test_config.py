import os

import pytest

from dgale.config import ConfigError, RunConfig, _parse_n, load_config
from dgale.problems import get_problem


def test_defaults_resolve_from_the_problem(monkeypatch):
    monkeypatch.delenv("DGALE_OUTPUT_ROOT", raising=False)
    cfg = RunConfig(problem="sine-wave").resolve()
    assert cfg.n == 40
    assert cfg.degree == 1
    assert cfg.cfl == 0.3
    assert cfg.t_final == 0.5
    assert cfg.mesh_mode == "ale-mm"
    assert cfg.tau == 0.1
    assert cfg.beta == (1.0, 1.0, 0.0)
    assert cfg.eos is get_problem("sine-wave").eos
    assert cfg.directory == os.path.join("out", "sine-wave")
    assert cfg.formats == ("csv",)
    assert cfg.interval == 0.0


def test_degree_two_gets_the_smaller_cfl():
    cfg = RunConfig(problem="sine-wave", degree=2).resolve()
    assert cfg.cfl == 0.15


def test_shock_bubble_defaults_carry_their_beta():
    cfg = RunConfig(problem="shock-bubble").resolve()
    assert cfg.beta == (1.0, 1.0, 1.0)
    assert cfg.n == (70, 60)


def test_scalar_n_on_a_2d_problem_becomes_square():
    cfg = RunConfig(problem="sine-wave-2d", n=12).resolve()
    assert cfg.n == (12, 12)


@pytest.mark.parametrize("bad", [
    dict(degree=3),
    dict(mesh_mode="alemm"),
    dict(cfl=-0.1),
    dict(cfl=float("nan")),
    dict(t_final=-1.0),
    dict(tau=0.0),
    dict(beta=(1.0, 1.0)),
    dict(beta=(1.0, -2.0, 0.0)),
    dict(formats=("csv", "hdf5")),
    dict(n=(10, 10)),                   # tuple resolution on a 1D problem
])
def test_invalid_settings_raise(bad):
    with pytest.raises(ConfigError):
        RunConfig(problem="sine-wave", **bad).resolve()


def test_parse_n_forms():
    assert _parse_n("40") == 40
    assert _parse_n("20x10") == (20, 10)
    assert _parse_n("20X10") == (20, 10)
    with pytest.raises(ConfigError):
        _parse_n("3x4x5")
    with pytest.raises(ValueError):
        _parse_n("forty")


def _write(tmp_path, text):
    p = tmp_path / "run.ini"
    p.write_text(text)
    return str(p)


def test_load_config_full_file(tmp_path):
    path = _write(tmp_path, """
[run]
problem = interface
n = 200
degree = 2
cfl = 0.12          # inline comment
mesh_mode = lagrangian
beta = 1 0.5 0
m_tvb = 4.0

[eos]
gamma1 = 1.6

[output]
directory = results/iface
interval = 0.25
formats = csv vtk
""")
    cfg = load_config(path)
    assert cfg.problem == "interface"
    assert cfg.n == 200
    assert cfg.degree == 2
    assert cfg.cfl == 0.12
    assert cfg.mesh_mode == "lagrangian"
    assert cfg.beta == (1.0, 0.5, 0.0)
    assert cfg.m_tvb == 4.0
    # eos section overrides gamma1, keeps the problem's other constants
    base = get_problem("interface").eos
    assert cfg.eos.gamma1 == 1.6
    assert cfg.eos.B1 == base.B1
    assert cfg.eos.gamma2 == base.gamma2
    assert cfg.directory == "results/iface"
    assert cfg.interval == 0.25
    assert cfg.formats == ("csv", "vtk")


def test_load_config_minimal(tmp_path):
    cfg = load_config(_write(tmp_path, "[run]\nproblem = sine-wave\n"))
    assert cfg.problem == "sine-wave"
    assert cfg.n is None
    cfg = cfg.resolve()
    assert cfg.n == 40


@pytest.mark.parametrize("text", [
    "[run]\nproblem = sine-wave\nwavelength = 3\n",   # unknown key
    "[solver]\nproblem = sine-wave\n",                # unknown section
    "[run]\nn = 40\n",                                # missing problem
    "[run]\nproblem = sine-wave\ndegree = two\n",     # bad int
    "[run]\nproblem = sine-wave\nbeta = 1 1\n",       # short beta
])
def test_load_config_rejects(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, text))


def test_missing_file_raises():
    with pytest.raises(ConfigError):
        load_config("/no/such/file.ini")


def test_output_root_env_prefixes_relative_dirs(tmp_path, monkeypatch):
    monkeypatch.setenv("DGALE_OUTPUT_ROOT", str(tmp_path))
    cfg = RunConfig(problem="sine-wave").resolve()
    assert cfg.directory.startswith(str(tmp_path))
    # absolute paths are left alone
    cfg = RunConfig(problem="sine-wave", directory="/abs/path").resolve()
    assert cfg.directory == "/abs/path"


def test_resolve_is_idempotent():
    cfg = RunConfig(problem="gas-liquid", degree=2).resolve()
    again = cfg.resolve()
    assert again == cfg
