"""Run configuration: flat INI-style files with strict key checking.

Sections: [run] for solver choices, [eos] to override the problem's
material constants, [output] for artifact placement.  Any key or section
not named below is an error, as is a malformed value.  Omitted entries
fall back to per-problem defaults at resolution time.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, replace

import numpy as np

from .eos import MixtureEOS
from .problems import get_problem

MESH_MODES = ("eulerian", "lagrangian", "ale-mm")

_RUN_KEYS = {"problem", "n", "degree", "cfl", "t_final", "mesh_mode",
             "tau", "beta", "m_tvb"}
_EOS_KEYS = {"gamma1", "b1", "gamma2", "b2"}
_OUTPUT_KEYS = {"directory", "interval", "formats"}


class ConfigError(ValueError):
    """Raised for unknown keys, bad values, or inconsistent settings."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    n: object = None            # int (1D) or (nx, ny)
    degree: int = 1
    cfl: float = None           # None: 0.3 for degree 1, 0.15 for degree 2
    t_final: float = None
    mesh_mode: str = "ale-mm"
    tau: float = None
    beta: tuple = None
    m_tvb: float = 10.0
    eos: MixtureEOS = None
    directory: str = None
    interval: float = 0.0       # snapshot spacing in time; 0 writes only the ends
    formats: tuple = ("csv",)

    def resolve(self) -> "RunConfig":
        """Fill unset fields from the problem's defaults and validate."""
        pb = get_problem(self.problem)
        out = self
        if out.n is None:
            out = replace(out, n=pb.default_n)
        if out.degree not in (1, 2):
            raise ConfigError(f"degree must be 1 or 2, got {out.degree}")
        if out.cfl is None:
            out = replace(out, cfl=0.3 if out.degree == 1 else 0.15)
        if out.t_final is None:
            out = replace(out, t_final=pb.t_final)
        if out.mesh_mode not in MESH_MODES:
            raise ConfigError(f"mesh_mode must be one of {MESH_MODES}, got {out.mesh_mode!r}")
        if out.tau is None:
            out = replace(out, tau=pb.tau)
        if out.beta is None:
            out = replace(out, beta=pb.beta)
        if out.eos is None:
            out = replace(out, eos=pb.eos)
        if out.directory is None:
            out = replace(out, directory=os.path.join("out", self.problem))
        root = os.environ.get("DGALE_OUTPUT_ROOT")
        if root and not os.path.isabs(out.directory):
            out = replace(out, directory=os.path.join(root, out.directory))
        for label, value in (("cfl", out.cfl), ("t_final", out.t_final),
                             ("tau", out.tau), ("m_tvb", out.m_tvb),
                             ("interval", out.interval)):
            v = float(value)
            if not np.isfinite(v):
                raise ConfigError(f"{label} must be finite, got {value}")
        if out.cfl <= 0 or out.tau <= 0:
            raise ConfigError("cfl and tau must be positive")
        if out.t_final < 0:
            raise ConfigError("t_final must be nonnegative")
        if len(out.beta) != 3 or not all(np.isfinite(b) and b >= 0 for b in out.beta):
            raise ConfigError(f"beta needs three nonnegative entries, got {out.beta}")
        for f in out.formats:
            if f not in ("csv", "vtk"):
                raise ConfigError(f"unknown output format {f!r}")
        pbdim = pb.dim
        if pbdim == 1 and np.iterable(out.n):
            raise ConfigError("1D problem takes a single cell count")
        if pbdim == 2 and not np.iterable(out.n):
            out = replace(out, n=(int(out.n), int(out.n)))
        return out


def _parse_n(text: str):
    parts = text.lower().replace("×", "x").split("x")
    if len(parts) == 1:
        return int(parts[0])
    if len(parts) == 2:
        return (int(parts[0]), int(parts[1]))
    raise ConfigError(f"cannot parse resolution {text!r}")


def _parse_beta(text: str) -> tuple:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ConfigError(f"beta needs three numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def load_config(path: str) -> RunConfig:
    """Parse a config file into an unresolved RunConfig."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    allowed = {"run": _RUN_KEYS, "eos": _EOS_KEYS, "output": _OUTPUT_KEYS}
    for section in cp.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in allowed[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    if "run" not in cp or "problem" not in cp["run"]:
        raise ConfigError("config needs a [run] section with a problem key")

    run = cp["run"]
    try:
        kwargs = dict(problem=run["problem"].strip())
        if "n" in run:
            kwargs["n"] = _parse_n(run["n"])
        if "degree" in run:
            kwargs["degree"] = int(run["degree"])
        for key in ("cfl", "t_final", "tau", "m_tvb"):
            if key in run:
                kwargs[key] = float(run[key])
        if "mesh_mode" in run:
            kwargs["mesh_mode"] = run["mesh_mode"].strip()
        if "beta" in run:
            kwargs["beta"] = _parse_beta(run["beta"])
        if "eos" in cp:
            sec = cp["eos"]
            base = get_problem(kwargs["problem"]).eos
            kwargs["eos"] = MixtureEOS(
                float(sec.get("gamma1", base.gamma1)),
                float(sec.get("b1", base.B1)),
                float(sec.get("gamma2", base.gamma2)),
                float(sec.get("b2", base.B2)),
            )
        if "output" in cp:
            sec = cp["output"]
            if "directory" in sec:
                kwargs["directory"] = sec["directory"].strip()
            if "interval" in sec:
                kwargs["interval"] = float(sec["interval"])
            if "formats" in sec:
                fmts = tuple(f for f in sec["formats"].replace(",", " ").split() if f)
                kwargs["formats"] = fmts
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value in {path!r}: {exc}") from exc
    return RunConfig(**kwargs)
