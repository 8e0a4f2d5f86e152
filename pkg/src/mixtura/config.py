"""Run configuration: flat INI-style files with bracketed sections.

Sections: [mixture] [grid] [time] [initial] [output].  Keys are validated
eagerly so a bad config fails before any numerics start.
"""

import configparser
from dataclasses import dataclass
from pathlib import Path

from .discretization import Grid1D
from .dynamics import SimConfig
from .model import DomainError, MixtureParams

__all__ = ["ConfigError", "RunSettings", "load_config"]


class ConfigError(Exception):
    """A config file is missing, malformed, or inconsistent."""


@dataclass
class RunSettings:
    sim: SimConfig
    out_dir: Path


def _get(parser, section, key, cast, default=None):
    if not parser.has_section(section):
        if default is not None:
            return default
        raise ConfigError(f"missing section [{section}]")
    if not parser.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in section [{section}]")
    raw = parser.get(section, key)
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(
            f"key '{key}' in [{section}]: cannot parse {raw!r}") from exc


def load_config(path) -> RunSettings:
    """Parse and validate a config file into run settings."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    try:
        params = MixtureParams(
            m1=_get(parser, "mixture", "m1", float),
            m2=_get(parser, "mixture", "m2", float),
            mu=_get(parser, "mixture", "mu", float),
            nu=_get(parser, "mixture", "nu", float),
        )
    except DomainError as exc:
        raise ConfigError(f"invalid [mixture] parameters: {exc}") from exc

    try:
        grid = Grid1D(
            n=_get(parser, "grid", "n", int),
            length=_get(parser, "grid", "length", float, default=1.0),
            bc=_get(parser, "grid", "bc", str, default="wall").strip(),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [grid] parameters: {exc}") from exc

    try:
        sim = SimConfig(
            params=params,
            grid=grid,
            dt=_get(parser, "time", "dt", float),
            t_end=_get(parser, "time", "t_end", float),
            formulation=_get(parser, "time", "formulation", str,
                             default="entropic").strip(),
            picard_tol=_get(parser, "time", "picard_tol", float, default=1e-10),
            picard_max=_get(parser, "time", "picard_max", int, default=50),
            cfl_limit=_get(parser, "time", "cfl_limit", float, default=0.5),
            output_every=_get(parser, "time", "output_every", int, default=1),
            ic_type=_get(parser, "initial", "type", str,
                         default="perturbation").strip(),
            epsilon=_get(parser, "initial", "epsilon", float, default=1e-2),
            mode=_get(parser, "initial", "mode", int, default=1),
            rho1_star=_get(parser, "initial", "rho1_star", float, default=1.0),
            rho2_star=_get(parser, "initial", "rho2_star", float, default=1.0),
            seed=_get(parser, "initial", "seed", int, default=0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid run parameters: {exc}") from exc

    out_dir = Path(_get(parser, "output", "dir", str, default="out").strip())
    return RunSettings(sim=sim, out_dir=out_dir)
