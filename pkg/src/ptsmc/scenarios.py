"""Named simulation scenarios and INI config files.

Four presets reproduce the standard demonstration runs, all from the
initial condition ``(x1, x2) = (1, -1.5)`` at ``dt = 50 µs`` over 5 s
with gains ``K1 = 1``, ``K2 = 20``, ``beta = 2``:

* ``fig1`` — nominal law, exact sign, ``gamma = 1.5``, no disturbance:
  finite-time convergence with visible discretization chattering.
* ``fig2`` — ``fig1`` with the tanh surrogate (gain 50): the
  chattering disappears and the control peak shrinks.
* ``fig3`` — integral law, tanh surrogate, constant disturbance
  ``d = 10``: the states still converge and ``u -> -d``.
* ``fig4`` — robust-sign law, tanh surrogate, ``gamma = 0`` (unused by
  this law), ``d = sin(t)``: the disturbance is canceled (``u`` tracks
  ``-sin t``) at the price of a small residual ``z2``.

User configs are flat INI files mirroring these fields; parsing is
strict — unknown sections or keys are errors, so a typo in a gain name
cannot silently fall back to a default.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace

from .controllers import LAWS, ControllerSpec
from .power_tower import SURROGATES
from .simulate import DISTURBANCE_KINDS, DisturbanceModel, SimConfig

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SweepConfig",
    "PRESETS",
    "preset_names",
    "get_scenario",
    "load_config",
]


class ConfigError(ValueError):
    """Invalid scenario configuration (unknown preset, bad file, bad field)."""


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """One named closed-loop run plus its analysis settings."""

    name: str
    spec: ControllerSpec
    dist: DisturbanceModel = field(default_factory=DisturbanceModel.zero)
    sim: SimConfig = field(default_factory=SimConfig)
    epsilon: float = 1e-2
    chattering_window: float = 1.0
    lyapunov_band: float = 1e-6
    require_convergence: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigError("scenario name must be nonempty")
        if self.epsilon <= 0.0 or not math.isfinite(self.epsilon):
            raise ConfigError(f"epsilon must be finite and > 0, got {self.epsilon!r}")
        if self.chattering_window <= 0.0:
            raise ConfigError(
                f"chattering_window must be > 0, got {self.chattering_window!r}"
            )
        if self.lyapunov_band < 0.0:
            raise ConfigError(f"lyapunov_band must be >= 0, got {self.lyapunov_band!r}")


@dataclass(frozen=True, slots=True)
class SweepConfig:
    """An initial-condition sweep over a base scenario (run with d = 0)."""

    scenario: ScenarioConfig
    grid: tuple[tuple[float, float], ...]
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if len(self.grid) == 0:
            raise ConfigError("sweep grid must be nonempty")
        if self.epsilon <= 0.0 or not math.isfinite(self.epsilon):
            raise ConfigError(f"sweep epsilon must be finite and > 0, got {self.epsilon!r}")


def _presets() -> dict[str, ScenarioConfig]:
    base_sim = SimConfig(dt=5e-5, t_end=5.0, x1_0=1.0, x2_0=-1.5, w_0=0.0, record_stride=20)
    nominal_exact = ControllerSpec(law="nominal", K1=1.0, K2=20.0, beta=2.0, gamma=1.5)
    return {
        "fig1": ScenarioConfig(name="fig1", spec=nominal_exact, sim=base_sim),
        "fig2": ScenarioConfig(
            name="fig2",
            spec=replace(nominal_exact, surrogate="tanh", tanh_gain=50.0),
            sim=base_sim,
        ),
        "fig3": ScenarioConfig(
            name="fig3",
            spec=ControllerSpec(
                law="integral", K1=1.0, K2=20.0, beta=2.0, gamma=1.5,
                surrogate="tanh", tanh_gain=50.0,
            ),
            dist=DisturbanceModel.constant(10.0),
            sim=base_sim,
        ),
        "fig4": ScenarioConfig(
            name="fig4",
            spec=ControllerSpec(
                law="robust-sign", K1=1.0, K2=20.0, beta=2.0, gamma=0.0,
                D_max=1.0, surrogate="tanh", tanh_gain=50.0,
            ),
            dist=DisturbanceModel.sinusoid(1.0, 1.0, 0.0),
            sim=base_sim,
            epsilon=5e-2,
        ),
    }


PRESETS = _presets()


def preset_names() -> tuple[str, ...]:
    return tuple(PRESETS)


_SECTIONS = {
    "scenario": {"name"},
    "controller": {
        "law", "k1", "k2", "beta", "gamma", "k_tsm", "d_max", "surrogate", "tanh_gain",
    },
    "disturbance": {"kind", "value", "amplitude", "omega", "phase", "table"},
    "sim": {"dt", "t_end", "x1_0", "x2_0", "w_0", "record_stride"},
    "analysis": {"epsilon", "chattering_window", "lyapunov_band", "require_convergence"},
    "sweep": {"grid", "epsilon"},
}

_DIST_KEYS = {
    "zero": set(),
    "constant": {"value"},
    "sinusoid": {"amplitude", "omega", "phase"},
    "tabulated": {"table"},
}


def _get_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: must be finite, got {raw!r}")
    return value


def _get_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from None


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _get_bool(section: str, key: str, raw: str) -> bool:
    try:
        return _BOOL[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"[{section}] {key}: not a boolean: {raw!r}") from None


def _parse_table(raw: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    times: list[float] = []
    values: list[float] = []
    for entry in raw.replace("\n", ",").split(","):
        entry = entry.strip()
        if not entry:
            continue
        if ":" not in entry:
            raise ConfigError(
                f"[disturbance] table: expected 'time:value' pairs, got {entry!r}"
            )
        t_raw, v_raw = entry.split(":", 1)
        times.append(_get_float("disturbance", "table", t_raw.strip()))
        values.append(_get_float("disturbance", "table", v_raw.strip()))
    if not times:
        raise ConfigError("[disturbance] table: no entries")
    return tuple(times), tuple(values)


def _parse_grid(raw: str) -> tuple[tuple[float, float], ...]:
    cells: list[tuple[float, float]] = []
    for entry in raw.replace("\n", ";").split(";"):
        entry = entry.strip()
        if not entry:
            continue
        parts = [p.strip() for p in entry.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"[sweep] grid: expected 'x1_0, x2_0' cells, got {entry!r}")
        cells.append(
            (_get_float("sweep", "grid", parts[0]), _get_float("sweep", "grid", parts[1]))
        )
    if not cells:
        raise ConfigError("[sweep] grid: no cells")
    return tuple(cells)


def _build_spec(opts: dict[str, str]) -> ControllerSpec:
    if "law" not in opts:
        raise ConfigError("[controller] law is required (one of %s)" % (", ".join(LAWS)))
    law = opts["law"].strip()
    if law not in LAWS:
        raise ConfigError(f"[controller] law: must be one of {LAWS}, got {law!r}")
    surrogate = opts.get("surrogate", "exact").strip()
    if surrogate not in SURROGATES:
        raise ConfigError(
            f"[controller] surrogate: must be one of {SURROGATES}, got {surrogate!r}"
        )
    kwargs = dict(law=law, surrogate=surrogate)
    for key, name in (
        ("k1", "K1"), ("k2", "K2"), ("beta", "beta"), ("gamma", "gamma"),
        ("k_tsm", "k_tsm"), ("d_max", "D_max"), ("tanh_gain", "tanh_gain"),
    ):
        if key in opts:
            kwargs[name] = _get_float("controller", key, opts[key])
    try:
        return ControllerSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[controller] {exc}") from None


def _build_dist(opts: dict[str, str]) -> DisturbanceModel:
    kind = opts.get("kind", "zero").strip()
    if kind not in DISTURBANCE_KINDS:
        raise ConfigError(
            f"[disturbance] kind: must be one of {DISTURBANCE_KINDS}, got {kind!r}"
        )
    allowed = _DIST_KEYS[kind] | {"kind"}
    for key in opts:
        if key not in allowed:
            raise ConfigError(
                f"[disturbance] {key}: not valid for kind {kind!r} "
                f"(valid: {sorted(_DIST_KEYS[kind]) or 'none'})"
            )
    try:
        if kind == "zero":
            return DisturbanceModel.zero()
        if kind == "constant":
            return DisturbanceModel.constant(
                _get_float("disturbance", "value", opts.get("value", "0"))
            )
        if kind == "sinusoid":
            return DisturbanceModel.sinusoid(
                _get_float("disturbance", "amplitude", opts.get("amplitude", "1")),
                _get_float("disturbance", "omega", opts.get("omega", "1")),
                _get_float("disturbance", "phase", opts.get("phase", "0")),
            )
        if "table" not in opts:
            raise ConfigError("[disturbance] table is required for kind 'tabulated'")
        times, values = _parse_table(opts["table"])
        return DisturbanceModel.tabulated(times, values)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[disturbance] {exc}") from None


def _build_sim(opts: dict[str, str]) -> SimConfig:
    kwargs = {}
    for key in ("dt", "t_end", "x1_0", "x2_0", "w_0"):
        if key in opts:
            kwargs[key] = _get_float("sim", key, opts[key])
    if "record_stride" in opts:
        kwargs["record_stride"] = _get_int("sim", "record_stride", opts["record_stride"])
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[sim] {exc}") from None


def load_config(path: str | os.PathLike) -> ScenarioConfig | SweepConfig:
    """Parse an INI scenario (or sweep) file; strict about unknown keys."""
    parser = configparser.ConfigParser(interpolation=None, default_section="")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!s}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from None

    sections: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(
                f"unknown section [{section}] (valid: {sorted(_SECTIONS)})"
            )
        opts = dict(parser.items(section))
        for key in opts:
            if key not in _SECTIONS[section]:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}] "
                    f"(valid: {sorted(_SECTIONS[section])})"
                )
        sections[section] = opts

    if "controller" not in sections:
        raise ConfigError("config must have a [controller] section with a law")

    name = sections.get("scenario", {}).get("name", "").strip()
    if not name:
        stem = os.path.splitext(os.path.basename(os.fspath(path)))[0]
        name = stem or "scenario"

    analysis = sections.get("analysis", {})
    kwargs = {}
    for key in ("epsilon", "chattering_window", "lyapunov_band"):
        if key in analysis:
            kwargs[key] = _get_float("analysis", key, analysis[key])
    if "require_convergence" in analysis:
        kwargs["require_convergence"] = _get_bool(
            "analysis", "require_convergence", analysis["require_convergence"]
        )

    scenario = ScenarioConfig(
        name=name,
        spec=_build_spec(sections["controller"]),
        dist=_build_dist(sections.get("disturbance", {})),
        sim=_build_sim(sections.get("sim", {})),
        **kwargs,
    )

    if "sweep" not in sections:
        return scenario
    sweep_opts = sections["sweep"]
    if "grid" not in sweep_opts:
        raise ConfigError("[sweep] grid is required")
    sweep_kwargs = {}
    if "epsilon" in sweep_opts:
        sweep_kwargs["epsilon"] = _get_float("sweep", "epsilon", sweep_opts["epsilon"])
    return SweepConfig(
        scenario=scenario, grid=_parse_grid(sweep_opts["grid"]), **sweep_kwargs
    )


def get_scenario(name_or_path: str) -> ScenarioConfig | SweepConfig:
    """Resolve a preset name or a config file path."""
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    if os.path.exists(name_or_path):
        return load_config(name_or_path)
    raise ConfigError(
        f"{name_or_path!r} is neither a preset ({', '.join(PRESETS)}) "
        "nor an existing config file"
    )
