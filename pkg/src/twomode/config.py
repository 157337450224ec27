"""Experiment configuration files (INI syntax, dotted section names).

See ``docs/config.md`` for the schema. Parsing resolves every default so the
full configuration can be echoed into output files.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .coherent import CoherentPair
from .envelopes import DEFAULT_EPSILON, PulseEnvelope
from .errors import ConfigError
from .hierarchy import FockSuperposition
from .params import SystemParams
from .problems import EvenFock, Problem, RunOptions

STATE_KINDS = ("even-fock", "fock", "coherent")
SWEEP_PARAMS = ("bandwidth", "n", "nbar_r", "phi")

_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*(?:e[-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$", re.I)


def parse_number(text: str, field: str) -> float:
    """Float, optionally written as a multiple of ``pi`` (``pi``, ``pi/2``, ``3*pi/2``)."""
    raw = text.strip()
    try:
        return float(raw)
    except ValueError:
        pass
    m = _ANGLE.match(raw)
    if m:
        coef = m.group(1)
        scale = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
        div = float(m.group(2)) if m.group(2) else 1.0
        return scale * math.pi / div
    raise ConfigError(f"{field}: cannot parse number {text!r}", field=field)


def parse_grid(text: str, field: str) -> np.ndarray:
    """``log:lo:hi:count``, ``lin:lo:hi:count`` or a comma-separated list."""
    raw = text.strip()
    if raw.startswith(("log:", "lin:")):
        parts = raw.split(":")
        if len(parts) != 4:
            raise ConfigError(f"{field}: grid spec must be kind:lo:hi:count", field=field)
        lo, hi = parse_number(parts[1], field), parse_number(parts[2], field)
        try:
            count = int(parts[3])
        except ValueError:
            raise ConfigError(f"{field}: grid count must be an integer", field=field) from None
        if count < 1:
            raise ConfigError(f"{field}: grid count must be positive", field=field)
        if parts[0] == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError(f"{field}: log grid bounds must be positive", field=field)
            return np.geomspace(lo, hi, count)
        return np.linspace(lo, hi, count)
    values = [parse_number(v, field) for v in raw.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"{field}: empty grid", field=field)
    return np.array(values, dtype=float)


def parse_components(text: str) -> dict:
    """``"1,0: 0.7071; 0,1: 0.7071"`` -> {(1, 0): 0.7071, (0, 1): 0.7071}; amplitudes may be complex."""
    out = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        key, sep, amp = chunk.partition(":")
        if not sep:
            raise ConfigError(f"state.components: expected 'n_r,n_l: amplitude', got {chunk!r}",
                              field="state.components")
        try:
            nr, nl = (int(v) for v in key.split(","))
            out[(nr, nl)] = complex(amp.strip().replace(" ", ""))
        except ValueError:
            raise ConfigError(f"state.components: cannot parse {chunk!r}", field="state.components") from None
    return out


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    optimize: bool = False
    bracket: Optional[tuple] = None


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Problem
    sweep: Optional[SweepSpec]
    output: Optional[Path]
    resolved: str

    @property
    def state(self):
        return self.problem.state


def _qualified(section: str, exc: ConfigError) -> ConfigError:
    """Re-issue ``exc`` with its field prefixed by ``section`` (once)."""
    field = exc.field or ""
    if not field.startswith(section):
        field = f"{section}.{field}" if field else section
    message = str(exc)
    if not message.startswith(field):
        message = f"{field}: {message}"
    return ConfigError(message, field=field)


def _get(parser, section, key, default=None):
    if parser.has_section(section) and parser.has_option(section, key):
        return parser.get(section, key)
    return default


def _number(parser, section, key, default):
    raw = _get(parser, section, key)
    return default if raw is None else parse_number(raw, f"{section}.{key}")


def _envelope(parser, mode: str) -> PulseEnvelope:
    section = f"envelope.{mode}"

    def pick(key, default=None):
        raw = _get(parser, section, key)
        if raw is None:
            raw = _get(parser, "envelope", key)
        return default if raw is None else raw

    kind = pick("kind")
    if kind is None:
        raise ConfigError("envelope.kind is required", field="envelope.kind")
    bandwidth_raw = pick("bandwidth")
    if bandwidth_raw is None:
        raise ConfigError("envelope.bandwidth is required", field="envelope.bandwidth")
    try:
        return PulseEnvelope(
            kind=kind.strip(),
            bandwidth=parse_number(bandwidth_raw, f"{section}.bandwidth"),
            envelope_phase=parse_number(pick("phase", "0"), f"{section}.phase"),
            truncation_epsilon=parse_number(pick("epsilon", repr(DEFAULT_EPSILON)), f"{section}.epsilon"),
        )
    except ConfigError as exc:
        raise _qualified(section, exc) from None


def _state(parser):
    kind = (_get(parser, "state", "kind") or "").strip()
    if kind not in STATE_KINDS:
        raise ConfigError(f"state.kind must be one of {STATE_KINDS}, got {kind!r}", field="state.kind")
    try:
        if kind == "even-fock":
            n = _number(parser, "state", "n", None)
            if n is None or n != int(n):
                raise ConfigError("state.n must be an integer", field="state.n")
            return EvenFock(int(n))
        if kind == "fock":
            comps = _get(parser, "state", "components")
            if comps is None:
                raise ConfigError("state.components is required for fock inputs", field="state.components")
            normalize = parser.getboolean("state", "normalize", fallback=False)
            try:
                return FockSuperposition.from_dict(parse_components(comps), normalize=normalize)
            except ConfigError as exc:
                # the dataclass calls them coefficients; the file calls them components
                raise ConfigError(str(exc).replace(f"{exc.field}: ", ""), field="components") from None
        return CoherentPair(
            _number(parser, "state", "nbar_r", 0.0),
            _number(parser, "state", "nbar_l", 0.0),
            _number(parser, "state", "phi", 0.0),
        )
    except ConfigError as exc:
        raise _qualified("state", exc) from None


def _params(parser) -> SystemParams:
    try:
        return SystemParams(
            gamma_r=_number(parser, "system", "gamma_r", 0.5),
            gamma_l=_number(parser, "system", "gamma_l", 0.5),
            gamma_env=_number(parser, "system", "gamma_env", 0.0),
        )
    except ConfigError as exc:
        raise _qualified("system", exc) from None


def _options(parser) -> RunOptions:
    method = (_get(parser, "integration", "method", "rk45")).strip()
    if method not in ("rk4", "rk45"):
        raise ConfigError("integration.method must be rk4 or rk45", field="integration.method")
    tol = _number(parser, "integration", "tol", None)
    if tol is not None and tol <= 0:
        raise ConfigError("integration.tol must be positive", field="integration.tol")
    stride = _number(parser, "integration", "sample_stride", 0.01)
    step = _number(parser, "integration", "rk4_step", 1e-3)
    if stride <= 0 or step <= 0:
        raise ConfigError("integration step sizes must be positive", field="integration.sample_stride")
    try:
        return RunOptions(
            method=method,
            tol=tol,
            tail=_number(parser, "integration", "tail", 5.0),
            sample_stride=stride,
            rk4_step=step,
            representation=_get(parser, "integration", "representation", "two-mode").strip(),
        )
    except ConfigError as exc:
        raise _qualified("integration", exc) from None


def _sweep(parser) -> Optional[SweepSpec]:
    if not parser.has_section("sweep"):
        return None
    param = (_get(parser, "sweep", "parameter") or "").strip()
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMS}", field="sweep.parameter")
    raw = _get(parser, "sweep", "values")
    if raw is None:
        raise ConfigError("sweep.values is required", field="sweep.values")
    values = parse_grid(raw, "sweep.values")
    if param == "bandwidth":
        if np.any(values <= 0):
            raise ConfigError("sweep.values: bandwidths must be positive", field="sweep.values")
        values = np.sort(values)
    optimize = parser.getboolean("sweep", "optimize", fallback=False)
    bracket = None
    raw_bracket = _get(parser, "sweep", "bracket")
    if raw_bracket is not None:
        b = parse_grid(raw_bracket, "sweep.bracket")
        if len(b) != 2 or np.any(b <= 0):
            raise ConfigError("sweep.bracket needs two positive rates", field="sweep.bracket")
        bracket = (float(b[0]), float(b[1]))
    if optimize and param != "bandwidth":
        raise ConfigError("sweep.optimize only applies to bandwidth sweeps", field="sweep.optimize")
    return SweepSpec(param, tuple(float(v) for v in values), optimize, bracket)


def _resolved_text(problem: Problem, sweep: Optional[SweepSpec], output) -> str:
    """Canonical INI text of the fully resolved configuration."""
    out = configparser.ConfigParser(interpolation=None)
    state = problem.state
    if isinstance(state, EvenFock):
        out["state"] = {"kind": "even-fock", "n": str(state.n)}
    elif isinstance(state, CoherentPair):
        out["state"] = {"kind": "coherent", "nbar_r": repr(state.nbar_r),
                        "nbar_l": repr(state.nbar_l), "phi": repr(state.phi)}
    else:
        comps = "; ".join(f"{k[0]},{k[1]}: {complex(c)!r}" for k, c in state.coefficients)
        out["state"] = {"kind": "fock", "components": comps}
    for mode, env in zip("rl", problem.envelopes):
        out[f"envelope.{mode}"] = {"kind": env.kind, "bandwidth": repr(env.bandwidth),
                                   "phase": repr(env.envelope_phase), "epsilon": repr(env.truncation_epsilon)}
    p = problem.params
    out["system"] = {"gamma_r": repr(p.gamma_r), "gamma_l": repr(p.gamma_l), "gamma_env": repr(p.gamma_env)}
    o = problem.options
    out["integration"] = {"method": o.method, "tail": repr(o.tail), "sample_stride": repr(o.sample_stride),
                          "rk4_step": repr(o.rk4_step), "representation": o.representation}
    if o.tol is not None:
        out["integration"]["tol"] = repr(o.tol)
    if sweep is not None:
        out["sweep"] = {"parameter": sweep.parameter, "values": ", ".join(repr(v) for v in sweep.values),
                        "optimize": str(sweep.optimize).lower()}
        if sweep.bracket:
            out["sweep"]["bracket"] = f"{sweep.bracket[0]!r}, {sweep.bracket[1]!r}"
    if output is not None:
        out["output"] = {"path": str(output)}
    lines = []
    for section in out.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in out[section].items())
    return "\n".join(lines)


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}", field="config") from None
    problem = Problem(
        state=_state(parser),
        env_r=_envelope(parser, "r"),
        env_l=_envelope(parser, "l"),
        params=_params(parser),
        options=_options(parser),
    )
    sweep = _sweep(parser)
    out_raw = _get(parser, "output", "path")
    output = None
    if out_raw:
        output = Path(out_raw.strip())
        if base_dir is not None and not output.is_absolute():
            output = base_dir / output
    return ExperimentConfig(problem, sweep, output, _resolved_text(problem, sweep, output))


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", field="config") from None
    return parse_config(text, base_dir=path.parent)
