"""JSON problem descriptions and the closed map/weight vocabulary.

A config is a JSON object with ``kind`` one of ``ellipse_system``,
``circle_system``, ``random_matrices`` or ``ifs``. Maps and weights are
descriptor objects ``{"type": name, "args": [...]}``; complex numbers may be
written as a plain number or as ``[re, im]``.

Map types: ``affine(a, b)`` = ``a x + b``, ``moebius(a, b, c, d)`` =
``(a x + b)/(c x + d)``, ``mobius_from_matrix(A)`` = ``((a-b)x + b)/w_A(x)``,
``sine_affine(a, omega, b)`` = ``a sin(omega x) + b``,
``rational_1branch(a)`` = ``x/(a + x)`` and ``blaschke(mu)``, which expands to
the two inverse branches of a degree-two Blaschke product.

Weight types: ``deriv`` (``Phi'``), ``deriv_squared`` (``Phi'^2``),
``const(c)`` and ``prob(p)``. For circle systems the weight is the factor
multiplying ``f o phi_i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from holotransfer.apps import IFSProblem, RandomMatrixProblem, blaschke_branches
from holotransfer.errors import ConfigError, ValidationError
from holotransfer.transferop import CircleSystem, MapWeightSystem

KINDS = ("ellipse_system", "circle_system", "random_matrices", "ifs")

ComplexFn = Callable[[np.ndarray], np.ndarray]


def parse_complex(value) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"expected a number or [re, im], got {value!r}")


def parse_real(value) -> float:
    z = parse_complex(value)
    if z.imag != 0:
        raise ConfigError(f"expected a real number, got {value!r}")
    return z.real


def _descriptor(d, what) -> tuple[str, list]:
    if isinstance(d, str):
        return d, []
    if not isinstance(d, dict) or "type" not in d:
        raise ConfigError(f"{what} descriptor must be an object with a 'type' field, got {d!r}")
    args = d.get("args", [])
    if not isinstance(args, list):
        raise ConfigError(f"{what} args must be a list")
    return d["type"], args


def _arity(name, args, k):
    if len(args) != k:
        raise ConfigError(f"{name} takes {k} arguments, got {len(args)}")


def build_map(desc) -> tuple[ComplexFn, ComplexFn]:
    """``(Phi, Phi')`` for a single-branch map descriptor."""
    name, args = _descriptor(desc, "map")
    if name == "affine":
        _arity(name, args, 2)
        a, b = map(parse_complex, args)
        return (lambda x: a * x + b), (lambda x: np.full(np.shape(x), a, dtype=complex))
    if name == "moebius":
        _arity(name, args, 4)
        a, b, c, d = map(parse_complex, args)
        if a * d - b * c == 0:
            raise ConfigError("degenerate Moebius map (ad - bc = 0)")
        return (lambda x: (a * x + b) / (c * x + d)), (lambda x: (a * d - b * c) / (c * x + d) ** 2)
    if name == "mobius_from_matrix":
        _arity(name, args, 1)
        (a, b), (c, d) = np.asarray(args[0], dtype=float)
        # ((a-b) z + b) / ((a+c-b-d) z + b + d)
        return build_map({"type": "moebius", "args": [a - b, b, a + c - b - d, b + d]})
    if name == "sine_affine":
        _arity(name, args, 3)
        a, om, b = map(parse_complex, args)
        return (lambda x: a * np.sin(om * x) + b), (lambda x: a * om * np.cos(om * x))
    if name == "rational_1branch":
        _arity(name, args, 1)
        a = parse_complex(args[0])
        return (lambda x: x / (a + x)), (lambda x: a / (a + x) ** 2)
    raise ConfigError(f"unknown map type {name!r}")


def build_weight(desc, dphi: ComplexFn) -> ComplexFn:
    name, args = _descriptor(desc, "weight")
    if name == "deriv":
        _arity(name, args, 0)
        return dphi
    if name == "deriv_squared":
        _arity(name, args, 0)
        return lambda x: dphi(x) ** 2
    if name in ("const", "prob"):
        _arity(name, args, 1)
        c = parse_complex(args[0])
        if name == "prob" and not (c.imag == 0 and 0 <= c.real <= 1):
            raise ConfigError(f"prob weight must lie in [0, 1], got {args[0]!r}")
        return lambda x: np.full(np.shape(x), c, dtype=complex)
    raise ConfigError(f"unknown weight type {name!r}")


def _foci(cfg, default):
    if "foci" not in cfg:
        return default
    f = cfg["foci"]
    if not isinstance(f, list) or len(f) != 2:
        raise ConfigError("foci must be a list of two numbers")
    return tuple(parse_complex(g) for g in f)


def _opt_real(cfg, key):
    return None if cfg.get(key) is None else parse_real(cfg[key])


def _branches(cfg) -> list:
    br = cfg.get("branches")
    if not isinstance(br, list) or not br:
        raise ConfigError("'branches' must be a nonempty list")
    return br


def _ellipse_system(cfg, samples) -> MapWeightSystem:
    R = _opt_real(cfg, "R")
    if R is None:
        raise ConfigError("ellipse_system needs R")
    branches = []
    for b in _branches(cfg):
        phi, dphi = build_map(b.get("map"))
        branches.append((phi, build_weight(b.get("weight", "deriv"), dphi)))
    return MapWeightSystem(branches, _foci(cfg, (1.0, -1.0)), R, _opt_real(cfg, "r"), samples)


def _circle_system(cfg) -> CircleSystem:
    rho = _opt_real(cfg, "rho")
    inverse = []
    for b in _branches(cfg):
        name, args = _descriptor(b.get("map"), "map")
        if name == "blaschke":
            _arity(name, args, 1)
            mu = parse_complex(args[0])
            if not abs(mu) < 1 / 3:
                raise ValidationError(f"|mu| must be below 1/3, got {abs(mu):.6g}")
            pairs = blaschke_branches(mu)
            if rho is None:
                rho = min(0.9 / abs(mu) ** 2, 100.0) if mu != 0 else 100.0
            wdesc = b.get("weight", "deriv")
            inverse += [(phi, build_weight(wdesc, dphi)) for phi, dphi in pairs]
        else:
            phi, dphi = build_map(b.get("map"))
            inverse.append((phi, build_weight(b.get("weight", "deriv"), dphi)))
    orientation = int(parse_real(cfg.get("orientation", 1)))
    # the descriptor weight is the full multiplier of f o phi_i
    return CircleSystem(inverse, lambda z: np.ones_like(z), orientation, rho)


def _probs(cfg):
    p = cfg.get("probs")
    if not isinstance(p, list):
        raise ConfigError("'probs' must be a list")
    return [parse_real(v) for v in p]


def _random_matrices(cfg, samples) -> RandomMatrixProblem:
    mats = cfg.get("matrices")
    if not isinstance(mats, list):
        raise ConfigError("'matrices' must be a list of 2x2 arrays")
    try:
        mats = np.asarray(mats, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad matrices: {exc}") from None
    return RandomMatrixProblem(mats, _probs(cfg), _foci(cfg, (0.0, 1.0)), _opt_real(cfg, "R"), samples)


def _ifs(cfg) -> IFSProblem:
    maps, derivs = [], []
    for b in _branches(cfg):
        phi, dphi = build_map(b.get("map") if isinstance(b, dict) and "map" in b else b)
        maps.append(phi)
        derivs.append(dphi)
    observable = None
    if cfg.get("observable") is not None:
        observable = build_map(cfg["observable"])[0]
    return IFSProblem(maps, _probs(cfg), derivs, observable, _foci(cfg, (0.0, 1.0)), _opt_real(cfg, "R"))


@dataclass
class Problem:
    kind: str
    config: dict
    obj: Any

    @property
    def foci(self):
        return self.obj.foci


def build_problem(cfg: dict, samples: int = 1024) -> Problem:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"'kind' must be one of {KINDS}, got {kind!r}")
    try:
        if kind == "ellipse_system":
            obj = _ellipse_system(cfg, samples)
        elif kind == "circle_system":
            obj = _circle_system(cfg)
        elif kind == "random_matrices":
            obj = _random_matrices(cfg, samples)
        else:
            obj = _ifs(cfg)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"malformed {kind} config: {exc}") from None
    return Problem(kind, cfg, obj)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``"interval_map"``."""
    path = Path(__file__).parent / "configs" / f"{name}.json"
    if not path.exists():
        raise ConfigError(f"no bundled config named {name!r}")
    return path


def bundled_names() -> list[str]:
    return sorted(p.stem for p in (Path(__file__).parent / "configs").glob("*.json"))
