"""Versioned JSON run manifests.

Layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "plant": {"n": 2, "x_init": [1, -1],
                "disturbance": {"kind": "section_iv", "b": [b1, ..., b9]},
                "input": {"kind": "cos", "b10": 2.5}},
      "noise": {"bounded_family": "cos_affine", "amplitude": 1.5, "t_coeff": 2.5,
                "b_coeff": 2.5, "alpha1": 2, "alpha2": 2, "v2_init": 0},
      "linear": {"a": [3, 3, 1], "r": 15, "zeta": 0.9, "theta": 1, "epsilon": 1},
      "nonlinear": {"a": [3, 3, 1], "r": 15, "nu": "6/7", "p": 3, "mu": null,
                    "theta_star": 1, "epsilon_star": 1},
      "observer": "linear",
      "sim": {"t_end": 20, "h": null, "master_seed": 0, "paths": 10,
              "record_stride": null, "t_transient": null},
      "xhat_init": null,
      "sweep": {"r_values": [8, 12, 16, 24]}
    }

Numbers may be given as fraction strings such as ``"6/7"``. Either design
block may be omitted, but ``observer`` must name one that is present.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .engine import SimConfig
from .errors import InvalidArgument
from .gains import BelowRStarWarning, LinearDesign, NonlinearDesign
from .noise import BoundedFamily, NoiseConfig
from .plant import DisturbanceKind, DisturbanceSpec, InputKind, PlantConfig, section_iv_noise, section_iv_plant

SCHEMA_VERSION = 1
ACCEPTED_VERSIONS = (1,)


def _num(v, name="value"):
    if isinstance(v, bool):
        raise InvalidArgument(f"{name}: expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise InvalidArgument(f"{name}: expected a number, got {v!r}")


def _opt(v, name, cast=_num):
    return None if v is None else cast(v, name)


def _int(v, name):
    x = _num(v, name)
    if x != int(x):
        raise InvalidArgument(f"{name}: expected an integer, got {v!r}")
    return int(x)


def _vec(v, name):
    if not isinstance(v, (list, tuple)):
        raise InvalidArgument(f"{name}: expected a list")
    return tuple(_num(e, f"{name}[{i}]") for i, e in enumerate(v))


@dataclass(frozen=True)
class RunManifest:
    plant: PlantConfig
    noise: NoiseConfig
    sim: SimConfig
    linear: Optional[LinearDesign] = None
    nonlinear: Optional[NonlinearDesign] = None
    observer: str = "linear"
    xhat_init: Optional[tuple] = None
    r_values: Optional[tuple] = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.observer not in ("linear", "nonlinear"):
            raise InvalidArgument(f"observer must be 'linear' or 'nonlinear', got {self.observer!r}")
        if self.design is None:
            raise InvalidArgument(f"manifest selects the {self.observer} observer but has no such block")
        for d in (self.linear, self.nonlinear):
            if d is not None and d.n != self.plant.n:
                raise InvalidArgument(f"{d.kind} design order {d.n} differs from plant order {self.plant.n}")
        if self.xhat_init is not None and len(self.xhat_init) != self.plant.n + 1:
            raise InvalidArgument(f"xhat_init must have length {self.plant.n + 1}")

    @property
    def design(self):
        return self.linear if self.observer == "linear" else self.nonlinear

    def with_overrides(self, seed=None, paths=None) -> "RunManifest":
        sim = self.sim
        if seed is not None:
            sim = replace(sim, master_seed=int(seed))
        if paths is not None:
            sim = replace(sim, paths=int(paths))
        return replace(self, sim=sim)


def _plant_from(d):
    dist = d.get("disturbance", {"kind": "zero"})
    kind = DisturbanceKind(dist.get("kind", "zero"))
    if kind is DisturbanceKind.CUSTOM:
        raise InvalidArgument("custom disturbances are API-only and cannot be loaded from a manifest")
    spec = DisturbanceSpec(kind, b=_vec(dist.get("b", []), "disturbance.b"), c=_num(dist.get("c", 0.0), "disturbance.c"))
    inp = d.get("input", {"kind": "zero"})
    ikind = InputKind(inp.get("kind", "zero"))
    if ikind is InputKind.CUSTOM:
        raise InvalidArgument("custom inputs are API-only and cannot be loaded from a manifest")
    return PlantConfig(
        n=_int(d["n"], "plant.n"),
        x_init=_vec(d["x_init"], "plant.x_init"),
        disturbance=spec,
        input_kind=ikind,
        b10=_num(inp.get("b10", 0.0), "input.b10"),
        sanity_bound=_num(d.get("sanity_bound", 1e6), "plant.sanity_bound"),
    )


def _plant_to(p: PlantConfig):
    dist = {"kind": p.disturbance.kind.value}
    if p.disturbance.kind is DisturbanceKind.SECTION_IV:
        dist["b"] = list(p.disturbance.b)
    elif p.disturbance.kind is DisturbanceKind.CONSTANT:
        dist["c"] = p.disturbance.c
    inp = {"kind": p.input_kind.value}
    if p.input_kind is InputKind.COS:
        inp["b10"] = p.b10
    return {"n": p.n, "x_init": list(p.x_init), "disturbance": dist, "input": inp, "sanity_bound": p.sanity_bound}


def _noise_from(d):
    return NoiseConfig(
        bounded_family=BoundedFamily(d.get("bounded_family", "cos_affine")),
        amplitude=_num(d.get("amplitude", 0.0), "noise.amplitude"),
        t_coeff=_num(d.get("t_coeff", 0.0), "noise.t_coeff"),
        b_coeff=_num(d.get("b_coeff", 0.0), "noise.b_coeff"),
        alpha1=_num(d["alpha1"], "noise.alpha1"),
        alpha2=_num(d["alpha2"], "noise.alpha2"),
        v2_init=_num(d.get("v2_init", 0.0), "noise.v2_init"),
    )


def _noise_to(n: NoiseConfig):
    if n.sigma is not None:
        raise InvalidArgument("custom bounded noise cannot be serialized")
    return {
        "bounded_family": n.bounded_family.value,
        "amplitude": n.amplitude,
        "t_coeff": n.t_coeff,
        "b_coeff": n.b_coeff,
        "alpha1": n.alpha1,
        "alpha2": n.alpha2,
        "v2_init": n.v2_init,
    }


def _linear_from(d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BelowRStarWarning)
        return LinearDesign(
            _vec(d["a"], "linear.a"),
            r=_num(d["r"], "linear.r"),
            zeta=_num(d.get("zeta", 0.9), "linear.zeta"),
            theta=_num(d.get("theta", 1.0), "linear.theta"),
            epsilon=_num(d.get("epsilon", 1.0), "linear.epsilon"),
            strict=bool(d.get("strict", False)),
        )


def _linear_to(x: LinearDesign):
    return {"a": list(x.a), "r": x.r, "zeta": x.zeta, "theta": x.theta, "epsilon": x.epsilon, "strict": x.strict}


def _nonlinear_from(d):
    return NonlinearDesign(
        _vec(d["a"], "nonlinear.a"),
        r=_num(d["r"], "nonlinear.r"),
        nu=_num(d["nu"], "nonlinear.nu"),
        p=_num(d.get("p", 3.0), "nonlinear.p"),
        mu=_opt(d.get("mu"), "nonlinear.mu"),
        theta_star=_num(d.get("theta_star", 1.0), "nonlinear.theta_star"),
        epsilon_star=_num(d.get("epsilon_star", 1.0), "nonlinear.epsilon_star"),
    )


def _nonlinear_to(x: NonlinearDesign):
    return {
        "a": list(x.a), "r": x.r, "nu": x.nu, "p": x.p, "mu": x.mu,
        "theta_star": x.theta_star, "epsilon_star": x.epsilon_star,
    }


def _sim_from(d):
    return SimConfig(
        t_end=_num(d.get("t_end", 20.0), "sim.t_end"),
        h=_opt(d.get("h"), "sim.h"),
        master_seed=_int(d.get("master_seed", 0), "sim.master_seed"),
        paths=_int(d.get("paths", 1), "sim.paths"),
        record_stride=_opt(d.get("record_stride"), "sim.record_stride", _int),
        t_transient=_opt(d.get("t_transient"), "sim.t_transient"),
    )


def _sim_to(s: SimConfig):
    return {
        "t_end": s.t_end, "h": s.h, "master_seed": s.master_seed, "paths": s.paths,
        "record_stride": s.record_stride, "t_transient": s.t_transient,
    }


def from_dict(d) -> RunManifest:
    if not isinstance(d, dict):
        raise InvalidArgument("manifest must be a JSON object")
    version = d.get("schema_version")
    if version not in ACCEPTED_VERSIONS:
        raise InvalidArgument(f"unsupported schema_version {version!r}; accepted {ACCEPTED_VERSIONS}")
    try:
        sweep = d.get("sweep") or {}
        return RunManifest(
            schema_version=version,
            plant=_plant_from(d["plant"]),
            noise=_noise_from(d["noise"]),
            sim=_sim_from(d.get("sim", {})),
            linear=_linear_from(d["linear"]) if d.get("linear") else None,
            nonlinear=_nonlinear_from(d["nonlinear"]) if d.get("nonlinear") else None,
            observer=d.get("observer", "linear"),
            xhat_init=_opt(d.get("xhat_init"), "xhat_init", _vec),
            r_values=_opt(sweep.get("r_values"), "sweep.r_values", _vec),
        )
    except KeyError as exc:
        raise InvalidArgument(f"manifest is missing required key {exc.args[0]!r}") from None


def to_dict(m: RunManifest) -> dict:
    return {
        "schema_version": m.schema_version,
        "plant": _plant_to(m.plant),
        "noise": _noise_to(m.noise),
        "linear": _linear_to(m.linear) if m.linear else None,
        "nonlinear": _nonlinear_to(m.nonlinear) if m.nonlinear else None,
        "observer": m.observer,
        "sim": _sim_to(m.sim),
        "xhat_init": list(m.xhat_init) if m.xhat_init is not None else None,
        "sweep": {"r_values": list(m.r_values) if m.r_values is not None else None},
    }


def dumps(m: RunManifest) -> str:
    return json.dumps(to_dict(m), indent=2) + "\n"


def loads(text: str) -> RunManifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"manifest is not valid JSON: {exc}") from None
    return from_dict(data)


def load(path) -> RunManifest:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(m: RunManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(m))


def section_iv_manifest(observer="linear", paths=10, t_end=20.0, master_seed=0) -> RunManifest:
    """Manifest for the second-order benchmark (r=15, a=(3,3,1), nu=6/7)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BelowRStarWarning)
        lin = LinearDesign((3.0, 3.0, 1.0), r=15.0)
    return RunManifest(
        plant=section_iv_plant(),
        noise=section_iv_noise(),
        sim=SimConfig(t_end=t_end, master_seed=master_seed, paths=paths),
        linear=lin,
        nonlinear=NonlinearDesign((3.0, 3.0, 1.0), r=15.0, nu=6 / 7, p=3.0),
        observer=observer,
        r_values=(8.0, 12.0, 16.0, 24.0),
    )
