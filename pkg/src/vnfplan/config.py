"""YAML serialization of compute models, service classes and instances."""
from __future__ import annotations

import functools
from importlib import resources
from typing import Optional

import yaml

from .model import (
    ChainRequest,
    CloudNode,
    ComputeModel,
    ConfigError,
    Infrastructure,
    Instance,
    ServiceClass,
    VnfSpec,
    build_chain,
)


def parse_model_section(data: dict) -> ComputeModel:
    try:
        coeffs = {}
        for pos, row in data["coeffs"].items():
            coeffs[int(pos)] = {
                "dl": tuple(float(v) for v in row["dl"]),
                "ul": tuple(float(v) for v in row["ul"]),
            }
        return ComputeModel(
            ref_gflops=float(data["ref_gflops"]),
            ref_cpu_ghz=float(data["ref_cpu_ghz"]),
            coeffs=coeffs,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad compute model section: {exc}") from exc


def parse_services_section(data: dict) -> dict[str, ServiceClass]:
    services = {}
    try:
        for name, row in data.items():
            services[str(name)] = ServiceClass(
                name=str(name),
                rb=int(row["rb"]),
                mcs_dl=int(row["mcs_dl"]),
                mcs_ul=int(row["mcs_ul"]),
                latency_profile=tuple(float(v) for v in row["latency_profile"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad services section: {exc}") from exc
    return services


@functools.lru_cache(maxsize=1)
def _load_defaults() -> tuple[ComputeModel, dict[str, ServiceClass]]:
    text = resources.files("vnfplan").joinpath("data/default_model.yaml").read_text()
    data = yaml.safe_load(text)
    return parse_model_section(data["model"]), parse_services_section(data["services"])


def default_model() -> ComputeModel:
    """The packaged demand model.  Its coefficients are synthetic."""
    return _load_defaults()[0]


def default_services() -> dict[str, ServiceClass]:
    """The four packaged service classes (eMBB, mMTC, URLLC1, URLLC2)."""
    return dict(_load_defaults()[1])


def _parse_infrastructure(data: dict) -> Infrastructure:
    try:
        clouds = tuple(
            CloudNode(id=int(c["id"]), capacity=float(c["capacity"]))
            for c in data["clouds"]
        )
        order = [c.id for c in clouds]
        matrix = data["cloud_distances"]
        cloud_distances: dict[int, dict[int, float]] = {}
        for i, k in enumerate(order):
            cloud_distances[k] = {}
            for j, other in enumerate(order):
                cloud_distances[k][other] = float(matrix[i][j])
        rrh_distances = {
            str(rrh): {int(k): float(d) for k, d in row.items()}
            for rrh, row in data["rrh_distances"].items()
        }
        return Infrastructure(
            clouds=clouds,
            rrh_distances=rrh_distances,
            cloud_distances=cloud_distances,
            fiber_speed=float(data.get("fiber_speed", 200.0)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad infrastructure section: {exc}") from exc


def _parse_chain(row: dict, model: ComputeModel,
                 services: dict[str, ServiceClass]) -> ChainRequest:
    chain_id = str(row.get("id"))
    rrh = str(row.get("rrh"))
    service: Optional[ServiceClass] = None
    if "service" in row:
        name = str(row["service"])
        if name not in services:
            raise ConfigError(f"chain {chain_id} uses unknown service {name}")
        service = services[name]
    if "vnfs" in row:
        try:
            vnfs = tuple(
                VnfSpec(gflops=float(v["gflops"]), fwd_ms=float(v["fwd_ms"]),
                        bwd_ms=float(v["bwd_ms"]))
                for v in row["vnfs"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"chain {chain_id} has a bad vnfs list: {exc}") from exc
        return ChainRequest(id=chain_id, service=service, rrh=rrh, vnfs=vnfs)
    if service is None:
        raise ConfigError(f"chain {chain_id} needs either a service or a vnfs list")
    return build_chain(model, service, rrh, chain_id)


def load_instance(path) -> Instance:
    """Read an instance file.  Raises ConfigError on any malformed content."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not hold an instance mapping")
    model = default_model()
    services = default_services()
    if "model" in data:
        model = parse_model_section(data["model"])
    if "services" in data:
        services = parse_services_section(data["services"])
    if "infrastructure" not in data:
        raise ConfigError(f"{path} has no infrastructure section")
    infra = _parse_infrastructure(data["infrastructure"])
    chains = tuple(
        _parse_chain(row, model, services) for row in data.get("chains", [])
    )
    return Instance(infra=infra, chains=chains)


def instance_to_dict(inst: Instance, model: Optional[ComputeModel] = None,
                     services: Optional[dict[str, ServiceClass]] = None) -> dict:
    """Serialize an instance (plus optional model context) to plain data.

    VNFs are always written out explicitly so a round trip reproduces the
    exact floats regardless of the model file in effect at load time.
    """
    out: dict = {}
    if model is not None:
        out["model"] = {
            "ref_gflops": model.ref_gflops,
            "ref_cpu_ghz": model.ref_cpu_ghz,
            "coeffs": {
                pos: {"dl": list(row["dl"]), "ul": list(row["ul"])}
                for pos, row in sorted(model.coeffs.items())
            },
        }
    if services is not None:
        out["services"] = {
            name: {
                "rb": svc.rb,
                "mcs_dl": svc.mcs_dl,
                "mcs_ul": svc.mcs_ul,
                "latency_profile": list(svc.latency_profile),
            }
            for name, svc in sorted(services.items())
        }
    infra = inst.infra
    order = [c.id for c in infra.clouds]
    out["infrastructure"] = {
        "fiber_speed": infra.fiber_speed,
        "clouds": [{"id": c.id, "capacity": c.capacity} for c in infra.clouds],
        "cloud_distances": [
            [infra.dist(k, j) for j in order] for k in order
        ],
        "rrh_distances": {
            rrh: {k: infra.rrh_distances[rrh][k] for k in sorted(infra.rrh_distances[rrh])}
            for rrh in sorted(infra.rrh_distances)
        },
    }
    out["chains"] = []
    for chain in inst.chains:
        row: dict = {"id": chain.id, "rrh": chain.rrh}
        if chain.service is not None:
            row["service"] = chain.service.name
        row["vnfs"] = [
            {"gflops": v.gflops, "fwd_ms": v.fwd_ms, "bwd_ms": v.bwd_ms}
            for v in chain.vnfs
        ]
        out["chains"].append(row)
    return out


def save_instance(path, inst: Instance, model: Optional[ComputeModel] = None,
                  services: Optional[dict[str, ServiceClass]] = None) -> None:
    data = instance_to_dict(inst, model=model, services=services)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(data, fh, sort_keys=False, default_flow_style=False)
