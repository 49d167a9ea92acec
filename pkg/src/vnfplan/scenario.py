"""Scenario generation and sweep harness: hexagonal layouts, service
mixes, method comparisons and CSV export."""
from __future__ import annotations

import csv
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .config import default_model, default_services
from .heuristics import b_first, fixed_service, fixed_split
from .model import (
    ChainRequest,
    CloudNode,
    ComputeModel,
    Infrastructure,
    Instance,
    ServiceClass,
    build_chain,
)
from .solver import SearchBudget, brute_force, max_accepted_chains, solve_optimal

METHOD_ORDER = ("optimal", "brute", "b_first", "fixed_split",
                "fixed_service", "cran_only")


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs of the synthetic deployment scenarios.

    Distances are meters, capacities GFLOPS/s.  central_dist lists the
    central cloud distances a distance sweep walks through; single-point
    runs use its first entry.  mix_profile "standard" draws the balanced mix
    (one mMTC plus equal parts eMBB/URLLC1/URLLC2); naming a service
    instead makes every chain that service.  edge_sites "all" co-locates
    an edge cloud with every macro site, "center" only with the middle one.
    """

    rings: int = 1
    isd: float = 500.0
    central_dist: tuple[float, ...] = (30000.0, 60000.0, 90000.0, 150000.0)
    central_capacity: float = 8960.0
    edge_capacity: float = 4480.0
    mix_size: int = 7
    seed: int = 0
    mix_profile: str = "standard"
    edge_sites: str = "all"


@dataclass(frozen=True)
class SweepRecord:
    scenario: str
    method: str
    size: int                      # chains requested
    d0_m: float
    objective_gflops_s: float
    accepted: int
    loads: Mapping[int, float]     # cloud id -> allocated rate
    runtime_s: float


def hex_sites(rings: int, isd: float) -> list[tuple[float, float]]:
    """Macro site coordinates of a hexagonal layout, center first.

    Ring m holds 6*m sites at inter-site distance isd from their
    neighbors, giving 1 + 3*rings*(rings+1) sites overall.
    """
    half_h = math.sqrt(3.0) / 2.0
    sites = [(0.0, 0.0)]
    for ring in range(1, rings + 1):
        q, r = ring, 0
        for dq, dr in ((-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)):
            for _ in range(ring):
                sites.append((isd * (q + r / 2.0), isd * half_h * r))
                q += dq
                r += dr
    return sites


def gen_hex_layout(rings: int, isd: float, d0_m: float,
                   central_capacity: float, edge_capacity: float,
                   edge_sites: str = "all",
                   cran: bool = False) -> tuple[Infrastructure, list[str]]:
    """Clouds and RRHs for a hexagonal scenario.

    One RRH per macro site.  Edge clouds (ids 1..K) sit on the macro
    sites; the central cloud (id 0) sits d0_m away from the center site.
    With cran=True the edge clouds are dropped and their capacity is
    folded into the central cloud, keeping the total constant.
    """
    sites = hex_sites(rings, isd)
    rrhs = [f"r{i:02d}" for i in range(len(sites))]
    if edge_sites == "center":
        edge_positions = sites[:1]
    elif edge_sites == "all":
        edge_positions = sites
    else:
        raise ValueError(f"edge_sites must be 'all' or 'center', got {edge_sites!r}")
    positions: dict[int, tuple[float, float]] = {0: (d0_m, 0.0)}
    if cran:
        clouds = [CloudNode(0, central_capacity + len(edge_positions) * edge_capacity)]
    else:
        clouds = [CloudNode(0, central_capacity)]
        for i, pos in enumerate(edge_positions):
            clouds.append(CloudNode(i + 1, edge_capacity))
            positions[i + 1] = pos
    ids = [c.id for c in clouds]
    cloud_distances = {
        k: {j: math.hypot(positions[k][0] - positions[j][0],
                          positions[k][1] - positions[j][1]) for j in ids}
        for k in ids
    }
    rrh_distances = {
        rrh: {k: math.hypot(site[0] - positions[k][0], site[1] - positions[k][1])
              for k in ids}
        for rrh, site in zip(rrhs, sites)
    }
    infra = Infrastructure(clouds=tuple(clouds), rrh_distances=rrh_distances,
                           cloud_distances=cloud_distances)
    return infra, rrhs


def gen_mix(size: int, rrhs: Sequence[str], rng: random.Random,
            services: Optional[dict[str, ServiceClass]] = None,
            ) -> list[tuple[ServiceClass, str]]:
    """The standard service mix, bound to radio heads.

    One mMTC chain pinned to the central site's RRH; the rest split as
    evenly as possible between eMBB, URLLC1 and URLLC2 (leftovers in that
    order) and bound to uniformly drawn RRHs.  The list interleaves the
    three services so any prefix stays balanced.
    """
    if services is None:
        services = default_services()
    if size <= 0:
        return []
    whole, rem = divmod(size - 1, 3)
    left = {
        "eMBB": whole + (1 if rem >= 1 else 0),
        "URLLC1": whole + (1 if rem >= 2 else 0),
        "URLLC2": whole,
    }
    out = [(services["mMTC"], rrhs[0])]
    while any(left.values()):
        for name in ("eMBB", "URLLC1", "URLLC2"):
            if left[name]:
                left[name] -= 1
                out.append((services[name], rng.choice(list(rrhs))))
    return out


def build_instance(cfg: ScenarioConfig, d0_m: Optional[float] = None,
                   size: Optional[int] = None,
                   edge_capacity: Optional[float] = None,
                   seed: Optional[int] = None, cran: bool = False,
                   model: Optional[ComputeModel] = None,
                   services: Optional[dict[str, ServiceClass]] = None) -> Instance:
    """Materialize one scenario point into a solvable instance."""
    if model is None:
        model = default_model()
    if services is None:
        services = default_services()
    d0 = cfg.central_dist[0] if d0_m is None else d0_m
    n_chains = cfg.mix_size if size is None else size
    ce = cfg.edge_capacity if edge_capacity is None else edge_capacity
    infra, rrhs = gen_hex_layout(cfg.rings, cfg.isd, d0, cfg.central_capacity,
                                 ce, edge_sites=cfg.edge_sites, cran=cran)
    rng = random.Random(cfg.seed if seed is None else seed)
    if cfg.mix_profile == "standard":
        mix = gen_mix(n_chains, rrhs, rng, services)
    else:
        if cfg.mix_profile not in services:
            raise ValueError(f"unknown mix profile {cfg.mix_profile!r}")
        svc = services[cfg.mix_profile]
        mix = [(svc, rng.choice(rrhs)) for _ in range(n_chains)]
    chains: list[ChainRequest] = []
    for idx, (svc, rrh) in enumerate(mix):
        chains.append(build_chain(model, svc, rrh, f"c{idx:03d}"))
    return Instance(infra=infra, chains=tuple(chains))


def efficiency_improvement(baseline: float, variant: float) -> float:
    """Percent rate saved by the variant relative to the baseline."""
    if baseline <= 0:
        raise ValueError(f"baseline must be positive, got {baseline}")
    return 100.0 * (baseline - variant) / baseline


def _normalize_method(name: str) -> str:
    token = name.strip().lower().replace("-", "_")
    if token == "bfirst":
        token = "b_first"
    if token not in METHOD_ORDER:
        raise ValueError(f"unknown method {name!r}")
    return token


def _solve_point(cfg: ScenarioConfig, method: str, size: int, d0: float,
                 ce: float, rep: int, budget: SearchBudget,
                 measure_runtime: bool) -> SweepRecord:
    seed_eff = cfg.seed * 100003 + rep
    cran = method == "cran_only"
    inst = build_instance(cfg, d0_m=d0, size=size, edge_capacity=ce,
                          seed=seed_eff, cran=cran)
    # Pad loads with the hybrid cloud ids so every record of a sweep has
    # the same columns, whichever variant produced it.
    hybrid_ids = inst.infra.cloud_ids() if not cran else \
        build_instance(cfg, d0_m=d0, size=0, edge_capacity=ce,
                       seed=seed_eff).infra.cloud_ids()
    solver_kind = "optimal" if cran else method

    started = time.perf_counter()
    heur = None
    sol = None
    res = None
    if solver_kind == "optimal":
        res = solve_optimal(inst, budget=budget)
    elif solver_kind == "brute":
        res = brute_force(inst)
    elif solver_kind == "b_first":
        heur = b_first(inst)
    elif solver_kind == "fixed_split":
        sol = fixed_split(inst)
    elif solver_kind == "fixed_service":
        sol = fixed_service(inst)
    else:
        raise ValueError(f"unknown method {method!r}")
    runtime = time.perf_counter() - started if measure_runtime else 0.0

    if heur is not None:
        accepted = len(heur.accepted_ids)
        objective = heur.solution.objective
        loads = dict(heur.solution.loads)
    elif sol is not None:
        if sol.feasible:
            accepted = len(inst.chains)
            objective = sol.objective
            loads = dict(sol.loads)
        else:
            accepted = max_accepted_chains(inst, method=solver_kind, budget=budget)
            prefix = inst.subset([c.id for c in inst.chains[:accepted]])
            redo = fixed_split(prefix) if solver_kind == "fixed_split" \
                else fixed_service(prefix)
            objective = redo.objective
            loads = dict(redo.loads)
    else:
        assert res is not None
        if res.solution is not None and res.solution.feasible:
            accepted = len(inst.chains)
            objective = res.solution.objective
            loads = dict(res.solution.loads)
        else:
            accepted = max_accepted_chains(inst, method=solver_kind, budget=budget)
            prefix = inst.subset([c.id for c in inst.chains[:accepted]])
            redo = solve_optimal(prefix, budget=budget) if solver_kind == "optimal" \
                else brute_force(prefix)
            if redo.solution is not None:
                objective = redo.solution.objective
                loads = dict(redo.solution.loads)
            else:
                objective = 0.0
                loads = {}
    full_loads = {k: loads.get(k, 0.0) for k in hybrid_ids}
    scenario = (f"hex{cfg.rings}-S{size}-d0{d0:g}-ce{ce:g}"
                f"-seed{cfg.seed}-rep{rep}")
    return SweepRecord(scenario=scenario, method=method, size=size, d0_m=d0,
                       objective_gflops_s=objective, accepted=accepted,
                       loads=full_loads, runtime_s=runtime)


def _run_task(task) -> SweepRecord:
    return _solve_point(*task)


def run_sweep(cfg: ScenarioConfig, methods: Sequence[str],
              axes: Optional[Mapping[str, Sequence[float]]] = None,
              reps: int = 10, budget: Optional[SearchBudget] = None,
              measure_runtime: bool = False, jobs: int = 1) -> list[SweepRecord]:
    """Run every (method, axis point, repetition) and collect records.

    axes maps any of "S", "d0", "Ce" to the values to sweep; missing axes
    stay at the config defaults.  Records come back in canonical order
    (method, then axis point, then repetition) regardless of jobs, and
    runtimes are reported as 0.0 unless measure_runtime is set, keeping
    the default output reproducible byte for byte.
    """
    if not methods:
        raise ValueError("no methods given")
    normalized = [_normalize_method(m) for m in methods]
    ordered = [m for m in METHOD_ORDER if m in normalized]
    if budget is None:
        budget = SearchBudget()
    axes = dict(axes or {})
    unknown = set(axes) - {"S", "d0", "Ce"}
    if unknown:
        raise ValueError(f"unknown sweep axes {sorted(unknown)}")
    sizes = [int(v) for v in axes.get("S", [cfg.mix_size])]
    dists = [float(v) for v in axes.get("d0", [cfg.central_dist[0]])]
    edge_caps = [float(v) for v in axes.get("Ce", [cfg.edge_capacity])]
    tasks = []
    for method in ordered:
        for size in sizes:
            for d0 in dists:
                for ce in edge_caps:
                    for rep in range(reps):
                        tasks.append((cfg, method, size, d0, ce, rep,
                                      budget, measure_runtime))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks))
    return [_run_task(task) for task in tasks]


def _fmt(v: float) -> str:
    return repr(float(v))


def export_csv(records: Sequence[SweepRecord], path) -> None:
    """Write sweep records as CSV with one load column per cloud id."""
    cloud_ids = sorted({k for rec in records for k in rec.loads})
    header = (["scenario", "method", "S", "d0_m", "objective_gflops_s",
               "accepted"] + [f"load_k{k}" for k in cloud_ids] + ["runtime_s"])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in records:
            row = [rec.scenario, rec.method, str(rec.size), _fmt(rec.d0_m),
                   _fmt(rec.objective_gflops_s), str(rec.accepted)]
            row += [_fmt(rec.loads.get(k, 0.0)) for k in cloud_ids]
            row.append(_fmt(rec.runtime_s))
            writer.writerow(row)


def read_csv(path) -> list[SweepRecord]:
    """Parse a sweep CSV back into records (exact float round trip)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        load_cols = [(i, int(name[len("load_k"):]))
                     for i, name in enumerate(header) if name.startswith("load_k")]
        records = []
        for row in reader:
            records.append(SweepRecord(
                scenario=row[0],
                method=row[1],
                size=int(row[2]),
                d0_m=float(row[3]),
                objective_gflops_s=float(row[4]),
                accepted=int(row[5]),
                loads={k: float(row[i]) for i, k in load_cols},
                runtime_s=float(row[header.index("runtime_s")]),
            ))
    return records
