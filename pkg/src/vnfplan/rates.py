"""Rate allocation math: capacity a VNF must be granted at its cloud.

A VNF of demand g GFLOPS finishing within t milliseconds needs a rate of
1000 * g / t GFLOPS/s.  Placing adjacent VNFs on different clouds spends
part of the latency bound on fiber propagation, which shows up here as a
penalty on top of the co-located rate.  Latency-infeasible placements get
the INFEASIBLE sentinel (infinity) rather than a large constant, so they
can never masquerade as finite objectives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import ChainRequest, Instance

INFEASIBLE = math.inf

# Margins of one nanosecond or less count as infeasible: the latency bounds
# are treated as closed sets and an exact-zero margin would need infinite rate.
EPS_MS = 1e-6

# Absolute slack for capacity feasibility comparisons, in GFLOPS/s.
CAP_TOL = 1e-9


def comm_delay_ms(dist_m: float, fiber_speed: float) -> float:
    """One-way fiber propagation delay in ms (speed given in m/us)."""
    return dist_m / fiber_speed / 1000.0


def rate_for_bound(gflops: float, bound_ms: float) -> float:
    """Rate in GFLOPS/s that finishes the work inside the bound."""
    return 1000.0 * gflops / bound_ms


def colocated_rate(gflops: float, fwd_ms: float, bwd_ms: float) -> float:
    """Rate needed when both neighbors share the VNF's cloud."""
    return rate_for_bound(gflops, min(fwd_ms, bwd_ms))


def split_feasible(dist_m: float, fiber_speed: float, bound_ms: float) -> bool:
    """Whether a bound survives the propagation delay of a link at all."""
    return bound_ms - comm_delay_ms(dist_m, fiber_speed) > EPS_MS


def split_penalty(gflops: float, bound_ms: float, dist_m: float,
                  fiber_speed: float, base_rate: float) -> float:
    """Extra rate a VNF needs because one neighbor sits across a link.

    Returns 0 when the link adds nothing over the co-located requirement,
    INFEASIBLE when the delay eats the entire bound.
    """
    if base_rate == INFEASIBLE:
        return INFEASIBLE
    margin = bound_ms - comm_delay_ms(dist_m, fiber_speed)
    if margin <= EPS_MS:
        return INFEASIBLE
    return max(rate_for_bound(gflops, margin), base_rate) - base_rate


def first_vnf_rate(gflops: float, fwd_ms: float, bwd_ms: float,
                   rrh_dist_m: float, fiber_speed: float) -> float:
    """Base rate of the chain head, which always talks to the RRH over fiber."""
    margin = bwd_ms - comm_delay_ms(rrh_dist_m, fiber_speed)
    if margin <= EPS_MS:
        return INFEASIBLE
    return max(rate_for_bound(gflops, fwd_ms), rate_for_bound(gflops, margin))


@dataclass(frozen=True)
class Assignment:
    """Maps every (chain id, VNF position) to a cloud id.  Positions are 1-based."""

    x: Mapping[tuple[str, int], int]

    def cloud_of(self, chain_id: str, n: int) -> int:
        return self.x[(chain_id, n)]

    @staticmethod
    def from_vectors(vectors: Mapping[str, Sequence[int]]) -> "Assignment":
        """Build from {chain id: [cloud of VNF 1, cloud of VNF 2, ...]}."""
        x = {}
        for chain_id, clouds in vectors.items():
            for n, k in enumerate(clouds, start=1):
                x[(chain_id, n)] = k
        return Assignment(x=x)


@dataclass(frozen=True)
class Solution:
    """A fully evaluated deployment."""

    assignment: Assignment
    rates: Mapping[tuple[str, int], tuple[int, float]]  # (chain, n) -> (cloud, rate)
    objective: float                                     # sum of rates, GFLOPS/s
    loads: Mapping[int, float]                           # cloud -> allocated rate
    feasible: bool
    violations: tuple[str, ...]


class RateTable:
    """Precomputed per-instance rate data, shared read-only by all solvers.

    Holds, for every chain: the co-located rate of each VNF, the base rate
    of VNF 1 at each cloud, and the forward/backward split penalties for
    every ordered cloud pair.
    """

    def __init__(self, inst: Instance):
        self.instance = inst
        infra = inst.infra
        self.cloud_ids = infra.cloud_ids()
        self._colo: dict[str, list[float]] = {}
        self._first: dict[str, dict[int, float]] = {}
        self._fwd: dict[str, dict[tuple[int, int, int], float]] = {}
        self._bwd: dict[str, dict[tuple[int, int, int], float]] = {}
        v = infra.fiber_speed
        for chain in inst.chains:
            n_vnfs = len(chain.vnfs)
            colo = [colocated_rate(x.gflops, x.fwd_ms, x.bwd_ms) for x in chain.vnfs]
            self._colo[chain.id] = colo
            first = {}
            for k in self.cloud_ids:
                head = chain.vnfs[0]
                first[k] = first_vnf_rate(head.gflops, head.fwd_ms, head.bwd_ms,
                                          infra.rrh_dist(chain.rrh, k), v)
            self._first[chain.id] = first
            fwd: dict[tuple[int, int, int], float] = {}
            bwd: dict[tuple[int, int, int], float] = {}
            for k in self.cloud_ids:
                for j in self.cloud_ids:
                    if k == j:
                        continue
                    d = infra.dist(k, j)
                    for n in range(1, n_vnfs):
                        vnf = chain.vnfs[n - 1]
                        base = first[k] if n == 1 else colo[n - 1]
                        fwd[(n, k, j)] = split_penalty(vnf.gflops, vnf.fwd_ms, d, v, base)
                    for n in range(2, n_vnfs + 1):
                        vnf = chain.vnfs[n - 1]
                        bwd[(n, k, j)] = split_penalty(vnf.gflops, vnf.bwd_ms, d, v,
                                                       colo[n - 1])
            self._fwd[chain.id] = fwd
            self._bwd[chain.id] = bwd

    def colocated(self, chain_id: str, n: int) -> float:
        return self._colo[chain_id][n - 1]

    def first_rate(self, chain_id: str, k: int) -> float:
        return self._first[chain_id][k]

    def placement_feasible(self, chain_id: str, k: int) -> bool:
        """Whether the chain head may sit at cloud k at all."""
        return self._first[chain_id][k] != INFEASIBLE

    def split_penalty_fwd(self, chain_id: str, n: int, k: int, j: int) -> float:
        """Penalty on VNF n at cloud k when VNF n+1 sits at cloud j."""
        if k == j:
            return 0.0
        return self._fwd[chain_id][(n, k, j)]

    def split_penalty_bwd(self, chain_id: str, n: int, k: int, j: int) -> float:
        """Penalty on VNF n at cloud k when VNF n-1 sits at cloud j."""
        if k == j:
            return 0.0
        return self._bwd[chain_id][(n, k, j)]

    def split_feasible_fwd(self, chain_id: str, n: int, k: int, j: int) -> bool:
        return self.split_penalty_fwd(chain_id, n, k, j) != INFEASIBLE

    def split_feasible_bwd(self, chain_id: str, n: int, k: int, j: int) -> bool:
        return self.split_penalty_bwd(chain_id, n, k, j) != INFEASIBLE

    def chain_demand(self, chain_id: str) -> float:
        """Sum of co-located rates; the packing order key for heuristics."""
        return sum(self._colo[chain_id])

    def required_rate(self, a: Assignment, chain_id: str, n: int) -> float:
        """Rate VNF n needs at its assigned cloud under assignment a.

        The base requirement is the co-located rate (or the RRH-aware rate
        for the chain head) plus the worst split penalty among the
        neighbors placed on other clouds.  INFEASIBLE when any implied
        link cannot meet its bound.
        """
        chain = self.instance.chain(chain_id)
        n_vnfs = len(chain.vnfs)
        k = a.cloud_of(chain_id, n)
        if n == 1:
            base = self._first[chain_id][k]
            if base == INFEASIBLE:
                return INFEASIBLE
            if n_vnfs == 1:
                return base
            return base + self.split_penalty_fwd(chain_id, 1, k, a.cloud_of(chain_id, 2))
        base = self._colo[chain_id][n - 1]
        pen_bwd = self.split_penalty_bwd(chain_id, n, k, a.cloud_of(chain_id, n - 1))
        if n == n_vnfs:
            return base + pen_bwd
        pen_fwd = self.split_penalty_fwd(chain_id, n, k, a.cloud_of(chain_id, n + 1))
        return base + max(pen_fwd, pen_bwd)


def evaluate(inst: Instance, a: Assignment, table: RateTable | None = None) -> Solution:
    """Evaluate a total assignment into rates, loads and a feasibility verdict.

    Collects every violated constraint instead of stopping at the first,
    so an infeasible deployment reports all of its problems at once.
    """
    if table is None:
        table = RateTable(inst)
    violations: list[str] = []
    rates: dict[tuple[str, int], tuple[int, float]] = {}
    loads: dict[int, float] = {k: 0.0 for k in inst.infra.cloud_ids()}
    objective = 0.0
    for chain in inst.chains:
        n_vnfs = len(chain.vnfs)
        for n in range(1, n_vnfs + 1):
            k = a.cloud_of(chain.id, n)
            rate = table.required_rate(a, chain.id, n)
            rates[(chain.id, n)] = (k, rate)
            objective += rate
            loads[k] += rate
            if rate != INFEASIBLE:
                continue
            if n == 1 and not table.placement_feasible(chain.id, k):
                violations.append(
                    f"chain {chain.id} VNF 1 at cloud {k}: RRH link exceeds the backward bound")
            if n < n_vnfs:
                j = a.cloud_of(chain.id, n + 1)
                if j != k and not table.split_feasible_fwd(chain.id, n, k, j):
                    violations.append(
                        f"chain {chain.id} split ({n},{n + 1}) across clouds ({k},{j}) "
                        f"exceeds the forward bound")
            if n > 1:
                j = a.cloud_of(chain.id, n - 1)
                if j != k and not table.split_feasible_bwd(chain.id, n, k, j):
                    violations.append(
                        f"chain {chain.id} split ({n - 1},{n}) across clouds ({j},{k}) "
                        f"exceeds the backward bound")
    for k in sorted(loads):
        cap = inst.infra.capacity(k)
        if loads[k] > cap + CAP_TOL:
            violations.append(
                f"cloud {k} over capacity: load {loads[k]} exceeds {cap}")
    return Solution(
        assignment=a,
        rates=rates,
        objective=objective,
        loads=loads,
        feasible=not violations,
        violations=tuple(violations),
    )


def chain_hop_distances(inst: Instance, a: Assignment,
                        chain: ChainRequest) -> list[float]:
    """Fiber lengths of the links an assignment makes the chain traverse."""
    hops = []
    for n in range(1, len(chain.vnfs)):
        k = a.cloud_of(chain.id, n)
        j = a.cloud_of(chain.id, n + 1)
        if k != j:
            hops.append(inst.infra.dist(k, j))
    return hops
