"""Exact placement solvers: branch and bound plus a brute-force oracle."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Mapping, Optional

from .model import Instance
from .rates import CAP_TOL, INFEASIBLE, Assignment, RateTable, Solution, evaluate


class BruteForceCapError(ValueError):
    """The enumeration space exceeds the configured cap."""


class BudgetExceededError(RuntimeError):
    """Raised when optimality was required but the budget ran out."""


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10_000_000
    time_limit: float = 600.0       # seconds
    optimality_required: bool = False


@dataclass(frozen=True)
class SolveResult:
    solution: Optional[Solution]
    status: str                     # optimal | feasible-incumbent | infeasible | budget-exhausted
    nodes: int
    runtime: float
    infeasible_reason: Optional[str] = None


class _BudgetHit(Exception):
    pass


def solve_optimal(inst: Instance, budget: SearchBudget | None = None,
                  use_lower_bound: bool = True,
                  table: RateTable | None = None) -> SolveResult:
    """Depth-first branch and bound over per-VNF cloud choices.

    Clouds are tried in ascending id order, so complete assignments are
    visited lexicographically and the first optimum found is the
    lexicographically smallest one; results are deterministic whenever the
    budget is not the binding factor.  Pruning uses committed cost plus an
    admissible completion estimate (each unassigned VNF at its cheapest
    feasible cloud, ignoring future split penalties).
    """
    if budget is None:
        budget = SearchBudget()
    if table is None:
        table = RateTable(inst)
    start = time.perf_counter()
    clouds = list(inst.infra.cloud_ids())
    caps = {k: inst.infra.capacity(k) for k in clouds}
    variables: list[tuple[int, int]] = []
    for si, chain in enumerate(inst.chains):
        for n in range(1, len(chain.vnfs) + 1):
            variables.append((si, n))
    num_vars = len(variables)

    # A chain whose head fits nowhere makes the whole instance infeasible.
    for chain in inst.chains:
        if not clouds or all(not table.placement_feasible(chain.id, k) for k in clouds):
            return SolveResult(None, "infeasible", 0,
                               time.perf_counter() - start,
                               infeasible_reason="first-vnf-placement")

    # suffix_min[t] = cheapest possible completion cost of variables t..end.
    suffix_min = [0.0] * (num_vars + 1)
    for t in range(num_vars - 1, -1, -1):
        si, n = variables[t]
        cid = inst.chains[si].id
        if n == 1:
            best_base = min(table.first_rate(cid, k) for k in clouds
                            if table.placement_feasible(cid, k))
        else:
            best_base = table.colocated(cid, n)
        suffix_min[t] = suffix_min[t + 1] + best_base

    vec = [0] * num_vars          # cloud chosen per variable
    bwd_committed = [0.0] * num_vars
    loads = {k: 0.0 for k in clouds}
    nodes = 0
    deadline = time.monotonic() + budget.time_limit
    best_obj = INFEASIBLE
    best_vec: Optional[list[int]] = None
    causes = {"first-vnf-placement": 0, "split-latency": 0, "capacity": 0}
    chain_ids = [c.id for c in inst.chains]

    def dfs(t: int, g: float) -> None:
        nonlocal nodes, best_obj, best_vec
        if t == num_vars:
            if g < best_obj:
                best_obj = g
                best_vec = vec.copy()
            return
        si, n = variables[t]
        cid = chain_ids[si]
        for k in clouds:
            nodes += 1
            if nodes > budget.max_nodes:
                raise _BudgetHit
            if nodes % 512 == 0 and time.monotonic() > deadline:
                raise _BudgetHit
            if n == 1:
                base = table.first_rate(cid, k)
                if base == INFEASIBLE:
                    causes["first-vnf-placement"] += 1
                    continue
                self_rate, pen_bwd, inc_prev, j_prev = base, 0.0, 0.0, None
            else:
                j_prev = vec[t - 1]
                if k == j_prev:
                    pen_bwd, pen_fwd_prev = 0.0, 0.0
                else:
                    pen_bwd = table.split_penalty_bwd(cid, n, k, j_prev)
                    pen_fwd_prev = table.split_penalty_fwd(cid, n - 1, j_prev, k)
                    if pen_bwd == INFEASIBLE or pen_fwd_prev == INFEASIBLE:
                        causes["split-latency"] += 1
                        continue
                self_rate = table.colocated(cid, n) + pen_bwd
                inc_prev = max(0.0, pen_fwd_prev - bwd_committed[t - 1])
            if loads[k] + self_rate > caps[k] + CAP_TOL:
                causes["capacity"] += 1
                continue
            if j_prev is not None and inc_prev > 0.0 \
                    and loads[j_prev] + inc_prev + (self_rate if j_prev == k else 0.0) \
                    > caps[j_prev] + CAP_TOL:
                causes["capacity"] += 1
                continue
            g2 = g + self_rate + inc_prev
            if use_lower_bound and g2 + suffix_min[t + 1] >= best_obj:
                continue
            vec[t] = k
            bwd_committed[t] = pen_bwd
            loads[k] += self_rate
            if j_prev is not None and inc_prev > 0.0:
                loads[j_prev] += inc_prev
            dfs(t + 1, g2)
            loads[k] -= self_rate
            if j_prev is not None and inc_prev > 0.0:
                loads[j_prev] -= inc_prev
        vec[t] = 0

    completed = True
    try:
        dfs(0, 0.0)
    except _BudgetHit:
        completed = False
    runtime = time.perf_counter() - start

    if not completed and budget.optimality_required:
        raise BudgetExceededError(
            f"search budget exhausted after {nodes} nodes ({runtime:.3f}s)")

    if best_vec is not None:
        vectors: dict[str, list[int]] = {cid: [] for cid in chain_ids}
        for t, (si, n) in enumerate(variables):
            vectors[chain_ids[si]].append(best_vec[t])
        solution = evaluate(inst, Assignment.from_vectors(vectors), table)
        status = "optimal" if completed else "feasible-incumbent"
        return SolveResult(solution, status, nodes, runtime)
    if completed:
        reason = max(causes, key=lambda key: (causes[key], key)) \
            if any(causes.values()) else None
        return SolveResult(None, "infeasible", nodes, runtime,
                           infeasible_reason=reason)
    return SolveResult(None, "budget-exhausted", nodes, runtime)


def brute_force(inst: Instance, cap: int = 10_000_000,
                table: RateTable | None = None) -> SolveResult:
    """Exhaustive enumeration of every placement.  The equivalence oracle.

    Refuses instances whose joint space exceeds the cap.  Per-chain cost
    and load vectors are enumerated first; the cross product only has to
    add them up and check capacities.
    """
    if table is None:
        table = RateTable(inst)
    start = time.perf_counter()
    clouds = list(inst.infra.cloud_ids())
    space = 1
    for chain in inst.chains:
        space *= max(1, len(clouds)) ** len(chain.vnfs)
        if space > cap:
            raise BruteForceCapError(
                f"enumeration space exceeds cap {cap}")
    cloud_index = {k: i for i, k in enumerate(clouds)}

    per_chain: list[list[tuple[tuple[int, ...], float, tuple[float, ...]]]] = []
    empty_chain = False
    for chain in inst.chains:
        options = []
        n_vnfs = len(chain.vnfs)
        for combo in itertools.product(clouds, repeat=n_vnfs):
            a = Assignment.from_vectors({chain.id: combo})
            rates = [table.required_rate(a, chain.id, n)
                     for n in range(1, n_vnfs + 1)]
            if INFEASIBLE in rates:
                continue
            loads = [0.0] * len(clouds)
            for n, k in enumerate(combo):
                loads[cloud_index[k]] += rates[n]
            options.append((combo, sum(rates), tuple(loads)))
        if not options:
            empty_chain = True
            break
        per_chain.append(options)

    if empty_chain:
        return SolveResult(None, "infeasible", 0, time.perf_counter() - start,
                           infeasible_reason="latency")

    caps = [inst.infra.capacity(k) + CAP_TOL for k in clouds]
    best_obj = INFEASIBLE
    best_combo = None
    examined = 0
    any_feasible = False
    for pick in itertools.product(*per_chain):
        examined += 1
        total = 0.0
        agg = [0.0] * len(clouds)
        for _, cost, loads in pick:
            total += cost
            for i, load in enumerate(loads):
                agg[i] += load
        if any(agg[i] > caps[i] for i in range(len(clouds))):
            continue
        any_feasible = True
        if total < best_obj:
            best_obj = total
            best_combo = pick
    runtime = time.perf_counter() - start
    if not any_feasible:
        return SolveResult(None, "infeasible", examined, runtime,
                           infeasible_reason="capacity")
    vectors = {chain.id: list(best_combo[i][0])
               for i, chain in enumerate(inst.chains)}
    solution = evaluate(inst, Assignment.from_vectors(vectors), table)
    return SolveResult(solution, "optimal", examined, runtime)


def lower_bound(inst: Instance, partial: Mapping[tuple[str, int], int],
                table: RateTable | None = None) -> float:
    """Admissible cost bound for a prefix partial assignment.

    Assigned VNFs contribute their base rate plus penalties towards
    already-assigned neighbors; unassigned VNFs contribute the cheapest
    feasible co-located rate.  Future split penalties are ignored, so the
    value never exceeds the best completion.
    """
    if table is None:
        table = RateTable(inst)
    clouds = inst.infra.cloud_ids()
    order: list[tuple[str, int]] = []
    for chain in inst.chains:
        for n in range(1, len(chain.vnfs) + 1):
            order.append((chain.id, n))
    boundary = len(order)
    for t, key in enumerate(order):
        if key not in partial:
            boundary = t
            break
    for key in order[boundary:]:
        if key in partial:
            raise ValueError("partial assignment is not a prefix of the variable order")

    total = 0.0
    for t, (cid, n) in enumerate(order):
        chain = inst.chain(cid)
        if t < boundary:
            k = partial[(cid, n)]
            base = table.first_rate(cid, k) if n == 1 else table.colocated(cid, n)
            pen = 0.0
            if n > 1:
                pen = table.split_penalty_bwd(cid, n, k, partial[(cid, n - 1)])
            if n < len(chain.vnfs) and (cid, n + 1) in partial:
                pen = max(pen, table.split_penalty_fwd(cid, n, k, partial[(cid, n + 1)]))
            total += base + pen
        elif n == 1:
            feasible = [table.first_rate(cid, k) for k in clouds
                        if table.placement_feasible(cid, k)]
            total += min(feasible) if feasible else INFEASIBLE
        else:
            total += table.colocated(cid, n)
    return total


def _accepts_all(inst: Instance, method: str, budget: SearchBudget | None) -> bool:
    from . import heuristics

    if not inst.chains:
        return True
    if method == "optimal":
        res = solve_optimal(inst, budget=budget)
        return res.status in ("optimal", "feasible-incumbent")
    if method == "brute":
        return brute_force(inst).status == "optimal"
    if method == "b_first":
        result = heuristics.b_first(inst)
        return len(result.accepted_ids) == len(inst.chains)
    if method == "fixed_split":
        return heuristics.fixed_split(inst).feasible
    if method == "fixed_service":
        return heuristics.fixed_service(inst).feasible
    raise ValueError(f"unknown method {method!r}")


def max_accepted_chains(inst: Instance, method: str = "optimal",
                        protocol: str = "prefix",
                        budget: SearchBudget | None = None) -> int:
    """How many chains of the request sequence a method can carry.

    protocol "prefix": the largest m such that the first m chains admit a
    feasible deployment.  protocol "incremental": chains are offered one
    by one and each is kept only if the kept set stays feasible (the
    deployment may be rearranged at every arrival).
    """
    ids = [c.id for c in inst.chains]
    if protocol == "prefix":
        if method in ("b_first",):
            # Heuristic acceptance is not monotone in the prefix length.
            best = 0
            for m in range(1, len(ids) + 1):
                if _accepts_all(inst.subset(ids[:m]), method, budget):
                    best = m
            return best
        best = 0
        for m in range(1, len(ids) + 1):
            if not _accepts_all(inst.subset(ids[:m]), method, budget):
                break
            best = m
        return best
    if protocol == "incremental":
        kept: list[str] = []
        for cid in ids:
            if _accepts_all(inst.subset(kept + [cid]), method, budget):
                kept.append(cid)
        return len(kept)
    raise ValueError(f"unknown protocol {protocol!r}")
