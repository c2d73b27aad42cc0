"""Shared test oracles: vertex enumeration for small LPs and the two-region
hand instance (T1) with its brute-force plan-grid evaluator."""

from __future__ import annotations

import itertools
import math

import numpy as np

from gridplan.lp import EQUAL, GREATER, LESS, LinearProgram
from gridplan.model import (
    FuelCategory,
    FuelSpec,
    GeneratorSpec,
    PlanningInstance,
    Scenario,
    TransmissionLink,
)

FEAS_TOL = 1e-7


def enumerate_vertices(lp: LinearProgram) -> tuple[str, float]:
    """Brute-force optimum of a small LP by enumerating candidate vertices.

    Candidate vertices are solutions of square systems formed by activating
    rows and variable bounds; every variable must have finite lower and
    upper bounds so the feasible set is a polytope (feasible implies a
    vertex exists).  Returns ("optimal", value) or ("infeasible", nan).
    """
    n = lp.num_variables
    if not (np.all(np.isfinite(lp.lower)) and np.all(np.isfinite(lp.upper))):
        raise ValueError("vertex enumeration needs a fully bounded box")

    constraints: list[tuple[np.ndarray, float]] = []
    forced: list[int] = []
    for i in range(lp.num_rows):
        constraints.append((lp.matrix[i], float(lp.rhs[i])))
        if lp.relations[i] == EQUAL:
            forced.append(len(constraints) - 1)
    for j in range(n):
        row = np.zeros(n)
        row[j] = 1.0
        constraints.append((row, float(lp.lower[j])))
        constraints.append((row, float(lp.upper[j])))

    best = math.inf
    found = False
    free_ids = [k for k in range(len(constraints)) if k not in forced]
    need = n - len(forced)
    if need < 0:
        need = 0
    for combo in itertools.combinations(free_ids, need):
        active = list(forced) + list(combo)
        a = np.array([constraints[k][0] for k in active])
        b = np.array([constraints[k][1] for k in active])
        if a.shape[0] != n:
            continue
        try:
            point = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(point)):
            continue
        if _feasible(lp, point):
            found = True
            best = min(best, float(lp.objective @ point))
    if not found:
        return "infeasible", math.nan
    return "optimal", best


def _feasible(lp: LinearProgram, x: np.ndarray) -> bool:
    if np.any(x < lp.lower - FEAS_TOL) or np.any(x > lp.upper + FEAS_TOL):
        return False
    activity = lp.matrix @ x if lp.num_rows else np.zeros(0)
    for i, rel in enumerate(lp.relations):
        scale = max(1.0, abs(lp.rhs[i]))
        gap = activity[i] - lp.rhs[i]
        if rel == LESS and gap > FEAS_TOL * scale:
            return False
        if rel == GREATER and gap < -FEAS_TOL * scale:
            return False
        if rel == EQUAL and abs(gap) > FEAS_TOL * scale:
            return False
    return True


def random_box_lp(rng: np.random.Generator, max_vars: int = 5, max_rows: int = 4) -> LinearProgram:
    """Random fully-bounded LP small enough for vertex enumeration."""
    n = int(rng.integers(2, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    matrix = np.round(rng.uniform(-5.0, 5.0, size=(m, n)), 3)
    relations = tuple(rng.choice([LESS, GREATER, EQUAL], p=[0.45, 0.45, 0.1]) for _ in range(m))
    rhs = np.round(rng.uniform(-10.0, 10.0, size=m), 3)
    lower = np.round(rng.uniform(-3.0, 0.0, size=n), 3)
    upper = lower + np.round(rng.uniform(0.5, 6.0, size=n), 3)
    objective = np.round(rng.uniform(-10.0, 10.0, size=n), 3)
    return LinearProgram(
        objective=objective,
        matrix=matrix,
        relations=relations,
        rhs=rhs,
        lower=lower,
        upper=upper,
        variable_names=tuple(f"x{j}" for j in range(n)),
        row_names=tuple(f"r{i}" for i in range(m)),
        name="random",
    )


# ---------------------------------------------------------------------------
# T1: the hand-checkable two-region instance.
#
# Region A has one dispatchable generator (cap 100, avail 100, cost 50/MWh),
# one directed link A->B (cap 60, transfer cost 10, deviation penalty 5),
# shortage cost 1000 everywhere, and two equiprobable scenarios with demand
# (A:40, B:30) and (A:40, B:50).
# ---------------------------------------------------------------------------

T1_GEN_CAP = 100.0
T1_GEN_COST = 50.0
T1_LINK_CAP = 60.0
T1_LINK_COST = 10.0
T1_LINK_PENALTY = 5.0
T1_SHORT_COST = 1000.0
T1_DEMANDS = ((0.5, 40.0, 30.0), (0.5, 40.0, 50.0))

# frozen values computed with t1_grid_optimum / t1_second_stage below
T1_OBJECTIVE = 4550.0
T1_PLAN = 50.0
T1_WS = 4400.0
T1_WS_PER_SCENARIO = (3800.0, 5000.0)
T1_EV = 4400.0
T1_MEAN_PLAN = 40.0
T1_EEV = 9175.0
T1_SUB_COSTS_AT_PLAN_50 = (3600.0, 4500.0)


def t1_instance() -> PlanningInstance:
    fuels = [FuelSpec("gas", FuelCategory.DISPATCHABLE)]
    generators = [
        GeneratorSpec(
            region="A",
            fuel="gas",
            category=FuelCategory.DISPATCHABLE,
            rated_power=T1_GEN_CAP,
            available_power=T1_GEN_CAP,
            production_cost=T1_GEN_COST,
        )
    ]
    links = [
        TransmissionLink(
            from_region="A",
            to_region="B",
            capacity=T1_LINK_CAP,
            transfer_cost=T1_LINK_COST,
            deviation_penalty=T1_LINK_PENALTY,
        )
    ]
    scenarios = [
        Scenario(id="s1", probability=0.5, demand={"A": 40.0, "B": 30.0}, vrrg_available={}),
        Scenario(id="s2", probability=0.5, demand={"A": 40.0, "B": 50.0}, vrrg_available={}),
    ]
    return PlanningInstance(
        regions=["A", "B"],
        fuels=fuels,
        generators=generators,
        links=links,
        scenarios=scenarios,
        shortage_cost={"A": T1_SHORT_COST, "B": T1_SHORT_COST},
    )


def t1_second_stage(plan: float, demand_b: float) -> float:
    """Second-stage cost of T1 for a fixed plan, by direct enumeration.

    Candidate dispatch points: send 0, the full plan, or exactly demand;
    production then serves local demand plus the export up to capacity.
    Independent of the LP machinery.
    """
    best = math.inf
    for actual in {0.0, plan, min(plan, demand_b)}:
        production = min(T1_GEN_CAP, 40.0 + actual)
        short_a = max(0.0, 40.0 + actual - production)
        short_b = max(0.0, demand_b - actual)
        deviation = plan - actual
        cost = (
            T1_GEN_COST * production
            + T1_SHORT_COST * (short_a + short_b)
            + T1_LINK_PENALTY * deviation
        )
        best = min(best, cost)
    return best


def t1_expected_cost(plan: float) -> float:
    total = T1_LINK_COST * plan
    for probability, _, demand_b in T1_DEMANDS:
        total += probability * t1_second_stage(plan, demand_b)
    return total


def t1_grid_optimum(points: int = 60001) -> tuple[float, float]:
    """(best plan, best expected cost) over a dense grid of plans."""
    grid = np.linspace(0.0, T1_LINK_CAP, points)
    values = np.array([t1_expected_cost(x) for x in grid])
    k = int(np.argmin(values))
    return float(grid[k]), float(values[k])
