"""Scenario-based decomposition of the planning problem.

The planned interchange is the complicating first-stage decision: fixing it
splits the problem into one independent second-stage LP per scenario.  A
master problem over the plan plus a recourse estimate collects aggregated
optimality cuts built from the duals of the plan-fixing rows, and the loop
alternates master and subproblem solves until the bound gap closes.

Subproblems are solved unweighted; scenario probabilities are applied when
cuts and bounds are aggregated (equivalent up to dual scaling, and it keeps
subproblem conditioning independent of the probabilities).  Sums over
scenarios always run in instance scenario order so results are reproducible
bit-for-bit regardless of how the solves are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .lp import EQUAL, GREATER, LESS, LpBuilder, LpError, SolveOptions, SolveStatus, solve
from .model import (
    FuelCategory,
    ModelError,
    PlanningInstance,
    PlanningSolution,
    Scenario,
    ensure_valid,
)


@dataclass(frozen=True)
class SecondStage:
    """Recourse decisions of one scenario at a fixed plan."""

    production: Mapping[tuple[str, str], float]
    actual_interchange: Mapping[tuple[str, str], float]
    deviation: Mapping[tuple[str, str], float]
    shortage: Mapping[str, float]
    excess: Mapping[str, float]


@dataclass(frozen=True)
class SubproblemResult:
    scenario_id: str
    cost: float
    duals_plan: Mapping[tuple[str, str], float]
    second_stage: SecondStage


@dataclass(frozen=True)
class Cut:
    """Affine underestimator of the expected recourse cost.

    Tight at the plan it was generated from; valid globally by convexity of
    the LP value function.
    """

    constant: float
    gradient: Mapping[tuple[str, str], float]
    source_iteration: int

    def value_at(self, plan: Mapping[tuple[str, str], float]) -> float:
        return self.constant + sum(g * plan[pair] for pair, g in self.gradient.items())


@dataclass(frozen=True)
class IterationRecord:
    index: int
    plan: Mapping[tuple[str, str], float]
    lower_bound: float
    upper_bound: float
    best_upper_bound: float
    gap: float
    cut: Cut


@dataclass(frozen=True)
class BendersReport:
    iterations: tuple[IterationRecord, ...]
    final_solution: PlanningSolution
    converged: bool
    gap: float

    @property
    def objective(self) -> float:
        return self.final_solution.objective_value


@dataclass(frozen=True)
class BendersOptions:
    max_iterations: int = 200
    rel_gap: float = 1e-6
    alpha_down: float = 0.0
    jobs: int = 1
    lp_options: SolveOptions = field(default_factory=SolveOptions)


# ---------------------------------------------------------------------------
# subproblem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SubproblemTemplate:
    """Per-scenario LP with the plan fixed by trailing equality rows."""

    lp: "object"
    prod_keys: tuple[tuple[str, str], ...]
    link_pairs: tuple[tuple[str, str], ...]
    regions: tuple[str, ...]
    fix_row_start: int

    def with_plan(self, plan_values: np.ndarray):
        rhs = self.lp.rhs.copy()
        rhs[self.fix_row_start :] = plan_values
        return self.lp.with_rhs(rhs)


def _build_subproblem(instance: PlanningInstance, scenario: Scenario) -> _SubproblemTemplate:
    builder = LpBuilder(name=f"sub[{scenario.id}]")
    prod_keys = tuple((g.region, g.fuel) for g in instance.generators)
    link_pairs = tuple((l.from_region, l.to_region) for l in instance.links)

    prod_i = {
        (g.region, g.fuel): builder.add_variable(
            f"prod[{g.region},{g.fuel}]", objective=g.production_cost
        )
        for g in instance.generators
    }
    plan_i = {pair: builder.add_variable(f"plan[{pair[0]},{pair[1]}]") for pair in link_pairs}
    actual_i = {
        pair: builder.add_variable(f"actual[{pair[0]},{pair[1]}]") for pair in link_pairs
    }
    dev_i = {
        (l.from_region, l.to_region): builder.add_variable(
            f"dev[{l.from_region},{l.to_region}]", objective=l.deviation_penalty
        )
        for l in instance.links
    }
    short_i = {
        r: builder.add_variable(f"short[{r}]", objective=instance.shortage_cost[r])
        for r in instance.regions
    }
    excess_i = {r: builder.add_variable(f"excess[{r}]") for r in instance.regions}

    for g in instance.generators:
        builder.add_row(
            f"cap[{g.region},{g.fuel}]", {prod_i[(g.region, g.fuel)]: 1.0}, LESS, g.rated_power
        )
    for g in instance.generators:
        index = {prod_i[(g.region, g.fuel)]: 1.0}
        if g.category == FuelCategory.FIXED:
            builder.add_row(f"fix[{g.region},{g.fuel}]", index, EQUAL, g.available_power)
        elif g.category == FuelCategory.DISPATCHABLE:
            builder.add_row(f"avail[{g.region},{g.fuel}]", index, LESS, g.available_power)
        else:
            builder.add_row(
                f"vavail[{g.region},{g.fuel}]",
                index,
                LESS,
                scenario.vrrg_available[(g.region, g.fuel)],
            )
    for pair in link_pairs:
        builder.add_row(
            f"flowcap[{pair[0]},{pair[1]}]",
            {actual_i[pair]: 1.0, plan_i[pair]: -1.0},
            LESS,
            0.0,
        )
    for pair in link_pairs:
        builder.add_row(
            f"devdef[{pair[0]},{pair[1]}]",
            {dev_i[pair]: 1.0, plan_i[pair]: -1.0, actual_i[pair]: 1.0},
            EQUAL,
            0.0,
        )
    for region in instance.regions:
        coeffs: dict[int, float] = {}
        for g in instance.generators:
            if g.region == region:
                coeffs[prod_i[(g.region, g.fuel)]] = 1.0
        for pair in link_pairs:
            if pair[0] == region:
                coeffs[actual_i[pair]] = -1.0
            if pair[1] == region:
                coeffs[actual_i[pair]] = coeffs.get(actual_i[pair], 0.0) + 1.0
        coeffs[short_i[region]] = 1.0
        coeffs[excess_i[region]] = -1.0
        builder.add_row(f"balance[{region}]", coeffs, EQUAL, scenario.demand[region])
    fix_row_start = len(builder._rows)
    for pair in link_pairs:
        builder.add_row(f"fixplan[{pair[0]},{pair[1]}]", {plan_i[pair]: 1.0}, EQUAL, 0.0)

    return _SubproblemTemplate(
        lp=builder.build(),
        prod_keys=prod_keys,
        link_pairs=link_pairs,
        regions=tuple(instance.regions),
        fix_row_start=fix_row_start,
    )


def _plan_vector(
    pairs: Sequence[tuple[str, str]], plan: Mapping[tuple[str, str], float]
) -> np.ndarray:
    try:
        return np.array([float(plan[pair]) for pair in pairs])
    except KeyError as exc:
        raise ModelError(f"fixed plan is missing link {exc.args[0]}") from exc


def _solve_template(
    template: _SubproblemTemplate,
    scenario_id: str,
    plan_values: np.ndarray,
    lp_options: SolveOptions,
) -> SubproblemResult:
    solution = solve(template.with_plan(plan_values), lp_options)
    if solution.status != SolveStatus.OPTIMAL:
        raise LpError(
            f"subproblem {scenario_id} returned {solution.status.value}; "
            "recourse problems are feasible and bounded for valid data"
        )
    x = solution.primal
    n_prod = len(template.prod_keys)
    n_link = len(template.link_pairs)
    plan_at = n_prod
    actual_at = plan_at + n_link
    dev_at = actual_at + n_link
    short_at = dev_at + n_link
    excess_at = short_at + len(template.regions)
    duals = solution.duals[template.fix_row_start :]
    if not np.all(np.isfinite(duals)):  # pragma: no cover - defensive
        raise LpError(f"subproblem {scenario_id} produced non-finite duals")
    stage = SecondStage(
        production={k: float(x[i]) for i, k in enumerate(template.prod_keys)},
        actual_interchange={
            k: float(x[actual_at + i]) for i, k in enumerate(template.link_pairs)
        },
        deviation={k: float(x[dev_at + i]) for i, k in enumerate(template.link_pairs)},
        shortage={r: float(x[short_at + i]) for i, r in enumerate(template.regions)},
        excess={r: float(x[excess_at + i]) for i, r in enumerate(template.regions)},
    )
    cost = float(solution.objective)
    if cost < 0.0:
        if cost < -1e-6:  # pragma: no cover - defensive
            raise LpError(f"subproblem {scenario_id} cost {cost} is negative")
        cost = 0.0
    return SubproblemResult(
        scenario_id=scenario_id,
        cost=cost,
        duals_plan={
            pair: float(duals[i]) for i, pair in enumerate(template.link_pairs)
        },
        second_stage=stage,
    )


def solve_subproblem(
    instance: PlanningInstance,
    scenario: Scenario,
    fixed_plan: Mapping[tuple[str, str], float],
    lp_options: SolveOptions = SolveOptions(),
) -> SubproblemResult:
    """Optimal second-stage cost, plan duals and recourse point for one scenario.

    The plan must lie within [0, capacity] per link.  The cost is unweighted
    (no probability factor); weighting happens in :func:`aggregate_cut`.
    """
    for link in instance.links:
        pair = (link.from_region, link.to_region)
        value = fixed_plan.get(pair)
        if value is None:
            raise ModelError(f"fixed plan is missing link {pair}")
        if value < -1e-9 or value > link.capacity + 1e-9:
            raise ModelError(
                f"fixed plan {value:g} for link {pair} is outside [0, {link.capacity:g}]"
            )
    template = _build_subproblem(instance, scenario)
    plan_values = _plan_vector(template.link_pairs, fixed_plan)
    return _solve_template(template, scenario.id, plan_values, lp_options)


# ---------------------------------------------------------------------------
# master and cuts
# ---------------------------------------------------------------------------

def aggregate_cut(
    results: Sequence[SubproblemResult],
    probabilities: Mapping[str, float],
    generating_plan: Mapping[tuple[str, str], float],
    source_iteration: int = 0,
) -> Cut:
    """Probability-weighted aggregation of subproblem costs and duals.

    constant = sum_s p_s cost_s - sum_s p_s <duals_s, plan>;
    gradient = sum_s p_s duals_s.  The cut evaluates exactly to the expected
    recourse cost at ``generating_plan``.
    """
    if {r.scenario_id for r in results} != set(probabilities):
        raise ModelError("subproblem results do not match the scenario set")
    pairs = tuple(results[0].duals_plan) if results else ()
    gradient = {pair: 0.0 for pair in pairs}
    constant = 0.0
    for result in results:
        p = probabilities[result.scenario_id]
        constant += p * result.cost
        for pair in pairs:
            gradient[pair] += p * result.duals_plan[pair]
    for pair in pairs:
        constant -= gradient[pair] * 0.0  # gradient applied below at the plan
    constant -= sum(gradient[pair] * generating_plan[pair] for pair in pairs)
    return Cut(constant=constant, gradient=gradient, source_iteration=source_iteration)


def solve_master(
    instance: PlanningInstance,
    cuts: Sequence[Cut],
    alpha_down: float = 0.0,
    lp_options: SolveOptions = SolveOptions(),
) -> tuple[dict[tuple[str, str], float], float]:
    """Plan minimizing first-stage cost plus the cut-supported recourse estimate.

    Returns (plan, lower bound).  With no cuts the recourse estimate rests on
    ``alpha_down``; zero is a valid floor because every subproblem cost is
    nonnegative.
    """
    builder = LpBuilder(name="master")
    plan_i = {}
    for link in instance.links:
        pair = (link.from_region, link.to_region)
        plan_i[pair] = builder.add_variable(
            f"plan[{pair[0]},{pair[1]}]",
            objective=link.transfer_cost,
            lower=0.0,
            upper=link.capacity,
        )
    alpha = builder.add_variable("alpha", objective=1.0, lower=alpha_down)
    for k, cut in enumerate(cuts):
        coeffs = {alpha: 1.0}
        for pair, g in cut.gradient.items():
            coeffs[plan_i[pair]] = coeffs.get(plan_i[pair], 0.0) - g
        builder.add_row(f"cut[{k}]", coeffs, GREATER, cut.constant)
    solution = solve(builder.build(), lp_options)
    if solution.status != SolveStatus.OPTIMAL:
        raise LpError(f"master problem returned {solution.status.value}")
    plan = {
        pair: float(solution.primal[index]) for pair, index in plan_i.items()
    }
    return plan, float(solution.objective)


def first_stage_cost(instance: PlanningInstance, plan: Mapping[tuple[str, str], float]) -> float:
    return sum(
        link.transfer_cost * plan[(link.from_region, link.to_region)]
        for link in instance.links
    )


# ---------------------------------------------------------------------------
# main loop
# ---------------------------------------------------------------------------

def run_benders(
    instance: PlanningInstance, options: BendersOptions = BendersOptions()
) -> BendersReport:
    """Iterate master and subproblems until the relative bound gap closes.

    The lower bound is the running maximum of master objectives (each is a
    valid bound, so the sequence is monotone by construction); the upper
    bound retains the best plan evaluated so far.  On iteration exhaustion
    the full trace is returned with ``converged`` False.
    """
    ensure_valid(instance)
    probabilities = {s.id: s.probability for s in instance.scenarios}
    templates = [(_build_subproblem(instance, s), s.id) for s in instance.scenarios]

    cuts: list[Cut] = []
    records: list[IterationRecord] = []
    lower = -math.inf
    best_upper = math.inf
    best_plan: dict[tuple[str, str], float] | None = None
    best_results: list[SubproblemResult] | None = None
    converged = False
    gap = math.inf

    for index in range(1, options.max_iterations + 1):
        plan, master_objective = solve_master(
            instance, cuts, options.alpha_down, options.lp_options
        )
        lower = max(lower, master_objective)
        results = _solve_all(templates, plan, options)
        expected_recourse = sum(
            probabilities[r.scenario_id] * r.cost for r in results
        )
        upper = first_stage_cost(instance, plan) + expected_recourse
        if upper < best_upper:
            best_upper, best_plan, best_results = upper, plan, results
        gap = (best_upper - lower) / max(1.0, abs(best_upper))
        cut = aggregate_cut(results, probabilities, plan, source_iteration=index)
        records.append(
            IterationRecord(
                index=index,
                plan=plan,
                lower_bound=lower,
                upper_bound=upper,
                best_upper_bound=best_upper,
                gap=gap,
                cut=cut,
            )
        )
        if gap <= options.rel_gap:
            converged = True
            break
        cuts.append(cut)

    assert best_plan is not None and best_results is not None
    final = _assemble_solution(instance, best_plan, best_results, best_upper)
    return BendersReport(
        iterations=tuple(records), final_solution=final, converged=converged, gap=gap
    )


def _solve_all(
    templates: Sequence[tuple[_SubproblemTemplate, str]],
    plan: Mapping[tuple[str, str], float],
    options: BendersOptions,
) -> list[SubproblemResult]:
    tasks = [
        (template, sid, _plan_vector(template.link_pairs, plan))
        for template, sid in templates
    ]
    if options.jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            return list(
                pool.map(
                    lambda t: _solve_template(t[0], t[1], t[2], options.lp_options), tasks
                )
            )
    return [_solve_template(t, sid, v, options.lp_options) for t, sid, v in tasks]


def _assemble_solution(
    instance: PlanningInstance,
    plan: Mapping[tuple[str, str], float],
    results: Sequence[SubproblemResult],
    objective: float,
) -> PlanningSolution:
    production: dict[tuple[str, str, str], float] = {}
    actual: dict[tuple[str, str, str], float] = {}
    deviation: dict[tuple[str, str, str], float] = {}
    shortage: dict[tuple[str, str], float] = {}
    excess: dict[tuple[str, str], float] = {}
    for result in results:
        sid = result.scenario_id
        stage = result.second_stage
        for (region, fuel), value in stage.production.items():
            production[(region, fuel, sid)] = value
        for (frm, to), value in stage.actual_interchange.items():
            actual[(frm, to, sid)] = value
        for (frm, to), value in stage.deviation.items():
            deviation[(frm, to, sid)] = value
        for region, value in stage.shortage.items():
            shortage[(region, sid)] = value
        for region, value in stage.excess.items():
            excess[(region, sid)] = value
    return PlanningSolution(
        production=production,
        planned_interchange=dict(plan),
        actual_interchange=actual,
        deviation=deviation,
        shortage=shortage,
        excess=excess,
        objective_value=float(objective),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _plan_records(plan: Mapping[tuple[str, str], float]) -> list[dict]:
    return [{"from": frm, "to": to, "mwh": value} for (frm, to), value in plan.items()]


def cut_to_dict(cut: Cut) -> dict:
    return {
        "constant": cut.constant,
        "gradient": [
            {"from": frm, "to": to, "value": value}
            for (frm, to), value in cut.gradient.items()
        ],
        "source_iteration": cut.source_iteration,
    }


def report_to_dict(report: BendersReport) -> dict:
    from .model import solution_to_dict

    return {
        "converged": report.converged,
        "gap": report.gap,
        "objective": report.objective,
        "iterations": [
            {
                "iteration": rec.index,
                "plan": _plan_records(rec.plan),
                "lower_bound": rec.lower_bound,
                "upper_bound": rec.upper_bound,
                "best_upper_bound": rec.best_upper_bound,
                "gap": rec.gap,
                "cut": cut_to_dict(rec.cut),
            }
            for rec in report.iterations
        ],
        "final_solution": solution_to_dict(report.final_solution),
    }
