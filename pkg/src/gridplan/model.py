"""Planning-problem data model and its compilation to a linear program.

The planning problem covers a set of regions, each with generators grouped
into three fuel categories (fixed output, dispatchable, variable-renewable),
directed transmission links between regions, and a set of probability-weighted
scenarios for demand and renewable availability.  The first-stage decision is
the planned interchange on every link; all other decisions are per-scenario
recourse.  Types are immutable after construction and all operations here are
pure functions, safe to call concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .lp import EQUAL, LESS, LinearProgram, LPSolution, LpBuilder, SolveStatus

PROBABILITY_TOL = 1e-9


class ModelError(ValueError):
    """Structural misuse: invalid instance handed to an operation."""


class FuelCategory(str, Enum):
    FIXED = "fixed"
    DISPATCHABLE = "dispatchable"
    VARIABLE = "variable"


@dataclass(frozen=True)
class FuelSpec:
    id: str
    category: FuelCategory


@dataclass(frozen=True)
class GeneratorSpec:
    """One generator aggregate for a (region, fuel) pair.

    ``rated_power`` caps production in every scenario; ``available_power``
    is the mandated output for fixed fuels and the availability cap for
    dispatchable ones.  Variable fuels draw availability from scenarios.
    All quantities are MWh per planning step; costs are $/MWh.
    """

    region: str
    fuel: str
    category: FuelCategory
    rated_power: float
    available_power: float
    production_cost: float


@dataclass(frozen=True)
class TransmissionLink:
    """Directed interchange corridor; absent links mean zero capacity."""

    from_region: str
    to_region: str
    capacity: float
    transfer_cost: float
    deviation_penalty: float

    @classmethod
    def from_kappa(
        cls, from_region: str, to_region: str, capacity: float, transfer_cost: float, kappa: float
    ) -> "TransmissionLink":
        return cls(from_region, to_region, capacity, transfer_cost, kappa * transfer_cost)


@dataclass(frozen=True)
class Scenario:
    """One joint realization of demand and renewable availability.

    ``demand`` maps region id to MWh; ``vrrg_available`` maps
    (region, fuel) pairs of variable-category generators to MWh.
    """

    id: str
    probability: float
    demand: Mapping[str, float]
    vrrg_available: Mapping[tuple[str, str], float]


@dataclass(frozen=True)
class PlanningInstance:
    """Full parameterization of one planning problem.

    When ``kappa_trans`` is set, every link's deviation penalty must equal
    kappa_trans * transfer_cost and serialization stores the scalar instead
    of per-link penalties.
    """

    regions: tuple[str, ...]
    fuels: tuple[FuelSpec, ...]
    generators: tuple[GeneratorSpec, ...]
    links: tuple[TransmissionLink, ...]
    scenarios: tuple[Scenario, ...]
    shortage_cost: Mapping[str, float]
    kappa_trans: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "fuels", tuple(self.fuels))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "shortage_cost", dict(self.shortage_cost))

    def fuel_category(self, fuel_id: str) -> FuelCategory:
        for fuel in self.fuels:
            if fuel.id == fuel_id:
                return fuel.category
        raise ModelError(f"fuel {fuel_id!r} is not declared")

    def variable_pairs(self) -> tuple[tuple[str, str], ...]:
        """(region, fuel) pairs whose availability is scenario-dependent."""
        return tuple(
            (g.region, g.fuel) for g in self.generators if g.category == FuelCategory.VARIABLE
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class PlanningSolution:
    """Decoded decision variables of a solved instance.

    Keys: production (region, fuel, scenario id); planned interchange
    (from, to); actual interchange and deviation (from, to, scenario id);
    shortage and excess (region, scenario id).
    """

    production: Mapping[tuple[str, str, str], float]
    planned_interchange: Mapping[tuple[str, str], float]
    actual_interchange: Mapping[tuple[str, str, str], float]
    deviation: Mapping[tuple[str, str, str], float]
    shortage: Mapping[tuple[str, str], float]
    excess: Mapping[tuple[str, str], float]
    objective_value: float


@dataclass(frozen=True)
class CostBreakdown:
    generation: float
    transfer: float
    shortage: float
    deviation_penalty: float
    total: float


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_instance(instance: PlanningInstance) -> ValidationReport:
    """Check every data invariant; violations are data, not exceptions.

    An instance that passes is guaranteed compilable by
    :func:`build_extensive_form` (the recourse variables make the resulting
    LP feasible whenever the data are finite).
    """
    v: list[str] = []
    regions = set(instance.regions)
    if not instance.regions:
        v.append("regions: list is empty")
    if len(regions) != len(instance.regions):
        v.append("regions: duplicate region ids")

    fuel_ids = [f.id for f in instance.fuels]
    if len(set(fuel_ids)) != len(fuel_ids):
        v.append("fuels: duplicate fuel ids")
    categories = {f.id: f.category for f in instance.fuels}

    seen_pairs: set[tuple[str, str]] = set()
    for g in instance.generators:
        tag = f"generator ({g.region}, {g.fuel})"
        if g.region not in regions:
            v.append(f"{tag}: undeclared region")
        if g.fuel not in categories:
            v.append(f"{tag}: undeclared fuel")
        elif g.category != categories[g.fuel]:
            v.append(f"{tag}: category {g.category.value} disagrees with fuel list")
        if (g.region, g.fuel) in seen_pairs:
            v.append(f"{tag}: duplicate (region, fuel) pair")
        seen_pairs.add((g.region, g.fuel))
        if not (math.isfinite(g.rated_power) and g.rated_power >= 0):
            v.append(f"{tag}: rated_power {g.rated_power} must be finite and >= 0")
        if not (math.isfinite(g.available_power) and g.available_power >= 0):
            v.append(f"{tag}: available_power {g.available_power} must be finite and >= 0")
        if not (math.isfinite(g.production_cost) and g.production_cost >= 0):
            v.append(f"{tag}: production_cost {g.production_cost} must be finite and >= 0")
        if g.available_power > g.rated_power:
            v.append(
                f"{tag}: available_power {g.available_power:g} exceeds rated_power "
                f"{g.rated_power:g} (mandated output above capacity is contradictory)"
            )

    seen_links: set[tuple[str, str]] = set()
    for link in instance.links:
        tag = f"link ({link.from_region}->{link.to_region})"
        if link.from_region not in regions or link.to_region not in regions:
            v.append(f"{tag}: undeclared region")
        if link.from_region == link.to_region:
            v.append(f"{tag}: self-link is not allowed")
        if (link.from_region, link.to_region) in seen_links:
            v.append(f"{tag}: duplicate directed link")
        seen_links.add((link.from_region, link.to_region))
        for name, value in (
            ("capacity", link.capacity),
            ("transfer_cost", link.transfer_cost),
            ("deviation_penalty", link.deviation_penalty),
        ):
            if not (math.isfinite(value) and value >= 0):
                v.append(f"{tag}: {name} {value} must be finite and >= 0")
        if instance.kappa_trans is not None:
            expected = instance.kappa_trans * link.transfer_cost
            if link.deviation_penalty != expected:
                v.append(
                    f"{tag}: deviation_penalty {link.deviation_penalty!r} != "
                    f"kappa_trans * transfer_cost = {expected!r}"
                )

    if not instance.scenarios:
        v.append("scenarios: list is empty")
    ids = [s.id for s in instance.scenarios]
    if len(set(ids)) != len(ids):
        v.append("scenarios: duplicate scenario ids")
    total = sum(s.probability for s in instance.scenarios)
    if instance.scenarios and abs(total - 1.0) > PROBABILITY_TOL:
        v.append(f"scenarios: probabilities sum to {total:g}, expected 1")
    expected_vrrg = set()
    for g in instance.generators:
        if g.category == FuelCategory.VARIABLE:
            expected_vrrg.add((g.region, g.fuel))
    for s in instance.scenarios:
        tag = f"scenario {s.id}"
        if not (math.isfinite(s.probability) and s.probability > 0):
            v.append(f"{tag}: probability {s.probability} must be > 0")
        if set(s.demand) != regions:
            v.append(f"{tag}: demand keys do not cover exactly the regions")
        for region, value in s.demand.items():
            if not (math.isfinite(value) and value >= 0):
                v.append(f"{tag}: demand[{region}] {value} must be finite and >= 0")
        if set(s.vrrg_available) != expected_vrrg:
            v.append(
                f"{tag}: vrrg_available keys do not cover exactly the "
                f"variable-fuel generator pairs"
            )
        for key, value in s.vrrg_available.items():
            if not (math.isfinite(value) and value >= 0):
                v.append(f"{tag}: vrrg_available[{key}] {value} must be finite and >= 0")

    if set(instance.shortage_cost) != regions:
        v.append("shortage_cost: keys do not cover exactly the regions")
    for region, value in instance.shortage_cost.items():
        if not (math.isfinite(value) and value >= 0):
            v.append(f"shortage_cost[{region}] {value} must be finite and >= 0")

    return ValidationReport(ok=not v, violations=tuple(v))


def ensure_valid(instance: PlanningInstance) -> None:
    report = validate_instance(instance)
    if not report.ok:
        raise ModelError("invalid instance: " + "; ".join(report.violations))


# ---------------------------------------------------------------------------
# variable layout and compilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariableLayout:
    """Deterministic variable ordering shared by compilation and decoding."""

    prod_keys: tuple[tuple[str, str, str], ...]
    plan_keys: tuple[tuple[str, str], ...]
    actual_keys: tuple[tuple[str, str, str], ...]
    short_keys: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, instance: PlanningInstance) -> "VariableLayout":
        scenario_ids = [s.id for s in instance.scenarios]
        prod = tuple(
            (g.region, g.fuel, sid) for g in instance.generators for sid in scenario_ids
        )
        plan = tuple((l.from_region, l.to_region) for l in instance.links)
        actual = tuple(
            (l.from_region, l.to_region, sid) for l in instance.links for sid in scenario_ids
        )
        short = tuple((r, sid) for r in instance.regions for sid in scenario_ids)
        return cls(prod, plan, actual, short)

    @property
    def size(self) -> int:
        return (
            len(self.prod_keys)
            + len(self.plan_keys)
            + 2 * len(self.actual_keys)
            + 2 * len(self.short_keys)
        )

    def offsets(self) -> tuple[int, int, int, int, int, int]:
        prod = 0
        plan = prod + len(self.prod_keys)
        actual = plan + len(self.plan_keys)
        dev = actual + len(self.actual_keys)
        short = dev + len(self.actual_keys)
        excess = short + len(self.short_keys)
        return prod, plan, actual, dev, short, excess


def build_extensive_form(
    instance: PlanningInstance, excess_penalty: float = 0.0
) -> LinearProgram:
    """Compile the full two-stage problem into one deterministic LP.

    The objective charges planned-interchange transfer cost once (it is a
    first-stage decision) and probability-weights generation, shortage and
    deviation costs per scenario.  ``excess_penalty`` defaults to zero:
    surplus generation is reported but not priced.
    """
    ensure_valid(instance)
    layout = VariableLayout.of(instance)
    builder = LpBuilder(name="extensive")
    probability = {s.id: s.probability for s in instance.scenarios}
    gen_by_pair = {(g.region, g.fuel): g for g in instance.generators}
    link_by_pair = {(l.from_region, l.to_region): l for l in instance.links}

    prod_i: dict[tuple[str, str, str], int] = {}
    for region, fuel, sid in layout.prod_keys:
        gen = gen_by_pair[(region, fuel)]
        prod_i[(region, fuel, sid)] = builder.add_variable(
            f"prod[{region},{fuel},{sid}]",
            objective=probability[sid] * gen.production_cost,
        )
    plan_i: dict[tuple[str, str], int] = {}
    for pair in layout.plan_keys:
        plan_i[pair] = builder.add_variable(
            f"plan[{pair[0]},{pair[1]}]", objective=link_by_pair[pair].transfer_cost
        )
    actual_i: dict[tuple[str, str, str], int] = {}
    for frm, to, sid in layout.actual_keys:
        actual_i[(frm, to, sid)] = builder.add_variable(f"actual[{frm},{to},{sid}]")
    dev_i: dict[tuple[str, str, str], int] = {}
    for frm, to, sid in layout.actual_keys:
        dev_i[(frm, to, sid)] = builder.add_variable(
            f"dev[{frm},{to},{sid}]",
            objective=probability[sid] * link_by_pair[(frm, to)].deviation_penalty,
        )
    short_i: dict[tuple[str, str], int] = {}
    for region, sid in layout.short_keys:
        short_i[(region, sid)] = builder.add_variable(
            f"short[{region},{sid}]",
            objective=probability[sid] * instance.shortage_cost[region],
        )
    excess_i: dict[tuple[str, str], int] = {}
    for region, sid in layout.short_keys:
        excess_i[(region, sid)] = builder.add_variable(
            f"excess[{region},{sid}]", objective=probability[sid] * excess_penalty
        )

    _add_capacity_rows(builder, instance, prod_i)
    _add_availability_rows(builder, instance, prod_i)
    for pair, link in ((p, link_by_pair[p]) for p in layout.plan_keys):
        builder.add_row(
            f"plancap[{pair[0]},{pair[1]}]", {plan_i[pair]: 1.0}, LESS, link.capacity
        )
    _add_interchange_rows(builder, instance, plan_i, actual_i, dev_i)
    _add_balance_rows(builder, instance, prod_i, actual_i, short_i, excess_i)
    return builder.build()


def _add_capacity_rows(builder: LpBuilder, instance: PlanningInstance, prod_i) -> None:
    for g in instance.generators:
        for s in instance.scenarios:
            builder.add_row(
                f"cap[{g.region},{g.fuel},{s.id}]",
                {prod_i[(g.region, g.fuel, s.id)]: 1.0},
                LESS,
                g.rated_power,
            )


def _add_availability_rows(builder: LpBuilder, instance: PlanningInstance, prod_i) -> None:
    for g in instance.generators:
        for s in instance.scenarios:
            index = {prod_i[(g.region, g.fuel, s.id)]: 1.0}
            if g.category == FuelCategory.FIXED:
                builder.add_row(
                    f"fix[{g.region},{g.fuel},{s.id}]", index, EQUAL, g.available_power
                )
            elif g.category == FuelCategory.DISPATCHABLE:
                builder.add_row(
                    f"avail[{g.region},{g.fuel},{s.id}]", index, LESS, g.available_power
                )
            else:
                builder.add_row(
                    f"vavail[{g.region},{g.fuel},{s.id}]",
                    index,
                    LESS,
                    s.vrrg_available[(g.region, g.fuel)],
                )


def _add_interchange_rows(
    builder: LpBuilder, instance: PlanningInstance, plan_i, actual_i, dev_i
) -> None:
    for link in instance.links:
        pair = (link.from_region, link.to_region)
        for s in instance.scenarios:
            key = (link.from_region, link.to_region, s.id)
            builder.add_row(
                f"flowcap[{key[0]},{key[1]},{key[2]}]",
                {actual_i[key]: 1.0, plan_i[pair]: -1.0},
                LESS,
                0.0,
            )
    for link in instance.links:
        pair = (link.from_region, link.to_region)
        for s in instance.scenarios:
            key = (link.from_region, link.to_region, s.id)
            builder.add_row(
                f"devdef[{key[0]},{key[1]},{key[2]}]",
                {dev_i[key]: 1.0, plan_i[pair]: -1.0, actual_i[key]: 1.0},
                EQUAL,
                0.0,
            )


def _add_balance_rows(
    builder: LpBuilder, instance: PlanningInstance, prod_i, actual_i, short_i, excess_i
) -> None:
    outgoing: dict[str, list[tuple[str, str]]] = {r: [] for r in instance.regions}
    incoming: dict[str, list[tuple[str, str]]] = {r: [] for r in instance.regions}
    for link in instance.links:
        outgoing[link.from_region].append((link.from_region, link.to_region))
        incoming[link.to_region].append((link.from_region, link.to_region))
    fuels_at: dict[str, list[str]] = {r: [] for r in instance.regions}
    for g in instance.generators:
        fuels_at[g.region].append(g.fuel)
    for region in instance.regions:
        for s in instance.scenarios:
            coeffs: dict[int, float] = {}
            for fuel in fuels_at[region]:
                coeffs[prod_i[(region, fuel, s.id)]] = 1.0
            for pair in outgoing[region]:
                coeffs[actual_i[(pair[0], pair[1], s.id)]] = -1.0
            for pair in incoming[region]:
                coeffs[actual_i[(pair[0], pair[1], s.id)]] = 1.0
            coeffs[short_i[(region, s.id)]] = 1.0
            coeffs[excess_i[(region, s.id)]] = -1.0
            builder.add_row(
                f"balance[{region},{s.id}]", coeffs, EQUAL, s.demand[region]
            )


def extract_solution(instance: PlanningInstance, lp_solution: LPSolution) -> PlanningSolution:
    """Decode an optimal LP solution of the extensive form by variable layout."""
    if lp_solution.status != SolveStatus.OPTIMAL or lp_solution.primal is None:
        raise ModelError(f"cannot extract from a {lp_solution.status.value} solution")
    layout = VariableLayout.of(instance)
    x = lp_solution.primal
    if x.shape[0] != layout.size:
        raise ModelError(
            f"solution has {x.shape[0]} variables, instance compiles to {layout.size}"
        )
    prod_at, plan_at, actual_at, dev_at, short_at, excess_at = layout.offsets()
    production = {key: float(x[prod_at + i]) for i, key in enumerate(layout.prod_keys)}
    planned = {key: float(x[plan_at + i]) for i, key in enumerate(layout.plan_keys)}
    actual = {key: float(x[actual_at + i]) for i, key in enumerate(layout.actual_keys)}
    deviation = {key: float(x[dev_at + i]) for i, key in enumerate(layout.actual_keys)}
    shortage = {key: float(x[short_at + i]) for i, key in enumerate(layout.short_keys)}
    excess = {key: float(x[excess_at + i]) for i, key in enumerate(layout.short_keys)}
    return PlanningSolution(
        production=production,
        planned_interchange=planned,
        actual_interchange=actual,
        deviation=deviation,
        shortage=shortage,
        excess=excess,
        objective_value=float(lp_solution.objective),
    )


def cost_breakdown(instance: PlanningInstance, solution: PlanningSolution) -> CostBreakdown:
    """Split a solution's cost into its four objective term families."""
    probability = {s.id: s.probability for s in instance.scenarios}
    gen_cost = {(g.region, g.fuel): g.production_cost for g in instance.generators}
    link_cost = {(l.from_region, l.to_region): l for l in instance.links}

    generation = sum(
        probability[sid] * gen_cost[(region, fuel)] * value
        for (region, fuel, sid), value in solution.production.items()
    )
    transfer = sum(
        link_cost[pair].transfer_cost * value
        for pair, value in solution.planned_interchange.items()
    )
    shortage = sum(
        probability[sid] * instance.shortage_cost[region] * value
        for (region, sid), value in solution.shortage.items()
    )
    deviation = sum(
        probability[sid] * link_cost[(frm, to)].deviation_penalty * value
        for (frm, to, sid), value in solution.deviation.items()
    )
    total = generation + transfer + shortage + deviation
    return CostBreakdown(
        generation=float(generation),
        transfer=float(transfer),
        shortage=float(shortage),
        deviation_penalty=float(deviation),
        total=float(total),
    )


def balance_residuals(instance: PlanningInstance, solution: PlanningSolution) -> dict[tuple[str, str], float]:
    """Signed residual of the balance equation per (region, scenario id)."""
    residuals: dict[tuple[str, str], float] = {}
    for s in instance.scenarios:
        for region in instance.regions:
            total = 0.0
            for g in instance.generators:
                if g.region == region:
                    total += solution.production[(region, g.fuel, s.id)]
            for link in instance.links:
                key = (link.from_region, link.to_region, s.id)
                if link.from_region == region:
                    total -= solution.actual_interchange[key]
                if link.to_region == region:
                    total += solution.actual_interchange[key]
            total += solution.shortage[(region, s.id)]
            total -= solution.excess[(region, s.id)]
            residuals[(region, s.id)] = total - s.demand[region]
    return residuals


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def instance_to_dict(instance: PlanningInstance) -> dict:
    links = []
    for link in instance.links:
        entry = {
            "from": link.from_region,
            "to": link.to_region,
            "capacity": link.capacity,
            "transfer_cost": link.transfer_cost,
        }
        if instance.kappa_trans is None:
            entry["deviation_penalty"] = link.deviation_penalty
        links.append(entry)
    data = {
        "regions": list(instance.regions),
        "fuels": [{"id": f.id, "category": f.category.value} for f in instance.fuels],
        "generators": [
            {
                "region": g.region,
                "fuel": g.fuel,
                "rated_power": g.rated_power,
                "available_power": g.available_power,
                "production_cost": g.production_cost,
            }
            for g in instance.generators
        ],
        "links": links,
        "scenarios": [scenario_to_dict(s) for s in instance.scenarios],
        "shortage_cost": dict(instance.shortage_cost),
    }
    if instance.kappa_trans is not None:
        data["kappa_trans"] = instance.kappa_trans
    return data


def scenario_to_dict(scenario: Scenario) -> dict:
    vrrg: dict[str, dict[str, float]] = {}
    for (region, fuel), value in scenario.vrrg_available.items():
        vrrg.setdefault(region, {})[fuel] = value
    return {
        "id": scenario.id,
        "probability": scenario.probability,
        "demand": dict(scenario.demand),
        "vrrg_available": vrrg,
    }


def scenario_from_dict(data: Mapping) -> Scenario:
    vrrg: dict[tuple[str, str], float] = {}
    for region, per_fuel in data.get("vrrg_available", {}).items():
        for fuel, value in per_fuel.items():
            vrrg[(region, fuel)] = float(value)
    return Scenario(
        id=str(data["id"]),
        probability=float(data["probability"]),
        demand={str(k): float(v) for k, v in data["demand"].items()},
        vrrg_available=vrrg,
    )


def instance_from_dict(data: Mapping) -> PlanningInstance:
    fuels = tuple(FuelSpec(str(f["id"]), FuelCategory(f["category"])) for f in data["fuels"])
    categories = {f.id: f.category for f in fuels}
    kappa = data.get("kappa_trans")
    generators = tuple(
        GeneratorSpec(
            region=str(g["region"]),
            fuel=str(g["fuel"]),
            category=categories[str(g["fuel"])],
            rated_power=float(g["rated_power"]),
            available_power=float(g["available_power"]),
            production_cost=float(g["production_cost"]),
        )
        for g in data["generators"]
    )
    links = []
    for entry in data["links"]:
        transfer_cost = float(entry["transfer_cost"])
        if kappa is not None:
            penalty = float(kappa) * transfer_cost
        else:
            penalty = float(entry["deviation_penalty"])
        links.append(
            TransmissionLink(
                from_region=str(entry["from"]),
                to_region=str(entry["to"]),
                capacity=float(entry["capacity"]),
                transfer_cost=transfer_cost,
                deviation_penalty=penalty,
            )
        )
    return PlanningInstance(
        regions=tuple(str(r) for r in data["regions"]),
        fuels=fuels,
        generators=generators,
        links=tuple(links),
        scenarios=tuple(scenario_from_dict(s) for s in data["scenarios"]),
        shortage_cost={str(k): float(v) for k, v in data["shortage_cost"].items()},
        kappa_trans=None if kappa is None else float(kappa),
    )


def instance_to_json(instance: PlanningInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n"


def instance_from_json(text: str) -> PlanningInstance:
    return instance_from_dict(json.loads(text))


def solution_to_dict(solution: PlanningSolution) -> dict:
    def records(mapping: Mapping, names: tuple[str, ...]) -> list[dict]:
        rows = []
        for key, value in mapping.items():
            row = dict(zip(names, key)) if isinstance(key, tuple) else {names[0]: key}
            row["mwh"] = value
            rows.append(row)
        return rows

    return {
        "objective_value": solution.objective_value,
        "production": records(solution.production, ("region", "fuel", "scenario")),
        "planned_interchange": records(solution.planned_interchange, ("from", "to")),
        "actual_interchange": records(solution.actual_interchange, ("from", "to", "scenario")),
        "deviation": records(solution.deviation, ("from", "to", "scenario")),
        "shortage": records(solution.shortage, ("region", "scenario")),
        "excess": records(solution.excess, ("region", "scenario")),
    }


def solution_from_dict(data: Mapping) -> PlanningSolution:
    def mapping(rows: Iterable[Mapping], names: tuple[str, ...]) -> dict:
        result = {}
        for row in rows:
            key = tuple(row[name] for name in names)
            result[key if len(key) > 1 else key[0]] = float(row["mwh"])
        return result

    return PlanningSolution(
        production=mapping(data["production"], ("region", "fuel", "scenario")),
        planned_interchange=mapping(data["planned_interchange"], ("from", "to")),
        actual_interchange=mapping(data["actual_interchange"], ("from", "to", "scenario")),
        deviation=mapping(data["deviation"], ("from", "to", "scenario")),
        shortage=mapping(data["shortage"], ("region", "scenario")),
        excess=mapping(data["excess"], ("region", "scenario")),
        objective_value=float(data["objective_value"]),
    )


def breakdown_to_dict(breakdown: CostBreakdown) -> dict:
    return {
        "generation": breakdown.generation,
        "transfer": breakdown.transfer,
        "shortage": breakdown.shortage,
        "deviation_penalty": breakdown.deviation_penalty,
        "total": breakdown.total,
    }


def breakdown_from_dict(data: Mapping) -> CostBreakdown:
    return CostBreakdown(
        generation=float(data["generation"]),
        transfer=float(data["transfer"]),
        shortage=float(data["shortage"]),
        deviation_penalty=float(data["deviation_penalty"]),
        total=float(data["total"]),
    )
