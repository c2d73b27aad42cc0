"""Dense linear programs and a bounded-variable revised simplex solver.

Dual-value convention (defined here, once, for the whole package): the dual
reported for a row is the rate of change of the optimal objective per unit
increase of that row's right-hand side.  For a minimization this makes duals
of binding ``<=`` rows nonpositive, duals of ``>=`` rows nonnegative, and
equality-row duals sign-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

LESS = "<="
EQUAL = "="
GREATER = ">="
_RELATIONS = (LESS, EQUAL, GREATER)

# nonbasic/basic markers for the working arrays of the simplex
_BASIC = -1
_AT_LOWER = 0
_AT_UPPER = 1
_FREE = 2

_PIVOT_EPS = 1e-10
_DEGENERATE_STEP = 1e-9
_REFACTOR_PERIOD = 64


class LpError(RuntimeError):
    """Structural misuse of a linear program or an internal solver fault."""


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LinearProgram:
    """A minimization LP: min c'x  s.t.  Ax (<=,=,>=) b,  lower <= x <= upper.

    Arrays are treated as immutable after construction.  Variable names are
    stable keys used by callers to decode solutions.
    """

    objective: np.ndarray
    matrix: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    variable_names: tuple[str, ...]
    row_names: tuple[str, ...]
    name: str = "lp"

    def __post_init__(self) -> None:
        object.__setattr__(self, "objective", np.asarray(self.objective, dtype=float))
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "rhs", np.asarray(self.rhs, dtype=float))
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        n = self.objective.shape[0]
        m = self.rhs.shape[0]
        if self.matrix.shape != (m, n):
            raise LpError(f"matrix shape {self.matrix.shape} does not match {m} rows x {n} variables")
        if len(self.relations) != m or len(self.row_names) != m:
            raise LpError("relations/row_names length does not match row count")
        if len(self.variable_names) != n:
            raise LpError("variable_names length does not match variable count")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise LpError(f"unknown relation {rel!r}")
        if not np.all(np.isfinite(self.objective)):
            raise LpError("objective has non-finite coefficients")
        if not np.all(np.isfinite(self.matrix)):
            raise LpError("constraint matrix has non-finite coefficients")
        if not np.all(np.isfinite(self.rhs)):
            raise LpError("right-hand side has non-finite entries")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise LpError("bounds must not be NaN")
        if np.any(self.lower > self.upper):
            raise LpError("lower bound exceeds upper bound")

    @property
    def num_variables(self) -> int:
        return self.objective.shape[0]

    @property
    def num_rows(self) -> int:
        return self.rhs.shape[0]

    def with_rhs(self, rhs: np.ndarray) -> "LinearProgram":
        """Return a copy with a new right-hand side (same structure)."""
        return replace(self, rhs=np.asarray(rhs, dtype=float))


class LpBuilder:
    """Incremental construction of a :class:`LinearProgram`."""

    def __init__(self, name: str = "lp") -> None:
        self.name = name
        self._objective: list[float] = []
        self._lower: list[float] = []
        self._upper: list[float] = []
        self._var_names: list[str] = []
        self._rows: list[dict[int, float]] = []
        self._relations: list[str] = []
        self._rhs: list[float] = []
        self._row_names: list[str] = []

    def add_variable(
        self,
        name: str,
        *,
        objective: float = 0.0,
        lower: float = 0.0,
        upper: float = math.inf,
    ) -> int:
        self._var_names.append(name)
        self._objective.append(float(objective))
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        return len(self._var_names) - 1

    def add_row(
        self,
        name: str,
        coefficients: Mapping[int, float] | Sequence[tuple[int, float]],
        relation: str,
        rhs: float,
    ) -> int:
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        row: dict[int, float] = {}
        for index, value in items:
            if not 0 <= index < len(self._var_names):
                raise LpError(f"row {name!r} references undeclared variable index {index}")
            row[index] = row.get(index, 0.0) + float(value)
        self._rows.append(row)
        self._relations.append(relation)
        self._rhs.append(float(rhs))
        self._row_names.append(name)
        return len(self._rows) - 1

    def build(self) -> LinearProgram:
        n = len(self._var_names)
        m = len(self._rows)
        matrix = np.zeros((m, n))
        for i, row in enumerate(self._rows):
            for j, value in row.items():
                matrix[i, j] = value
        return LinearProgram(
            objective=np.array(self._objective, dtype=float),
            matrix=matrix,
            relations=tuple(self._relations),
            rhs=np.array(self._rhs, dtype=float),
            lower=np.array(self._lower, dtype=float),
            upper=np.array(self._upper, dtype=float),
            variable_names=tuple(self._var_names),
            row_names=tuple(self._row_names),
            name=self.name,
        )


@dataclass(frozen=True)
class SolveOptions:
    """Solver knobs.  ``max_iterations`` defaults to 50 * (rows + variables)."""

    max_iterations: int | None = None
    feasibility_tol: float = 1e-7
    optimality_tol: float = 1e-9


@dataclass(frozen=True)
class LPSolution:
    """Primal/dual solution of a solve.

    ``primal`` and ``duals`` are populated only for OPTIMAL status.  The
    dual convention is documented in the module docstring.
    """

    status: SolveStatus
    primal: np.ndarray | None
    duals: np.ndarray | None
    objective: float
    iterations: int


@dataclass(frozen=True)
class ResidualReport:
    """Numerical quality of an optimal solution, all residuals relative."""

    max_primal_residual: float
    max_dual_violation: float
    max_complementarity_violation: float
    duality_gap: float


def solve(lp: LinearProgram, options: SolveOptions = SolveOptions()) -> LPSolution:
    """Solve ``lp`` to optimality with a two-phase revised simplex.

    Deterministic: identical inputs produce identical outputs.  Pricing is
    Dantzig's rule, switching to Bland's rule after 3 * rows consecutive
    degenerate pivots to guarantee termination.
    """
    return _Simplex(lp, options).run()


class _Simplex:
    """Bounded-variable revised simplex over [A | slacks | artificials]."""

    def __init__(self, lp: LinearProgram, options: SolveOptions) -> None:
        self.lp = lp
        self.options = options
        n, m = lp.num_variables, lp.num_rows

        # slack per row: <= gives s in [0, inf), >= gives s in (-inf, 0],
        # equality fixes s at zero; the row reads a'x + s = b.
        slack_lower = np.empty(m)
        slack_upper = np.empty(m)
        for i, rel in enumerate(lp.relations):
            if rel == LESS:
                slack_lower[i], slack_upper[i] = 0.0, math.inf
            elif rel == GREATER:
                slack_lower[i], slack_upper[i] = -math.inf, 0.0
            else:
                slack_lower[i], slack_upper[i] = 0.0, 0.0

        self.n_struct = n
        self.m = m
        self.A = np.hstack([lp.matrix, np.eye(m)]) if m else lp.matrix.reshape(0, n)
        self.lower = np.concatenate([lp.lower, slack_lower])
        self.upper = np.concatenate([lp.upper, slack_upper])
        self.cost = np.concatenate([lp.objective, np.zeros(m)])
        self.b = lp.rhs.copy()
        self.artificial_start = n + m

        self.iterations = 0
        self.max_iterations = (
            options.max_iterations
            if options.max_iterations is not None
            else 50 * (m + n)
        )
        self.degenerate_streak = 0
        self.pivots_since_refactor = 0

    # -- setup -----------------------------------------------------------

    def _initial_point(self) -> None:
        total = self.A.shape[1]
        self.where = np.empty(total, dtype=np.int8)
        self.x = np.zeros(total)
        lo, up = self.lower, self.upper
        for j in range(total):
            if math.isfinite(lo[j]):
                self.where[j], self.x[j] = _AT_LOWER, lo[j]
            elif math.isfinite(up[j]):
                self.where[j], self.x[j] = _AT_UPPER, up[j]
            else:
                self.where[j], self.x[j] = _FREE, 0.0

    def _install_basis(self) -> None:
        """Choose slack-or-artificial starting basis; returns nothing.

        Rows whose slack value (at the initial nonbasic point) falls inside
        the slack bounds start with the slack basic; others get one
        artificial column absorbing the residual, making phase 1 necessary.
        """
        m, n = self.m, self.n_struct
        struct_part = self.A[:, :n] @ self.x[:n] if m else np.zeros(0)
        basis = np.empty(m, dtype=np.int64)
        art_cols: list[np.ndarray] = []
        art_rows: list[int] = []
        for i in range(m):
            slack_col = n + i
            value = self.b[i] - struct_part[i]
            lo, up = self.lower[slack_col], self.upper[slack_col]
            if lo - 1e-12 <= value <= up + 1e-12:
                basis[i] = slack_col
                self.where[slack_col] = _BASIC
                self.x[slack_col] = value
            else:
                # park the slack at the bound it violates; artificial takes the rest
                at = up if value > up else lo
                self.where[slack_col] = _AT_UPPER if value > up else _AT_LOWER
                self.x[slack_col] = at
                residual = value - at
                column = np.zeros(m)
                column[i] = 1.0 if residual >= 0 else -1.0
                art_cols.append(column)
                art_rows.append(i)
                basis[i] = self.A.shape[1] + len(art_cols) - 1
        if art_cols:
            self.A = np.hstack([self.A, np.column_stack(art_cols)])
            self.lower = np.concatenate([self.lower, np.zeros(len(art_cols))])
            self.upper = np.concatenate([self.upper, np.full(len(art_cols), math.inf)])
            self.cost = np.concatenate([self.cost, np.zeros(len(art_cols))])
            extra_where = np.full(len(art_cols), _BASIC, dtype=np.int8)
            self.where = np.concatenate([self.where, extra_where])
            extra_x = np.empty(len(art_cols))
            for k, i in enumerate(art_rows):
                residual = self.b[i] - struct_part[i] - self.x[self.n_struct + i]
                extra_x[k] = abs(residual)
            self.x = np.concatenate([self.x, extra_x])
        self.basis = basis
        self.n_artificial = len(art_cols)
        self.binv = self._factorize()

    def _factorize(self) -> np.ndarray:
        if self.m == 0:
            return np.zeros((0, 0))
        try:
            return np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
            raise LpError("basis matrix is singular") from exc

    def _recompute_basics(self) -> None:
        if self.m == 0:
            return
        nonbasic = np.ones(self.A.shape[1], dtype=bool)
        nonbasic[self.basis] = False
        rhs = self.b - self.A[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = self.binv @ rhs

    # -- pivoting --------------------------------------------------------

    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return cost.copy()
        y = cost[self.basis] @ self.binv
        return cost - y @ self.A

    def _choose_entering(self, d: np.ndarray, use_bland: bool, tol: float) -> tuple[int, int] | None:
        movable = self.upper - self.lower > 0
        can_rise = movable & ((self.where == _AT_LOWER) | (self.where == _FREE)) & (d < -tol)
        can_fall = movable & ((self.where == _AT_UPPER) | (self.where == _FREE)) & (d > tol)
        eligible = can_rise | can_fall
        if not eligible.any():
            return None
        if use_bland:
            j = int(np.argmax(eligible))
        else:
            merit = np.where(eligible, np.abs(d), -1.0)
            j = int(np.argmax(merit))
        return j, (1 if can_rise[j] else -1)

    def _ratio_test(self, j: int, direction: int) -> tuple[float, int]:
        """Return (step, blocking basic position) with -1 meaning bound flip.

        Raises nothing; an infinite step is returned as (inf, -2).
        """
        step = self.upper[j] - self.lower[j]
        blocker = -1
        if self.m:
            w = self.binv @ self.A[:, j]
            self._last_direction = w
            xb = self.x[self.basis]
            lo = self.lower[self.basis]
            up = self.upper[self.basis]
            tw = direction * w
            with np.errstate(divide="ignore", invalid="ignore"):
                drop = np.where(tw > _PIVOT_EPS, (xb - lo) / tw, math.inf)
                rise = np.where(tw < -_PIVOT_EPS, (up - xb) / (-tw), math.inf)
            limits = np.minimum(drop, rise)
            limits = np.where(np.isnan(limits), math.inf, limits)
            best = float(limits.min()) if limits.size else math.inf
            if best < step:
                # tie-break toward the largest pivot magnitude, then lowest
                # basis position, for numerical stability and determinism
                near = np.flatnonzero(limits <= best + 1e-12 * max(1.0, abs(best)))
                weights = np.abs(w[near])
                blocker = int(near[int(np.argmax(weights))])
                step = max(best, 0.0)
        else:
            self._last_direction = np.zeros(0)
        if math.isinf(step):
            return math.inf, -2
        return step, blocker

    def _apply_step(self, j: int, direction: int, step: float, blocker: int) -> None:
        if self.m and step != 0.0:
            self.x[self.basis] -= direction * step * self._last_direction
        self.x[j] += direction * step
        if blocker == -1:
            # bound flip, basis unchanged
            self.where[j] = _AT_UPPER if direction == 1 else _AT_LOWER
            self.x[j] = self.upper[j] if direction == 1 else self.lower[j]
            return
        leaving = self.basis[blocker]
        w = self._last_direction
        hit_lower = direction * w[blocker] > 0
        self.x[leaving] = self.lower[leaving] if hit_lower else self.upper[leaving]
        self.where[leaving] = _AT_LOWER if hit_lower else _AT_UPPER
        if leaving >= self.artificial_start:
            # artificials never re-enter once kicked out
            self.lower[leaving] = 0.0
            self.upper[leaving] = 0.0
            self.x[leaving] = 0.0
            self.where[leaving] = _AT_LOWER
        self.basis[blocker] = j
        self.where[j] = _BASIC
        self._update_binv(blocker, w)

    def _update_binv(self, row: int, w: np.ndarray) -> None:
        self.pivots_since_refactor += 1
        if self.pivots_since_refactor >= _REFACTOR_PERIOD:
            self.binv = self._factorize()
            self._recompute_basics()
            self.pivots_since_refactor = 0
            return
        pivot = w[row]
        if abs(pivot) < _PIVOT_EPS:  # pragma: no cover - guarded by ratio test
            raise LpError("zero pivot element")
        pivot_row = self.binv[row] / pivot
        self.binv -= np.outer(w, pivot_row)
        self.binv[row] = pivot_row

    def _loop(self, cost: np.ndarray) -> SolveStatus:
        tol = self.options.optimality_tol * max(1.0, float(np.abs(cost).max(initial=0.0)))
        bland_trigger = 3 * max(self.m, 1)
        while True:
            d = self._reduced_costs(cost)
            use_bland = self.degenerate_streak >= bland_trigger
            picked = self._choose_entering(d, use_bland, tol)
            if picked is None:
                return SolveStatus.OPTIMAL
            if self.iterations >= self.max_iterations:
                return SolveStatus.ITERATION_LIMIT
            self.iterations += 1
            j, direction = picked
            step, blocker = self._ratio_test(j, direction)
            if blocker == -2:
                return SolveStatus.UNBOUNDED
            if step <= _DEGENERATE_STEP:
                self.degenerate_streak += 1
            else:
                self.degenerate_streak = 0
            self._apply_step(j, direction, step, blocker)

    def _expel_artificials(self) -> None:
        """Pivot basic artificials out where possible; fix the rest at zero."""
        for position in range(self.m):
            col = self.basis[position]
            if col < self.artificial_start:
                continue
            tableau_row = self.binv[position] @ self.A
            candidates = np.abs(tableau_row) > 1e-7
            candidates[self.basis] = False
            candidates[self.artificial_start:] = False
            if candidates.any():
                entering = int(np.argmax(np.where(candidates, np.abs(tableau_row), -1.0)))
                w = self.binv @ self.A[:, entering]
                self.x[col] = 0.0
                self.where[col] = _AT_LOWER
                self.lower[col] = self.upper[col] = 0.0
                self.basis[position] = entering
                self.where[entering] = _BASIC
                self._update_binv(position, w)
                self._recompute_basics()
            else:
                # redundant row: keep the artificial basic but pinned at zero
                self.lower[col] = self.upper[col] = 0.0
                self.x[col] = 0.0

    # -- driver ----------------------------------------------------------

    def run(self) -> LPSolution:
        self._initial_point()
        self._install_basis()

        if self.n_artificial:
            phase1_cost = np.zeros(self.A.shape[1])
            phase1_cost[self.artificial_start:] = 1.0
            status = self._loop(phase1_cost)
            if status == SolveStatus.ITERATION_LIMIT:
                return LPSolution(status, None, None, math.nan, self.iterations)
            if status == SolveStatus.UNBOUNDED:  # pragma: no cover - impossible
                raise LpError("phase-1 objective is bounded by construction")
            infeasibility = float(self.x[self.artificial_start:].sum())
            if infeasibility > self.options.feasibility_tol * max(1.0, float(np.abs(self.b).max(initial=0.0))):
                return LPSolution(SolveStatus.INFEASIBLE, None, None, math.nan, self.iterations)
            self._expel_artificials()
            self.lower[self.artificial_start:] = 0.0
            self.upper[self.artificial_start:] = 0.0

        cost = np.zeros(self.A.shape[1])
        cost[: self.n_struct + self.m] = self.cost[: self.n_struct + self.m]
        status = self._loop(cost)
        if status == SolveStatus.UNBOUNDED:
            return LPSolution(SolveStatus.UNBOUNDED, None, None, -math.inf, self.iterations)
        if status == SolveStatus.ITERATION_LIMIT:
            return LPSolution(status, None, None, math.nan, self.iterations)

        # clean refactor before reporting
        self.binv = self._factorize()
        self._recompute_basics()
        primal = self.x[: self.n_struct].copy()
        duals = (cost[self.basis] @ self.binv) if self.m else np.zeros(0)
        objective = float(self.lp.objective @ primal)
        return LPSolution(SolveStatus.OPTIMAL, primal, np.asarray(duals, dtype=float), objective, self.iterations)


def check_solution(lp: LinearProgram, solution: LPSolution) -> ResidualReport:
    """Measure primal/dual residuals of an OPTIMAL solution against ``lp``.

    All quantities are scaled: row residuals by max(1, |rhs|), products and
    the duality gap by max(1, |objective|).  Never mutates its inputs.
    """
    if solution.status != SolveStatus.OPTIMAL or solution.primal is None or solution.duals is None:
        raise LpError("check_solution requires an optimal solution")
    x = solution.primal
    y = solution.duals
    activity = lp.matrix @ x if lp.num_rows else np.zeros(0)
    scale = np.maximum(1.0, np.abs(lp.rhs))
    obj_scale = max(1.0, abs(solution.objective))

    primal_residual = 0.0
    dual_violation = 0.0
    complementarity = 0.0
    for i, rel in enumerate(lp.relations):
        gap = activity[i] - lp.rhs[i]
        if rel == LESS:
            primal_residual = max(primal_residual, gap / scale[i])
            dual_violation = max(dual_violation, y[i])
            complementarity = max(complementarity, abs(y[i]) * max(-gap, 0.0) / obj_scale)
        elif rel == GREATER:
            primal_residual = max(primal_residual, -gap / scale[i])
            dual_violation = max(dual_violation, -y[i])
            complementarity = max(complementarity, abs(y[i]) * max(gap, 0.0) / obj_scale)
        else:
            primal_residual = max(primal_residual, abs(gap) / scale[i])

    bound_violation = np.maximum(lp.lower - x, x - lp.upper)
    bound_violation = bound_violation[np.isfinite(bound_violation)]
    if bound_violation.size:
        primal_residual = max(primal_residual, float(bound_violation.max()))

    reduced = lp.objective - (y @ lp.matrix if lp.num_rows else 0.0)
    dual_objective = float(y @ lp.rhs) if lp.num_rows else 0.0
    for j in range(lp.num_variables):
        d = reduced[j]
        if d > 1e-12:
            if math.isinf(lp.lower[j]):
                dual_violation = max(dual_violation, d)
            else:
                dual_objective += d * lp.lower[j]
                complementarity = max(complementarity, d * (x[j] - lp.lower[j]) / obj_scale)
        elif d < -1e-12:
            if math.isinf(lp.upper[j]):
                dual_violation = max(dual_violation, -d)
            else:
                dual_objective += d * lp.upper[j]
                complementarity = max(complementarity, -d * (lp.upper[j] - x[j]) / obj_scale)

    gap = abs(solution.objective - dual_objective) / obj_scale
    return ResidualReport(
        max_primal_residual=float(max(primal_residual, 0.0)),
        max_dual_violation=float(max(dual_violation, 0.0)),
        max_complementarity_violation=float(max(complementarity, 0.0)),
        duality_gap=float(gap),
    )


def to_mps(lp: LinearProgram) -> str:
    """Render ``lp`` in fixed-field MPS for cross-checking with other solvers.

    Output is byte-deterministic.  Synthetic 8-character names are used in
    the data sections; a comment block maps them to the real names.
    """
    var_ids = [f"X{j + 1:07d}" for j in range(lp.num_variables)]
    row_ids = [f"R{i + 1:07d}" for i in range(lp.num_rows)]
    rel_tag = {LESS: "L", GREATER: "G", EQUAL: "E"}

    def num(value: float) -> str:
        return f"{value:.10G}"

    lines = [f"NAME          {lp.name.upper()[:8]:<8}"]
    for vid, name in zip(var_ids, lp.variable_names):
        lines.append(f"* {vid} = {name}")
    for rid, name in zip(row_ids, lp.row_names):
        lines.append(f"* {rid} = {name}")
    lines.append("ROWS")
    lines.append(" N  OBJ")
    for i, rid in enumerate(row_ids):
        lines.append(f" {rel_tag[lp.relations[i]]}  {rid}")
    lines.append("COLUMNS")
    for j, vid in enumerate(var_ids):
        entries: list[tuple[str, float]] = []
        if lp.objective[j] != 0.0:
            entries.append(("OBJ", float(lp.objective[j])))
        for i, rid in enumerate(row_ids):
            if lp.matrix[i, j] != 0.0:
                entries.append((rid, float(lp.matrix[i, j])))
        for k in range(0, len(entries), 2):
            pair = entries[k : k + 2]
            text = f"    {vid:<8}  {pair[0][0]:<8}  {num(pair[0][1]):<12}"
            if len(pair) == 2:
                text += f"  {pair[1][0]:<8}  {num(pair[1][1]):<12}"
            lines.append(text.rstrip())
    lines.append("RHS")
    for i, rid in enumerate(row_ids):
        if lp.rhs[i] != 0.0:
            lines.append(f"    RHS       {rid:<8}  {num(float(lp.rhs[i])):<12}".rstrip())
    lines.append("BOUNDS")
    for j, vid in enumerate(var_ids):
        lo, up = float(lp.lower[j]), float(lp.upper[j])
        if lo == up:
            lines.append(f" FX BND       {vid:<8}  {num(lo):<12}".rstrip())
            continue
        if math.isinf(lo) and math.isinf(up):
            lines.append(f" FR BND       {vid:<8}")
            continue
        if math.isinf(lo):
            lines.append(f" MI BND       {vid:<8}")
        elif lo != 0.0:
            lines.append(f" LO BND       {vid:<8}  {num(lo):<12}".rstrip())
        if not math.isinf(up):
            lines.append(f" UP BND       {vid:<8}  {num(up):<12}".rstrip())
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"
