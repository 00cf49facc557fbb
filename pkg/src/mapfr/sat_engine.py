"""Embedded incremental propositional satisfiability engine.

Conflict-driven clause learning with two-watched-literal propagation,
first-UIP learning, phase saving, activity-based decisions and geometric
restarts.  The clause database only grows between solves (the refinement
loop never retracts anything), learned clauses persist across calls, and
the whole engine is deterministic: identical operation sequences produce
identical answers and models.

Literals are nonzero ints (+v / -v), clauses are lists of literals.
"""

from __future__ import annotations

import heapq
import time

Literal = int
Clause = list[int]


class SolveTimeout(Exception):
    """Raised when solve() exceeds its deadline."""


class SolverState:
    def __init__(self) -> None:
        self.num_vars = 0
        self.clauses: list[Clause] = []  # original clauses, normalized
        self.learned: list[Clause] = []
        self.unsat = False  # permanently UNSAT (empty clause or root conflict)
        self.meta: dict = {}  # scratch space for callers (e.g. encoder watermarks)
        # per-variable arrays, index 0 unused
        self._assign: list[int] = [0]  # 0 undef, 1 true, -1 false
        self._level: list[int] = [0]
        self._reason: list[Clause | None] = [None]
        self._phase: list[bool] = [False]
        self._activity: list[float] = [0.0]
        # watch lists indexed by literal code 2v / 2v+1
        self._watches: list[list[Clause]] = [[], []]
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._pending_units: list[int] = []
        self._var_inc = 1.0


def _code(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def new_variable(state: SolverState) -> int:
    """Allocate a fresh variable; ids are strictly increasing and never reused."""
    state.num_vars += 1
    state._assign.append(0)
    state._level.append(0)
    state._reason.append(None)
    state._phase.append(False)
    state._activity.append(0.0)
    state._watches.append([])
    state._watches.append([])
    return state.num_vars


def add_clause(state: SolverState, literals: list[int]) -> None:
    """Add a clause permanently.  Tautologies are dropped silently; an empty
    clause marks the state unsatisfiable."""
    nv = state.num_vars
    n = len(literals)
    if n == 1:  # fast path: unit
        lit = literals[0]
        if not 1 <= (lit if lit > 0 else -lit) <= nv:
            raise ValueError(f"literal {lit} references unallocated variable")
        state.clauses.append([lit])
        state._pending_units.append(lit)
        return
    if n == 2:  # fast path: binary clauses dominate the encodings
        a, b = literals
        va = a if a > 0 else -a
        vb = b if b > 0 else -b
        if not (1 <= va <= nv and 1 <= vb <= nv):
            raise ValueError(f"literal {a} or {b} references unallocated variable")
        if va == vb:
            if a != b:
                return  # tautology
            state.clauses.append([a])
            state._pending_units.append(a)
            return
        clause = [a, b]
        state.clauses.append(clause)
        state._watches[(a << 1) if a > 0 else ((va << 1) | 1)].append(clause)
        state._watches[(b << 1) if b > 0 else ((vb << 1) | 1)].append(clause)
        return
    seen: dict[int, int] = {}
    for lit in literals:
        var = abs(lit)
        if not 1 <= var <= nv:
            raise ValueError(f"literal {lit} references unallocated variable")
        prev = seen.get(var)
        if prev is None:
            seen[var] = lit
        elif prev != lit:
            return  # tautology x and not-x
    clause = list(seen.values())
    state.clauses.append(clause)
    if not clause:
        state.unsat = True
        return
    if len(clause) == 1:
        state._pending_units.append(clause[0])
        return
    state._watches[_code(clause[0])].append(clause)
    state._watches[_code(clause[1])].append(clause)


def add_at_most_one(state: SolverState, variables: list[int]) -> None:
    """Pairwise encoding: no two of the given variables may both be true."""
    for i in range(len(variables)):
        for j in range(i + 1, len(variables)):
            add_clause(state, [-variables[i], -variables[j]])


def to_dimacs(state: SolverState) -> str:
    lines = [f"p cnf {state.num_vars} {len(state.clauses)}"]
    for clause in state.clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return "\n".join(lines) + "\n"


def _value(state: SolverState, lit: int) -> int:
    v = state._assign[abs(lit)]
    return v if lit > 0 else -v


def _enqueue(state: SolverState, lit: int, reason: Clause | None) -> None:
    var = abs(lit)
    state._assign[var] = 1 if lit > 0 else -1
    state._level[var] = len(state._trail_lim)
    state._reason[var] = reason
    state._trail.append(lit)


def _backtrack(state: SolverState, level: int) -> None:
    if len(state._trail_lim) <= level:
        return
    limit = state._trail_lim[level]
    assign, phase = state._assign, state._phase
    for lit in reversed(state._trail[limit:]):
        var = abs(lit)
        phase[var] = lit > 0
        assign[var] = 0
        state._reason[var] = None
    del state._trail[limit:]
    del state._trail_lim[level:]
    state._qhead = len(state._trail)


def _propagate(state: SolverState) -> Clause | None:
    trail = state._trail
    watches = state._watches
    assign = state._assign
    while state._qhead < len(trail):
        p = trail[state._qhead]
        state._qhead += 1
        neg = -p
        wl = watches[_code(neg)]
        i = j = 0
        n = len(wl)
        while i < n:
            clause = wl[i]
            i += 1
            if clause[0] == neg:
                clause[0], clause[1] = clause[1], neg
            first = clause[0]
            val = assign[first] if first > 0 else -assign[-first]
            if val == 1:
                wl[j] = clause
                j += 1
                continue
            for k in range(2, len(clause)):
                lk = clause[k]
                vk = assign[lk] if lk > 0 else -assign[-lk]
                if vk != -1:
                    clause[1], clause[k] = lk, neg
                    watches[_code(lk)].append(clause)
                    break
            else:
                wl[j] = clause
                j += 1
                if val == -1:
                    # conflict; keep the remaining watchers in place
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return clause
                _enqueue(state, first, clause)
        del wl[j:]
    return None


def _bump(state: SolverState, var: int) -> None:
    state._activity[var] += state._var_inc
    if state._activity[var] > 1e100:
        act = state._activity
        for v in range(1, state.num_vars + 1):
            act[v] *= 1e-100
        state._var_inc *= 1e-100


def _analyze(state: SolverState, conflict: Clause) -> tuple[list[int], int]:
    """First-UIP conflict analysis; returns (learnt clause, backjump level)."""
    level = len(state._trail_lim)
    seen = bytearray(state.num_vars + 1)
    learnt: list[int] = [0]
    counter = 0
    p = 0
    index = len(state._trail) - 1
    clause: Clause | None = conflict
    while True:
        assert clause is not None
        for q in clause if p == 0 else clause[1:]:
            var = abs(q)
            if not seen[var] and state._level[var] > 0:
                seen[var] = 1
                _bump(state, var)
                if state._level[var] >= level:
                    counter += 1
                else:
                    learnt.append(q)
        while not seen[abs(state._trail[index])]:
            index -= 1
        p = state._trail[index]
        clause = state._reason[abs(p)]
        seen[abs(p)] = 0
        counter -= 1
        index -= 1
        if counter == 0:
            break
    learnt[0] = -p
    if len(learnt) == 1:
        return learnt, 0
    # place a literal from the backjump level at position 1
    max_i = 1
    for i in range(2, len(learnt)):
        if state._level[abs(learnt[i])] > state._level[abs(learnt[max_i])]:
            max_i = i
    learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
    return learnt, state._level[abs(learnt[1])]


def solve(state: SolverState, *, deadline: float | None = None) -> dict[int, bool] | None:
    """Complete satisfying assignment, or None when unsatisfiable.

    Deterministic under the default decision heuristic.  An optional
    monotonic-clock deadline raises SolveTimeout when exceeded.
    """
    if state.unsat:
        return None
    _backtrack(state, 0)
    state._qhead = 0
    for lit in state._pending_units:
        val = _value(state, lit)
        if val == -1:
            state.unsat = True
            return None
        if val == 0:
            _enqueue(state, lit, None)
    state._pending_units.clear()

    activity = state._activity
    assign = state._assign
    order = [(-activity[v], v) for v in range(1, state.num_vars + 1) if assign[v] == 0]
    heapq.heapify(order)

    conflicts_total = 0
    conflicts_since_restart = 0
    restart_limit = 100

    while True:
        conflict = _propagate(state)
        if conflict is not None:
            if not state._trail_lim:
                state.unsat = True
                return None
            conflicts_total += 1
            conflicts_since_restart += 1
            if deadline is not None and conflicts_total % 256 == 0 and time.monotonic() > deadline:
                raise SolveTimeout
            learnt, back_level = _analyze(state, conflict)
            _backtrack(state, back_level)
            if len(learnt) == 1:
                _enqueue(state, learnt[0], None)
            else:
                state.learned.append(learnt)
                state._watches[_code(learnt[0])].append(learnt)
                state._watches[_code(learnt[1])].append(learnt)
                _enqueue(state, learnt[0], learnt)
            state._var_inc /= 0.95
            for q in learnt:
                var = abs(q)
                heapq.heappush(order, (-activity[var], var))
            if conflicts_since_restart >= restart_limit:
                conflicts_since_restart = 0
                restart_limit = int(restart_limit * 1.5)
                _backtrack(state, 0)
        else:
            lit = 0
            while order:
                _, var = heapq.heappop(order)
                if assign[var] == 0:
                    lit = var if state._phase[var] else -var
                    break
            if lit == 0:
                # vars unassigned by backtracking may have left the heap; rebuild
                order = [(-activity[v], v) for v in range(1, state.num_vars + 1) if assign[v] == 0]
                if not order:
                    return {v: assign[v] == 1 for v in range(1, state.num_vars + 1)}
                heapq.heapify(order)
                _, var = heapq.heappop(order)
                lit = var if state._phase[var] else -var
            state._trail_lim.append(len(state._trail))
            _enqueue(state, lit, None)
