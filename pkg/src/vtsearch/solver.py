"""SAT back end: embedded solving, DIMACS export and solver-output import.

Native back ends come from python-sat.  A name like ``"kissat404+glucose4"``
races the listed solvers in forked children and keeps the first definitive
answer; ``backend="cdcl"`` uses the pure-Python solver in :mod:`vtsearch.cdcl`.  Every satisfying assignment
is checked against all clauses before it is returned.
"""
from __future__ import annotations

import enum
import multiprocessing as mp
from multiprocessing.connection import wait as mp_wait
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .cdcl import CdclSolver
from .encoder import Cnf

# neither solver dominates on these formulas, so race two by default
DEFAULT_BACKEND = "kissat404+glucose4"


class Status(enum.Enum):
    SAT = "Sat"
    UNSAT = "Unsat"
    UNKNOWN = "Unknown"


class SolverInternalError(RuntimeError):
    """A back end returned an assignment that falsifies the formula."""


@dataclass
class SolverResult:
    status: Status
    assignment: list[bool] | None = None  # indexed by variable, [0] unused
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT


def _shuffled(cnf: Cnf, seed: int) -> list[list[int]]:
    if not seed:
        return cnf.clauses
    rng = random.Random(seed)
    clauses = [list(cl) for cl in cnf.clauses]
    rng.shuffle(clauses)
    for cl in clauses:
        rng.shuffle(cl)
    return clauses


def _run_pysat(name: str, num_vars: int, clauses) -> tuple[bool, list[int] | None, dict]:
    from pysat.solvers import Solver

    with Solver(name=name, bootstrap_with=clauses) as s:
        ok = s.solve()
        model = s.get_model() if ok else None
        try:
            st = s.accum_stats() or {}
        except NotImplementedError:
            st = {}
    return ok, model, {"conflicts": st.get("conflicts"), "decisions": st.get("decisions")}


def _child(conn, name, num_vars, clauses):
    try:
        conn.send(("ok", _run_pysat(name, num_vars, clauses)))
    except BaseException as exc:  # pragma: no cover - reported to the parent
        conn.send(("error", repr(exc)))
    finally:
        conn.close()


def _run_pysat_limited(names, num_vars, clauses, time_limit):
    """Run native solvers in forked children; the first answer wins.

    Returns ``(name, payload)`` or ``None`` when the time limit passes.
    """
    ctx = mp.get_context("fork")
    running = {}
    for name in names:
        recv, send = ctx.Pipe(duplex=False)
        proc = ctx.Process(target=_child, args=(send, name, num_vars, clauses), daemon=True)
        proc.start()
        send.close()
        running[recv] = (name, proc)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    errors = []
    try:
        while running:
            left = None if deadline is None else max(0.0, deadline - time.monotonic())
            ready = mp_wait(list(running), left)
            if not ready:
                return None
            for conn in ready:
                name, _ = running.pop(conn)
                try:
                    kind, payload = conn.recv()
                except EOFError:
                    kind, payload = "error", "child exited without an answer"
                conn.close()
                if kind == "ok":
                    return name, payload
                errors.append(f"{name}: {payload}")
        raise RuntimeError("solver process failed: " + "; ".join(errors))
    finally:
        for conn, (_, proc) in running.items():
            if proc.is_alive():
                proc.kill()
            proc.join()
            conn.close()


def _to_assignment(num_vars: int, model) -> list[bool]:
    out = [False] * (num_vars + 1)
    for lit in model:
        if abs(lit) <= num_vars:
            out[abs(lit)] = lit > 0
    return out


def self_check(cnf: Cnf, assignment: list[bool]) -> None:
    bad = cnf.evaluate(assignment)
    if bad is not None:
        raise SolverInternalError(f"model falsifies clause {bad}: {cnf.clauses[bad]}")


def solve(cnf: Cnf, time_limit: float | None = None, seed: int = 0,
          backend: str | None = None) -> SolverResult:
    """Decide ``cnf``.  A timeout gives ``Status.UNKNOWN``, never UNSAT.

    A nonzero ``seed`` shuffles clause and literal order for native back ends
    and randomizes decisions for the built-in solver.
    """
    cnf.check()
    backend = backend or os.environ.get("VTSEARCH_BACKEND", DEFAULT_BACKEND)
    start = time.monotonic()
    clauses = _shuffled(cnf, seed)
    stats: dict = {"backend": backend}
    if backend == "cdcl":
        solver = CdclSolver(cnf.num_vars, clauses, seed=seed)
        deadline = start + time_limit if time_limit is not None else None
        res = solver.solve(deadline)
        stats.update(conflicts=solver.conflicts, decisions=solver.decisions)
        assignment = solver.model() if res else None
    else:
        names = backend.split("+")
        if time_limit is None and len(names) == 1:
            won = backend, _run_pysat(backend, cnf.num_vars, clauses)
        else:
            won = _run_pysat_limited(names, cnf.num_vars, clauses, time_limit)
        if won is None:
            res, assignment = None, None
        else:
            stats["backend"], (res, model, st) = won
            stats.update(st)
            assignment = _to_assignment(cnf.num_vars, model) if res else None
    stats["wall_seconds"] = time.monotonic() - start
    if res is None:
        return SolverResult(Status.UNKNOWN, None, stats)
    if not res:
        return SolverResult(Status.UNSAT, None, stats)
    self_check(cnf, assignment)
    return SolverResult(Status.SAT, assignment, stats)


# -- files --------------------------------------------------------------------

def export_dimacs(cnf: Cnf, path, comments: list[str] | None = None) -> Path:
    path = Path(path)
    path.write_text(cnf.to_dimacs(comments))
    return path


class SolverOutputError(ValueError):
    pass


def parse_solver_output(text: str, num_vars: int) -> SolverResult:
    """Read the competition output format (``s`` and ``v`` lines)."""
    status = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            status = {"SATISFIABLE": Status.SAT, "UNSATISFIABLE": Status.UNSAT,
                      "UNKNOWN": Status.UNKNOWN}.get(word)
            if status is None:
                raise SolverOutputError(f"unknown status line {line!r}")
        elif line.startswith("v "):
            try:
                lits.extend(int(tok) for tok in line[2:].split())
            except ValueError as exc:
                raise SolverOutputError(f"bad value line {line!r}") from exc
    if status is None:
        raise SolverOutputError("no status line in solver output")
    if status is not Status.SAT:
        return SolverResult(status, None, {"backend": "external"})
    if any(abs(l) > num_vars for l in lits):
        raise SolverOutputError("value line mentions a variable beyond the formula")
    return SolverResult(status, _to_assignment(num_vars, [l for l in lits if l]), {"backend": "external"})


def import_assignment(path, cnf: Cnf) -> SolverResult:
    """Load an external solver's output for ``cnf`` and self-check a model."""
    result = parse_solver_output(Path(path).read_text(), cnf.num_vars)
    if result.sat:
        self_check(cnf, result.assignment)
    return result
