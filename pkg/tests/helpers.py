"""Shared test utilities."""
from __future__ import annotations

import itertools
from dataclasses import replace

from vtsearch.decoder import named_assignment
from vtsearch.encoder import Cnf, Encoding, encode_problem
from vtsearch.solver import Status, solve


def extends_to_model(enc: Encoding, vts, dropped=(), time_limit=120) -> Status:
    """Is there a model of ``enc`` whose named bits describe ``vts``?

    Symmetry breaking is switched off first: it may admit only a relabelled
    copy of ``vts``.
    """
    if enc.config.symmetry_breaking:
        enc = encode_problem(replace(enc.config, symmetry_breaking=False))
    units = [[v if val else -v] for v, val in named_assignment(vts, enc.varmap, dropped).items()]
    cnf = Cnf(enc.cnf.num_vars, enc.cnf.clauses + units)
    return solve(cnf, time_limit=time_limit).status


def projected_models(cnf: Cnf, lits) -> list[tuple[bool, ...]]:
    """Every assignment to ``lits`` that extends to a model of ``cnf``.

    Enumerates all 2^len(lits) assignments and asks the solver about each one.
    """
    from pysat.solvers import Solver

    out = []
    with Solver(name="cadical195", bootstrap_with=cnf.clauses) as s:
        for bits in itertools.product((False, True), repeat=len(lits)):
            if s.solve(assumptions=[x if b else -x for x, b in zip(lits, bits)]):
                out.append(bits)
    return out
