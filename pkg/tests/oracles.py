"""Step-by-step checks shared by the stabilizer unit tests and the acceptance suite."""
import numpy as np

from adapt_clifford.adapt import DEFAULT_POLICY, INACTIVE, init_run, step
from adapt_clifford.solution import J_SIDE, K_SIDE
from adapt_clifford.stabilizer import (
    PauliString,
    apply_rotation,
    expectation,
    gradient_full,
    init_flipped_plus,
    rotation_for,
)

import statevector as sv


def tableau_walk(g, k, tie_break=DEFAULT_POLICY):
    """Run the combinatorial walk and mirror every gate on a tableau.

    Yields ``(state, cache, tableau)`` before each placement from step 2 on.
    """
    state, cache = init_run(g, k, tie_break)
    t = init_flipped_plus(g.n, k)
    apply_rotation(t, rotation_for(g.n, k, state.j, first=True))
    while state.inactive:
        yield state, cache, t
        b, side = step(state, cache, g, tie_break)
        anchor = state.k if side == K_SIDE else state.j
        apply_rotation(t, rotation_for(g.n, anchor, b))


def step_checks(g, k, tol=1e-9):
    """Count restricted-pair and simplified-gradient violations over one run.

    Returns ``(steps, restricted_violations, gradient_violations, worst_err)``.
    """
    steps = restricted_bad = grad_bad = 0
    worst = 0.0
    for state, cache, t in tableau_walk(g, k):
        steps += 1
        active = np.flatnonzero(state.label != INACTIVE).tolist()
        inactive = np.flatnonzero(state.label == INACTIVE).tolist()
        full = {(a, b): gradient_full(t, g, a, b) for a in active for b in inactive}
        restricted = max(v for (a, _), v in full.items() if a in (state.k, state.j))
        if abs(max(full.values()) - restricted) > tol:
            restricted_bad += 1
        for b in inactive:
            err = max(abs(full[state.k, b] - cache.g[b]), abs(full[state.j, b] + cache.g[b]))
            worst = max(worst, err)
            if err > tol:
                grad_bad += 1
    return steps, restricted_bad, grad_bad, worst


def statevector_mismatches(n, k, gate_trace, tol=1e-9):
    """Compare tableau expectations of all weight <= 3 X/Z strings with a dense state."""
    from itertools import combinations, product

    states = sv.run_states(n, k, gate_trace)
    t = init_flipped_plus(n, k)
    tabs = [t.copy()]
    j = gate_trace[0][1]
    apply_rotation(t, rotation_for(n, k, j, first=True))
    tabs.append(t.copy())
    for side, b in gate_trace[1:]:
        apply_rotation(t, rotation_for(n, k if side == K_SIDE else j, b))
        tabs.append(t.copy())
    bad = 0
    paulis = []
    for w in (1, 2, 3):
        for qs in combinations(range(n), min(w, n)):
            for ops in product("XYZ", repeat=len(qs)):
                paulis.append(PauliString.from_ops(n, dict(zip(qs, ops))))
    for psi, tab in zip(states, tabs):
        for p in paulis:
            if abs(sv.pauli_expectation(psi, p.x, p.z) - expectation(tab, p)) > tol:
                bad += 1
    return bad
