"""Brute-force reference computations, deliberately independent of the library's tensor code.

Every function loops over complete assignments with itertools and reads CPT
entries one at a time through a plain dict keyed by parent values.
"""

import itertools
from fractions import Fraction


def cpt_lookup(model):
    """{variable: (parents, {parent_values: row})}"""
    out = {}
    for cpt in model.cpts:
        out[cpt.variable] = (cpt.parents, {cfg: list(row) for cfg, row in cpt.rows()})
    return out


def assignments(model):
    return itertools.product(*(range(v.cardinality) for v in model.variables))


def truncated_weight(lookup, x, intervention):
    w = 1.0
    for var, (parents, rows) in lookup.items():
        if var in intervention:
            if x[var] != intervention[var]:
                return 0.0
            continue
        w *= rows[tuple(x[p] for p in parents)][x[var]]
    return w


def brute_query(model, target, value, intervention=None, evidence=None):
    intervention = intervention or {}
    evidence = evidence or {}
    lookup = cpt_lookup(model)
    num = den = 0.0
    for x in assignments(model):
        if any(x[v] != s for v, s in evidence.items()):
            continue
        w = truncated_weight(lookup, x, intervention)
        den += w
        if x[target] == value:
            num += w
    return num / den if evidence else num


def brute_map(model, intervention, order):
    """MAP outcome; ties broken towards the smallest state vector read in ``order``."""
    lookup = cpt_lookup(model)
    best, best_key, best_w = None, None, -1.0
    for x in assignments(model):
        w = truncated_weight(lookup, x, intervention)
        key = tuple(x[v] for v in order)
        if w > best_w * (1 + 1e-12) or (abs(w - best_w) <= 1e-12 * max(w, best_w) and key < best_key):
            best, best_key, best_w = x, key, w
    return tuple(best), best_w


# default test scenario in exact decimal arithmetic
F = Fraction
P_DISEASE_A = F("0.5")
P_SURVIVES = {"pill": F("0.9"), "surgery": F("0.5")}
P_LIVES_GIVEN_SURVIVES = {("A", "pill"): F("0.1"), ("A", "surgery"): F("0.95"),
                          ("B", "pill"): F("0.9"), ("B", "surgery"): F("0.2")}


def exact_p_lives(treatment):
    """Closed form  sum_d P(d) P(survives | t) P(lives | d, t, survives);  P(lives | dies) = 0."""
    return sum((P_DISEASE_A if d == "A" else 1 - P_DISEASE_A) * P_SURVIVES[treatment]
               * P_LIVES_GIVEN_SURVIVES[(d, treatment)] for d in ("A", "B"))
