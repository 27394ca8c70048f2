"""Frozen reference data for the published decompositions: incidence
graph vertex weights and edge sets, pairing cube-edge counts, and
characteristic-polynomial tables."""

from fractions import Fraction


def _f(*coeffs):
    return tuple(Fraction(c) for c in coeffs)


# polynomials as coefficient tuples, constant term first, monic cubics
P_IDEM = _f(0, 0, -1, 1)       # t^3 - t^2            (rank-one idempotent)
P_CYC = _f(0, 1, 1, 1)         # t^3 + t^2 + t
P_ORD4 = _f(-1, 1, -1, 1)      # t^3 - t^2 + t - 1    (order-4 full-rank cube)
P_NIL = _f(0, 0, 0, 1)         # t^3
P_IDEM2 = _f(0, 1, -2, 1)      # t^3 - 2t^2 + t       (trace-2 idempotent)
P_NEG = _f(0, 0, 1, 1)         # t^3 + t^2
P_UNIT = _f(0, 1, -1, 1)       # t^3 - t^2 + t
P_TWO = _f(0, 0, 2, 1)         # t^3 + 2t^2
P_MIX = _f(0, -1, -1, 1)       # t^3 - t^2 - t


def triple(*polys):
    return tuple(sorted(polys))


FINGERPRINT_TABLES = {
    "z4z3": {
        "symmetric": {P_IDEM: 6, P_CYC: 4, P_ORD4: 1},
        "triples": {triple(P_NIL, P_NIL, P_NIL): 4},
    },
    "lader_z3": {
        "symmetric": {P_IDEM: 4, P_CYC: 1},
        "triples": {
            triple(P_IDEM, P_NIL, P_NIL): 3,
            triple(P_NIL, P_NIL, P_CYC): 1,
            triple(P_NIL, P_NIL, P_ORD4): 2,
        },
    },
    "twofix_z3": {
        "symmetric": {P_IDEM2: 1, P_IDEM: 1},
        "triples": {
            triple(P_NIL, P_NIL, P_NIL): 1,
            triple(P_IDEM, P_IDEM, P_CYC): 1,
            triple(P_IDEM, P_NIL, P_NIL): 2,
            triple(P_IDEM, P_IDEM, P_NIL): 2,
            triple(P_IDEM, P_IDEM, P_NEG): 1,
        },
    },
    "addtl1": {
        "symmetric": {P_IDEM: 4, P_CYC: 1},
        "triples": {
            triple(P_NIL, P_NIL, P_NIL): 3,
            triple(P_IDEM, P_NEG, P_NIL): 1,
            triple(P_IDEM, P_NIL, P_UNIT): 1,
            triple(P_IDEM, P_IDEM, P_NIL): 1,
        },
    },
    "addtl2": {
        "symmetric": {P_IDEM: 4, P_CYC: 1},
        "triples": {
            triple(P_IDEM, P_NIL, P_NIL): 1,
            triple(P_NIL, P_NIL, P_NIL): 2,
            triple(P_NEG, P_NEG, P_NIL): 2,
            triple(P_IDEM, P_NIL, P_UNIT): 1,
        },
    },
    "addtl3": {
        "symmetric": {P_IDEM2: 1, P_IDEM: 1},
        "triples": {
            triple(P_IDEM, P_IDEM, P_NEG): 1,
            triple(P_IDEM, P_NEG, P_NIL): 2,
            triple(P_NEG, P_NIL, P_NIL): 1,
            triple(P_NIL, P_NIL, P_NIL): 1,
            triple(P_IDEM, P_IDEM, P_TWO): 1,
            triple(P_NEG, P_NEG, P_MIX): 1,
        },
    },
}


KNOWN_INCIDENCE_GRAPHS = {
    "standard3": {
        "top": {(1, 0, 0): 9, (0, 1, 0): 9, (0, 0, 1): 9},
        "bottom": {(1, 0, 0): 9, (0, 1, 0): 9, (0, 0, 1): 9},
        "edges": {
            ((1, 0, 0), (0, 1, 0)), ((1, 0, 0), (0, 0, 1)),
            ((0, 1, 0), (1, 0, 0)), ((0, 1, 0), (0, 0, 1)),
            ((0, 0, 1), (1, 0, 0)), ((0, 0, 1), (0, 1, 0)),
        },
    },
    "z4z3": {
        "top": {(1, 0, 0): 3, (0, 1, 0): 3, (0, 0, 1): 3,
                (1, 1, 0): 3, (0, 1, 1): 3, (1, 1, 1): 3},
        "bottom": {(1, 0, 0): 4, (0, 0, 1): 4, (1, -1, 0): 4,
                   (0, 1, -1): 4, (0, 1, 0): 1, (1, 0, -1): 1},
        "edges": {
            ((1, 0, 0), (0, 0, 1)), ((1, 0, 0), (0, 1, -1)), ((1, 0, 0), (0, 1, 0)),
            ((0, 1, 0), (1, 0, 0)), ((0, 1, 0), (0, 0, 1)), ((0, 1, 0), (1, 0, -1)),
            ((0, 0, 1), (1, 0, 0)), ((0, 0, 1), (1, -1, 0)), ((0, 0, 1), (0, 1, 0)),
            ((1, 1, 0), (0, 0, 1)), ((1, 1, 0), (1, -1, 0)),
            ((0, 1, 1), (1, 0, 0)), ((0, 1, 1), (0, 1, -1)),
            ((1, 1, 1), (1, -1, 0)), ((1, 1, 1), (0, 1, -1)), ((1, 1, 1), (1, 0, -1)),
        },
    },
    "lader_z3": {
        "top": {(1, 0, 0): 5, (0, 0, 1): 5, (0, 1, 0): 3, (1, 1, 0): 2, (0, 1, -1): 2},
        "bottom": {(1, 0, 0): 5, (0, 0, 1): 5, (0, 1, 0): 3, (1, -1, 0): 2, (0, 1, 1): 2},
        "edges": {
            ((1, 0, 0), (0, 0, 1)), ((1, 0, 0), (0, 1, 0)), ((1, 0, 0), (0, 1, 1)),
            ((0, 0, 1), (1, 0, 0)), ((0, 0, 1), (0, 1, 0)), ((0, 0, 1), (1, -1, 0)),
            ((0, 1, 0), (1, 0, 0)), ((0, 1, 0), (0, 0, 1)),
            ((1, 1, 0), (0, 0, 1)), ((1, 1, 0), (1, -1, 0)),
            ((0, 1, -1), (1, 0, 0)), ((0, 1, -1), (0, 1, 1)),
        },
    },
    "twofix_z3": {
        "top": {(1, 0, 0): 4, (0, 1, 0): 4, (0, 0, 1): 4,
                (1, 1, 1): 3, (0, 1, 1): 2, (1, 1, 0): 1},
        "bottom": {(1, 0, 0): 4, (0, 0, 1): 4, (0, 1, -1): 4,
                   (1, -1, 0): 3, (0, 1, 0): 2, (1, 0, -1): 1},
        "edges": {
            ((1, 0, 0), (0, 0, 1)), ((1, 0, 0), (0, 1, -1)), ((1, 0, 0), (0, 1, 0)),
            ((0, 1, 0), (1, 0, 0)), ((0, 1, 0), (0, 0, 1)), ((0, 1, 0), (1, 0, -1)),
            ((0, 0, 1), (1, 0, 0)), ((0, 0, 1), (1, -1, 0)), ((0, 0, 1), (0, 1, 0)),
            ((1, 1, 1), (0, 1, -1)), ((1, 1, 1), (1, -1, 0)), ((1, 1, 1), (1, 0, -1)),
            ((0, 1, 1), (1, 0, 0)), ((0, 1, 1), (0, 1, -1)),
            ((1, 1, 0), (0, 0, 1)), ((1, 1, 0), (1, -1, 0)),
        },
    },
}

PAIRING_CUBE_EDGE_COUNTS = {
    "standard3": 3,
    "z4z3": 6,
    "lader_z3": 4,
    "twofix_z3": 1,
}


def graph_as_point_edges(graph):
    """Edge set of an IncidenceGraph as (top point, bottom point) pairs."""
    return {
        (graph.top[ti][0], graph.bottom[bi][0])
        for ti, bi in graph.edges
    }


def graph_weights(graph, side):
    return dict(getattr(graph, side))
