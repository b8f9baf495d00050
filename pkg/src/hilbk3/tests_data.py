"""Frozen expansion data used by both the verification suite and the tests.

The rows below are the q^0 and q^1 coefficients of the structure series in
the variable s, stored as {s-exponent: value}.
"""

from .scalars import Q


def _row(d):
    return {k: Q(v) for k, v in d.items()}


PHI_PRINTED = {
    (1, -1): (_row({}), _row({-4: -1, -2: 4, 0: -6, 2: 4, 4: -1})),
    (1, 0): (_row({-1: 1, 1: -1}), _row({-3: -1, -1: 3, 1: -3, 3: 1})),
    (1, 1): (_row({}), _row({-4: 1, -2: -4, 0: 6, 2: -4, 4: 1})),
    (2, -2): (_row({}), _row({-6: -2, -4: 4, -2: 2, 0: -8, 2: 2, 4: 4, 6: -2})),
    (2, -1): (_row({}), _row({-5: -2, -3: 6, -1: -4, 1: -4, 3: 6, 5: -2})),
    (2, 0): (_row({-2: 1, 2: -1}), _row({-4: -4, -2: 8, 2: -8, 4: 4})),
    (2, 1): (_row({}), _row({-5: 2, -3: -6, -1: 4, 1: 4, 3: -6, 5: 2})),
    (2, 2): (_row({}), _row({-6: 2, -4: -4, -2: -2, 0: 8, 2: -2, 4: -4, 6: 2})),
    (3, -2): (_row({}), _row({-7: -3, -5: 6, -1: -3, 1: -3, 5: 6, 7: -3})),
    (3, -1): (_row({}), _row({-6: -3, -4: 9, -2: -9, 0: 6, 2: -9, 4: 9, 6: -3})),
    (3, 0): (_row({-3: 1, 3: -1}), _row({-5: -9, -3: 18, -1: -9, 1: 9, 3: -18, 5: 9})),
    (3, 1): (_row({}), _row({-6: 3, -4: -9, -2: 9, 0: -6, 2: 9, 4: -9, 6: 3})),
    (3, 2): (_row({}), _row({-7: 3, -5: -6, -1: 3, 1: 3, 5: -6, 7: 3})),
    (3, 3): (_row({}), _row({-8: 3, -6: -6, -4: 3, -2: -6, 0: 12, 2: -6, 4: 3, 6: -6, 8: 3})),
    (4, 0): (_row({-4: 1, 4: -1}), _row({-6: -16, -4: 32, -2: -16, 2: 16, 4: -32, 6: 16})),
}
