"""Polarization rotations as exact linear-optics transformations on Fock kets.

Convention (used everywhere in this package): rotating by theta maps the
creation operators as

    h+ -> cos(theta) h+ + sin(theta) v+
    v+ -> -sin(theta) h+ + cos(theta) v+

so theta = +pi/4 sends h+ to the diagonal mode h'+ = (h+ + v+)/sqrt(2) and
v+ to v'+ = (v+ - h+)/sqrt(2).  The action on a ket |p,q> follows from the
binomial expansion of the transformed operator powers and is exact within
each fixed-photon-number sector.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

from .fock import PureState


class Basis(Enum):
    """Measurement basis: PLUS is h/v, CROSS is the 45-degree rotated h'/v'."""

    PLUS = "plus"
    CROSS = "cross"


class Side(Enum):
    ALICE = "alice"
    BOB = "bob"
    BOTH = "both"


CROSS_ANGLE = math.pi / 4


@lru_cache(maxsize=None)
def _pair_rotation(p: int, q: int, theta: float):
    """Amplitudes of the rotated two-mode ket |p,q>.

    Returns a tuple of (r, coeff) with coeff the amplitude on |r, p+q-r>.
    Coefficients use exact integer combinatorics before the final sqrt.
    """
    c, s = math.cos(theta), math.sin(theta)
    fp, fq = math.factorial(p), math.factorial(q)
    out = []
    for r in range(p + q + 1):
        acc = 0.0
        for i in range(max(0, r - q), min(p, r) + 1):
            j = r - i
            acc += (math.comb(p, i) * math.comb(q, j) * (-1.0) ** j
                    * c ** (i + q - j) * s ** (p - i + j))
        if acc != 0.0:
            ratio = (math.factorial(r) * math.factorial(p + q - r)) / (fp * fq)
            out.append((r, acc * math.sqrt(ratio)))
    return tuple(out)


def rotate(state: PureState, theta: float, side: Side = Side.BOTH,
           drop_tol: float = 0.0) -> PureState:
    """Rotate the polarization basis of one or both sides by theta.

    Unitary: the norm is preserved and photon number per side is conserved
    exactly (support never leaves a sector).
    """
    if side is Side.BOTH:
        return rotate(rotate(state, theta, Side.ALICE, drop_tol),
                      theta, Side.BOB, drop_tol)
    if theta == 0.0:
        return state
    acc: dict = {}
    for (u, v, w, x), a in state.items():
        if side is Side.ALICE:
            for r, coeff in _pair_rotation(u, v, theta):
                key = (r, u + v - r, w, x)
                acc[key] = acc.get(key, 0j) + a * coeff
        else:
            for r, coeff in _pair_rotation(w, x, theta):
                key = (u, v, r, w + x - r)
                acc[key] = acc.get(key, 0j) + a * coeff
    return PureState(acc, state.cutoff, drop_tol=drop_tol)


def measurement_frame(state: PureState, basis_a: Basis, basis_b: Basis,
                      drop_tol: float = 0.0) -> PureState:
    """Rotate into the frame where photon counting in h/v realizes the
    chosen bases: a CROSS side is rotated by -45 degrees, so counting h/v
    of the returned state equals counting h'/v' of the input."""
    if basis_a is Basis.CROSS:
        state = rotate(state, -CROSS_ANGLE, Side.ALICE, drop_tol)
    if basis_b is Basis.CROSS:
        state = rotate(state, -CROSS_ANGLE, Side.BOB, drop_tol)
    return state
