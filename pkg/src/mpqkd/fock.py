"""Sparse states over a truncated four-mode Fock space.

The four modes are Alice's and Bob's horizontal/vertical polarization modes
(a_h, a_v, b_h, b_v).  A basis ket is written |u,v;w,x> and stored as the
occupation tuple (u, v, w, x).  The truncation is per side: a state with
cutoff N only carries kets with u+v <= N and w+x <= N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

NORM_TOL = 1e-12

# occupation numbers (n_ah, n_av, n_bh, n_bv)
FockIndex = tuple[int, int, int, int]


class FockSpaceError(ValueError):
    """An occupation index violates the cutoff (or is malformed)."""


class ZeroNormError(ValueError):
    """Normalization was requested for a state of norm zero."""


def check_index(index, cutoff: int) -> FockIndex:
    """Validate one occupation tuple against a per-side cutoff."""
    idx = tuple(int(n) for n in index)
    if len(idx) != 4:
        raise FockSpaceError(f"expected 4 occupation numbers, got {index!r}")
    if any(n < 0 for n in idx):
        raise FockSpaceError(f"negative occupation in {idx}")
    if idx[0] + idx[1] > cutoff or idx[2] + idx[3] > cutoff:
        raise FockSpaceError(f"index {idx} exceeds per-side cutoff {cutoff}")
    return idx


class PureState:
    """Immutable sparse amplitude map over four-mode Fock kets.

    Amplitudes are complex doubles keyed by occupation tuples.  Exact zeros
    are never stored; amplitudes with modulus <= drop_tol are dropped at
    construction time (default 0.0, i.e. exact within the cutoff).
    """

    __slots__ = ("cutoff", "_amp")

    def __init__(self, entries, cutoff: int, drop_tol: float = 0.0):
        cutoff = int(cutoff)
        if cutoff < 1:
            raise FockSpaceError(f"cutoff must be >= 1, got {cutoff}")
        self.cutoff = cutoff
        amp: dict[FockIndex, complex] = {}
        items = entries.items() if isinstance(entries, dict) else entries
        for index, a in items:
            idx = check_index(index, cutoff)
            a = complex(a)
            prev = amp.get(idx)
            a = a if prev is None else prev + a
            if a == 0 or abs(a) <= drop_tol:
                amp.pop(idx, None)
            else:
                amp[idx] = a
        self._amp = amp

    def amplitude(self, index) -> complex:
        return self._amp.get(tuple(index), 0j)

    def items(self):
        return self._amp.items()

    def indices(self):
        return self._amp.keys()

    def __len__(self) -> int:
        return len(self._amp)

    def __repr__(self) -> str:
        return f"PureState({len(self._amp)} kets, cutoff={self.cutoff})"

    def norm_squared(self) -> float:
        # fsum keeps the reduction independent of dict iteration order
        return math.fsum(abs(a) ** 2 for a in self._amp.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def side_totals(self):
        """Set of (alice_total, bob_total) photon numbers with support."""
        return {(u + v, w + x) for (u, v, w, x) in self._amp}

    def to_records(self) -> list[dict]:
        """Dump format: one record per ket, sorted lexicographically."""
        recs = []
        for (u, v, w, x) in sorted(self._amp):
            a = self._amp[(u, v, w, x)]
            recs.append({"nah": u, "nav": v, "nbh": w, "nbv": x,
                         "re": a.real, "im": a.imag})
        return recs

    def to_json(self) -> str:
        return json.dumps(self.to_records())


def make_state(entries, cutoff: int) -> PureState:
    """Build a state with exactly the given amplitudes (no normalization).

    Raises FockSpaceError naming the offending index if any entry lies
    outside the cutoff.  An empty entry list yields the zero state.
    """
    return PureState(entries, cutoff)


def normalize(state: PureState) -> PureState:
    """Scale a state to unit norm by a single positive real factor."""
    n = state.norm()
    if n == 0.0:
        raise ZeroNormError("cannot normalize a zero state")
    s = 1.0 / n
    return PureState({idx: a * s for idx, a in state.items()}, state.cutoff)


def inner_product(s1: PureState, s2: PureState) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    if s1.cutoff != s2.cutoff:
        raise FockSpaceError(
            f"cutoff mismatch: {s1.cutoff} vs {s2.cutoff}")
    if len(s2) < len(s1):
        return inner_product(s2, s1).conjugate()
    return sum((s1._amp[idx].conjugate() * s2._amp[idx]
                for idx in s1._amp.keys() & s2._amp.keys()), 0j)


def fidelity(s1: PureState, s2: PureState) -> float:
    """|<s1|s2>|^2 between the normalized states."""
    n1 = s1.norm_squared()
    n2 = s2.norm_squared()
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroNormError("fidelity of a zero state is undefined")
    return abs(inner_product(s1, s2)) ** 2 / (n1 * n2)


@dataclass(frozen=True)
class Ensemble:
    """Probabilistic mixture of pure states (weights sum to 1)."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        if any(w < -NORM_TOL for w, _ in comps):
            raise ValueError("ensemble weights must be non-negative")
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"ensemble weights sum to {total}, expected 1")
        cutoffs = {s.cutoff for _, s in comps}
        if len(cutoffs) != 1:
            raise ValueError(f"components disagree on cutoff: {sorted(cutoffs)}")

    @classmethod
    def pure(cls, state: PureState) -> "Ensemble":
        return cls(((1.0, state),))

    @property
    def cutoff(self) -> int:
        return self.components[0][1].cutoff
