"""Shannon entropies, mutual information, and the secrecy-capacity bound.

All logarithms are base 2; quantities are in bits.  Mutual information is
the standard I(A;B) = H(A) + H(B) - H(A,B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SUM_TOL = 1e-10


def entropy(probs) -> float:
    """Shannon entropy in bits of a probability list (0 log 0 = 0)."""
    probs = list(probs)
    for p in probs:
        if p < 0:
            raise ValueError(f"negative probability {p}")
    total = math.fsum(probs)
    if abs(total - 1.0) > SUM_TOL:
        raise ValueError(f"probabilities sum to {total}, expected 1")
    return -math.fsum(p * math.log2(p) for p in probs if p > 0.0)


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over discrete outcome tuples of arity 2 or 3."""

    table: dict

    def __post_init__(self):
        if not self.table:
            raise ValueError("empty joint distribution")
        arities = {len(k) for k in self.table}
        if arities not in ({2}, {3}):
            raise ValueError(f"keys must have uniform arity 2 or 3, got {arities}")
        for k, p in self.table.items():
            if p < 0:
                raise ValueError(f"negative probability {p} at {k}")
        total = math.fsum(self.table.values())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @property
    def arity(self) -> int:
        return len(next(iter(self.table)))

    def marginal(self, axis: int) -> dict:
        out: dict = {}
        for key, p in self.table.items():
            out[key[axis]] = out.get(key[axis], 0.0) + p
        return out

    def pair_marginal(self, i: int, j: int) -> "JointDistribution":
        out: dict = {}
        for key, p in self.table.items():
            k = (key[i], key[j])
            out[k] = out.get(k, 0.0) + p
        return JointDistribution(out)

    def condition(self, predicate) -> "JointDistribution":
        """Restrict to keys satisfying predicate and renormalize."""
        kept = {k: p for k, p in self.table.items() if predicate(k)}
        mass = math.fsum(kept.values())
        if mass <= 0.0:
            raise ValueError("conditioning event has zero probability")
        return JointDistribution({k: p / mass for k, p in kept.items()})


def mutual_information(joint: JointDistribution) -> float:
    """I(A;B) in bits for an arity-2 joint distribution."""
    if joint.arity != 2:
        raise ValueError("mutual_information expects an arity-2 joint")
    h_a = entropy(joint.marginal(0).values())
    h_b = entropy(joint.marginal(1).values())
    h_ab = entropy(joint.table.values())
    return max(0.0, h_a + h_b - h_ab)


def secrecy_capacity_bound(i_ab: float, i_ae: float, i_be: float,
                           q_sift: float) -> float:
    """Usable lower bound on the secret bit rate per pulse.

    q_sift * max(0, I_AB - min(I_AE, I_BE)); the bound is vacuous when
    negative, so it is clamped at zero.
    """
    for name, v in (("i_ab", i_ab), ("i_ae", i_ae), ("i_be", i_be),
                    ("q_sift", q_sift)):
        if v < 0:
            raise ValueError(f"{name} must be >= 0, got {v}")
    return q_sift * max(0.0, i_ab - min(i_ae, i_be))
