"""Photon loss and photon-counting statistics.

Loss is a beam splitter of transmission eta in front of a perfect
number-resolving detector, identical for all four modes.  The POVM element
for detecting n photons in one mode assigns weight

    eta^n * (m+n)!/(m! n!) * (1-eta)^m

to the |n+m><n+m| projector (m photons lost).  Because every element is
diagonal in photon number, outcome probabilities of a pure state are sums
of per-ket contributions with no cross terms; the equivalence with a dense
amplitude-level computation is asserted in the test suite, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .fock import Ensemble, PureState
from .polarization import Basis, measurement_frame

CountPattern = tuple[int, int, int, int]  # detected (a_h, a_v, b_h, b_v)


@dataclass(frozen=True)
class LossModel:
    """Overall transmission/detection efficiency, equal for all modes."""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")


def povm_weight(detected: int, lost: int, eta: float) -> float:
    """Weight of |detected+lost><detected+lost| in the detection operator."""
    if detected < 0 or lost < 0:
        raise ValueError("photon numbers must be >= 0")
    return math.comb(detected + lost, detected) * eta ** detected \
        * (1.0 - eta) ** lost


@lru_cache(maxsize=None)
def _thinning_row(present: int, eta: float):
    """P(detect k | present photons) for k = 0..present."""
    return tuple(povm_weight(k, present - k, eta) for k in range(present + 1))


@dataclass
class OutcomeDistribution:
    """Probability table over detected count patterns for one basis setting.

    The total may fall short of 1 by the source truncation deficit and by
    max_detected clipping (if any); it never exceeds 1.
    """

    table: dict[CountPattern, float]
    eta: float
    basis_a: Basis
    basis_b: Basis
    source_label: str = ""
    max_detected: int | None = None

    def total(self) -> float:
        return math.fsum(self.table.values())


def outcome_distribution(source, loss: LossModel, basis_a: Basis,
                         basis_b: Basis, max_detected: int | None = None,
                         source_label: str = "") -> OutcomeDistribution:
    """Exact detection statistics of an ensemble under loss.

    Each component is rotated into the measurement frame; each basis ket
    then distributes its probability |amp|^2 over detected counts via the
    product of per-mode thinning weights.  Patterns with more than
    max_detected photons on either side are skipped when a cap is given
    (their mass is simply absent from the table; every kept entry is exact).
    """
    if isinstance(source, PureState):
        source = Ensemble.pure(source)
    eta = loss.eta
    cap = source.cutoff if max_detected is None else int(max_detected)
    table: dict[CountPattern, float] = {}
    for weight, state in source.components:
        if weight == 0.0:
            continue
        framed = measurement_frame(state, basis_a, basis_b)
        for (u, v, w, x), amp in framed.items():
            p = weight * (amp.real * amp.real + amp.imag * amp.imag)
            if p == 0.0:
                continue
            row_u, row_v = _thinning_row(u, eta), _thinning_row(v, eta)
            row_w, row_x = _thinning_row(w, eta), _thinning_row(x, eta)
            for ka in range(min(u, cap) + 1):
                pa = p * row_u[ka]
                if pa == 0.0:
                    continue
                for kb in range(min(v, cap - ka) + 1):
                    pab = pa * row_v[kb]
                    if pab == 0.0:
                        continue
                    for kc in range(min(w, cap) + 1):
                        pabc = pab * row_w[kc]
                        if pabc == 0.0:
                            continue
                        for kd in range(min(x, cap - kc) + 1):
                            q = pabc * row_x[kd]
                            if q == 0.0:
                                continue
                            key = (ka, kb, kc, kd)
                            table[key] = table.get(key, 0.0) + q
    return OutcomeDistribution(table, eta, basis_a, basis_b,
                               source_label=source_label,
                               max_detected=max_detected)


def coincidence_probability(dist: OutcomeDistribution, n: int) -> float:
    """Probability that both sides detect exactly n photons in total."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.fsum(p for (a, b, c, d), p in dist.table.items()
                     if a + b == n and c + d == n)


def is_anticorrelated(pattern: CountPattern) -> bool:
    """True when Bob's counts are the swap of Alice's: (w,x) == (v,u)."""
    a, b, c, d = pattern
    return c == b and d == a


def conditional_error_rate(dist: OutcomeDistribution, n: int) -> float:
    """P(not perfectly anti-correlated | both sides detect n photons)."""
    p_nn = coincidence_probability(dist, n)
    if p_nn <= 0.0:
        raise ValueError(f"no probability mass on {n}-{n} coincidences")
    p_err = math.fsum(p for pat, p in dist.table.items()
                      if pat[0] + pat[1] == n and pat[2] + pat[3] == n
                      and not is_anticorrelated(pat))
    return p_err / p_nn
