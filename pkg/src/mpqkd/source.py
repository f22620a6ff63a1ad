"""Source states: generalized singlets, the type-II PDC state, and the
two-mode-squeezer product state used as an independent construction.

The PDC state is a fixed superposition of n-photon-per-side singlets with
amplitude sqrt(n+1) * tanh(tau)^n / cosh(tau)^2 on sector n.  The analytic
prefactor normalizes the infinite sum exactly, so the truncated state is
deliberately NOT re-normalized; the missing tail is reported separately by
truncation_deficit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fock import PureState, make_state


@dataclass(frozen=True)
class PdcParams:
    """Effective interaction time tau >= 0 and per-side cutoff."""

    tau: float
    cutoff: int

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing parameter with |lam| < 1 and per-side cutoff."""

    lam: float
    cutoff: int

    def __post_init__(self):
        if abs(self.lam) >= 1:
            raise ValueError(f"|lam| must be < 1, got {self.lam}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")


def singlet_state(n: int, cutoff: int) -> PureState:
    """Normalized n-photon-per-side singlet.

    Amplitude (-1)^m / sqrt(n+1) on |(n-m),m; m,(n-m)> for m = 0..n.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n > cutoff:
        raise ValueError(f"n={n} exceeds cutoff {cutoff}")
    norm = 1.0 / math.sqrt(n + 1)
    entries = [((n - m, m, m, n - m), (-1.0) ** m * norm) for m in range(n + 1)]
    return make_state(entries, cutoff)


def pdc_state(params: PdcParams) -> PureState:
    """Down-conversion state truncated at the cutoff, not re-normalized."""
    t = math.tanh(params.tau)
    pref = 1.0 / math.cosh(params.tau) ** 2
    entries = []
    for n in range(params.cutoff + 1):
        c = pref * t ** n  # sqrt(n+1) sector weight times 1/sqrt(n+1) per ket
        if c == 0.0 and n > 0:
            break
        for m in range(n + 1):
            entries.append(((n - m, m, m, n - m), (-1.0) ** m * c))
    return make_state(entries, params.cutoff)


def squeezed_pair_state(params: SqueezeParams) -> PureState:
    """Product of the two oppositely-signed two-mode squeezers, un-normalized.

    Written directly in the rearranged form: amplitude lam^n * (-1)^m on
    |(n-m),m; m,(n-m)>, so normalize(squeezed_pair_state(tanh tau)) must
    match the normalized PDC state at the same tau.
    """
    entries = []
    for n in range(params.cutoff + 1):
        c = params.lam ** n
        if c == 0.0 and n > 0:
            break
        for m in range(n + 1):
            entries.append(((n - m, m, m, n - m), (-1.0) ** m * c))
    return make_state(entries, params.cutoff)


def sector_probability(n: int, tau: float) -> float:
    """Probability of the n-photon-per-side sector of the full PDC state."""
    return (n + 1) * math.tanh(tau) ** (2 * n) / math.cosh(tau) ** 4


def truncation_deficit(params: PdcParams) -> float:
    """Probability mass of the PDC state beyond the cutoff.

    The sector sum has the closed form sum_n (n+1) x^n = (1-x)^-2 with
    x = tanh^2(tau), which the cosh^-4 prefactor cancels exactly.
    """
    kept = math.fsum(sector_probability(n, params.tau)
                     for n in range(params.cutoff + 1))
    return max(0.0, 1.0 - kept)
