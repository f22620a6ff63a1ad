"""The calibrated source-substitution attack.

Eve controls the source and replaces the lossy lines by ideal ones.  On the
2- and 4-photon key classes she sends the corresponding singlet, except for
a fraction gamma of pulses where she substitutes a product state with the
correct anti-correlations in one of the two bases, chosen at random.  Wrong
basis guesses introduce correlation errors, and gamma is calibrated so the
error frequency on each class exactly matches the natural (loss-induced)
one.  Everything else (vacuum, odd counts, higher photon numbers) is lumped
into a rest component that never contributes key material.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .fock import Ensemble, PureState, make_state
from .infotheory import JointDistribution
from .measurement import (LossModel, conditional_error_rate,
                          coincidence_probability, outcome_distribution)
from .polarization import CROSS_ANGLE, Basis, Side, rotate
from .source import PdcParams, pdc_state, singlet_state

KEY_CLASSES = (1, 2)


class CalibrationError(ValueError):
    """The attack cannot reproduce the requested error rate."""


class EveKind(Enum):
    SINGLET = "singlet"
    PRODUCT = "product"
    REST = "rest"


@dataclass(frozen=True)
class EveRecord:
    """What Eve knows about one pulse: which component she sent."""

    kind: EveKind
    basis: Basis | None = None   # basis a PRODUCT state is committed to
    slot: int | None = None      # which correlated product ket was sent

    def __post_init__(self):
        if self.kind is EveKind.PRODUCT:
            if self.basis is None or self.slot is None:
                raise ValueError("PRODUCT records carry basis and slot")
        elif self.basis is not None or self.slot is not None:
            raise ValueError(f"{self.kind} records carry no basis/slot")


@dataclass(frozen=True)
class EveStrategy:
    """Calibrated attack parameters for one (eta, tau) operating point."""

    gamma_1: float
    gamma_2: float
    p11: float
    p22: float

    def __post_init__(self):
        for name in ("gamma_1", "gamma_2", "p11", "p22"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.p11 + self.p22 > 1.0 + 1e-12:
            raise ValueError("p11 + p22 exceeds 1")

    @property
    def p_rest(self) -> float:
        return max(0.0, 1.0 - self.p11 - self.p22)

    def gamma(self, n: int) -> float:
        if n == 1:
            return self.gamma_1
        if n == 2:
            return self.gamma_2
        raise ValueError(f"no gamma for class {n}")

    def p_nn(self, n: int) -> float:
        if n == 1:
            return self.p11
        if n == 2:
            return self.p22
        raise ValueError(f"no pulse probability for class {n}")


@dataclass(frozen=True)
class NaturalProfile:
    """Loss-induced coincidence and error statistics of the PDC source."""

    eta: float
    tau: float
    cutoff: int
    p11: float
    p22: float
    e1: float
    e2: float
    joint_1: JointDistribution   # (A letter, B letter) given a 1-1 event
    joint_2: JointDistribution   # same, given a 2-2 event

    def p_nn(self, n: int) -> float:
        return {1: self.p11, 2: self.p22}[n]

    def e_n(self, n: int) -> float:
        return {1: self.e1, 2: self.e2}[n]

    def joint(self, n: int) -> JointDistribution:
        return {1: self.joint_1, 2: self.joint_2}[n]


def _class_joint(dist, n: int) -> JointDistribution:
    """(A, B) letter table conditioned on an n-n coincidence."""
    mass = coincidence_probability(dist, n)
    table = {}
    for (a, b, c, d), p in dist.table.items():
        if a + b == n and c + d == n and p > 0.0:
            key = ((a, b), (c, d))
            table[key] = table.get(key, 0.0) + p / mass
    return JointDistribution(table)


def natural_error_profile(eta: float, tau: float, cutoff: int) -> NaturalProfile:
    """Coincidence probabilities and conditional error rates the legitimate
    users expect from the lossy PDC source (same-basis measurements).

    By the joint rotation invariance of the source the statistics do not
    depend on which common basis is used; they are evaluated in h/v.
    """
    source = pdc_state(PdcParams(tau=tau, cutoff=cutoff))
    dist = outcome_distribution(source, LossModel(eta), Basis.PLUS,
                                Basis.PLUS, max_detected=max(KEY_CLASSES),
                                source_label=f"pdc(tau={tau})")
    p11 = coincidence_probability(dist, 1)
    p22 = coincidence_probability(dist, 2)
    return NaturalProfile(
        eta=eta, tau=tau, cutoff=cutoff, p11=p11, p22=p22,
        e1=conditional_error_rate(dist, 1),
        e2=conditional_error_rate(dist, 2),
        joint_1=_class_joint(dist, 1),
        joint_2=_class_joint(dist, 2),
    )


def _product_ket(n: int, m: int) -> PureState:
    """|(n-m),m; m,(n-m)> at the minimal cutoff."""
    return make_state([((n - m, m, m, n - m), 1.0)], cutoff=n)


def eve_component_states(n: int):
    """The singlet plus the 2(n+1) basis-committed product states of class n.

    A CROSS-committed product is the PLUS ket rotated by +45 degrees on
    both sides, so that measuring it in the CROSS basis reproduces its slot
    outcome with certainty.
    """
    if n not in KEY_CLASSES:
        raise ValueError(f"unsupported photon class {n}")
    components = [(EveRecord(EveKind.SINGLET), singlet_state(n, n))]
    for basis in (Basis.PLUS, Basis.CROSS):
        for m in range(n + 1):
            ket = _product_ket(n, m)
            if basis is Basis.CROSS:
                ket = rotate(ket, CROSS_ANGLE, Side.BOTH)
            components.append((EveRecord(EveKind.PRODUCT, basis, m), ket))
    return components


@dataclass(frozen=True)
class TaggedComponent:
    record: EveRecord
    weight: float
    state: PureState


def eve_ensemble(n: int, gamma: float):
    """Class-n mixture: weight (1-gamma) on the singlet and gamma/(2(n+1))
    on each basis-committed product state."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    w_prod = gamma / (2.0 * (n + 1))
    out = []
    for record, state in eve_component_states(n):
        w = (1.0 - gamma) if record.kind is EveKind.SINGLET else w_prod
        out.append(TaggedComponent(record, w, state))
    return out


def as_ensemble(components) -> Ensemble:
    return Ensemble(tuple((c.weight, c.state) for c in components))


@lru_cache(maxsize=None)
def wrong_basis_error_weight(n: int) -> float:
    """w_n: error probability of the uniform product mixture, folded with
    the 1/2 chance that Eve's basis differs from the measurement basis.

    eve_error_rate is exactly linear in gamma with this slope.
    """
    errs = []
    for m in range(n + 1):
        dist = outcome_distribution(_product_ket(n, m), LossModel(1.0),
                                    Basis.CROSS, Basis.CROSS)
        errs.append(conditional_error_rate(dist, n))
    return 0.5 * math.fsum(errs) / (n + 1)


def eve_error_rate(n: int, gamma: float) -> float:
    """Conditional error rate Alice and Bob see on class-n events when Eve
    delivers eve_ensemble(n, gamma) over ideal lines."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return gamma * wrong_basis_error_weight(n)


def calibrate_gamma(n: int, eta: float, tau: float, cutoff: int,
                    profile: NaturalProfile | None = None) -> float:
    """Solve eve_error_rate(n, gamma) = natural e_n for gamma.

    Raises CalibrationError when the natural error rate exceeds the largest
    rate the attack can produce (e_n > w_n); the failure is reported, never
    silently clamped.
    """
    if profile is None:
        profile = natural_error_profile(eta, tau, cutoff)
    e_n = profile.e_n(n)
    w_n = wrong_basis_error_weight(n)
    gamma = e_n / w_n
    if gamma > 1.0 + 1e-12:
        raise CalibrationError(
            f"attack cannot reproduce error rate on class {n}: "
            f"e_{n}={e_n:.6g} exceeds w_{n}={w_n:.6g} "
            f"(eta={eta}, tau={tau})")
    return min(gamma, 1.0)


def tripartite_distribution(strategy: EveStrategy,
                            classes=KEY_CLASSES) -> JointDistribution:
    """Joint (A, B, E) distribution over key events.

    Key events are same-basis pulses on which both sides detect a photon
    number in the protocol's class set; Eve delivers losslessly, so every
    class-n pulse she sends is such an event.  The table is normalized over
    the key-event subspace (the sifting probability is carried separately).
    A and B labels are detected count pairs; the E label pairs Eve's record
    with the announced measurement basis, which is public.
    """
    class_mass = math.fsum(strategy.p_nn(n) for n in classes)
    if class_mass <= 0.0:
        raise ValueError("no probability mass on the requested classes")
    table: dict = {}
    for n in classes:
        w_class = strategy.p_nn(n) / class_mass
        if w_class == 0.0:
            continue
        components = eve_ensemble(n, strategy.gamma(n))
        for measured in (Basis.PLUS, Basis.CROSS):
            for comp in components:
                w = 0.5 * w_class * comp.weight
                if w == 0.0:
                    continue
                dist = outcome_distribution(comp.state, LossModel(1.0),
                                            measured, measured)
                for (a, b, c, d), p in dist.table.items():
                    key = ((a, b), (c, d), (comp.record, measured))
                    table[key] = table.get(key, 0.0) + w * p
    return JointDistribution(table)


def eve_information_bound(n: int, gamma: float) -> float:
    """Information credited to Eve on class n, in bits per key event.

    Eve is counted as knowing the full letter on every pulse where she
    substituted a product state (the singlet pulses tell her nothing), i.e.
    gamma * log2(n+1).  This upper-bounds the record-level mutual
    information, where wrong basis guesses only pay off partially, and is
    the accounting under which the secrecy capacity is a minimum.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return gamma * math.log2(n + 1)
