"""Secure-rate evaluation: natural profile -> calibrated attack -> capacity.

The standard protocol keys only on 2-photon coincidences (one photon per
side); the multi-photon protocol additionally keys on 4-photon ones.  Key
events pool across classes, but since the detected photon number is itself
observed (and Eve knows which class she sent), all informations are
conditioned per class and averaged with the class weights.  The capacity
lower bound subtracts the class-averaged informations once:

    cs_min = q_sift * max(0, I_AB - min(I_AE, I_BE)),  q_sift = sum p_nn / 2.

I_AE/I_BE credit Eve with the full letter on every substituted pulse (see
adversary.eve_information_bound); the exact record-level mutual
informations are reported alongside as i_ae_record/i_be_record, as is the
Alice-Bob information of the natural lossy source (i_ab_natural).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .adversary import (CalibrationError, EveKind, EveStrategy,
                        calibrate_gamma, eve_information_bound,
                        natural_error_profile, tripartite_distribution)
from .infotheory import mutual_information, secrecy_capacity_bound

NAN = float("nan")


class Protocol(Enum):
    STANDARD = "standard"
    MULTI = "multi"

    @property
    def classes(self):
        return (1,) if self is Protocol.STANDARD else (1, 2)


def default_cutoff(tau: float) -> int:
    """Per-side cutoff keeping the truncated-norm deficit below ~1e-8."""
    if tau <= 1.0:
        return 40
    if tau <= 1.2:
        return 60
    return 80


@dataclass(frozen=True)
class ClassRates:
    """Per-photon-number-class breakdown of one operating point."""

    n: int
    p_nn: float
    e_natural: float
    gamma: float
    i_ab: float           # Alice-Bob information, Eve-delivered source
    i_ab_natural: float   # same, natural lossy source
    i_ae: float           # credited to Eve (full letter on product pulses)
    i_be: float
    i_ae_record: float    # exact mutual information with Eve's record
    i_be_record: float


@dataclass(frozen=True)
class RateReport:
    eta: float
    tau: float
    protocol: Protocol
    cutoff: int
    p11: float
    p22: float
    p_rest: float
    gamma_1: float
    gamma_2: float
    i_ab: float
    i_ae: float
    i_be: float
    i_ab_natural: float
    i_ae_record: float
    i_be_record: float
    q_sift: float
    cs_min: float
    per_class: tuple[ClassRates, ...] = field(default=())

    def to_dict(self) -> dict:
        d = {
            "eta": self.eta, "tau": self.tau,
            "protocol": self.protocol.value, "cutoff": self.cutoff,
            "p11": self.p11, "p22": self.p22, "p_rest": self.p_rest,
            "gamma_1": self.gamma_1, "gamma_2": self.gamma_2,
            "i_ab": self.i_ab, "i_ae": self.i_ae, "i_be": self.i_be,
            "i_ab_natural": self.i_ab_natural,
            "i_ae_record": self.i_ae_record,
            "i_be_record": self.i_be_record,
            "q_sift": self.q_sift, "cs_min": self.cs_min,
        }
        d["per_class"] = [vars(c).copy() for c in self.per_class]
        return d


def _class_condition(joint, n):
    return joint.condition(lambda key: sum(key[0]) == n)


def evaluate_rates(eta: float, tau: float, protocol: Protocol,
                   cutoff: int | None = None) -> RateReport:
    """Full pipeline at one (eta, tau) point.

    Raises CalibrationError when the attack cannot mimic the natural error
    rate on a class the protocol keys on; for the other class the gamma is
    reported as NaN instead (4-photon errors are observable regardless of
    protocol, but only the keyed classes are required to calibrate).
    """
    if cutoff is None:
        cutoff = default_cutoff(tau)
    profile = natural_error_profile(eta, tau, cutoff)

    gammas: dict[int, float] = {}
    for n in (1, 2):
        try:
            gammas[n] = calibrate_gamma(n, eta, tau, cutoff, profile=profile)
        except CalibrationError:
            if n in protocol.classes:
                raise
            gammas[n] = NAN

    strategy = EveStrategy(
        gamma_1=gammas[1] if not math.isnan(gammas[1]) else 1.0,
        gamma_2=gammas[2] if not math.isnan(gammas[2]) else 1.0,
        p11=profile.p11, p22=profile.p22)
    joint = tripartite_distribution(strategy, classes=protocol.classes)

    per_class = []
    q_sift = 0.5 * math.fsum(profile.p_nn(n) for n in protocol.classes)
    class_mass = math.fsum(profile.p_nn(n) for n in protocol.classes)
    i_ab = i_ae = i_be = i_ab_nat = i_ae_rec = i_be_rec = 0.0
    for n in protocol.classes:
        w = profile.p_nn(n) / class_mass
        cond = _class_condition(joint, n)
        c_iab = mutual_information(cond.pair_marginal(0, 1))
        c_iae_rec = mutual_information(cond.pair_marginal(0, 2))
        c_ibe_rec = mutual_information(cond.pair_marginal(1, 2))
        c_iae = eve_information_bound(n, gammas[n])
        c_iab_nat = mutual_information(profile.joint(n))
        per_class.append(ClassRates(
            n=n, p_nn=profile.p_nn(n), e_natural=profile.e_n(n),
            gamma=gammas[n], i_ab=c_iab, i_ab_natural=c_iab_nat,
            i_ae=c_iae, i_be=c_iae,
            i_ae_record=c_iae_rec, i_be_record=c_ibe_rec))
        i_ab += w * c_iab
        i_ae += w * c_iae
        i_be += w * c_iae
        i_ab_nat += w * c_iab_nat
        i_ae_rec += w * c_iae_rec
        i_be_rec += w * c_ibe_rec

    cs = secrecy_capacity_bound(i_ab, i_ae, i_be, q_sift)
    return RateReport(
        eta=eta, tau=tau, protocol=protocol, cutoff=cutoff,
        p11=profile.p11, p22=profile.p22,
        p_rest=max(0.0, 1.0 - profile.p11 - profile.p22),
        gamma_1=gammas[1], gamma_2=gammas[2],
        i_ab=i_ab, i_ae=i_ae, i_be=i_be,
        i_ab_natural=i_ab_nat, i_ae_record=i_ae_rec, i_be_record=i_be_rec,
        q_sift=q_sift, cs_min=cs, per_class=tuple(per_class))


SWEEP_COLUMNS = ("eta", "tau", "protocol", "p11", "p22", "gamma1", "gamma2",
                 "i_ab", "i_ae", "i_be", "q_sift", "cs_min")


def _sweep_point(args):
    eta, tau, protocol, cutoff = args
    try:
        r = evaluate_rates(eta, tau, protocol, cutoff)
        return {"eta": eta, "tau": tau, "protocol": protocol.value,
                "p11": r.p11, "p22": r.p22, "gamma1": r.gamma_1,
                "gamma2": r.gamma_2, "i_ab": r.i_ab, "i_ae": r.i_ae,
                "i_be": r.i_be, "q_sift": r.q_sift, "cs_min": r.cs_min}
    except CalibrationError:
        return {"eta": eta, "tau": tau, "protocol": protocol.value,
                "p11": NAN, "p22": NAN, "gamma1": NAN, "gamma2": NAN,
                "i_ab": NAN, "i_ae": NAN, "i_be": NAN, "q_sift": NAN,
                "cs_min": NAN}


def sweep(eta_values, tau_values, protocols, cutoff: int | None = None,
          jobs: int = 1) -> list[dict]:
    """Evaluate a grid; rows sorted by (protocol, eta, tau).

    Grid points where the attack cannot calibrate yield NaN columns rather
    than aborting the sweep.
    """
    points = [(eta, tau, proto, cutoff)
              for proto in protocols
              for eta in eta_values
              for tau in tau_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, points, chunksize=8))
    else:
        rows = [_sweep_point(p) for p in points]
    rows.sort(key=lambda r: (r["protocol"], r["eta"], r["tau"]))
    return rows


@dataclass(frozen=True)
class OptimizeResult:
    tau_star: float
    cs_at_star: float
    positive: bool   # False when the capacity is flat zero over the interval


def optimize_tau(eta: float, protocol: Protocol, tau_lo: float = 0.01,
                 tau_hi: float = 1.5, xtol: float = 1e-3,
                 cutoff: int | None = None) -> OptimizeResult:
    """Golden-section maximization of cs_min over tau.

    Points where the attack cannot calibrate are treated as zero capacity
    (no key can be certified there).
    """
    def f(tau):
        try:
            return evaluate_rates(eta, tau, protocol, cutoff).cs_min
        except CalibrationError:
            return 0.0

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = tau_lo, tau_hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    tau_star = c if fc > fd else d
    cs_star = max(fc, fd)
    return OptimizeResult(tau_star=tau_star, cs_at_star=cs_star,
                          positive=cs_star > 0.0)


def find_crossover(tau_multi: float, tau_standard: float,
                   eta_lo: float = 0.4, eta_hi: float = 1.0,
                   tol: float = 1e-3, cutoff: int | None = None) -> float:
    """Largest eta below which the multi protocol stops beating the
    standard one, each evaluated at its own fixed optimal tau.

    Bisection on the rate difference; returns NaN if no sign change lies
    in the bracket.
    """
    def diff(eta):
        try:
            cm = evaluate_rates(eta, tau_multi, Protocol.MULTI, cutoff).cs_min
        except CalibrationError:
            cm = 0.0
        try:
            cs = evaluate_rates(eta, tau_standard, Protocol.STANDARD,
                                cutoff).cs_min
        except CalibrationError:
            cs = 0.0
        return cm - cs

    lo, hi = eta_lo, eta_hi
    d_lo, d_hi = diff(lo), diff(hi)
    if d_lo > 0.0 or d_hi < 0.0:
        return NAN
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
