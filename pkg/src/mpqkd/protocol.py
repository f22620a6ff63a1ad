"""Pulse-by-pulse Monte Carlo of the key-distribution session.

Sampling draws from the exact analytic outcome tables (inverse CDF over a
finite outcome list), not from a photon-path simulation, so empirical
frequencies converge to the measurement module's distributions by
construction of the sampler, and the session doubles as an independent
stochastic cross-check of the analytic rate pipeline.

Randomness is a counter-based Philox stream keyed by the session seed;
pulse i consumes exactly DRAWS_PER_PULSE doubles starting at offset
i * DRAWS_PER_PULSE, so any contiguous chunk of pulses can be regenerated
independently and simulations are bit-stable under chunked evaluation.
"""

from __future__ import annotations

import json
import math
import secrets
from dataclasses import dataclass, field
from enum import Enum
from statistics import NormalDist

import numpy as np

from .adversary import (EveKind, EveStrategy, calibrate_gamma, eve_ensemble,
                        natural_error_profile)
from .fock import Ensemble
from .measurement import LossModel, outcome_distribution
from .polarization import Basis
from .rates import Protocol, default_cutoff
from .source import PdcParams, pdc_state

# eight 64-bit draws per pulse = two whole Philox counter blocks, so the
# stream can be entered at any pulse boundary via advance(2 * index)
DRAWS_PER_PULSE = 8
_BLOCKS_PER_PULSE = 2
REST_COUNTS = (-1, -1, -1, -1)  # sentinel for events outside the kept table


class Scenario(Enum):
    NATURAL = "natural"
    EVE = "eve"


@dataclass(frozen=True)
class SessionConfig:
    eta: float
    tau: float
    protocol: Protocol
    pulses: int
    seed: int | None = None
    scenario: Scenario = Scenario.NATURAL
    cutoff: int | None = None
    max_detected: int = 8   # per-side cap of the natural sampling table
    chunk: int = 1 << 16

    def __post_init__(self):
        if self.pulses < 1:
            raise ValueError("pulses must be >= 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")


def pulse_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles for pulses [start, start+count), shape (count, k).

    Row i depends only on (seed, start + i).
    """
    bg = np.random.Philox(key=seed)
    bg.advance(start * _BLOCKS_PER_PULSE)
    return np.random.Generator(bg).random((count, DRAWS_PER_PULSE))


@dataclass
class SampleTable:
    """Finite outcome list with cumulative weights for inverse-CDF draws."""

    counts: np.ndarray      # (K, 4) detected counts; REST_COUNTS sentinel last
    cum: np.ndarray         # (K,) inclusive cumulative probabilities

    @classmethod
    def from_table(cls, table: dict, rest_mass: float = None):
        items = sorted(table.items())
        counts = np.array([k for k, _ in items] + [REST_COUNTS], dtype=np.int16)
        probs = np.array([p for _, p in items], dtype=float)
        rest = (1.0 - probs.sum()) if rest_mass is None else rest_mass
        probs = np.append(probs, max(0.0, rest))
        return cls(counts=counts, cum=np.cumsum(probs))

    def draw(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.cum, u * self.cum[-1], side="right")
        return np.minimum(idx, len(self.cum) - 1)


_BASIS = (Basis.PLUS, Basis.CROSS)


def _natural_tables(config: SessionConfig, cutoff: int):
    source = pdc_state(PdcParams(tau=config.tau, cutoff=cutoff))
    loss = LossModel(config.eta)
    tables = {}
    for ia, ba in enumerate(_BASIS):
        for ib, bb in enumerate(_BASIS):
            dist = outcome_distribution(source, loss, ba, bb,
                                        max_detected=config.max_detected)
            tables[(ia, ib)] = SampleTable.from_table(dist.table)
    return tables


def _eve_components(config: SessionConfig, cutoff: int):
    """Per-class component list, weights, and per-basis-pair outcome tables."""
    profile = natural_error_profile(config.eta, config.tau, cutoff)
    gammas = {n: calibrate_gamma(n, config.eta, config.tau, cutoff,
                                 profile=profile)
              for n in (1, 2)}
    strategy = EveStrategy(gamma_1=gammas[1], gamma_2=gammas[2],
                           p11=profile.p11, p22=profile.p22)
    classes = {}
    for n in (1, 2):
        comps = eve_ensemble(n, gammas[n])
        weights = np.array([c.weight for c in comps])
        tables = []
        for c in comps:
            per_basis = {}
            for ia, ba in enumerate(_BASIS):
                for ib, bb in enumerate(_BASIS):
                    dist = outcome_distribution(c.state, LossModel(1.0),
                                                ba, bb)
                    per_basis[(ia, ib)] = SampleTable.from_table(dist.table)
            tables.append(per_basis)
        classes[n] = {"components": comps, "cum": np.cumsum(weights),
                      "tables": tables}
    return profile, strategy, classes


@dataclass
class SessionReport:
    """Outcome of one simulated session.

    Per-key-event arrays are kept as numpy arrays; to_dict() renders the
    JSON form (snake_case fields, letters as [h_count, v_count] pairs).
    """

    config: SessionConfig
    seed: int
    pulses_sent: int
    same_basis_pulses: int
    sifted_events: dict
    error_counts: dict
    observed_error_rates: dict
    key_class: np.ndarray
    key_letters_alice: np.ndarray
    key_letters_bob: np.ndarray
    disclosed: np.ndarray
    coincidence_counts: dict   # same-basis n-n coincidences per n (monitoring)
    outcome_counts: dict       # (ia, ib, counts) -> tally, for consistency tests
    eve_component: np.ndarray | None = None   # per key event, component index
    eve_basis: np.ndarray | None = None       # measured basis per key event
    empirical_i_ab: float | None = None
    empirical_i_ae: float | None = None
    empirical_i_be: float | None = None
    empirical_i_ae_record: float | None = None
    empirical_i_be_record: float | None = None
    empirical_cs: float | None = None
    q_sift_empirical: float = 0.0

    def to_dict(self) -> dict:
        return {
            "eta": self.config.eta,
            "tau": self.config.tau,
            "protocol": self.config.protocol.value,
            "scenario": self.config.scenario.value,
            "seed": self.seed,
            "pulses_sent": self.pulses_sent,
            "same_basis_pulses": self.same_basis_pulses,
            "sifted_events": {str(n): int(v) for n, v in self.sifted_events.items()},
            "observed_error_rates": {str(n): v for n, v in
                                     self.observed_error_rates.items()},
            "key_letters_alice": self.key_letters_alice.tolist(),
            "key_letters_bob": self.key_letters_bob.tolist(),
            "disclosed": self.disclosed.tolist(),
            "empirical_i_ab": self.empirical_i_ab,
            "empirical_i_ae": self.empirical_i_ae,
            "empirical_i_be": self.empirical_i_be,
            "empirical_cs": self.empirical_cs,
            "q_sift_empirical": self.q_sift_empirical,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _plug_in_mi(counts: np.ndarray) -> float:
    """Plug-in mutual information (bits) from a 2-D contingency table."""
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    pa = p.sum(axis=1, keepdims=True)
    pb = p.sum(axis=0, keepdims=True)
    mask = p > 0
    return float((p[mask] * np.log2(p[mask] / (pa @ pb)[mask])).sum())


def run_session(config: SessionConfig) -> SessionReport:
    """Simulate a session; deterministic given (config, seed)."""
    seed = config.seed if config.seed is not None else secrets.randbits(63)
    cutoff = config.cutoff if config.cutoff is not None \
        else default_cutoff(config.tau)
    classes = config.protocol.classes

    if config.scenario is Scenario.NATURAL:
        tables = _natural_tables(config, cutoff)
        class_cum = None
    else:
        profile, strategy, eve = _eve_components(config, cutoff)
        class_cum = np.cumsum([profile.p11, profile.p22,
                               max(0.0, 1.0 - profile.p11 - profile.p22)])

    same_basis = 0
    coin = {1: 0, 2: 0}
    errs = {1: 0, 2: 0}
    keys_a, keys_b, key_ns = [], [], []
    eve_comp_chunks, eve_basis_chunks = [], []
    outcome_counts: dict = {}

    for start in range(0, config.pulses, config.chunk):
        count = min(config.chunk, config.pulses - start)
        u = pulse_uniforms(seed, start, count)
        ia = (u[:, 0] >= 0.5).astype(np.int8)   # 0 = PLUS, 1 = CROSS
        ib = (u[:, 1] >= 0.5).astype(np.int8)
        counts = np.empty((count, 4), dtype=np.int16)
        comp_idx = np.full(count, -1, dtype=np.int16)
        cls_idx = np.zeros(count, dtype=np.int16)

        if config.scenario is Scenario.NATURAL:
            for a in range(2):
                for b in range(2):
                    mask = (ia == a) & (ib == b)
                    if not mask.any():
                        continue
                    t = tables[(a, b)]
                    counts[mask] = t.counts[t.draw(u[mask, 2])]
        else:
            drawn_cls = np.searchsorted(class_cum, u[:, 2] * class_cum[-1],
                                        side="right")
            cls_idx = np.minimum(drawn_cls, 2).astype(np.int16)  # 0->n=1,1->n=2,2->rest
            counts[:] = np.array(REST_COUNTS, dtype=np.int16)
            for ci, n in ((0, 1), (1, 2)):
                in_cls = cls_idx == ci
                if not in_cls.any():
                    continue
                cum = eve[n]["cum"]
                comp = np.searchsorted(cum, u[:, 3] * cum[-1], side="right")
                comp = np.minimum(comp, len(cum) - 1)
                comp_idx[in_cls] = comp[in_cls]
                for c in range(len(cum)):
                    for a in range(2):
                        for b in range(2):
                            mask = in_cls & (comp == c) & (ia == a) & (ib == b)
                            if not mask.any():
                                continue
                            t = eve[n]["tables"][c][(a, b)]
                            counts[mask] = t.counts[t.draw(u[mask, 4])]

        sb = ia == ib
        same_basis += int(sb.sum())
        na = counts[:, 0] + counts[:, 1]
        nb = counts[:, 2] + counts[:, 3]
        err = (counts[:, 2] != counts[:, 1]) | (counts[:, 3] != counts[:, 0])
        for n in (1, 2):
            nn = sb & (na == n) & (nb == n)
            coin[n] += int(nn.sum())
            errs[n] += int((nn & err).sum())

        key = sb & (na == nb) & np.isin(na, classes)
        keys_a.append(counts[key, 0:2].astype(np.int16))
        keys_b.append(counts[key, 2:4].astype(np.int16))
        key_ns.append(na[key].astype(np.int16))
        if config.scenario is Scenario.EVE:
            eve_comp_chunks.append(comp_idx[key])
            eve_basis_chunks.append(ia[key])

        keys_flat = (counts.astype(np.int64) + 1)  # -1 sentinel -> 0
        codes = (((keys_flat[:, 0] * 64 + keys_flat[:, 1]) * 64
                  + keys_flat[:, 2]) * 64 + keys_flat[:, 3]) * 4 + ia * 2 + ib
        uniq, cnt = np.unique(codes, return_counts=True)
        for code, c in zip(uniq.tolist(), cnt.tolist()):
            outcome_counts[code] = outcome_counts.get(code, 0) + c

    key_letters_alice = np.concatenate(keys_a) if keys_a else \
        np.empty((0, 2), dtype=np.int16)
    key_letters_bob = np.concatenate(keys_b) if keys_b else \
        np.empty((0, 2), dtype=np.int16)
    key_class = np.concatenate(key_ns) if key_ns else \
        np.empty(0, dtype=np.int16)

    sifted = {n: int((key_class == n).sum()) for n in classes}
    rates = {n: (errs[n] / coin[n] if coin[n] else 0.0) for n in (1, 2)}

    report = SessionReport(
        config=config, seed=seed, pulses_sent=config.pulses,
        same_basis_pulses=same_basis, sifted_events=sifted,
        error_counts=dict(errs), observed_error_rates=rates,
        key_class=key_class, key_letters_alice=key_letters_alice,
        key_letters_bob=key_letters_bob,
        disclosed=np.zeros(len(key_class), dtype=bool),
        coincidence_counts=dict(coin),
        outcome_counts=_decode_outcome_counts(outcome_counts),
        q_sift_empirical=len(key_class) / config.pulses,
    )
    if config.scenario is Scenario.EVE:
        report.eve_component = np.concatenate(eve_comp_chunks) if \
            eve_comp_chunks else np.empty(0, dtype=np.int16)
        report.eve_basis = np.concatenate(eve_basis_chunks) if \
            eve_basis_chunks else np.empty(0, dtype=np.int8)
        _attach_empirical_information(report)
    else:
        _attach_empirical_information(report, alice_bob_only=True)
    return report


def _decode_outcome_counts(packed: dict) -> dict:
    out = {}
    for code, c in packed.items():
        b = code % 2
        a = (code // 2) % 2
        rest = code // 4
        kd = rest % 64 - 1
        kc = (rest // 64) % 64 - 1
        kb = (rest // 64 // 64) % 64 - 1
        ka = (rest // 64 // 64 // 64) - 1
        out[(a, b, (ka, kb, kc, kd))] = c
    return out


def _attach_empirical_information(report: SessionReport,
                                  alice_bob_only: bool = False):
    """Plug-in per-class mutual informations, weighted by class frequency."""
    key_class = report.key_class
    total = len(key_class)
    if total == 0:
        return
    classes = report.config.protocol.classes
    i_ab = i_ae = i_be = i_ae_rec = i_be_rec = 0.0
    for n in classes:
        mask = key_class == n
        cnt = int(mask.sum())
        if cnt == 0:
            continue
        w = cnt / total
        a = report.key_letters_alice[mask, 0].astype(np.int64)   # h-count
        b = report.key_letters_bob[mask, 0].astype(np.int64)
        tab = np.zeros((n + 1, n + 1))
        np.add.at(tab, (a, b), 1)
        i_ab += w * _plug_in_mi(tab)
        if alice_bob_only:
            continue
        comp = report.eve_component[mask].astype(np.int64)
        basis = report.eve_basis[mask].astype(np.int64)
        rec = comp * 2 + basis
        tab_rec = np.zeros((n + 1, int(rec.max()) + 1))
        np.add.at(tab_rec, (a, rec), 1)
        i_ae_rec += w * _plug_in_mi(tab_rec)
        tab_rec_b = np.zeros((n + 1, int(rec.max()) + 1))
        np.add.at(tab_rec_b, (b, rec), 1)
        i_be_rec += w * _plug_in_mi(tab_rec_b)
        # credited accounting: Eve knows the letter on product pulses
        known_a = np.where(comp > 0, a, n + 1)
        known_b = np.where(comp > 0, b, n + 1)
        tab_known = np.zeros((n + 1, n + 2))
        np.add.at(tab_known, (a, known_a), 1)
        i_ae += w * _plug_in_mi(tab_known)
        tab_known_b = np.zeros((n + 1, n + 2))
        np.add.at(tab_known_b, (b, known_b), 1)
        i_be += w * _plug_in_mi(tab_known_b)
    report.empirical_i_ab = i_ab
    if not alice_bob_only:
        report.empirical_i_ae = i_ae
        report.empirical_i_be = i_be
        report.empirical_i_ae_record = i_ae_rec
        report.empirical_i_be_record = i_be_rec
        report.empirical_cs = report.q_sift_empirical * \
            max(0.0, i_ab - min(i_ae, i_be))


@dataclass(frozen=True)
class Outcome:
    """One measured pulse: bases chosen and detected counts per side."""

    basis_a: Basis
    basis_b: Basis
    a_h: int
    a_v: int
    b_h: int
    b_v: int


def extract_key_letter(outcome: Outcome, protocol: Protocol):
    """Alice's count pair when the outcome is a same-basis key event for
    the protocol's photon-number set; None otherwise."""
    if outcome.basis_a is not outcome.basis_b:
        return None
    n_a = outcome.a_h + outcome.a_v
    n_b = outcome.b_h + outcome.b_v
    if n_a != n_b or n_a not in protocol.classes:
        return None
    return (outcome.a_h, outcome.a_v)


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be > 0")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials
                         + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class ErrorEstimate:
    n: int
    sampled: int
    errors: int
    rate: float
    interval: tuple[float, float]


def error_estimate(report: SessionReport, sample_fraction: float,
                   confidence: float = 0.95, seed: int | None = None) -> dict:
    """Disclose a random key fraction and estimate per-class error rates.

    The sampled letters are marked disclosed on the report (they must not
    be used as key afterwards).  Sampling is deterministic given the
    report's seed unless an explicit seed is passed.
    """
    if not 0.0 < sample_fraction <= 1.0:
        raise ValueError("sample_fraction must be in (0, 1]")
    if len(report.key_class) == 0:
        raise ValueError("no key letters to sample")
    rng = np.random.default_rng(report.seed + 0x5157 if seed is None else seed)
    out = {}
    for n in report.config.protocol.classes:
        avail = np.flatnonzero((report.key_class == n) & ~report.disclosed)
        k = int(round(sample_fraction * len(avail)))
        if k == 0:
            continue
        chosen = rng.choice(avail, size=k, replace=False)
        report.disclosed[chosen] = True
        a = report.key_letters_alice[chosen]
        b = report.key_letters_bob[chosen]
        n_err = int(((b[:, 0] != a[:, 1]) | (b[:, 1] != a[:, 0])).sum())
        out[n] = ErrorEstimate(
            n=n, sampled=k, errors=n_err, rate=n_err / k,
            interval=wilson_interval(n_err, k, confidence))
    return out
