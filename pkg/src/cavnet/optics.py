"""Derivation of the network's dynamical rates from cavity hardware.

All lengths are meters, all rates GHz (used as ns^-1 by the solver),
times ns.  The chain is: per-cavity loss parameter xi -> mean round trips
m -> internal/external dissipation and the detector transfer rate, plus
the beamsplitter-mediated inter-cavity couplings g_kj.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.constants

C_M_PER_NS = scipy.constants.c * 1e-9  # speed of light, m/ns

LITERAL_1_MINUS_M = "literal_1_minus_m"
BUILDUP_1_MINUS_XI = "buildup_1_minus_xi"
BUILDUP_1_MINUS_XI_SQ = "buildup_1_minus_xi_sq"
_DENOMINATOR_MODES = (LITERAL_1_MINUS_M, BUILDUP_1_MINUS_XI, BUILDUP_1_MINUS_XI_SQ)


@dataclass(frozen=True)
class CavitySpec:
    """Physical description of one cavity and its link to the beamsplitter.

    length_offset / distance_offset are sub-wavelength additions to the
    nominal lengths; only they contribute optical phase.  The nominal
    lengths are taken to be held on resonance (integer wavelength counts)
    by the stabilization the hardware provides.
    """

    r_in: float
    r_out: float
    length_d: float
    absorption_alpha: float
    distance_l: float
    feedback_recovery: float = 0.0
    length_offset: float = 0.0
    distance_offset: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.r_in < 1.0:
            raise ValueError(f"r_in must be in (0, 1), got {self.r_in}")
        if not 0.0 < self.r_out <= 1.0:
            raise ValueError(f"r_out must be in (0, 1], got {self.r_out}")
        if self.length_d <= 0.0:
            raise ValueError(f"length_d must be > 0, got {self.length_d}")
        if self.absorption_alpha < 0.0:
            raise ValueError(f"absorption_alpha must be >= 0, got {self.absorption_alpha}")
        if self.distance_l < 0.0:
            raise ValueError(f"distance_l must be >= 0, got {self.distance_l}")
        if not 0.0 <= self.feedback_recovery < 1.0:
            raise ValueError(f"feedback_recovery must be in [0, 1), got {self.feedback_recovery}")

    @property
    def round_trip_time(self) -> float:
        """Single round-trip flight time, ns."""
        return 2.0 * self.length_d / C_M_PER_NS


def loss_parameter(c: CavitySpec) -> float:
    """Per-round-trip amplitude retention xi of a cavity."""
    xi = math.sqrt(c.r_in * c.r_out * math.exp(-2.0 * c.length_d * c.absorption_alpha))
    if xi >= 1.0:
        raise ValueError("degenerate lossless cavity: xi >= 1")
    return xi


def round_trips(xi: float) -> float:
    """Mean number of round trips m = 1/(1 - xi)."""
    if not 0.0 < xi < 1.0:
        raise ValueError(f"xi must be in (0, 1), got {xi}")
    return 1.0 / (1.0 - xi)


def internal_dissipation(c: CavitySpec):
    """Absorption/diffraction loss rate (GHz) and per-round-trip loss D.

    Geometric sum of the power surviving i round trips, normalized by the
    mean intracavity dwell time m*t.  m enters the exponent as a real
    number, not rounded.
    """
    xi = loss_parameter(c)
    m = round_trips(xi)
    D = 1.0 - math.exp(-2.0 * c.absorption_alpha * c.length_d)
    t = c.round_trip_time
    if D == 0.0:
        return 0.0, 0.0
    gamma = D * (1.0 - xi ** (2.0 * (m + 1.0))) / ((1.0 - xi ** 2) * m * t)
    return gamma, D


def external_dissipation(c: CavitySpec) -> float:
    """Photon loss rate (GHz) through the external mirror.

    Any detector-assisted post-selection enters as the multiplicative
    (1 - feedback_recovery) survival factor.
    """
    xi = loss_parameter(c)
    m = round_trips(xi)
    if c.r_out == 1.0:
        return 0.0
    raw = (1.0 - c.r_out ** (m + 1.0)) / (m * c.round_trip_time)
    return (1.0 - c.feedback_recovery) * raw


def detector_rate(c: CavitySpec) -> float:
    """Transfer rate (GHz) through the sink cavity's external mirror."""
    xi = loss_parameter(c)
    m = round_trips(xi)
    if c.r_out == 1.0:
        return 0.0
    return (1.0 - c.r_out ** (m + 1.0)) / (m * c.round_trip_time)


@dataclass(frozen=True)
class NetworkSpec:
    """Hub geometry: cavities around one central beamsplitter.

    direct_pairs lists the unordered site pairs exchanged by a single
    beamsplitter interaction; every other pair couples via one bounce off
    the two remaining cavities' input mirrors.  reflection_counts gives
    the number of beamsplitter reflections per ordered pair.
    """

    cavities: tuple
    bs_transmittivity_eta: float
    wavelength: float
    direct_pairs: frozenset
    reflection_counts: dict
    coupling_denominator_mode: str = BUILDUP_1_MINUS_XI_SQ

    def __post_init__(self):
        object.__setattr__(self, "cavities", tuple(self.cavities))
        if not 0.0 < self.bs_transmittivity_eta < 1.0:
            raise ValueError("bs_transmittivity_eta must be in (0, 1)")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be > 0")
        if self.coupling_denominator_mode not in _DENOMINATOR_MODES:
            raise ValueError(
                f"unknown coupling_denominator_mode {self.coupling_denominator_mode!r}")
        pairs = frozenset(frozenset(p) for p in self.direct_pairs)
        for p in pairs:
            if len(p) != 2:
                raise ValueError(f"direct pair {set(p)} is not a pair of distinct sites")
        object.__setattr__(self, "direct_pairs", pairs)
        n = self.n_sites
        for k, j in self.all_pairs():
            for o in ((k, j), (j, k)):
                if o not in self.reflection_counts:
                    raise ValueError(f"reflection_counts missing ordered pair {o}")
        for k, j in self.reflection_counts:
            if not (1 <= k <= n and 1 <= j <= n and k != j):
                raise ValueError(f"reflection_counts has invalid pair {(k, j)}")

    @property
    def n_sites(self) -> int:
        return len(self.cavities)

    def cavity(self, i: int) -> CavitySpec:
        return self.cavities[i - 1]

    def all_pairs(self):
        n = self.n_sites
        return [(k, j) for k in range(1, n + 1) for j in range(k + 1, n + 1)]

    def is_direct(self, k: int, j: int) -> bool:
        return frozenset((k, j)) in self.direct_pairs

    def bs_phase(self, i: int) -> float:
        """Propagation phase cavity i <-> beamsplitter, from the offset only."""
        return 2.0 * math.pi * self.cavity(i).distance_offset / self.wavelength

    def cavity_phase(self, i: int) -> float:
        """Intracavity propagation phase, from the offset only."""
        return 2.0 * math.pi * self.cavity(i).length_offset / self.wavelength


@dataclass(frozen=True)
class RateSet:
    """Derived dynamical parameters of the network, all rates in GHz.

    couplings is keyed by ordered pairs (k, j) with k < j; the Hermitian
    partner g_jk is the conjugate.  derived_diagnostics carries the
    per-site {xi, m, D, gamma_internal, gamma_out} chain when the rates
    came from a hardware derivation (None for presets).
    """

    couplings: dict
    dissipation: tuple
    dephasing: tuple
    detector_rate: float
    derived_diagnostics: dict = None

    def __post_init__(self):
        for (k, j) in self.couplings:
            if k >= j:
                raise ValueError("couplings must be keyed by ordered pairs k < j")
        if any(g < 0 for g in self.dissipation) or any(g < 0 for g in self.dephasing):
            raise ValueError("rates must be nonnegative")
        if self.detector_rate < 0:
            raise ValueError("detector_rate must be nonnegative")
        if len(self.dissipation) != len(self.dephasing):
            raise ValueError("dissipation and dephasing lengths differ")

    @property
    def n_sites(self) -> int:
        return len(self.dissipation)

    def g(self, k: int, j: int) -> complex:
        """Coupling g_kj; Hermitian map, g_jk = conj(g_kj)."""
        if k < j:
            return self.couplings.get((k, j), 0.0 + 0.0j)
        return np.conj(self.couplings.get((j, k), 0.0 + 0.0j))

    def with_dephasing(self, gamma: float) -> "RateSet":
        return replace(self, dephasing=(float(gamma),) * self.n_sites)

    def with_detector_rate(self, rate: float) -> "RateSet":
        return replace(self, detector_rate=float(rate))

    def with_couplings(self, couplings: dict) -> "RateSet":
        return replace(self, couplings=dict(couplings))


def _bs_amplitude(net: NetworkSpec, reflected: bool) -> float:
    eta = net.bs_transmittivity_eta
    return math.sqrt(eta) if reflected else math.sqrt(1.0 - eta)


def inter_cavity_transfer(k: int, j: int, net: NetworkSpec) -> complex:
    """First-order path amplitude from the output of cavity k to the input
    face of cavity j, through the central beamsplitter."""
    if k == j:
        raise ValueError("inter-cavity transfer needs two distinct sites")
    n_r = net.reflection_counts[(k, j)]
    phase = net.bs_phase(k) + net.bs_phase(j)
    if net.is_direct(k, j):
        # single BS interaction; n_r of them are reflections
        amp = _bs_amplitude(net, reflected=True) if n_r >= 1 \
            else _bs_amplitude(net, reflected=False)
        K = 1.0
    else:
        # two BS interactions, with one bounce off each remaining cavity
        others = [p for p in range(1, net.n_sites + 1) if p not in (k, j)]
        if len(others) != 2:
            raise ValueError("indirect links require exactly two intermediate sites")
        q, p = others
        amp = (_bs_amplitude(net, reflected=n_r >= 1)
               * _bs_amplitude(net, reflected=n_r >= 2))
        K = (math.sqrt(net.cavity(q).r_in) * np.exp(2j * net.bs_phase(q))
             + math.sqrt(net.cavity(p).r_in) * np.exp(2j * net.bs_phase(p)))
    return (1j) ** n_r * amp * np.exp(1j * phase) * K


def _buildup_denominator(net: NetworkSpec, j: int) -> float:
    xi = loss_parameter(net.cavity(j))
    mode = net.coupling_denominator_mode
    if mode == LITERAL_1_MINUS_M:
        return 1.0 - round_trips(xi)
    if mode == BUILDUP_1_MINUS_XI:
        return 1.0 - xi
    return 1.0 - xi ** 2


def coupling(k: int, j: int, net: NetworkSpec) -> complex:
    """Photon-exchange rate g_kj (GHz) for the ordered pair (k, j)."""
    ck, cj = net.cavity(k), net.cavity(j)
    I_kj = inter_cavity_transfer(k, j, net)
    v = C_M_PER_NS  # air-spaced cavities, group velocity c
    geom = math.sqrt(v * v / (ck.length_d * cj.length_d))
    mirrors = math.sqrt((1.0 - ck.r_in) * (1.0 - cj.r_in))
    phase = np.exp(-1j * net.cavity_phase(k))
    damping = math.exp(-ck.absorption_alpha * ck.length_d)
    return (I_kj / 2j) * geom * mirrors * phase * damping / _buildup_denominator(net, j)


PAPER_COUPLING_MAGNITUDES = {
    (1, 2): 4.3, (1, 3): 5.7, (1, 4): 7.6,
    (2, 3): 6.1, (2, 4): 4.5, (3, 4): 5.9,
}
PAPER_PRESET_DISSIPATION = 0.07   # GHz, common to all sites
PAPER_PRESET_DETECTOR_RATE = 1.0  # GHz

SINK_SITE = 2


def derive_rates(net: NetworkSpec, dephasing_gamma: float,
                 paper_preset: bool = False, sink_site: int = SINK_SITE) -> RateSet:
    """Assemble the full RateSet.

    paper_preset short-circuits the hardware derivation and uses the
    published coupling magnitudes (taken real and positive; their phases
    are not published) with 70 MHz dissipation and a 1 GHz detector rate.
    In derived mode the sink cavity's external-mirror loss is routed
    entirely into the detector rate, not into its dissipation.
    """
    if dephasing_gamma < 0:
        raise ValueError("dephasing_gamma must be nonnegative")
    n = net.n_sites
    if paper_preset:
        if n != 4:
            raise ValueError("the paper preset is defined for the 4-site network")
        return RateSet(
            couplings={p: complex(v) for p, v in PAPER_COUPLING_MAGNITUDES.items()},
            dissipation=(PAPER_PRESET_DISSIPATION,) * n,
            dephasing=(float(dephasing_gamma),) * n,
            detector_rate=PAPER_PRESET_DETECTOR_RATE,
        )
    couplings = {}
    for k, j in net.all_pairs():
        # The two ordered evaluations differ through the receiving cavity's
        # buildup; keep the canonical phase, average the magnitudes, and let
        # Hermiticity define the reverse element.
        fwd = coupling(k, j, net)
        back = coupling(j, k, net)
        phase = fwd / abs(fwd) if abs(fwd) > 0 else 1.0
        couplings[(k, j)] = 0.5 * (abs(fwd) + abs(back)) * phase
    dissipation = []
    diagnostics = {}
    det = 0.0
    for i in range(1, n + 1):
        c = net.cavity(i)
        xi = loss_parameter(c)
        m = round_trips(xi)
        g_int, D = internal_dissipation(c)
        if i == sink_site:
            g_out = 0.0
            det = detector_rate(c)
        else:
            g_out = external_dissipation(c)
        dissipation.append(g_int + g_out)
        diagnostics[i] = {"xi": xi, "m": m, "D": D,
                          "gamma_internal": g_int, "gamma_out": g_out}
    return RateSet(
        couplings=couplings,
        dissipation=tuple(dissipation),
        dephasing=(float(dephasing_gamma),) * n,
        detector_rate=det,
        derived_diagnostics=diagnostics,
    )


def paper_network(coupling_denominator_mode: str = BUILDUP_1_MINUS_XI_SQ) -> NetworkSpec:
    """The published 4-site geometry: 1 cm cavities, 20 cm arms, eta = 0.5,
    800 nm light, detector-assisted post-selection on cavity 1."""
    def cav(r_in, r_out, feedback=0.0):
        return CavitySpec(r_in=r_in, r_out=r_out, length_d=0.01,
                          absorption_alpha=0.35, distance_l=0.20,
                          feedback_recovery=feedback)
    cavities = (
        cav(0.9, 0.99, feedback=0.8),
        cav(0.9, 0.9),
        cav(0.9, 0.999),
        cav(0.9, 0.999),
    )
    direct = frozenset({frozenset({1, 2}), frozenset({3, 4})})
    counts = {}
    for k in range(1, 5):
        for j in range(1, 5):
            if k != j:
                counts[(k, j)] = 1 if frozenset({k, j}) in direct else 2
    return NetworkSpec(
        cavities=cavities,
        bs_transmittivity_eta=0.5,
        wavelength=800e-9,
        direct_pairs=direct,
        reflection_counts=counts,
        coupling_denominator_mode=coupling_denominator_mode,
    )


_CAVITY_KEYS = {"r_in", "r_out", "length_d", "absorption_alpha", "distance_l",
                "feedback_recovery", "length_offset", "distance_offset"}
_NETWORK_KEYS = {"cavities", "bs_transmittivity_eta", "wavelength",
                 "direct_pairs", "reflection_counts", "coupling_denominator_mode"}


def _reject_unknown(doc: dict, allowed: set, where: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) {sorted(unknown)} in {where}")


def network_from_dict(doc: dict) -> NetworkSpec:
    """Build a NetworkSpec from a plain configuration mapping (JSON form).

    Keys mirror the field names; lengths in meters, reflectivities as
    fractions.  reflection_counts keys are "k,j" strings.  Unknown keys
    are a hard error.
    """
    _reject_unknown(doc, _NETWORK_KEYS, "network")
    cavities = []
    for idx, c in enumerate(doc["cavities"], start=1):
        _reject_unknown(c, _CAVITY_KEYS, f"network.cavities[{idx}]")
        cavities.append(CavitySpec(**c))
    counts = {}
    for key, n_r in doc["reflection_counts"].items():
        k, j = (int(x) for x in key.split(","))
        counts[(k, j)] = int(n_r)
    kwargs = {}
    if "coupling_denominator_mode" in doc:
        kwargs["coupling_denominator_mode"] = doc["coupling_denominator_mode"]
    return NetworkSpec(
        cavities=tuple(cavities),
        bs_transmittivity_eta=doc["bs_transmittivity_eta"],
        wavelength=doc["wavelength"],
        direct_pairs=frozenset(frozenset(p) for p in doc["direct_pairs"]),
        reflection_counts=counts,
        **kwargs,
    )


def network_from_json(path) -> NetworkSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_dict(json.load(fh))
