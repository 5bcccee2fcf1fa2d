"""Single-excitation state space, density matrices and trajectories.

The dynamics of the cavity network never creates a second photon, so the
full bosonic Fock space collapses to the span of the global vacuum, the
one-photon-in-site states and the sink-occupied state, optionally tensored
with a two-level ancilla (ancilla as the slow index).
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = -1e-9

VAC = "VAC"
SINK = "SINK"
ANC_TAGS = ("ANC0", "ANC1")


def site_label(i: int) -> str:
    return f"SITE{i}"


@dataclass(frozen=True)
class Basis:
    """Ordered label set of the single-excitation manifold.

    Base ordering is VAC, SITE1..SITEn, SINK (if present); with an ancilla
    the full index is ``anc * base_dim + base_index``.
    """

    n_sites: int
    include_sink: bool
    include_ancilla: bool
    labels: tuple

    @property
    def base_dim(self) -> int:
        return 1 + self.n_sites + (1 if self.include_sink else 0)

    @property
    def dim(self) -> int:
        return self.base_dim * (2 if self.include_ancilla else 1)

    @property
    def vac_index(self) -> int:
        return 0

    def site_index(self, i: int) -> int:
        if not 1 <= i <= self.n_sites:
            raise ValueError(f"site index {i} outside 1..{self.n_sites}")
        return i

    @property
    def sink_index(self) -> int:
        if not self.include_sink:
            raise ValueError("basis has no sink")
        return self.base_dim - 1

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def lift(self, op: np.ndarray) -> np.ndarray:
        """Extend a base-space operator by an identity ancilla factor."""
        if op.shape != (self.base_dim, self.base_dim):
            raise ValueError("operator does not match the base dimension")
        if not self.include_ancilla:
            return op
        return np.kron(np.eye(2), op)


def build_basis(n_sites: int, include_sink: bool, include_ancilla: bool) -> Basis:
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    base = [VAC] + [site_label(i) for i in range(1, n_sites + 1)]
    if include_sink:
        base.append(SINK)
    if include_ancilla:
        labels = tuple(f"{anc}|{b}" for anc in ANC_TAGS for b in base)
    else:
        labels = tuple(base)
    return Basis(n_sites, include_sink, include_ancilla, labels)


def basis_from_labels(labels) -> Basis:
    """Rebuild a Basis from a serialized label list."""
    labels = tuple(labels)
    include_ancilla = labels[0].startswith("ANC0|")
    base = [l.split("|", 1)[1] for l in labels if l.startswith("ANC0|")] \
        if include_ancilla else list(labels)
    include_sink = base[-1] == SINK
    n_sites = len(base) - 1 - (1 if include_sink else 0)
    rebuilt = build_basis(n_sites, include_sink, include_ancilla)
    if rebuilt.labels != labels:
        raise ValueError("label list is not a valid basis ordering")
    return rebuilt


@dataclass(frozen=True)
class DensityMatrix:
    basis: Basis
    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"density matrix shape {d.shape} does not match dim {self.basis.dim}")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    def population(self, label: str) -> float:
        """Total population on a base label, summed over ancilla levels."""
        b = self.basis
        if b.include_ancilla:
            i = b.labels.index(f"{ANC_TAGS[0]}|{label}") % b.base_dim
            return float(sum(self.data[a * b.base_dim + i, a * b.base_dim + i].real
                             for a in range(2)))
        i = b.index(label)
        return float(self.data[i, i].real)

    def trace(self) -> float:
        return float(np.trace(self.data).real)


@dataclass(frozen=True)
class Trajectory:
    """Time grid (ns) with states and accumulated sink probability."""

    times: np.ndarray
    states: list
    sink_probability: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.sink_probability, dtype=float)
        if not (len(t) == len(self.states) == len(p)):
            raise ValueError("times, states and sink_probability lengths differ")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "sink_probability", p)

    def site_population(self, i: int) -> np.ndarray:
        return np.array([s.population(site_label(i)) for s in self.states])


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    def ok(self) -> bool:
        return (self.hermiticity_defect <= HERMITICITY_TOL
                and self.trace_defect <= TRACE_TOL
                and self.min_eigenvalue >= POSITIVITY_TOL)


def validate(rho: DensityMatrix) -> ValidationReport:
    """Hermiticity/trace/positivity defects of a state; purely diagnostic."""
    d = rho.data
    herm = float(np.max(np.abs(d - d.conj().T)))
    tr = float(abs(np.trace(d).real - 1.0))
    mineig = float(np.min(np.linalg.eigvalsh(0.5 * (d + d.conj().T))))
    return ValidationReport(herm, tr, mineig)


def initial_state(basis: Basis, kind: str, site: int = 1) -> DensityMatrix:
    """Prepare the initial condition.

    kind='single_photon_site': one photon in the given site.
    kind='epr_with_ancilla': (|0>_anc |vac> + |1>_anc |site>)/sqrt(2);
    requires an ancilla-enabled basis.
    """
    i = basis.site_index(site)
    dim = basis.dim
    if kind == "single_photon_site":
        psi = np.zeros(dim, dtype=complex)
        psi[i] = 1.0  # ancilla (if any) stays in ANC0
        return DensityMatrix(basis, np.outer(psi, psi.conj()))
    if kind == "epr_with_ancilla":
        if not basis.include_ancilla:
            raise ValueError("EPR initial state requires an ancilla-enabled basis")
        psi = np.zeros(dim, dtype=complex)
        psi[basis.vac_index] = 1.0 / np.sqrt(2.0)          # ANC0 x VAC
        psi[basis.base_dim + i] = 1.0 / np.sqrt(2.0)       # ANC1 x SITE(i)
        return DensityMatrix(basis, np.outer(psi, psi.conj()))
    raise ValueError(f"unknown initial state kind {kind!r}")


def to_json_dict(rho: DensityMatrix) -> dict:
    """Serialize as a row-major (re, im) pair list next to the label list."""
    flat = rho.data.reshape(-1)
    return {
        "labels": list(rho.basis.labels),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def from_json_dict(doc: dict) -> DensityMatrix:
    basis = basis_from_labels(doc["labels"])
    flat = np.array([complex(re, im) for re, im in doc["data"]])
    return DensityMatrix(basis, flat.reshape(basis.dim, basis.dim))
