"""Composite-sequence families, builders, and the bundled reference tables.

Four structural families of composite pi rotations / pi phase shifts are
supported, each parametrized by a vector of free phases:

* ``UB`` -- mirror-symmetric train of nominal pi pulses, first phase fixed
  to zero; maximizes the whole-range transfer area (broadband).
* ``UN`` -- antisymmetric train of nominal pi pulses, middle phase fixed to
  pi, second half the negated first half in reverse; minimizes the area
  (narrowband).
* ``UPB`` -- one pi pulse at phase zero followed by 2*pi pulses at free
  phases; minimizes the passband objective (square-like profiles).
* ``UBPh`` -- a half-train of pi pulses followed by the same half-train
  with every phase shifted by pi/2; maximizes the z-rotation fidelity area
  (phasal, i.e. a composite phase gate).

The module also carries, verbatim, the tables of optimized phases this
library is expected to reproduce, together with their published figures of
merit, plus the classic five-pulse BB2 / NB2 / PB2 reference sequences.
All table phases are stored in units of pi exactly as printed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .jones import WavePlate
from .su2 import TWO_PI, Pulse

PI = math.pi

_MOD_TOL = 1e-12


class Family(Enum):
    """Structural family of a composite sequence."""

    ULTRA_BROADBAND = "ub"
    ULTRA_NARROWBAND = "un"
    ULTRA_PASSBAND = "upb"
    ULTRA_BROADBAND_PHASAL = "ubph"
    REFERENCE_BB2 = "bb2"
    REFERENCE_NB2 = "nb2"
    REFERENCE_PB2 = "pb2"
    SINGLE_PULSE = "single"


#: Families whose natural robustness profile is the trace fidelity of a
#: z-rotation rather than the transition probability.
FIDELITY_FAMILIES = frozenset({Family.ULTRA_BROADBAND_PHASAL})


@dataclass(frozen=True)
class CompositeSequence:
    """A materialized pulse train plus its family tag and free parameters."""

    family: Family
    free_phases: tuple[float, ...]
    pulses: tuple[Pulse, ...]
    label: str

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)

    @property
    def total_area(self) -> float:
        """Run time of the train: the sum of nominal pulse areas."""
        return float(sum(p.area for p in self.pulses))

    @property
    def phases(self) -> tuple[float, ...]:
        return tuple(p.phase for p in self.pulses)

    @property
    def areas(self) -> tuple[float, ...]:
        return tuple(p.area for p in self.pulses)


def _angles_equal(x: float, y: float, tol: float = _MOD_TOL) -> bool:
    d = (x - y) % TWO_PI
    return d <= tol or TWO_PI - d <= tol


def single_sequence(label: str = "single") -> CompositeSequence:
    """The one-pulse sequence: a single nominal pi pulse at phase zero."""
    return CompositeSequence(
        family=Family.SINGLE_PULSE,
        free_phases=(),
        pulses=(Pulse(PI, 0.0),),
        label=label,
    )


def build_ub(
    free_phases: Sequence[float], label: str | None = None
) -> CompositeSequence:
    """Mirror-symmetric broadband train from its free phases (radians).

    ``free_phases`` are the phases of pulses 2 .. (N+1)/2; the first and
    last phases are zero and the second half mirrors the first.  An empty
    vector gives the single-pulse sequence.
    """
    free = [float(x) % TWO_PI for x in free_phases]
    if not free:
        return single_sequence(label or "single")
    half = [0.0] + free
    phases = half + half[-2::-1]
    pulses = tuple(Pulse(PI, ph) for ph in phases)
    return CompositeSequence(
        family=Family.ULTRA_BROADBAND,
        free_phases=tuple(free),
        pulses=pulses,
        label=label or f"UB{len(pulses)}",
    )


def build_un(
    free_phases: Sequence[float], label: str | None = None
) -> CompositeSequence:
    """Antisymmetric narrowband train from its free phases (radians).

    ``free_phases`` are the phases of the first (N-1)/2 pulses; the middle
    phase is fixed to pi and the second half is the negated first half in
    reverse order.  An empty vector gives the single-pulse sequence.
    """
    free = [float(x) % TWO_PI for x in free_phases]
    if not free:
        return single_sequence(label or "single")
    phases = free + [PI] + [(-x) % TWO_PI for x in reversed(free)]
    pulses = tuple(Pulse(PI, ph) for ph in phases)
    return CompositeSequence(
        family=Family.ULTRA_NARROWBAND,
        free_phases=tuple(free),
        pulses=pulses,
        label=label or f"UN{len(pulses)}",
    )


def build_upb(
    free_phases: Sequence[float], label: str | None = None
) -> CompositeSequence:
    """Passband train: a pi pulse at phase zero, then 2*pi pulses.

    ``free_phases`` (radians) are the phases of the 2*pi pulses.  An empty
    vector gives the single-pulse sequence.  The run time is (2N-1)*pi for
    N pulses.
    """
    free = [float(x) % TWO_PI for x in free_phases]
    if not free:
        return single_sequence(label or "single")
    pulses = (Pulse(PI, 0.0),) + tuple(Pulse(2.0 * PI, ph) for ph in free)
    return CompositeSequence(
        family=Family.ULTRA_PASSBAND,
        free_phases=tuple(free),
        pulses=pulses,
        label=label or f"UPB{len(pulses)}",
    )


def build_ubph(
    free_phases: Sequence[float], label: str | None = None
) -> CompositeSequence:
    """Phasal train: a half-train of pi pulses, repeated shifted by pi/2.

    ``free_phases`` (radians) are the phases of the first half-train; the
    second half repeats them all shifted by +pi/2, giving an even number of
    pulses overall.
    """
    free = [float(x) % TWO_PI for x in free_phases]
    if not free:
        raise ValueError("phasal trains need at least one free phase (two pulses)")
    phases = free + [(x + 0.5 * PI) % TWO_PI for x in free]
    pulses = tuple(Pulse(PI, ph) for ph in phases)
    return CompositeSequence(
        family=Family.ULTRA_BROADBAND_PHASAL,
        free_phases=tuple(free),
        pulses=pulses,
        label=label or f"UBPh{len(pulses)}",
    )


_BB2_PHASES = (0.0, 0.5, 1.75, 1.75, 0.5)
_NB2_PHASES = (0.0, 0.5, 1.25, 1.25, 0.5)
_PB2_PHASES = (0.0, 0.5, 1.375, 1.375, 0.5)


def make_reference(family: Family, label: str | None = None) -> CompositeSequence:
    """One of the classic five-pulse reference sequences BB2 / NB2 / PB2."""
    if family is Family.REFERENCE_BB2:
        phases, areas, name = _BB2_PHASES, (1.0,) * 5, "BB2"
    elif family is Family.REFERENCE_NB2:
        phases, areas, name = _NB2_PHASES, (1.0,) * 5, "NB2"
    elif family is Family.REFERENCE_PB2:
        phases, areas, name = _PB2_PHASES, (1.0, 2.0, 2.0, 2.0, 2.0), "PB2"
    else:
        raise ValueError(f"not a reference family: {family}")
    pulses = tuple(Pulse(a * PI, ph * PI) for a, ph in zip(areas, phases))
    return CompositeSequence(
        family=family, free_phases=(), pulses=pulses, label=label or name
    )


def free_phases_of(seq: CompositeSequence) -> tuple[float, ...]:
    """Re-extract the free-phase vector from the materialized pulses."""
    n = seq.n_pulses
    phases = seq.phases
    if seq.family is Family.ULTRA_BROADBAND:
        return phases[1 : (n + 1) // 2]
    if seq.family is Family.ULTRA_NARROWBAND:
        return phases[: (n - 1) // 2]
    if seq.family is Family.ULTRA_PASSBAND:
        return phases[1:]
    if seq.family is Family.ULTRA_BROADBAND_PHASAL:
        return phases[: n // 2]
    return ()


def check_structure(seq: CompositeSequence) -> None:
    """Validate that the pulses realize the family's structural constraint.

    Raises ValueError describing the first violated constraint.  Angle
    comparisons are modulo 2*pi with a 1e-12 tolerance.
    """
    n = seq.n_pulses
    areas = seq.areas
    phases = seq.phases
    fam = seq.family

    def expect(cond: bool, message: str) -> None:
        if not cond:
            raise ValueError(f"{seq.label}: {message}")

    if fam is Family.SINGLE_PULSE:
        expect(n == 1, f"single-pulse sequence must have 1 pulse, has {n}")
        expect(abs(areas[0] - PI) <= _MOD_TOL, "single pulse area must be pi")
        expect(_angles_equal(phases[0], 0.0), "single pulse phase must be 0")
        return

    if fam in (Family.REFERENCE_BB2, Family.REFERENCE_NB2, Family.REFERENCE_PB2):
        ref = make_reference(fam)
        expect(n == ref.n_pulses, f"reference needs {ref.n_pulses} pulses, has {n}")
        for i, (got, want) in enumerate(zip(areas, ref.areas)):
            expect(abs(got - want) <= _MOD_TOL, f"pulse {i + 1} area mismatch")
        for i, (got, want) in enumerate(zip(phases, ref.phases)):
            expect(_angles_equal(got, want), f"pulse {i + 1} phase mismatch")
        return

    if fam is Family.ULTRA_PASSBAND:
        expect(n >= 2, f"passband train needs >= 2 pulses, has {n}")
        expect(abs(areas[0] - PI) <= _MOD_TOL, "first pulse area must be pi")
        expect(_angles_equal(phases[0], 0.0), "first pulse phase must be 0")
        for i in range(1, n):
            expect(
                abs(areas[i] - 2.0 * PI) <= _MOD_TOL,
                f"pulse {i + 1} area must be 2*pi",
            )
        return

    for i in range(n):
        expect(abs(areas[i] - PI) <= _MOD_TOL, f"pulse {i + 1} area must be pi")

    if fam is Family.ULTRA_BROADBAND:
        expect(n >= 3 and n % 2 == 1, f"broadband train needs odd N >= 3, has {n}")
        expect(_angles_equal(phases[0], 0.0), "first pulse phase must be 0")
        for i in range(n // 2):
            expect(
                _angles_equal(phases[i], phases[n - 1 - i]),
                f"phases {i + 1} and {n - i} must mirror",
            )
    elif fam is Family.ULTRA_NARROWBAND:
        expect(n >= 3 and n % 2 == 1, f"narrowband train needs odd N >= 3, has {n}")
        expect(_angles_equal(phases[n // 2], PI), "middle phase must be pi")
        for i in range(n // 2):
            expect(
                _angles_equal(phases[i], -phases[n - 1 - i]),
                f"phases {i + 1} and {n - i} must be opposite",
            )
    elif fam is Family.ULTRA_BROADBAND_PHASAL:
        expect(n >= 2 and n % 2 == 0, f"phasal train needs even N >= 2, has {n}")
        for i in range(n // 2):
            expect(
                _angles_equal(phases[n // 2 + i], phases[i] + 0.5 * PI),
                f"phase {n // 2 + i + 1} must be phase {i + 1} + pi/2",
            )
    else:  # pragma: no cover - exhaustive over Family
        raise ValueError(f"unknown family {fam}")


def to_jones_stack(seq: CompositeSequence) -> tuple[WavePlate, ...]:
    """Wave-plate stack equivalent to the pulse train.

    Each pulse (area, phase) becomes a plate with retardation equal to the
    area and axis angle equal to half the phase (the ``+`` branch of the
    quantum-classical dictionary; the opposite sign gives the same
    conversion efficiency everywhere).
    """
    return tuple(WavePlate(p.area, 0.5 * p.phase) for p in seq.pulses)


# ---------------------------------------------------------------------------
# Reference tables
# ---------------------------------------------------------------------------

#: Groups a table row belongs to, keyed by the figure of merit it reports.
GROUP_BROADBAND = "broadband"
GROUP_NARROWBAND = "narrowband"
GROUP_PASSBAND = "passband"
GROUP_PHASAL = "phasal"


@dataclass(frozen=True)
class GoldenRow:
    """One row of the bundled tables: printed phases plus reported metrics.

    ``phases`` is the printed parametrization in units of pi (the free
    phases preceded/followed by the fixed ones exactly as the tables list
    them; full pulse lists for the BB2/NB2/PB2 reference rows).  Areas are
    dimensionless, ranges are in units of pi.
    """

    label: str
    group: str
    family: Family
    phases: tuple[float, ...]
    n_pulses: int
    reported_range: tuple[float, float]
    reported_area: float | None = None
    reported_sigma_b: float | None = None
    reported_sigma_n: float | None = None
    reported_kappa: float | None = None


_SQRT2 = math.sqrt(2.0)

_BROADBAND_ROWS = (
    GoldenRow("single", GROUP_BROADBAND, Family.SINGLE_PULSE, (0.0,), 1,
              (0.795, 1.205), reported_area=1.0),
    GoldenRow("Bat3", GROUP_BROADBAND, Family.ULTRA_BROADBAND, (0.0, 0.5), 3,
              (0.376, 1.624), reported_area=1.5),
    GoldenRow("Bat5", GROUP_BROADBAND, Family.ULTRA_BROADBAND,
              (0.0, 0.5825, 0.3737), 5, (0.248, 1.752), reported_area=5.0 / 3.0),
    GoldenRow("Bat7", GROUP_BROADBAND, Family.ULTRA_BROADBAND,
              (0.0, 0.6230, 0.4918, 0.7558), 7, (0.185, 1.815),
              reported_area=1.75),
    GoldenRow("Bat9", GROUP_BROADBAND, Family.ULTRA_BROADBAND,
              (0.0, 0.6490, 0.5514, 0.8458, 0.6774), 9, (0.148, 1.852),
              reported_area=1.8),
    GoldenRow("Bat11", GROUP_BROADBAND, Family.ULTRA_BROADBAND,
              (0.0, 0.6677, 0.5886, 0.9044, 0.7786, 0.9663), 11,
              (0.123, 1.877), reported_area=11.0 / 6.0),
    GoldenRow("BB2", GROUP_BROADBAND, Family.REFERENCE_BB2, _BB2_PHASES, 5,
              (0.356, 1.644), reported_area=(11.0 + _SQRT2) / 8.0),
)

_NARROWBAND_ROWS = (
    GoldenRow("single", GROUP_NARROWBAND, Family.SINGLE_PULSE, (0.0,), 1,
              (0.5, 1.5), reported_area=1.0),
    GoldenRow("Snake3", GROUP_NARROWBAND, Family.ULTRA_NARROWBAND, (0.5, 1.0),
              3, (0.772, 1.228), reported_area=0.5),
    GoldenRow("Snake5", GROUP_NARROWBAND, Family.ULTRA_NARROWBAND,
              (0.5896, 0.4104, 1.0), 5, (0.851, 1.149),
              reported_area=1.0 / 3.0),
    GoldenRow("Snake7", GROUP_NARROWBAND, Family.ULTRA_NARROWBAND,
              (0.5193, 0.6121, 0.3671, 1.0), 7, (0.889, 1.111),
              reported_area=0.25),
    GoldenRow("Snake9", GROUP_NARROWBAND, Family.ULTRA_NARROWBAND,
              (0.5451, 0.4880, 0.6235, 0.3340, 1.0), 9, (0.911, 1.089),
              reported_area=0.2),
    GoldenRow("Snake11", GROUP_NARROWBAND, Family.ULTRA_NARROWBAND,
              (0.5173, 0.5562, 0.4690, 0.6312, 0.3209, 1.0), 11,
              (0.926, 1.074), reported_area=1.0 / 6.0),
    GoldenRow("NB2", GROUP_NARROWBAND, Family.REFERENCE_NB2, _NB2_PHASES, 5,
              (0.792, 1.208), reported_area=(5.0 - _SQRT2) / 8.0),
)

_PASSBAND_ROWS = (
    GoldenRow("single", GROUP_PASSBAND, Family.SINGLE_PULSE, (0.0,), 1,
              (0.795, 1.205), reported_sigma_b=0.818, reported_sigma_n=0.182,
              reported_kappa=1.36),
    GoldenRow("Octopus3", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.4691, 1.1808), 3, (0.616, 1.384),
              reported_sigma_b=0.921, reported_sigma_n=0.079,
              reported_kappa=3.45),
    GoldenRow("Octopus5a", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.2882, 1.8507, 1.0435, 1.2262), 5, (0.573, 1.427),
              reported_sigma_b=0.950, reported_sigma_n=0.050,
              reported_kappa=5.49),
    GoldenRow("Octopus5b", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.5662, 1.0608, 1.2123, 1.9112), 5, (0.573, 1.427),
              reported_sigma_b=0.950, reported_sigma_n=0.050,
              reported_kappa=5.49),
    GoldenRow("Octopus7a", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.6147, 1.0574, 1.2526, 1.6722, 1.7673, 0.4758), 7,
              (0.553, 1.447), reported_sigma_b=0.963, reported_sigma_n=0.037,
              reported_kappa=7.52),
    GoldenRow("Octopus7b", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.5093, 0.6376, 0.0647, 1.4925, 1.1079, 1.6474), 7,
              (0.553, 1.447), reported_sigma_b=0.963, reported_sigma_n=0.037,
              reported_kappa=7.52),
    GoldenRow("Octopus7c", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.2093, 1.9577, 0.4264, 1.2674, 0.9907, 1.0733), 7,
              (0.553, 1.447), reported_sigma_b=0.963, reported_sigma_n=0.037,
              reported_kappa=7.52),
    GoldenRow("Octopus9a", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.4497, 0.3997, 0.0660, 0.6013, 1.3295, 1.4301, 0.9975,
               1.3957), 9, (0.542, 1.458),
              reported_sigma_b=0.971, reported_sigma_n=0.029,
              reported_kappa=9.54),
    GoldenRow("Octopus9b", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.2880, 0.9589, 0.8912, 1.0821, 1.6739, 1.4258, 1.8350,
               0.4227), 9, (0.542, 1.458),
              reported_sigma_b=0.971, reported_sigma_n=0.029,
              reported_kappa=9.54),
    GoldenRow("Octopus9c", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.3117, 0.6148, 1.2517, 1.2243, 0.6726, 1.2299, 1.6757,
               0.0398), 9, (0.542, 1.458),
              reported_sigma_b=0.971, reported_sigma_n=0.029,
              reported_kappa=9.54),
    GoldenRow("Octopus9d", GROUP_PASSBAND, Family.ULTRA_PASSBAND,
              (0.0, 0.6451, 1.0734, 1.2920, 1.6210, 1.7451, 0.1538, 0.2252,
               0.9445), 9, (0.542, 1.458),
              reported_sigma_b=0.971, reported_sigma_n=0.029,
              reported_kappa=9.54),
    GoldenRow("PB2", GROUP_PASSBAND, Family.REFERENCE_PB2, _PB2_PHASES, 5,
              (0.623, 1.377), reported_sigma_b=0.922, reported_sigma_n=0.078,
              reported_kappa=3.24),
)

_PHASAL_ROWS = (
    GoldenRow("two", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL, (0.0,), 2,
              (0.79517, 1.20483), reported_area=1.0),
    GoldenRow("BatPh4", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.6743), 4, (0.508, 1.492), reported_area=4.0 / 3.0),
    GoldenRow("BatPh6", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.0, 0.75), 6, (0.376, 1.624), reported_area=1.5),
    GoldenRow("BatPh8", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.0, 0.8048, 0.6000), 8, (0.299, 1.701),
              reported_area=1.6),
    GoldenRow("BatPh10", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.0, 0.0, 0.4129, 1.0871), 10, (0.248, 1.752),
              reported_area=5.0 / 3.0),
    GoldenRow("BatPh12", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.0, 0.0, 0.8624, 0.7142, 0.5696), 12, (0.212, 1.788),
              reported_area=12.0 / 7.0),
    GoldenRow("BatPh14", GROUP_PHASAL, Family.ULTRA_BROADBAND_PHASAL,
              (0.0, 0.0, 0.0, 0.0, 0.8798, 0.7500, 0.6202), 14,
              (0.185, 1.815), reported_area=1.75),
)

_ALL_ROWS = _BROADBAND_ROWS + _NARROWBAND_ROWS + _PASSBAND_ROWS + _PHASAL_ROWS


def golden_tables() -> tuple[GoldenRow, ...]:
    """Every bundled table row, in table order.

    The ``single`` sequence appears once per table it is listed in, each
    time with that table's reported metrics.
    """
    return _ALL_ROWS


def sequence_from_row(row: GoldenRow) -> CompositeSequence:
    """Materialize the pulse train a table row describes."""
    scaled = [p * PI for p in row.phases]
    if row.family is Family.SINGLE_PULSE:
        return single_sequence(row.label)
    if row.family is Family.ULTRA_BROADBAND:
        return build_ub(scaled[1:], label=row.label)
    if row.family is Family.ULTRA_NARROWBAND:
        return build_un(scaled[:-1], label=row.label)
    if row.family is Family.ULTRA_PASSBAND:
        return build_upb(scaled[1:], label=row.label)
    if row.family is Family.ULTRA_BROADBAND_PHASAL:
        return build_ubph(scaled, label=row.label)
    return make_reference(row.family, label=row.label)


def _build_registry() -> dict[str, GoldenRow]:
    registry: dict[str, GoldenRow] = {}
    for row in _ALL_ROWS:
        registry.setdefault(row.label.lower(), row)
    for base in ("octopus5", "octopus7", "octopus9"):
        registry[base] = registry[base + "a"]
    return registry


_REGISTRY = _build_registry()


def list_labels() -> tuple[str, ...]:
    """Canonical labels of every bundled sequence, in table order."""
    seen: dict[str, None] = {}
    for row in _ALL_ROWS:
        seen.setdefault(row.label, None)
    return tuple(seen)


def get_row(label: str) -> GoldenRow:
    """Look up a bundled table row by label (case-insensitive)."""
    try:
        return _REGISTRY[label.lower()]
    except KeyError:
        raise KeyError(
            f"unknown sequence label {label!r}; see list_labels()"
        ) from None


def get_sequence(label: str) -> CompositeSequence:
    """Materialize a bundled sequence by label (case-insensitive)."""
    return sequence_from_row(get_row(label))


def rows_for_label(label: str) -> tuple[GoldenRow, ...]:
    """All table rows for a label (``single`` is listed in three tables)."""
    want = get_row(label).label
    return tuple(row for row in _ALL_ROWS if row.label == want)


# ---------------------------------------------------------------------------
# Sequence file format
# ---------------------------------------------------------------------------

def sequence_to_dict(seq: CompositeSequence) -> dict:
    """The wire representation: areas and phases in units of pi."""
    return {
        "label": seq.label,
        "family": seq.family.value,
        "units": "pi",
        "areas": [a / PI for a in seq.areas],
        "phases": [ph / PI for ph in seq.phases],
    }


def sequence_from_dict(doc: dict) -> CompositeSequence:
    """Parse and structurally validate a sequence document.

    Unknown extra keys are ignored.  Raises ValueError naming the offending
    field on any schema or structure violation.
    """
    if not isinstance(doc, dict):
        raise ValueError("sequence document must be a mapping")
    try:
        family = Family(doc.get("family"))
    except ValueError:
        tokens = ", ".join(f.value for f in Family)
        raise ValueError(
            f"sequence field 'family' must be one of {tokens}; "
            f"got {doc.get('family')!r}"
        ) from None
    if doc.get("units") != "pi":
        raise ValueError(
            f"sequence field 'units' must be 'pi', got {doc.get('units')!r}"
        )
    areas = doc.get("areas")
    phases = doc.get("phases")
    for name, value in (("areas", areas), ("phases", phases)):
        if not isinstance(value, list) or not value or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
        ):
            raise ValueError(f"sequence field {name!r} must be a non-empty number list")
    if len(areas) != len(phases):
        raise ValueError(
            f"sequence fields 'areas' and 'phases' differ in length "
            f"({len(areas)} vs {len(phases)})"
        )
    label = doc.get("label", f"{family.value}{len(phases)}")
    if not isinstance(label, str):
        raise ValueError(f"sequence field 'label' must be a string, got {label!r}")
    pulses = tuple(
        Pulse(float(a) * PI, float(ph) * PI) for a, ph in zip(areas, phases)
    )
    seq = CompositeSequence(family=family, free_phases=(), pulses=pulses, label=label)
    seq = CompositeSequence(
        family=family,
        free_phases=free_phases_of(seq),
        pulses=pulses,
        label=label,
    )
    check_structure(seq)
    return seq


def dump_sequence(seq: CompositeSequence, fh: IO[str]) -> None:
    json.dump(sequence_to_dict(seq), fh, indent=2, sort_keys=True)
    fh.write("\n")


def load_sequence(fh: IO[str]) -> CompositeSequence:
    try:
        doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"sequence file is not valid JSON: {exc}") from exc
    return sequence_from_dict(doc)
