"""Jones calculus in the left-right circular polarisation basis.

A retarder with phase shift ``r`` whose optical axis is rotated by ``eta``
has the Jones matrix

    [[cos(r/2),                i*sin(r/2)*exp(2i*eta)],
     [i*sin(r/2)*exp(-2i*eta), cos(r/2)             ]]

and a rotator by ``eta`` is ``diag(exp(i*eta), exp(-i*eta))``.  These are
the classical faces of the quantum rotation and phase gates: replacing the
explicit imaginary unit by its negative and relabelling pulse area ->
retardation, pulse phase -> twice the axis angle turns one picture into the
other, and the off-diagonal magnitude (conversion efficiency) is identical
in both.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .su2 import Propagator


@dataclass(frozen=True)
class WavePlate:
    """A retarder: phase shift between the rays, and optical-axis angle."""

    retardation: float
    axis_angle: float = 0.0

    def __post_init__(self):
        if not float(self.retardation) > 0.0:
            raise ValueError(
                f"retardation must be positive, got {self.retardation!r}"
            )
        object.__setattr__(self, "retardation", float(self.retardation))
        object.__setattr__(self, "axis_angle", float(self.axis_angle))


def retarder(plate: WavePlate) -> np.ndarray:
    """Jones matrix of a rotated retarder (LR circular basis)."""
    c = math.cos(0.5 * plate.retardation)
    s = math.sin(0.5 * plate.retardation)
    e = np.exp(2j * plate.axis_angle)
    return np.array([[c, 1j * s * e], [1j * s / e, c]], dtype=complex)


def rotator(angle: float) -> np.ndarray:
    """Jones matrix of a polarisation rotator by ``angle``."""
    e = np.exp(1j * angle)
    return np.array([[e, 0.0], [0.0, 1.0 / e]], dtype=complex)


def from_propagator(p: Propagator, sign: str = "+") -> np.ndarray:
    """Map a quantum propagator to the equivalent Jones matrix.

    Both branches implement the i -> -i dictionary; they differ in which
    sign is used for the pulse-phase -> axis-angle relabelling:

    * ``"+"`` flips only the explicit imaginary unit (conjugation by
      ``sigma_z``), which matches plates built with ``axis = phase / 2``;
    * ``"-"`` conjugates every entry, matching ``axis = -phase / 2``.

    The off-diagonal magnitude, and hence the conversion efficiency, is the
    same either way.
    """
    if sign == "+":
        return np.array(
            [[p.a, -p.b], [np.conj(p.b), np.conj(p.a)]], dtype=complex
        )
    if sign == "-":
        return np.conj(
            np.array([[p.a, p.b], [-np.conj(p.b), np.conj(p.a)]], dtype=complex)
        )
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def stack_conversion_efficiency(
    plates: Sequence[WavePlate], phase_scale: float
) -> float:
    """``|J12|^2`` of a plate stack with all retardations scaled jointly.

    ``phase_scale`` models chromatic operation of a stack cut from one
    material: every plate's retardation is multiplied by the same factor
    (``1 + error`` in the quantum picture).  A scale of zero is allowed and
    gives the identity stack.  Plates compose chronologically, first plate
    rightmost in the matrix product.
    """
    s = float(phase_scale)
    if s < 0.0:
        raise ValueError(f"phase_scale must be >= 0, got {phase_scale!r}")
    j = np.eye(2, dtype=complex)
    for plate in plates:
        c = math.cos(0.5 * plate.retardation * s)
        si = math.sin(0.5 * plate.retardation * s)
        e = np.exp(2j * plate.axis_angle)
        j = np.array([[c, 1j * si * e], [1j * si / e, c]], dtype=complex) @ j
    return float(min(max(abs(j[0, 1]) ** 2, 0.0), 1.0))


def unitarity_defect(matrix: np.ndarray) -> float:
    """Frobenius distance of ``conj(M).T @ M`` from the identity."""
    m = np.asarray(matrix, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(2), ord="fro"))


def stack_to_dict(plates: Iterable[WavePlate], label: str = "stack") -> dict:
    """Wave-plate stack document, retardations and axis angles in units of pi."""
    return {
        "label": label,
        "units": "pi",
        "plates": [
            {
                "retardation": plate.retardation / math.pi,
                "axis_angle": plate.axis_angle / math.pi,
            }
            for plate in plates
        ],
    }


def stack_from_dict(doc: dict) -> list[WavePlate]:
    """Parse a wave-plate stack document (see ``stack_to_dict``)."""
    if doc.get("units") != "pi":
        raise ValueError(f"stack field 'units' must be 'pi', got {doc.get('units')!r}")
    plates = doc.get("plates")
    if not isinstance(plates, list):
        raise ValueError("stack field 'plates' must be a list")
    out = []
    for i, entry in enumerate(plates):
        try:
            out.append(
                WavePlate(
                    retardation=float(entry["retardation"]) * math.pi,
                    axis_angle=float(entry["axis_angle"]) * math.pi,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"stack field 'plates[{i}]' is malformed: {exc}") from exc
    return out


def dump_stack(plates: Iterable[WavePlate], fh: IO[str], label: str = "stack") -> None:
    json.dump(stack_to_dict(plates, label), fh, indent=2, sort_keys=True)
    fh.write("\n")


def load_stack(fh: IO[str]) -> list[WavePlate]:
    return stack_from_dict(json.load(fh))
