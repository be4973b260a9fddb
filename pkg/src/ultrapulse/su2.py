"""Errant SU(2) propagators for trains of resonant rectangular pulses.

A propagator is stored by its two complex Cayley-Klein parameters ``(a, b)``,
the first row of the special-unitary matrix ``[[a, b], [-conj(b), conj(a)]]``.
A resonant pulse of nominal area ``theta`` and phase ``phi``, driven with a
relative area error ``eps`` (so the realized area is ``theta*(1+eps)``),
produces

    a = cos(theta*(1+eps)/2)
    b = -i * exp(i*phi) * sin(theta*(1+eps)/2)

Trains compose chronologically: the matrix of the full sequence is the
right-to-left product of the single-pulse matrices, every factor errant by
the same ``eps``.

Everything in this module is a pure function over immutable values and is
safe to call from any number of threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Rescale running products every this many factors so that roundoff in
# |a|^2 + |b|^2 stays within a 1e-12 budget for arbitrarily long trains.
_RENORM_EVERY = 32

# Below this magnitude the complex argument of a Cayley-Klein parameter is
# numerically meaningless and the matching decomposition angle is reported
# as zero with a degeneracy flag.
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class Pulse:
    """One resonant rectangular pulse: nominal area and phase, in radians.

    The phase is normalized to [0, 2*pi); the area must be positive.
    """

    area: float
    phase: float = 0.0

    def __post_init__(self):
        area = float(self.area)
        if not area > 0.0:
            raise ValueError(f"pulse area must be positive, got {self.area!r}")
        object.__setattr__(self, "area", area)
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)


@dataclass(frozen=True)
class Propagator:
    """SU(2) matrix ``[[a, b], [-conj(b), conj(a)]]`` stored as ``(a, b)``."""

    a: complex
    b: complex

    @staticmethod
    def identity() -> "Propagator":
        return Propagator(1.0 + 0.0j, 0.0j)

    @property
    def matrix(self) -> np.ndarray:
        """The full 2x2 complex matrix."""
        return np.array(
            [[self.a, self.b], [-np.conj(self.b), np.conj(self.a)]],
            dtype=complex,
        )

    @property
    def unitarity_defect(self) -> float:
        """``| |a|^2 + |b|^2 - 1 |``; zero for an exactly unitary pair."""
        return abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0)

    def renormalized(self) -> "Propagator":
        """Rescale ``(a, b)`` onto the unit sphere ``|a|^2 + |b|^2 = 1``."""
        n = math.sqrt(abs(self.a) ** 2 + abs(self.b) ** 2)
        return Propagator(self.a / n, self.b / n)


@dataclass(frozen=True)
class RotationDecomposition:
    """Angle decomposition of a propagator.

    ``theta`` in [0, pi] is the errant rotation angle, ``zeta`` the errant
    phase-shift angle and ``phi`` in [0, 2*pi) the errant relative phase,
    chosen so that

        a = exp(-i*zeta/2) * cos(theta/2)
        b = -i * exp(i*phi) * sin(theta/2)

    ``zeta`` lives in (-2*pi, 2*pi): folding it into a half turn would flip
    the sign of ``exp(-i*zeta/2)`` and break the reconstruction above.
    When ``|a|`` (resp. ``|b|``) vanishes, ``zeta`` (resp. ``phi``) carries
    no information; it is reported as 0.0 with the matching flag set so that
    callers sweeping across such points need not special-case them.
    """

    theta: float
    zeta: float
    phi: float
    zeta_degenerate: bool = False
    phi_degenerate: bool = False

    def to_propagator(self) -> Propagator:
        """Rebuild the propagator encoded by the three angles."""
        a = cmath.exp(-0.5j * self.zeta) * math.cos(0.5 * self.theta)
        b = -1j * cmath.exp(1j * self.phi) * math.sin(0.5 * self.theta)
        return Propagator(a, b)


def cayley_klein(
    pulses: Iterable[Pulse], errors: np.ndarray | float
) -> tuple[np.ndarray, np.ndarray]:
    """Cayley-Klein entries of a composed errant train on an error grid.

    Parameters
    ----------
    pulses : iterable of Pulse
        The train in chronological order (first pulse applied first).
    errors : array_like
        Relative area errors; the same error scales every pulse.

    Returns
    -------
    (a, b) : pair of complex ndarrays, same shape as ``errors``.
    """
    eps = np.asarray(errors, dtype=float)
    a = np.ones(eps.shape, dtype=complex)
    b = np.zeros(eps.shape, dtype=complex)
    for k, p in enumerate(pulses, start=1):
        half = 0.5 * p.area * (1.0 + eps)
        ap = np.cos(half)
        bp = -1j * np.exp(1j * p.phase) * np.sin(half)
        a, b = ap * a - bp * np.conj(b), ap * b + bp * np.conj(a)
        if k % _RENORM_EVERY == 0:
            norm = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
            a = a / norm
            b = b / norm
    return a, b


def single_propagator(pulse: Pulse, error: float) -> Propagator:
    """Propagator of one pulse whose area is scaled by ``1 + error``.

    Errors beyond [-1, 1] are accepted; values there are extrapolations of
    the same closed form.
    """
    half = 0.5 * pulse.area * (1.0 + error)
    return Propagator(
        complex(math.cos(half)),
        -1j * cmath.exp(1j * pulse.phase) * math.sin(half),
    )


def compose(pulses: Sequence[Pulse], error: float) -> Propagator:
    """Compose a chronological train at a common relative area error.

    The result is the right-to-left matrix product of the single-pulse
    propagators.  An empty train gives the identity.
    """
    a, b = cayley_klein(pulses, float(error))
    return Propagator(complex(a), complex(b))


def transition_probability(pulses: Sequence[Pulse], error: float) -> float:
    """``|b|^2`` of the composed train, clamped into [0, 1].

    This is the population-transfer probability of the errant sequence; the
    clamp removes ~1e-16 floating-point overshoot only.
    """
    _, b = cayley_klein(pulses, float(error))
    return float(min(max(abs(complex(b)) ** 2, 0.0), 1.0))


def trace_fidelity_z(
    pulses: Sequence[Pulse], error: float, target_zeta: float = math.pi
) -> float:
    """Trace overlap of the errant train with a z-rotation by ``target_zeta``.

    Returns ``Re((1/2) Tr[U(error) @ conj(T).T])`` for the diagonal target
    ``T = diag(exp(-i*zeta/2), exp(i*zeta/2))``, which reduces to
    ``Re(a * exp(i*zeta/2))``.  The value is +1 when the train realizes the
    target exactly and is clamped into [-1, 1].

    In the decomposition angles this equals ``cos((zeta - zeta_err)/2) *
    cos(theta_err/2)``; for ``target_zeta = pi`` that is
    ``sin(zeta_err/2) * cos(theta_err/2)``.
    """
    a, _ = cayley_klein(pulses, float(error))
    f = (complex(a) * cmath.exp(0.5j * target_zeta)).real
    return float(min(max(f, -1.0), 1.0))


def decompose(p: Propagator) -> RotationDecomposition:
    """Extract the angle decomposition of a propagator.

    ``theta = 2*arccos(|a|)``, ``zeta = -2*arg(a)`` and ``phi = arg(i*b)``
    modulo 2*pi.  At ``|a| = 0`` (pure rotation) ``zeta`` is undefined and
    at ``|b| = 0`` (pure phase shift) ``phi`` is undefined; both come back
    as 0.0 with their degeneracy flag set instead of raising, so sweeps
    over isolated degenerate points do not abort.
    """
    a, b = complex(p.a), complex(p.b)
    theta = 2.0 * math.acos(min(max(abs(a), 0.0), 1.0))
    if abs(a) <= _DEGENERATE:
        zeta, zeta_degenerate = 0.0, True
    else:
        zeta, zeta_degenerate = -2.0 * cmath.phase(a), False
    if abs(b) <= _DEGENERATE:
        phi, phi_degenerate = 0.0, True
    else:
        phi, phi_degenerate = cmath.phase(1j * b) % TWO_PI, False
    return RotationDecomposition(theta, zeta, phi, zeta_degenerate, phi_degenerate)
