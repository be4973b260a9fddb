"""Composite pi-pulse and composite wave-plate design toolbox.

Builds errant SU(2) propagators for trains of resonant pulses, evaluates
broadband/narrowband/passband/phasal robustness functionals, re-derives
optimized composite phase tables by numerical search, and maps every result
into Jones calculus for polarisation optics.
"""

from .jones import (
    WavePlate,
    from_propagator,
    retarder,
    rotator,
    stack_conversion_efficiency,
)
from .metrics import (
    MetricsReport,
    Profile,
    area_passband,
    area_whole,
    compute_metrics,
    conversion_efficiency_axis,
    enclosing_threshold_range,
    fwhm,
    rectangularity,
    sample_profile,
    threshold_range,
    write_profile_csv,
)
from .optimize import (
    OptimizationProblem,
    OptimizationResult,
    VerificationReport,
    derive,
    equivalence_class,
    refine,
    verify_tables,
)
from .sequences import (
    CompositeSequence,
    Family,
    GoldenRow,
    build_ub,
    build_ubph,
    build_un,
    build_upb,
    check_structure,
    dump_sequence,
    get_sequence,
    golden_tables,
    list_labels,
    load_sequence,
    make_reference,
    single_sequence,
    to_jones_stack,
)
from .su2 import (
    Propagator,
    Pulse,
    RotationDecomposition,
    cayley_klein,
    compose,
    decompose,
    single_propagator,
    trace_fidelity_z,
    transition_probability,
)

__version__ = "0.1.0"

__all__ = [
    "CompositeSequence",
    "Family",
    "GoldenRow",
    "MetricsReport",
    "OptimizationProblem",
    "OptimizationResult",
    "Profile",
    "Propagator",
    "Pulse",
    "RotationDecomposition",
    "VerificationReport",
    "WavePlate",
    "area_passband",
    "area_whole",
    "build_ub",
    "build_ubph",
    "build_un",
    "build_upb",
    "cayley_klein",
    "check_structure",
    "compose",
    "compute_metrics",
    "conversion_efficiency_axis",
    "decompose",
    "derive",
    "dump_sequence",
    "enclosing_threshold_range",
    "equivalence_class",
    "from_propagator",
    "fwhm",
    "get_sequence",
    "golden_tables",
    "list_labels",
    "load_sequence",
    "make_reference",
    "rectangularity",
    "refine",
    "retarder",
    "rotator",
    "sample_profile",
    "single_propagator",
    "single_sequence",
    "stack_conversion_efficiency",
    "threshold_range",
    "to_jones_stack",
    "trace_fidelity_z",
    "transition_probability",
    "verify_tables",
    "write_profile_csv",
]
