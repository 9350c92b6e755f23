"""Hotspot-lemma diagnostics for shift spaces over countable alphabets and continued fractions."""

from .words import (
    CylinderUnion,
    Relation,
    Word,
    canonicalize,
    complement_decomposition,
    format_word,
    member_at,
    parse_word,
    relate,
)
from .measures import (
    Bernoulli,
    ExpSqrtLog,
    ExplicitFinite,
    Gauss,
    Geometric,
    Identity,
    Power,
    Table,
    Zeta,
    bernoulli_cylinder_measure,
    gauge_eval,
    gauss_cylinder_measure,
    tail_series,
)
from .streams import (
    CFQuadraticPeriodic,
    CFRational,
    DigitStream,
    EndOfStream,
    Explicit,
    IID,
    Periodic,
    Ramp,
    cf_digits_rational,
    digit_at,
    shift,
)
from .birkhoff import (
    decomposition_counts,
    escape_report,
    frequency_curve,
    hit_count,
    sliding_block_check,
)
from .analysis import (
    BudgetExceeded,
    Theorem,
    VerdictParams,
    counterexample_report,
    enumerate_deviation_set,
    h_phi_decay_scan,
    h_phi_exact,
    theorem_verdict,
)

__version__ = "0.1.0"
