"""Frequency-estimation sketches with a compact query-side export.

The package provides the slim-fat sketch family (sf1..sf4, sff) next to the
classic counter baselines (cm, c, cu, cml), an exact dictionary oracle,
workload generators, accuracy metrics, a bit-exact export format for the
query-side counter arrays, and a CLI harness (see ``sfsketch.cli``).
"""

from .baselines import CmlSketch, CmSketch, CountSketch, CuSketch
from .errors import (
    ConfigurationError,
    ExportFormatError,
    PhantomDeletionError,
    SaturationError,
    SketchError,
    TraceFormatError,
    UndefinedMetricError,
    UnsupportedOperationError,
)
from .hashing import key_from_string
from .metrics import (
    accuracy_report,
    cdf_points,
    correct_rate_bound,
    measure_alpha,
    relative_error,
    tail_violation_rate,
)
from .oracle import ExactOracle, tally_counts
from .params import SketchParams
from .serialize import CollectorSketch, export_slim, import_slim
from .sf import SfSketch, Variant
from .workloads import Operation, Workload, WorkloadSpec, generate

__version__ = "0.1.0"

__all__ = [
    "CmSketch",
    "CountSketch",
    "CuSketch",
    "CmlSketch",
    "SfSketch",
    "Variant",
    "SketchParams",
    "ExactOracle",
    "tally_counts",
    "CollectorSketch",
    "export_slim",
    "import_slim",
    "Operation",
    "Workload",
    "WorkloadSpec",
    "generate",
    "accuracy_report",
    "cdf_points",
    "correct_rate_bound",
    "measure_alpha",
    "relative_error",
    "tail_violation_rate",
    "key_from_string",
    "SketchError",
    "ConfigurationError",
    "UnsupportedOperationError",
    "PhantomDeletionError",
    "SaturationError",
    "UndefinedMetricError",
    "TraceFormatError",
    "ExportFormatError",
    "__version__",
]
