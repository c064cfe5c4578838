"""tilerec: planar tilings, tiling metrics, local complexity and recurrence certificates."""

from .complexity import FLCReport, T2Census, classify_flc, enumerate_T2
from .errors import (
    BudgetExhausted,
    ConfigError,
    DegenerateBasis,
    EmptyInput,
    InsufficientWindow,
    TilerecError,
)
from .generators import GeneratorSpec, make_provider, penrose, pinwheel, shear_squares, square_lattice
from .geometry import DEFAULT_TOL, Isometry2, Tolerances, hausdorff_distance, isometry_distance
from .ipsets import IPSetSpec, ip_contains, ip_enumerate
from .metrics import MetricResult, metric_d1, metric_d2, metric_d3, metric_general
from .recurrence import (
    PatternF,
    WitnessCertificate,
    search_witness,
    thm1_to_thm2,
    thm2_to_thm3,
    verify_witness,
    verify_witness_thm1,
    verify_witness_thm2,
    verify_witness_thm3,
)
from .tiling import (
    Patch,
    Prototile,
    StaticProvider,
    TileSet,
    TilingWindow,
    TransformedProvider,
    WindowProvider,
    canonicalize,
    patch_support_contains_disk,
    patches_covering,
)

__version__ = "0.1.0"
