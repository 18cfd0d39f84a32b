"""Exact optimal quantization of the uniform self-similar measure on the Sierpinski carpet."""

from .distortion import (
    AtomSet,
    Interval,
    LloydReport,
    atom_distortion,
    cell_centroid,
    cell_centroids,
    distortion_bounds,
    is_cvt,
    lloyd_run,
    lloyd_step,
    partial_sum_lower_bound,
    split_distortion,
)
from .errors import (
    AmbiguousCellError,
    CarpetQuantError,
    DegenerateCellError,
    InputError,
    ResourceError,
)
from .geometry import SYMMETRIES, Codebook, Square, classify_square, nearest_site
from .measure import (
    MOMENTS,
    atoms,
    cantor_atoms,
    cylinder,
    cylinder_point_distortion,
    marginal_atoms,
    similitude_apply,
    word_apply,
    words,
)
from .optimal import (
    base_set,
    decompose,
    enumerate_optimal,
    optimal_count,
    optimal_set,
    optimal_set_at,
    quantization_error,
)

__version__ = "0.1.0"
