"""Color-avoiding percolation on k-colored Erdős–Rényi random graphs."""

__version__ = "0.1.0"

from .census import (  # noqa: E402
    BlackColoring,
    CaCensus,
    ComponentCensus,
    black_coloring,
    black_threshold,
    ca_census,
    census,
)
from .connectivity import CaPartition, Labeling, ca_oracle, ca_partition, components, meet  # noqa: E402
from .model import (  # noqa: E402
    ColoredMultigraph,
    ColorSet,
    ModelParams,
    layer_complement_view,
    layer_union_view,
    read_edgelist,
    sample_model,
    write_edgelist,
)
from .rng import derive_seed  # noqa: E402

__all__ = [
    "BlackColoring",
    "CaCensus",
    "CaPartition",
    "ColorSet",
    "ColoredMultigraph",
    "ComponentCensus",
    "Labeling",
    "ModelParams",
    "black_coloring",
    "black_threshold",
    "ca_census",
    "ca_oracle",
    "ca_partition",
    "census",
    "components",
    "derive_seed",
    "layer_complement_view",
    "layer_union_view",
    "meet",
    "read_edgelist",
    "sample_model",
    "write_edgelist",
]
