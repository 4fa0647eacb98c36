from src.model.grids import Grid, Grid1D, Grid2D, RadialGrid
from src.model.mesh import CourantMesh, IntervalMesh, Mesh, mesh_for
from src.model.params import Parameters
from src.model.sources import (
    Atom,
    Disk,
    Interval,
    Patch,
    Rectangle,
    SourceSpec,
    cumulative_integral,
    load_vector,
    sample_source,
    source_mean,
)
from src.model.state import LayerState, SimilarityPair
