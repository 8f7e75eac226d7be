"""symred: desk-scale verification of symmetry-reduced semiclassical spectra."""

__version__ = "0.1.0"

from .errors import (
    AmbiguityError,
    ConfigError,
    DegenerateWindowError,
    GridError,
    NoTurningPointError,
    NonIntegerMultiplicityError,
    PhaseUnwrapError,
    QuadratureError,
    StepSizeError,
    StratumError,
    SymredError,
    ToleranceError,
)
from .groups import (
    GroupModel,
    IrreducibleCharacter,
    StabilizerModel,
    apply_symplectic,
    character_value,
    haar_average,
    make_group,
    stabilizer_of,
    trivial_multiplicity,
)
from .hamiltonians import HamiltonianModel, RadialPotential, make_hamiltonian, make_potential
from .reduction import (
    ChartPoint,
    ReducedVolumeResult,
    chart_volume,
    liouville_mass,
    momentum_map,
    omega0_residual,
    orbit_dimension_k0,
    orbit_volume,
    reduced_volume,
    to_reduced_chart,
)
