"""Transfer matrices, Lie closure tests and Lyapunov spectra for matrix-valued
continuous Anderson-Bernoulli models."""

__version__ = "0.1.0"

from .errors import (ClosureError, CriticalLengthError, NumericalError,  # noqa: E402
                     OutsideLogNeighborhood, SpecError)
from .interval import (EnergyInterval, SpectralBounds, critical_length,  # noqa: E402
                       energy_interval, in_log_neighborhood, spectral_bounds)
from .liealg import LieSpan, bracket, generates_sp, is_in_sp, lie_closure  # noqa: E402
from .lyapunov import (LyapunovEstimate, SeparabilityReport, energy_sweep,  # noqa: E402
                       lyapunov_spectrum, separability_check)
from .matexp import expm, logm_near_identity, structured_transfer  # noqa: E402
from .model import (ModelSpec, build_M, build_X, canonical_V0, load_spec,  # noqa: E402
                    sample_symmetric, transfer_matrix, vertex_configs)
from .scanner import (GenericityReport, ScanRecord, genericity_trial,  # noqa: E402
                      refine_critical, scan_energies)
