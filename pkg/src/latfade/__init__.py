"""Lattice codes for linear fading channels: lattices in C^k, reduced Hermite
invariants, number-field constructions, carved codebooks and ML simulation."""
from .errors import LatfadeError, SearchError, SimulationError, ValidationError
from .lattice import (
    Lattice, LatticePoint, ball_points, enumerate_ball, hermite_invariant, load_lattice, make_lattice,
    normalize_volume, save_lattice, scale, shortest_vector_sq, volume,
)
from .forms import (
    HomogeneousForm, MatrixGroupSpec, evaluate, group_from_label, homogeneous_minimum,
    reduced_hermite_invariant, reduced_norm_sq_closed_form, reduced_norm_sq_numeric,
)
from .numfield import (
    NumberFieldSpec, IdealSpec, cyclotomic_field, embed_ideal, embed_ring, field_report, golden_code_lattice,
    martinet_report, min_of_ideal,
)
from .codebook import FiniteCode, carve, find_shift, guaranteed_size, load_code, rate, save_code
from .channels import ChannelModel, apply, estimate_mu, group_of, model_from_label, sample
from .sim import ExperimentConfig, capacity_bits, gap_report, ml_decode, run_experiment, rate_threshold

__version__ = "0.1.0"
