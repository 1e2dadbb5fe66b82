"""Probability representation of quantum measurements.

Reference measurements (SIC-POVMs found by numerical search, or any rank-1
informationally complete POVM) turn states and measurements into ordinary
probability vectors; this package rewrites the Born rule in those terms,
measures how far it sits from the classical law of total probability, and
drives correlation, steering and sampling experiments from a seeded CLI.
"""

__version__ = "0.1.0"

from .born import (
    CondProbMatrix,
    ReferenceMeasurement,
    classical_law,
    classicality_gap,
    make_reference,
    povm_to_cond,
    prob_to_state,
    random_reference,
    sic_reference,
    state_to_prob,
    urgleichung_general,
    urgleichung_sic,
)
from .correlations import (
    CorrelationTable,
    MeasurementFamily,
    SteeringReport,
    chsh_value,
    correlation_table,
    embedded_correlation_table,
    no_signalling_check,
    spin32_embedding,
    steering_ensembles,
)
from .operators import (
    DensityOperator,
    Ket,
    Povm,
    ProbVector,
    born_probabilities,
    make_ket,
    make_povm,
    make_prob_vector,
    random_density,
    random_povm,
    random_pure_state,
    tensor,
    validate_density,
)
from .sampling import (
    DataTable,
    OutcomeCounts,
    binomial_interval_prob,
    data_table_sim,
    sample_outcomes,
)
from .sic import (
    FiducialCandidate,
    SicCertificate,
    displacement,
    frame_potential,
    known_fiducial,
    max_sic_deviation,
    sic_certify,
    sic_search,
    wh_orbit,
)

__all__ = [
    "__version__",
    "CondProbMatrix",
    "CorrelationTable",
    "DataTable",
    "DensityOperator",
    "FiducialCandidate",
    "Ket",
    "MeasurementFamily",
    "OutcomeCounts",
    "Povm",
    "ProbVector",
    "ReferenceMeasurement",
    "SicCertificate",
    "SteeringReport",
    "binomial_interval_prob",
    "born_probabilities",
    "chsh_value",
    "classical_law",
    "classicality_gap",
    "correlation_table",
    "data_table_sim",
    "displacement",
    "embedded_correlation_table",
    "frame_potential",
    "known_fiducial",
    "make_ket",
    "make_povm",
    "make_prob_vector",
    "make_reference",
    "max_sic_deviation",
    "no_signalling_check",
    "povm_to_cond",
    "prob_to_state",
    "random_density",
    "random_povm",
    "random_pure_state",
    "random_reference",
    "sample_outcomes",
    "sic_certify",
    "sic_reference",
    "sic_search",
    "spin32_embedding",
    "state_to_prob",
    "steering_ensembles",
    "tensor",
    "urgleichung_general",
    "urgleichung_sic",
    "validate_density",
    "wh_orbit",
]
