"""Salem polynomial census, Diophantine counting and length-spectrum bounds."""

from salem.spectra.census import (
    ConstantsBundle,
    census_report,
    coefficient_bounds,
    enumerate_salem,
    kappa,
    kappa0,
    omega,
    theorem_A_bound,
)
from salem.spectra.config import CensusQuery, RunConfig
from salem.spectra.diophantine import (
    ConvexRegion,
    DiophantineTriple,
    PrimitiveParams,
    asymptotic_main_term,
    brute_force_primitive_count,
    generate_primitive_solutions,
    lattice_count,
)
from salem.spectra.errors import SpectraError
from salem.spectra.polynomials import (
    PalindromicPolynomial,
    SalemClassification,
    TracePolynomial,
    classify,
    trace_polynomial,
)
from salem.spectra.quadform import QuadraticForm, RationalIsometry, integralize
from salem.spectra.reports import CountReport, Report, compute_hash
from salem.spectra.spectrum import LengthEntry, SpectrumBounds, realized_length_census

__all__ = [
    "PalindromicPolynomial",
    "TracePolynomial",
    "SalemClassification",
    "classify",
    "trace_polynomial",
    "DiophantineTriple",
    "PrimitiveParams",
    "ConvexRegion",
    "brute_force_primitive_count",
    "generate_primitive_solutions",
    "asymptotic_main_term",
    "lattice_count",
    "CensusQuery",
    "RunConfig",
    "ConstantsBundle",
    "coefficient_bounds",
    "enumerate_salem",
    "omega",
    "kappa0",
    "kappa",
    "theorem_A_bound",
    "census_report",
    "QuadraticForm",
    "RationalIsometry",
    "integralize",
    "LengthEntry",
    "SpectrumBounds",
    "realized_length_census",
    "Report",
    "CountReport",
    "compute_hash",
    "SpectraError",
]
