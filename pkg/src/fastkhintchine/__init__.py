"""Continued fractions whose Birkhoff sums of ``log a_n`` grow super-linearly.

Huge quantities are carried in the log domain (``LogValue``) with exact
symbolic forms where possible and certified interval enclosures otherwise.
"""

from .cf_core import (CFPoint, Cylinder, PartialQuotient, birkhoff_log_sum, birkhoff_series,
                      cf_expand, cf_value, continuants, euclid_subtractive, gauss_step,
                      khintchine_estimate, khintchine_monte_carlo, make_cylinder)
from .constructions import (LOWER_LIMINF, UPPER_LIMSUP, AlphaPlan, ConstructionTrace, SeqB, SeqT,
                            TargetSequence, WitnessPoint, build_alpha_plan, build_seq_B,
                            build_seq_T, build_witness, sample_E_set)
from .dimension import (CoveringParams, SetPredicateParams, brute_covering_term, chain_term,
                        covering_bound, dim_formulas, inclusion_check_pac, ratio_dim_estimate,
                        membership_doubly_exp, membership_fast_ratio, zeta_enclosure)
from .errors import (AssertionFailure, BudgetError, DomainError, GateError, HorizonError,
                     IndistinguishableError, KhintchineError, PreconditionError)
from .growth import (MAX_PREFIX, MIN_TAIL, GrowthFunction, custom, divergence_check, envelope,
                     equiv_check, eval_psi, exponential, exponents, factorial_blocks, parse_growth,
                     power, read_table_csv, table, table_of_values)
from .interval import Interval
from .logvalue import ExactLog, LogValue
from .reports import REPORT_SCHEMA, Report, dumps, series_csv, validate
from .suites import paper_example_suite, verify_all

__version__ = "0.1.0"

__all__ = [
    "CFPoint",
    "Cylinder",
    "PartialQuotient",
    "birkhoff_log_sum",
    "birkhoff_series",
    "cf_expand",
    "cf_value",
    "continuants",
    "euclid_subtractive",
    "gauss_step",
    "khintchine_estimate",
    "khintchine_monte_carlo",
    "make_cylinder",
    "LOWER_LIMINF",
    "UPPER_LIMSUP",
    "AlphaPlan",
    "ConstructionTrace",
    "SeqB",
    "SeqT",
    "TargetSequence",
    "WitnessPoint",
    "build_alpha_plan",
    "build_seq_B",
    "build_seq_T",
    "build_witness",
    "sample_E_set",
    "CoveringParams",
    "SetPredicateParams",
    "brute_covering_term",
    "chain_term",
    "covering_bound",
    "dim_formulas",
    "inclusion_check_pac",
    "ratio_dim_estimate",
    "membership_doubly_exp",
    "membership_fast_ratio",
    "zeta_enclosure",
    "AssertionFailure",
    "BudgetError",
    "DomainError",
    "GateError",
    "HorizonError",
    "IndistinguishableError",
    "KhintchineError",
    "PreconditionError",
    "MAX_PREFIX",
    "MIN_TAIL",
    "GrowthFunction",
    "custom",
    "divergence_check",
    "envelope",
    "equiv_check",
    "eval_psi",
    "exponential",
    "exponents",
    "factorial_blocks",
    "parse_growth",
    "power",
    "read_table_csv",
    "table",
    "table_of_values",
    "Interval",
    "ExactLog",
    "LogValue",
    "REPORT_SCHEMA",
    "Report",
    "dumps",
    "series_csv",
    "validate",
    "paper_example_suite",
    "verify_all",
]
