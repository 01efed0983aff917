"""Topological entropy, returns and dispersions for finite and grid relations."""

from .chaos import (EquivalenceReport, InconsistencyError, OrbitPairVerdict, dc2_verdict,
                    equivalence_report, exhaustive_sweep, li_yorke_verdict, orbit_metric,
                    projection_pair_witnesses, uncountability_test)
from .dispersion import (BinaryStream, Dispersion, DispersionError, assemble_prefix,
                         build_dispersion, countable_return_subset, verify_dispersion)
from .entropy import (EntropyReport, GridRelation, entropy_exact, entropy_growth_bounds,
                      grid_entropy_estimate, grid_from_piecewise_linear, walk_counts)
from .fixtures import FIXTURES, fixture
from .relation import (BudgetExceeded, FiniteRelation, PointSet, SchemaError, SymbolicOrbit, Walk,
                       check_domain_condition, inverse, load_relation, mahavier_walks, project,
                       project_range, relation, shift, star_concat, walk_count)
from .returns import (ReturnCertificate, ReturnResult, check_box_condition, detect_cycle_pair,
                      detect_well_aligned, find_any_return, find_return, return_entropy_bound,
                      two_line_return)

__version__ = "0.1.0"
