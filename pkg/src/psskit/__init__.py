"""Symbolic toolkit for third-order equations attached to surfaces of
constant curvature: structure-equation verification, existence-condition
checking, family generation and matching, and matrix connection forms."""

__version__ = "0.1.0"

from .exprcore import (DomainError, Expr, ExprError, FuncFactor, JetVar,
                       MissingAssignment, NotInvertible, Param, Term, as_expr,
                       cos_of, exact_div, exp_of, param, registry, sin_of,
                       sqrt_of)
from .jetcalc import (CH, EVOLUTION, XT, EquationSpec, OrderCapExceeded,
                      UnreducibleJet, VarRule, ch_eq, evolution_eq, reduce_tjets,
                      total_dt, total_dx, xt_eq)
from .forms import (MetricForm, NonDivisible, NotACoframe, OneForm, Triad,
                    TwoForm, exterior_d, gaussian_curvature, metric_of,
                    nondegenerate, structure_residuals, triad_from_coeffs,
                    verifies, wedge)
from .zcr import (AknsData, MatrixForm, NotUnimodular, akns_extract,
                  gauge_transform, imaginary_unit, omega_sl2, omega_so,
                  standard_su2_gauge, su2_pattern, zc_residual)
from .classify import (AssumptionViolated, ClassifierQuantities, ConstraintViolated,
                       FamilySpec, GeneratedFamily, Lemma31Report, MissingSlot,
                       MuEta, NotAffinelyRelated, PhiNotRecoverable,
                       UnrepresentableEquation, UnsupportedAnsatz, extract_mu_eta,
                       generate, generate_T32, generate_T33, generate_T34,
                       generate_T35i, generate_T35ii, lemma31_check, quantities,
                       split_cubic)
from .matching import FamilyMatch, MatchReport, match_family
from .catalog import CatalogEntry, Expected, entry, load_catalog
from .parser import NameContext, SyntaxIssue, UnknownIdentifier, parse_expr, render_expr
from .manifest import (Manifest, ManifestError, load_manifest,
                       triad_manifest_text, equation_manifest_text)
