"""Cyclic formality morphism on R^d: cochain calculus, graph weights and star products."""

from .algebra import HbarSeries, Polynomial, parse_polynomial
from .formality import (CheckReport, Morphism, WeightSource, check_cyclic_invariance, check_linfty,
                        check_weight_relation, taylor_coefficient)
from .graphs import ExtGraph, enumerate_graphs, evaluate, evaluate_as_op, parse_graph
from .hochschild import PolyDiffOp, cyclic_shift, format_op, gerstenhaber, hochschild_diff, parse_op
from .star import (StarProduct, UnimodularPoisson, build_star, check_associativity, check_closed,
                   check_maurer_cartan, gauge_transform_poisson, gauge_transform_star, parse_poisson)
from .tpoly import PolyVector, divergence, parse_polyvector, schouten
from .weights import Weight, WeightCache, integrate

__version__ = "0.1.0"
