"""Integral K-operator frames on finite-dimensional Hilbert C*-modules."""

from .algebra import AlgebraElement, AlgebraShape, positivity
from .frames import (FrameBounds, FrameClass, analysis, classify, douglas_factor, frame_integral,
                     frame_operator, frame_report, optimal_bounds, synthesis)
from .measure import (L2Vector, MeasureDiscretization, OperatorFamily, ScalarFamily, discrete,
                      discretize, family_from_generator, gauss_legendre, l2_inner, midpoint)
from .module import ModuleOperator, ModuleVector, inner, order, range_inclusion

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "AlgebraShape", "positivity",
    "FrameBounds", "FrameClass", "analysis", "classify", "douglas_factor", "frame_integral", "frame_operator",
    "frame_report", "optimal_bounds", "synthesis",
    "L2Vector", "MeasureDiscretization", "OperatorFamily", "ScalarFamily", "discrete", "discretize",
    "family_from_generator", "gauss_legendre", "l2_inner", "midpoint",
    "ModuleOperator", "ModuleVector", "inner", "order", "range_inclusion",
]
