"""Weighted L2 Fourier-mode model of the punctured disk with Poincare metric."""
from .estimates import (FrameModel, GrowthFit, WirtingerEstimate, frame_growth_fit, growth_fit, il_constant,
                        log_grid, unit_disk_il_constant, wirtinger_constant)
from .forms import ModeForm, WeightedNorm, closedness_defect, d_twisted, dlog_wedge, weighted_norm
from .probe import Frame, ProbeReport, d_full, local_vanishing_probe, reduce_closed
from .radial import LogMonomialSum, Quadrature
from .series import PrimitiveSeries, ResidueReduction, nabla_primitive_series, residue_reduction, verify_primitive
from .solvers import AREA_KM1, RADIAL_K1, RESIDUE, DbarSolution, ModeSolution, dbar_mode_solve, solve_mode, solve_mode2
