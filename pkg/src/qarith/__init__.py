"""Fourier-basis quantum arithmetic and truncated power-series evaluation."""

from .arith import (MultiplierLayout, build_decrement, build_increment, build_multiplier,
                    build_zero_check, multiplier_registers)
from .gates import (Circuit, CircuitError, GateOp, build_adder, build_inv_qft, build_qft,
                    schedule_parallel)
from .layout import Register, RegisterLayout
from .product import ProductState, WouldEntangle, embed_dense
from .series import (FixedPointNumber, SeriesSpec, WeightPhase, align_fixed_point,
                     build_series, evaluate_series)
from .statevec import DenseState, NotDeterministic, apply_gate, init_basis, read_register

__version__ = "0.1.0"
