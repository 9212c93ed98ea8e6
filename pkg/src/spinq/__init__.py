"""Partition functions of classical spin models, four ways.

Brute-force enumeration, the overlap of a stabilizer-like state with a product
state of Boltzmann weights, dense contraction of a gate circuit, and a simulated
Hadamard-test estimator. Also the merge/deletion rewrite rules and a fork codec
for 2D foliated triangulations.
"""
from .errors import SpinqError
from .kernels import backend_name
from .model import (
    Interaction,
    SpinModel,
    config_weight,
    evaluate_energy,
    partition_function_exact,
)

__version__ = "0.1.0"

__all__ = [
    "Interaction",
    "SpinModel",
    "SpinqError",
    "backend_name",
    "config_weight",
    "evaluate_energy",
    "partition_function_exact",
]
