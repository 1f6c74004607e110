"""
Network layers and model specs for ratnet.
"""

from .base import Layer
from .ratio import RatioLayer
from .dense import DenseLayer, ACTIVATIONS
from .rbf import RBFLayer
from .stack import Stack
from .spec import ModelSpec, RatioLayerSpec, DenseLayerSpec, RBFLayerSpec, parse_model_spec, param_count, init_params, STRUCTURE_SUITES, get_suite

__all__ = ["Layer", "RatioLayer", "DenseLayer", "ACTIVATIONS", "RBFLayer", "Stack", "ModelSpec", "RatioLayerSpec", "DenseLayerSpec", "RBFLayerSpec", "parse_model_spec", "param_count", "init_params", "STRUCTURE_SUITES", "get_suite"]
