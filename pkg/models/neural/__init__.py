"""Dense dropout network engine."""

from .dropout import DropoutSpec, MaskSource, bernoulli_mask, draw_mask, apply_mask
from .layers import Dense, Dropout
from .activations import ReLU
from .network import (
    NetworkDef,
    NetworkState,
    Gradient,
    init_network,
    forward,
    backward,
    forward_pass,
    backward_pass,
    network_to_dict,
    network_from_dict,
    save_network,
    load_network,
)

__all__ = [
    'DropoutSpec',
    'MaskSource',
    'bernoulli_mask',
    'draw_mask',
    'apply_mask',
    'Dense',
    'Dropout',
    'ReLU',
    'NetworkDef',
    'NetworkState',
    'Gradient',
    'init_network',
    'forward',
    'backward',
    'forward_pass',
    'backward_pass',
    'network_to_dict',
    'network_from_dict',
    'save_network',
    'load_network',
]
