"""Models Package

- neural: dense dropout networks (definition, state, forward/backward)
- theory: closed-form single-layer dropout moments and exact enumeration
- uncertainty: Monte-Carlo dropout estimation
"""

from .neural import (
    NetworkDef,
    NetworkState,
    DropoutSpec,
    MaskSource,
    init_network,
    forward,
    backward,
)

from .theory import (
    SingleLayerSpec,
    predict_moments,
    enumerate_moments,
    theory_sweep,
)

from .uncertainty import (
    MCRecord,
    MCResult,
    mc_sample,
    mc_curve,
)

__all__ = [
    # Neural networks
    'NetworkDef',
    'NetworkState',
    'DropoutSpec',
    'MaskSource',
    'init_network',
    'forward',
    'backward',

    # Theory
    'SingleLayerSpec',
    'predict_moments',
    'enumerate_moments',
    'theory_sweep',

    # MC dropout
    'MCRecord',
    'MCResult',
    'mc_sample',
    'mc_curve',
]
