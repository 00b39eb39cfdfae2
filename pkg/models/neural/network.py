"""
Dense Dropout Network Engine
============================

Feed-forward networks built from Dense, ReLU and Dropout layers, with
exact reverse-mode gradients.

A network is split in two parts:

- ``NetworkDef``: the immutable architecture (list of layer definitions)
- ``NetworkState``: the trainable parameters, one dict per layer

``forward`` and ``backward`` are pure functions of (state, def, x, masks),
so they can be evaluated concurrently on a shared state. Dropout masks are
never drawn inside a pass; they are passed in as a ``MaskSet`` (one binary
array per Dropout layer) so a forward pass and its backward pass always see
the same masks.

JSON schema (``network_to_dict``)::

    {
      "format": "mcd_lab.network/1",
      "input_dim": int, "output_dim": int,
      "layers": [
        {"kind": "dropout", "p_d": float, "scaling": "none" | "inverted"},
        {"kind": "dense", "in_dim": int, "out_dim": int, "has_bias": bool},
        {"kind": "relu"}
      ],
      "state": {
        "rng_seed": int,
        "params": [ {"W": [[row-major floats]], "b": [floats]} | {} , ...]
      }
    }
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core import get_logger
from core.base import Layer, Params
from core.dtypes import FLOAT_DTYPE
from core.exceptions import DimensionalityError, NumericOverflowError, ValidationError
from core.validation import check_array, check_finite
from .activations import ReLU
from .dropout import DropoutSpec, MaskSource, bernoulli_mask
from .layers import Dense, Dropout
from utils.io import load_json, save_json

logger = get_logger(__name__)

NETWORK_FORMAT = 'mcd_lab.network/1'

MaskSet = Sequence[np.ndarray]


@dataclass
class NetworkDef:
    """Architecture description: ordered layers plus input/output widths."""
    layers: List[Layer]
    input_dim: int
    output_dim: int

    def validate(self) -> 'NetworkDef':
        """Check layer dimension compatibility.

        Raises:
            ValidationError: If the network is empty or misconfigured
            DimensionalityError: If adjacent layers disagree; ``details['layer']``
                is the index of the offending layer
        """
        if not self.layers:
            raise ValidationError("Network needs at least one layer")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValidationError("input_dim and output_dim must be positive")
        width = self.input_dim
        for i, layer in enumerate(self.layers):
            if not isinstance(layer, Layer):
                raise ValidationError(f"Layer {i} is not a layer definition", layer=i)
            try:
                width = layer.output_dim(width)
            except DimensionalityError as e:
                raise DimensionalityError(f"Layer {i} ({layer.kind}): {e.message}", layer=i)
        if width != self.output_dim:
            raise DimensionalityError(
                f"Last layer produces {width} outputs, expected {self.output_dim}",
                layer=len(self.layers) - 1)
        return self

    @property
    def dropout_indices(self) -> List[int]:
        return [i for i, layer in enumerate(self.layers) if isinstance(layer, Dropout)]

    @property
    def dropout_widths(self) -> List[int]:
        """Input width seen by each Dropout layer, in layer order."""
        widths, width = [], self.input_dim
        for layer in self.layers:
            if isinstance(layer, Dropout):
                widths.append(width)
            width = layer.output_dim(width)
        return widths

    def draw_masks(self, source: MaskSource, batch: Optional[int] = None,
                   draw_index: int = 0) -> List[np.ndarray]:
        """One mask per Dropout layer, all drawn from a single generator.

        With ``batch`` given every mask has ``batch`` rows, one per sample.
        """
        rng = source.generator(draw_index)
        return self.draw_masks_from(rng, batch)

    def draw_masks_from(self, rng: np.random.Generator,
                        batch: Optional[int] = None) -> List[np.ndarray]:
        masks = []
        for i, width in zip(self.dropout_indices, self.dropout_widths):
            shape = (width,) if batch is None else (batch, width)
            masks.append(bernoulli_mask(self.layers[i].spec, shape, rng))
        return masks

    def ones_masks(self, batch: Optional[int] = None) -> List[np.ndarray]:
        return [np.ones((w,) if batch is None else (batch, w), dtype=FLOAT_DTYPE)
                for w in self.dropout_widths]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'input_dim': self.input_dim,
            'output_dim': self.output_dim,
            'layers': [layer.to_dict() for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NetworkDef':
        layers = [layer_from_dict(d, i) for i, d in enumerate(data['layers'])]
        return cls(layers, int(data['input_dim']), int(data['output_dim'])).validate()

    @classmethod
    def single_layer(cls, units: int, p_d: float, scaling: str = 'none') -> 'NetworkDef':
        """Dropout over ``units`` inputs followed by a bias-free Dense(units, 1).

        Fed with constant input 1 this computes f = sum_k d_k w_k.
        """
        layers = [Dropout(DropoutSpec(p_d, scaling)), Dense(units, 1, has_bias=False)]
        return cls(layers, units, 1).validate()

    @classmethod
    def mlp(cls, hidden: Sequence[int], p_d: float, last_layer_bias: bool = True,
            scaling: str = 'none', input_dim: int = 1, output_dim: int = 1) -> 'NetworkDef':
        """Dense -> ReLU -> Dropout blocks, then a final Dense layer.

        Dropout always sits directly before the last linear layer.
        """
        layers: List[Layer] = []
        width = input_dim
        for h in hidden:
            layers += [Dense(width, h, has_bias=True), ReLU(), Dropout(DropoutSpec(p_d, scaling))]
            width = h
        layers.append(Dense(width, output_dim, has_bias=last_layer_bias))
        return cls(layers, input_dim, output_dim).validate()


def layer_from_dict(data: Dict[str, Any], index: int = 0) -> Layer:
    kind = data.get('kind')
    if kind == 'dense':
        return Dense(int(data['in_dim']), int(data['out_dim']), bool(data.get('has_bias', True)))
    if kind == 'relu':
        return ReLU()
    if kind == 'dropout':
        return Dropout(DropoutSpec(float(data['p_d']), data.get('scaling', 'none')))
    raise ValidationError(f"Unknown layer kind: {kind!r}", layer=index)


@dataclass
class NetworkState:
    """Trainable parameters: one dict per layer, empty for parameter-free layers."""
    params: List[Params]
    rng_seed: int = 0

    def copy(self) -> 'NetworkState':
        return NetworkState([{k: v.copy() for k, v in p.items()} for p in self.params],
                            self.rng_seed)

    def check_shapes(self, net_def: NetworkDef) -> None:
        """Raise if the parameter tree does not match the architecture."""
        if len(self.params) != len(net_def.layers):
            raise DimensionalityError(
                f"State has {len(self.params)} layers, network has {len(net_def.layers)}")
        for i, (layer, params) in enumerate(zip(net_def.layers, self.params)):
            expected = _param_shapes(layer)
            actual = {k: v.shape for k, v in params.items()}
            if expected != actual:
                raise DimensionalityError(
                    f"Layer {i} parameters {actual} do not match {expected}", layer=i)

    def check_finite(self) -> None:
        for i, params in enumerate(self.params):
            for name, value in params.items():
                check_finite(value, what=f"{name} in layer {i}", layer=i)

    def dense_weights(self, net_def: NetworkDef, which: int = -1) -> np.ndarray:
        """Weight matrix of a Dense layer, counting Dense layers only."""
        dense = [i for i, layer in enumerate(net_def.layers) if isinstance(layer, Dense)]
        return self.params[dense[which]]['W']

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rng_seed': int(self.rng_seed),
            'params': [{k: v.tolist() for k, v in p.items()} for p in self.params],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NetworkState':
        params = [{k: np.asarray(v, dtype=FLOAT_DTYPE) for k, v in p.items()}
                  for p in data['params']]
        return cls(params, int(data.get('rng_seed', 0)))


@dataclass
class Gradient:
    """Parameter gradients, shaped like the NetworkState they belong to."""
    params: List[Params] = field(default_factory=list)

    def flat(self) -> np.ndarray:
        parts = [v.reshape(-1) for p in self.params for _, v in sorted(p.items())]
        return np.concatenate(parts) if parts else np.zeros(0)


def _param_shapes(layer: Layer) -> Dict[str, Tuple[int, ...]]:
    if isinstance(layer, Dense):
        shapes = {'W': (layer.in_dim, layer.out_dim)}
        if layer.has_bias:
            shapes['b'] = (layer.out_dim,)
        return shapes
    return {}


def init_network(net_def: NetworkDef, seed: int) -> NetworkState:
    """Initialize parameters deterministically from ``seed``.

    Raises:
        ValidationError: If the network definition is invalid
    """
    net_def.validate()
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    params = [layer.init_params(rng) for layer in net_def.layers]
    logger.debug(f"Initialized network with {len(params)} layers (seed={seed})")
    return NetworkState(params, int(seed))


def _prepare(net_def: NetworkDef, x: np.ndarray,
             masks: Union[MaskSet, MaskSource, None]) -> Tuple[np.ndarray, bool, List]:
    x = check_array(x, name='x')
    squeeze = x.ndim == 1
    x = check_array(x, ensure_2d=True, name='x')
    if x.shape[1] != net_def.input_dim:
        raise DimensionalityError(
            f"Expected input of width {net_def.input_dim}, got {x.shape[1]}")

    n_dropout = len(net_def.dropout_indices)
    if masks is None:
        masks = [None] * n_dropout
    elif isinstance(masks, MaskSource):
        masks = net_def.draw_masks(masks, batch=None if squeeze else x.shape[0])
    masks = list(masks)
    if len(masks) != n_dropout:
        raise ValidationError(f"Expected {n_dropout} dropout masks, got {len(masks)}")
    return x, squeeze, masks


def forward_pass(state: NetworkState, net_def: NetworkDef, x: np.ndarray,
                 masks: Union[MaskSet, MaskSource, None] = None
                 ) -> Tuple[np.ndarray, List[Any], bool]:
    """Forward pass keeping the per-layer caches for ``backward_pass``.

    Returns:
        Tuple of (2D outputs, caches, whether the input was a single vector)
    """
    x, squeeze, masks = _prepare(net_def, x, masks)
    mask_iter = iter(masks)
    caches = []
    a = x
    with np.errstate(over='ignore', invalid='ignore'):
        for i, (layer, params) in enumerate(zip(net_def.layers, state.params)):
            mask = next(mask_iter) if isinstance(layer, Dropout) else None
            if mask is not None and mask.shape[-1] != a.shape[1]:
                raise DimensionalityError(
                    f"Mask width {mask.shape[-1]} does not match layer input {a.shape[1]}",
                    layer=i)
            a, cache = layer.forward(params, a, mask)
            if not np.all(np.isfinite(a)):
                raise NumericOverflowError(f"Non-finite activation after layer {i}", layer=i)
            caches.append(cache)
    return a, caches, squeeze


def backward_pass(state: NetworkState, net_def: NetworkDef, caches: List[Any],
                  upstream: np.ndarray) -> Gradient:
    """Propagate ``upstream`` (batch, output_dim) back through the layers."""
    grads: List[Params] = [{} for _ in net_def.layers]
    g = upstream
    for i in range(len(net_def.layers) - 1, -1, -1):
        g, grads[i] = net_def.layers[i].backward(state.params[i], caches[i], g)
    return Gradient(grads)


def forward(state: NetworkState, net_def: NetworkDef, x: np.ndarray,
            masks: Union[MaskSet, MaskSource, None] = None) -> np.ndarray:
    """Evaluate the masked network.

    Args:
        state: Network parameters
        net_def: Architecture
        x: Input of shape (input_dim,) or (batch, input_dim)
        masks: One binary mask per Dropout layer (shape (width,) or
            (batch, width)), a MaskSource to draw them from, or None for
            all-ones masks

    Returns:
        Output of shape (output_dim,) or (batch, output_dim)

    Raises:
        NumericOverflowError: If an intermediate value is not finite
    """
    out, _, squeeze = forward_pass(state, net_def, x, masks)
    return out[0] if squeeze else out


def backward(state: NetworkState, net_def: NetworkDef, x: np.ndarray,
             masks: Union[MaskSet, MaskSource, None], upstream: np.ndarray) -> Gradient:
    """Gradient of sum(upstream * forward(x, masks)) w.r.t. all parameters.

    Batched inputs are summed over the batch.

    Raises:
        DimensionalityError: If upstream does not match the output shape
    """
    out, caches, squeeze = forward_pass(state, net_def, x, masks)
    upstream = check_array(upstream, name='upstream')
    if squeeze:
        upstream = upstream.reshape(1, -1)
    if upstream.shape != out.shape:
        raise DimensionalityError(
            f"upstream shape {upstream.shape} does not match output shape {out.shape}")
    return backward_pass(state, net_def, caches, upstream)


def network_to_dict(net_def: NetworkDef, state: NetworkState) -> Dict[str, Any]:
    data = {'format': NETWORK_FORMAT}
    data.update(net_def.to_dict())
    data['state'] = state.to_dict()
    return data


def network_from_dict(data: Dict[str, Any]) -> Tuple[NetworkDef, NetworkState]:
    """Rebuild a network from its JSON form.

    Raises:
        ValidationError: On an unknown format or a malformed document
    """
    if not isinstance(data, dict) or data.get('format') != NETWORK_FORMAT:
        found = data.get('format') if isinstance(data, dict) else type(data).__name__
        raise ValidationError(f"Unsupported network format: {found!r}")
    try:
        net_def = NetworkDef.from_dict(data)
        state = NetworkState.from_dict(data['state'])
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ValidationError(f"Malformed network document: {e!r}")
    state.check_shapes(net_def)
    state.check_finite()
    return net_def, state


def save_network(net_def: NetworkDef, state: NetworkState, path: Union[str, Path]) -> Path:
    path = save_json(network_to_dict(net_def, state), path)
    logger.info(f"Network saved to {path}")
    return path


def load_network(path: Union[str, Path]) -> Tuple[NetworkDef, NetworkState]:
    return network_from_dict(load_json(path))
