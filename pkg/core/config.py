"""Configuration management."""

from dataclasses import dataclass, field, asdict, fields
from typing import Optional, Dict, Any, List, Union, get_args, get_origin
import hashlib
import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .exceptions import ConfigurationError, ValidationError
from .validation import check_knots
from .dtypes import (
    EPSILON,
    DEFAULT_ADAM_CONFIG,
    DEFAULT_TRAINING_CONFIG,
    DEFAULT_UNITS,
    DEFAULT_SINGLE_EPOCHS,
    DEFAULT_SINGLE_BATCH_SIZE,
    DEFAULT_SINGLE_LEARNING_RATE,
    DEFAULT_SINGLE_SAMPLES,
    DEFAULT_MLP_HIDDEN,
    DEFAULT_MLP_EPOCHS,
    DEFAULT_MLP_SAMPLES,
    DEFAULT_MLP_DATASET_SIZE,
    DEFAULT_GRID_POINTS,
    SUPPORTED_SCALINGS,
    SUPPORTED_SHAPES,
    SUPPORTED_SCENARIOS,
    UINT64_MAX,
)


@dataclass
class AdamConfig:
    """Adam hyperparameters."""
    learning_rate: float = DEFAULT_ADAM_CONFIG['learning_rate']
    beta1: float = DEFAULT_ADAM_CONFIG['beta1']
    beta2: float = DEFAULT_ADAM_CONFIG['beta2']
    epsilon: float = EPSILON

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        for name in ('beta1', 'beta2'):
            if not 0 < getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be in (0, 1)")
        if self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")


@dataclass
class TrainConfig:
    """Training configuration.

    Dropout is always active during training; ``dropout_active`` exists so
    that the setting is explicit in saved configs and cannot be turned off.
    """
    epochs: int = DEFAULT_TRAINING_CONFIG['epochs']
    batch_size: int = DEFAULT_TRAINING_CONFIG['batch_size']
    shuffle_seed: int = DEFAULT_TRAINING_CONFIG['shuffle_seed']
    dropout_active: bool = True
    log_every: int = 50

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be positive")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be positive")
        if not self.dropout_active:
            raise ConfigurationError("dropout must stay active during training")
        if self.log_every < 1:
            raise ConfigurationError("log_every must be positive")


@dataclass
class DatasetConfig:
    """Dataset selection: 'gaussian' or one of the function shapes.

    ``knots`` lists (x, y) pairs of a noise-free piecewise-linear shape on
    [0, 1]. They replace the definition of a built-in shape, or define a new
    one under any other ``kind``.
    """
    kind: str = 'gaussian'
    n: int = 3200
    mu: float = 10.0
    sigma: float = 1.0
    seed: int = 0
    knots: Optional[List[List[float]]] = None

    def __post_init__(self):
        if self.kind == 'gaussian':
            if self.knots is not None:
                raise ConfigurationError("knots apply to function shapes only")
        elif self.knots is not None:
            try:
                check_knots(self.knots)
            except ValidationError as e:
                raise ConfigurationError(f"Invalid dataset knots: {e.message}")
        elif self.kind not in SUPPORTED_SHAPES:
            raise ConfigurationError(f"Unsupported dataset kind: {self.kind} (give knots)")
        if self.n < 1:
            raise ConfigurationError("dataset n must be positive")
        if self.sigma < 0:
            raise ConfigurationError("dataset sigma must be non-negative")

    @property
    def label(self) -> str:
        if self.kind == 'gaussian':
            return f"N({self.mu:g},{self.sigma:g})"
        return self.kind


@dataclass
class NetworkConfig:
    """Network selection.

    ``units`` is K for the single-layer model; ``hidden`` and
    ``last_layer_bias`` describe the non-linear network.
    """
    units: int = DEFAULT_UNITS
    hidden: List[int] = field(default_factory=lambda: list(DEFAULT_MLP_HIDDEN))
    last_layer_bias: bool = False
    scaling: str = 'none'

    def __post_init__(self):
        if self.units < 1:
            raise ConfigurationError("units must be positive")
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise ConfigurationError("hidden widths must be positive")
        if self.scaling not in SUPPORTED_SCALINGS:
            raise ConfigurationError(f"Unsupported dropout scaling: {self.scaling}")


@dataclass
class SeedConfig:
    """Seeds for every random stream of a run."""
    init: int = 1
    mask: int = 2
    mc: int = 3

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not 0 <= value <= UINT64_MAX:
                raise ConfigurationError(f"seed {f.name} must be a 64-bit unsigned integer")


@dataclass
class GridConfig:
    """Variants swept by the grid scenario."""
    shapes: List[str] = field(default_factory=lambda: list(SUPPORTED_SHAPES))
    p_ds: List[float] = field(default_factory=lambda: [0.2, 0.5])
    biases: List[bool] = field(default_factory=lambda: [True, False])

    def __post_init__(self):
        unknown = [s for s in self.shapes if s not in SUPPORTED_SHAPES]
        if unknown:
            raise ConfigurationError(f"Unsupported shapes in grid: {unknown}")
        if not self.shapes or not self.p_ds or not self.biases:
            raise ConfigurationError("grid axes must be non-empty")


@dataclass
class ExperimentConfig:
    """Full description of one experiment run."""
    scenario: str
    p_d: float
    dataset: DatasetConfig
    network: NetworkConfig = field(default_factory=NetworkConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    adam: AdamConfig = field(default_factory=AdamConfig)
    seeds: SeedConfig = field(default_factory=SeedConfig)
    samples: int = DEFAULT_SINGLE_SAMPLES
    grid_points: int = DEFAULT_GRID_POINTS
    out_dir: str = 'runs'
    workers: int = 1
    name: Optional[str] = None
    grid: Optional[GridConfig] = None

    def __post_init__(self):
        if self.scenario not in SUPPORTED_SCENARIOS:
            raise ConfigurationError(f"Unsupported scenario: {self.scenario}")
        if not 0 <= self.p_d < 1:
            raise ConfigurationError("p_d must be in [0, 1)")
        if self.samples < 2:
            raise ConfigurationError("samples must be at least 2")
        if self.grid_points < 1:
            raise ConfigurationError("grid_points must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be positive")
        if self.scenario == 'single' and self.dataset.kind != 'gaussian':
            raise ConfigurationError("scenario 'single' needs a gaussian dataset")
        if self.scenario == 'mlp' and self.dataset.kind == 'gaussian':
            raise ConfigurationError("scenario 'mlp' needs a function-shape dataset")
        if self.scenario == 'grid' and self.dataset.knots is not None:
            raise ConfigurationError("grid variants use the built-in shapes; drop dataset knots")
        if self.scenario == 'grid' and self.grid is None:
            self.grid = GridConfig()
        if self.name is None:
            self.name = self.default_name()

    def default_name(self) -> str:
        if self.scenario == 'grid':
            return 'grid'
        if self.scenario == 'single':
            return f"single_{self.p_d:g}_{self.dataset.sigma:g}"
        bias = 'bias' if self.network.last_layer_bias else 'nobias'
        return f"{self.dataset.kind}_{self.p_d:g}_{bias}"

    @property
    def run_dir(self) -> Path:
        return Path(self.out_dir) / self.name

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'ExperimentConfig':
        """Build a config, filling scenario-dependent defaults.

        Raises:
            ConfigurationError: On unknown keys or invalid values
        """
        config = dict(config)
        scenario = config.pop('scenario', None)
        if scenario is None:
            raise ConfigurationError("config must set 'scenario'")
        single = scenario == 'single'

        if single:
            dataset_defaults: Dict[str, Any] = {}
            train_defaults = {'epochs': DEFAULT_SINGLE_EPOCHS,
                              'batch_size': DEFAULT_SINGLE_BATCH_SIZE}
            adam_defaults = {'learning_rate': DEFAULT_SINGLE_LEARNING_RATE}
        else:
            dataset_defaults = {'kind': 'diamond', 'n': DEFAULT_MLP_DATASET_SIZE}
            train_defaults = {'epochs': DEFAULT_MLP_EPOCHS}
            adam_defaults = {}
        sections = {
            'dataset': (DatasetConfig, dataset_defaults),
            'network': (NetworkConfig, {}),
            'train': (TrainConfig, train_defaults),
            'adam': (AdamConfig, adam_defaults),
            'seeds': (SeedConfig, {}),
            'grid': (GridConfig, {}),
        }
        kwargs: Dict[str, Any] = {'scenario': scenario}
        for key, (section_cls, defaults) in sections.items():
            values = config.pop(key, None)
            if values is None and key == 'grid':
                continue
            if values is not None and not isinstance(values, dict):
                raise ConfigurationError(f"[{key}] must be a table")
            merged = dict(defaults)
            merged.update(values or {})
            kwargs[key] = _build(section_cls, merged, key)

        kwargs['samples'] = config.pop(
            'samples', DEFAULT_SINGLE_SAMPLES if single else DEFAULT_MLP_SAMPLES)
        kwargs['p_d'] = config.pop('p_d', 0.0)
        for key in ('grid_points', 'out_dir', 'workers', 'name'):
            if key in config:
                kwargs[key] = config.pop(key)
        if config:
            raise ConfigurationError(f"Unknown config keys: {sorted(config)}")
        _check_types(cls, kwargs, 'config')
        return cls(**kwargs)


def _matches(value: Any, expected: Any) -> bool:
    origin = get_origin(expected)
    if origin is Union:
        return any(_matches(value, arg) for arg in get_args(expected))
    if origin is list:
        item, = get_args(expected)
        return isinstance(value, list) and all(_matches(v, item) for v in value)
    if expected is type(None):
        return value is None
    if expected is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(expected, type):
        return isinstance(value, expected)
    return True


def _check_types(section_cls, values: Dict[str, Any], section: str) -> None:
    """Reject values whose type does not match the dataclass field."""
    for f in fields(section_cls):
        if f.name in values and not _matches(values[f.name], f.type):
            raise ConfigurationError(
                f"Invalid type for '{f.name}' in [{section}]: {values[f.name]!r}")


def _build(section_cls, values: Dict[str, Any], section: str):
    known = {f.name for f in fields(section_cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"Unknown keys in [{section}]: {sorted(unknown)}")
    _check_types(section_cls, values, section)
    try:
        return section_cls(**values)
    except TypeError as e:
        raise ConfigurationError(f"Invalid [{section}] section: {e}")


class ConfigManager:
    """Configuration management utilities."""

    @staticmethod
    def load_config(filepath: Union[str, Path]) -> Dict[str, Any]:
        """Read a TOML config document."""
        filepath = Path(filepath)
        if not filepath.exists():
            raise ConfigurationError(f"Config file not found: {filepath}")

        try:
            with open(filepath, 'rb') as f:
                return tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigurationError(f"Error loading config: {e}")

    @staticmethod
    def load_experiment(filepath: Union[str, Path]) -> ExperimentConfig:
        return ExperimentConfig.from_dict(ConfigManager.load_config(filepath))

    @staticmethod
    def save_config(config: Dict[str, Any], filepath: Union[str, Path]) -> None:
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)

        try:
            with open(filepath, 'w') as f:
                json.dump(config, f, indent=4, sort_keys=True)
        except (OSError, TypeError) as e:
            raise ConfigurationError(f"Error saving config: {e}")

    @staticmethod
    def config_hash(config: Union[ExperimentConfig, Dict[str, Any]]) -> str:
        """SHA-256 of the canonical JSON form of a config."""
        if isinstance(config, ExperimentConfig):
            config = config.to_dict()
        canonical = json.dumps(config, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
