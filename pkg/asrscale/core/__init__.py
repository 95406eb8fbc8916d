from .errors import (
    ConfigurationError, DegenerateFitError, FitError, NonInvertibleFitError,
    ParseError, StoreConflictError, StoreCorruptError, StoreError,
    UnattainableTargetError, UndefinedMetricError
)
from .keywords import Keywords
from .architecture import (
    AdapterSpec, ArchitectureGraph, ModuleRole, ModuleSpec, ScalingVariable,
    default_adapter, default_architecture
)
from .stages import (
    Convergence, DatasetSpec, StageKind, StageSpec, TrainableModule,
    canonical_trainable, make_stage
)
from .curves import CheckpointCurve, CheckpointPoint
from .strategies import (
    StrategySpec, ValidationResult, Violation, builtin_strategies,
    for_architecture, get_strategy, trainable_for, validate_strategy
)
# imported last: the document pulls in the cost model
from .document import ConfigDocument, dump_document, load_document, parse_document
