"""Elliptic-curve scalar multiplication with M-ary precomputation tables.

Quick tour::

    from maryec import registry_get, batch_mul, plan_parameters
    curve = registry_get("secp256k1")
    points = batch_mul([3, 5, 7], curve.G, curve)
"""

from .curve import (
    INFINITY,
    AffinePoint,
    CurveParams,
    count_ops,
    list_curves,
    naive_scalar_mul,
    registry_get,
)
from .errors import (
    ConfigError,
    ContractViolation,
    EncodingError,
    FaultDetected,
    FormatError,
    MaryError,
    NonInvertibleError,
    NotFoundError,
)
from .mary import (
    MaryPlan,
    batch_mul,
    build_sparse_table,
    build_table,
    export_table,
    import_table,
    mary_binary_mul,
    mary_mul,
    plan_parameters,
)
from .strategies import STRATEGY_NAMES, Strategy, multiply, multiply_batch

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "AffinePoint", "CurveParams", "count_ops", "list_curves",
    "naive_scalar_mul", "registry_get",
    "ConfigError", "ContractViolation", "EncodingError", "FaultDetected", "FormatError",
    "MaryError", "NonInvertibleError", "NotFoundError",
    "MaryPlan", "batch_mul", "build_sparse_table", "build_table", "export_table",
    "import_table", "mary_binary_mul", "mary_mul", "plan_parameters",
    "STRATEGY_NAMES", "Strategy", "multiply", "multiply_batch",
]
