"""Exception types. Each carries a machine-readable ``code`` used by the CLI."""


class FlatLeavesError(Exception):
    code = "error"


class DimensionMismatch(FlatLeavesError, ValueError):
    code = "dimension_mismatch"


class MalformedRational(FlatLeavesError, ValueError):
    code = "malformed_rational"


class SchemaError(FlatLeavesError, ValueError):
    code = "schema_error"


class NotUnimodular(FlatLeavesError, ValueError):
    code = "non_unimodular"


class CapExceeded(FlatLeavesError, RuntimeError):
    code = "cap_exceeded"


class InconsistentVectorSystem(FlatLeavesError, ValueError):
    code = "inconsistent_vector_system"


class NotContained(FlatLeavesError, ValueError):
    code = "not_contained"


class NotSaturated(FlatLeavesError, ValueError):
    code = "not_saturated"


class NotInvariant(FlatLeavesError, ValueError):
    code = "not_invariant"


class NotNested(FlatLeavesError, ValueError):
    code = "non_nested_stabilizers"


class SearchExhausted(FlatLeavesError, RuntimeError):
    code = "search_exhausted"
