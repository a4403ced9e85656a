"""Exception hierarchy shared by all designmine modules."""


class DesignMineError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(DesignMineError):
    """An argument violates a documented precondition."""


class IngestionError(DesignMineError):
    """An input file is malformed; the message names the row/column."""


class EmptyDatasetError(DesignMineError):
    """A probability or entropy was requested on a zero-mass dataset."""


class InvalidSplitError(DesignMineError):
    """A split candidate produced an empty partition."""


class TreeConstructionError(DesignMineError):
    """Tree building cannot proceed (empty dataset, no labels)."""


class SchemaError(DesignMineError):
    """A tuple's attributes do not match the tree that classifies it."""


class InconsistentCriteriaError(DesignMineError):
    """Good and poor labelling regions overlap for some response."""


class InconsistentBranchError(DesignMineError):
    """A branch path intersects to an empty box."""


class SelectionError(DesignMineError):
    """No branch qualifies for rule selection."""


class ConditioningError(DesignMineError):
    """The morphing system is singular or too ill-conditioned to solve."""
