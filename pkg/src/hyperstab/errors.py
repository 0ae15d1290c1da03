"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``ConditionViolated`` (and subclasses)
exits with 1, ``InputError`` with 2.
"""


class HyperstabError(Exception):
    pass


class InputError(HyperstabError, ValueError):
    """Malformed or inconsistent input (shapes, indices, signs, schema)."""


class UnsupportedDimensionError(InputError):
    pass


class ConditionViolated(HyperstabError):
    """A certificate's hypothesis does not hold for the given system."""


class PreconditionError(ConditionViolated):
    def __init__(self, message, witness=None, residual=None):
        super().__init__(message)
        self.witness = witness
        self.residual = residual


class NoCommonEigenvectorError(ConditionViolated):
    pass


class SolverError(HyperstabError):
    def __init__(self, message, best_x=None, best_lambda=None, residual=None):
        super().__init__(message)
        self.best_x = best_x
        self.best_lambda = best_lambda
        self.residual = residual
