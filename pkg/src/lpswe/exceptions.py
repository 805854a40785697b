# exceptions.py

"""Exception hierarchy for the solver."""


class LpsweError(Exception):
    """Base class for all solver errors."""


class MeshFormatError(LpsweError):
    """Invalid mesh file or inconsistent mesh topology/geometry."""


class PositivityError(LpsweError):
    """Water height (or specific volume) became non-positive."""

    def __init__(self, message, cell=None, suggested_dt=None):
        super().__init__(message)
        self.cell = cell
        self.suggested_dt = suggested_dt


class CFLError(LpsweError):
    """A CFL stability condition was violated."""


class ConfigError(LpsweError):
    """Invalid run configuration."""


class SolverError(LpsweError):
    """Linear solver failed to meet its residual contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
