"""Exception types raised by the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class SingularPoint(WorkbenchError, ValueError):
    """Evaluation requested at a declared pole of a superpotential or potential."""


class OutOfRange(WorkbenchError, ValueError):
    """Tabulated data evaluated outside its abscissae."""


class OutOfDomain(WorkbenchError, ValueError):
    """Argument outside the interval on which a potential is defined."""


class NonConfining(WorkbenchError, ValueError):
    pass


class ComplexIndex(WorkbenchError, ValueError):
    """The indicial exponent sqrt(1/4 + c) is not real."""


class Degenerate(WorkbenchError, ValueError):
    pass


class NegativeEigenvalue(WorkbenchError, ValueError):
    pass


class GridTooCoarse(WorkbenchError, ValueError):
    pass


class ConvergenceFailure(WorkbenchError, RuntimeError):
    pass


class ConfigError(WorkbenchError, ValueError):
    """Invalid command-line or JSON configuration."""
