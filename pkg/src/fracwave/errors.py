"""Exception types shared across the package."""


class FracwaveError(Exception):
    """Base class for package-specific failures."""


class MittagLefflerRangeError(FracwaveError, ValueError):
    """Series argument outside the documented convergence range."""


class TruncationError(FracwaveError, RuntimeError):
    """A certified series truncation could not reach the requested tolerance."""


class ResolutionError(FracwaveError, ValueError):
    """A kernel or profile is too narrow for the grid or mesh resolution."""


class SizeError(FracwaveError, ValueError):
    """Mismatched or insufficient array sizes."""


class SingularOrderError(FracwaveError, ValueError):
    """Requested order hits a singular or undefined case."""


class NormGateError(FracwaveError, RuntimeError):
    """Measured operator norm exceeds the schedule cap; solver runs abort."""


class DivergenceError(FracwaveError, RuntimeError):
    """Fixed-point iteration failed to contract."""


class ConfigError(FracwaveError, ValueError):
    """Configuration text failed to parse or validate.

    Carries a list of (line, message) pairs; line may be None for issues
    that are not anchored to a single line.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        parts = []
        for line, msg in self.issues:
            parts.append(f"line {line}: {msg}" if line is not None else msg)
        super().__init__("; ".join(parts))
