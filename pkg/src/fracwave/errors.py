"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Inputs whose shapes, grids, or interval structure do not line up."""


class ParameterError(ValueError):
    """A parameter value outside its documented range."""


class ResourceError(RuntimeError):
    """A requested computation exceeds the configured dense-matrix budget."""


class NumericalError(RuntimeError):
    """A numerical routine failed or produced non-finite results."""


class DegenerateInputError(ValueError):
    """An input set is empty in a way that makes the requested quantity undefined."""


class DegenerateFitError(RuntimeError):
    """A fit window with too few samples or nonpositive energies."""


class ConfigError(ValueError):
    """Invalid experiment configuration. Carries the list of offending fields."""

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = list(fields or [])
