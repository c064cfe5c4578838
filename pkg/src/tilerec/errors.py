"""Exception types shared across the package."""


class TilerecError(Exception):
    pass


class InsufficientWindow(TilerecError):
    """A computation needs tiles beyond the radius a window or provider can supply."""


class EmptyInput(TilerecError):
    pass


class DegenerateBasis(TilerecError):
    pass


class BudgetExhausted(TilerecError):
    """Search ran out of dilation factors or window before finding a witness.

    This is not a refutation: existence is guaranteed for some n, with no bound.
    """


class ConfigError(TilerecError):
    pass
