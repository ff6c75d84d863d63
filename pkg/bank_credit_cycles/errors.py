"""Exceptions raised by the credit-cycle simulator."""


class CreditCycleError(Exception):
    """Base class for every error raised by this library."""


class FeeTooLargeError(CreditCycleError, ValueError):
    """The origination fee reached the project cost, so the entrepreneur would self-finance."""


class ZeroPriceError(CreditCycleError, ZeroDivisionError):
    """A demand schedule was evaluated at a zero (or negative) market price."""


class NegativePriceError(CreditCycleError, ValueError):
    """Market clearing produced a non-positive price for the configured sentiment."""

    def __init__(self, price: float, psi: float) -> None:
        self.price = price
        self.psi = psi
        super().__init__(f"cleared price {price:.6g} is not positive for sentiment psi={psi:.6g}")


class FullWipeoutError(CreditCycleError, ValueError):
    """The collateral price fell below 1 - h, so the haircut cannot support any debt."""

    def __init__(self, price_ratio: float, h: float) -> None:
        self.price_ratio = price_ratio
        self.h = h
        super().__init__(f"collateral price {price_ratio:.6g} is below 1 - h = {1.0 - h:.6g}; equity is exhausted")


class InsolventBankError(CreditCycleError, ArithmeticError):
    """Settlement left the bank with negative equity.

    The settled state is attached so callers can still report the final equity.
    """

    def __init__(self, equity: float, state: object = None) -> None:
        self.equity = equity
        self.state = state
        super().__init__(f"bank is insolvent at settlement: equity {equity:.6g}")


class ZeroSpreadError(CreditCycleError, ZeroDivisionError):
    """Naked protection cannot be sized when the traded CDS spread is zero."""


class ConfigValidationError(CreditCycleError, ValueError):
    """A configuration value violates a model invariant."""

    def __init__(self, message: str, field: str | None = None) -> None:
        self.field = field
        super().__init__(message)


class ConfigParseError(ConfigValidationError):
    """A configuration file could not be read as typed key = value lines."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        self.line = line
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"{location}{message}", field=field)


class OutputBundleError(CreditCycleError, OSError):
    """An output bundle could not be written or is missing a required file."""
