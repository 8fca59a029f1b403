import functools
import logging
from typing import Any, Callable, Optional, TypeVar, cast

from pydantic import ValidationError

# Type variables for decorators
F = TypeVar("F", bound=Callable[..., Any])

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2


class StncError(Exception):
    """Base class for every error raised by the toolkit."""


class ModelError(StncError, ValueError):
    """Invalid topology, power, scheme or formula argument."""


class ConfigError(StncError):
    """Invalid experiment configuration; `field` names the offending entry."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"invalid value for '{field}': {message}")
        self.field = field
        self.message = message


#############################################################################################
# Turns pydantic's location tuple into the dotted field name used in diagnostics.
#############################################################################################
def field_of(error: ValidationError) -> str:
    errors = error.errors()
    if not errors:
        return "config"
    loc = [str(part) for part in errors[0].get("loc", ()) if part != "__root__"]
    return ".".join(loc) or "config"


#############################################################################################
# Maps toolkit failures onto process exit statuses with a diagnostic log line.
#############################################################################################
class ErrorHandler:
    def __init__(self, logger: Optional[logging.Logger] = None) -> None:
        self.logger = logger or logging.getLogger("ErrorHandler")

    # ########################################################################################
    # Decorator that converts configuration and model failures into an exit status.
    # #########################################################################################
    def with_exit_status(self) -> Callable[[F], F]:
        """
        The wrapped function returns None on success; the wrapper then returns EXIT_OK.
        Configuration problems yield EXIT_INVALID_CONFIG, other toolkit errors EXIT_FAILURE.
        Anything else propagates unchanged.

        Example:
            @error_handler.with_exit_status()
            def run_command(config):
                # Implementation that might raise ConfigError
        """

        def decorator(func: F) -> F:
            @functools.wraps(func)
            def wrapper(*args: Any, **kwargs: Any) -> int:
                try:
                    func(*args, **kwargs)
                    return EXIT_OK
                except ValidationError as e:
                    field = field_of(e)
                    detail = e.errors()[0].get("msg", str(e)) if e.errors() else str(e)
                    self.logger.error(f"{func.__name__}: invalid value for '{field}': {detail}")
                    return EXIT_INVALID_CONFIG
                except ConfigError as e:
                    self.logger.error(f"{func.__name__}: {e}")
                    return EXIT_INVALID_CONFIG
                except StncError as e:
                    self.logger.error(f"{func.__name__} failed: {e}")
                    return EXIT_FAILURE

            return cast(F, wrapper)

        return decorator
