from rest_framework.exceptions import APIException


class CultureSimError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigurationError(CultureSimError, ValueError):
    """
    A simulation or experiment configuration was rejected.

    `line` is the 1-based line of the configuration text that caused the
    rejection, when there is one.
    """

    def __init__(self, message, line=None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class EmptyPopulationError(CultureSimError, ValueError):
    """A population statistic was requested over zero agents."""


class ContractViolation(CultureSimError, ValueError):
    """An operation was called outside its precondition."""


def api_exception(message, custom_code=None):
    class ValidationException(APIException):
        status_code = custom_code if custom_code else 400
        default_detail = {
            "status": "error",
            "code": status_code,
            "detail": message,
        }

    return ValidationException()
