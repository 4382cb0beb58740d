__all__ = [
    'PCCError',
    'ParseError',
    'DomainError',
    'ConfigurationError',
    'CertificationError',
    'InfeasibilityError'
]
from .enums import EXIT_CODES


class PCCError(Exception):
    """Base error of the toolkit. `err` is the exit code the CLI
    terminates with, its meaning is documented in `EXIT_CODES`
    """
    default_err = 2

    def __init__(self, msg: str, err: int = None, *args):
        super().__init__((msg, *args))
        self.err = int(self.default_err if err is None else err)
        self.msg = msg

    def __str__(self):
        if self.err in EXIT_CODES:
            descr = 'error {}: {}'.format(self.err, EXIT_CODES[self.err].__doc__)
        else:
            descr = 'Unknown error {}'.format(self.err)

        return '{}: {}'.format(self.msg, descr)


class ParseError(PCCError):
    """Malformed JSON/CSV input or schema violation"""


class DomainError(PCCError, ValueError):
    """Argument lies outside the domain of an operation"""


class ConfigurationError(PCCError, ValueError):
    """Unsupported configuration, e.g. field order or enumeration cap"""


class CertificationError(PCCError):
    """Test channel violates a condition of a region definition"""
    default_err = 3

    def __init__(self, condition: str, detail: str = ''):
        msg = 'condition "{}" violated'.format(condition)
        if detail:
            msg = '{} ({})'.format(msg, detail)
        super().__init__(msg)
        self.condition = condition


class InfeasibilityError(PCCError):
    """No candidate satisfies the cost budgets"""
    default_err = 4
