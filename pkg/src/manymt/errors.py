"""Exception hierarchy mapped onto the CLI exit-code contract."""


class ManymtError(Exception):
    """Base class; exit_code drives the process exit status in the CLI."""

    exit_code = 2


class UsageError(ManymtError):
    """Bad invocation: unknown flags, missing arguments, malformed requests."""

    exit_code = 1


class DataError(ManymtError):
    """Bad data: schema violations, unknown languages, inconsistent manifests."""

    exit_code = 2


class NumericError(ManymtError):
    """Numeric failure: non-finite losses, diverging optimization, bad scores."""

    exit_code = 3
