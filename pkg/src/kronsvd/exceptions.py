"""Exception types shared across the package."""

import os

DEFAULT_CAP = 4096


class DimensionError(ValueError):
    """Raised when array shapes are inconsistent with an operation."""


class CapacityError(RuntimeError):
    """Raised when a dense materialization would exceed the configured cap."""


class ParseError(ValueError):
    """Malformed image or manifest file; carries a position when known."""

    def __init__(self, message, path=None, line=None, offset=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        prefix = ": ".join([", ".join(where)]) + ": " if where else ""
        super().__init__(prefix + message)
        self.path = path
        self.line = line
        self.offset = offset


def materialization_cap():
    """Largest N (= n**2) allowed for dense N x N materialization.

    Read from the ``KRONSVD_CAP`` environment variable on every call so that
    tests and the CLI can adjust it without reloading the package.
    """
    raw = os.environ.get("KRONSVD_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"KRONSVD_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"KRONSVD_CAP must be positive, got {cap}")
    return cap


def check_cap(N, what="operator"):
    cap = materialization_cap()
    if N > cap:
        raise CapacityError(
            f"refusing to materialize a dense {N}x{N} {what}: "
            f"N={N} exceeds cap {cap} (set KRONSVD_CAP to raise it)"
        )
