"""Spectral filtering over any factorization exposing ``sigma``/``project``/``expand``.

Works with :class:`~kronsvd.tsvd.ImplicitTsvd`,
:class:`~kronsvd.baseline.BaselineTsvd` and
:class:`~kronsvd.oracle.DenseSvdTriple`.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["FilterSpec", "filter_factors", "filtered_solve", "KINDS"]

KINDS = ("tsvd", "tikhonov", "tsvd_plus_tikhonov")


@dataclass(frozen=True)
class FilterSpec:
    """Filter choice.

    ``effective_truncation`` limits the spectral terms used; ``None`` means all
    terms the operator carries. ``alpha`` is the Tikhonov parameter.
    """

    kind: str = "tsvd"
    alpha: float = 0.0
    effective_truncation: int = None

    def __post_init__(self):
        kind = self.kind.replace("+", "_plus_")
        if kind not in KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be finite and nonnegative, got {self.alpha}")
        if kind != "tsvd" and self.alpha <= 0:
            raise ValueError(f"filter kind {kind!r} needs alpha > 0")
        t = self.effective_truncation
        if t is not None and int(t) < 1:
            raise ValueError(f"effective_truncation must be >= 1, got {t}")


def filter_factors(sigmas, spec):
    """Filter factors ``phi_i`` in ``[0, 1]`` for the given singular values.

    TSVD keeps the first ``effective_truncation`` values; Tikhonov uses
    ``sigma**2 / (sigma**2 + alpha**2)``; the combined kind multiplies the two.
    Signed values (baseline) are handled through ``sigma**2``.
    """
    s = np.asarray(sigmas, dtype=np.float64)
    m = s.size
    t = m if spec.effective_truncation is None else min(int(spec.effective_truncation), m)
    ones = np.zeros(m)
    ones[:t] = 1.0
    if spec.kind == "tsvd":
        return ones
    s2 = s * s
    tik = s2 / (s2 + spec.alpha ** 2)
    if spec.kind == "tikhonov":
        return tik
    return ones * tik


def filtered_solve(op, d, spec):
    """``x = V diag(phi_i / sigma_i) U^T d`` with ``phi/sigma = 0`` where ``sigma == 0``."""
    sig = np.asarray(op.sigma, dtype=np.float64)
    t = spec.effective_truncation
    if t is not None and int(t) > sig.size:
        raise ValueError(
            f"effective_truncation {t} exceeds the {sig.size} terms the operator carries"
        )
    phi = filter_factors(sig, spec)
    gain = np.zeros_like(sig)
    nz = sig != 0
    gain[nz] = phi[nz] / sig[nz]
    y = op.project(d, "left")
    return op.expand(gain * y, "right")
