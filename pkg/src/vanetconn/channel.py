"""Per-link SNR under the unit-disc and Rayleigh-fading channel models.

All math in this module runs on linear quantities; dB and dBm appear only at
the conversion helpers, and should stay confined to the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkBudget",
    "deterministic_snr",
    "unit_disc_range",
    "sample_rayleigh_snr",
    "snr_matrix_unit_disc",
    "snr_matrix_rayleigh",
    "dbm_to_mw",
    "mw_to_dbm",
    "db_to_linear",
    "linear_to_db",
]


@dataclass(frozen=True)
class LinkBudget:
    """Radio constants of a link: powers in mW (linear), PLE a positive integer."""

    tx_power: float
    noise_power: float
    beta: float
    ple: int

    def __post_init__(self):
        for name in ("tx_power", "noise_power", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if self.ple != int(self.ple) or self.ple < 1:
            raise ValueError(f"ple must be a positive integer, got {self.ple!r}")
        object.__setattr__(self, "ple", int(self.ple))

    @classmethod
    def from_scenario(cls, params) -> "LinkBudget":
        return cls(
            tx_power=params.tx_power,
            noise_power=params.noise_power,
            beta=params.beta,
            ple=params.ple,
        )

    @property
    def snr_scale(self) -> float:
        """Received SNR at 1 m: beta * tx_power / noise_power."""
        return self.beta * self.tx_power / self.noise_power


def deterministic_snr(d: float, budget: LinkBudget) -> float:
    """Path-loss-only received SNR at distance d: beta*P_T / (d^alpha * P_noise).

    d = 0 is rejected; the free-space power law is singular there.
    """
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d!r}")
    return budget.snr_scale / d**budget.ple


def unit_disc_range(budget: LinkBudget, psi: float) -> float:
    """Distance at which the deterministic SNR equals the threshold psi."""
    if not psi > 0:
        raise ValueError(f"threshold must be > 0, got {psi!r}")
    return (budget.snr_scale / psi) ** (1.0 / budget.ple)


def sample_rayleigh_snr(d: float, budget: LinkBudget, rng: np.random.Generator) -> float:
    """One fading-channel SNR draw at distance d.

    Received SNR is exponential with mean equal to the deterministic SNR at
    the same distance, sampled by inverse CDF for seed reproducibility.
    """
    mean = deterministic_snr(d, budget)
    u = 1.0 - rng.random()
    return -mean * math.log(u)


def snr_matrix_unit_disc(distances: np.ndarray, budget: LinkBudget) -> np.ndarray:
    """Deterministic SNR for every pair; zero diagonal.

    Coincident vehicles (off-diagonal zero distance) get infinite SNR, the
    limit of the power law, so they always clear any threshold.
    """
    d = np.asarray(distances, dtype=float)
    with np.errstate(divide="ignore"):
        snr = budget.snr_scale / d**budget.ple
    np.fill_diagonal(snr, 0.0)
    return snr


def snr_matrix_rayleigh(
    distances: np.ndarray, budget: LinkBudget, rng: np.random.Generator
) -> np.ndarray:
    """Fading SNR for every unordered pair, mirrored for channel reciprocity.

    One independent exponential draw per pair (upper triangle, row-major), with
    the mean given by the deterministic SNR at the pair distance.
    """
    d = np.asarray(distances, dtype=float)
    n = d.shape[0]
    iu = np.triu_indices(n, k=1)
    with np.errstate(divide="ignore"):
        means = budget.snr_scale / d[iu] ** budget.ple
    u = 1.0 - rng.random(iu[0].size)
    with np.errstate(invalid="ignore"):
        draws = -means * np.log(u)
    # inf * 0 at coincident vehicles: keep the infinite-SNR limit
    draws[np.isnan(draws)] = np.inf
    snr = np.zeros((n, n))
    snr[iu] = draws
    snr += snr.T
    return snr


def dbm_to_mw(x: float) -> float:
    return 10.0 ** (x / 10.0)


def mw_to_dbm(x: float) -> float:
    if not x > 0:
        raise ValueError(f"power must be > 0 mW, got {x!r}")
    return 10.0 * math.log10(x)


def db_to_linear(x: float) -> float:
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise ValueError(f"ratio must be > 0, got {x!r}")
    return 10.0 * math.log10(x)
