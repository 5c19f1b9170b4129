"""M-excitation configuration space of N two-level atoms.

A configuration is a strictly increasing tuple of 1-based excited-site
labels. Configurations are ordered lexicographically: the last site advances
first and carries into earlier ones, so for N=4, M=3 the order is
(1,2,3), (1,2,4), (1,3,4), (2,3,4). The position of a configuration in this
order (1-based) is its bare-state label ``n`` used by every other module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidDimensionError

DEFAULT_DIM_CAP = 20_000

ExcitationConfig = tuple[int, ...]


@dataclass(frozen=True)
class HilbertSpace:
    """The C(N, M)-dimensional space of M excitations among N atoms."""

    N: int
    M: int
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and isinstance(self.M, (int, np.integer))):
            raise InvalidDimensionError(f"N and M must be integers, got N={self.N!r}, M={self.M!r}")
        if self.M < 1 or self.M > self.N:
            raise InvalidDimensionError(f"need 1 <= M <= N, got N={self.N}, M={self.M}")
        if comb(self.N, self.M) > self.dim_cap:
            raise InvalidDimensionError(
                f"C({self.N},{self.M}) = {comb(self.N, self.M)} exceeds the dimension cap {self.dim_cap}"
            )

    @property
    def dim(self) -> int:
        return comb(self.N, self.M)

    @cached_property
    def configs(self) -> np.ndarray:
        """All configurations as a read-only ``(dim, M)`` integer array, 1-based."""
        arr = np.array(enumerate_configs(self.N, self.M, self.dim_cap), dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def phase_indices(self) -> np.ndarray:
        """``f`` of every configuration, in bare-state order."""
        return self.configs.sum(axis=1)

    def config(self, n: int) -> ExcitationConfig:
        """Configuration with 1-based label ``n``."""
        return unrank(n, self)

    def rank(self, cfg: Sequence[int]) -> int:
        return rank(cfg, self)


def enumerate_configs(N: int, M: int, dim_cap: int = DEFAULT_DIM_CAP) -> list[ExcitationConfig]:
    """List every M-subset of sites 1..N in canonical order.

    The last index is advanced first; when it cannot advance, the rightmost
    index that still has room is incremented and every index to its right is
    reset to the smallest admissible value.
    """
    if M < 1 or M > N:
        raise InvalidDimensionError(f"need 1 <= M <= N, got N={N}, M={M}")
    if comb(N, M) > dim_cap:
        raise InvalidDimensionError(f"C({N},{M}) = {comb(N, M)} exceeds the dimension cap {dim_cap}")

    mu = list(range(1, M + 1))
    out = [tuple(mu)]
    while True:
        # rightmost position j whose maximum admissible value is N - M + j + 1 (0-based j)
        j = M - 1
        while j >= 0 and mu[j] == N - M + j + 1:
            j -= 1
        if j < 0:
            return out
        mu[j] += 1
        for i in range(j + 1, M):
            mu[i] = mu[i - 1] + 1
        out.append(tuple(mu))


def _check_config(cfg: Sequence[int], N: int, M: int) -> ExcitationConfig:
    cfg = tuple(int(x) for x in cfg)
    if len(cfg) != M:
        raise DomainError(f"configuration {cfg} has {len(cfg)} sites, expected M={M}")
    if cfg[0] < 1 or cfg[-1] > N:
        raise DomainError(f"configuration {cfg} has sites outside [1, {N}]")
    if any(a >= b for a, b in zip(cfg, cfg[1:])):
        raise DomainError(f"configuration {cfg} is not strictly increasing")
    return cfg


def rank(cfg: Sequence[int], space: HilbertSpace) -> int:
    """1-based position of ``cfg`` in the canonical order, in O(M).

    Uses the combinatorial number system: the number of configurations that
    come *after* ``cfg`` is ``sum_i C(N - mu_i, M - i + 1)``.
    """
    N, M = space.N, space.M
    cfg = _check_config(cfg, N, M)
    after = sum(comb(N - mu, M - i) for i, mu in enumerate(cfg))
    return space.dim - after


def unrank(n: int, space: HilbertSpace) -> ExcitationConfig:
    """Inverse of :func:`rank`."""
    N, M, dim = space.N, space.M, space.dim
    if not 1 <= n <= dim:
        raise DomainError(f"label n={n} outside [1, {dim}]")
    after = dim - n
    out = []
    lo = 1
    for i in range(M):
        k = M - i
        # largest remaining count C(N - mu, k) <= after picks the smallest admissible mu
        mu = lo
        while comb(N - mu, k) > after:
            mu += 1
        after -= comb(N - mu, k)
        out.append(mu)
        lo = mu + 1
    return tuple(out)


def rank_many(configs: np.ndarray, N: int) -> np.ndarray:
    """Vectorised :func:`rank` for an ``(K, M)`` array of sorted 1-based configs."""
    configs = np.asarray(configs, dtype=np.int64)
    M = configs.shape[1]
    table = _binomial_table(N, M)
    after = np.zeros(configs.shape[0], dtype=np.int64)
    for i in range(M):
        after += table[N - configs[:, i], M - i]
    return comb(N, M) - after


def _binomial_table(N: int, M: int) -> np.ndarray:
    table = np.zeros((N + 1, M + 1), dtype=np.int64)
    for a in range(N + 1):
        for b in range(M + 1):
            table[a, b] = comb(a, b)
    return table


def sort_pair(cfg_n: Sequence[int], cfg_m: Sequence[int]) -> tuple[int, int]:
    """Sites exchanged between two configurations.

    Returns ``(s1, s2)`` with ``s1`` excited only in ``cfg_n`` and ``s2``
    excited only in ``cfg_m`` when the two differ by a single site, and the
    sentinel ``(0, 0)`` when they differ by more.
    """
    a, b = set(cfg_n), set(cfg_m)
    if len(a) != len(cfg_n) or len(b) != len(cfg_m) or len(a) != len(b):
        raise DomainError(f"configurations {tuple(cfg_n)} and {tuple(cfg_m)} are not from the same space")
    if a == b:
        raise DomainError(f"identical configurations {tuple(cfg_n)} have no exchanged pair")
    only_n, only_m = a - b, b - a
    if len(only_n) != 1:
        return (0, 0)
    return (only_n.pop(), only_m.pop())


def phase_index(cfg: Sequence[int]) -> int:
    """Sum of excited-site labels; sets the imprinted phase step of a config."""
    return int(sum(cfg))
