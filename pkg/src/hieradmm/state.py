"""State containers for the two-layer client/edge/cloud hierarchy.

All containers are frozen; training advances by dataclasses.replace, never
by mutation, so intermediate states can be shared or inspected freely.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DimensionMismatch
from .objective import Dataset
from .vectors import as_weights


def _frozen_vector(values) -> np.ndarray:
    arr = as_weights(values).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ClientShard:
    """One client: its local data plus running local state."""

    client_id: int
    set_id: int
    samples: Dataset
    w_local: np.ndarray
    pi_local: np.ndarray  # only advanced by the double-ADMM trainer
    sigma_kc: float = 0.0

    def __post_init__(self):
        if len(self.samples) < 1:
            raise ValueError("a client shard needs at least one sample")
        w = _frozen_vector(self.w_local)
        pi = _frozen_vector(self.pi_local)
        if w.shape != pi.shape:
            raise DimensionMismatch("w_local and pi_local lengths differ")
        object.__setattr__(self, "w_local", w)
        object.__setattr__(self, "pi_local", pi)

    @property
    def n_samples(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class EdgeGroup:
    """One edge server's set: member clients plus intra-set state."""

    set_id: int
    clients: tuple
    w_set: np.ndarray
    pi_set: np.ndarray
    sigma_c: float = 0.0

    def __post_init__(self):
        if not self.clients:
            raise ValueError("a group needs at least one client")
        object.__setattr__(self, "clients", tuple(self.clients))
        object.__setattr__(self, "w_set", _frozen_vector(self.w_set))
        object.__setattr__(self, "pi_set", _frozen_vector(self.pi_set))

    @property
    def n_clients(self) -> int:
        return len(self.clients)

    @property
    def n_samples(self) -> int:
        return sum(c.n_samples for c in self.clients)


@dataclass(frozen=True)
class CloudState:
    """The full simulated system: global model plus ordered groups."""

    w_global: np.ndarray
    groups: tuple

    def __post_init__(self):
        if not self.groups:
            raise ValueError("a cloud state needs at least one group")
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "w_global", _frozen_vector(self.w_global))

    @property
    def n_samples(self) -> int:
        return sum(g.n_samples for g in self.groups)

    @property
    def dim(self) -> int:
        return self.w_global.shape[0]

    def with_global(self, w) -> "CloudState":
        return replace(self, w_global=w)
