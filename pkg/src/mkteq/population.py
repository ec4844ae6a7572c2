"""Core market types: weighted populations, market configuration, strategies.

All types are immutable after construction (arrays are marked read-only) and
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

_WEIGHT_SUM_RTOL = 1e-9
_REPUTATION_SUM_ATOL = 1e-12

# Linear predictions are clamped into this open interval so they never
# collapse to an exact 0 or 1 even under sigmoid saturation.
_PREDICTION_CLIP = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LabeledPoint:
    """A representation vector with a binary label and a population mass."""

    x: np.ndarray
    y: int
    weight: float = 1.0


class Population:
    """Finite weighted dataset of (representation, label) pairs.

    Stands in for the user distribution: expectations over users are
    weighted averages over the points. A uniform dataset of N samples uses
    weight 1/N per point.
    """

    __slots__ = ("X", "y", "weights", "total_weight", "_groups")

    def __init__(self, X, y, weights=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-dimensional (n_points, dim), got ndim={X.ndim}")
        n = X.shape[0]
        if n == 0:
            raise ValueError("population must be nonempty")

        y = np.asarray(y)
        if y.shape != (n,):
            raise ValueError(f"y must have shape ({n},), got {y.shape}")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be binary (0/1)")
        y = y.astype(np.uint8)

        if weights is None:
            weights = np.full(n, 1.0 / n)
        else:
            weights = np.asarray(weights, dtype=np.float64)
            if weights.shape != (n,):
                raise ValueError(f"weights must have shape ({n},), got {weights.shape}")
            if (weights < 0).any():
                raise ValueError("weights must be nonnegative")
        total = float(weights.sum())
        if total <= 0:
            raise ValueError("total weight must be positive")

        self.X = _readonly(X)
        self.y = _readonly(y)
        self.weights = _readonly(weights)
        self.total_weight = total
        self._groups = None

    @classmethod
    def from_points(cls, points: Sequence[LabeledPoint]) -> "Population":
        if not points:
            raise ValueError("population must be nonempty")
        X = np.stack([np.asarray(p.x, dtype=np.float64).reshape(-1) for p in points])
        y = np.array([p.y for p in points])
        w = np.array([p.weight for p in points], dtype=np.float64)
        return cls(X, y, w)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def points(self) -> Iterator[LabeledPoint]:
        for i in range(self.n):
            yield LabeledPoint(self.X[i], int(self.y[i]), float(self.weights[i]))

    def has_uniform_weights(self, rtol: float = 1e-12) -> bool:
        w = self.weights
        return bool(np.allclose(w, w[0], rtol=rtol, atol=0.0))

    def representation_groups(self):
        """Group points by distinct representation.

        Returns ``(unique_X, group_index, group_weights, group_posterior_y1)``
        where ``group_index[i]`` maps point i to its distinct representation,
        ``group_weights`` are total masses and ``group_posterior_y1`` the
        empirical label-1 mass fraction per group. Cached after first call.
        """
        if self._groups is None:
            if self.dim == 0:
                unique = np.zeros((1, 0))
                inverse = np.zeros(self.n, dtype=np.intp)
            else:
                unique, inverse = np.unique(self.X, axis=0, return_inverse=True)
                inverse = inverse.reshape(-1)
            k = unique.shape[0]
            gw = np.zeros(k)
            np.add.at(gw, inverse, self.weights)
            g1 = np.zeros(k)
            np.add.at(g1, inverse, self.weights * self.y)
            post = g1 / gw
            self._groups = (_readonly(unique), _readonly(inverse), _readonly(gw), _readonly(post))
        return self._groups

    @property
    def n_distinct(self) -> int:
        return self.representation_groups()[0].shape[0]

    def __repr__(self) -> str:
        return f"Population(n={self.n}, dim={self.dim}, total_weight={self.total_weight:g})"


class MarketConfig:
    """Market structure: provider count, choice noise, reputations.

    ``c == 0`` denotes the noiseless limit, which dispatches to the
    tie-breaking choice rule instead of the smooth one. Reputations must be
    positive and sum to one; ``None`` means equal reputations.
    """

    __slots__ = ("m", "c", "reputations")

    def __init__(self, m: int, c: float, reputations=None):
        if not isinstance(m, (int, np.integer)) or m < 2:
            raise ValueError(f"m must be an integer >= 2, got {m!r}")
        if c < 0:
            raise ValueError(f"choice noise c must be nonnegative, got {c}")
        if reputations is None:
            reputations = np.full(m, 1.0 / m)
        else:
            reputations = np.asarray(reputations, dtype=np.float64)
            if reputations.shape != (m,):
                raise ValueError(f"reputations must have shape ({m},), got {reputations.shape}")
            if (reputations <= 0).any():
                raise ValueError("reputations must be positive")
            if abs(reputations.sum() - 1.0) > _REPUTATION_SUM_ATOL:
                raise ValueError(
                    f"reputations must sum to 1 within {_REPUTATION_SUM_ATOL:g}, "
                    f"got sum {reputations.sum()!r}"
                )
        self.m = int(m)
        self.c = float(c)
        self.reputations = _readonly(reputations)

    def __repr__(self) -> str:
        return f"MarketConfig(m={self.m}, c={self.c:g}, reputations={self.reputations.tolist()})"


def sigmoid(z: np.ndarray) -> np.ndarray:
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0, ez) / (1.0 + ez)


@dataclass(frozen=True)
class LinearStrategy:
    """Linear-sigmoid predictor f(x) = sigmoid((<w, x> + b) / tau).

    ``w`` may be empty (zero-dimensional representations), in which case the
    bias is the only parameter.
    """

    w: np.ndarray
    b: float
    tau: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "w", _readonly(w))
        object.__setattr__(self, "b", float(self.b))
        if not self.tau > 0:
            raise ValueError(f"temperature tau must be positive, got {self.tau}")

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.w + self.b

    def predict_values(self, X: np.ndarray) -> np.ndarray:
        """Predictions on raw feature rows, clamped strictly inside (0, 1)."""
        s = sigmoid(self.decision_values(X) / self.tau)
        return np.clip(s, _PREDICTION_CLIP, 1.0 - _PREDICTION_CLIP)

    def predictions(self, population: Population) -> np.ndarray:
        if population.dim != self.dim:
            raise ValueError(
                f"strategy dimension {self.dim} does not match population dimension {population.dim}"
            )
        return self.predict_values(population.X)


@dataclass(frozen=True)
class TabularStrategy:
    """One hard label per distinct representation of the paired population.

    ``labels[g]`` is the prediction for distinct-representation group ``g``
    in the order produced by :meth:`Population.representation_groups`.
    A mapping {group index: label} is accepted for convenience.
    """

    labels: np.ndarray

    def __post_init__(self):
        labels = self.labels
        if isinstance(labels, Mapping):
            arr = np.zeros(max(labels) + 1, dtype=np.uint8) if labels else np.zeros(0, dtype=np.uint8)
            for idx, lab in labels.items():
                arr[idx] = lab
            labels = arr
        labels = np.asarray(labels)
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-d array of 0/1")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("tabular labels must be binary (0/1)")
        object.__setattr__(self, "labels", _readonly(labels.astype(np.uint8)))

    def predictions(self, population: Population) -> np.ndarray:
        _, inverse, _, _ = population.representation_groups()
        if self.labels.shape[0] < population.n_distinct:
            raise ValueError(
                f"tabular strategy covers {self.labels.shape[0]} representations, "
                f"population has {population.n_distinct}"
            )
        return self.labels[inverse].astype(np.float64)


ProviderStrategy = Union[LinearStrategy, TabularStrategy]
