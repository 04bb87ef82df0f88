"""Spatial pooling: proximal dendrites, k-WTA inhibition, Hebbian learning.

A layer of neurons each samples a random subspace of the feedforward input.
Per step the neurons are ranked by boosted overlap and the top ``n_active``
win (global inhibition). Winners strengthen synapses that saw an on-bit and
weaken the rest; homeostatic boosting keeps idle neurons competitive.
"""

from __future__ import annotations

import numpy as np

from .sdr import DimensionError, Sdr

__all__ = ["ProximalDendrite", "PatternLayer", "reconstruction_error"]


class ProximalDendrite:
    """One neuron's sampled feedforward subspace.

    ``sources`` are distinct input indices, ``permanences`` the matching
    synapse strengths in [0, 1]. A synapse is connected when its permanence
    is >= ``connect_threshold`` (equality connects, matching the learning
    rule's increment branch).
    """

    __slots__ = ("input_size", "sources", "permanences", "connect_threshold")

    def __init__(self, input_size, sources, permanences, connect_threshold=0.2):
        sources = np.asarray(sources, dtype=np.int64)
        permanences = np.asarray(permanences, dtype=np.float64)
        if sources.shape != permanences.shape or sources.ndim != 1:
            raise ValueError("sources and permanences must be 1-d and equal length")
        if len(np.unique(sources)) != sources.size:
            raise ValueError("sources must be distinct")
        if sources.size and (sources.min() < 0 or sources.max() >= input_size):
            raise ValueError(f"sources must lie in [0, {input_size})")
        self.input_size = int(input_size)
        self.sources = sources
        self.permanences = permanences
        self.connect_threshold = float(connect_threshold)

    def connection_vector(self) -> np.ndarray:
        """Binary vector marking connected synapses."""
        return (self.permanences >= self.connect_threshold).astype(np.uint8)

    def overlap(self, x_ff: Sdr) -> int:
        """Count of connected synapses receiving an on-bit."""
        if x_ff.universe_size != self.input_size:
            raise DimensionError(
                f"input width {x_ff.universe_size} != dendrite width {self.input_size}"
            )
        connected = self.permanences >= self.connect_threshold
        active = x_ff.active_set
        return int(
            sum(1 for i, s in enumerate(self.sources) if connected[i] and int(s) in active)
        )


class PatternLayer:
    """Layer of neurons converting feedforward bits into a sparse code.

    All per-neuron arrays are stacked: ``sources`` and ``permanences`` are
    (n_columns, n_synapses) matrices. Scoring is a pure read and may run
    concurrently; learn/boost updates need exclusive access.
    """

    def __init__(
        self,
        input_size: int,
        n_columns: int,
        *,
        n_active: int | None = None,
        sparsity: float = 0.02,
        n_synapses: int | None = None,
        potential_fraction: float = 0.5,
        connect_threshold: float = 0.2,
        delta_inc: float = 0.05,
        delta_dec: float = 0.008,
        min_overlap: int = 1,
        boost_strength: float = 0.0,
        duty_period: int = 1000,
        seed=0,
    ):
        if input_size <= 0 or n_columns <= 0:
            raise ValueError("input_size and n_columns must be positive")
        if n_active is None:
            if not 0.0 < sparsity < 1.0:
                raise ValueError(f"sparsity must be in (0, 1), got {sparsity}")
            n_active = int(round(sparsity * n_columns))
        if not 1 <= n_active <= n_columns:
            raise ValueError(f"n_active must be in [1, {n_columns}], got {n_active}")
        if n_synapses is None:
            n_synapses = max(1, int(round(potential_fraction * input_size)))
        if not 1 <= n_synapses <= input_size:
            raise ValueError(f"n_synapses must be in [1, {input_size}], got {n_synapses}")
        if not 0.0 <= connect_threshold <= 1.0:
            raise ValueError("connect_threshold must be in [0, 1]")
        if delta_inc < 0 or delta_dec < 0 or boost_strength < 0:
            raise ValueError("delta_inc, delta_dec and boost_strength must be >= 0")
        if duty_period < 1:
            raise ValueError("duty_period must be >= 1")

        self.input_size = int(input_size)
        self.n_columns = int(n_columns)
        self.n_active = int(n_active)
        self.sparsity = self.n_active / self.n_columns
        self.n_synapses = int(n_synapses)
        self.connect_threshold = float(connect_threshold)
        self.delta_inc = float(delta_inc)
        self.delta_dec = float(delta_dec)
        self.min_overlap = int(min_overlap)
        self.boost_strength = float(boost_strength)
        self.duty_period = int(duty_period)

        self._rng = np.random.default_rng(seed)
        self.sources = np.stack(
            [
                np.sort(self._rng.choice(input_size, size=self.n_synapses, replace=False))
                for _ in range(n_columns)
            ]
        ).astype(np.int64)
        # Roughly half the synapses start connected.
        low = max(0.0, self.connect_threshold - 0.1)
        high = min(1.0, self.connect_threshold + 0.1)
        self.permanences = self._rng.uniform(low, high, size=(n_columns, self.n_synapses))
        self.boost = np.ones(n_columns, dtype=np.float64)
        self.active_duty = np.zeros(n_columns, dtype=np.float64)
        self.overlap_duty = np.zeros(n_columns, dtype=np.float64)

    def dendrite(self, j: int) -> ProximalDendrite:
        """View of neuron ``j``'s dendrite (shares layer memory)."""
        return ProximalDendrite(
            self.input_size, self.sources[j], self.permanences[j], self.connect_threshold
        )

    def _check_input(self, x_ff: Sdr) -> None:
        if x_ff.universe_size != self.input_size:
            raise DimensionError(
                f"input width {x_ff.universe_size} != layer width {self.input_size}"
            )

    def raw_overlaps(self, x_ff: Sdr) -> np.ndarray:
        """Unboosted overlap score of every neuron with the input."""
        self._check_input(x_ff)
        dense = x_ff.dense()
        connected = self.permanences >= self.connect_threshold
        return np.count_nonzero(dense[self.sources] & connected, axis=1)

    def _select(self, scores: np.ndarray, raw: np.ndarray) -> Sdr:
        """Top ``n_active`` by score among neurons passing the stimulus floor.

        Equal scores break to the lower neuron index.
        """
        eligible = np.nonzero(raw >= self.min_overlap)[0]
        if eligible.size == 0:
            return Sdr(self.n_columns)
        order = eligible[np.argsort(-scores[eligible], kind="stable")]
        return Sdr(self.n_columns, np.sort(order[: self.n_active]))

    def compute_sdr(self, x_ff: Sdr) -> Sdr:
        """Winning neurons for this input (boosted k-WTA)."""
        raw = self.raw_overlaps(x_ff)
        return self._select(self.boost * raw, raw)

    def learn(self, x_ff: Sdr, winners: Sdr) -> None:
        """Hebbian update on the winning neurons only.

        A winner's synapse that saw an on-bit is multiplied by
        (1 + delta_inc) and clamped to 1; its synapses on off-bits are
        multiplied by (1 - delta_dec). Strengthening applies whether or not
        the synapse is connected yet, so a winner's receptive field grows to
        cover its input; this is what makes recognition survive noise.
        """
        self._check_input(x_ff)
        if winners.universe_size != self.n_columns:
            raise DimensionError(
                f"winners width {winners.universe_size} != layer size {self.n_columns}"
            )
        if not winners.active:
            return
        w = list(winners.active)
        rows = self.permanences[w]
        on = x_ff.dense()[self.sources[w]]
        self.permanences[w] = np.where(
            on,
            np.minimum(1.0, rows * (1.0 + self.delta_inc)),
            rows * (1.0 - self.delta_dec),
        )

    def boost_update(self, winners: Sdr, overlaps: np.ndarray) -> None:
        """Refresh duty cycles, boost factors and the weak-neuron nudge.

        Boost is exp(boost_strength * (target - active_duty)) with the layer
        sparsity as target. Neurons whose overlap duty falls below 10% of the
        layer median get all permanences raised by 0.1 * connect_threshold.
        """
        overlaps = np.asarray(overlaps, dtype=np.float64)
        if overlaps.shape != (self.n_columns,):
            raise ValueError(f"overlaps must have shape ({self.n_columns},)")
        period = self.duty_period
        active = np.zeros(self.n_columns, dtype=np.float64)
        if winners.active:
            active[list(winners.active)] = 1.0
        self.active_duty = (self.active_duty * (period - 1) + active) / period
        self.overlap_duty = (self.overlap_duty * (period - 1) + overlaps) / period
        self.boost = np.exp(self.boost_strength * (self.sparsity - self.active_duty))
        floor = 0.1 * float(np.median(self.overlap_duty))
        weak = np.nonzero(self.overlap_duty < floor)[0]
        if weak.size:
            self.permanences[weak] = np.minimum(
                1.0, self.permanences[weak] + 0.1 * self.connect_threshold
            )

    def reconstruct(self, winners: Sdr) -> np.ndarray:
        """Summed back-projection of the winners' connected synapses."""
        if winners.universe_size != self.n_columns:
            raise DimensionError(
                f"winners width {winners.universe_size} != layer size {self.n_columns}"
            )
        out = np.zeros(self.input_size, dtype=np.int64)
        if winners.active:
            w = list(winners.active)
            connected = self.permanences[w] >= self.connect_threshold
            np.add.at(out, self.sources[w][connected], 1)
        return out

    def masked_reconstruct(self, winners: Sdr, x_ff: Sdr) -> np.ndarray:
        """Back-projection restricted to the input's on-bits."""
        self._check_input(x_ff)
        out = self.reconstruct(winners)
        out[~x_ff.dense()] = 0
        return out

    def to_state(self) -> dict:
        return {
            "params": {
                "input_size": self.input_size,
                "n_columns": self.n_columns,
                "n_active": self.n_active,
                "n_synapses": self.n_synapses,
                "connect_threshold": self.connect_threshold,
                "delta_inc": self.delta_inc,
                "delta_dec": self.delta_dec,
                "min_overlap": self.min_overlap,
                "boost_strength": self.boost_strength,
                "duty_period": self.duty_period,
            },
            "sources": self.sources.tolist(),
            "permanences": self.permanences.tolist(),
            "boost": self.boost.tolist(),
            "active_duty": self.active_duty.tolist(),
            "overlap_duty": self.overlap_duty.tolist(),
            "rng": self._rng.bit_generator.state,
        }

    def _restore_state(self, state: dict) -> None:
        perms = np.asarray(state["permanences"], dtype=np.float64)
        if perms.size and (perms.min() < 0.0 or perms.max() > 1.0):
            raise ValueError("permanences outside [0, 1]")
        self.sources = np.asarray(state["sources"], dtype=np.int64)
        self.permanences = perms
        self.boost = np.asarray(state["boost"], dtype=np.float64)
        self.active_duty = np.asarray(state["active_duty"], dtype=np.float64)
        self.overlap_duty = np.asarray(state["overlap_duty"], dtype=np.float64)
        self._rng.bit_generator.state = state["rng"]

    @classmethod
    def from_state(cls, state: dict) -> "PatternLayer":
        layer = cls(**state["params"])
        layer._restore_state(state)
        return layer


def reconstruction_error(x_ff: Sdr, x_hat) -> float:
    """L1 distance between the input and the binarized reconstruction."""
    x_hat = np.asarray(x_hat)
    if x_hat.shape != (x_ff.universe_size,):
        raise DimensionError(
            f"reconstruction width {x_hat.shape} != input width {x_ff.universe_size}"
        )
    return float(np.count_nonzero(x_ff.dense() != (x_hat >= 1)))
