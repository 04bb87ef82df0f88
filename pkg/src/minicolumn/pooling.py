"""Temporal pooling: slow, stable representations of predictable sequences.

A pooling layer is a pattern layer over the transition layer's cellular
output, with two twists. Scoring carries a fraction of a cell's previous
activation forward while its inputs stay predicted, and learning moves faster
on predicted sources than on bursting ones, so pooled cells latch onto
sequences the layer below has mastered.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .pattern import PatternLayer
from .sdr import DimensionError, Sdr, overlap
from .transition import LayerOutput

__all__ = ["PoolingLayer", "stability"]


class PoolingLayer(PatternLayer):
    """Pattern layer with prediction-gated hysteresis and modulated learning.

    With ``persistence`` zero and equal predicted/bursting rates this reduces
    bit-for-bit to the plain pattern layer.
    """

    def __init__(
        self,
        input_size: int,
        n_columns: int,
        *,
        persistence: float = 0.5,
        delta_inc_pred: float = 0.10,
        delta_dec_pred: float = 0.003,
        delta_inc_burst: float = 0.02,
        delta_dec_burst: float = 0.02,
        min_overlap: int = 2,
        **kwargs,
    ):
        if not 0.0 <= persistence < 1.0:
            raise ValueError(f"persistence must be in [0, 1), got {persistence}")
        if delta_inc_pred < delta_inc_burst or delta_dec_pred > delta_dec_burst:
            raise ValueError(
                "predicted sources must learn at least as fast as bursting ones "
                "(delta_inc_pred >= delta_inc_burst, delta_dec_pred <= delta_dec_burst)"
            )
        super().__init__(input_size, n_columns, min_overlap=min_overlap, **kwargs)
        self.persistence = float(persistence)
        self.delta_inc_pred = float(delta_inc_pred)
        self.delta_dec_pred = float(delta_dec_pred)
        self.delta_inc_burst = float(delta_inc_burst)
        self.delta_dec_burst = float(delta_dec_burst)
        self.active_prev = Sdr(self.n_columns)

    def tp_step(self, l4: LayerOutput) -> Sdr:
        """Pooled SDR for one step of the layer below.

        Cells active on the previous step add ``persistence`` times their
        overlap with the predicted sub-input to their score, so a pooled code
        persists exactly while the sequence below stays predictable.
        """
        if l4.active_cells.universe_size != self.input_size:
            raise DimensionError(
                f"cellular width {l4.active_cells.universe_size} != pool input "
                f"width {self.input_size}"
            )
        raw = self.raw_overlaps(l4.active_cells)
        scores = self.boost * raw
        if self.persistence > 0.0 and self.active_prev.active and l4.predicted_cells.active:
            prev = list(self.active_prev.active)
            pred_raw = self.raw_overlaps(l4.predicted_cells)
            scores[prev] += self.persistence * pred_raw[prev]
        out = self._select(scores, raw)
        self.active_prev = out
        return out

    def tp_learn(self, l4: LayerOutput, winners: Sdr) -> None:
        """Hebbian update with per-synapse rates picked by source class.

        Synapses onto predicted cells use the predicted rate pair, synapses
        onto bursting cells the bursting pair; synapses whose source stayed
        silent decay at the bursting rate.
        """
        if l4.active_cells.universe_size != self.input_size:
            raise DimensionError(
                f"cellular width {l4.active_cells.universe_size} != pool input "
                f"width {self.input_size}"
            )
        if winners.universe_size != self.n_columns:
            raise DimensionError(
                f"winners width {winners.universe_size} != pool size {self.n_columns}"
            )
        if not winners.active:
            return
        w = list(winners.active)
        on = l4.active_cells.dense()[self.sources[w]]
        pred_src = l4.predicted_cells.dense()[self.sources[w]]
        inc = np.where(pred_src, self.delta_inc_pred, self.delta_inc_burst)
        dec = np.where(pred_src, self.delta_dec_pred, self.delta_dec_burst)
        rows = self.permanences[w]
        self.permanences[w] = np.where(
            on,
            np.minimum(1.0, rows * (1.0 + inc)),
            rows * (1.0 - dec),
        )

    def to_state(self) -> dict:
        state = super().to_state()
        state["params"].update(
            persistence=self.persistence,
            delta_inc_pred=self.delta_inc_pred,
            delta_dec_pred=self.delta_dec_pred,
            delta_inc_burst=self.delta_inc_burst,
            delta_dec_burst=self.delta_dec_burst,
        )
        state["active_prev"] = list(self.active_prev.active)
        return state

    @classmethod
    def from_state(cls, state: dict) -> "PoolingLayer":
        pool = cls(**state["params"])
        pool._restore_state(state)
        pool.active_prev = Sdr(pool.n_columns, state["active_prev"])
        return pool


def stability(history: Sequence[Sdr], n_active: int | None = None) -> float:
    """Mean step-to-step turnover of a sequence of SDRs; 0 is perfectly stable.

    Each consecutive pair contributes 1 - overlap/n_active. When ``n_active``
    is not given, the largest cardinality in the history is used.
    """
    if len(history) < 2:
        raise ValueError("need at least two SDRs to measure stability")
    if n_active is None:
        n_active = max(len(s) for s in history)
    if n_active <= 0:
        raise ValueError("n_active must be positive")
    changes = [
        1.0 - overlap(a, b) / n_active for a, b in zip(history, history[1:])
    ]
    return float(np.mean(changes))
