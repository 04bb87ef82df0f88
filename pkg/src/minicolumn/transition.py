"""Prediction-assisted transition memory over multi-cell columns.

Each column shares one proximal dendrite; each cell carries distal segments
that detect coincidences in the previous step's cell activity. Distal input
depolarises cells ahead of their column's inhibitory sheath, so well-predicted
columns fire only their predictive cells while unpredicted columns burst.
One winner cell per active column carries the sequence context and drives
segment learning, which is how high-order sequences and anomaly signals
emerge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .pattern import PatternLayer, ProximalDendrite
from .sdr import Sdr

__all__ = [
    "P_PRED",
    "I_PRED",
    "I_FF",
    "P_BURST",
    "I_SPREAD",
    "FiringEvent",
    "DistalSegment",
    "TmColumn",
    "LayerOutput",
    "TmLayer",
    "capacity",
    "firing_time",
    "representation_views",
]

# Firing-sequence classes, in emission order. P_* entries are cells,
# I_* entries are column sheaths.
P_PRED = "P_pred"
I_PRED = "I_pred"
I_FF = "I_ff"
P_BURST = "P_burst"
I_SPREAD = "I_spread"


class FiringEvent(NamedTuple):
    unit: int  # cell id for P_* classes, column id for I_* classes
    kind: str
    rate: float  # depolarisation rate; firing time = gamma / rate


def firing_time(rate: float, gamma: float = 1.0) -> float:
    """Time to reach firing threshold; infinite when nothing depolarises."""
    return gamma / rate if rate > 0.0 else math.inf


class DistalSegment:
    """Coincidence detector over prior cell activity.

    ``sources`` are cell ids (never the owning cell), ``permanences`` the
    matching strengths. The segment spikes when at least
    ``activation_threshold`` connected synapses see an active source.
    """

    __slots__ = (
        "sources",
        "permanences",
        "connect_threshold",
        "activation_threshold",
        "spike_size",
    )

    def __init__(
        self,
        sources,
        permanences,
        connect_threshold: float = 0.2,
        activation_threshold: int = 8,
        spike_size: float = 1.0,
    ):
        sources = [int(s) for s in sources]
        permanences = [float(p) for p in permanences]
        if len(sources) != len(permanences):
            raise ValueError("sources and permanences must have equal length")
        if len(set(sources)) != len(sources):
            raise ValueError("sources must be distinct")
        if activation_threshold < 1:
            raise ValueError("activation_threshold must be >= 1")
        if spike_size <= 0:
            raise ValueError("spike_size must be positive")
        self.sources = sources
        self.permanences = permanences
        self.connect_threshold = float(connect_threshold)
        self.activation_threshold = int(activation_threshold)
        self.spike_size = float(spike_size)

    def __len__(self) -> int:
        return len(self.sources)

    def connected_overlap(self, active: frozenset | set) -> int:
        """Connected synapses whose source fired on the previous step."""
        thr = self.connect_threshold
        return sum(
            1
            for src, p in zip(self.sources, self.permanences)
            if p >= thr and src in active
        )

    def matching_overlap(self, active: frozenset | set) -> int:
        """Raw synapse count on active sources, ignoring permanence."""
        return sum(1 for src in self.sources if src in active)

    def is_active(self, active: frozenset | set) -> bool:
        return self.connected_overlap(active) >= self.activation_threshold

    def total_permanence(self) -> float:
        return sum(self.permanences)


@dataclass
class TmColumn:
    """Introspection view of one column: shared proximal input + cell segments."""

    proximal: ProximalDendrite
    cells: list[list[DistalSegment]]


@dataclass(frozen=True)
class LayerOutput:
    """One timestep's multi-level result."""

    active_columns: Sdr
    active_cells: Sdr
    predicted_cells: Sdr
    burst_cells: Sdr
    winner_cells: Sdr
    firing_sequence: tuple[FiringEvent, ...]
    predictive_cells_next: Sdr
    anomaly: float


@dataclass
class _CellEval:
    """Per-cell distal summary against one activity set."""

    o_pred: float = 0.0
    o_sub: float = 0.0
    active_segments: list[DistalSegment] = field(default_factory=list)
    best_overlap: int = 0
    best_segment: DistalSegment | None = None


class TmLayer:
    """Columns-of-cells sequence memory with prediction-assisted inhibition.

    Column selection is global top-k over alpha * boosted feedforward overlap
    plus beta * the best member-cell predictive potential, standing in for the
    spreading-inhibition wavefront. Scoring phases are pure reads; stepping
    and learning require exclusive access.
    """

    def __init__(
        self,
        input_size: int,
        n_columns: int,
        cells_per_column: int,
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
        alpha: float = 1.0,
        beta: float = 0.5,
        beta_sub: float = 0.0,
        alpha_inh: float = 1.5,
        gamma_p: float = 1.0,
        gamma_inh: float = 1.0,
        dtau_vert: float = math.inf,
        predictive_threshold: float = 1.0,
        synapses_per_segment: int = 32,
        segments_per_cell: int = 32,
        activation_threshold: int = 8,
        min_match_threshold: int = 4,
        spike_size: float = 1.0,
        sigma_inc: float = 0.1,
        sigma_dec: float = 0.02,
        sigma_punish: float = 0.004,
        initial_segment_permanence: float | None = None,
        column_score_mode: str = "max",
        blank_winner: str = "random",
        seed: int = 0,
    ):
        if cells_per_column < 1:
            raise ValueError("cells_per_column must be >= 1")
        if min(alpha, gamma_p, gamma_inh) <= 0 or dtau_vert <= 0:
            raise ValueError("alpha, gamma_p, gamma_inh and dtau_vert must be > 0")
        if beta < 0 or beta_sub < 0:
            raise ValueError("beta and beta_sub must be >= 0")
        # Guarantees the sheath beats any zero-prediction cell on pure
        # feedforward drive: gamma_inh/(alpha_inh*o) < gamma_p/(alpha*o).
        if not alpha_inh > alpha * gamma_inh / gamma_p:
            raise ValueError(
                "need alpha_inh > alpha * gamma_inh / gamma_p so the sheath "
                "outpaces unpredicted cells"
            )
        if column_score_mode not in ("max", "sum"):
            raise ValueError(f"column_score_mode must be 'max' or 'sum', got {column_score_mode!r}")
        if blank_winner not in ("random", "lowest"):
            raise ValueError(f"blank_winner must be 'random' or 'lowest', got {blank_winner!r}")
        if synapses_per_segment < 1 or segments_per_cell < 1:
            raise ValueError("segment budgets must be >= 1")
        if sigma_inc < 0 or sigma_dec < 0 or sigma_punish < 0:
            raise ValueError("sigma rates must be >= 0")

        root = np.random.SeedSequence(seed)
        pattern_ss, distal_ss = root.spawn(2)
        self.pattern = PatternLayer(
            input_size,
            n_columns,
            n_active=n_active,
            sparsity=sparsity,
            n_synapses=n_synapses,
            potential_fraction=potential_fraction,
            connect_threshold=connect_threshold,
            delta_inc=delta_inc,
            delta_dec=delta_dec,
            min_overlap=min_overlap,
            boost_strength=boost_strength,
            duty_period=duty_period,
            seed=pattern_ss,
        )
        self._rng = np.random.default_rng(distal_ss)

        self.n_columns = self.pattern.n_columns
        self.cells_per_column = int(cells_per_column)
        self.n_cells = self.n_columns * self.cells_per_column
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.beta_sub = float(beta_sub)
        self.alpha_inh = float(alpha_inh)
        self.gamma_p = float(gamma_p)
        self.gamma_inh = float(gamma_inh)
        self.dtau_vert = float(dtau_vert)
        self.predictive_threshold = float(predictive_threshold)
        self.synapses_per_segment = int(synapses_per_segment)
        self.segments_per_cell = int(segments_per_cell)
        self.activation_threshold = int(activation_threshold)
        self.min_match_threshold = int(min_match_threshold)
        self.spike_size = float(spike_size)
        self.sigma_inc = float(sigma_inc)
        self.sigma_dec = float(sigma_dec)
        self.sigma_punish = float(sigma_punish)
        self.initial_segment_permanence = (
            connect_threshold + 0.05
            if initial_segment_permanence is None
            else float(initial_segment_permanence)
        )
        self.column_score_mode = column_score_mode
        self.blank_winner = blank_winner

        # cell id -> list of segments; only cells that grew segments appear.
        self.segments: dict[int, list[DistalSegment]] = {}
        self._prev_active = Sdr(self.n_cells)
        self._prev_winners = Sdr(self.n_cells)
        self._prev_predictive = Sdr(self.n_cells)
        self._prev_evals: dict[int, _CellEval] = {}

    # -- basic geometry -----------------------------------------------------

    def column_of(self, cell: int) -> int:
        return cell // self.cells_per_column

    def cells_of(self, column: int) -> range:
        n = self.cells_per_column
        return range(column * n, (column + 1) * n)

    def column(self, m: int) -> TmColumn:
        return TmColumn(
            proximal=self.pattern.dendrite(m),
            cells=[list(self.segments.get(c, ())) for c in self.cells_of(m)],
        )

    @property
    def prev_active(self) -> Sdr:
        return self._prev_active

    @property
    def prev_winners(self) -> Sdr:
        return self._prev_winners

    @property
    def prev_predictive(self) -> Sdr:
        return self._prev_predictive

    # -- distal evaluation --------------------------------------------------

    def predictive_potential(self, cell: int, prev_active: Sdr | Iterable[int]) -> float:
        """Summed spike sizes of this cell's active segments."""
        active = prev_active.active_set if isinstance(prev_active, Sdr) else frozenset(prev_active)
        return sum(
            seg.spike_size
            for seg in self.segments.get(cell, ())
            if seg.is_active(active)
        )

    def _eval_segments(self, active: frozenset) -> dict[int, _CellEval]:
        """Distal summaries for every cell owning segments.

        o_pred sums spikes of segments at or above threshold; o_sub sums
        spikes of segments at or above half threshold; best_* tracks the raw
        (permanence-blind) match used for learning on bursts.
        """
        evals: dict[int, _CellEval] = {}
        if not active:
            return evals
        for cell, segs in self.segments.items():
            ev = None
            for seg in segs:
                raw = 0
                conn = 0
                thr = seg.connect_threshold
                for src, p in zip(seg.sources, seg.permanences):
                    if src in active:
                        raw += 1
                        if p >= thr:
                            conn += 1
                if raw == 0:
                    continue
                if ev is None:
                    ev = evals.setdefault(cell, _CellEval())
                if conn >= seg.activation_threshold:
                    ev.o_pred += seg.spike_size
                    ev.active_segments.append(seg)
                elif 2 * conn >= seg.activation_threshold:
                    ev.o_sub += seg.spike_size
                if raw > ev.best_overlap:
                    ev.best_overlap = raw
                    ev.best_segment = seg
        return evals

    def depolarisation_rates(
        self, x_ff: Sdr, prev_active: Sdr
    ) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell and per-sheath depolarisation rates for given activity.

        Cell rate is alpha * column feedforward overlap + beta * predictive
        potential; the sheath sees only alpha_inh * feedforward overlap.
        """
        raw = self.pattern.raw_overlaps(x_ff)
        active = prev_active.active_set
        d_cells = np.repeat(self.alpha * raw.astype(np.float64), self.cells_per_column)
        if active:
            evals = self._eval_segments(active)
            for cell, ev in evals.items():
                d_cells[cell] += self.beta * ev.o_pred
        d_sheaths = self.alpha_inh * raw.astype(np.float64)
        return d_cells, d_sheaths

    # -- stepping -----------------------------------------------------------

    def _select_columns(self, raw: np.ndarray, evals: dict[int, _CellEval]) -> Sdr:
        col_pred = np.zeros(self.n_columns, dtype=np.float64)
        for cell, ev in evals.items():
            if ev.o_pred > 0.0:
                m = self.column_of(cell)
                if self.column_score_mode == "max":
                    col_pred[m] = max(col_pred[m], ev.o_pred)
                else:
                    col_pred[m] += ev.o_pred
        scores = self.alpha * (self.pattern.boost * raw) + self.beta * col_pred
        return self.pattern._select(scores, raw)

    def _partition(
        self, active_columns: Sdr, raw: np.ndarray, evals: dict[int, _CellEval]
    ):
        """Split active columns into predicted / bursting cells plus events."""
        predicted: list[int] = []
        burst: list[int] = []
        ev_p_pred: list[FiringEvent] = []
        ev_i_pred: list[FiringEvent] = []
        ev_i_ff: list[FiringEvent] = []
        ev_p_burst: list[FiringEvent] = []

        for m in active_columns:
            o_ff = float(raw[m])
            d_sheath = self.alpha_inh * o_ff
            pred_here = [
                (c, evals[c].o_pred)
                for c in self.cells_of(m)
                if c in evals and evals[c].o_pred >= self.predictive_threshold
            ]
            if pred_here:
                for c, o_pred in pred_here:
                    predicted.append(c)
                    ev_p_pred.append(
                        FiringEvent(c, P_PRED, self.alpha * o_ff + self.beta * o_pred)
                    )
                ev_i_pred.append(FiringEvent(m, I_PRED, d_sheath))
            else:
                ev_i_ff.append(FiringEvent(m, I_FF, d_sheath))
                tau_sheath = firing_time(d_sheath, self.gamma_inh)
                cutoff = tau_sheath + self.dtau_vert
                chosen: list[tuple[int, float]] = []
                for c in self.cells_of(m):
                    o_sub = evals[c].o_sub if c in evals else 0.0
                    d = self.alpha * o_ff + self.beta_sub * o_sub
                    if firing_time(d, self.gamma_p) < cutoff:
                        chosen.append((c, d))
                if not chosen:
                    # The column won the feedforward competition; its fastest
                    # cell must represent it even when the vertical window is
                    # narrower than the sheath margin.
                    best = max(
                        self.cells_of(m),
                        key=lambda c: (
                            self.beta_sub * (evals[c].o_sub if c in evals else 0.0),
                            -c,
                        ),
                    )
                    chosen = [
                        (
                            best,
                            self.alpha * o_ff
                            + self.beta_sub
                            * (evals[best].o_sub if best in evals else 0.0),
                        )
                    ]
                for c, d in chosen:
                    burst.append(c)
                    ev_p_burst.append(FiringEvent(c, P_BURST, d))

        return predicted, burst, ev_p_pred, ev_i_pred, ev_i_ff, ev_p_burst

    def _select_winners(
        self,
        active_columns: Sdr,
        predicted: list[int],
        evals: dict[int, _CellEval],
    ) -> list[int]:
        """One winner per active column.

        Predicted column: the cell with maximal predictive potential. Burst
        column: the cell with the best raw segment match at or above the
        learning floor, else a cell with fewest segments (seeded-random or
        lowest-index per configuration).
        """
        pred_set = set(predicted)
        winners: list[int] = []
        for m in active_columns:
            cells = list(self.cells_of(m))
            col_pred = [c for c in cells if c in pred_set]
            if col_pred:
                winners.append(
                    max(col_pred, key=lambda c: (evals[c].o_pred, -c))
                )
                continue
            best_cell = None
            best_raw = self.min_match_threshold - 1
            for c in cells:
                ev = evals.get(c)
                if ev is not None and ev.best_overlap > best_raw:
                    best_cell, best_raw = c, ev.best_overlap
            if best_cell is not None:
                winners.append(best_cell)
                continue
            counts = [len(self.segments.get(c, ())) for c in cells]
            fewest = min(counts)
            pool = [c for c, k in zip(cells, counts) if k == fewest]
            if self.blank_winner == "lowest":
                winners.append(pool[0])
            else:
                winners.append(pool[int(self._rng.integers(len(pool)))])
        return winners

    def _reinforce(self, seg: DistalSegment, prev_active: frozenset) -> None:
        inc = 1.0 + self.sigma_inc
        dec = 1.0 - self.sigma_dec
        perms = seg.permanences
        for i, src in enumerate(seg.sources):
            if src in prev_active:
                perms[i] = min(1.0, perms[i] * inc)
            else:
                perms[i] = perms[i] * dec

    def _grow_segment(self, cell: int, prev_winners: Sdr) -> None:
        candidates = [c for c in prev_winners.active if c != cell]
        if not candidates:
            return
        k = min(self.synapses_per_segment, len(candidates))
        picked = self._rng.choice(len(candidates), size=k, replace=False)
        sources = sorted(candidates[i] for i in picked)
        seg = DistalSegment(
            sources,
            [self.initial_segment_permanence] * k,
            connect_threshold=self.pattern.connect_threshold,
            activation_threshold=self.activation_threshold,
            spike_size=self.spike_size,
        )
        segs = self.segments.setdefault(cell, [])
        if len(segs) >= self.segments_per_cell:
            weakest = min(
                range(len(segs)), key=lambda i: (segs[i].total_permanence(), i)
            )
            segs[weakest] = seg
        else:
            segs.append(seg)

    def _learn_distal(
        self,
        winners: list[int],
        evals: dict[int, _CellEval],
        active_column_set: set[int],
        prev_active: frozenset,
        prev_winners: Sdr,
    ) -> None:
        # Mispredicted cells first: their columns stayed inactive, so the
        # segments that produced the prediction shed a little permanence.
        if self.sigma_punish > 0.0:
            fade = 1.0 - self.sigma_punish
            for cell in self._prev_predictive:
                if self.column_of(cell) in active_column_set:
                    continue
                ev = evals.get(cell)
                if ev is None:
                    continue
                for seg in ev.active_segments:
                    perms = seg.permanences
                    for i, src in enumerate(seg.sources):
                        if src in prev_active:
                            perms[i] = perms[i] * fade
        for cell in winners:
            ev = evals.get(cell)
            if ev is not None and ev.active_segments:
                for seg in ev.active_segments:
                    self._reinforce(seg, prev_active)
            elif ev is not None and ev.best_overlap >= self.min_match_threshold:
                self._reinforce(ev.best_segment, prev_active)
            else:
                self._grow_segment(cell, prev_winners)

    def step(self, x_ff: Sdr, learn: bool = True) -> LayerOutput:
        """Run one timestep: select columns, fire cells, learn, advance state."""
        raw = self.pattern.raw_overlaps(x_ff)
        evals = self._prev_evals
        active_columns = self._select_columns(raw, evals)
        predicted, burst, ev_p_pred, ev_i_pred, ev_i_ff, ev_p_burst = self._partition(
            active_columns, raw, evals
        )
        winners = self._select_winners(active_columns, predicted, evals)

        active_set = set(active_columns.active)
        ev_spread = [
            FiringEvent(m, I_SPREAD, self.alpha_inh * float(raw[m]))
            for m in range(self.n_columns)
            if m not in active_set
        ]
        order = lambda e: (-e.rate, e.unit)
        firing_sequence = tuple(
            sorted(ev_p_pred, key=order)
            + sorted(ev_i_pred, key=order)
            + sorted(ev_i_ff, key=order)
            + sorted(ev_p_burst, key=order)
            + sorted(ev_spread, key=order)
        )

        prev_pred_columns = {self.column_of(c) for c in self._prev_predictive}
        if active_columns.active:
            hits = sum(1 for m in active_columns if m in prev_pred_columns)
            anomaly = 1.0 - hits / len(active_columns)
        else:
            anomaly = 0.0

        if learn:
            self._learn_distal(
                winners,
                evals,
                active_set,
                self._prev_active.active_set,
                self._prev_winners,
            )
            self.pattern.learn(x_ff, active_columns)

        active_cells = Sdr(self.n_cells, sorted(predicted + burst))
        next_evals = self._eval_segments(active_cells.active_set)
        predictive_next = Sdr(
            self.n_cells,
            sorted(
                c
                for c, ev in next_evals.items()
                if ev.o_pred >= self.predictive_threshold
            ),
        )

        output = LayerOutput(
            active_columns=active_columns,
            active_cells=active_cells,
            predicted_cells=Sdr(self.n_cells, sorted(predicted)),
            burst_cells=Sdr(self.n_cells, sorted(burst)),
            winner_cells=Sdr(self.n_cells, sorted(winners)),
            firing_sequence=firing_sequence,
            predictive_cells_next=predictive_next,
            anomaly=anomaly,
        )

        self._prev_active = active_cells
        self._prev_winners = output.winner_cells
        self._prev_predictive = predictive_next
        self._prev_evals = next_evals
        return output

    def reset(self) -> None:
        """Clear sequence state (learned permanences stay)."""
        self._prev_active = Sdr(self.n_cells)
        self._prev_winners = Sdr(self.n_cells)
        self._prev_predictive = Sdr(self.n_cells)
        self._prev_evals = {}

    # -- persistence ----------------------------------------------------------

    def to_state(self) -> dict:
        return {
            "params": {
                "input_size": self.pattern.input_size,
                "n_columns": self.n_columns,
                "cells_per_column": self.cells_per_column,
                "n_active": self.pattern.n_active,
                "n_synapses": self.pattern.n_synapses,
                "connect_threshold": self.pattern.connect_threshold,
                "delta_inc": self.pattern.delta_inc,
                "delta_dec": self.pattern.delta_dec,
                "min_overlap": self.pattern.min_overlap,
                "boost_strength": self.pattern.boost_strength,
                "duty_period": self.pattern.duty_period,
                "alpha": self.alpha,
                "beta": self.beta,
                "beta_sub": self.beta_sub,
                "alpha_inh": self.alpha_inh,
                "gamma_p": self.gamma_p,
                "gamma_inh": self.gamma_inh,
                "dtau_vert": self.dtau_vert if math.isfinite(self.dtau_vert) else "inf",
                "predictive_threshold": self.predictive_threshold,
                "synapses_per_segment": self.synapses_per_segment,
                "segments_per_cell": self.segments_per_cell,
                "activation_threshold": self.activation_threshold,
                "min_match_threshold": self.min_match_threshold,
                "spike_size": self.spike_size,
                "sigma_inc": self.sigma_inc,
                "sigma_dec": self.sigma_dec,
                "sigma_punish": self.sigma_punish,
                "initial_segment_permanence": self.initial_segment_permanence,
                "column_score_mode": self.column_score_mode,
                "blank_winner": self.blank_winner,
            },
            "pattern": self.pattern.to_state(),
            "segments": [
                [
                    cell,
                    [
                        {
                            "sources": seg.sources,
                            "permanences": seg.permanences,
                            "activation_threshold": seg.activation_threshold,
                            "spike_size": seg.spike_size,
                        }
                        for seg in segs
                    ],
                ]
                for cell, segs in sorted(self.segments.items())
            ],
            "prev_active": list(self._prev_active.active),
            "prev_winners": list(self._prev_winners.active),
            "prev_predictive": list(self._prev_predictive.active),
            "rng": self._rng.bit_generator.state,
        }

    @classmethod
    def from_state(cls, state: dict) -> "TmLayer":
        params = dict(state["params"])
        dtau = params.get("dtau_vert")
        if dtau == "inf":
            params["dtau_vert"] = math.inf
        layer = cls(**params)
        layer.pattern._restore_state(state["pattern"])
        layer.segments = {}
        for cell, segs in state["segments"]:
            rebuilt = []
            for seg in segs:
                perms = seg["permanences"]
                if perms and (min(perms) < 0.0 or max(perms) > 1.0):
                    raise ValueError("segment permanences outside [0, 1]")
                rebuilt.append(
                    DistalSegment(
                        seg["sources"],
                        perms,
                        connect_threshold=layer.pattern.connect_threshold,
                        activation_threshold=seg["activation_threshold"],
                        spike_size=seg["spike_size"],
                    )
                )
            layer.segments[int(cell)] = rebuilt
        layer._prev_active = Sdr(layer.n_cells, state["prev_active"])
        layer._prev_winners = Sdr(layer.n_cells, state["prev_winners"])
        layer._prev_predictive = Sdr(layer.n_cells, state["prev_predictive"])
        layer._rng.bit_generator.state = state["rng"]
        layer._prev_evals = layer._eval_segments(layer._prev_active.active_set)
        return layer


def representation_views(output: LayerOutput) -> dict:
    """Simultaneous read-outs of one step at every level of detail."""
    n = output.active_cells.universe_size // output.active_columns.universe_size
    n_columns = output.active_columns.universe_size

    def columns_of(cells: Sdr) -> Sdr:
        return Sdr(n_columns, sorted({c // n for c in cells}))

    ordered = tuple(
        e for e in output.firing_sequence if e.kind in (P_PRED, P_BURST)
    )
    return {
        "columnar": output.active_columns,
        "cellular": output.active_cells,
        "pred_columnar": columns_of(output.predicted_cells),
        "burst_columnar": columns_of(output.burst_cells),
        "pred_cellular": output.predicted_cells,
        "burst_cellular": output.burst_cells,
        "ordered": ordered,
    }


def capacity(n_cols: int, k: int, cells: int) -> dict:
    """log10 counts of distinct codes at each representation level.

    Columnar capacity is C(n_cols, k); each columnar code can appear in
    cells**k contexts; the cellular capacity is their product. Computed via
    log-gamma so huge counts never overflow.
    """
    if k > n_cols:
        raise ValueError(f"k must be <= n_cols, got k={k}, n_cols={n_cols}")
    if k < 0 or cells < 1:
        raise ValueError("need k >= 0 and cells >= 1")
    ln10 = math.log(10.0)
    columnar = (
        math.lgamma(n_cols + 1) - math.lgamma(k + 1) - math.lgamma(n_cols - k + 1)
    ) / ln10
    contexts = k * math.log10(cells)
    return {"columnar": columnar, "contexts": contexts, "cellular": columnar + contexts}
