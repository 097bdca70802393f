"""Exact computation on finite boxes by a column-by-column transfer scan.

Independent sets of a W x H box are encoded one column at a time as height-H
bitmasks with no two adjacent bits (Fibonacci-many per height; 17711 at
height 20).  A forward scan accumulates the partition weight of every prefix
per end-column mask; a matching backward scan turns the same tables into
exact single-site marginals and an exact sequential sampler.  Each column is
rescaled by its maximum while the log of the scale factors accumulates, so
no intermediate ever leaves double range.

Columns talk to each other only through mask disjointness.  Up to height 17
that relation is a cached dense 0/1 matrix and the transition is one matvec;
above, the same sum is taken with a subset-sum sweep over all 2^H patterns,
which stays well inside memory up to the height cap of 24.

A vanishing activity (scale 0 or a deleted site) simply forbids the bit, so
a box with dead sites equals the box with those sites removed.  Occupied
frame sites of the boundary condition forbid the adjacent in-box bits the
same way.  The all-empty column is always admissible, hence log Z >= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .disorder import ActivityField
from .errors import CapacityError
from .lattice import (
    BoundaryCondition,
    FREE_BC,
    LatticeBox,
    Site,
    as_boundary_condition,
    neighbours,
)

MAX_HEIGHT = 24
_DENSE_MASK_LIMIT = 4200  # dense disjointness above this would cost ~150 MB


@lru_cache(maxsize=None)
def _mask_table(height: int) -> tuple[np.ndarray, np.ndarray | None]:
    masks = np.array(
        [m for m in range(1 << height) if (m & (m << 1)) == 0], dtype=np.int64
    )
    masks.setflags(write=False)
    compat: np.ndarray | None = None
    if len(masks) <= _DENSE_MASK_LIMIT:
        compat = (np.bitwise_and.outer(masks, masks) == 0).astype(np.float64)
        compat.setflags(write=False)
    return masks, compat


def _disjoint_sum(
    v: np.ndarray, masks: np.ndarray, compat: np.ndarray | None, height: int
) -> np.ndarray:
    """out[m'] = sum of v[m] over masks m sharing no bit with m'."""
    if compat is not None:
        return compat @ v
    full = np.zeros(1 << height)
    full[masks] = v
    for b in range(height):
        g = full.reshape(-1, 2, 1 << b)
        g[:, 1, :] += g[:, 0, :]
    return full[((1 << height) - 1) ^ masks]


def _column_data(
    box: LatticeBox, field: ActivityField, bc: BoundaryCondition
) -> tuple[np.ndarray, list[int]]:
    """Effective activities (W x H) and per-column forbidden-bit masks."""
    if not field.region.contains_box(box):
        raise ValueError("box must lie inside the field region")
    if box.height > MAX_HEIGHT:
        raise CapacityError(f"box height is capped at {MAX_HEIGHT}")
    w, h = box.width, box.height
    ax = box.x_min - field.region.x_min
    ay = box.y_min - field.region.y_min
    acts = field.scale * field.values[ax : ax + w, ay : ay + h]
    forbidden = [0] * w
    for ix in range(w):
        for iy in range(h):
            if acts[ix, iy] == 0.0:
                forbidden[ix] |= 1 << iy
    for u in bc.frame_occupied(box, field.is_live):
        for nb in neighbours(u):
            if box.contains(nb):
                forbidden[nb[0] - box.x_min] |= 1 << (nb[1] - box.y_min)
    return acts, forbidden


def _column_weights(
    masks: np.ndarray, acts_col: np.ndarray, forbidden: int
) -> np.ndarray:
    w = ((masks & forbidden) == 0).astype(np.float64)
    for r, a in enumerate(acts_col):
        if a != 1.0:
            w[((masks >> r) & 1) == 1] *= a
    return w


@dataclass(frozen=True)
class LogPartitionResult:
    log_z: float
    is_zero: bool = False


@dataclass(frozen=True)
class MarginalTable:
    """Occupation probability per site of one (box, field, bc) instance."""

    box: LatticeBox
    probs: dict[Site, float]

    def __getitem__(self, v: Site) -> float:
        return self.probs[v]


class _Scan:
    """Shared forward/backward machinery for one instance."""

    def __init__(self, box: LatticeBox, field: ActivityField, bc: BoundaryCondition):
        self.box = box
        self.height = box.height
        self.masks, self.compat = _mask_table(box.height)
        acts, forb = _column_data(box, field, bc)
        self.weights = [
            _column_weights(self.masks, acts[ix], forb[ix]) for ix in range(box.width)
        ]

    def _step(self, v: np.ndarray) -> np.ndarray:
        return _disjoint_sum(v, self.masks, self.compat, self.height)

    def forward(self) -> tuple[list[np.ndarray], float]:
        """Rescaled prefix vectors per column and the accumulated log scale."""
        alphas: list[np.ndarray] = []
        log_scale = 0.0
        v: np.ndarray | None = None
        for w in self.weights:
            v = w.copy() if v is None else w * self._step(v)
            m = float(v.max())
            if m <= 0.0:
                raise AssertionError("empty column lost admissibility")
            v = v / m
            log_scale += math.log(m)
            alphas.append(v)
        return alphas, log_scale

    def backward(self) -> list[np.ndarray]:
        """Rescaled suffix vectors; the last column's is all ones."""
        betas = [np.ones_like(self.weights[-1])]
        for w in reversed(self.weights[1:]):
            b = self._step(w * betas[0])
            betas.insert(0, b / b.max())
        return betas


def log_partition(
    box: LatticeBox, field: ActivityField, bc: BoundaryCondition | str = FREE_BC
) -> LogPartitionResult:
    """log of the partition sum over admissible occupation patterns."""
    scan = _Scan(box, field, as_boundary_condition(bc))
    alphas, log_scale = scan.forward()
    total = float(alphas[-1].sum())
    if total <= 0.0:
        return LogPartitionResult(-math.inf, True)
    return LogPartitionResult(math.log(total) + log_scale, False)


def occupation_probabilities(
    box: LatticeBox, field: ActivityField, bc: BoundaryCondition | str = FREE_BC
) -> MarginalTable:
    """Exact single-site occupation probabilities for all box sites."""
    scan = _Scan(box, field, as_boundary_condition(bc))
    alphas, _ = scan.forward()
    betas = scan.backward()
    masks = scan.masks
    bit_rows = [((masks >> r) & 1) == 1 for r in range(box.height)]
    probs: dict[Site, float] = {}
    for ix in range(box.width):
        col_mass = alphas[ix] * betas[ix]
        den = float(col_mass.sum())
        for iy in range(box.height):
            num = float(col_mass[bit_rows[iy]].sum())
            probs[(box.x_min + ix, box.y_min + iy)] = num / den
    return MarginalTable(box, probs)


def occupation_probability(
    box: LatticeBox,
    field: ActivityField,
    v: Site,
    bc: BoundaryCondition | str = FREE_BC,
) -> float:
    if not box.contains(v):
        raise ValueError("site lies outside the box")
    return occupation_probabilities(box, field, bc)[v]


def local_expectation(
    box: LatticeBox,
    inner: LatticeBox,
    field: ActivityField,
    bc: BoundaryCondition | str = FREE_BC,
) -> float:
    """Mean weight of the inner occupation pattern under the switched-off
    measure: exp(log Z(field) - log Z(field with inner values set to 1))."""
    if not box.contains_box(inner):
        raise ValueError("inner box must lie inside the computation box")
    bc = as_boundary_condition(bc)
    on = log_partition(box, field, bc).log_z
    off = log_partition(box, field.switched_off(inner), bc).log_z
    return math.exp(on - off)


def sample_exact(
    box: LatticeBox,
    field: ActivityField,
    bc: BoundaryCondition | str = FREE_BC,
    rng: np.random.Generator | int | None = None,
) -> frozenset[Site]:
    """One exact draw from the finite-volume measure, column by column."""
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    scan = _Scan(box, field, as_boundary_condition(bc))
    betas = scan.backward()
    masks = scan.masks
    occupied: list[Site] = []
    prev = 0
    for ix in range(box.width):
        weights = scan.weights[ix] * betas[ix]
        if ix > 0:
            weights = weights * ((masks & prev) == 0)
        p = weights / weights.sum()
        prev = int(masks[gen.choice(len(masks), p=p)])
        for iy in range(box.height):
            if (prev >> iy) & 1:
                occupied.append((box.x_min + ix, box.y_min + iy))
    return frozenset(occupied)
