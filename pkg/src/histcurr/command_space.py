"""Discretized 3-D command-velocity space and the expanding active range.

The command space covers (v_x, v_y, omega_z) on a normalized box (default
[-1, 1] per axis) split into a regular grid of bins. Bins are addressed by a
single row-major integer id so they can be persisted in checkpoints and fed
to one-hot encoders. Physical units enter through a per-axis linear scale
map: a normalized coordinate u maps to u * scale[axis], where scale defaults
to the active range's caps.

The active range is a symmetric per-axis envelope |v| <= v_max that grows by
a fixed step on success and saturates at the caps. Membership of a bin in
the range is decided by cell/box intersection, not containment, so frontier
bins that only partially overlap the envelope stay samplable.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import AddressingError, SamplingError

BinCoords = tuple[int, int, int]

_AXES = ("x", "y", "z")


def _as_vec3(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have exactly 3 components, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class CommandGrid:
    """Regular grid over the normalized command box.

    axis_bins: bin counts (n_x, n_y, n_z), all positive.
    domain: shared per-axis closed interval, default [-1, 1].
    """

    axis_bins: tuple[int, int, int] = (20, 10, 20)
    domain: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if len(self.axis_bins) != 3 or any(int(n) <= 0 for n in self.axis_bins):
            raise ValueError(f"axis_bins must be three positive integers, got {self.axis_bins}")
        lo, hi = self.domain
        if not (lo < hi):
            raise ValueError(f"domain must be a non-empty interval, got {self.domain}")
        object.__setattr__(self, "axis_bins", tuple(int(n) for n in self.axis_bins))

    @property
    def n_bins(self) -> int:
        nx, ny, nz = self.axis_bins
        return nx * ny * nz

    @property
    def cell_widths(self) -> np.ndarray:
        lo, hi = self.domain
        return (hi - lo) / np.asarray(self.axis_bins, dtype=float)


@dataclass(frozen=True)
class Command:
    """A sampled command: forward velocity, lateral velocity, yaw rate."""

    v_x: float
    v_y: float
    omega_z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v_x, self.v_y, self.omega_z], dtype=float)


@dataclass(frozen=True)
class ActiveRange:
    """Symmetric per-axis command envelope with capped expansion.

    v_max: current half-widths (physical units), 0 < v_max <= cap per axis.
    cap: absolute per-axis limits.
    step: per-axis increment applied on success.
    """

    v_max: np.ndarray
    cap: np.ndarray
    step: np.ndarray = field(default_factory=lambda: np.array([0.5, 0.5, 0.5]))

    def __post_init__(self):
        object.__setattr__(self, "v_max", _as_vec3(self.v_max, "v_max"))
        object.__setattr__(self, "cap", _as_vec3(self.cap, "cap"))
        object.__setattr__(self, "step", _as_vec3(self.step, "step"))
        if np.any(self.v_max <= 0):
            raise ValueError(f"v_max must be positive on every axis, got {self.v_max}")
        if np.any(self.v_max > self.cap + 1e-12):
            raise ValueError(f"v_max {self.v_max} exceeds cap {self.cap}")
        if np.any(self.step <= 0):
            raise ValueError(f"step must be positive on every axis, got {self.step}")


def linear_index(coords: BinCoords, grid: CommandGrid) -> int:
    """Row-major bin id: x outer, z inner. Fixed because ids are persisted."""
    nx, ny, nz = grid.axis_bins
    ix, iy, iz = coords
    if not (0 <= ix < nx and 0 <= iy < ny and 0 <= iz < nz):
        raise AddressingError(f"coords {coords} out of range for grid {grid.axis_bins}")
    return ix * (ny * nz) + iy * nz + iz


def coords_of(bin_id: int, grid: CommandGrid) -> BinCoords:
    """Inverse of linear_index."""
    nx, ny, nz = grid.axis_bins
    n = grid.n_bins
    if not (0 <= bin_id < n):
        raise AddressingError(f"bin id {bin_id} out of range [0, {n})")
    ix, rem = divmod(int(bin_id), ny * nz)
    iy, iz = divmod(rem, nz)
    return (ix, iy, iz)


def bin_cell(bin_id: int, grid: CommandGrid) -> np.ndarray:
    """Closed per-axis interval box of a bin, shape (3, 2) as [lo, hi] rows."""
    lo, hi = grid.domain
    widths = grid.cell_widths
    coords = np.asarray(coords_of(bin_id, grid), dtype=float)
    lows = lo + coords * widths
    return np.stack([lows, lows + widths], axis=1)


def bin_center(bin_id: int, grid: CommandGrid) -> np.ndarray:
    cell = bin_cell(bin_id, grid)
    return cell.mean(axis=1)


def all_bin_centers(grid: CommandGrid) -> np.ndarray:
    """Centers of every bin in id order, shape (N, 3). Used by oracles."""
    lo, _ = grid.domain
    widths = grid.cell_widths
    nx, ny, nz = grid.axis_bins
    cx = lo + (np.arange(nx) + 0.5) * widths[0]
    cy = lo + (np.arange(ny) + 0.5) * widths[1]
    cz = lo + (np.arange(nz) + 0.5) * widths[2]
    gx, gy, gz = np.meshgrid(cx, cy, cz, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


def one_hot(bin_id: int, grid: CommandGrid) -> np.ndarray:
    """Binary indicator vector of length N with a single 1 at bin_id."""
    n = grid.n_bins
    if not (0 <= bin_id < n):
        raise AddressingError(f"bin id {bin_id} out of range [0, {n})")
    vec = np.zeros(n, dtype=float)
    vec[bin_id] = 1.0
    return vec


def expand_range(r: ActiveRange, success: bool) -> ActiveRange:
    """Grow the envelope by one step per axis on success, saturating at cap."""
    if not success:
        return r
    return ActiveRange(v_max=np.minimum(r.v_max + r.step, r.cap), cap=r.cap, step=r.step)


def _resolve_scale(r: ActiveRange, scale) -> np.ndarray:
    if scale is None:
        return r.cap
    arr = _as_vec3(scale, "scale")
    if np.any(arr <= 0):
        raise ValueError(f"scale must be positive per axis, got {arr}")
    return arr


def bins_in_range(grid: CommandGrid, r: ActiveRange, scale=None) -> np.ndarray:
    """Ids of bins whose physical cell intersects the +-v_max box, ascending.

    scale maps normalized units to physical ones (physical = normalized *
    scale); it defaults to the range caps so the grid domain spans exactly
    [-cap, cap]. Touching the box boundary counts as intersecting.
    """
    scale_vec = _resolve_scale(r, scale)
    lo, _ = grid.domain
    widths = grid.cell_widths
    masks = []
    for axis in range(3):
        n = grid.axis_bins[axis]
        edges_lo = (lo + np.arange(n) * widths[axis]) * scale_vec[axis]
        edges_hi = edges_lo + widths[axis] * scale_vec[axis]
        masks.append((edges_lo <= r.v_max[axis]) & (edges_hi >= -r.v_max[axis]))
    ok = masks[0][:, None, None] & masks[1][None, :, None] & masks[2][None, None, :]
    ids = np.flatnonzero(ok.ravel())
    if ids.size == 0:
        raise SamplingError(
            f"no bins intersect the active range v_max={r.v_max}; check grid/scale configuration"
        )
    return ids


def sample_command(
    bin_id: int, grid: CommandGrid, r: ActiveRange, rng: np.random.Generator, scale=None
) -> Command:
    """Draw a command uniformly from (bin cell intersect +-v_max), physical units.

    Axes are drawn in x, y, z order; callers relying on determinism must not
    reorder. A zero-width intersection on an axis collapses to the boundary
    value.
    """
    scale_vec = _resolve_scale(r, scale)
    cell = bin_cell(bin_id, grid) * scale_vec[:, None]
    lows = np.maximum(cell[:, 0], -r.v_max)
    highs = np.minimum(cell[:, 1], r.v_max)
    if np.any(lows > highs + 1e-12):
        raise SamplingError(
            f"bin {bin_id} does not intersect the active range v_max={r.v_max}"
        )
    values = [lows[a] if lows[a] >= highs[a] else rng.uniform(lows[a], highs[a]) for a in range(3)]
    return Command(v_x=float(values[0]), v_y=float(values[1]), omega_z=float(values[2]))


class SuccessGate:
    """Windowed success test driving range expansion.

    Records one scalar utility per episode; passes when the window is full
    and its mean reaches the threshold. Window length and threshold are
    configuration, not fixed constants.
    """

    def __init__(self, window: int = 50, threshold: float = 0.8):
        if window <= 0:
            raise ValueError(f"window must be positive, got {window}")
        self.window = int(window)
        self.threshold = float(threshold)
        self._values: deque[float] = deque(maxlen=self.window)

    def record(self, value: float) -> None:
        self._values.append(float(value))

    def mean(self) -> float:
        if not self._values:
            return 0.0
        return float(sum(self._values) / len(self._values))

    def passes(self) -> bool:
        return len(self._values) == self.window and self.mean() >= self.threshold

    def state_dict(self) -> dict:
        return {"values": list(self._values)}

    def load_state_dict(self, state: dict) -> None:
        self._values = deque(state["values"], maxlen=self.window)
