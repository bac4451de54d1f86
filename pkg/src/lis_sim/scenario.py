"""Indoor scenario geometry: room, wall-mounted antenna panels, user placement.

The room is an axis-aligned box footprint (x along the length, y along the
width, z up). Panels are mounted flush on the two long walls (y = 0 and
y = width), split evenly between them, facing each other across the room.
Users sit on a horizontal plane and keep a 10-wavelength clearance from
every wall.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0

# users stay this many wavelengths away from every wall
WALL_CLEARANCE_WAVELENGTHS = 10.0

DEFAULT_PLANE_HEIGHT_M = 1.5


@dataclass(frozen=True)
class RoomSpec:
    """Rectangular room footprint plus the carrier that fixes the wavelength."""

    length_m: float = 30.0
    width_m: float = 20.0
    carrier_hz: float = 3.2e9

    def __post_init__(self):
        if self.length_m <= 0 or self.width_m <= 0:
            raise ValueError("room dimensions must be positive")
        if self.carrier_hz <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @classmethod
    def from_dict(cls, d: dict) -> "RoomSpec":
        return cls(
            length_m=float(d.get("length_m", 30.0)),
            width_m=float(d.get("width_m", 20.0)),
            carrier_hz=float(d.get("carrier_hz", 3.2e9)),
        )


@dataclass(frozen=True)
class PanelSpec:
    """One rectangular antenna panel.

    origin is the lower-left antenna position; the grid extends `cols`
    antennas along `width_dir` and `rows` antennas upward (+z), all spaced
    `spacing_m` apart. `normal` points into the room.
    """

    origin: tuple[float, float, float]
    normal: tuple[float, float, float]
    rows: int
    cols: int
    spacing_m: float
    width_dir: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("panel must have at least one row and one column")
        if self.spacing_m <= 0:
            raise ValueError("antenna spacing must be positive")
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-12:
            raise ValueError("panel normal must be a unit vector")

    @property
    def n_antennas(self) -> int:
        return self.rows * self.cols

    def antenna_positions(self) -> np.ndarray:
        """(rows*cols, 3) antenna positions, row-major from the lower-left."""
        o = np.asarray(self.origin, dtype=float)
        w = np.asarray(self.width_dir, dtype=float)
        up = np.array([0.0, 0.0, 1.0])
        i, j = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        offsets = (
            j.reshape(-1, 1) * self.spacing_m * w
            + i.reshape(-1, 1) * self.spacing_m * up
        )
        return o + offsets


@dataclass(frozen=True)
class AntennaArray:
    """All antennas of the deployment, panel-major.

    positions: (M, 3), normals: (M, 3), panel_index: (M,) int.
    Rows [p*N : (p+1)*N] of any channel matrix built from this array belong
    to panel p.
    """

    positions: np.ndarray
    normals: np.ndarray
    panel_index: np.ndarray
    panel_count: int
    antennas_per_panel: int
    panels: tuple[PanelSpec, ...] = field(default=(), repr=False)

    @property
    def total_antennas(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class UePlacement:
    """K user positions on a common horizontal plane."""

    positions: np.ndarray
    plane_height_m: float

    @property
    def n_users(self) -> int:
        return self.positions.shape[0]


def _panel_shape(antennas_per_panel: int) -> tuple[int, int]:
    """(rows, cols) for one panel: square for even powers of two, else 2:1
    with the longer side along the wall."""
    n = antennas_per_panel
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(
            f"antennas per panel must be a power of two, got {n}"
        )
    e = n.bit_length() - 1
    rows = 1 << (e // 2)
    cols = n // rows
    return rows, cols


def build_wall_layout(
    room: RoomSpec,
    total_antennas: int,
    panel_count: int,
    plane_height_m: float = DEFAULT_PLANE_HEIGHT_M,
    spacing_m: float | None = None,
) -> AntennaArray:
    """Mount `panel_count` equal panels on the two long walls.

    A single panel sits centered on one long wall; otherwise half the panels
    go on each wall with equidistant centers (half-gaps at the wall ends), so
    each panel faces one on the opposite wall. Panels rest on the user plane
    and extend upward.
    """
    if panel_count < 1:
        raise ValueError("panel_count must be >= 1")
    if total_antennas % panel_count != 0:
        raise ValueError(
            f"total_antennas={total_antennas} not divisible by panel_count={panel_count}"
        )
    if panel_count >= 2 and panel_count % 2 != 0:
        raise ValueError(
            "panel_count must be 1 or even so both long walls carry the same"
            f" number of panels, got {panel_count}"
        )
    per_panel = total_antennas // panel_count
    rows, cols = _panel_shape(per_panel)
    if spacing_m is None:
        spacing_m = room.wavelength_m / 2.0

    per_wall = 1 if panel_count == 1 else panel_count // 2
    center_pitch = room.length_m / per_wall
    panel_width = (cols - 1) * spacing_m
    if panel_width >= center_pitch:
        raise ValueError(
            f"panels of width {panel_width:.3f} m overlap at a center pitch of"
            f" {center_pitch:.3f} m along a {room.length_m:.3f} m wall"
        )

    centers_x = (np.arange(per_wall) + 0.5) * center_pitch
    walls = [(0.0, (0.0, 1.0, 0.0))]
    if panel_count >= 2:
        walls.append((room.width_m, (0.0, -1.0, 0.0)))

    panels = []
    for wall_y, normal in walls:
        for cx in centers_x:
            origin = (cx - panel_width / 2.0, wall_y, plane_height_m)
            panels.append(
                PanelSpec(origin=origin, normal=normal, rows=rows, cols=cols,
                          spacing_m=spacing_m)
            )

    positions = np.concatenate([p.antenna_positions() for p in panels])
    normals = np.concatenate(
        [np.tile(np.asarray(p.normal, dtype=float), (p.n_antennas, 1)) for p in panels]
    )
    panel_index = np.repeat(np.arange(len(panels)), per_panel)
    return AntennaArray(
        positions=positions,
        normals=normals,
        panel_index=panel_index,
        panel_count=panel_count,
        antennas_per_panel=per_panel,
        panels=tuple(panels),
    )


def place_users(
    room: RoomSpec,
    k: int,
    plane_height_m: float = DEFAULT_PLANE_HEIGHT_M,
    rng_seed=0,
) -> UePlacement:
    """Draw k user positions uniformly over the wall-clearance rectangle."""
    if k < 1:
        raise ValueError("need at least one user")
    inset = WALL_CLEARANCE_WAVELENGTHS * room.wavelength_m
    if room.length_m <= 2 * inset or room.width_m <= 2 * inset:
        raise ValueError(
            f"room {room.length_m} x {room.width_m} m leaves no admissible user"
            f" area at a wall clearance of {inset:.3f} m"
        )
    rng = np.random.default_rng(rng_seed)
    x = rng.uniform(inset, room.length_m - inset, size=k)
    y = rng.uniform(inset, room.width_m - inset, size=k)
    z = np.full(k, plane_height_m)
    return UePlacement(positions=np.column_stack([x, y, z]),
                       plane_height_m=plane_height_m)


def write_geometry_csv(array: AntennaArray, path) -> None:
    """Dump antenna positions and normals for external plotting."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["antenna_id", "panel_id", "x", "y", "z", "nx", "ny", "nz"])
        for m in range(array.total_antennas):
            coords = [float(v) for v in array.positions[m]] + \
                     [float(v) for v in array.normals[m]]
            w.writerow([m, int(array.panel_index[m])] + [repr(v) for v in coords])


def panel_centers(array: AntennaArray) -> np.ndarray:
    """(P, 3) mean antenna position per panel."""
    return np.stack([
        array.positions[array.panel_index == p].mean(axis=0)
        for p in range(array.panel_count)
    ])


def snr_db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)
