"""Hexagonal multi-site layout, tri-sector geometry, uniform UE drops.

Sites sit on a hexagonal grid with the center site at the origin; ring r
contributes 6r sites. UEs are dropped uniformly inside the hexagonal cell
of their site and belong to the sector whose boresight is angularly
closest (a 360/n_sectors wedge).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PlacementError(RuntimeError):
    """UE placement failed after the bounded retry budget."""


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class SectorId:
    site_index: int
    sector_index: int
    azimuth_deg: float


@dataclass(frozen=True)
class Layout:
    sites: tuple
    sectors: tuple
    isd_m: float
    rings: int
    sectors_per_site: int

    @property
    def n_sites(self) -> int:
        return len(self.sites)


def wrap_angle_deg(angle: float) -> float:
    """Wrap an angle to (-180, 180]."""
    wrapped = (angle + 180.0) % 360.0 - 180.0
    return 180.0 if wrapped == -180.0 else wrapped


def build_hex_layout(isd_m: float, rings: int, sectors_per_site: int = 3,
                     azimuth_offset_deg: float = 30.0,
                     site_height_m: float = 20.0) -> Layout:
    """Hexagonal grid of 1 + 3*rings*(rings+1) sites with sectored antennas."""
    if isd_m <= 0:
        raise ValueError("isd_m must be positive")
    if rings < 0:
        raise ValueError("rings must be >= 0")
    if sectors_per_site < 1:
        raise ValueError("sectors_per_site must be >= 1")

    half_sqrt3 = math.sqrt(3.0) / 2.0
    coords = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            s = -q - r
            dist = max(abs(q), abs(r), abs(s))
            if dist <= rings:
                x = isd_m * (q + r / 2.0)
                y = isd_m * r * half_sqrt3
                coords.append((dist, math.atan2(y, x) % (2.0 * math.pi), q, r, x, y))
    coords.sort()

    sites = tuple(Position(x, y, site_height_m) for _, _, _, _, x, y in coords)
    step = 360.0 / sectors_per_site
    sectors = tuple(
        SectorId(i, k, (azimuth_offset_deg + step * k) % 360.0)
        for i in range(len(sites))
        for k in range(sectors_per_site)
    )
    return Layout(sites=sites, sectors=sectors, isd_m=isd_m, rings=rings,
                  sectors_per_site=sectors_per_site)


def _in_hexagon(dx: float, dy: float, isd_m: float) -> bool:
    # Voronoi cell of the grid: apothem isd/2 toward the six neighbors.
    apothem = isd_m / 2.0
    for k in range(6):
        ang = math.radians(60.0 * k)
        if dx * math.cos(ang) + dy * math.sin(ang) > apothem:
            return False
    return True


def drop_ues(layout: Layout, ues_per_sector: int, min_dist_m: float,
             rng: np.random.Generator, rx_height_m: float = 1.5) -> list:
    """Drop `ues_per_sector` UEs uniformly in every sector region.

    Positions come back sector-major (all of sector 0, then sector 1, ...)
    matching layout.sectors order; every UE keeps at least `min_dist_m`
    horizontal distance from every site.
    """
    if ues_per_sector < 0:
        raise ValueError("ues_per_sector must be >= 0")
    if min_dist_m < 0:
        raise ValueError("min_dist_m must be >= 0")
    if min_dist_m >= layout.isd_m / 2.0 and ues_per_sector > 0:
        raise ValueError("min_dist_m must be smaller than the sector radius")
    if ues_per_sector == 0:
        return []

    radius = layout.isd_m / math.sqrt(3.0)  # hexagon circumradius
    half_wedge = 180.0 / layout.sectors_per_site
    site_xy = np.array([[s.x, s.y] for s in layout.sites])
    min_d2 = min_dist_m * min_dist_m

    positions = []
    budget_per_ue = 100_000
    for sector in layout.sectors:
        site = layout.sites[sector.site_index]
        placed = 0
        attempts = 0
        budget = budget_per_ue * ues_per_sector
        while placed < ues_per_sector:
            attempts += 1
            if attempts > budget:
                raise PlacementError(
                    f"could not place {ues_per_sector} UEs in site "
                    f"{sector.site_index} sector {sector.sector_index} "
                    f"after {budget} attempts"
                )
            dx = rng.uniform(-radius, radius)
            dy = rng.uniform(-radius, radius)
            if not _in_hexagon(dx, dy, layout.isd_m):
                continue
            bearing = math.degrees(math.atan2(dy, dx))
            if abs(wrap_angle_deg(bearing - sector.azimuth_deg)) > half_wedge:
                continue
            x, y = site.x + dx, site.y + dy
            d2 = np.min((site_xy[:, 0] - x) ** 2 + (site_xy[:, 1] - y) ** 2)
            if d2 < min_d2:
                continue
            positions.append(Position(x, y, rx_height_m))
            placed += 1
    return positions


def angles(sector: SectorId, site: Position, ue: Position) -> tuple:
    """(horizontal_offset, vertical_offset) of the UE seen from a sector.

    horizontal_offset is the UE bearing minus the sector azimuth, wrapped
    to (-180, 180]. vertical_offset is positive when the UE sits below the
    antenna horizon.
    """
    dx = ue.x - site.x
    dy = ue.y - site.y
    horizontal = math.hypot(dx, dy)
    if horizontal == 0.0:
        raise ValueError("zero horizontal distance between UE and site")
    h_off = wrap_angle_deg(math.degrees(math.atan2(dy, dx)) - sector.azimuth_deg)
    v_off = math.degrees(math.atan2(site.z - ue.z, horizontal))
    return h_off, v_off


def horizontal_distance_m(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def layout_csv(layout: Layout, ue_positions=()) -> str:
    """CSV dump of site/sector/UE coordinates for plotting."""
    lines = ["kind,index,site_index,sector_index,x,y,z,azimuth_deg"]
    for i, site in enumerate(layout.sites):
        lines.append(f"site,{i},{i},,{site.x:.12g},{site.y:.12g},{site.z:.12g},")
    for j, sector in enumerate(layout.sectors):
        site = layout.sites[sector.site_index]
        lines.append(
            f"sector,{j},{sector.site_index},{sector.sector_index},"
            f"{site.x:.12g},{site.y:.12g},{site.z:.12g},{sector.azimuth_deg:.12g}"
        )
    for u, ue in enumerate(ue_positions):
        lines.append(f"ue,{u},,,{ue.x:.12g},{ue.y:.12g},{ue.z:.12g},")
    return "\n".join(lines) + "\n"
