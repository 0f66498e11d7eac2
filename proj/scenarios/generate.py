#!/usr/bin/env python3
# Copyright 2026 The wtbs-planner Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the bundled synthetic scenarios.

Layouts are given in km from the south-west corner of each bounding box.
Population samples are written at cell centers; empty cells are omitted.
"""

import math
import pathlib

M_PER_DEG_LAT = 111320.0
HERE = pathlib.Path(__file__).resolve().parent


class Grid:
    def __init__(self, center_lat, center_lon, rows, cols, cell_m):
        self.lat0, self.lon0 = center_lat, center_lon
        self.m_per_deg_lon = M_PER_DEG_LAT * math.cos(math.radians(center_lat))
        self.rows, self.cols, self.cell = rows, cols, cell_m
        # a hair under the exact extent so the cell count rounds to rows x cols
        half_y = rows * cell_m / 2 - 1.0
        half_x = cols * cell_m / 2 - 1.0
        self.min_lat = center_lat - half_y / M_PER_DEG_LAT
        self.max_lat = center_lat + half_y / M_PER_DEG_LAT
        self.min_lon = center_lon - half_x / self.m_per_deg_lon
        self.max_lon = center_lon + half_x / self.m_per_deg_lon

    def km_to_geo(self, x_km, y_km):
        x = -self.cols * self.cell / 2 + 1.0 + x_km * 1000
        y = -self.rows * self.cell / 2 + 1.0 + y_km * 1000
        return self.lat0 + y / M_PER_DEG_LAT, self.lon0 + x / self.m_per_deg_lon

    def cell_center_km(self, r, c):
        return ((c + 0.5) * self.cell - 1.0) / 1000, ((r + 0.5) * self.cell - 1.0) / 1000

    def bbox_line(self):
        return f"bbox = {self.min_lat:.7f}, {self.min_lon:.7f}, {self.max_lat:.7f}, {self.max_lon:.7f}"


def population_csv(grid, clusters, floor):
    lines = ["lat,lon,density"]
    populated = 0
    for r in range(grid.rows):
        for c in range(grid.cols):
            x, y = grid.cell_center_km(r, c)
            d = sum(peak * math.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s)) for cx, cy, s, peak in clusters)
            if d < floor:
                continue
            populated += 1
            lat, lon = grid.km_to_geo(x, y)
            lines.append(f"{lat:.7f},{lon:.7f},{round(d, 1)}")
    return "\n".join(lines) + "\n", populated


def sites_csv(grid, rows, with_farm=True):
    head = "id,lat,lon,structure,tech,height_m,power_w,farm_id" if with_farm else "id,lat,lon,structure,tech"
    lines = [head]
    for site_id, x, y, structure, tech, farm in rows:
        lat, lon = grid.km_to_geo(x, y)
        if with_farm:
            lines.append(f"{site_id},{lat:.7f},{lon:.7f},{structure},{tech},,,{farm}")
        else:
            lines.append(f"{site_id},{lat:.7f},{lon:.7f},{structure},{tech}")
    return "\n".join(lines) + "\n"


def write(directory, name, text):
    path = HERE / directory / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def synthetic_france():
    g = Grid(47.2, -0.8, 100, 100, 500.0)
    pop, populated = population_csv(
        g,
        [(15, 20, 4.0, 800.0), (38, 38, 3.0, 600.0), (30, 10, 1.5, 300.0), (8, 40, 2.0, 200.0)],
        floor=25.0,
    )
    sites = [
        ("ct-01", 13.0, 18.0, "CT", "G3", ""),
        ("ct-02", 19.0, 23.0, "CT", "G3", ""),
        ("ct-03", 30.0, 10.5, "CT", "G3", ""),
        ("ct-04", 10.0, 23.0, "CT", "G4", ""),
        ("wt-a1", 24.0, 28.0, "WT", "NONE", "farm-a"),
        ("wt-a2", 24.6, 28.3, "WT", "NONE", "farm-a"),
        ("wt-b1", 8.5, 36.5, "WT", "NONE", "farm-b"),
        ("wt-c1", 33.0, 18.0, "WT", "NONE", "farm-c"),
    ]
    candidates = [
        ("new-1", 37.0, 37.0, "WT", "NONE", ""),
        ("new-2", 40.5, 40.0, "WT", "NONE", ""),
        ("new-3", 46.0, 8.0, "WT", "NONE", ""),
        ("new-4", 4.0, 5.0, "WT", "NONE", ""),
    ]
    cfg = f"""# Synthetic rural area: a town served by sparse 3G towers and one 4G tower,
# unequipped wind farms in between and an unserved village cluster to the north-east.

[scenario]
sites = sites.csv
population = population.csv
candidates = candidates.csv
{g.bbox_line()}
cell_size_m = 500

[environment]
preset = rural

[simulation]
bias = 29
"""
    write("synthetic-france", "scenario.cfg", cfg)
    write("synthetic-france", "population.csv", pop)
    write("synthetic-france", "sites.csv", sites_csv(g, sites))
    write("synthetic-france", "candidates.csv", sites_csv(g, candidates, with_farm=False))
    return populated


def planner_five():
    g = Grid(44.9, -64.6, 40, 40, 250.0)
    pop, populated = population_csv(
        g,
        [(2.5, 7.5, 1.2, 500.0), (7.5, 7.0, 1.0, 400.0), (6.5, 2.5, 1.3, 450.0)],
        floor=20.0,
    )
    sites = [("ct-01", 1.0, 1.0, "CT", "G3", "")]
    candidates = [
        ("cand-1", 2.5, 7.0, "WT", "NONE", ""),
        ("cand-2", 7.3, 7.3, "WT", "NONE", ""),
        ("cand-3", 6.8, 2.8, "WT", "NONE", ""),
        ("cand-4", 5.0, 5.0, "WT", "NONE", ""),
        ("cand-5", 9.5, 0.5, "WT", "NONE", ""),
    ]
    cfg = f"""# Small planning exercise: one 3G tower, three villages and five possible turbine sites.

[scenario]
sites = sites.csv
population = population.csv
candidates = candidates.csv
{g.bbox_line()}
cell_size_m = 250

[simulation]
bias = 29
"""
    write("planner-5", "scenario.cfg", cfg)
    write("planner-5", "population.csv", pop)
    write("planner-5", "sites.csv", sites_csv(g, sites))
    write("planner-5", "candidates.csv", sites_csv(g, candidates, with_farm=False))
    return populated


if __name__ == "__main__":
    print("synthetic-france populated cells:", synthetic_france())
    print("planner-5 populated cells:", planner_five())
