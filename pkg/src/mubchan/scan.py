"""Grid scans over qutrit multiplier families and the one-axis plane."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import OneAxisRegions, axis_channel
from .choi import eb_classify, ppt3_closed

NOT_CP = "NotCP"


def fmt(v) -> str:
    """15 significant digits for floats, lowercase booleans."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    return str(v)


@dataclass
class ScanResult:
    family: str
    header: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([r[i] for r in self.rows])

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def to_json(self) -> str:
        def plain(v):
            if isinstance(v, (bool, np.bool_)):
                return bool(v)
            if isinstance(v, (float, np.floating)):
                return float(f"{float(v):.15g}")
            return v

        rows = [{k: plain(v) for k, v in zip(self.header, r)} for r in self.rows]
        return json.dumps({"family": self.family, "metadata": self.metadata, "rows": rows})


# [x, x, -y, -y] at d = 3

PPT_LINE_INTERCEPT = (math.sqrt(3) - 1) / 2
PPT_LINE_SLOPE = math.sqrt(3) - 2


def xxyy_lines() -> list[dict]:
    """Boundaries of the bound-entangled triangle as p x + q y = r."""
    return [
        {"name": "cp", "p": 2.0, "q": 1.0, "r": 1.0},
        {"name": "ccn", "p": 1.0, "q": 1.0, "r": 0.5},
        {"name": "ppt", "p": -PPT_LINE_SLOPE, "q": 1.0, "r": PPT_LINE_INTERCEPT},
    ]


def xxyy_triangle() -> np.ndarray:
    lines = xxyy_lines()
    verts = []
    for i, j in ((0, 1), (1, 2), (0, 2)):
        a = np.array([[lines[i]["p"], lines[i]["q"]], [lines[j]["p"], lines[j]["q"]]])
        verts.append(np.linalg.solve(a, [lines[i]["r"], lines[j]["r"]]))
    return np.array(verts)


def xxyy_point(x: float, y: float) -> tuple:
    lam = [x, x, -y, -y]
    ch = axis_channel(3, lam, checked=False)
    cp_slack = min(ch.cp_slacks().values())
    cp = cp_slack >= -1e-12
    p3 = ppt3_closed(lam)
    t = 2 * (abs(x) + abs(y))
    ccn = t <= 1 + 1e-12
    verdict = eb_classify(ch).verdict if cp else NOT_CP
    return (x, y, cp, p3.is_ppt, ccn, verdict, cp_slack, min(p3.slack_sum, p3.slack_quadratic), 1 - t)


def scan_xxyy(resolution: int) -> ScanResult:
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    grid = np.linspace(0.0, 1.0, resolution)
    rows = [xxyy_point(float(x), float(y)) for x in grid for y in grid]
    meta = {
        "lines": xxyy_lines(),
        "triangle": xxyy_triangle().tolist(),
        "step": 1.0 / (resolution - 1),
    }
    header = ("x", "y", "cp", "ppt", "ccn", "verdict", "slack1", "slack2", "slack3")
    return ScanResult("xxyy", header, rows, meta)


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip(((p - a) @ ab) / (ab @ ab), 0, 1)
    return np.linalg.norm(p - (a + t[:, None] * ab), axis=1)


def distance_to_polygon(points, verts) -> np.ndarray:
    """Euclidean distance from each point to a convex polygon (0 inside)."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(verts)
    dist = np.min([_segment_distance(p, verts[i], verts[(i + 1) % n]) for i in range(n)], axis=0)
    centre = verts.mean(axis=0)
    inside = np.ones(len(p), dtype=bool)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        normal = np.array([b[1] - a[1], a[0] - b[0]])
        side = np.sign((centre - a) @ normal)
        inside &= ((p - a) @ normal) * side >= 0
    return np.where(inside, 0.0, dist)


def hausdorff_to_polygon(points, verts, samples: int = 60) -> float:
    """Hausdorff distance between a point set and a filled convex polygon."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0:
        return math.inf
    d1 = float(distance_to_polygon(points, verts).max())
    # fan-triangulate and sample each triangle on a barycentric grid
    fill = []
    for i in range(1, len(verts) - 1):
        a, b, c = verts[0], verts[i], verts[i + 1]
        for u in range(samples + 1):
            for v in range(samples + 1 - u):
                fill.append(a + (b - a) * u / samples + (c - a) * v / samples)
    fill = np.array(fill)
    d2 = max(float(np.min(np.linalg.norm(points - q, axis=1))) for q in fill)
    return max(d1, d2)


# One symmetry axis: b I + a QC + (1 - a - b) N


def ebnec2(d: int, a: float, b: float, tol: float = 1e-12) -> bool:
    """The piecewise EB inequalities of the one-axis plane."""
    if b > 0:
        return a + (d + 1) * b <= 1 + tol
    return a - (d - 1) * b <= 1 + tol


def one_axis_multiplier(d: int, a: float, b: float) -> np.ndarray:
    lam = np.full(d + 1, b)
    lam[0] += a
    return lam


def one_axis_point(reg: OneAxisRegions, a: float, b: float) -> tuple:
    d = reg.d
    sab, sae, sbe = reg.cp_slacks(a, b)
    cp = reg.is_cp(a, b)
    eb = reg.is_eb(a, b)
    if cp:
        verdict = eb_classify(axis_channel(d, one_axis_multiplier(d, a, b), checked=False)).verdict
    else:
        verdict = NOT_CP
    return (a, b, cp, eb, reg.is_fukuda_multiplicative(a, b), verdict, sab, sae, sbe, reg.eb_slack(a, b))


ONE_AXIS_HEADER = ("a", "b", "cp", "eb", "fukuda_mult", "verdict", "slack_ab", "slack_ae", "slack_be", "slack_eb")


def scan_one_axis(d: int, resolution: int) -> ScanResult:
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    reg = OneAxisRegions(d)
    a_grid = np.linspace(-1 / (d - 1), d / (d - 1), resolution)
    b_grid = np.linspace(-1 / (d - 1), 1.0, resolution)
    rows = [one_axis_point(reg, float(a), float(b)) for a in a_grid for b in b_grid]
    points = {name: list(one_axis_point(reg, *ab)) for name, ab in reg.points().items()}
    meta = {
        "d": d,
        "points": {k: dict(zip(ONE_AXIS_HEADER, v)) for k, v in points.items()},
        "steps": [float(a_grid[1] - a_grid[0]), float(b_grid[1] - b_grid[0])],
    }
    return ScanResult("one_axis", ONE_AXIS_HEADER, rows, meta)


def one_axis_eb_hull(d: int) -> np.ndarray:
    """E, R, Q, Y in counter-clockwise order."""
    pts = OneAxisRegions(d).points()
    return np.array([pts["E"], pts["Y"], pts["Q"], pts["R"]])


# Base tetrahedron: sum(lam) = -1/2 at d = 3


def tetra_multiplier(w) -> np.ndarray:
    """Mixture sum_J w_J Psi_J^X has multiplier (3 w_J - 1) / 2."""
    return (3 * np.asarray(w, dtype=float) - 1) / 2


def _marker(w: np.ndarray) -> str:
    s = sorted(np.round(w, 12))
    if np.allclose(s, [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-12):
        return "XEB"
    if np.allclose(s, [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-12):
        return "YEB"
    return ""


TETRA_HEADER = ("w1", "w2", "w3", "w4", "l1", "l2", "l3", "l4", "ppt", "ccn", "verdict", "slack_ppt", "slack_ccn", "marker")


def scan_base_tetrahedron(resolution: int) -> ScanResult:
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    n = resolution
    rows = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            for k in range(n + 1 - i - j):
                w = np.array([i, j, k, n - i - j - k]) / n
                lam = tetra_multiplier(w)
                sq = float(np.sum(lam**2))
                t = float(np.sum(np.abs(lam)))
                verdict = eb_classify(axis_channel(3, lam, checked=False)).verdict
                rows.append((*w, *lam, sq <= 0.25 + 1e-12, t <= 1 + 1e-12, verdict, 0.25 - sq, 1 - t, _marker(w)))
    # PPT ball: sum lam^2 <= 1/4, centred at lam = -1/8 within the plane
    meta = {"sphere": {"center": [-0.125] * 4, "sum_sq_max": 0.25}}
    return ScanResult("base_tetrahedron", TETRA_HEADER, rows, meta)


def xxyy_disagreements(result: ScanResult) -> int:
    """Grid points whose bound-entangled flag contradicts the analytic triangle.

    Points within one grid step of an edge are not counted.
    """
    verts = xxyy_triangle()
    step = result.metadata["step"]
    xy = np.c_[result.column("x").astype(float), result.column("y").astype(float)]
    flagged = result.column("verdict") == "BoundEntangled"
    inside = distance_to_polygon(xy, verts) == 0
    n = len(verts)
    edge = np.min([_segment_distance(xy, verts[i], verts[(i + 1) % n]) for i in range(n)], axis=0)
    return int(np.sum((flagged != inside) & (edge > step)))
