# mesh.py

"""Unstructured polygonal meshes: cells, faces, normals, ghost indexing.

Faces are stored once.  The stored normal points from the owner cell to the
neighbor; the neighbor sees the same face with the opposite normal.  Every
boundary face gets one ghost cell, indexed after the interior cells, so that
flux kernels never special-case the boundary.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .exceptions import MeshFormatError

# Boundary side tags for rectangular domains.
LEFT, RIGHT, BOTTOM, TOP = 0, 1, 2, 3
SIDE_NAMES = ("left", "right", "bottom", "top")


@dataclass
class Mesh:
    """Polygonal mesh with ghost cells behind every boundary face.

    Cell indices 0..n_cells-1 are interior; n_cells..n_cells+n_ghost-1 are
    ghost cells, one per boundary face in the order of ``boundary_faces``.
    """

    vertices: np.ndarray            # (nv, 2)
    cell_vertices: List[np.ndarray]  # per interior cell, ccw vertex ids
    area: np.ndarray                # (n_cells,)
    centroid: np.ndarray            # (n_cells, 2)
    face_owner: np.ndarray          # (nf,)
    face_neighbor: np.ndarray       # (nf,) interior id or ghost id >= n_cells
    face_normal: np.ndarray         # (nf, 2), unit, owner -> neighbor
    face_length: np.ndarray         # (nf,)
    face_midpoint: np.ndarray       # (nf, 2)
    cell_faces: List[np.ndarray]    # per interior cell, incident face ids
    boundary_faces: np.ndarray      # (n_ghost,) face ids, ghost i sits behind
                                    # boundary_faces[i]
    bbox: np.ndarray = field(default=None)  # (xmin, xmax, ymin, ymax)

    @property
    def n_cells(self) -> int:
        return len(self.area)

    @property
    def n_ghost(self) -> int:
        return len(self.boundary_faces)

    @property
    def n_total(self) -> int:
        return self.n_cells + self.n_ghost

    @property
    def n_faces(self) -> int:
        return len(self.face_length)

    @property
    def interior_faces(self) -> np.ndarray:
        return np.nonzero(self.face_neighbor < self.n_cells)[0]

    def sigma(self, j: int, f: int) -> float:
        """Geometric ratio |face length| / |cell area| for cell j and face f.

        The face must be incident to cell j (as owner or interior neighbor).
        """
        if j < 0 or j >= self.n_cells:
            raise ValueError(f"cell index {j} out of range")
        if self.face_owner[f] != j and self.face_neighbor[f] != j:
            raise ValueError(f"face {f} is not incident to cell {j}")
        return float(self.face_length[f] / self.area[j])

    def boundary_sides(self) -> np.ndarray:
        """Classify each boundary face as LEFT/RIGHT/BOTTOM/TOP.

        Uses the bounding box of the vertices; each boundary face midpoint is
        assigned to the nearest box side.
        """
        xmin, xmax, ymin, ymax = self.bbox
        mid = self.face_midpoint[self.boundary_faces]
        d = np.stack([
            np.abs(mid[:, 0] - xmin),
            np.abs(mid[:, 0] - xmax),
            np.abs(mid[:, 1] - ymin),
            np.abs(mid[:, 1] - ymax),
        ])
        return np.argmin(d, axis=0)


def _polygon_area_centroid(pts: np.ndarray):
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if area <= 0.0:
        raise MeshFormatError("cell with non-positive area (vertices must be ccw)")
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def _mesh_from_polygons(vertices: np.ndarray, cells: List[np.ndarray]) -> Mesh:
    """Assemble the face-based connectivity from ccw polygon cells."""
    vertices = np.asarray(vertices, dtype=float)
    n_cells = len(cells)

    areas = np.empty(n_cells)
    centroids = np.empty((n_cells, 2))
    for j, cv in enumerate(cells):
        if len(cv) < 3:
            raise MeshFormatError(f"cell {j} has fewer than 3 vertices")
        areas[j], centroids[j] = _polygon_area_centroid(vertices[cv])

    edge_face = {}       # sorted vertex pair -> face id
    owner, neighbor = [], []
    v0s, v1s = [], []
    cell_faces = [[] for _ in range(n_cells)]
    for j, cv in enumerate(cells):
        for a, b in zip(cv, np.roll(cv, -1)):
            key = (a, b) if a < b else (b, a)
            f = edge_face.get(key)
            if f is None:
                f = len(owner)
                edge_face[key] = f
                owner.append(j)
                neighbor.append(-1)
                v0s.append(a)
                v1s.append(b)
            else:
                if neighbor[f] != -1:
                    raise MeshFormatError(
                        f"face {key} shared by more than two cells")
                if owner[f] == j:
                    raise MeshFormatError(f"cell {j} repeats face {key}")
                neighbor[f] = j
            cell_faces[j].append(f)

    owner = np.array(owner, dtype=np.intp)
    neighbor = np.array(neighbor, dtype=np.intp)
    v0s = np.array(v0s, dtype=np.intp)
    v1s = np.array(v1s, dtype=np.intp)

    p0, p1 = vertices[v0s], vertices[v1s]
    edge = p1 - p0
    length = np.hypot(edge[:, 0], edge[:, 1])
    if np.any(length <= 0.0):
        raise MeshFormatError("zero-length face")
    # ccw orientation of the owner polygon: outward normal is the edge
    # rotated by -90 degrees.
    normal = np.stack([edge[:, 1], -edge[:, 0]], axis=1) / length[:, None]
    midpoint = 0.5 * (p0 + p1)

    bmask = neighbor < 0
    boundary_faces = np.nonzero(bmask)[0]
    neighbor = neighbor.copy()
    neighbor[bmask] = n_cells + np.arange(bmask.sum())

    bbox = np.array([vertices[:, 0].min(), vertices[:, 0].max(),
                     vertices[:, 1].min(), vertices[:, 1].max()])

    mesh = Mesh(
        vertices=vertices,
        cell_vertices=[np.asarray(cv, dtype=np.intp) for cv in cells],
        area=areas,
        centroid=centroids,
        face_owner=owner,
        face_neighbor=neighbor,
        face_normal=normal,
        face_length=length,
        face_midpoint=midpoint,
        cell_faces=[np.array(cf, dtype=np.intp) for cf in cell_faces],
        boundary_faces=boundary_faces,
        bbox=bbox,
    )
    validate_mesh(mesh)
    return mesh


def validate_mesh(mesh: Mesh) -> None:
    """Check the geometric closure and normalization invariants."""
    nrm = np.hypot(mesh.face_normal[:, 0], mesh.face_normal[:, 1])
    if np.any(np.abs(nrm - 1.0) > 1e-14):
        raise MeshFormatError("non-unit face normal")
    if np.any(mesh.area <= 0.0):
        raise MeshFormatError("non-positive cell area")
    # Closed-polygon identity: sum of length-weighted outward normals is zero.
    acc = np.zeros((mesh.n_cells, 2))
    w = mesh.face_length[:, None] * mesh.face_normal
    np.add.at(acc, mesh.face_owner, w)
    interior = mesh.face_neighbor < mesh.n_cells
    np.add.at(acc, mesh.face_neighbor[interior], -w[interior])
    perim = np.zeros(mesh.n_cells)
    np.add.at(perim, mesh.face_owner, mesh.face_length)
    np.add.at(perim, mesh.face_neighbor[interior], mesh.face_length[interior])
    if np.any(np.hypot(acc[:, 0], acc[:, 1]) > 1e-12 * perim):
        raise MeshFormatError("cell faces do not close")


def _grid_vertices(nx, ny, domain):
    xmin, xmax, ymin, ymax = domain
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be >= 1")
    if not (xmax > xmin and ymax > ymin):
        raise ValueError("degenerate domain rectangle")
    xs = np.linspace(xmin, xmax, nx + 1)
    ys = np.linspace(ymin, ymax, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.stack([X.ravel(), Y.ravel()], axis=1)

    def vid(i, j):
        return j * (nx + 1) + i

    return verts, vid


def build_cartesian(nx: int, ny: int, domain=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """Regular nx-by-ny quadrilateral mesh of an axis-aligned rectangle."""
    verts, vid = _grid_vertices(nx, ny, domain)
    cells = []
    for j in range(ny):
        for i in range(nx):
            cells.append(np.array(
                [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)],
                dtype=np.intp))
    return _mesh_from_polygons(verts, cells)


def build_triangulated(nx: int, ny: int, domain=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """Triangular mesh: each cell of the nx-by-ny grid split along one
    fixed diagonal, giving 2*nx*ny triangles."""
    verts, vid = _grid_vertices(nx, ny, domain)
    cells = []
    for j in range(ny):
        for i in range(nx):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            cells.append(np.array([a, b, c], dtype=np.intp))
            cells.append(np.array([a, c, d], dtype=np.intp))
    return _mesh_from_polygons(verts, cells)


def read_mesh(path) -> Mesh:
    """Read the SWMESH text format and validate eagerly.

    Format: line 1 ``SWMESH 1``; line 2 ``<n_vertices> <n_cells>``; one
    ``x y`` per vertex; then one cell per line, ``<n_verts> <v0> <v1> ...``
    with counter-clockwise vertex ordering.  ``#`` starts a comment.
    """
    tokens = []  # (lineno, token)
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0]
            tokens.extend((lineno, t) for t in body.split())

    pos = 0

    def take(n, what, cast):
        nonlocal pos
        if pos + n > len(tokens):
            lineno = tokens[-1][0] if tokens else 0
            raise MeshFormatError(
                f"{path}: unexpected end of file while reading {what} "
                f"(near line {lineno})")
        out = []
        for _ in range(n):
            lineno, tok = tokens[pos]
            pos += 1
            try:
                out.append(cast(tok))
            except ValueError:
                raise MeshFormatError(
                    f"{path}:{lineno}: invalid {what} token {tok!r}")
        return out

    magic = take(2, "header", str)
    if magic != ["SWMESH", "1"]:
        raise MeshFormatError(f"{path}: bad header, expected 'SWMESH 1'")
    nv, nc = take(2, "counts", int)
    if nv < 3 or nc < 1:
        raise MeshFormatError(f"{path}: implausible counts {nv} {nc}")
    coords = take(2 * nv, "vertex coordinate", float)
    verts = np.array(coords, dtype=float).reshape(nv, 2)
    cells = []
    for j in range(nc):
        (k,) = take(1, "cell size", int)
        if k < 3:
            raise MeshFormatError(f"{path}: cell {j} has {k} vertices")
        ids = take(k, "cell vertex id", int)
        if any(v < 0 or v >= nv for v in ids):
            raise MeshFormatError(f"{path}: cell {j} has out-of-range vertex")
        cells.append(np.array(ids, dtype=np.intp))
    if pos != len(tokens):
        lineno, tok = tokens[pos]
        raise MeshFormatError(f"{path}:{lineno}: trailing token {tok!r}")
    return _mesh_from_polygons(verts, cells)


def write_mesh(mesh: Mesh, path) -> None:
    """Write the SWMESH text format (inverse of :func:`read_mesh`)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("SWMESH 1\n")
        fh.write(f"{len(mesh.vertices)} {mesh.n_cells}\n")
        for x, y in mesh.vertices:
            fh.write(f"{x:.17g} {y:.17g}\n")
        for cv in mesh.cell_vertices:
            fh.write(str(len(cv)) + " " + " ".join(str(v) for v in cv) + "\n")
