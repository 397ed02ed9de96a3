"""Triangulated spherical receiver.

The surface is an icosahedron subdivided ``level`` times with vertices
projected onto the unit sphere (20 * 4**level faces, near-uniform areas).
Subdivision appends the four children of face ``f`` at indices ``4f..4f+3``,
which gives a strict quadtree: locating the face containing a surface point
is a 20-way root test followed by one 4-way test per level.  Receptors are a
random subset of faces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from molrx.errors import ConfigurationError

__all__ = ["ReceiverMesh", "build_mesh", "assign_receptors"]

MAX_SUBDIVISION_LEVEL = 6  # 81920 faces; deeper levels are a memory trap


@dataclass(frozen=True)
class ReceiverMesh:
    """Unit-sphere triangle mesh with an optional receptor subset.

    ``tri_levels`` holds, for every subdivision level, the (n_faces, 3, 3)
    array of face-vertex coordinates used by the quadtree point locator.
    """

    level: int
    vertices: np.ndarray          # (V, 3) float64, |v| = 1
    faces: np.ndarray             # (F, 3) int32, outward winding
    face_areas: np.ndarray        # (F,) float64, spherical areas
    tri_levels: tuple[np.ndarray, ...]
    receptor_ids: np.ndarray      # (M,) int64, sorted; empty when unassigned

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    @property
    def receptor_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_faces, dtype=np.uint8)
        mask[self.receptor_ids] = 1
        return mask

    @property
    def mean_face_area(self) -> float:
        return float(self.face_areas.mean())

    def packed_tri_levels(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated per-level vertex arrays + level offsets, the layout
        the stepping kernels consume."""
        flat = np.ascontiguousarray(np.concatenate(self.tri_levels, axis=0))
        offsets = np.zeros(len(self.tri_levels) + 1, dtype=np.int64)
        np.cumsum([t.shape[0] for t in self.tri_levels], out=offsets[1:])
        return flat, offsets

    def locate(self, point: np.ndarray) -> int:
        """Index of the face whose radial projection contains ``point``."""
        p = np.asarray(point, dtype=np.float64)
        best = _argmax_face(p, self.tri_levels[0], range(20))
        for lvl in range(1, len(self.tri_levels)):
            best = _argmax_face(p, self.tri_levels[lvl],
                                range(4 * best, 4 * best + 4))
        return best

    def locate_brute(self, point: np.ndarray) -> int:
        """Scan every face; reference implementation for tests."""
        p = np.asarray(point, dtype=np.float64)
        tri = self.tri_levels[-1]
        scores = _face_scores(p, tri)
        return int(np.argmax(scores))


def _face_scores(p: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """min over the three edge planes of the signed triple product; positive
    iff the point projects inside the (outward-wound) face."""
    v0, v1, v2 = tri[:, 0, :], tri[:, 1, :], tri[:, 2, :]
    s0 = np.einsum("j,ij->i", p, np.cross(v0, v1))
    s1 = np.einsum("j,ij->i", p, np.cross(v1, v2))
    s2 = np.einsum("j,ij->i", p, np.cross(v2, v0))
    return np.minimum(np.minimum(s0, s1), s2)


def _argmax_face(p: np.ndarray, tri: np.ndarray, candidates) -> int:
    best = -1
    best_score = -np.inf
    for f in candidates:
        v = tri[f]
        s0 = p @ np.cross(v[0], v[1])
        s1 = p @ np.cross(v[1], v[2])
        s2 = p @ np.cross(v[2], v[0])
        score = min(s0, s1, s2)
        if score > best_score:
            best_score = score
            best = f
    return best


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int32)
    # enforce outward winding so the locator's sign tests are uniform
    for i, (a, b, c) in enumerate(faces):
        if np.linalg.det(verts[[a, b, c]]) < 0:
            faces[i] = [a, c, b]
    return verts, faces


def _subdivide(verts: np.ndarray, faces: np.ndarray):
    verts_list = [v for v in verts]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        idx = cache.get(key)
        if idx is None:
            v = verts_list[i] + verts_list[j]
            v = v / np.linalg.norm(v)
            verts_list.append(v)
            idx = len(verts_list) - 1
            cache[key] = idx
        return idx

    new_faces = []
    for a, b, c in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        # children of face f land at 4f .. 4f+3 (quadtree invariant)
        new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
    return np.array(verts_list), np.array(new_faces, dtype=np.int32)


def _spherical_areas(verts: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Solid angles via Van Oosterom-Strackee; they sum to exactly 4 pi."""
    a = verts[faces[:, 0]]
    b = verts[faces[:, 1]]
    c = verts[faces[:, 2]]
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = (1.0 + np.einsum("ij,ij->i", a, b)
           + np.einsum("ij,ij->i", b, c)
           + np.einsum("ij,ij->i", c, a))
    return 2.0 * np.arctan2(num, den)


def build_mesh(subdivision_level: int) -> ReceiverMesh:
    """Icosphere with 20 * 4**level faces (level 3 -> 1280, level 4 -> 5120)."""
    if not 0 <= subdivision_level <= MAX_SUBDIVISION_LEVEL:
        raise ConfigurationError(
            f"subdivision level must be in [0, {MAX_SUBDIVISION_LEVEL}]")
    verts, faces = _icosahedron()
    tri_levels = [np.ascontiguousarray(verts[faces])]
    for _ in range(subdivision_level):
        verts, faces = _subdivide(verts, faces)
        tri_levels.append(np.ascontiguousarray(verts[faces]))
    areas = _spherical_areas(verts, faces)
    return ReceiverMesh(
        level=subdivision_level,
        vertices=verts,
        faces=faces,
        face_areas=areas,
        tri_levels=tuple(tri_levels),
        receptor_ids=np.empty(0, dtype=np.int64),
    )


def assign_receptors(mesh: ReceiverMesh, M: int, seed: int) -> ReceiverMesh:
    """Mark a uniformly random M-subset of faces as receptors.

    Deterministic for a fixed seed and independent of everything else the
    seed drives (its own counter-based stream)."""
    if not 0 <= M <= mesh.n_faces:
        raise ConfigurationError(
            f"receptor count {M} outside [0, {mesh.n_faces}]")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0))))
    ids = np.sort(rng.permutation(mesh.n_faces)[:M]).astype(np.int64)
    return replace(mesh, receptor_ids=ids)
