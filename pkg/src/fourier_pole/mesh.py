"""Triangle meshes: procedural stand-in bodies, OBJ ingestion, body rotation.

Meshes live in the body frame, in body-radius units, with the pole along
``+z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyMeshError, InvalidIndexError, ObjParseError

_DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (V, 3) float
    faces: np.ndarray  # (F, 3) int
    watertight: bool = False
    name: str = field(default="mesh", compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        f = np.ascontiguousarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3 or f.ndim != 2 or f.shape[1] != 3:
            raise ValueError("vertices must be (V, 3) and faces (F, 3)")
        if len(f) == 0 or len(v) == 0:
            raise EmptyMeshError("mesh has no faces")
        if f.min() < 0 or f.max() >= len(v):
            raise InvalidIndexError("face index out of range")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def triangles(self) -> np.ndarray:
        return self.vertices[self.faces]

    def face_areas(self) -> np.ndarray:
        t = self.triangles
        return 0.5 * np.linalg.norm(np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1)

    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def transformed(self, rot: np.ndarray, offset=None) -> "TriangleMesh":
        v = self.vertices @ np.asarray(rot).T
        if offset is not None:
            v = v + offset
        return TriangleMesh(v, self.faces, self.watertight, self.name)


def _drop_degenerate(vertices, faces):
    t = vertices[faces]
    area = 0.5 * np.linalg.norm(np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1)
    return faces[area > _DEGENERATE_AREA]


def volume_moments(mesh: TriangleMesh):
    """Volume, centroid and inertia tensor (unit density) of a closed mesh.

    Uses signed tetrahedra against the origin; results are meaningless for
    open or self-intersecting meshes.
    """
    a, b, c = (mesh.triangles[:, k] for k in range(3))
    vol6 = np.einsum("ij,ij->i", a, np.cross(b, c))
    vol = vol6.sum() / 6.0
    centroid = ((a + b + c) * vol6[:, None]).sum(axis=0) / (24.0 * vol)
    # second moments of each tetrahedron (origin, a, b, c)
    s = a + b + c
    cov = (np.einsum("i,ij,ik->jk", vol6, s, s)
           + np.einsum("i,ij,ik->jk", vol6, a, a)
           + np.einsum("i,ij,ik->jk", vol6, b, b)
           + np.einsum("i,ij,ik->jk", vol6, c, c)) / 120.0
    inertia = np.trace(cov) * np.eye(3) - cov
    return float(vol), centroid, inertia


# -- procedural shapes ------------------------------------------------------

def icosphere(subdivisions: int):
    """Unit icosphere vertices and outward-wound faces."""
    t = (1.0 + 5 ** 0.5) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    v = np.array(verts, dtype=float)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = np.array(faces, dtype=np.int64)
    for _ in range(subdivisions):
        v, f = _subdivide(v, f, project=True)
    return v, f


def _octahedron(subdivisions: int):
    v = np.array([(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], float)
    f = np.array([(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4),
                  (1, 0, 5), (2, 1, 5), (3, 2, 5), (0, 3, 5)], dtype=np.int64)
    for _ in range(subdivisions):
        v, f = _subdivide(v, f, project=False)
    return v, f


def _subdivide(v, f, project):
    edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mid = 0.5 * (v[uniq[:, 0]] + v[uniq[:, 1]])
    if project:
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
    nf = len(f)
    m01, m12, m20 = (inv[:nf] + len(v), inv[nf:2 * nf] + len(v), inv[2 * nf:] + len(v))
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    new_f = np.concatenate([
        np.stack([a, m01, m20], 1), np.stack([b, m12, m01], 1),
        np.stack([c, m20, m12], 1), np.stack([m01, m12, m20], 1)])
    return np.vstack([v, mid]), new_f


def _cap(radius: float, height: float):
    """Volume and centroid offset (from sphere center) of a spherical cap."""
    vol = np.pi * height ** 2 * (3 * radius - height) / 3.0
    dist = 3 * (2 * radius - height) ** 2 / (4 * (3 * radius - height))
    return vol, dist


def _two_sphere_centroid(r1, r2, d) -> float:
    """x-coordinate of the union centroid of spheres at 0 and ``d`` on x."""
    v1, v2 = 4 / 3 * np.pi * r1 ** 3, 4 / 3 * np.pi * r2 ** 3
    if d >= r1 + r2:
        return v2 * d / (v1 + v2)
    if d <= abs(r1 - r2):
        return 0.0 if r1 >= r2 else d
    # lens = cap of sphere 1 beyond plane x=a plus cap of sphere 2 before it
    a = (d ** 2 + r1 ** 2 - r2 ** 2) / (2 * d)
    cv1, cd1 = _cap(r1, r1 - a)
    cv2, cd2 = _cap(r2, r2 - (d - a))
    lens_vol = cv1 + cv2
    lens_moment = cv1 * cd1 + cv2 * (d - cd2)
    return (v2 * d - lens_moment) / (v1 + v2 - lens_vol)


def _principal_align(v, f):
    mesh = TriangleMesh(v, f)
    _, centroid, inertia = volume_moments(mesh)
    v = v - centroid
    w, vecs = np.linalg.eigh(inertia)
    rot = vecs[:, np.argsort(w)]  # columns: min, mid, max inertia axes
    if np.linalg.det(rot) < 0:
        rot[:, 0] = -rot[:, 0]
    return v @ rot


def generate_test_shape(kind: str, subdivisions: int = 3, **params) -> TriangleMesh:
    """Build a procedural body centered on its volume centroid.

    kind : ``"ellipsoid"`` (a, b, c), ``"diamond"`` (a, b, c: octahedron
        half-axes, default a spinning-top ``1.0, 0.9, 0.75``), ``"bilobed"``
        (r1, r2, separation: two overlapping spheres along x), or
        ``"perturbed_sphere"`` (seed, amplitude).

    For ``diamond`` and ``bilobed`` the maximum-inertia axis is ``+z`` by
    construction; ``perturbed_sphere`` is rotated onto its principal axes.
    """
    if kind == "ellipsoid":
        a, b, c = (float(params.get(k, 1.0)) for k in ("a", "b", "c"))
        if min(a, b, c) <= 0:
            raise ValueError("ellipsoid half-axes must be positive")
        v, f = icosphere(subdivisions)
        v = v * [a, b, c]
        return TriangleMesh(v, f, watertight=True, name="ellipsoid")

    if kind == "diamond":
        a = float(params.get("a", 1.0))
        b = float(params.get("b", 0.9))
        c = float(params.get("c", 0.75))
        if min(a, b, c) <= 0:
            raise ValueError("diamond half-axes must be positive")
        v, f = _octahedron(subdivisions)
        v = v * [a, b, c]
        return TriangleMesh(v, f, watertight=True, name="diamond")

    if kind == "bilobed":
        r1 = float(params.get("r1", 1.0))
        r2 = float(params.get("r2", 0.7))
        d = float(params.get("separation", 1.5))
        if min(r1, r2) <= 0 or d < 0:
            raise ValueError("bilobed radii must be positive and separation non-negative")
        v1, f1 = icosphere(subdivisions)
        v2, f2 = icosphere(subdivisions)
        v = np.vstack([v1 * r1, v2 * r2 + [d, 0.0, 0.0]])
        f = np.vstack([f1, f2 + len(v1)])
        v = v - [_two_sphere_centroid(r1, r2, d), 0.0, 0.0]
        # overlapping lobes leave interior faces, hidden from any outside ray
        return TriangleMesh(v, f, watertight=d >= r1 + r2, name="bilobed")

    if kind == "perturbed_sphere":
        seed = int(params.get("seed", 0))
        amp = float(params.get("amplitude", 0.2))
        if amp < 0 or amp >= 1:
            raise ValueError("amplitude must lie in [0, 1)")
        rng = np.random.default_rng(seed)
        v, f = icosphere(subdivisions)
        centers = rng.normal(size=(12, 3))
        centers /= np.linalg.norm(centers, axis=1, keepdims=True)
        weights = rng.uniform(-1.0, 1.0, 12)
        widths = rng.uniform(0.4, 0.9, 12)
        d2 = ((v[:, None, :] - centers[None]) ** 2).sum(-1)
        field_ = (weights * np.exp(-d2 / widths ** 2)).sum(1)
        field_ /= np.abs(field_).max()
        v = v * (1.0 + amp * field_)[:, None]
        v = _principal_align(v, f)
        return TriangleMesh(v, f, watertight=True, name="perturbed_sphere")

    raise ValueError(f"unknown shape kind {kind!r}")


# -- OBJ ------------------------------------------------------------------

def load_obj(path) -> TriangleMesh:
    """Read vertices and faces from an ASCII OBJ file.

    Polygons are fanned into triangles; texture/normal references
    (``f 1/2/3``) and non-geometry records are ignored. Negative indices are
    resolved relative to the vertices read so far.
    """
    verts, faces = [], []
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag == "v":
            try:
                verts.append([float(x) for x in rest[:3]])
            except ValueError as exc:
                raise ObjParseError(f"line {lineno}: bad vertex {raw!r}") from exc
            if len(verts[-1]) != 3:
                raise ObjParseError(f"line {lineno}: vertex needs 3 coordinates")
        elif tag == "f":
            if len(rest) < 3:
                raise ObjParseError(f"line {lineno}: face needs at least 3 vertices")
            idx = []
            for tok in rest:
                try:
                    k = int(tok.split("/")[0])
                except ValueError as exc:
                    raise ObjParseError(f"line {lineno}: bad face index {tok!r}") from exc
                if k == 0 or k > len(verts) or -k > len(verts):
                    raise InvalidIndexError(f"line {lineno}: face index {k} out of range")
                idx.append(k - 1 if k > 0 else len(verts) + k)
            faces.extend([idx[0], idx[t], idx[t + 1]] for t in range(1, len(idx) - 1))
    if not faces:
        raise EmptyMeshError(f"{path}: no faces")
    v = np.array(verts, dtype=float)
    f = np.array(faces, dtype=np.int64)
    f = _drop_degenerate(v, f)
    if len(f) == 0:
        raise EmptyMeshError(f"{path}: all faces degenerate")
    return TriangleMesh(v, f, watertight=_is_closed(f), name=Path(path).stem)


def _is_closed(faces) -> bool:
    e = np.sort(np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    return bool(np.all(counts == 2))


def save_obj(mesh: TriangleMesh, path) -> None:
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n")


def rotation_z(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_body(mesh: TriangleMesh, phi: float) -> TriangleMesh:
    """Spin the body by ``phi`` about its pole (body ``+z``)."""
    return mesh.transformed(rotation_z(phi))
