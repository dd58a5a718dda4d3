"""Interval and triangle meshes with fixed connectivity and moving vertices.

Connectivity (elements, edges, adjacency) is built once and never changes;
only vertex coordinates move.  2D meshes come from an nx-by-ny rectangle
grid with every rectangle split into four triangles about its center, all
oriented counterclockwise.  Edges are directed so that the stored (a, b)
pair runs along the LEFT element's counterclockwise cycle; the unit normal
rot(b-a) then points out of the left element.

Boundary handling is tag-based per domain side: "copy" (transmissive /
far-field), "reflect", or "periodic".  Periodic sides pair partner edges
and tie partner vertices so a moving mesh keeps congruent partner
geometry.  Vertex motion constraints are encoded in move_mask: interior
vertices move freely, side vertices slide along their (axis-aligned)
side, corners are pinned.
"""
from __future__ import annotations

import numpy as np

VALID_TAGS = ("copy", "reflect", "periodic")


class MeshError(ValueError):
    pass


def _csr_from_lists(lists):
    offsets = np.zeros(len(lists) + 1, dtype=np.int64)
    for i, l in enumerate(lists):
        offsets[i + 1] = offsets[i] + len(l)
    data = np.empty(offsets[-1], dtype=np.int64)
    for i, l in enumerate(lists):
        data[offsets[i]:offsets[i + 1]] = l
    return offsets, data


class Mesh1D:
    """Partition of [a, b] into n cells; faces are the n+1 nodes."""

    dim = 1

    def __init__(self, a, b, n, bc_left="copy", bc_right="copy"):
        if not (b > a) or n < 2:
            raise MeshError("need b > a and at least two cells")
        for t in (bc_left, bc_right):
            if t not in VALID_TAGS:
                raise MeshError("unknown boundary tag %r" % (t,))
        if (bc_left == "periodic") != (bc_right == "periodic"):
            raise MeshError("periodic requires both ends periodic")
        self.n_elems = n
        self.n_verts = n + 1
        self.vertices = np.linspace(a, b, n + 1)
        self.domain = (float(a), float(b))
        self.bc_left = bc_left
        self.bc_right = bc_right
        self.periodic = bc_left == "periodic"
        # endpoints never move; the domain is fixed
        self.move_mask = np.ones(n + 1)
        self.move_mask[0] = 0.0
        self.move_mask[-1] = 0.0

    # geometry ---------------------------------------------------------

    def cell_sizes(self, verts=None):
        v = self.vertices if verts is None else verts
        return np.diff(v)

    def check_valid(self, verts=None):
        h = self.cell_sizes(verts)
        return bool(np.all(h > 0.0))

    def barycenters(self, verts=None):
        v = self.vertices if verts is None else verts
        return 0.5 * (v[:-1] + v[1:])

    def export_text(self, path, verts=None):
        v = self.vertices if verts is None else verts
        with open(path, "w") as f:
            f.write("# nodes %d\n" % self.n_verts)
            for x in v:
                f.write("%.17g\n" % x)
            f.write("# cells %d\n" % self.n_elems)
            for j in range(self.n_elems):
                f.write("%d %d\n" % (j, j + 1))


class Mesh2D:
    """Rectangle [x0,x1]x[y0,y1] as nx*ny*4 triangles (4-split about centers)."""

    dim = 2

    def __init__(self, nx, ny, domain, tags):
        """tags: dict with keys left/right/bottom/top mapping to boundary tags."""
        x0, x1, y0, y1 = domain
        if not (x1 > x0 and y1 > y0) or nx < 2 or ny < 2:
            raise MeshError("degenerate domain or fewer than 2 cells per side")
        for side in ("left", "right", "bottom", "top"):
            if tags[side] not in VALID_TAGS:
                raise MeshError("unknown boundary tag %r" % (tags[side],))
        if (tags["left"] == "periodic") != (tags["right"] == "periodic"):
            raise MeshError("periodic-x requires both left and right periodic")
        if (tags["bottom"] == "periodic") != (tags["top"] == "periodic"):
            raise MeshError("periodic-y requires both bottom and top periodic")
        self.nx, self.ny = nx, ny
        self.domain = tuple(float(c) for c in domain)
        self.tags = dict(tags)
        self.periodic_x = tags["left"] == "periodic"
        self.periodic_y = tags["bottom"] == "periodic"

        ngrid = (nx + 1) * (ny + 1)
        xs = np.linspace(x0, x1, nx + 1)
        ys = np.linspace(y0, y1, ny + 1)
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        grid = np.stack([gx.ravel(), gy.ravel()], axis=1)  # id = j*(nx+1)+i
        cx = 0.5 * (xs[:-1] + xs[1:])
        cy = 0.5 * (ys[:-1] + ys[1:])
        ccx, ccy = np.meshgrid(cx, cy, indexing="xy")
        centers = np.stack([ccx.ravel(), ccy.ravel()], axis=1)  # id = ngrid + j*nx+i
        self.vertices = np.concatenate([grid, centers], axis=0)
        self.n_verts = len(self.vertices)

        gid = lambda i, j: j * (nx + 1) + i
        cid = lambda i, j: ngrid + j * nx + i
        tris = []
        for j in range(ny):
            for i in range(nx):
                sw, se = gid(i, j), gid(i + 1, j)
                nw, ne = gid(i, j + 1), gid(i + 1, j + 1)
                c = cid(i, j)
                tris += [(sw, se, c), (se, ne, c), (ne, nw, c), (nw, sw, c)]
        self.elements = np.array(tris, dtype=np.int64)
        self.n_elems = len(tris)

        self._build_edges()
        self._classify_boundary(xs, ys, gid)
        self._build_adjacency()
        self._check_orientation()

    # -- construction helpers -------------------------------------------

    def _build_edges(self):
        edge_of = {}
        edges = []
        left = []
        right = []
        left_loc = []   # (aloc, bloc) within left element
        right_loc = []
        for n, tri in enumerate(self.elements):
            for s in range(3):
                a, b = tri[s], tri[(s + 1) % 3]
                key = (b, a)
                if key in edge_of:
                    e = edge_of[key]
                    if right[e] != -1:
                        raise MeshError("edge shared by three elements")
                    right[e] = n
                    # positions of (a_stored, b_stored) in this element's triple
                    ast, bst = edges[e]
                    t = list(tri)
                    right_loc[e] = (t.index(ast), t.index(bst))
                else:
                    e = len(edges)
                    edge_of[(a, b)] = e
                    edges.append((a, b))
                    left.append(n)
                    right.append(-1)
                    left_loc.append((s, (s + 1) % 3))
                    right_loc.append((-1, -1))
        self.edges = np.array(edges, dtype=np.int64)
        self.edge_left = np.array(left, dtype=np.int64)
        self.edge_right = np.array(right, dtype=np.int64)
        self.edge_left_loc = np.array(left_loc, dtype=np.int64)
        self.edge_right_loc = np.array(right_loc, dtype=np.int64)
        self.n_edges = len(self.edges)

        # element -> its three edges, and whether it is that edge's left side
        self.elem_edges = np.full((self.n_elems, 3), -1, dtype=np.int64)
        self.elem_edge_is_left = np.zeros((self.n_elems, 3), dtype=bool)
        for n, tri in enumerate(self.elements):
            for s in range(3):
                a, b = tri[s], tri[(s + 1) % 3]
                if (a, b) in edge_of:
                    e = edge_of[(a, b)]
                    isl = self.edge_left[e] == n
                else:
                    e = edge_of[(b, a)]
                    isl = False
                self.elem_edges[n, s] = e
                self.elem_edge_is_left[n, s] = isl

    def _classify_boundary(self, xs, ys, gid):
        nx, ny = self.nx, self.ny
        on_left = np.zeros(self.n_verts, dtype=bool)
        on_right = np.zeros(self.n_verts, dtype=bool)
        on_bottom = np.zeros(self.n_verts, dtype=bool)
        on_top = np.zeros(self.n_verts, dtype=bool)
        for j in range(ny + 1):
            on_left[gid(0, j)] = True
            on_right[gid(nx, j)] = True
        for i in range(nx + 1):
            on_bottom[gid(i, 0)] = True
            on_top[gid(i, ny)] = True

        self.move_mask = np.ones((self.n_verts, 2))
        self.move_mask[on_left | on_right, 0] = 0.0
        self.move_mask[on_bottom | on_top, 1] = 0.0

        side_of_edge = np.full(self.n_edges, -1, dtype=np.int64)  # 0:l 1:r 2:b 3:t
        bnd = np.nonzero(self.edge_right == -1)[0]
        for e in bnd:
            a, b = self.edges[e]
            if on_left[a] and on_left[b]:
                side_of_edge[e] = 0
            elif on_right[a] and on_right[b]:
                side_of_edge[e] = 1
            elif on_bottom[a] and on_bottom[b]:
                side_of_edge[e] = 2
            elif on_top[a] and on_top[b]:
                side_of_edge[e] = 3
            else:
                raise MeshError("boundary edge not on a single side")
        self.edge_side = side_of_edge
        side_names = ["left", "right", "bottom", "top"]
        self.edge_tag = np.array(
            ["interior" if s < 0 else self.tags[side_names[s]] for s in side_of_edge],
            dtype=object,
        )

        # periodic partners: match edges by their along-side index
        self.edge_partner = np.full(self.n_edges, -1, dtype=np.int64)
        self.edge_partner_flip = np.zeros(self.n_edges, dtype=bool)
        pairs = []
        if self.periodic_x:
            pairs.append((0, 1, 1))  # match on y (coordinate index 1)
        if self.periodic_y:
            pairs.append((2, 3, 0))
        for sa, sb, axis in pairs:
            ea = [e for e in bnd if side_of_edge[e] == sa]
            eb = [e for e in bnd if side_of_edge[e] == sb]
            key = lambda e: round(
                float(self.vertices[self.edges[e, 0], axis]
                      + self.vertices[self.edges[e, 1], axis]), 12)
            da = {key(e): e for e in ea}
            db = {key(e): e for e in eb}
            if set(da) != set(db):
                raise MeshError("periodic sides do not match up")
            for k, e1 in da.items():
                e2 = db[k]
                self.edge_partner[e1] = e2
                self.edge_partner[e2] = e1
                # flipped when the directed edges run in opposite senses
                d1 = self.vertices[self.edges[e1, 1], axis] - self.vertices[self.edges[e1, 0], axis]
                d2 = self.vertices[self.edges[e2, 1], axis] - self.vertices[self.edges[e2, 0], axis]
                flip = d1 * d2 < 0
                self.edge_partner_flip[e1] = flip
                self.edge_partner_flip[e2] = flip

        # periodic vertex ties (pairs, corners excluded: they are pinned anyway)
        ties = []
        if self.periodic_x:
            for j in range(ny + 1):
                ties.append((gid(0, j), gid(nx, j)))
        if self.periodic_y:
            for i in range(nx + 1):
                ties.append((gid(i, 0), gid(i, ny)))
        self.vertex_ties = np.array(ties, dtype=np.int64).reshape(-1, 2)

    def _build_adjacency(self):
        # neighbor element across each local edge slot (-1 on boundary)
        opp = np.where(self.elem_edge_is_left,
                       self.edge_right[self.elem_edges],
                       self.edge_left[self.elem_edges])
        # periodic: neighbor through the partner edge
        if np.any(self.edge_partner >= 0):
            part = self.edge_partner[self.elem_edges]
            per = (opp == -1) & (part >= 0)
            opp = np.where(per, self.edge_left[np.where(part >= 0, part, 0)], opp)
        self.elem_neighbors = opp

        v_elems = [[] for _ in range(self.n_verts)]
        for n, tri in enumerate(self.elements):
            for v in tri:
                v_elems[v].append(n)
        self.vert_elems = _csr_from_lists(v_elems)

        ring = [set() for _ in range(self.n_verts)]
        for a, b in self.edges:
            ring[a].add(b)
            ring[b].add(a)
        self.vert_ring = _csr_from_lists([sorted(s) for s in ring])
        ring2 = []
        for v in range(self.n_verts):
            s = set(ring[v])
            for w in ring[v]:
                s |= ring[w]
            s.discard(v)
            ring2.append(sorted(s))
        self.vert_ring2 = _csr_from_lists(ring2)

        v_edges = [[] for _ in range(self.n_verts)]
        for e, (a, b) in enumerate(self.edges):
            v_edges[a].append(e)
            v_edges[b].append(e)
        self.vert_edges = _csr_from_lists(v_edges)

    def _check_orientation(self):
        a = self.signed_areas()
        if np.any(a <= 0.0):
            raise MeshError("element with nonpositive area at build time")

    # -- geometry --------------------------------------------------------

    def signed_areas(self, verts=None):
        v = self.vertices if verts is None else verts
        p = v[self.elements]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def check_valid(self, verts=None):
        return bool(np.all(self.signed_areas(verts) > 0.0))

    def jacobians(self, verts=None):
        """Per-element J = [x1-x0 | x2-x0], detJ (=2|K|), and det*J^{-T}."""
        v = self.vertices if verts is None else verts
        p = v[self.elements]
        J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
        detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        adjJT = np.empty_like(J)  # det * J^{-T} (cofactor matrix)
        adjJT[:, 0, 0] = J[:, 1, 1]
        adjJT[:, 0, 1] = -J[:, 1, 0]
        adjJT[:, 1, 0] = -J[:, 0, 1]
        adjJT[:, 1, 1] = J[:, 0, 0]
        return J, detJ, adjJT

    def edge_geometry(self, verts=None):
        """Unit normals out of the left element and edge lengths."""
        v = self.vertices if verts is None else verts
        t = v[self.edges[:, 1]] - v[self.edges[:, 0]]
        length = np.hypot(t[:, 0], t[:, 1])
        n = np.stack([t[:, 1], -t[:, 0]], axis=1) / length[:, None]
        return n, length

    def inradii(self, verts=None):
        v = self.vertices if verts is None else verts
        p = v[self.elements]
        a = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
        b = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
        c = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
        area = self.signed_areas(v)
        return 2.0 * area / (a + b + c)

    def barycenters(self, verts=None):
        v = self.vertices if verts is None else verts
        return v[self.elements].mean(axis=1)

    def export_text(self, path, verts=None):
        v = self.vertices if verts is None else verts
        with open(path, "w") as f:
            f.write("# nodes %d\n" % self.n_verts)
            for x, y in v:
                f.write("%.17g %.17g\n" % (x, y))
            f.write("# cells %d\n" % self.n_elems)
            for tri in self.elements:
                f.write("%d %d %d\n" % tuple(tri))


def build_interval_mesh(a, b, n, bc_left="copy", bc_right="copy"):
    return Mesh1D(a, b, n, bc_left, bc_right)


def build_rect_mesh(nx, ny, domain, tags=None):
    tags = tags or {s: "copy" for s in ("left", "right", "bottom", "top")}
    return Mesh2D(nx, ny, domain, tags)
