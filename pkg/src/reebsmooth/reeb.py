"""Reeb graphs of piecewise-linear fields on simplicial complexes.

The construction sweeps the distinct vertex values w_1 < ... < w_k.  Level
sets at each w_t and on each open slab (w_t, w_{t+1}) are unions of convex
slices of active simplices (those whose vertex values bracket the level), so
their connected components are computed combinatorially from codim-1
incidences between active simplices.  Slab components carry no vertex value
inside the slab, hence are products over the slab and attach to exactly one
component of the level below and one above.  Nodes with exactly one incoming
and one outgoing arc are regular points of the quotient and get spliced away,
leaving the minimal multigraph with strictly monotone edges.

Plateaus (adjacent vertices sharing a value) collapse automatically: they lie
inside a single level component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from ._core import sweep_quotient
from .complexes import ScalarField, SimplicialComplex
from .errors import GuardViolation, ValidationError

ISO_MAX_NODES = 64


@dataclass(frozen=True)
class ReebGraph:
    """Quotient multigraph of a PL scalar field.

    node_values: (Q,) level of each node, ascending.
    node_reps: (Q,) a witness vertex id from the complex, per node (metadata).
    edges: (E, 2) node index pairs, value strictly increasing along each row.
    """

    node_values: np.ndarray
    node_reps: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.node_values, dtype=np.float64)
        reps = np.asarray(self.node_reps, dtype=np.int64)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "node_values", vals)
        object.__setattr__(self, "node_reps", reps)
        object.__setattr__(self, "edges", edges)
        if len(vals) == 0:
            raise ValidationError("a Reeb graph has at least one node")
        if len(edges) and (edges.min() < 0 or edges.max() >= len(vals)):
            raise ValidationError("edge references a missing node")
        if len(edges) and not np.all(vals[edges[:, 0]] < vals[edges[:, 1]]):
            raise ValidationError("edges must strictly increase in value")

    @property
    def n_nodes(self):
        return len(self.node_values)

    @property
    def n_edges(self):
        return len(self.edges)

    def down_degrees(self):
        return np.bincount(self.edges[:, 1], minlength=self.n_nodes)

    def up_degrees(self):
        return np.bincount(self.edges[:, 0], minlength=self.n_nodes)

    def degrees(self):
        return self.down_degrees() + self.up_degrees()

    def component_count(self):
        if self.n_edges == 0:
            return self.n_nodes
        g = coo_matrix(
            (np.ones(self.n_edges, dtype=bool), (self.edges[:, 0], self.edges[:, 1])),
            shape=(self.n_nodes, self.n_nodes),
        )
        n, _ = _cc(g, directed=False)
        return int(n)

    def betti1(self):
        """First Betti number: independent loops of the graph."""
        return self.n_edges - self.n_nodes + self.component_count()

    def value_range(self):
        return float(self.node_values.min()), float(self.node_values.max())

    def level_multiplicity(self, c):
        """Points of the quotient at level c: nodes at c plus edges across c."""
        c = float(c)
        at = int(np.count_nonzero(self.node_values == c))
        lo = self.node_values[self.edges[:, 0]]
        hi = self.node_values[self.edges[:, 1]]
        return at + int(np.count_nonzero((lo < c) & (c < hi)))

    def to_dict(self):
        return {
            "nodes": [
                {"id": i, "value": float(v), "witness_vertex": int(r)}
                for i, (v, r) in enumerate(zip(self.node_values, self.node_reps))
            ],
            "edges": [[int(a), int(b)] for a, b in self.edges],
        }

    @classmethod
    def from_dict(cls, data):
        nodes = data["nodes"]
        vals = np.array([n["value"] for n in nodes], dtype=np.float64)
        reps = np.array([n.get("witness_vertex", -1) for n in nodes], dtype=np.int64)
        edges = np.array(data.get("edges", []), dtype=np.int64).reshape(-1, 2)
        return cls(vals, reps, edges)


# -- simplex enumeration -----------------------------------------------------


def _row_positions(table, queries):
    """Positions of each query row inside a lex-sorted row table.

    Rows are nonnegative int64, so the big-endian byte view makes memcmp agree
    with numeric lexicographic order.
    """
    w = table.shape[1]
    tv = np.ascontiguousarray(table.astype(">i8")).view(f"V{8 * w}").ravel()
    qv = np.ascontiguousarray(queries.astype(">i8")).view(f"V{8 * w}").ravel()
    pos = np.searchsorted(tv, qv)
    if len(qv):
        bad = (pos >= len(tv)) | (tv[np.minimum(pos, len(tv) - 1)] != qv)
        if np.any(bad):
            raise ValidationError("complex is not closed under faces")
    return pos.astype(np.int64)


def _simplex_enumeration(X):
    """Global simplex tables of a complex, cached on the instance.

    Returns (blocks, first_vertex, pair_a, pair_b) where blocks is the list of
    per-dimension index-row arrays (vertices first), first_vertex maps each
    global simplex index to its smallest vertex index, and the pair arrays
    list every (cofacet, facet) incidence as global indices.
    """
    cached = getattr(X, "_enum_cache", None)
    if cached is not None:
        return cached

    blocks = [np.arange(X.n_vertices, dtype=np.int64)[:, None]]
    for d in sorted(X.simplices):
        blocks.append(X.simplices[d])
    offsets = np.cumsum([0] + [len(b) for b in blocks])

    first_vertex = np.concatenate([b[:, 0] for b in blocks])

    pa, pb = [], []
    for i in range(1, len(blocks)):
        rows = blocks[i]
        below = blocks[i - 1]
        d = rows.shape[1] - 1
        own = offsets[i] + np.arange(len(rows), dtype=np.int64)
        for p in range(d + 1):
            face_pos = _row_positions(below, np.delete(rows, p, axis=1))
            pa.append(own)
            pb.append(offsets[i - 1] + face_pos)
    pair_a = np.concatenate(pa) if pa else np.empty(0, dtype=np.int64)
    pair_b = np.concatenate(pb) if pb else np.empty(0, dtype=np.int64)

    cache = (blocks, first_vertex, pair_a, pair_b)
    X._enum_cache = cache
    return cache


def _value_extents(blocks, values):
    vmin = [values[b].min(axis=1) for b in blocks]
    vmax = [values[b].max(axis=1) for b in blocks]
    return np.concatenate(vmin), np.concatenate(vmax)


# -- construction -------------------------------------------------------------


def reeb_graph(X, f):
    """Reeb graph of the PL field f on the complex X.

    Exact on the given float values: no perturbation, ties and plateaus are
    handled by the grouped-level sweep.
    """
    if isinstance(f, ScalarField):
        values = f.values
    else:
        values = np.asarray(f, dtype=np.float64)
    if len(values) != X.n_vertices:
        raise ValidationError("field length does not match vertex count")

    blocks, first_vertex, pair_a, pair_b = _simplex_enumeration(X)
    distinct = np.unique(values)
    vrank = np.searchsorted(distinct, values)
    rmin = [vrank[b].min(axis=1) for b in blocks]
    rmax = [vrank[b].max(axis=1) for b in blocks]
    min_rank = np.concatenate(rmin)
    max_rank = np.concatenate(rmax)

    node_level, node_rep, arc_bottom, arc_top, arc_rep = sweep_quotient(
        min_rank, max_rank, pair_a, pair_b, len(distinct)
    )
    return _finalize(
        distinct[node_level],
        X.vertex_ids[first_vertex[node_rep]],
        arc_bottom,
        arc_top,
    )


def _finalize(node_values, node_witness, arc_bottom, arc_top):
    """Splice regular nodes (one arc in, one arc out) out of the skeleton."""
    q = len(node_values)
    up = np.bincount(arc_bottom, minlength=q) if len(arc_bottom) else np.zeros(q, int)
    down = np.bincount(arc_top, minlength=q) if len(arc_top) else np.zeros(q, int)
    regular = (up == 1) & (down == 1)

    up_arc_of = np.full(q, -1, dtype=np.int64)
    up_arc_of[arc_bottom] = np.arange(len(arc_bottom), dtype=np.int64)

    keep = ~regular
    new_id = np.cumsum(keep) - 1

    lo_list, hi_list = [], []
    for e in range(len(arc_bottom)):
        if regular[arc_bottom[e]]:
            continue  # interior of a chain, consumed by the walk below
        top = arc_top[e]
        while regular[top]:
            top = arc_top[up_arc_of[top]]
        lo_list.append(new_id[arc_bottom[e]])
        hi_list.append(new_id[top])

    edges = np.array([lo_list, hi_list], dtype=np.int64).T.reshape(-1, 2)
    if len(edges):
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
    return ReebGraph(node_values[keep], node_witness[keep], edges)


# -- direct level-set components ----------------------------------------------


def level_components(X, f, c):
    """Connected components of the level set {f = c}, straight from simplices.

    Returns (count, active, labels): the active simplex indices (global
    enumeration, ascending) and a component label per active simplex.
    Independent of the sweep: one value, one connectivity pass.
    """
    values = f.values if isinstance(f, ScalarField) else np.asarray(f, np.float64)
    blocks, _, pair_a, pair_b = _simplex_enumeration(X)
    vmin, vmax = _value_extents(blocks, values)
    c = float(c)
    active = np.where((vmin <= c) & (vmax >= c))[0]
    pm = (np.maximum(vmin[pair_a], vmin[pair_b]) <= c) & (
        np.minimum(vmax[pair_a], vmax[pair_b]) >= c
    )
    a = np.searchsorted(active, pair_a[pm])
    b = np.searchsorted(active, pair_b[pm])
    n = len(active)
    if n == 0:
        return 0, active, np.empty(0, dtype=np.int64)
    g = coo_matrix((np.ones(len(a), dtype=bool), (a, b)), shape=(n, n))
    count, labels = _cc(g, directed=False)
    return int(count), active, labels.astype(np.int64)


# -- graph isomorphism ---------------------------------------------------------


def is_isomorphic(g1, g2, value_tol=1e-9):
    """Value-respecting multigraph isomorphism (small graphs only).

    Nodes may only map to nodes whose value differs by at most value_tol and
    whose (down, up) degrees match; edge multiplicities must agree.  Uses
    backtracking, guarded to ISO_MAX_NODES nodes.
    """
    if g1.n_nodes != g2.n_nodes or g1.n_edges != g2.n_edges:
        return False
    n = g1.n_nodes
    if n > ISO_MAX_NODES:
        raise GuardViolation(f"isomorphism test limited to {ISO_MAX_NODES} nodes")
    if np.any(np.abs(np.sort(g1.node_values) - np.sort(g2.node_values)) > value_tol):
        return False
    d1 = list(zip(g1.down_degrees(), g1.up_degrees()))
    d2 = list(zip(g2.down_degrees(), g2.up_degrees()))
    if sorted(d1) != sorted(d2):
        return False

    def mult(g):
        out = {}
        for a, b in g.edges:
            out[(int(a), int(b))] = out.get((int(a), int(b)), 0) + 1
        return out

    m1, m2 = mult(g1), mult(g2)
    neigh1 = {i: [] for i in range(n)}
    for (a, b), k in m1.items():
        neigh1[a].append((b, k, True))
        neigh1[b].append((a, k, False))

    order = sorted(range(n), key=lambda i: (g1.node_values[i], d1[i]))
    assign = [-1] * n
    used = [False] * n

    def feasible(u, v):
        if abs(g1.node_values[u] - g2.node_values[v]) > value_tol:
            return False
        if d1[u] != d2[v]:
            return False
        for w, k, upward in neigh1[u]:
            if assign[w] == -1:
                continue
            key = (v, assign[w]) if upward else (assign[w], v)
            if m2.get(key, 0) != k:
                return False
        return True

    def solve(pos):
        if pos == n:
            return True
        u = order[pos]
        for v in range(n):
            if used[v] or not feasible(u, v):
                continue
            assign[u] = v
            used[v] = True
            if solve(pos + 1):
                return True
            assign[u] = -1
            used[v] = False
        return False

    return solve(0)


def realize_as_complex(graph):
    """A Reeb graph as a 1-complex with its values as the field.

    Every arc gets a midpoint vertex so parallel arcs stay distinct simplices.
    Coordinates are the 1-d values (geometry only matters for measures, which
    graph smoothing does not use).  Returns (complex, field).
    """
    q = graph.n_nodes
    vals = list(graph.node_values)
    verts = [(i, (vals[i],)) for i in range(q)]
    simplices = []
    for j, (u, v) in enumerate(graph.edges):
        mid_val = (vals[u] + vals[v]) / 2.0
        verts.append((q + j, (mid_val,)))
        vals.append(mid_val)
        simplices.append((int(u), q + j))
        simplices.append((q + j, int(v)))
    X = SimplicialComplex.build(verts, simplices)
    return X, ScalarField(np.asarray(vals, dtype=np.float64))


SLAB_ORACLE_MAX = 10_000


class _OracleUF:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def slab_oracle(X, f):
    """Reference Reeb construction by direct slab decomposition.

    Deliberately naive: every simplex is a tuple, activity at a level value
    or open slab is decided by comparing its min/max vertex values against
    the slab endpoints, components come from a plain union-find over shared
    codim-1 faces, and regular points are spliced by walking dictionaries.
    Quadratic in places, guarded to small complexes; used to cross-check the
    production sweep.
    """
    f = f if isinstance(f, ScalarField) else ScalarField(np.asarray(f, dtype=np.float64))
    if len(f.values) != X.n_vertices:
        raise ValidationError("field length mismatch")
    simplices = [(v,) for v in range(X.n_vertices)]
    for d in sorted(X.simplices):
        simplices.extend(tuple(int(v) for v in row) for row in X.simplices[d])
    if len(simplices) > SLAB_ORACLE_MAX:
        raise GuardViolation(
            f"slab_oracle handles at most {SLAB_ORACLE_MAX} simplices; "
            "use reeb_graph for larger inputs"
        )
    index = {s: i for i, s in enumerate(simplices)}
    vmin = np.array([f.values[list(s)].min() for s in simplices])
    vmax = np.array([f.values[list(s)].max() for s in simplices])
    levels = np.unique(f.values)

    def components(active):
        uf = _OracleUF(len(active))
        local = {simplices[g]: i for i, g in enumerate(active)}
        for i, g in enumerate(active):
            s = simplices[g]
            if len(s) == 1:
                continue
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1 :]
                j = local.get(face)
                if j is not None:
                    uf.union(i, j)
        label = {}
        comp_of = []
        for i in range(len(active)):
            root = uf.find(i)
            if root not in label:
                label[root] = len(label)
            comp_of.append(label[root])
        return comp_of, len(label)

    node_values = []
    node_reps = []
    raw_edges = []
    level_node = []  # per level: global index of each simplex -> node id
    for t, w in enumerate(levels):
        active = [g for g in range(len(simplices)) if vmin[g] <= w <= vmax[g]]
        comp_of, n_comp = components(active)
        base = len(node_values)
        node_values.extend([float(w)] * n_comp)
        reps = {}
        lookup = {}
        for i, g in enumerate(active):
            node = base + comp_of[i]
            lookup[g] = node
            head = simplices[g][0]
            if node not in reps or head < reps[node]:
                reps[node] = head
        node_reps.extend(reps[base + c] for c in range(n_comp))
        level_node.append(lookup)
        if t == 0:
            continue
        lo, hi = levels[t - 1], w
        spanning = [g for g in range(len(simplices)) if vmin[g] <= lo and vmax[g] >= hi]
        comp_of, n_comp = components(spanning)
        seen = set()
        for i, g in enumerate(spanning):
            if comp_of[i] in seen:
                continue
            seen.add(comp_of[i])
            raw_edges.append((level_node[t - 1][g], level_node[t][g]))

    # splice degree-(1,1) nodes: walk each chain from its non-regular bottom
    outs = {}
    ins = {}
    for a, b in raw_edges:
        outs.setdefault(a, []).append(b)
        ins.setdefault(b, []).append(a)
    regular = {
        u
        for u in range(len(node_values))
        if len(outs.get(u, ())) == 1 and len(ins.get(u, ())) == 1
    }
    kept_edges = []
    for a, b in raw_edges:
        if a in regular:
            continue
        while b in regular:
            b = outs[b][0]
        kept_edges.append((a, b))
    keep = sorted(set(range(len(node_values))) - regular)
    renum = {old: new for new, old in enumerate(keep)}
    return ReebGraph(
        np.array([node_values[u] for u in keep]),
        np.array([node_reps[u] for u in keep], dtype=np.int64),
        np.array(sorted((renum[a], renum[b]) for a, b in kept_edges), dtype=np.int64).reshape(-1, 2),
    )
