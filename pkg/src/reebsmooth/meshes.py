"""Built-in meshes and fields used by the CLI demos and the test suite."""

import numpy as np

from .complexes import ScalarField, SimplicialComplex


def circle_complex(n=48):
    """Unit circle as an n-gon in R^2 with the height field y = -cos(angle).

    Vertex 0 sits at the bottom (value -1), vertex n//2 at the top (+1).
    Returns (complex, field).
    """
    k = np.arange(n)
    ang = 2.0 * np.pi * k / n
    coords = np.stack([np.sin(ang), -np.cos(ang)], axis=1)
    verts = [(int(i), coords[i]) for i in range(n)]
    edges = [(int(i), int((i + 1) % n)) for i in range(n)]
    X = SimplicialComplex.build(verts, edges)
    return X, ScalarField(coords[:, 1].copy())


def torus_mesh(n_theta=16, n_phi=16, ring_radius=2.0, tube_radius=1.0):
    """Standard torus triangulation with the height field y.

    The torus stands upright: y = (R + r cos(phi)) sin(theta), so the height
    Reeb graph has four nodes (min, two saddles, max) with degrees 1,3,3,1.
    Returns (complex, field).
    """
    ii, jj = np.meshgrid(np.arange(n_theta), np.arange(n_phi), indexing="ij")
    theta = 2.0 * np.pi * ii / n_theta
    phi = 2.0 * np.pi * jj / n_phi
    ring = ring_radius + tube_radius * np.cos(phi)
    x = ring * np.cos(theta)
    y = ring * np.sin(theta)
    z = tube_radius * np.sin(phi)
    coords = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    def vid(i, j):
        return (i % n_theta) * n_phi + (j % n_phi)

    tris = []
    for i in range(n_theta):
        for j in range(n_phi):
            a = vid(i, j)
            b = vid(i + 1, j)
            c = vid(i, j + 1)
            d = vid(i + 1, j + 1)
            tris.append((a, b, c))
            tris.append((b, d, c))
    verts = [(int(i), coords[i]) for i in range(n_theta * n_phi)]
    X = SimplicialComplex.build(verts, tris)
    return X, ScalarField(coords[:, 1].copy())


def three_loop_rig(n_outer=40, n_a=24, n_b=16):
    """Planar 1-complex with three loops and the height field y.

    An outer ring of diameter 1.0 centered at the origin, with two smaller
    rings internally tangent to it: ring A (diameter 0.45) wedged at the
    outer vertex at angle 225 degrees, ring B (diameter 0.30) wedged at 45
    degrees.  Each small ring shares exactly one vertex with the outer ring.
    Returns (complex, field).
    """
    r_out, r_a, r_b = 0.5, 0.225, 0.15
    ang = 2.0 * np.pi * np.arange(n_outer) / n_outer
    outer = np.stack([r_out * np.cos(ang), r_out * np.sin(ang)], axis=1)

    def wedge_ring(wedge_index, radius, segments):
        wedge = outer[wedge_index]
        center = wedge * (1.0 - radius / r_out)
        base = np.arctan2(wedge[1] - center[1], wedge[0] - center[0])
        a = base + 2.0 * np.pi * np.arange(segments) / segments
        pts = np.stack(
            [center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)], axis=1
        )
        pts[0] = wedge  # share the wedge vertex exactly
        return pts

    k_a = n_outer * 5 // 8  # 225 degrees
    k_b = n_outer // 8  # 45 degrees
    ring_a = wedge_ring(k_a, r_a, n_a)
    ring_b = wedge_ring(k_b, r_b, n_b)

    verts = [(i, outer[i]) for i in range(n_outer)]
    edges = [(i, (i + 1) % n_outer) for i in range(n_outer)]

    def add_ring(pts, wedge_vertex, start_id):
        ids = [wedge_vertex]
        for j in range(1, len(pts)):
            verts.append((start_id + j - 1, pts[j]))
            ids.append(start_id + j - 1)
        for j in range(len(ids)):
            edges.append((ids[j], ids[(j + 1) % len(ids)]))
        return start_id + len(pts) - 1

    nxt = add_ring(ring_a, k_a, n_outer)
    add_ring(ring_b, k_b, nxt)

    X = SimplicialComplex.build(verts, edges)
    return X, ScalarField(X.coords[:, 1].copy())


def random_complex(rng, n_vertices=12, n_edges=18, n_triangles=6, coord_dim=2):
    """Random closed complex for property tests (connected not guaranteed)."""
    n = int(n_vertices)
    coords = rng.uniform(-1.0, 1.0, size=(n, coord_dim))
    simplices = []
    for _ in range(int(n_edges)):
        a, b = rng.choice(n, size=2, replace=False)
        simplices.append((int(a), int(b)))
    for _ in range(int(n_triangles)):
        tri = rng.choice(n, size=3, replace=False)
        simplices.append(tuple(int(v) for v in tri))
    verts = [(i, coords[i]) for i in range(n)]
    return SimplicialComplex.build(verts, simplices)


def random_field(rng, X, quantize=None):
    """Random vertex field; `quantize` snaps values to a grid to force ties."""
    vals = rng.uniform(-1.0, 1.0, size=X.n_vertices)
    if quantize:
        vals = np.round(vals * quantize) / quantize
    return ScalarField(vals)


def fig4_measure():
    """Weighted points tuned for the three-loop rig's two smoothing regimes.

    A heavy, sparse ring of mass sits just inside loop A (bottom left): lots
    of total mass near A keeps its kernel distance low, while the standoff
    from A's vertices keeps its distance-to-measure moderate.  A light, dense
    chain of points lies on loop B (top right): tiny nearest-point distances
    keep its distance-to-measure low, while the small total mass leaves its
    kernel distance high.  Returns an EmpiricalMeasure.
    """
    from .measures import EmpiricalMeasure

    r_out = 0.5
    ang_a = 2.0 * np.pi * 5 / 8
    ang_b = 2.0 * np.pi / 8
    center_a = r_out * (1.0 - 0.225 / r_out) * np.array([np.cos(ang_a), np.sin(ang_a)])
    center_b = r_out * (1.0 - 0.15 / r_out) * np.array([np.cos(ang_b), np.sin(ang_b)])

    n_a, n_b = 8, 16
    th_a = 2.0 * np.pi * np.arange(n_a) / n_a
    th_b = 2.0 * np.pi * (np.arange(n_b) + 0.5) / n_b
    pts_a = center_a + 0.10 * np.stack([np.cos(th_a), np.sin(th_a)], axis=1)
    pts_b = center_b + 0.15 * np.stack([np.cos(th_b), np.sin(th_b)], axis=1)
    points = np.concatenate([pts_a, pts_b], axis=0)
    weights = np.concatenate([np.full(n_a, 0.8 / n_a), np.full(n_b, 0.2 / n_b)])
    return EmpiricalMeasure(points, weights)
