import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hamsurf.geometry import (
    DiskRangeError,
    Isometry,
    area_density,
    build_group,
    distance,
    geodesic_point,
    regular_vertex_radius,
    relator_error,
    side_midpoints,
)
from hamsurf.words import Word

coord = st.floats(-0.7, 0.7)
points = st.builds(complex, coord, coord)


@st.composite
def isometries(draw):
    """Random disk isometry: rotation composed with a translation."""
    p = draw(points)
    theta = draw(st.floats(0, 2 * math.pi))
    u = np.array([[np.exp(1j * theta), -np.exp(1j * theta) * p],
                  [-np.conj(p), 1]], dtype=complex)
    return Isometry.from_disk(u / np.sqrt(np.linalg.det(u)))


def tangent_angle(v, w):
    """Euclidean angle at v between the circular sides through v and its neighbours."""
    h = 1e-7
    a = geodesic_point(v, w, h) - v
    return a / abs(a)


def test_identity_and_inverse(rng):
    assert Isometry.identity().apply(0.3 + 0.1j) == pytest.approx(0.3 + 0.1j)
    dom = build_group(2)
    m = dom.matrix("a1 B2 b1")
    q = 0.2 - 0.4j
    assert m.apply(m.inverse().apply(q)) == pytest.approx(q, abs=1e-12)


@given(isometries())
def test_isometry_determinant_and_boundary(m):
    assert abs(m.det - 1) <= 1e-12
    theta = np.linspace(0, 2 * np.pi, 7)[:-1]
    u = m.disk
    z = np.exp(1j * theta)
    img = (u[0, 0] * z + u[0, 1]) / (u[1, 0] * z + u[1, 1])
    assert np.allclose(np.abs(img), 1, atol=1e-9)


@given(isometries(), points, points)
def test_distance_invariance(m, p, q):
    assert distance(p, q) == pytest.approx(distance(m.apply(p), m.apply(q)), abs=1e-8)
    assert distance(p, q) == pytest.approx(distance(q, p))
    assert distance(p, q) >= 0


def test_distance_examples():
    assert distance(0, 0) == 0
    assert distance(0, 0.5) == pytest.approx(math.log(3))
    # integrate the metric 2|dz|/(1-|z|^2) along the radius
    r = np.linspace(0, 0.5, 20001)
    assert np.trapezoid(2 / (1 - r * r), r) == pytest.approx(math.log(3), rel=1e-8)


@given(points, points, st.floats(0, 1))
def test_geodesic_point(p, q, t):
    x = geodesic_point(p, q, t)
    assert distance(p, x) == pytest.approx(t * distance(p, q), abs=1e-8)
    assert distance(p, x) + distance(x, q) == pytest.approx(distance(p, q), abs=1e-8)


def test_geodesic_point_examples():
    assert geodesic_point(0.1j, 0.5, 0) == pytest.approx(0.1j)
    assert geodesic_point(0.1j, 0.5, 1) == pytest.approx(0.5)
    mid = geodesic_point(0, 0.5, 0.5)
    assert mid.imag == pytest.approx(0, abs=1e-15)
    assert mid.real == pytest.approx(math.tanh(math.log(3) / 4))


def test_range_error():
    with pytest.raises(DiskRangeError):
        distance(0, 1.0)
    m = build_group(2).generators[1]
    with pytest.raises(DiskRangeError):
        m.apply(0.9999999999999 + 0j)


def test_vertex_radius_closed_form():
    for g in (2, 3, 4):
        n = 4 * g
        cosh_r = 1 / math.tan(math.pi / n) ** 2
        closed = math.tanh(math.acosh(cosh_r) / 2)
        assert regular_vertex_radius(n, 2 * math.pi / n) == pytest.approx(closed, abs=1e-11)
    assert build_group(2).radius == pytest.approx(0.8408964, abs=1e-7)


@pytest.mark.parametrize("g", [2, 3])
def test_build_group(g):
    dom = build_group(g)
    assert dom.n_sides == 4 * g
    assert relator_error(dom) <= 1e-8
    # interior angles from tangent directions
    v = dom.vertices
    n = dom.n_sides
    for k in range(n):
        a = tangent_angle(v[k], v[(k + 1) % n])
        b = tangent_angle(v[k], v[(k - 1) % n])
        ang = abs(np.angle(a / b))
        assert ang == pytest.approx(2 * math.pi / n, abs=1e-6)


def test_build_group_rejects_genus_one():
    with pytest.raises(ValueError, match="genus"):
        build_group(1)


@pytest.mark.parametrize("g", [2, 3])
def test_pairings_map_sides(g):
    dom = build_group(g)
    v = dom.vertices
    n = dom.n_sides
    mids = side_midpoints(dom)
    for p in dom.pairings:
        m = p.isometry
        j = p.partner
        ends = sorted([m.apply(v[j]), m.apply(v[(j + 1) % n])], key=lambda z: np.angle(z))
        want = sorted([v[p.side], v[(p.side + 1) % n]], key=lambda z: np.angle(z))
        assert np.allclose(ends, want, atol=1e-8)
        assert abs(m.apply(mids[j]) - mids[p.side]) <= 1e-8


def test_composition_homomorphism(dom2):
    a, b = Word.parse("a1 b2 A2"), Word.parse("B1 a2")
    m = dom2.matrix(a * b).matrix
    prod = (dom2.matrix(a) @ dom2.matrix(b)).matrix
    assert min(np.abs(m - prod).max(), np.abs(m + prod).max()) <= 1e-10


def test_locate(dom2):
    assert dom2.locate(0) is None
    for v in dom2.vertices:
        assert dom2.locate(v * (1 - 1e-15)) is None
    img = dom2.pairings[0].isometry.apply(0)
    k = dom2.locate(img)
    assert k is not None
    assert np.ravel(dom2.violations(img))[k] > 0


def test_normalize_examples(dom2):
    z, w = dom2.normalize(0)
    assert z == 0 and w == Word()
    z, w = dom2.normalize(dom2.generators[1].apply(0))
    assert abs(z) < 1e-12 and str(w) == "a1"
    target = dom2.matrix("a1 b1")
    z, w = dom2.normalize(target.apply(0))
    m1, m2 = dom2.matrix(w).matrix, target.matrix
    assert abs(z) < 1e-12
    assert min(np.abs(m1 - m2).max(), np.abs(m1 + m2).max()) < 1e-8


def test_tiling_consistency(dom2, rng):
    r = 0.95 * np.sqrt(rng.uniform(0, 1, 1000))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 1000))
    back, words = dom2.normalize_many(z)
    assert dom2.contains(back).all()
    err = max(abs(dom2.matrix(w).apply(b) - x) for b, w, x in zip(back, words, z))
    assert err <= 1e-7


def test_area_density():
    assert area_density(0) == 4
    r = np.array([0.0, 0.5, 0.9, 0.99])
    d = area_density(r)
    assert np.all(np.diff(d) > 0) and np.all(d > 0)


@pytest.mark.parametrize("g", [2, 3])
def test_area_gauss_bonnet(g):
    dom = build_group(g)
    assert dom.area == pytest.approx(4 * math.pi * (g - 1))
    rng = np.random.default_rng(0)
    n = 10**6
    box = np.abs(dom.vertices).max()
    z = rng.uniform(-box, box, n) + 1j * rng.uniform(-box, box, n)
    z = z[np.abs(z) < 1]
    mc = area_density(z[dom.contains(z)]).sum() * (2 * box) ** 2 / n
    assert mc == pytest.approx(dom.area, rel=0.01)


def test_sample_uniform_matches_area(dom2):
    rng = np.random.default_rng(1)
    z = dom2.sample_uniform(rng, 40000)
    assert dom2.contains(z).all()
    # fraction within the inscribed disk of radius rho equals its area share
    rho = 1.0
    share = 4 * math.pi * math.sinh(rho / 2) ** 2 / dom2.area
    inside = np.mean(2 * np.arctanh(np.abs(z)) < rho)
    assert inside == pytest.approx(share, abs=0.01)


def test_orbit(dom2):
    orb = dom2.orbit(2 * dom2.circumradius)
    assert orb[0][0] == Word()
    centres = np.array([g.apply(0) for _, g in orb])
    assert len(np.unique(np.round(centres, 8))) == len(orb)
    for w, g in orb:
        assert np.allclose(dom2.matrix(w).apply(0.1), g.apply(0.1))


def test_json_dump(dom2):
    d = dom2.to_json()
    assert d["genus"] == 2 and len(d["vertices"]) == 8 and len(d["pairings"]) == 8
    assert '"vertex_radius"' in dom2.dumps()
