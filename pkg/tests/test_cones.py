import pytest

from logtoric.cones import Cone, extreme_description, saturated_span_basis


def C(*rays, ambient=None):
    ambient = ambient if ambient is not None else len(rays[0])
    return Cone.make(rays, ambient)


def test_extreme_description_halfplane():
    lines, rays = extreme_description([(1, 0)], 2)
    # {x >= 0}: lineality e2, one ray e1
    assert len(lines) == 1
    assert len(rays) == 1
    assert abs(lines[0][1]) == 1 and lines[0][0] == 0
    assert rays[0] == (1, 0)


def test_extreme_description_orthant():
    lines, rays = extreme_description([(1, 0), (0, 1)], 2)
    assert not lines
    assert sorted(rays) == [(0, 1), (1, 0)]


def test_extreme_description_empty_interior():
    # x >= 0 and -x >= 0 pins x = 0
    lines, rays = extreme_description([(1, 0), (-1, 0)], 2)
    assert len(lines) == 1
    assert not rays


def test_canonical_drops_redundant_generator():
    c = C((1, 0), (0, 1), (1, 1))
    assert c.rays == ((0, 1), (1, 0))


def test_not_strongly_convex_rejected():
    with pytest.raises(ValueError, match="strongly convex"):
        C((1, 0), (-1, 0))


def test_dim_and_simplicial():
    assert C((1, 0), (0, 1)).dim == 2
    assert C((1, 1, 0)).dim == 1
    assert Cone.zero(3).dim == 0
    assert C((1, 0), (0, 1)).is_simplicial()
    assert not C(
        (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)
    ).is_simplicial()


def test_smoothness():
    assert C((1, 0), (0, 1)).is_smooth()
    assert not C((1, 0), (1, 2)).is_smooth()
    assert C((1, 2)).is_smooth()  # a primitive ray extends to a basis
    assert Cone.zero(2).is_smooth()
    assert C((1, 0), (1, 2)).multiplicity() == 2


def test_membership_and_interior():
    c = C((1, 0), (1, 2))
    assert c.contains_point((1, 1))
    assert c.contains_point((1, 0))
    assert not c.contains_point((0, -1))
    assert c.interior_contains((1, 1))
    assert not c.interior_contains((1, 0))
    ray = C((1, 1))
    assert ray.contains_point((2, 2))
    assert not ray.contains_point((1, 2))  # off the ray: span check matters


def test_intersection():
    a = C((1, 0), (0, 1))
    b = C((1, 1), (-1, 1))
    i = a.intersect(b)
    assert i.rays == ((0, 1), (1, 1))
    assert a.intersect(C((-1, -1), (-1, 1))) == Cone.zero(2)


def test_faces_of_orthant():
    c = C((1, 0), (0, 1))
    fs = c.faces()
    assert len(fs) == 4  # 0, two rays, itself
    assert Cone.zero(2) in fs
    assert C((1, 0)) in fs
    assert c in fs


def test_has_face():
    c = C((1, 0), (0, 1))
    assert c.has_face(C((1, 0)))
    assert c.has_face(Cone.zero(2))
    assert not c.has_face(C((1, 1)))  # interior ray is not a face


def test_crosses():
    orthant = C((1, 0), (0, 1))
    assert C((1, 1)).crosses(orthant)
    assert not C((1, 0)).crosses(orthant)
    # a facet of the cone does not cross it
    assert not C((0, 1)).crosses(orthant)
    # a cone meeting only at 0 does not cross
    assert not C((-1, -1)).crosses(orthant)
    diag = C((1, 1), (1, -1))
    assert diag.crosses(orthant)


def test_faces_of_nonsimplicial():
    c = Cone.make([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)], 3)
    facets = c.facets()
    assert all(f.dim == 2 for f in facets)
    assert len(facets) == 4
    assert len(c.faces()) == 1 + 4 + 4 + 1  # 0, rays, facets, itself


def test_saturated_span_basis():
    b = saturated_span_basis([(2, 0, 1), (0, 2, 1)], 3)
    assert len(b) == 2
    # (1,1,1) = half the sum lies in the saturation
    from logtoric.intlinalg import lattice_member

    assert lattice_member(b, (1, 1, 1))
    assert lattice_member(b, (2, 0, 1))
    assert not lattice_member(b, (0, 0, 1))
