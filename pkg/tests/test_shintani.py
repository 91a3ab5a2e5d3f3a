import json

import pytest

from conezeta import linalg, load_lattice
from conezeta.cones import Membership, contains
from conezeta.errors import GeneratorOutsideClosure, NotQuadratic, NotSmooth
from conezeta.field import norm, sign_at
from conezeta.lattice import embedding_cone, positivity_cone, regular_representation
from conezeta.shintani import (
    Fan,
    decompose_quadratic,
    fundamental_unit_quadratic,
    load_fan,
    trivial_fan,
    verify_cover,
)


def test_quadratic_fan(qfan):
    assert qfan.cones == (((1, 1), (0, 1)), ((0, 1),))
    assert qfan.top == [0]
    assert linalg.det(qfan.matrix(0)) == 1


def test_fundamental_unit(qlat, qfield):
    eps = fundamental_unit_quadratic(qlat)
    assert eps == qfield.theta() + 1
    assert abs(float(eps.embed_interval(0, 60).mid) - (3 + 5**0.5) / 2) < 1e-15
    # brute force over a + b theta: no totally positive unit lies strictly between 1 and eps
    t = qfield.theta()
    for a in range(-30, 31):
        for b in range(-30, 31):
            u = a + b * t
            if norm(u) == 1 and all(sign_at(u, i) > 0 for i in range(2)):
                assert not (sign_at(u - 1, 0) > 0 and sign_at(eps - u, 0) > 0), (a, b)


def test_fan_cones_in_closure_and_smooth(qlat, qfan):
    for cols in qfan.cones:
        assert linalg.is_integral([list(c) for c in cols])
        for col in cols:
            xi = qlat.dual_element(col)
            assert all(sign_at(xi, i) >= 0 for i in range(2))
    assert load_fan(qlat, qfan) == qfan


def test_quadratic_cover_verified(qlat, qfan):
    cert = verify_cover(qlat, qfan, 100, 6)
    assert cert.verified and cert.points_checked > 0
    assert cert.count_histogram == {1: cert.points_checked}


def test_missing_ray_leaves_gap(qlat, qfan, qfield):
    fan = Fan.from_columns([qfan.cones[0]])
    cert = verify_cover(qlat, fan, 30, 6)
    assert not cert.verified and cert.failure == "CountZero"
    # the witness lies on a unit translate of the ray through (0, 1)
    g = linalg.transpose(regular_representation(qlat, qfield.theta() + 1))
    ginv = linalg.inverse(g)
    x = list(cert.witness)
    for _ in range(12):
        if x[0] == 0:
            break
        x = linalg.matvec(ginv if x[0] > 0 else g, x)
    assert x[0] == 0 and x[1] > 0


def test_quadratic_monotone_in_height(qlat, qfan):
    for H in (5, 17, 40):
        assert verify_cover(qlat, qfan, H, 6).verified


def test_unit_matrices_preserve_positive_lattice_points(qlat, clat, qfield):
    for lat, units in ((qlat, [qfield.theta() + 1]), (clat, list(clat.units))):
        for u in units:
            g = regular_representation(lat, u)
            assert linalg.is_integral(g) and linalg.det(g) == 1
            # rho_w(eps) acts on T_{w,+}, its transpose on C_w
            for C, m in ((positivity_cone(lat), g), (embedding_cone(lat), linalg.transpose(g))):
                for x in _sample_points(lat.n):
                    a, b = contains(C, x), contains(C, linalg.matvec(m, list(x)))
                    assert (a is Membership.INSIDE) == (b is Membership.INSIDE)


def _sample_points(n):
    import itertools

    return [p for p in itertools.product(range(-4, 5), repeat=n) if any(p)]


def test_cubic_fan_loads(cfan, clat):
    assert len(cfan.cones) == 12
    assert cfan.top == [0, 1, 2, 3]
    for i in cfan.top:
        assert linalg.det(cfan.matrix(i)) == 1


@pytest.mark.slow
def test_cubic_cover_verified(clat, cfan):
    cert = verify_cover(clat, cfan, 20, threads=2)
    assert cert.verified, cert.to_json()


def test_cubic_small_window_gap(clat, cfan):
    # with |e_i| <= 3 some lattice points of height 14 are reached by no translate
    cert = verify_cover(clat, cfan, 14, 3)
    assert not cert.verified and cert.failure == "CountZero"
    assert cert.witness == (9, -9, 14)


def test_load_fan_errors(qlat):
    with pytest.raises(NotSmooth):
        load_fan(qlat, {"cones": [{"generators": [[0, 2]]}]})
    with pytest.raises(NotSmooth):
        load_fan(qlat, {"cones": [{"generators": [[1, 0], [1, 2]]}]})
    with pytest.raises(GeneratorOutsideClosure):
        load_fan(qlat, {"cones": [{"generators": [[1, 0]]}]})


def test_load_fan_reorders_to_positive_determinant(qlat):
    fan = load_fan(qlat, {"cones": [{"generators": [[0, 1], [1, 1]]}, {"generators": [[0, 1]]}]})
    assert fan.cones[0] == ((1, 1), (0, 1))


def test_fan_file_round_trip(qlat, qfan, tmp_path):
    path = tmp_path / "fan.json"
    qfan.save(path)
    assert json.loads(path.read_text()) == qfan.to_json()
    assert load_fan(qlat, path) == qfan


def test_decompose_quadratic_rejects_cubic(clat):
    with pytest.raises(NotQuadratic):
        decompose_quadratic(clat)


def test_rational_field_trivial_fan():
    lat = load_lattice({"min_poly": [0, 1]})
    fan = trivial_fan(1)
    assert load_fan(lat, fan) == fan
    assert verify_cover(lat, fan, 50).verified


def test_other_quadratic_field():
    # Q(sqrt 2): theta^2 = 2, totally positive fundamental unit (1 + sqrt 2)^2 = 3 + 2 sqrt 2
    lat = load_lattice({"min_poly": [-2, 0, 1]})
    eps = fundamental_unit_quadratic(lat)
    assert eps.coords == (3, 2)
    fan = decompose_quadratic(lat)
    assert all(linalg.det(fan.matrix(i)) == 1 for i in fan.top)
    assert verify_cover(lat, fan, 40).verified
