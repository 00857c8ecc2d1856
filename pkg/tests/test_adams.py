import random

import pytest

from o2models.adams import adams_cyclic_hom, adams_dihedral, fixed_hom_dim, generator_table
from o2models.model_c import sphere_c, unit_c
from o2models.model_d import cq, hom_ext, i_k, regular_stalk, shift_d
from generators import d_object
from oracles import commuting_dim, regular_action


@pytest.mark.parametrize("i", range(1, 5))
@pytest.mark.parametrize("j", range(1, 5))
def test_generator_homs_by_brute_force(i, j):
    expected = commuting_dim(regular_action(j), regular_action(i))
    assert expected == 2 ** (i + j - 1) == fixed_hom_dim(i, j)
    got = adams_dihedral(i_k(2, regular_stalk(j)), i_k(2, regular_stalk(i)), (0,)).total.finite_dims()[0]
    assert got == expected


def test_cross_index_maps_vanish():
    for i in range(1, 4):
        rep = adams_dihedral(i_k(2, regular_stalk(i)), i_k(5, regular_stalk(i)), (-1, 0, 1))
        assert rep.total.finite_dims().total == 0


def test_generator_table_passes():
    table = generator_table()
    assert table.passed, table.failures()
    assert "lines pass" in table.render()


def test_constant_sheaf_endomorphisms_are_germs():
    rep = adams_dihedral(cq(), cq(), (0,))
    assert rep.total.finite_dims() is None
    assert rep.total.generic[0] == 1 and rep.total.infinity[0] == 1


@pytest.mark.parametrize("seed", range(8))
def test_total_is_hom_plus_shifted_ext(seed):
    rng = random.Random(seed)
    x, y = d_object(rng), d_object(rng)
    rep = adams_dihedral(x, y, (-1, 0, 1))
    ext = hom_ext(shift_d(x, 1), y, (-1, 0, 1)).ext
    for n in (-1, 0, 1):
        assert rep.total.truncated(8)[n] == rep.hom.truncated(8)[n] + ext[n]


def test_cyclic_report_has_no_ext():
    rep = adams_cyclic_hom(unit_c(), unit_c(), (0,))
    assert rep.ext is None and rep.as_dict()["ext"] == "unavailable"
    assert rep.hom.infinity[0] == 1
    assert adams_cyclic_hom(unit_c(), sphere_c(sign=-1), (0,)).hom.infinity[0] == 0


def test_report_dict_is_serialisable():
    import json
    json.dumps(adams_dihedral(cq(), i_k(2, regular_stalk(1)), (0,)).as_dict())


def test_cyclic_homs_from_sphere_to_unit_match_its_dual():
    from o2models.euler_of import EulerClass
    from o2models.model_c import CObject, hom_set_c
    from o2models.model_t import function_object
    v = EulerClass.of({1: 1, 2: 1})
    dual_sphere = CObject.of(function_object(sphere_c(v), unit_c()))
    degrees = tuple(range(-3, 4))
    rep = adams_cyclic_hom(sphere_c(v), unit_c(), degrees)
    for n in degrees:
        assert rep.hom.infinity[n] == hom_set_c(unit_c(), dual_sphere, n).dim


@pytest.mark.parametrize("seed", range(6))
def test_cyclic_homs_out_of_induced_objects(seed):
    from generators import small_object
    from o2models.model_c import forget, induce_D
    from o2models.model_t import hom_set
    rng = random.Random(seed)
    a = small_object(rng, 2)
    b = rng.choice([unit_c(), sphere_c(sign=-1)])
    keys = sorted(set(a.indices()) | set(b.indices()))
    rep = adams_cyclic_hom(induce_D(a), b, (-1, 0, 1), keys)
    for n in (-1, 0, 1):
        assert rep.hom.infinity[n] == hom_set(a, forget(b), n, keys).dim


@pytest.mark.parametrize("i", range(1, 5))
def test_maps_between_skyscraper_and_constant_sheaf_agree(i):
    into = adams_dihedral(i_k(3, regular_stalk(i)), cq(), (0,)).hom.finite_dims()[0]
    out = adams_dihedral(cq(), i_k(3, regular_stalk(i)), (0,)).hom.finite_dims()[0]
    assert into == out == fixed_hom_dim(i, 0) == 2 ** (i - 1)
