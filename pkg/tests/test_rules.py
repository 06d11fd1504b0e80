import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eca_infodyn.rules import (
    ALL_SYMMETRIES,
    Symmetry,
    equivalence_set,
    evolve,
    pack,
    representative,
    representatives,
    rule_output,
    step,
    transform_config,
    transform_rule,
    unpack,
)


def oracle_output(rule, l, c, r):
    # binary string read from the right: position 4l+2c+r
    return int(format(rule, "08b")[7 - (4 * l + 2 * c + r)])


def oracle_step(cells, rule):
    w = len(cells)
    return [oracle_output(rule, cells[(i - 1) % w], cells[i], cells[(i + 1) % w]) for i in range(w)]


@pytest.mark.parametrize("rule,nbhd,expected", [
    (110, (1, 1, 0), 1),
    (110, (0, 0, 0), 0),
    (30, (1, 0, 0), 1),
])
def test_rule_output_examples(rule, nbhd, expected):
    assert rule_output(rule, *nbhd) == expected


def test_rule_output_matches_oracle_everywhere():
    for rule in range(256):
        for l, c, r in itertools.product((0, 1), repeat=3):
            assert rule_output(rule, l, c, r) == oracle_output(rule, l, c, r)


@pytest.mark.parametrize("bad", [-1, 256, 1000])
def test_rule_out_of_range(bad):
    with pytest.raises(ValueError):
        rule_output(bad, 0, 0, 0)


def test_step_rule_zero_and_identity():
    rng = np.random.default_rng(1)
    cfg = rng.integers(0, 2, 37)
    assert not step(cfg, 0).any()
    np.testing.assert_array_equal(step(cfg, 204), cfg)


def test_step_rule_170_shifts_left():
    rng = np.random.default_rng(2)
    cfg = rng.integers(0, 2, 19).astype(np.uint8)
    np.testing.assert_array_equal(step(cfg, 170), np.roll(cfg, -1))


@pytest.mark.parametrize("width", [0, 1, 2])
def test_step_rejects_narrow_rings(width):
    with pytest.raises(ValueError):
        step(np.zeros(width, dtype=np.uint8), 30)


@settings(max_examples=200, deadline=None)
@given(rule=st.integers(0, 255), cells=st.lists(st.integers(0, 1), min_size=3, max_size=70))
def test_step_matches_oracle(rule, cells):
    assert step(cells, rule).tolist() == oracle_step(cells, rule)


def test_evolve_rule_zero_single_cell():
    cfg = np.zeros(11, dtype=np.uint8)
    cfg[5] = 1
    rows = evolve(cfg, 0, 3).to_array()
    assert rows.shape == (4, 11)
    assert not rows[1:].any()


def test_evolve_identity_rule_keeps_rows():
    cfg = np.random.default_rng(3).integers(0, 2, 25)
    rows = evolve(cfg, 204, 7).to_array()
    assert (rows == cfg).all()


def test_evolve_rule_90_hand_simulation():
    # XOR of neighbours: 1 -> 1.1 -> 1...1 (cells at -2 and +2, centre off)
    cfg = np.zeros(101, dtype=np.uint8)
    cfg[50] = 1
    rows = evolve(cfg, 90, 2).to_array()
    assert np.flatnonzero(rows[1]).tolist() == [49, 51]
    assert np.flatnonzero(rows[2]).tolist() == [48, 52]


def test_field_window_and_invariant():
    cfg = np.random.default_rng(4).integers(0, 2, 31)
    f = evolve(cfg, 110, 40, burn_in=10)
    rows = f.to_array()
    assert f.window().shape == (31, 31)
    np.testing.assert_array_equal(f.window(), rows[10:])
    for t in range(40):
        np.testing.assert_array_equal(step(rows[t], 110), rows[t + 1])


def test_field_rejects_bad_burn_in():
    with pytest.raises(ValueError):
        evolve(np.zeros(5, dtype=np.uint8), 30, 4, burn_in=4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
def test_pack_roundtrip(cells):
    assert unpack(pack(cells), len(cells)).tolist() == cells


def oracle_conjugate(rule):
    return sum((1 - oracle_output(rule, 1 - l, 1 - c, 1 - r)) << (4 * l + 2 * c + r)
               for l, c, r in itertools.product((0, 1), repeat=3))


def oracle_reflect(rule):
    return sum(oracle_output(rule, r, c, l) << (4 * l + 2 * c + r)
               for l, c, r in itertools.product((0, 1), repeat=3))


def test_transform_rule_examples():
    assert transform_rule(18, Symmetry.CONJUGATE) == 183
    assert transform_rule(0, Symmetry.CONJUGATE) == 255
    assert transform_rule(110, Symmetry.REFLECT) == 124
    assert transform_rule(77, Symmetry.IDENTITY) == 77


def test_transform_rule_matches_oracle_and_group_laws():
    for rule in range(256):
        conj = transform_rule(rule, Symmetry.CONJUGATE)
        refl = transform_rule(rule, Symmetry.REFLECT)
        assert conj == oracle_conjugate(rule)
        assert refl == oracle_reflect(rule)
        assert transform_rule(conj, Symmetry.CONJUGATE) == rule
        assert transform_rule(refl, Symmetry.REFLECT) == rule
        assert transform_rule(conj, Symmetry.REFLECT) == transform_rule(refl, Symmetry.CONJUGATE)
        assert transform_rule(rule, Symmetry.COMPOSITE) == transform_rule(conj, Symmetry.REFLECT)


def test_transform_config_examples():
    assert transform_config(np.zeros(9, dtype=np.uint8), Symmetry.CONJUGATE).all()
    single = np.zeros(101, dtype=np.uint8)
    single[50] = 1
    np.testing.assert_array_equal(transform_config(single, Symmetry.REFLECT), single)
    cfg = np.random.default_rng(5).integers(0, 2, 17).astype(np.uint8)
    twice = transform_config(transform_config(cfg, Symmetry.CONJUGATE), Symmetry.CONJUGATE)
    np.testing.assert_array_equal(twice, cfg)
    np.testing.assert_array_equal(transform_config(cfg, Symmetry.REFLECT), cfg[::-1])


def test_equivalence_sets():
    assert equivalence_set(30) == {30, 86, 135, 149}
    assert equivalence_set(204) == {204}
    assert equivalence_set(0) == {0, 255}
    assert representative(183) == 18


def test_representatives():
    reps = representatives()
    assert len(reps) == 88
    assert reps == sorted(reps)
    assert 110 in reps and 183 not in reps
    covered = set().union(*(equivalence_set(r) for r in reps))
    assert covered == set(range(256))
    assert sum(len(equivalence_set(r)) for r in reps) == 256


@settings(max_examples=60, deadline=None)
@given(rule=st.integers(0, 255), cells=st.lists(st.integers(0, 1), min_size=8, max_size=8),
       s=st.sampled_from(ALL_SYMMETRIES))
def test_equivariance(rule, cells, s):
    base = evolve(cells, rule, 8).to_array()
    moved = evolve(transform_config(cells, s), transform_rule(rule, s), 8).to_array()
    expected = np.stack([transform_config(row, s) for row in base])
    np.testing.assert_array_equal(moved, expected)


def test_step_is_pure():
    cfg = np.random.default_rng(6).integers(0, 2, 50).astype(np.uint8)
    before = cfg.copy()
    a = step(cfg, 110)
    b = step(cfg, 110)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(cfg, before)
