"""Transfer-matrix engine against the enumeration oracle and frozen values."""
import math

import numpy as np
import pytest
import scipy.stats

from hardcore2d.disorder import ActivityField, replace_at
from hardcore2d.engine import (
    local_expectation,
    log_partition,
    occupation_probabilities,
    occupation_probability,
    sample_exact,
)
from hardcore2d.errors import CapacityError
from hardcore2d.lattice import EVEN_BC, FREE_BC, ODD_BC, LatticeBox, box_lambda, centered_box
from hardcore2d.oracle import enumerate_independent_sets, oracle_log_partition, oracle_occupations


def uniform_field(box, value=1.0, scale=1.0):
    return ActivityField(box, np.full((box.width, box.height), float(value)), scale)


def dyadic_field(box, rng, scale=1.0, zero_prob=0.15):
    vals = rng.integers(1, 33, size=(box.width, box.height)) / 16.0
    vals[rng.random(vals.shape) < zero_prob] = 0.0
    return ActivityField(box, vals, scale)


def test_single_site_partition():
    box = centered_box(1, 1)
    got = log_partition(box, uniform_field(box, value=2.0))
    assert got.log_z == pytest.approx(math.log(3.0), abs=1e-14)
    assert not got.is_zero


def test_2x2_free_partition_is_log7():
    box = centered_box(2, 2)
    assert log_partition(box, uniform_field(box)).log_z == pytest.approx(math.log(7.0), abs=1e-14)


def test_even_and_odd_frames_on_lambda1():
    box = box_lambda(1)
    f = uniform_field(box)
    assert log_partition(box, f, EVEN_BC).log_z == pytest.approx(math.log(4.0), abs=1e-14)
    assert log_partition(box, f, ODD_BC).log_z == pytest.approx(math.log(4.0), abs=1e-14)


def test_occupation_values():
    one = centered_box(1, 1)
    assert occupation_probability(one, uniform_field(one, value=3.0), (0, 0)) == pytest.approx(0.75)
    strip = centered_box(1, 2)
    probs = occupation_probabilities(strip, uniform_field(strip))
    for v in strip.sites():
        assert probs[v] == pytest.approx(1.0 / 3.0, abs=1e-14)
    lam1 = box_lambda(1)
    even = occupation_probabilities(lam1, uniform_field(lam1), EVEN_BC)
    assert even[(0, 0)] == pytest.approx(0.5, abs=1e-14)
    assert even[(1, 0)] == 0.0


def test_deleted_site_never_occupied():
    box = centered_box(2, 2)
    f = replace_at(uniform_field(box, value=2.0), (0, 0), 0.0)
    probs = occupation_probabilities(box, f)
    assert probs[(0, 0)] == 0.0
    want = oracle_occupations(box, f)
    for v in box.sites():
        assert probs[v] == pytest.approx(float(want[v]), abs=1e-12)


def test_matches_oracle_on_random_instances():
    rng = np.random.default_rng(314)
    for _ in range(60):
        w, h = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        box = centered_box(w, h)
        f = dyadic_field(box, rng, scale=float(rng.choice((0.5, 1.0, 5.0))))
        bc = (FREE_BC, EVEN_BC, ODD_BC)[int(rng.integers(3))]
        got = log_partition(box, f, bc).log_z
        want = oracle_log_partition(box, f, bc).log()
        assert got == pytest.approx(want, abs=1e-10)


def test_field_region_may_exceed_box():
    region = box_lambda(2)
    box = box_lambda(1)
    rng = np.random.default_rng(9)
    f = dyadic_field(region, rng)
    assert log_partition(box, f).log_z == pytest.approx(
        oracle_log_partition(box, f).log(), abs=1e-12
    )


def test_box_must_fit_field_region():
    f = uniform_field(box_lambda(1))
    with pytest.raises(ValueError):
        log_partition(box_lambda(2), f)


def test_tall_boxes_use_the_same_math():
    # height 18 routes transitions through the subset-sum transform; the
    # transposed box stays on the dense-matrix path and must agree
    rng = np.random.default_rng(77)
    tall = LatticeBox(0, 1, 0, 17)
    wide = LatticeBox(0, 17, 0, 1)
    vals = rng.integers(1, 33, size=(2, 18)) / 16.0
    f_tall = ActivityField(tall, vals, 1.0)
    f_wide = ActivityField(wide, np.ascontiguousarray(vals.T), 1.0)
    a = log_partition(tall, f_tall).log_z
    b = log_partition(wide, f_wide).log_z
    assert a == pytest.approx(b, abs=1e-10)


def test_height_cap():
    box = LatticeBox(0, 0, 0, 24)  # height 25
    with pytest.raises(CapacityError):
        log_partition(box, uniform_field(box))


def test_empty_configuration_keeps_z_positive():
    # heavy dilution still admits the empty set, so log Z >= 0
    rng = np.random.default_rng(5)
    box = centered_box(4, 4)
    f = dyadic_field(box, rng, zero_prob=0.9)
    res = log_partition(box, f, EVEN_BC)
    assert not res.is_zero
    assert res.log_z >= 0.0


def test_local_expectation_single_site():
    box = centered_box(1, 1)
    f = uniform_field(box, value=2.0, scale=3.0)  # activity 6, switched activity 3
    got = local_expectation(box, box, f, FREE_BC)
    assert got == pytest.approx(7.0 / 4.0, abs=1e-12)


def test_sample_exact_is_uniform_on_2x2_unit_case():
    box = centered_box(2, 2)
    f = uniform_field(box)
    states = enumerate_independent_sets(box)
    index = {s: i for i, s in enumerate(states)}
    rng = np.random.default_rng(123)
    counts = np.zeros(len(states))
    n = 7000
    for _ in range(n):
        counts[index[sample_exact(box, f, FREE_BC, rng)]] += 1
    _, p = scipy.stats.chisquare(counts)
    assert p > 1e-3


def test_sample_exact_respects_frame_and_deletions():
    box = box_lambda(1)
    f = replace_at(uniform_field(box, value=4.0), (1, 1), 0.0)
    rng = np.random.default_rng(321)
    for _ in range(200):
        s = sample_exact(box, f, EVEN_BC, rng)
        assert (1, 0) not in s and (0, 1) not in s  # blocked by even frame
        assert (1, 1) not in s  # deleted


def test_sampling_is_reproducible():
    box = centered_box(3, 3)
    f = uniform_field(box, value=1.5)
    a = [sample_exact(box, f, FREE_BC, np.random.default_rng(42)) for _ in range(3)]
    b = [sample_exact(box, f, FREE_BC, np.random.default_rng(42)) for _ in range(3)]
    assert a == b
