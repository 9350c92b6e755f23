import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hotspot.measures import Geometric, Zeta
from hotspot.streams import (
    CFQuadraticPeriodic,
    CFRational,
    DigitStream,
    EmptyExpansion,
    EndOfStream,
    Explicit,
    IID,
    Periodic,
    Ramp,
    cf_digits_rational,
    cf_value,
    digit_at,
    read_digit_file,
    shift,
    uniforms,
)

from oracles import fold_convergents

RAMP = DigitStream(Ramp())
GEOM = Geometric("1/2")


def test_digit_at_examples():
    assert digit_at(RAMP, 7) == 7
    assert digit_at(DigitStream(Periodic((1, 2))), 5) == 1
    cf = DigitStream(CFRational(113, 355))
    assert [digit_at(cf, i) for i in (1, 2, 3)] == [3, 7, 16]
    with pytest.raises(EndOfStream):
        digit_at(cf, 4)
    with pytest.raises(ValueError):
        digit_at(RAMP, 0)


def test_euclid_by_hand():
    # 355/113 = 3 + 16/113; 113/16 = 7 + 1/16; 16/1 = 16
    assert divmod(355, 113) == (3, 16) and divmod(113, 16) == (7, 1) and divmod(16, 1) == (16, 0)
    assert cf_digits_rational(113, 355) == (3, 7, 16)


@pytest.mark.parametrize("num, den, digits", [(1, 3, (3,)), (113, 355, (3, 7, 16)), (2, 5, (2, 2)), (1, 2, (2,))])
def test_cf_digits_examples(num, den, digits):
    word = cf_digits_rational(num, den)
    assert tuple(word) == digits
    assert cf_value(word) == Fraction(num, den)


def test_cf_rejects_zero_and_out_of_range():
    with pytest.raises(EmptyExpansion):
        cf_digits_rational(0, 5)
    with pytest.raises(ValueError):
        cf_digits_rational(5, 5)


def test_cf_reconstruction_seeded():
    rng = random.Random(1)
    for _ in range(1000):
        den = rng.randint(2, 10**9)
        num = rng.randint(1, den - 1)
        word = cf_digits_rational(num, den)
        p, q = fold_convergents(word)
        g = math.gcd(num, den)
        assert (p, q) == (num // g, den // g)
        assert len(word) == 1 or word[-1] >= 2


def test_shift_examples():
    assert digit_at(shift(RAMP, 3), 1) == 4
    per = DigitStream(Periodic((1, 2)))
    assert digit_at(shift(per, 1), 1) == 2
    assert np.array_equal(shift(per, 0).prefix(20), per.prefix(20))


@pytest.mark.parametrize(
    "spec",
    [Ramp(), Periodic((3, 1, 2)), IID(GEOM, 5), CFQuadraticPeriodic((1, 4), (2, 7, 1))],
)
def test_shift_composition(spec):
    s = DigitStream(spec)
    rng = np.random.default_rng(0)
    a, b = 17, 1234
    left, right = shift(shift(s, a), b), shift(s, a + b)
    positions = rng.integers(1, 10**6, size=10**4)
    assert all(digit_at(left, int(i)) == digit_at(right, int(i)) for i in positions[:200])
    assert np.array_equal(left.prefix(10**4), right.prefix(10**4))


def test_iid_replayable_first_million():
    a = DigitStream(IID(GEOM, 99)).prefix(10**6)
    b = DigitStream(IID(GEOM, 99)).prefix(10**6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, DigitStream(IID(GEOM, 100)).prefix(10**6))


@given(st.integers(1, 5000), st.integers(0, 300), st.integers(0, 2**63))
def test_uniforms_random_access(start, count, seed):
    whole = uniforms(seed, 1, start + count)
    assert np.array_equal(uniforms(seed, start, count), whole[start - 1 : start - 1 + count])


def test_iid_block_reads_agree_with_single_digits():
    s = DigitStream(IID(GEOM, 3))
    block = s.block(50, 30)
    assert [digit_at(s, i) for i in range(50, 80)] == block.tolist()


def test_iid_first_digit_frequencies():
    n = 10**6
    digits = DigitStream(IID(GEOM, 11)).prefix(n)
    for a in range(1, 7):
        p = 2.0**-a
        freq = np.count_nonzero(digits == a) / n
        assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_iid_zeta_digits_positive_and_heavy():
    digits = DigitStream(IID(Zeta(2.0), 1)).prefix(10**5)
    assert digits.min() >= 1
    p1 = 1 / (math.pi**2 / 6)
    assert abs(np.mean(digits == 1) - p1) <= 4 * math.sqrt(p1 * (1 - p1) / 10**5)


def test_quadratic_periodic_digits():
    # sqrt(2) - 1 = [0; 2, 2, 2, ...]; sqrt(3) - 1 = [0; 1, 2, 1, 2, ...]
    assert DigitStream(CFQuadraticPeriodic((), (2,))).prefix(5).tolist() == [2] * 5
    assert DigitStream(CFQuadraticPeriodic((), (1, 2))).prefix(5).tolist() == [1, 2, 1, 2, 1]
    assert DigitStream(CFQuadraticPeriodic((5,), (1, 2))).prefix(4).tolist() == [5, 1, 2, 1]
    # convergents of [0; 1, 2, 1, 2, ...] approach sqrt(3) - 1
    p, q = fold_convergents(DigitStream(CFQuadraticPeriodic((), (1, 2))).prefix(30).tolist())
    assert abs(p / q - (math.sqrt(3) - 1)) < 1e-15


def test_finite_streams_clip_and_raise():
    s = DigitStream(Explicit((4, 5, 6)))
    assert s.length == 3
    assert s.block(2, 10).tolist() == [5, 6]
    with pytest.raises(EndOfStream):
        s.block(2, 10, strict=True)
    assert shift(s, 2).length == 1
    assert list(s) == [4, 5, 6]


def test_digit_file(tmp_path):
    path = tmp_path / "digits.txt"
    path.write_text("3\n7\n\n15\n1\n", encoding="utf-8")
    assert read_digit_file(path) == (3, 7, 15, 1)
    path.write_text("3\n0\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_digit_file(path)


def test_digits_beyond_int64_rejected():
    with pytest.raises(ValueError):
        DigitStream(CFRational(1, 2**70)).prefix(1)
    with pytest.raises(ValueError):
        Explicit((2**63,))
    assert DigitStream(Explicit((2**63 - 1,))).prefix(1)[0] == 2**63 - 1
