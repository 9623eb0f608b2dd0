"""
Unit tests for parity-check matrices, alist exchange and syndromes.
"""

import numpy as np
import pytest

from syndest.codes import (
    BitVector,
    DegreeProfile,
    ParityCheckMatrix,
    build_regular_ldpc,
    count_four_cycles,
    degree_profile,
    dump_alist,
    load_alist,
    per_degree_weights,
    syndrome,
    syndrome_weight,
    syndrome_weights,
    syndrome_weights_by_degree,
)
from syndest.exceptions import AlistParseError, ConfigurationError, DimensionError

HAMMING_ALIST = """7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2
1 3
2 3
1 2 3
1
2
3
1 2 4 5
1 3 4 6
2 3 4 7
"""


def test_bitvector_pack_unpack():
    """Test BitVector keeps its bits and reports the Hamming weight."""
    values = [1, 0, 1, 1, 0, 0, 0, 0, 1, 1]
    v = BitVector.from_bits(values)
    assert len(v) == 10
    assert v.bits.size == 2
    assert v.to_bits().tolist() == values
    assert v.weight == 5


def test_bitvector_padding_masked():
    """Test padding bits beyond the length are cleared."""
    v = BitVector(3, np.array([0xFF], dtype=np.uint8))
    assert v.weight == 3
    assert v == BitVector.from_bits([1, 1, 1])


def test_bitvector_immutable_payload():
    """Test the packed payload cannot be modified in place."""
    v = BitVector.from_bits([1, 0, 1])
    with pytest.raises(ValueError):
        v.bits[0] = 0


def test_bitvector_xor_length_mismatch():
    """Test xor of vectors with different lengths fails."""
    with pytest.raises(DimensionError):
        BitVector.zeros(4) ^ BitVector.zeros(5)


def test_bitvector_bad_payload_size():
    """Test a payload that cannot hold the declared length is rejected."""
    with pytest.raises(DimensionError):
        BitVector(20, np.zeros(2, dtype=np.uint8))


def test_syndrome_weight_examples():
    """Test syndrome_weight on all-zero, all-one and random vectors."""
    assert syndrome_weight(BitVector.zeros(1000)) == 0
    assert syndrome_weight(BitVector.from_bits([1] * 7)) == 7

    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, size=333)
    naive = 0
    for b in bits:
        if b:
            naive += 1
    assert syndrome_weight(BitVector.from_bits(bits)) == naive


def test_parity_check_matrix_normalizes_rows():
    """Test rows are stored sorted."""
    h = ParityCheckMatrix(m=2, n=4, rows=((3, 0), (2, 1)))
    assert h.rows == ((0, 3), (1, 2))
    assert h.columns == ((0,), (1,), (1,), (0,))


@pytest.mark.parametrize("rows", [
    ((0, 0),),
    ((0, 4),),
    ((),),
])
def test_parity_check_matrix_invalid_rows(rows):
    """Test duplicate, out-of-range and empty rows are rejected."""
    with pytest.raises(ConfigurationError):
        ParityCheckMatrix(m=1, n=4, rows=rows)


def test_build_regular_ldpc_degrees():
    """Test a (3,6)-regular construction has exact row and column weights."""
    h = build_regular_ldpc(2000, 3, 6, seed=1)
    assert h.m == 1000
    assert h.n == 2000
    assert np.all(h.row_degrees == 6)
    assert np.all(h.column_degrees == 3)
    assert degree_profile(h) == DegreeProfile(((6, 1000),))


def test_build_regular_ldpc_single_check():
    """Test one check covering every variable node."""
    h = build_regular_ldpc(6, 1, 6, seed=0)
    assert h.m == 1
    assert h.rows == ((0, 1, 2, 3, 4, 5),)


def test_build_regular_ldpc_deterministic():
    """Test the same seed gives the same matrix and a different seed a different one."""
    a = build_regular_ldpc(240, 3, 6, seed=7)
    b = build_regular_ldpc(240, 3, 6, seed=7)
    c = build_regular_ldpc(240, 3, 6, seed=8)
    assert a == b
    assert a.digest() == b.digest()
    assert a != c


@pytest.mark.parametrize("n,dv,d", [
    (2001, 3, 6),
    (4, 1, 6),
    (0, 3, 6),
    (12, 0, 6),
])
def test_build_regular_ldpc_invalid(n, dv, d):
    """Test invalid construction parameters raise a configuration error."""
    with pytest.raises(ConfigurationError):
        build_regular_ldpc(n, dv, d, seed=1)


def test_build_regular_ldpc_without_four_cycles():
    """Test the four-cycle swap-out keeps the degrees and leaves no 4-cycles."""
    h = build_regular_ldpc(240, 3, 6, seed=2, remove_four_cycles=True)
    assert count_four_cycles(h) == 0
    assert np.all(h.row_degrees == 6)
    assert np.all(h.column_degrees == 3)


def test_count_four_cycles_small():
    """Test two rows sharing two columns close exactly one 4-cycle."""
    h = ParityCheckMatrix(m=2, n=3, rows=((0, 1, 2), (0, 1)))
    assert count_four_cycles(h) == 1
    g = ParityCheckMatrix(m=2, n=4, rows=((0, 1), (2, 3)))
    assert count_four_cycles(g) == 0


def test_load_alist_hamming():
    """Test the 3x7 Hamming matrix loads and round-trips."""
    h = load_alist(HAMMING_ALIST)
    assert (h.m, h.n) == (3, 7)
    assert h.rows == ((0, 1, 3, 4), (0, 2, 3, 5), (1, 2, 3, 6))
    assert dump_alist(h) == HAMMING_ALIST


def test_load_alist_zero_padding():
    """Test trailing zero padding is accepted and dropped on output."""
    lines = HAMMING_ALIST.splitlines()
    padded = lines[:4] + ["1 2 0", "1 3 0", "2 3 0", "1 2 3", "1 0 0", "2 0 0", "3 0 0"] + lines[11:]
    h = load_alist("\n".join(padded) + "\n")
    assert dump_alist(h) == HAMMING_ALIST


def test_load_alist_zero_index():
    """Test an index 0 inside the declared degree is a parse error naming the line."""
    text = HAMMING_ALIST.replace("1 2 4 5", "1 2 0 5")
    with pytest.raises(AlistParseError) as exc_info:
        load_alist(text)
    assert exc_info.value.lineno == 12
    assert "line 12" in str(exc_info.value)


def test_load_alist_inconsistent_lists():
    """Test column lists that disagree with the row lists are rejected."""
    text = HAMMING_ALIST.replace("1 2 4 5", "1 2 4 6")
    with pytest.raises(AlistParseError) as exc_info:
        load_alist(text)
    assert exc_info.value.lineno == 9


def test_load_alist_out_of_range():
    """Test an index beyond the matrix dimension is rejected."""
    text = HAMMING_ALIST.replace("2 3 4 7", "2 3 4 8")
    with pytest.raises(AlistParseError):
        load_alist(text)


def test_load_alist_truncated_and_trailing():
    """Test truncated documents and trailing content are rejected."""
    with pytest.raises(AlistParseError):
        load_alist("7 3\n3 4\n")
    with pytest.raises(AlistParseError):
        load_alist("\n".join(HAMMING_ALIST.splitlines()[:-1]) + "\n")
    with pytest.raises(AlistParseError):
        load_alist(HAMMING_ALIST + "1 2\n")


def test_load_alist_non_integer():
    """Test non-numeric tokens are rejected."""
    with pytest.raises(AlistParseError):
        load_alist(HAMMING_ALIST.replace("4 4 4", "4 four 4"))


def test_alist_round_trip_random_matrices():
    """Test dump/load reproduces randomly constructed matrices."""
    for seed in range(3):
        h = build_regular_ldpc(60, 3, 6, seed=seed)
        text = dump_alist(h)
        g = load_alist(text)
        assert g == h
        assert dump_alist(g) == text


def test_alist_round_trip_empty_column():
    """Test a column without entries survives dump/load."""
    h = ParityCheckMatrix(m=2, n=4, rows=((0, 1), (1, 2)))
    text = dump_alist(h)
    assert text.splitlines()[7] == "0"
    g = load_alist(text)
    assert g == h
    assert g.columns[3] == ()
    assert dump_alist(g) == text


def test_syndrome_zero_and_unit_vectors():
    """Test the syndrome of zeros is zero and of a unit vector is the column."""
    h = load_alist(HAMMING_ALIST)
    assert syndrome(h, BitVector.zeros(7)).weight == 0
    for i in range(7):
        unit = np.zeros(7, dtype=np.uint8)
        unit[i] = 1
        s = syndrome(h, BitVector.from_bits(unit))
        expected = np.zeros(3, dtype=np.uint8)
        expected[list(h.columns[i])] = 1
        assert s.to_bits().tolist() == expected.tolist()


def test_syndrome_codewords_do_not_matter():
    """Test syndrome(x + e) == syndrome(e) for every Hamming codeword x."""
    h = load_alist(HAMMING_ALIST)
    e = BitVector.from_bits([0, 1, 0, 0, 0, 0, 1])
    codewords = []
    for k in range(2 ** 7):
        x = BitVector.from_bits([(k >> i) & 1 for i in range(7)])
        if syndrome(h, x).weight == 0:
            codewords.append(x)
    assert len(codewords) == 16
    for x in codewords:
        assert syndrome(h, x ^ e) == syndrome(h, e)


def test_syndrome_linearity():
    """Test syndrome(a + b) == syndrome(a) + syndrome(b)."""
    h = build_regular_ldpc(120, 3, 6, seed=4)
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = BitVector.from_bits(rng.integers(0, 2, size=120))
        b = BitVector.from_bits(rng.integers(0, 2, size=120))
        assert syndrome(h, a ^ b) == syndrome(h, a) ^ syndrome(h, b)


def test_syndrome_length_mismatch():
    """Test a hard-decision vector of the wrong length is rejected."""
    h = load_alist(HAMMING_ALIST)
    with pytest.raises(DimensionError):
        syndrome(h, BitVector.zeros(8))


def test_batch_syndrome_weights_match_single():
    """Test batched syndrome weights agree with one-at-a-time syndromes."""
    h = build_regular_ldpc(120, 3, 6, seed=4)
    rng = np.random.default_rng(1)
    patterns = (rng.random((20, 120)) < 0.1).astype(np.uint8)
    weights = syndrome_weights(h, patterns)
    for row, w in zip(patterns, weights):
        assert syndrome(h, BitVector.from_bits(row)).weight == w
    with pytest.raises(DimensionError):
        syndrome_weights(h, patterns[:, :100])


def test_batch_syndrome_parity_of_heavy_checks():
    """Test checks with more than 255 ones in a pattern keep the right parity."""
    h = ParityCheckMatrix(m=2, n=301, rows=(tuple(range(301)), tuple(range(300))))
    patterns = np.ones((3, 301), dtype=np.uint8)
    patterns[1, 0] = 0
    patterns[2, :] = 0
    assert syndrome_weights(h, patterns).tolist() == [1, 1, 0]
    for row in patterns[:2]:
        assert syndrome(h, BitVector.from_bits(row)).weight == 1


def test_degree_profile_irregular():
    """Test rows of degrees {3, 3, 5} aggregate to [(3, 2), (5, 1)]."""
    h = ParityCheckMatrix(m=3, n=6, rows=((0, 1, 2), (3, 4, 5), (0, 1, 2, 3, 4)))
    profile = degree_profile(h)
    assert profile.entries == ((3, 2), (5, 1))
    assert profile.m == h.m
    assert profile.edges == h.edges
    assert not profile.is_regular


def test_per_degree_weights():
    """Test syndrome weights split by check degree."""
    h = ParityCheckMatrix(m=3, n=6, rows=((0, 1, 2), (3, 4, 5), (0, 1, 2, 3, 4)))
    s = syndrome(h, BitVector.from_bits([1, 0, 0, 0, 0, 0]))
    assert s.to_bits().tolist() == [1, 0, 1]
    assert per_degree_weights(h, s) == (1, 1)

    rng = np.random.default_rng(2)
    patterns = rng.integers(0, 2, size=(10, 6)).astype(np.uint8)
    split = syndrome_weights_by_degree(h, patterns)
    assert split.shape == (10, 2)
    assert split.sum(axis=1).tolist() == syndrome_weights(h, patterns).tolist()


@pytest.mark.parametrize("entries", [
    (),
    ((6, 10), (3, 5)),
    ((3, 0),),
])
def test_degree_profile_invalid(entries):
    """Test empty, unordered and zero-count profiles are rejected."""
    with pytest.raises(ConfigurationError):
        DegreeProfile(entries)
