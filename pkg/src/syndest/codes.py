"""
Binary parity-check matrices over GF(2): construction, alist exchange, syndromes.
"""

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .exceptions import AlistParseError, ConfigurationError, ConstructionError, DimensionError

logger = logging.getLogger(__name__)

# Permutations tried by build_regular_ldpc before giving up
MAX_CONSTRUCTION_ATTEMPTS = 100

# Passes of the optional four-cycle swap-out
MAX_FOUR_CYCLE_PASSES = 50


@dataclass(frozen=True, eq=False)
class BitVector:
    """Packed GF(2) row vector. Bits are stored little-endian within each byte."""

    length: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.length < 0:
            raise DimensionError(f"Bit vector length must be non-negative, got {self.length}")
        packed = np.array(self.bits, dtype=np.uint8, copy=True)
        expected = (self.length + 7) // 8
        if packed.ndim != 1 or packed.size != expected:
            raise DimensionError(f"Packed payload of {packed.size} bytes does not hold {self.length} bits")
        tail = self.length % 8
        if tail:
            # padding bits stay zero
            packed[-1] &= (1 << tail) - 1
        packed.flags.writeable = False
        object.__setattr__(self, "bits", packed)

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "BitVector":
        """Pack a sequence of 0/1 values (any non-zero counts as 1)."""
        unpacked = np.asarray(values if isinstance(values, np.ndarray) else list(values))
        unpacked = (unpacked.ravel() != 0).astype(np.uint8)
        return cls(int(unpacked.size), np.packbits(unpacked, bitorder="little"))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros((length + 7) // 8, dtype=np.uint8))

    def to_bits(self) -> np.ndarray:
        """Unpacked 0/1 array of ``length`` entries (dtype uint8)."""
        return np.unpackbits(self.bits, count=self.length, bitorder="little")

    @property
    def weight(self) -> int:
        return int(np.unpackbits(self.bits, bitorder="little").sum())

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: "BitVector") -> "BitVector":
        if not isinstance(other, BitVector):
            return NotImplemented
        if other.length != self.length:
            raise DimensionError(f"Cannot xor vectors of length {self.length} and {other.length}")
        return BitVector(self.length, np.bitwise_xor(self.bits, other.bits))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.length, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector(length={self.length}, weight={self.weight})"


@dataclass(frozen=True)
class DegreeProfile:
    """Check-degree profile: (degree d_j, count m_j) pairs with strictly increasing degrees."""

    entries: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        entries = tuple((int(d), int(c)) for d, c in self.entries)
        if not entries:
            raise ConfigurationError("Degree profile must have at least one entry")
        previous = 0
        for degree, count in entries:
            if degree <= previous:
                raise ConfigurationError(f"Degrees must be positive and strictly increasing, got {entries}")
            if count < 1:
                raise ConfigurationError(f"Check count for degree {degree} must be positive, got {count}")
            previous = degree
        object.__setattr__(self, "entries", entries)

    @classmethod
    def regular(cls, d: int, m: int) -> "DegreeProfile":
        return cls(((d, m),))

    @property
    def m(self) -> int:
        return sum(count for _, count in self.entries)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(degree for degree, _ in self.entries)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(count for _, count in self.entries)

    @property
    def edges(self) -> int:
        return sum(degree * count for degree, count in self.entries)

    @property
    def is_regular(self) -> bool:
        return len(self.entries) == 1

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ParityCheckMatrix:
    """
    Sparse binary m x n parity-check matrix stored as sorted row adjacency lists.

    Immutable after construction; the derived views (columns, CSR form) are
    computed once and shared by concurrent readers.
    """

    m: int
    n: int
    rows: Tuple[Tuple[int, ...], ...]
    seed: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ConfigurationError(f"Matrix dimensions must be positive, got {self.m}x{self.n}")
        if len(self.rows) != self.m:
            raise ConfigurationError(f"Expected {self.m} rows, got {len(self.rows)}")
        normalized = []
        for j, row in enumerate(self.rows):
            indices = tuple(sorted(int(i) for i in row))
            if not indices:
                raise ConfigurationError(f"Row {j} is empty; every check needs degree >= 1")
            if len(set(indices)) != len(indices):
                raise ConfigurationError(f"Row {j} has duplicate column indices")
            if indices[0] < 0 or indices[-1] >= self.n:
                raise ConfigurationError(f"Row {j} has a column index outside [0, {self.n})")
            normalized.append(indices)
        object.__setattr__(self, "rows", tuple(normalized))

    @cached_property
    def columns(self) -> Tuple[Tuple[int, ...], ...]:
        """For each column, the sorted row indices holding a 1."""
        cols: List[List[int]] = [[] for _ in range(self.n)]
        for j, row in enumerate(self.rows):
            for i in row:
                cols[i].append(j)
        return tuple(tuple(c) for c in cols)

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """The matrix as ``scipy.sparse.csr_matrix`` with int32 entries."""
        indptr = np.zeros(self.m + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in self.rows])
        indices = np.fromiter((i for r in self.rows for i in r), dtype=np.int64, count=int(indptr[-1]))
        data = np.ones(indices.size, dtype=np.int32)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.m, self.n))

    @property
    def row_degrees(self) -> np.ndarray:
        return np.fromiter((len(r) for r in self.rows), dtype=np.int64, count=self.m)

    @property
    def column_degrees(self) -> np.ndarray:
        return np.fromiter((len(c) for c in self.columns), dtype=np.int64, count=self.n)

    @property
    def edges(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def is_regular(self) -> bool:
        return len({len(r) for r in self.rows}) == 1

    def digest(self) -> str:
        """SHA-256 of the canonical alist text."""
        return hashlib.sha256(dump_alist(self).encode("ascii")).hexdigest()

    def __repr__(self) -> str:
        return f"ParityCheckMatrix(m={self.m}, n={self.n}, edges={self.edges}, seed={self.seed})"


def _resolve_duplicates(rows: np.ndarray, rng: np.random.Generator) -> bool:
    """
    Remove repeated column indices inside each row by pairwise socket swaps.

    Args:
        rows: (m, d) array of column indices, modified in place
        rng: Generator drawing the swap partners

    Returns:
        True if every row ended up duplicate-free, False if a row ran out of swap attempts
    """
    m, d = rows.shape
    max_tries = 1000 + 50 * d
    swaps = 0
    for r in range(m):
        tries = 0
        while True:
            row = rows[r]
            values, counts = np.unique(row, return_counts=True)
            repeated = values[counts > 1]
            if repeated.size == 0:
                break
            tries += 1
            if tries > max_tries:
                logger.debug(f"Row {r}: no valid swap partner after {max_tries} tries")
                return False
            c = repeated[0]
            p = int(np.flatnonzero(row == c)[1])
            r2 = int(rng.integers(m))
            p2 = int(rng.integers(d))
            if r2 == r:
                continue
            c2 = rows[r2, p2]
            if c2 in row or c in rows[r2]:
                continue
            rows[r, p], rows[r2, p2] = c2, c
            swaps += 1
    logger.debug(f"Resolved duplicate edges with {swaps} socket swap(s)")
    return True


def _rows_to_csr(rows: np.ndarray, n: int) -> sparse.csr_matrix:
    m, d = rows.shape
    indptr = np.arange(0, m * d + 1, d, dtype=np.int64)
    data = np.ones(m * d, dtype=np.int32)
    return sparse.csr_matrix((data, rows.ravel().astype(np.int64), indptr), shape=(m, n))


def _overlapping_row_pairs(rows: np.ndarray, n: int) -> List[Tuple[int, int]]:
    """Row pairs sharing at least two columns (each such pair closes a 4-cycle)."""
    h = _rows_to_csr(rows, n)
    overlap = sparse.triu(h @ h.T, k=1).tocoo()
    mask = overlap.data >= 2
    return list(zip(overlap.row[mask].tolist(), overlap.col[mask].tolist()))


def _remove_four_cycles(rows: np.ndarray, n: int, rng: np.random.Generator) -> int:
    """
    Degree-preserving edge swaps until no two rows share two columns.

    Returns:
        Number of offending row pairs left (0 on success)
    """
    m, d = rows.shape
    pairs = _overlapping_row_pairs(rows, n)
    for sweep in range(MAX_FOUR_CYCLE_PASSES):
        if not pairs:
            return 0
        logger.debug(f"Four-cycle pass {sweep}: {len(pairs)} overlapping row pair(s)")
        for r1, r2 in pairs:
            shared = np.intersect1d(rows[r1], rows[r2])
            if shared.size < 2:
                continue
            c = shared[0]
            p = int(np.flatnonzero(rows[r1] == c)[0])
            for _ in range(100):
                r3 = int(rng.integers(m))
                p3 = int(rng.integers(d))
                c3 = rows[r3, p3]
                if r3 in (r1, r2) or c3 in rows[r1] or c in rows[r3]:
                    continue
                rows[r1, p], rows[r3, p3] = c3, c
                break
        pairs = _overlapping_row_pairs(rows, n)
    return len(pairs)


def build_regular_ldpc(
    n: int,
    dv: int,
    d: int,
    seed: Optional[int] = None,
    *,
    remove_four_cycles: bool = False,
) -> ParityCheckMatrix:
    """../../docs/src/syndest/codes/build_regular_ldpc.md"""
    if n < 1 or dv < 1 or d < 1:
        raise ConfigurationError(f"n, dv and d must be positive, got n={n}, dv={dv}, d={d}")
    if d > n:
        raise ConfigurationError(f"Check degree d={d} exceeds code length n={n}")
    if (n * dv) % d != 0:
        raise ConfigurationError(f"n*dv={n * dv} is not divisible by d={d}")

    m = n * dv // d
    rng = np.random.default_rng(seed)
    sockets = np.repeat(np.arange(n, dtype=np.int64), dv)

    for attempt in range(1, MAX_CONSTRUCTION_ATTEMPTS + 1):
        rows = rng.permutation(sockets).reshape(m, d)
        if _resolve_duplicates(rows, rng):
            break
        logger.debug(f"Socket permutation {attempt} could not be repaired, drawing a new one")
    else:
        raise ConstructionError(
            f"No ({dv},{d})-regular matrix with n={n} after {MAX_CONSTRUCTION_ATTEMPTS} permutations"
        )

    if remove_four_cycles:
        left = _remove_four_cycles(rows, n, rng)
        if left:
            logger.warning(f"Four-cycle removal stopped with {left} overlapping row pair(s) left")

    h = ParityCheckMatrix(m=m, n=n, rows=tuple(tuple(int(i) for i in r) for r in rows), seed=seed)
    logger.info(f"Built ({dv},{d})-regular parity-check matrix {m}x{n} (seed={seed}, attempt {attempt})")
    return h


def count_four_cycles(h: ParityCheckMatrix) -> int:
    """Number of length-4 cycles in the Tanner graph of ``h``."""
    overlap = sparse.triu(h.csr @ h.csr.T, k=1).tocoo()
    shared = overlap.data.astype(np.int64)
    return int((shared * (shared - 1) // 2).sum())


def _parse_ints(tokens: Sequence[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise AlistParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def _parse_adjacency(
    tokens: Sequence[str], lineno: int, degree: int, max_degree: int, upper: int
) -> Tuple[int, ...]:
    values = _parse_ints(tokens, lineno)
    if len(values) < degree:
        raise AlistParseError(f"expected {degree} indices, got {len(values)}", lineno)
    if len(values) > max(degree, max_degree):
        raise AlistParseError(f"{len(values)} entries exceed the maximum degree {max_degree}", lineno)
    head, padding = values[:degree], values[degree:]
    if any(v != 0 for v in padding):
        raise AlistParseError(f"entries beyond the declared degree {degree} must be 0 padding", lineno)
    for v in head:
        if v == 0:
            raise AlistParseError("index 0 is not allowed (alist indices are 1-based)", lineno)
        if v < 0 or v > upper:
            raise AlistParseError(f"index {v} outside [1, {upper}]", lineno)
    if len(set(head)) != len(head):
        raise AlistParseError("duplicate index in adjacency list", lineno)
    return tuple(v - 1 for v in head)


def load_alist(text: str) -> ParityCheckMatrix:
    """../../docs/src/syndest/codes/load_alist.md"""
    lines = [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if len(lines) < 4:
        last = lines[-1][0] if lines else 1
        raise AlistParseError("truncated header (need dimensions, max degrees and two degree lines)", last)

    (l1, t1), (l2, t2), (l3, t3), (l4, t4) = lines[:4]
    dims = _parse_ints(t1, l1)
    if len(dims) != 2 or min(dims) < 1:
        raise AlistParseError("first line must hold two positive integers 'n m'", l1)
    n, m = dims
    max_degrees = _parse_ints(t2, l2)
    if len(max_degrees) != 2:
        raise AlistParseError("second line must hold the maximum column and row degrees", l2)
    max_col, max_row = max_degrees
    col_degrees = _parse_ints(t3, l3)
    if len(col_degrees) != n:
        raise AlistParseError(f"expected {n} column degrees, got {len(col_degrees)}", l3)
    row_degrees = _parse_ints(t4, l4)
    if len(row_degrees) != m:
        raise AlistParseError(f"expected {m} row degrees, got {len(row_degrees)}", l4)
    if min(col_degrees) < 0 or max(col_degrees) != max_col:
        raise AlistParseError(f"column degrees do not match the declared maximum {max_col}", l3)
    if min(row_degrees) < 1 or max(row_degrees) != max_row:
        raise AlistParseError(f"row degrees must be >= 1 with maximum {max_row}", l4)
    if sum(col_degrees) != sum(row_degrees):
        raise AlistParseError(
            f"column degrees sum to {sum(col_degrees)} but row degrees sum to {sum(row_degrees)}", l4
        )

    body = lines[4:]
    if len(body) < n + m:
        last = body[-1][0] if body else l4
        raise AlistParseError(f"expected {n} column lists and {m} row lists, got {len(body)} lines", last)
    if len(body) > n + m:
        raise AlistParseError("unexpected trailing content", body[n + m][0])

    columns = [
        _parse_adjacency(tokens, no, col_degrees[i], max_col, m) for i, (no, tokens) in enumerate(body[:n])
    ]
    rows = [
        _parse_adjacency(tokens, no, row_degrees[j], max_row, n) for j, (no, tokens) in enumerate(body[n:])
    ]

    transpose: List[set] = [set() for _ in range(n)]
    for j, row in enumerate(rows):
        for i in row:
            transpose[i].add(j)
    for i, column in enumerate(columns):
        if set(column) != transpose[i]:
            raise AlistParseError(f"column {i + 1} list disagrees with the row lists", body[i][0])

    logger.info(f"Parsed alist matrix {m}x{n} with {sum(row_degrees)} edges")
    return ParityCheckMatrix(m=m, n=n, rows=tuple(rows))


def dump_alist(h: ParityCheckMatrix) -> str:
    """
    Serialize ``h`` as canonical alist text (single spaces, trailing newline).

    Lists carry no zero padding, except that a column without entries is written as a single 0
    so that every adjacency line is non-blank.
    """
    col_degrees = [len(c) for c in h.columns]
    row_degrees = [len(r) for r in h.rows]
    out = [
        f"{h.n} {h.m}",
        f"{max(col_degrees)} {max(row_degrees)}",
        " ".join(map(str, col_degrees)),
        " ".join(map(str, row_degrees)),
    ]
    out.extend(" ".join(str(j + 1) for j in column) or "0" for column in h.columns)
    out.extend(" ".join(str(i + 1) for i in row) for row in h.rows)
    return "\n".join(out) + "\n"


def syndrome(h: ParityCheckMatrix, y_hat: BitVector) -> BitVector:
    """Syndrome s = y_hat H^T over GF(2)."""
    if y_hat.length != h.n:
        raise DimensionError(f"Hard-decision vector has {y_hat.length} bits, matrix has {h.n} columns")
    counts = h.csr @ y_hat.to_bits().astype(np.int32)
    return BitVector.from_bits(counts & 1)


def syndrome_weight(s: BitVector) -> int:
    """Hamming weight of a syndrome."""
    return s.weight


def _syndrome_matrix(h: ParityCheckMatrix, patterns: np.ndarray) -> np.ndarray:
    patterns = np.asarray(patterns)
    if patterns.ndim != 2 or patterns.shape[1] != h.n:
        raise DimensionError(f"Expected a (trials, {h.n}) array of hard decisions, got shape {patterns.shape}")
    # (m, trials) parity counts; uint8 sums wrap modulo 256, which keeps their parity
    parity = h.csr.astype(np.uint8)
    return (parity @ patterns.T.astype(np.uint8, copy=False)) & 1


def syndrome_weights(h: ParityCheckMatrix, patterns: np.ndarray) -> np.ndarray:
    """Syndrome weight of every row of a (trials, n) 0/1 array."""
    return _syndrome_matrix(h, patterns).sum(axis=0).astype(np.int64)


def syndrome_weights_by_degree(h: ParityCheckMatrix, patterns: np.ndarray) -> np.ndarray:
    """
    Per-degree syndrome weights of a batch of hard decisions.

    Returns:
        (trials, J) integer array, column j aligned with ``degree_profile(h).entries[j]``
    """
    s = _syndrome_matrix(h, patterns)
    row_degrees = h.row_degrees
    profile = degree_profile(h)
    return np.stack([s[row_degrees == deg].sum(axis=0) for deg in profile.degrees], axis=1).astype(np.int64)


def per_degree_weights(h: ParityCheckMatrix, s: BitVector) -> Tuple[int, ...]:
    """Split the weight of syndrome ``s`` by check degree, aligned with ``degree_profile(h)``."""
    if s.length != h.m:
        raise DimensionError(f"Syndrome has {s.length} bits, matrix has {h.m} rows")
    bits = s.to_bits()
    row_degrees = h.row_degrees
    return tuple(int(bits[row_degrees == deg].sum()) for deg in degree_profile(h).degrees)


def degree_profile(h: ParityCheckMatrix) -> DegreeProfile:
    """Aggregate rows of ``h`` by degree."""
    counts = Counter(len(r) for r in h.rows)
    return DegreeProfile(tuple(sorted(counts.items())))
