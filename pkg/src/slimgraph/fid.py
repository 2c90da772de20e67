"""Fully indexable dictionary over a bit string.

For an m-bit string Y with r ones and block width h = ceil(log2(m) / 2):

  select table   one 2h-bit word per 1-bit (its 0-based position)
  rank tables    superblock ranks every h*h bits (2h-bit words), in-superblock
                 ranks every h bits (2*ceil(log2 h)-bit words), and a universal
                 table of prefix popcounts for every h-bit pattern
  access tables  one bit per h-block telling whether it is nonzero, a rank
                 structure over that bit vector, and the nonzero blocks

Y itself is not stored; block contents are recovered through the access
tables.  Strings shorter than 4 bits are stored verbatim.

The serialized form is a prefixed concatenation, so a Dictionary can be read
straight out of a larger archive.  All public positions are 1-based.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .bits import BitReader, BitString, BitWriter, WordArray, ceil_log2
from .concat import PrefixedConcat, prefixed_concat
from .errors import FormatError

VERBATIM_BELOW = 4


def block_width(m: int) -> int:
    """ceil(log2(m) / 2), i.e. the least h with 4**h >= m; at least 1."""
    return max(1, (ceil_log2(m) + 1) // 2)


def _inner_width(h: int) -> int:
    return 2 * ceil_log2(h)


def _as_bits(y) -> np.ndarray:
    if isinstance(y, BitString):
        return y.to_bits()
    if isinstance(y, str):
        return BitString.from_str(y).to_bits()
    return np.asarray(y, dtype=np.uint8)


@lru_cache(maxsize=None)
def popcount_table(h: int) -> np.ndarray:
    """Flat 2^h x h table: entry s*h + (c-1) = ones among the first c bits of s."""
    s = np.arange(1 << h, dtype=np.int64)
    bits = (s[:, None] >> np.arange(h - 1, -1, -1)) & 1
    return np.cumsum(bits, axis=1).ravel()


def _rank_parts(block_counts: np.ndarray, h: int) -> list[BitString]:
    """Superblock ranks, in-superblock ranks, popcount table."""
    nb = block_counts.size
    before = np.concatenate(([0], np.cumsum(block_counts)))[:-1]
    sup = before[::h]
    inner = before - np.repeat(sup, h)[:nb]
    return [
        BitString.from_uints(sup, 2 * h),
        BitString.from_uints(inner, _inner_width(h)),
        BitString.from_uints(popcount_table(h), h.bit_length()),
    ]


def _blocks(bits: np.ndarray, h: int) -> tuple[np.ndarray, np.ndarray]:
    m = bits.size
    nb = -(-m // h)
    pad = np.zeros(nb * h, dtype=np.uint8)
    pad[:m] = bits
    mat = pad.reshape(nb, h).astype(np.int64)
    weights = 1 << np.arange(h - 1, -1, -1, dtype=np.int64)
    return mat @ weights, mat.sum(axis=1)


def dict_parts(y) -> list[BitString]:
    bits = _as_bits(y)
    m = int(bits.size)
    r = int(bits.sum())
    w = BitWriter()
    w.write_gamma(m + 1)
    w.write_gamma(r + 1)
    head = w.finish()
    if m < VERBATIM_BELOW:
        return [head, BitString.from_bits(bits)]
    h = block_width(m)
    values, counts = _blocks(bits, h)
    ones = np.flatnonzero(bits)
    nonzero = (values != 0).astype(np.uint8)
    h3 = block_width(nonzero.size)
    _, counts3 = _blocks(nonzero, h3)
    return (
        [head, BitString.from_uints(ones, 2 * h)]
        + _rank_parts(counts, h)
        + [BitString.from_bits(nonzero)]
        + _rank_parts(counts3, h3)
        + [BitString.from_uints(values[values != 0], h)]
    )


def build_dict(y) -> "Dictionary":
    """Build the dictionary of y (BitString, '0101' string, or 0/1 array)."""
    return Dictionary(prefixed_concat(dict_parts(y)).bits)


def dict_bits(y) -> BitString:
    return prefixed_concat(dict_parts(y)).bits


class _RankIndex:
    """Rank over a bit string whose h-blocks are produced by `block`."""

    __slots__ = ("h", "sup", "inner", "table", "block")

    def __init__(self, bits, pc, first, nb, h, block):
        # nb counts h-blocks of the indexed string
        self.h = h
        self.sup = _words(bits, pc, first, -(-nb // h), 2 * h)
        self.inner = _words(bits, pc, first + 1, nb, _inner_width(h))
        self.table = _words(bits, pc, first + 2, (1 << h) * h, h.bit_length())
        self.block = block

    def rank(self, i: int) -> int:
        h = self.h
        q, off = divmod(i - 1, h)
        return self.sup[q // h] + self.inner[q] + self.table[self.block(q) * h + off]

    def prefix_ones(self, value: int, c: int) -> int:
        return self.table[value * self.h + c - 1] if c else 0


def _words(bits, pc, i, count, width) -> WordArray:
    pos, length = pc.part(i)
    if length != count * width:
        raise FormatError(f"dictionary table {i} has {length} bits, expected {count * width}")
    return WordArray(bits, pos, count, width)


class Dictionary:
    """Read view of a serialized dictionary stored at bits[start:start+length]."""

    def __init__(self, bits: BitString, start: int = 0, length: int | None = None):
        pc = PrefixedConcat(bits, start, length)
        self.bits = bits
        self.container = pc
        if pc.p not in (2, 10):
            raise FormatError(f"dictionary with {pc.p} parts")
        pos, ln = pc.part(1)
        rd = BitReader(bits, pos, pos + ln)
        self.m = m = rd.read_gamma() - 1
        self.r = r = rd.read_gamma() - 1
        if r > m:
            raise FormatError("more ones than bits")
        self.verbatim = m < VERBATIM_BELOW
        if self.verbatim:
            if pc.p != 2:
                raise FormatError("short dictionary must be verbatim")
            self.raw = _words(bits, pc, 2, m, 1)
            self.h = 0
            return
        if pc.p != 10:
            raise FormatError("long dictionary must have ten parts")
        self.h = h = block_width(m)
        self.nb = nb = -(-m // h)
        self.select_words = _words(bits, pc, 2, r, 2 * h)
        self.nonzero = _words(bits, pc, 6, nb, 1)
        self.h3 = h3 = block_width(nb)
        self.nonzero_rank = _RankIndex(bits, pc, 7, -(-nb // h3), h3, self._nonzero_block)
        pos, ln = pc.part(10)
        if ln % h:
            raise FormatError("stored block area is not a whole number of blocks")
        self.stored = WordArray(bits, pos, ln // h, h)
        self.rank_index = _RankIndex(bits, pc, 3, nb, h, self._block)

    @property
    def size_bits(self) -> int:
        return self.container.length

    def _nonzero_block(self, q: int) -> int:
        h3 = self.h3
        start = q * h3
        take = min(h3, self.nb - start)
        return self.bits.read(self.nonzero.pos + start, take) << (h3 - take)

    def _block(self, q: int) -> int:
        if not self.nonzero[q]:
            return 0
        return self.stored[self.nonzero_rank.rank(q + 1) - 1]

    def _check(self, i: int, hi: int, what: str) -> None:
        if not 1 <= i <= hi:
            raise IndexError(f"{what} {i} outside 1..{hi}")

    def rank(self, i: int) -> int:
        """Ones among Y[1..i]."""
        self._check(i, self.m, "position")
        if self.verbatim:
            return sum(self.raw[k] for k in range(i))
        return self.rank_index.rank(i)

    def access(self, i: int) -> int:
        self._check(i, self.m, "position")
        if self.verbatim:
            return self.raw[i - 1]
        h = self.h
        q, off = divmod(i - 1, h)
        if not self.nonzero[q]:
            return 0
        block = self.stored[self.nonzero_rank.rank(q + 1) - 1]
        return (block >> (h - 1 - off)) & 1

    def access_rank(self, i: int) -> tuple[int, int]:
        """(Y[i], rank(i)) sharing one block lookup."""
        self._check(i, self.m, "position")
        if self.verbatim:
            return self.raw[i - 1], sum(self.raw[k] for k in range(i))
        h = self.h
        q, off = divmod(i - 1, h)
        ri = self.rank_index
        base = ri.sup[q // h] + ri.inner[q]
        if not self.nonzero[q]:
            return 0, base
        block = self.stored[self.nonzero_rank.rank(q + 1) - 1]
        return (block >> (h - 1 - off)) & 1, base + ri.table[block * h + off]

    def select(self, j: int) -> int:
        """Position of the j-th one."""
        self._check(j, self.r, "one-index")
        if self.verbatim:
            seen = 0
            for k in range(self.m):
                seen += self.raw[k]
                if seen == j:
                    return k + 1
        return self.select_words[j - 1] + 1

    def select_zero(self, j: int) -> int:
        """Position of the j-th zero, by binary search over the rank samples."""
        self._check(j, self.m - self.r, "zero-index")
        if self.verbatim:
            seen = 0
            for k in range(self.m):
                seen += 1 - self.raw[k]
                if seen == j:
                    return k + 1
        h = self.h
        ri = self.rank_index
        sup = ri.sup
        span = h * h
        # last superblock with fewer than j zeros before it
        lo, hi = 0, len(sup) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid * span - sup[mid] < j:
                lo = mid
            else:
                hi = mid - 1
        s = lo
        base = sup[s]
        lo, hi = s * h, min(self.nb, (s + 1) * h) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid * h - base - ri.inner[mid] < j:
                lo = mid
            else:
                hi = mid - 1
        q = lo
        need = j - (q * h - base - ri.inner[q])
        value = self._block(q)
        lo, hi = 1, h
        while lo < hi:
            mid = (lo + hi) // 2
            if mid - ri.prefix_ones(value, mid) >= need:
                hi = mid
            else:
                lo = mid + 1
        return q * h + lo

    # vectorised forms of the same lookups, used for bulk verification

    def tables(self) -> dict[str, np.ndarray]:
        if self.verbatim:
            return {"raw": self.raw.to_array()}
        ri, nr = self.rank_index, self.nonzero_rank
        return {
            "select": self.select_words.to_array(),
            "sup": ri.sup.to_array(),
            "inner": ri.inner.to_array(),
            "table": ri.table.to_array(),
            "nonzero": self.nonzero.to_array(),
            "sup3": nr.sup.to_array(),
            "inner3": nr.inner.to_array(),
            "table3": nr.table.to_array(),
            "stored": self.stored.to_array(),
        }

    def rank_array(self, pos, t=None) -> np.ndarray:
        pos = np.asarray(pos, dtype=np.int64)
        t = t or self.tables()
        if self.verbatim:
            return np.concatenate(([0], np.cumsum(t["raw"])))[pos]
        h = self.h
        q = (pos - 1) // h
        off = pos - 1 - q * h
        v = self._block_array(q, t)
        return t["sup"][q // h] + t["inner"][q] + t["table"][v * h + off]

    def _block_array(self, q, t) -> np.ndarray:
        h3 = self.h3
        nz = t["nonzero"]
        pad = np.zeros(-(-nz.size // h3) * h3, dtype=np.int64)
        pad[:nz.size] = nz
        nzblocks = pad.reshape(-1, h3) @ (1 << np.arange(h3 - 1, -1, -1, dtype=np.int64))
        q3 = q // h3
        off3 = q - q3 * h3
        k = t["sup3"][q3 // h3] + t["inner3"][q3] + t["table3"][nzblocks[q3] * h3 + off3]
        stored = t["stored"]
        safe = np.clip(k - 1, 0, max(stored.size - 1, 0))
        got = stored[safe] if stored.size else np.zeros_like(k)
        return np.where(nz[q] == 1, got, 0)

    def access_array(self, pos, t=None) -> np.ndarray:
        pos = np.asarray(pos, dtype=np.int64)
        t = t or self.tables()
        if self.verbatim:
            return t["raw"][pos - 1]
        h = self.h
        q = (pos - 1) // h
        off = pos - 1 - q * h
        return (self._block_array(q, t) >> (h - 1 - off)) & 1

    def select_array(self, js, t=None) -> np.ndarray:
        js = np.asarray(js, dtype=np.int64)
        t = t or self.tables()
        if self.verbatim:
            return np.flatnonzero(t["raw"])[js - 1] + 1
        return t["select"][js - 1] + 1

    def select_zero_array(self, js, t=None) -> np.ndarray:
        """Same search as select_zero: superblock, then block, then inside the block."""
        js = np.asarray(js, dtype=np.int64)
        t = t or self.tables()
        if self.verbatim:
            return np.flatnonzero(t["raw"] == 0)[js - 1] + 1
        h = self.h
        nb = self.nb
        q_all = np.arange(nb, dtype=np.int64)
        zeros_before = q_all * h - t["sup"][q_all // h] - t["inner"]
        q = np.searchsorted(zeros_before, js, side="left") - 1
        need = js - zeros_before[q]
        value = self._block_array(q, t)
        c = np.arange(1, h + 1, dtype=np.int64)
        zeros_in_prefix = c[None, :] - t["table"][value[:, None] * h + c[None, :] - 1]
        first = np.argmax(zeros_in_prefix >= need[:, None], axis=1) + 1
        return q * h + first


def size_report(d: Dictionary) -> dict[str, int]:
    """Bits spent per component, for reporting."""
    pc = d.container
    names = ["header", "select", "sup", "inner", "table", "nonzero", "sup3", "inner3", "table3", "stored"]
    if d.verbatim:
        names = ["header", "raw"]
    out = {name: pc.get(i + 1)[1] for i, name in enumerate(names)}
    out["container"] = pc.length - pc.n
    return out
