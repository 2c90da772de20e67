"""Self-describing concatenation of bit strings.

Layout for parts X_1..X_p with n payload bits in total and word width
b = 1 + ceil(log2 max(n, p)):

    0^(b-1) 1 | p | start(X_1) | ... | start(X_p) | X_1 X_2 ... X_p

Every header word is b bits wide and starts are 1-based positions inside the
payload, so the offset of any part is one word read away.
"""
from __future__ import annotations

from .bits import BitString, BitWriter, ceil_log2
from .errors import FormatError, TruncatedError


def word_width(payload_bits: int, parts: int) -> int:
    return 1 + ceil_log2(max(payload_bits, parts, 1))


def prefixed_concat(parts) -> "PrefixedConcat":
    parts = [p if isinstance(p, BitString) else BitString.from_str(p) for p in parts]
    n = sum(len(p) for p in parts)
    p = len(parts)
    b = word_width(n, p)
    w = BitWriter()
    w.write(1, b)
    w.write(p, b)
    start = 1
    for part in parts:
        w.write(start, b)
        start += len(part)
    for part in parts:
        w.write_bits(part)
    return PrefixedConcat(w.finish())


class PrefixedConcat:
    """Read view over a prefixed concatenation stored at bits[start:start+length]."""

    __slots__ = ("bits", "start", "length", "b", "p", "payload", "n")

    def __init__(self, bits: BitString, start: int = 0, length: int | None = None):
        if length is None:
            length = len(bits) - start
        if start < 0 or length < 0 or start + length > len(bits):
            raise TruncatedError("container region outside the bit string")
        self.bits = bits
        self.start = start
        self.length = length
        z = bits.leading_zeros(start, min(length, 64))
        if z >= min(length, 64):
            raise FormatError("container word marker missing")
        self.b = b = z + 1
        if 2 * b > length:
            raise TruncatedError("container header truncated")
        self.p = p = bits.read(start + b, b)
        header = (p + 2) * b
        if header > length:
            raise TruncatedError("container header truncated")
        self.payload = start + header
        self.n = length - header

    def __len__(self) -> int:
        return self.p

    def _start_word(self, i: int) -> int:
        return self.bits.read(self.start + (i + 1) * self.b, self.b)

    def get(self, i: int) -> tuple[int, int]:
        """(1-based offset inside the payload, length) of part i, 1 <= i <= p."""
        if not 1 <= i <= self.p:
            raise IndexError(f"part {i} outside 1..{self.p}")
        s = self._start_word(i)
        e = self._start_word(i + 1) if i < self.p else self.n + 1
        if s < 1 or e < s or e > self.n + 1:
            raise FormatError(f"part {i} bounds [{s}, {e}) invalid")
        return s, e - s

    def part(self, i: int) -> tuple[int, int]:
        """(absolute bit position, length) of part i."""
        s, ln = self.get(i)
        return self.payload + s - 1, ln

    def part_bits(self, i: int) -> BitString:
        pos, ln = self.part(i)
        return self.bits.slice(pos, ln)

    def sub(self, i: int) -> "PrefixedConcat":
        """Part i read as a nested container."""
        pos, ln = self.part(i)
        return PrefixedConcat(self.bits, pos, ln)

    def validate(self) -> None:
        prev = 1
        if self.p and self._start_word(1) != 1:
            raise FormatError("first part does not start at 1")
        for i in range(1, self.p + 1):
            s = self._start_word(i)
            if s < prev or s > self.n + 1:
                raise FormatError(f"part {i} start {s} out of order")
            prev = s

    def parts(self) -> list[BitString]:
        return [self.part_bits(i) for i in range(1, self.p + 1)]
