"""MSB-first bit writer/reader with Elias gamma and fixed-width fields."""

from __future__ import annotations


class BitstreamError(ValueError):
    pass


def elias_len(n: int) -> int:
    if n < 1:
        raise ValueError(f"Elias gamma codes positive integers only, got {n}")
    return 2 * (n.bit_length() - 1) + 1


class BitWriter:
    def __init__(self):
        self._parts: list[str] = []
        self.nbits = 0

    def write_bits(self, value: int, width: int) -> None:
        if width == 0:
            return
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        self._parts.append(format(value, f"0{width}b"))
        self.nbits += width

    def write_gamma(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"Elias gamma codes positive integers only, got {n}")
        body = format(n, "b")
        self._parts.append("0" * (len(body) - 1) + body)
        self.nbits += 2 * len(body) - 1

    def getvalue(self) -> bytes:
        bits = "".join(self._parts)
        pad = -len(bits) % 8
        bits += "0" * pad
        if not bits:
            return b""
        return int(bits, 2).to_bytes(len(bits) // 8, "big")


class BitReader:
    def __init__(self, data: bytes, nbits: int | None = None):
        full = len(data) * 8
        if nbits is None:
            nbits = full
        if nbits > full:
            raise BitstreamError("bit count exceeds payload")
        self._bits = format(int.from_bytes(data, "big"), f"0{full}b")[:nbits] if data else ""
        self.pos = 0
        self.nbits = nbits

    @property
    def remaining(self) -> int:
        return self.nbits - self.pos

    def read_bits(self, width: int) -> int:
        if width == 0:
            return 0
        end = self.pos + width
        if end > self.nbits:
            raise BitstreamError("unexpected end of bit stream")
        value = int(self._bits[self.pos:end], 2)
        self.pos = end
        return value

    def read_gamma(self) -> int:
        one = self._bits.find("1", self.pos, self.nbits)
        if one < 0:
            raise BitstreamError("unterminated Elias code")
        zeros = one - self.pos
        end = one + zeros + 1
        if end > self.nbits:
            raise BitstreamError("unexpected end of bit stream")
        value = int(self._bits[one:end], 2)
        self.pos = end
        return value
