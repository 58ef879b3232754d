"""Portable DEFLATE encoder (RFC 1951) using a single fixed-Huffman block.

The output of zlib depends on the zlib build (stock zlib, zlib-ng, vendor
forks all choose different matches), so compressed sizes are not stable
across machines.  This encoder has no such dependency: greedy LZ77 with a
bounded hash chain and the fixed Huffman tables.  Its output is a valid raw
deflate stream and decompresses with ``zlib.decompress(data, -15)``.
"""

from __future__ import annotations

WINDOW_SIZE = 32768
MIN_MATCH = 3
MAX_MATCH = 258
MAX_CHAIN = 64

PARAMS = {
    "codec": "deflate-fixed",
    "window": WINDOW_SIZE,
    "min_match": MIN_MATCH,
    "max_match": MAX_MATCH,
    "max_chain": MAX_CHAIN,
    "parsing": "greedy",
}

_LENGTH_BASE = (3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31,
                35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258)
_LENGTH_EXTRA = (0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2,
                 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0)
_DIST_BASE = (1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193,
              257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145,
              8193, 12289, 16385, 24577)
_DIST_EXTRA = (0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6,
               7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13)


def _build_tables():
    # length -> (symbol, extra bits, extra value); distance likewise
    length_table = [None] * (MAX_MATCH + 1)
    for code in range(len(_LENGTH_BASE)):
        base, extra = _LENGTH_BASE[code], _LENGTH_EXTRA[code]
        for length in range(base, min(base + (1 << extra), MAX_MATCH + 1)):
            length_table[length] = (257 + code, extra, length - base)
    # 258 has its own code (285) even though 227 + 31 would also reach it
    length_table[MAX_MATCH] = (285, 0, 0)
    dist_table = {}
    for code in range(len(_DIST_BASE)):
        dist_table[code] = (_DIST_BASE[code], _DIST_EXTRA[code])
    return length_table, dist_table


_LENGTH_TABLE, _DIST_TABLE = _build_tables()


def _dist_code(distance: int) -> tuple[int, int, int]:
    lo, hi = 0, len(_DIST_BASE) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _DIST_BASE[mid] <= distance:
            lo = mid
        else:
            hi = mid - 1
    return lo, _DIST_EXTRA[lo], distance - _DIST_BASE[lo]


def _fixed_code(symbol: int) -> tuple[int, int]:
    """Return (code, bit length) of a literal/length symbol in the fixed table."""
    if symbol < 144:
        return 0x30 + symbol, 8
    if symbol < 256:
        return 0x190 + symbol - 144, 9
    if symbol < 280:
        return symbol - 256, 7
    return 0xC0 + symbol - 280, 8


def _reverse(code: int, nbits: int) -> int:
    out = 0
    for _ in range(nbits):
        out = (out << 1) | (code & 1)
        code >>= 1
    return out


# Huffman codes are sent most-significant bit first; pre-reverse them so the
# writer can stay LSB-first.
_LITLEN = [(_reverse(*_fixed_code(s)), _fixed_code(s)[1]) for s in range(288)]


def tokenize(data: bytes) -> list[tuple[int, int]]:
    """Greedy LZ77 parse.

    Returns a list of ``(literal, 0)`` or ``(length, distance)`` tokens.  A
    token with distance 0 is a literal byte.
    """
    n = len(data)
    tokens: list[tuple[int, int]] = []
    chains: dict[bytes, list[int]] = {}
    i = 0
    while i < n:
        best_len = 0
        best_dist = 0
        if i + MIN_MATCH <= n:
            key = data[i:i + MIN_MATCH]
            candidates = chains.get(key)
            if candidates:
                limit = min(MAX_MATCH, n - i)
                checked = 0
                for p in reversed(candidates):
                    dist = i - p
                    if dist > WINDOW_SIZE or checked >= MAX_CHAIN:
                        break
                    checked += 1
                    length = MIN_MATCH
                    while length < limit and data[p + length] == data[i + length]:
                        length += 1
                    if length > best_len:
                        best_len, best_dist = length, dist
                        if length == limit:
                            break
        if best_len >= MIN_MATCH:
            tokens.append((best_len, best_dist))
            stop = min(i + best_len, n - MIN_MATCH + 1)
            for j in range(i, stop):
                chains.setdefault(data[j:j + MIN_MATCH], []).append(j)
            i += best_len
        else:
            tokens.append((data[i], 0))
            if i + MIN_MATCH <= n:
                chains.setdefault(data[i:i + MIN_MATCH], []).append(i)
            i += 1
    return tokens


def _token_bits(length: int, dist: int) -> int:
    if dist == 0:
        return _LITLEN[length][1]
    symbol, extra, _ = _LENGTH_TABLE[length]
    _, dextra, _ = _dist_code(dist)
    return _LITLEN[symbol][1] + extra + 5 + dextra


def compressed_size(data: bytes) -> int:
    """Size in bytes of ``compress(data)``, computed without emitting bits."""
    bits = 3 + _LITLEN[256][1]
    for length, dist in tokenize(data):
        bits += _token_bits(length, dist)
    return (bits + 7) // 8


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, nbits: int):
        self.acc |= value << self.nbits
        self.nbits += nbits
        while self.nbits >= 8:
            self.out.append(self.acc & 0xFF)
            self.acc >>= 8
            self.nbits -= 8

    def finish(self) -> bytes:
        if self.nbits:
            self.out.append(self.acc & 0xFF)
            self.acc = 0
            self.nbits = 0
        return bytes(self.out)


def compress(data: bytes) -> bytes:
    """Encode ``data`` as one final fixed-Huffman deflate block (raw, no header)."""
    w = _BitWriter()
    w.write(1, 1)  # BFINAL
    w.write(1, 2)  # BTYPE=01, fixed Huffman
    for length, dist in tokenize(data):
        if dist == 0:
            w.write(*_LITLEN[length])
            continue
        symbol, extra, extra_val = _LENGTH_TABLE[length]
        w.write(*_LITLEN[symbol])
        if extra:
            w.write(extra_val, extra)
        dcode, dextra, dval = _dist_code(dist)
        w.write(_reverse(dcode, 5), 5)
        if dextra:
            w.write(dval, dextra)
    w.write(*_LITLEN[256])
    return w.finish()
