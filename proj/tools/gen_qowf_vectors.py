#!/usr/bin/env python3
"""Regenerates tests/data/qowf_golden.json.

Independent re-derivation of the angle expansion used by qcheque::derive_angles,
written against hashlib only. Run from the repository root:

    python3 tools/gen_qowf_vectors.py > tests/data/qowf_golden.json
"""

import hashlib
import json
import math

TAG = b"qcheque/qowf/v1"


def encode(data: bytes, bits: int) -> bytes:
    packed = bytearray(data[: (bits + 7) // 8])
    if bits % 8:
        packed[-1] &= (0xFF << (8 - bits % 8)) & 0xFF
    return bits.to_bytes(8, "big") + bytes(packed)


def expand(seed: bytes, length: int) -> bytes:
    out = b""
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(TAG + counter.to_bytes(4, "big") + seed).digest()
        counter += 1
    return out[:length]


def unit(eight: bytes) -> float:
    return (int.from_bytes(eight, "big") >> 11) * 2.0**-53


def angles(data: bytes, bits: int, n: int):
    stream = expand(encode(data, bits), 16 * n)
    out = []
    for j in range(n):
        u1 = unit(stream[16 * j : 16 * j + 8])
        u2 = unit(stream[16 * j + 8 : 16 * j + 16])
        out.append([round(math.acos(math.sqrt(u1)), 12), round(2.0 * math.pi * u2, 12)])
    return out


CASES = [
    ("00", 8, 3),
    ("01", 8, 3),  # one bit away from the case above
    ("deadbeef", 32, 3),
    ("48656c6c6f", 40, 4),
    ("abcd", 13, 2),  # not byte aligned
    ("ff" * 40, 320, 8),
]


def main():
    vectors = [
        {"input_hex": h, "bits": b, "n": n, "angles": angles(bytes.fromhex(h), b, n)}
        for h, b, n in CASES
    ]
    print(json.dumps({"format": "qcheque.qowf-golden", "version": 1, "vectors": vectors}, indent=2))


if __name__ == "__main__":
    main()
