#!/usr/bin/env python3
"""Writes the descriptor cache fixtures with struct, independently of the C++ writer."""
import struct
from pathlib import Path

here = Path(__file__).parent


def write(name, kind, keypoints, dim, rows, elem):
    out = bytearray(b"PGDC")
    out += struct.pack("<HBII", 1, kind, len(keypoints), dim)
    for x, y in keypoints:
        out += struct.pack("<ff", x, y)
    for row in rows:
        assert len(row) == dim
        out += struct.pack("<%d%s" % (dim, elem), *row)
    (here / name).write_bytes(bytes(out))


write("golden_real.pgdc", 0, [(1.5, 2.25), (379.0, 0.0)], 3,
      [[0.5, -1.0, 3.0], [1e-3, 2.0, -0.25]], "f")
write("golden_binary.pgdc", 1, [(10.0, 20.0), (30.5, 40.75), (0.0, 0.0)], 4,
      [[0x00, 0xFF, 0x0F, 0xA5], [0x01, 0x02, 0x04, 0x08], [0x80, 0x40, 0x20, 0x10]], "B")
