#!/usr/bin/env python3
"""Brute-force box-counting dimension of a PBM image.

Independent cross-check for the C++ fractal_dimension(): reads a P1 PBM,
counts occupied s x s boxes (grid anchored at the origin) for s in
{2, 4, ..., 256}, and fits the least-squares slope of log N(s) against
log(1/s).  Run it on the fixture rasters and freeze the agreement into the
unit tests.

Usage: box_count.py IMAGE.pbm [IMAGE.pbm ...]
"""

import math
import sys


def read_pbm(path):
    with open(path, "rb") as fh:
        tokens = []
        for line in fh.read().split(b"\n"):
            line = line.split(b"#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != b"P1":
        raise SystemExit(f"{path}: not an ASCII PBM")
    width, height = int(tokens[1]), int(tokens[2])
    bits = [int(t) for t in tokens[3:]]
    if len(bits) != width * height:
        raise SystemExit(f"{path}: expected {width * height} pixels, got {len(bits)}")
    return width, height, bits


def box_count(width, height, bits, s):
    boxes = set()
    for y in range(height):
        row = y * width
        by = y // s
        for x in range(width):
            if bits[row + x]:
                boxes.add((x // s, by))
    return len(boxes)


def dimension(width, height, bits, sizes):
    xs = [math.log(1.0 / s) for s in sizes]
    ys = [math.log(box_count(width, height, bits, s)) for s in sizes]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


def main(argv):
    if len(argv) < 2:
        raise SystemExit(__doc__)
    sizes = [2, 4, 8, 16, 32, 64, 128, 256]
    for path in argv[1:]:
        width, height, bits = read_pbm(path)
        fd = dimension(width, height, bits, sizes)
        print(f"{path}: FD = {fd:.12f}")


if __name__ == "__main__":
    main(sys.argv)
