#!/usr/bin/env python3
"""Hand-executed big-six pairing, kept independent of the C++ engine.

Six equal widths w are combined by the revised pairing procedure: sort, pair
widest with narrowest (w' = k * sqrt(a^2 + b^2)), carry the middle value when
the count is odd, repeat until one value remains.  The printed constants are
frozen into the unit tests as the expected CRAE/CRVE of six equal widths.
"""

import math


def pair_round(widths, k):
    widths = sorted(widths)
    out = []
    lo, hi = 0, len(widths) - 1
    while lo < hi:
        out.append(k * math.sqrt(widths[lo] ** 2 + widths[hi] ** 2))
        lo += 1
        hi -= 1
    if lo == hi:  # odd count: middle value carries over unchanged
        out.append(widths[lo])
    return out


def equivalent(widths, k):
    while len(widths) > 1:
        widths = pair_round(widths, k)
    return widths[0]


def main():
    for name, k in [("arteriole (k=0.88)", 0.88), ("venule    (k=0.95)", 0.95)]:
        value = equivalent([1.0] * 6, k)
        print(f"{name}: six equal widths w -> {value:.12f} * w")


if __name__ == "__main__":
    main()
