#!/usr/bin/env python3
"""Exact-fraction solution of the three-point regression fixture.

Solves the normal equations for X = {0, 1, 2}, y = {1, 2, 2} symbolically so
the slope/intercept/R^2 frozen in the unit tests carry no floating-point
doubt.
"""

from fractions import Fraction


def main():
    xs = [Fraction(v) for v in (0, 1, 2)]
    ys = [Fraction(v) for v in (1, 2, 2)]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    sse = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    sst = sum((y - my) ** 2 for y in ys)
    r2 = 1 - sse / sst
    print(f"slope     = {slope} = {float(slope)!r}")
    print(f"intercept = {intercept} = {float(intercept)!r}")
    print(f"R^2       = {r2} = {float(r2)!r}")


if __name__ == "__main__":
    main()
