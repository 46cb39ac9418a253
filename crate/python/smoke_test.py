"""Smoke test for the kakeya_py extension module."""

from fractions import Fraction

import kakeya_py as k


def frac(s):
    return Fraction(s)


def main():
    assert [k.fib(n) for n in range(1, 11)] == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    assert k.fib(100) == 354224848179261915075
    assert all(k.cassini(n) for n in range(2, 50))
    assert k.doubling(2) == (True, True)

    lo, hi = k.s_constant("1/10000000")
    assert frac(lo) <= Fraction(3359886, 10**6) + Fraction(1, 10**6) and frac(hi) >= Fraction(3359885, 10**6)
    partial = sum(Fraction(1, k.fib(i)) for i in range(1, 60))
    assert frac(lo) <= partial + Fraction(1, 10**9) and partial <= frac(hi)

    fib = k.Sequence("fibonacci")
    assert fib.term(5) == "1/5"
    assert [v for _, v in fib.kakeya_check(30, strict=True)] == ["holds"] * 30

    cert = k.expand(fib, "greedy", "1/2", 10)
    assert cert.bits == "0010000000", cert
    assert cert.feasible == "FEASIBLE"
    bits, comp = k.partition(fib, "3/2", 12)
    assert all(a != b for a, b in zip(bits, comp))

    counts = k.count(fib, "1/2", 12)
    assert counts[0] == 1 and counts == sorted(counts)
    assert len(k.enumerate(fib, "1/2", 4, 12)) == 4

    special, depth = k.branch_plan(fib, "3/2", 3)
    assert special == [2, 4, 6] and depth == 6
    assert k.frequency("0110") == (2, 2, "1/2")

    try:
        k.Sequence("not-a-sequence")
    except ValueError:
        pass
    else:
        raise AssertionError("bad descriptor accepted")
    try:
        k.expand(k.Sequence("fibonacci", cap=0), "lazy", "1.3598856662", 2)
    except k.UndecidedError:
        pass
    else:
        raise AssertionError("cap 0 decided a near-tie")

    print("kakeya_py smoke test passed")


if __name__ == "__main__":
    main()
