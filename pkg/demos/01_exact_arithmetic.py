"""Exact arithmetic in Q(sqrt(d)): the steady leading coefficients for n = 2."""

from painlevekit.exactnum import QuadElem

sq = QuadElem.sqrt(2)
a0 = -1 / (sq + 1)
b0 = sq / (sq + 1)
print("a0 =", a0)
print("b0 =", b0)
print("a0 - b0 =", a0 - b0)  # exactly -1
print("b0^2 - 2 a0^2 =", b0 * b0 - 2 * a0 * a0)  # exactly 0
