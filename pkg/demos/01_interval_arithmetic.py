"""Directed-rounding interval and rectangle arithmetic.

Every quantity in the certification pipeline is an interval (or a complex
rectangle) whose endpoints are decimal floats: lower endpoints round toward
-infinity, upper endpoints toward +infinity, so the true value can never
escape.  This script walks through the basic guarantees.
"""

from decimal import Decimal

from renormcert import RoundingContext, interval, rectangle

ctx = RoundingContext(precision=30)

print("== enclosure of 1/3 at 30 digits ==")
third = ctx.idiv(interval(1), interval(3))
print(f"  1/3 in {third}")
print(f"  width: {ctx.iwidth(third)}   (one unit in the last place)")

print("\n== the same computation never depends on ambient state ==")
import decimal
decimal.getcontext().prec = 5   # sabotage the thread context
assert ctx.idiv(interval(1), interval(3)) == third
decimal.getcontext().prec = 28
print("  poisoning the thread-local decimal context changes nothing")

print("\n== interval multiplication covers every sign case ==")
x, y = interval(-1, 2), interval(3, 4)
print(f"  {x} * {y} = {ctx.imul(x, y)}")

print("\n== complex rectangles ==")
i = rectangle(0, 1)
print(f"  i * i = {ctx.rmul(i, i)}")
z = rectangle(3, 4)
print(f"  |3+4i| in {ctx.rabs(z)}")

print("\n== precision is a dial: more digits, tighter enclosures ==")
for p in (15, 30, 60):
    c = RoundingContext(p)
    t = c.idiv(interval(1), interval(3))
    print(f"  {p:3d} digits: width {c.iwidth(t)}")

print("\n== rigorous square roots via exact-square correction ==")
two = Decimal(2)
lo, hi = ctx.sqrt_dn(two), ctx.sqrt_up(two)
print(f"  sqrt(2) in [{lo},\n              {hi}]")
assert ctx._exact.multiply(lo, lo) <= two <= ctx._exact.multiply(hi, hi)
print("  endpoint squares verified to straddle 2 exactly")
