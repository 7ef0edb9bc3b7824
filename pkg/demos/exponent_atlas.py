"""Walk the exponent calculus at one fully worked parameter point.

The model is u_t - Lap(u) = ||u(t)||_q^alpha |u|^p + t^rho w(x) on R^N.
All derived exponents stay exact rationals when the inputs are rationals,
so every number printed below is a Fraction, not a float.
"""

from fractions import Fraction as Fr

import fujitalab as fl

N = 2
p = Fr(3)
q = Fr(3)
alpha = Fr(0)
rho = Fr(-1, 2)

print("parameter point: N=%d  p=%s  q=%s  alpha=%s  rho=%s" % (N, p, q, alpha, rho))
print()

# the problem record itself carries plain floats; the calculus functions
# below accept exact rationals directly
spec = fl.ProblemSpec(N, float(p), float(q), float(alpha), float(rho))
rep = fl.exponent_report(spec)
print(rep.table())
print()

# the same quantities one at a time, with their defining balances
d = fl.delta(alpha, q)
print("delta = alpha(1 - 1/q)          =", d)
print("scaling p (zero-mass balance)   =", fl.fujita_scaling_p(N, q, alpha))
print("p* at rho =", rho, "             =", fl.p_star(N, rho))

gep = fl.gep_exponents(N, p, q, alpha, rho)
print("global-existence threshold      =", gep.threshold)
print("p_c                             =", gep.p_c)
print("ell                             =", gep.ell)

# the window lives in 1/r, so (1/6, 1/3) means r between 3 and 6
win = fl.r_window(N, p, q, alpha, rho)
print("window in 1/r                   = (%s, %s)" % (win.lo, win.hi))
for r in (Fr(7, 2), Fr(5), Fr(8)):
    print("  r = %-5s in window: %s" % (r, win.contains_r(r)))

print("beta at r = 4                   =", fl.beta(N, gep.p_c, Fr(4)))
print("upper bound 1/(p+alpha)         =", fl.beta_upper_bound(p, q, alpha))
print()

# how the blow-up threshold moves with dimension at fixed q, alpha, rho
print("threshold p as N grows (q=3, alpha=1/2, rho=-1/2):")
for n in range(2, 9):
    g = fl.gep_exponents(n, Fr(5), Fr(3), Fr(1, 2), Fr(-1, 2))
    print("  N=%d  threshold=%-8s p_c=%s" % (n, g.threshold, g.p_c))
