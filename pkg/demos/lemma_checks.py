"""Numerical spot checks of the analytic ingredients, one block per lemma.

Everything here is also wired into `fujita-lab verify`; this script is the
readable version, printing the measured quantities next to their bounds.
"""

import math

import fujitalab as fl
from fujitalab.oracles import contraction_constant_study, young_batch

# ---- Young: a*b <= eps*a^p + C(eps)*b^q at conjugate exponents ------------

row = fl.young_check(a=1.7, b=0.9, p=1.5, q=3.0, eps=0.25)
print("young: lhs %.6f vs rhs %.6f (eps 0.25)" % (row.lhs, row.rhs))
ok, excess = young_batch(n=100000, seed=0)
print("young batch (1e5 random points): all hold =", ok,
      " worst excess = %.2e" % excess)
print()

# ---- nonlinearity contraction splitting -----------------------------------

# |x^p a - y^p b| against the two-part splitting used by the fixed point;
# the ratio is allowed a p-dependent constant, and saturates fast
head, full = contraction_constant_study(p=3.0, alpha=1.5, n=20000, seed=7)
print("contraction ratio: max over first 2000 draws %.4f, over all %.4f"
      % (head, full))
print()

# ---- Mittag-Leffler values -------------------------------------------------

for z in (0.5, 2.0, 5.0):
    r = fl.mittag_leffler(fl.MLParams(1.0, z))
    print("E_1(%.1f) = %.12f   exp = %.12f   terms %d"
          % (z, r.value, math.exp(z), r.terms_used))
r = fl.mittag_leffler(fl.MLParams(0.5, 1.0))
print("E_1/2(1)  = %.12f   remainder bound %.1e" % (r.value, r.remainder_bound))
print()

# ---- Gronwall envelope -----------------------------------------------------

# f(t) <= A + M integral (t-s)^(-sigma) f(s) ds forces f below the envelope
A, M, sigma = 1.0, 0.5, 0.25
print("gronwall envelope for A=1, M=0.5, sigma=0.25:")
for t in (0.0, 0.5, 1.0, 2.0):
    print("  t=%.1f  bound %.6f" % (t, fl.gronwall_bound(A, M, sigma, t)))
print()

# ---- cutoff Laplacian bound ------------------------------------------------

chk = fl.cutoff_laplacian_check(kind="psi2", theta=4.0, dim=1, points=801)
print("cutoff |Lap psi^theta| <= C psi^(theta-2): refinement order %.2f, "
      "empirical C %.3f" % (chk.order, chk.c_emp))
print()

# ---- forcing profile conditions -------------------------------------------

w = fl.ProfileSpec.gaussian_sum([(0.8, 1.0, (0.0,)), (-1.0, 2.0, (0.0,))])
rep = fl.w_condition_check(w, dim=1)
print("w = 0.8 exp(-x^2) - exp(-2x^2):")
print("  min kernel average %.3e at (lambda, x) = %s" %
      (rep.min_kernel_average, rep.argmin))
print("  kernel averages nonnegative:", rep.holds_kernel_nonneg)
print("  integral %.6f positive: %s" % (rep.integral, rep.integral_positive))
print()

# ---- scaling certificate ---------------------------------------------------

w3 = fl.ProfileSpec.gaussian(1.0, 1.0, (0.0, 0.0, 0.0))
cert = fl.certificate_scaling_check(3, 2.0, 2.0, 0.0, -0.25, w=w3)
print("scaling certificate at (3, 2, 2, 0, -0.25): theta = %.3f" % cert.theta)
print("  measured F slope %.3f vs expected %.3f, sign gap %.3f, passed %s"
      % (cert.slope_F, cert.slope_expected_F, cert.sign_gap, cert.passed))
