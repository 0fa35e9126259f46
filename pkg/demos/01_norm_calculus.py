# The p-norm and where it stops being smooth.
#
# Away from the origin ||x||_p is smooth for every finite p > 1, but its
# second derivatives only survive the coordinate hyperplanes when p >= 2.
# This walk-through checks the closed forms against finite differences and
# then watches a second derivative blow up.
import numpy as np

from pcones import Exponent, classify_c2, conjugate, gradient, hessian, norm
from pcones.finitediff import fd_gradient, fd_jacobian
from pcones.pnorm import c2_divergence_probe, loglog_slope

np.set_printoptions(precision=6, suppress=True)

# Conjugate exponents pair up as 1/p + 1/q = 1.
for p in (1.0, 1.5, 2.0, 3.0, np.inf):
    print(f"p = {p:>4} -> q = {conjugate(p)}")

x = np.array([1.0, -2.0, 0.5])
print("||x||_3 =", norm(x, 3))

# Gradient: sign(x_i) (|x_i| / ||x||)^(p-1).  Central differences agree.
g = gradient(x, 3)
print("gradient      ", g)
print("finite diff   ", fd_gradient(lambda y: norm(y, 3), x))

# Euler's identity <grad, x> = ||x|| and the dual-norm identity ||grad||_q = 1
print("<g, x> - ||x|| =", g @ x - norm(x, 3))
print("||g||_q        =", norm(g, conjugate(3)))

# The Hessian is PSD with x in its kernel (the norm is linear along rays).
H = hessian(x, 3)
print("Hessian\n", H)
print("H x =", H @ x)
print("max |H - FD| =", np.abs(H - fd_jacobian(lambda y: gradient(y, 3), x)).max())

# With a zero coordinate the picture depends on p.
z = np.array([1.0, 0.0])
for p in (1.5, 3.0):
    print(f"p = {p}: {classify_c2(z, p).value} at {z}")

# The second difference quotient in the zero coordinate grows like h^(p-2)
# when p < 2; for p >= 2 it settles down.
steps = [10.0 ** -k for k in range(2, 8)]
for p in (1.2, 1.5, 1.8, 2.0, 3.0):
    pts = c2_divergence_probe(z, Exponent(p), 1, 1, steps)
    qs = ", ".join(f"{q:9.3g}" for _, q in pts)
    print(f"p = {p}: slope {loglog_slope(pts):+.3f} (p - 2 = {p - 2:+.1f}); quotients {qs}")
