"""Poincare-disk primitives.

The disk is the canonical chart everywhere in this package.  Group elements
live in SL(2,R) acting on the upper half-plane; the Cayley transform
C(z) = (z - i)/(z + i) carries that action to the disk, where each element
becomes an SU(1,1) pair (alpha, beta) acting by

    w  ->  (alpha*w + beta) / (conj(beta)*w + conj(alpha)).

All functions accept scalars or numpy arrays of complex disk points.
"""

import numpy as np


def cayley_to_disk(z):
    """Upper half-plane point -> disk point."""
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def cayley_to_hp(w):
    """Disk point -> upper half-plane point."""
    w = np.asarray(w, dtype=complex)
    return 1j * (1 + w) / (1 - w)


def su11_from_sl2(mat):
    """Conjugate a real SL(2,R) matrix into its disk-action pair (alpha, beta)."""
    a, b = mat[0, 0], mat[0, 1]
    c, d = mat[1, 0], mat[1, 1]
    # C @ M @ C^{-1} with C = [[1,-i],[1,i]], C^{-1} = (1/2i)[[i,i],[-1,1]]
    alpha = 0.5 * (a + d) + 0.5j * (b - c)
    beta = 0.5 * (a - d) - 0.5j * (b + c)
    norm = np.sqrt(abs(alpha) ** 2 - abs(beta) ** 2)
    return alpha / norm, beta / norm


def su11_apply(pair, w):
    """Apply a disk-action pair to disk points."""
    alpha, beta = pair
    return (alpha * w + beta) / (np.conj(beta) * w + np.conj(alpha))


def su11_mul(p1, p2):
    """Compose two disk-action pairs (p1 after p2)."""
    a1, b1 = p1
    a2, b2 = p2
    return a1 * a2 + b1 * np.conj(b2), a1 * b2 + b1 * np.conj(a2)


def su11_inv(pair):
    alpha, beta = pair
    return np.conj(alpha), -beta


def dist(u, v):
    """Hyperbolic distance between disk points (vectorized)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    du = 1.0 - np.abs(u) ** 2
    dv = 1.0 - np.abs(v) ** 2
    x = 2.0 * np.abs(u - v) ** 2 / (du * dv)
    return np.arccosh(1.0 + x)


def translate_to_origin(c, w):
    """The disk automorphism taking c -> 0, applied to w."""
    return (w - c) / (1.0 - np.conj(c) * w)


def from_origin(c, w):
    """Inverse of translate_to_origin(c, .)."""
    return (w + c) / (1.0 + np.conj(c) * w)


def geodesic_point(u, v, s):
    """Point at hyperbolic distance s from u along the geodesic toward v.

    s may be an array; broadcasting over segment endpoints is supported when
    u, v, s share a shape.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    vp = translate_to_origin(u, v)
    av = np.abs(vp)
    direction = np.where(av > 0, vp / np.where(av > 0, av, 1.0), 0.0)
    r = np.tanh(np.asarray(s) / 2.0)
    return from_origin(u, r * direction)


def geodesic_midpoint(u, v):
    return geodesic_point(u, v, dist(u, v) / 2.0)


def metric_factor(w):
    """Conformal factor lambda with ds_hyp = lambda * ds_euc, lambda = 2/(1-|w|^2)."""
    return 2.0 / (1.0 - np.abs(w) ** 2)


class BoundaryGeodesic:
    """Unparametrized oriented disk geodesic given by two boundary angles.

    Stores a disk automorphism carrying the geodesic to the diameter
    (-1, +1) with the forward endpoint at +1, so that distances to the
    geodesic and points along it have closed forms.
    """

    __slots__ = ("angle_neg", "angle_pos", "pair", "inv_pair")

    def __init__(self, angle_neg, angle_pos):
        self.angle_neg = float(angle_neg)
        self.angle_pos = float(angle_pos)
        xm = np.exp(1j * self.angle_neg)
        xp = np.exp(1j * self.angle_pos)
        span = np.angle(xp / xm)  # in (-pi, pi]
        if span < 0:
            span += 2 * np.pi
        mid = self.angle_neg + span / 2.0
        delta = span / 2.0  # endpoints at mid +/- delta, delta in (0, pi)
        x0 = np.tan(np.pi / 4.0 - delta / 2.0)
        # rotate by -mid, translate x0 -> 0, rotate by -pi/2 + pi/2 fixup below
        rot = (np.exp(-0.5j * mid), 0.0)
        trans = (1.0 / np.sqrt(1 - x0 ** 2), -x0 / np.sqrt(1 - x0 ** 2))
        pair = su11_mul(trans, rot)
        # after these, endpoints sit at +/- i with xp at +i; rotate -pi/2 to put xp at +1
        quarter = (np.exp(1j * np.pi / 4.0), 0.0)
        pair = su11_mul(quarter, pair)
        wp = su11_apply(pair, xp)
        if wp.real < 0:  # orientation fixup
            pair = su11_mul((1j, 0.0), pair)
        self.pair = pair
        self.inv_pair = su11_inv(pair)

    def distance(self, w):
        """Hyperbolic distance from disk points to the geodesic."""
        z = su11_apply(self.pair, np.asarray(w, dtype=complex))
        return np.arcsinh(2.0 * np.abs(z.imag) / (1.0 - np.abs(z) ** 2))

    def point_at(self, s):
        """Point on the geodesic at signed arclength s (s=0 nearest the image origin)."""
        return su11_apply(self.inv_pair, np.tanh(np.asarray(s, dtype=float) / 2.0) + 0j)

    def foot_parameter(self, w):
        """Arclength parameter of the orthogonal projection of w onto the geodesic."""
        z = su11_apply(self.pair, np.asarray(w, dtype=complex))
        # foot of z=a+ib on the real diameter solves a*x^2 - (1+|z|^2)*x + a = 0
        a = z.real
        q = 1.0 + np.abs(z) ** 2
        disc = np.sqrt(np.maximum(q * q - 4.0 * a * a, 0.0))
        x = np.where(np.abs(a) > 1e-300, 2.0 * a / (q + disc), 0.0)
        return 2.0 * np.arctanh(x)
