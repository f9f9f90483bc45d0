"""The genus-2 regular-octagon surface group and its conjugacy classes.

Group elements are real SL(2,R) matrices acting on the upper half-plane;
geometry is done in the Poincare disk via the Cayley transform (see disk.py).
The canonical generators (a1, b1, a2, b2) satisfy the genus-2 relation
[a1,b1][a2,b2] = 1 and are built out of the four octagon side-pairing
translations R_{k pi/4} T R_{-k pi/4}, cosh(ell/2) = 1 + sqrt(2).
"""

import csv
import os
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import disk
from .errors import CapacityExceeded, NonHyperbolic, NotReduced

HYP_TOL = 1e-9                     # |trace| - 2 must exceed this
SYSTOLE = 2.0 * np.arccosh(1.0 + np.sqrt(2.0))
GENERATOR_TRACE = 2.0 * (1.0 + np.sqrt(2.0))
DEFAULT_BUDGET = 10_000_000

_LETTER_NAMES = {1: "a1", -1: "a1-", 2: "b1", -2: "b1-", 3: "a2", -3: "a2-", 4: "b2", -4: "b2-"}
_NAME_LETTERS = {v: k for k, v in _LETTER_NAMES.items()}
# alphabet order a1 < a1^-1 < b1 < b1^-1 < a2 < a2^-1 < b2 < b2^-1
_LETTER_RANK = {1: 0, -1: 1, 2: 2, -2: 3, 3: 4, -3: 5, 4: 6, -4: 7}
_RANK_LETTER = {v: k for k, v in _LETTER_RANK.items()}


def format_word(word):
    return ".".join(_LETTER_NAMES[l] for l in word)


def parse_word(text):
    if not text:
        return ()
    try:
        return tuple(_NAME_LETTERS[tok] for tok in text.split("."))
    except KeyError as exc:
        raise ValueError(f"unknown generator token in word {text!r}") from exc


class GroupElement:
    """A hyperbolic-plane isometry with word provenance.

    The matrix is kept in SL(2,R) (determinant renormalized after every
    product); the word is a tuple of signed generator indices.
    """

    __slots__ = ("matrix", "word", "_pair")

    def __init__(self, matrix, word=()):
        m = np.array(matrix, dtype=float)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0:
            raise ValueError("matrix must have positive determinant")
        self.matrix = m / np.sqrt(det)
        self.word = tuple(word)
        self._pair = None

    @property
    def trace(self):
        return self.matrix[0, 0] + self.matrix[1, 1]

    @property
    def disk_pair(self):
        if self._pair is None:
            self._pair = disk.su11_from_sl2(self.matrix)
        return self._pair

    def __mul__(self, other):
        return GroupElement(self.matrix @ other.matrix, self.word + other.word)

    def inverse(self):
        a, b, c, d = self.matrix.ravel()
        return GroupElement([[d, -b], [-c, a]], tuple(-l for l in reversed(self.word)))

    def apply(self, w):
        """Mobius action on disk points."""
        return disk.su11_apply(self.disk_pair, np.asarray(w, dtype=complex))

    def is_hyperbolic(self, tol=HYP_TOL):
        return abs(self.trace) > 2.0 + tol

    def __repr__(self):
        return f"GroupElement({format_word(self.word) or 'id'}, trace={self.trace:.6f})"


@dataclass(frozen=True)
class Geodesic:
    """Oriented disk geodesic; endpoints as unit-circle angles, attracting second."""

    angle_neg: float
    angle_pos: float

    def boundary(self):
        return disk.BoundaryGeodesic(self.angle_neg, self.angle_pos)

    def endpoints(self):
        return np.exp(1j * self.angle_neg), np.exp(1j * self.angle_pos)


@dataclass(frozen=True)
class ConjugacyClass:
    """One cyclic-reduction equivalence class of reduced words."""

    cyclic_word: tuple
    representative: GroupElement = field(compare=False, hash=False)
    length_g1: float = field(compare=False, hash=False)
    primitive: bool = field(compare=False, hash=False)

    @property
    def word_text(self):
        return format_word(self.cyclic_word)

    def inverse_word(self):
        return _canonical_rotation(tuple(-l for l in reversed(self.cyclic_word)))


class SurfaceGroup:
    """The Bolza surface group with canonical generators and side pairings."""

    def __init__(self, generators, side_pairings):
        self.generators = list(generators)      # a1, b1, a2, b2
        self.side_pairings = list(side_pairings)  # g0..g3 octagon translations
        self.genus = 2
        # 8 letters for Dirichlet reduction: pairings and their inverses
        self._letters = []
        for g in self.side_pairings:
            self._letters.append(g)
            self._letters.append(g.inverse())
        self._letter_pairs = np.array([g.disk_pair for g in self._letters])
        self._neighbor_pts = np.array([g.apply(0.0) for g in self._letters])
        self._gen_map = {}
        for i, g in enumerate(self.generators, start=1):
            self._gen_map[i] = g
            self._gen_map[-i] = g.inverse()

    def element(self, word):
        out = GroupElement(np.eye(2), ())
        for l in word:
            out = out * self._gen_map[l]
        return out

    def letter_matrices(self):
        """(8,2,2) array indexed by letter rank (a1, a1^-1, b1, ...)."""
        mats = np.empty((8, 2, 2))
        for l, r in _LETTER_RANK.items():
            mats[r] = self._gen_map[l].matrix
        return mats

    # --- fundamental domain (Dirichlet octagon at the origin) ---

    def in_domain(self, p, tol=1e-12):
        p = complex(p)
        d0 = disk.dist(p, 0.0)
        dn = disk.dist(p, self._neighbor_pts)
        return bool(np.all(d0 <= dn + tol))

    def reduce_point(self, p, search_depth=64):
        """Map p into the closed octagon; returns (point, GroupElement used)."""
        p = complex(p)
        acc = GroupElement(np.eye(2), ())
        for _ in range(search_depth):
            if self.in_domain(p):
                return p, acc
            imgs = disk.su11_apply(
                (self._letter_pairs[:, 0], self._letter_pairs[:, 1]), p)
            d = disk.dist(imgs, 0.0)
            k = int(np.argmin(d))
            if d[k] >= disk.dist(p, 0.0) - 1e-15:
                break
            p = complex(imgs[k])
            acc = self._letters[k] * acc
        if self.in_domain(p):
            return p, acc
        raise NotReduced(f"no translate within depth {search_depth} lands in the domain")

    def reduce_points(self, pts, max_steps=64):
        """Vectorized Dirichlet reduction (points only, no word tracking)."""
        z = np.array(pts, dtype=complex)
        for _ in range(max_steps):
            d0 = disk.dist(z, 0.0)
            imgs = disk.su11_apply(
                (self._letter_pairs[:, None, 0], self._letter_pairs[:, None, 1]),
                z[None, :])
            dn = disk.dist(imgs, 0.0)
            best = np.argmin(dn, axis=0)
            bestd = dn[best, np.arange(z.size)]
            move = bestd < d0 - 1e-15
            if not move.any():
                break
            z[move] = imgs[best[move], np.nonzero(move)[0]]
        return z

    def octagon_boundary_radius(self, theta):
        """Euclidean radius of the octagon boundary in direction theta."""
        theta = np.asarray(theta, dtype=float)
        t = np.tanh(SYSTOLE / 2.0)
        r = np.full(theta.shape, np.inf)
        for m in range(8):
            c = np.cos(theta - m * np.pi / 4.0)
            ok = c >= t
            root = np.where(ok, (c - np.sqrt(np.maximum(c * c - t * t, 0.0))) / t, np.inf)
            r = np.minimum(r, root)
        return r


def build_bolza_group():
    """Side-pairing translations of the regular octagon and a canonical basis.

    The translation T along the disk's real diameter has cosh(ell/2) = 1+sqrt(2);
    g_k = R_{k pi/4} T R_{-k pi/4} pair opposite sides and satisfy
    g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3 = 1.  The canonical quadruple
    (g0, g1^-1, g1^-1 g0 g2, g3^-1 g2) generates the same group and satisfies
    the genus-2 commutator relation exactly.
    """
    lam = np.exp(SYSTOLE / 2.0)
    T = np.array([[lam, 0.0], [0.0, 1.0 / lam]])

    def rot(t):
        c, s = np.cos(t / 2.0), np.sin(t / 2.0)
        return np.array([[c, s], [-s, c]])

    g = [rot(k * np.pi / 4.0) @ T @ rot(-k * np.pi / 4.0) for k in range(4)]
    gi = [np.linalg.inv(m) for m in g]

    a1 = GroupElement(g[0], (1,))
    b1 = GroupElement(gi[1], (2,))
    a2 = GroupElement(gi[1] @ g[0] @ g[2], (3,))
    b2 = GroupElement(gi[3] @ g[2], (4,))
    # side pairings expressed in canonical letters: g2 = a1^-1 b1^-1 a2, g3 = g2 b2^-1
    side = [
        GroupElement(g[0], (1,)),
        GroupElement(g[1], (-2,)),
        GroupElement(g[2], (-1, -2, 3)),
        GroupElement(g[3], (-1, -2, 3, -4)),
    ]
    return SurfaceGroup([a1, b1, a2, b2], side)


def translation_length(g, tol=HYP_TOL):
    """2*arccosh(|trace|/2); raises NonHyperbolic for non-hyperbolic input."""
    tr = abs(g.trace) if isinstance(g, GroupElement) else abs(np.trace(np.asarray(g)))
    if tr <= 2.0 + tol:
        raise NonHyperbolic(f"|trace| = {tr:.12g} <= 2 + tol")
    return 2.0 * np.arccosh(tr / 2.0)


def axis(g, tol=HYP_TOL):
    """Fixed boundary points of a hyperbolic element, attracting second."""
    if not g.is_hyperbolic(tol):
        raise NonHyperbolic(f"|trace| = {abs(g.trace):.12g} <= 2 + tol")
    a, b, c, d = g.matrix.ravel()
    if abs(c) < 1e-14:
        x1 = b / (d - a) if abs(d - a) > 1e-14 else np.inf
        fixed = (x1, np.inf)
        attr_second = abs(a) > abs(d)   # infinity attracts iff |a| > |d|
    else:
        disc = np.sqrt((a + d) ** 2 - 4.0)
        x1 = (a - d - disc) / (2.0 * c)
        x2 = (a - d + disc) / (2.0 * c)
        fixed = (x1, x2)
        attr_second = abs(c * x1 + d) <= 1.0
    repelling, attracting = (fixed[0], fixed[1]) if attr_second else (fixed[1], fixed[0])

    def to_angle(x):
        if np.isinf(x):
            return 0.0
        return float(np.angle((x - 1j) / (x + 1j)))

    return Geodesic(to_angle(repelling), to_angle(attracting))


def _canonical_rotation(word):
    n = len(word)
    ranks = [_LETTER_RANK[l] for l in word]
    best = min(tuple(ranks[i:] + ranks[:i]) for i in range(n))
    return tuple(_RANK_LETTER[r] for r in best)


def _is_power(word):
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and word == word[d:] + word[:d]:
            return True
    return False


def _reduced_words_of_length(n):
    """All freely reduced words of length n as an int8 rank array (k, n)."""
    if n == 1:
        return np.arange(8, dtype=np.int8)[:, None]
    prev = _reduced_words_of_length(n - 1)
    k = prev.shape[0]
    ext = np.repeat(prev, 7, axis=0)
    inv = prev[:, -1] ^ 1  # rank of the forbidden (inverse) letter
    tiled = np.tile(np.arange(8, dtype=np.int8), (k, 1))
    allowed = tiled[tiled != inv[:, None]].reshape(k, 7)
    return np.concatenate([ext, allowed.reshape(-1, 1)], axis=1)


def _necklace_keys(words):
    """Canonical (minimal-rotation) base-8 integer key per row, plus the mask of
    rows that are cyclically reduced."""
    k, n = words.shape
    powers = 8 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    cyc_ok = (words[:, 0] ^ 1) != words[:, -1] if n > 1 else np.ones(k, dtype=bool)
    best = words.astype(np.int64) @ powers
    cur = words
    for _ in range(n - 1):
        cur = np.roll(cur, -1, axis=1)
        best = np.minimum(best, cur.astype(np.int64) @ powers)
    return best, cyc_ok


def _decode_key(key, n):
    ranks = []
    for i in range(n):
        ranks.append(int(key // 8 ** (n - 1 - i)) % 8)
    return tuple(_RANK_LETTER[r] for r in ranks)


def enumerate_classes(group, max_word_len, length_cutoff=None, budget=None,
                      alphabet=None):
    """One ConjugacyClass per cyclic-reduction class of reduced words.

    Inverse words count as distinct (oriented) classes.  Output is sorted by
    (length_g1, cyclic word).  `alphabet` restricts to a subset of letters,
    e.g. (1, -1, 2, -2) for the rank-2 free subgroup <a1, b1>.
    """
    if max_word_len < 1:
        raise ValueError("max_word_len must be >= 1")
    if budget is None:
        budget = int(os.environ.get("STRETCHLAB_BUDGET", DEFAULT_BUDGET))
    n_letters = 8 if alphabet is None else len(alphabet)
    projected = sum(
        n_letters * (n_letters - 1) ** (n - 1) for n in range(1, max_word_len + 1))
    if projected > budget:
        raise CapacityExceeded(
            f"projected {projected} words exceeds budget {budget}")

    keep_ranks = None
    if alphabet is not None:
        keep_ranks = {_LETTER_RANK[l] for l in alphabet}
    mats = group.letter_matrices()

    classes = []
    for n in range(1, max_word_len + 1):
        words = _reduced_words_of_length(n)
        if keep_ranks is not None:
            mask = np.ones(words.shape[0], dtype=bool)
            for c in range(n):
                mask &= np.isin(words[:, c], list(keep_ranks))
            words = words[mask]
        if words.size == 0:
            continue
        keys, cyc_ok = _necklace_keys(words)
        uniq = np.unique(keys[cyc_ok])
        rows = np.empty((uniq.size, n), dtype=np.int64)
        for i in range(n):
            rows[:, i] = (uniq // 8 ** (n - 1 - i)) % 8
        # batched matrix products
        prod = mats[rows[:, 0]]
        for i in range(1, n):
            prod = prod @ mats[rows[:, i]]
        det = prod[:, 0, 0] * prod[:, 1, 1] - prod[:, 0, 1] * prod[:, 1, 0]
        prod /= np.sqrt(det)[:, None, None]
        traces = np.abs(prod[:, 0, 0] + prod[:, 1, 1])
        low = traces <= 2.0 + HYP_TOL
        if np.any(low):
            # words spelling the identity (relator cycles) are legitimate and
            # skipped; anything else non-hyperbolic signals a malformed word
            off_diag = np.abs(prod[:, 0, 1]) + np.abs(prod[:, 1, 0])
            ident = low & (np.abs(traces - 2.0) < 1e-6) & (off_diag < 1e-6)
            if np.any(low & ~ident):
                bad = int(np.argmax(low & ~ident))
                raise NonHyperbolic(
                    f"word {_decode_key(uniq[bad], n)} has |trace| {traces[bad]:.6g}")
            uniq, prod, traces = uniq[~ident], prod[~ident], traces[~ident]
        lengths = 2.0 * np.arccosh(traces / 2.0)
        if length_cutoff is not None:
            sel = lengths <= length_cutoff
            uniq, prod, traces, lengths = uniq[sel], prod[sel], traces[sel], lengths[sel]
        for i in range(uniq.size):
            word = _decode_key(uniq[i], n)
            classes.append(ConjugacyClass(
                cyclic_word=word,
                representative=GroupElement(prod[i], word),
                length_g1=float(lengths[i]),
                primitive=not _is_power(word),
            ))
    classes.sort(key=lambda c: (c.length_g1, c.word_text))
    return classes


def reduce_to_fundamental_domain(point, group, search_depth=64):
    return group.reduce_point(point, search_depth)


def translate_axes(group, base_class, depth=3, keep_within=None):
    """Axes of w g w^-1 for words w of length <= depth, deduplicated.

    Returns a list of BoundaryGeodesic.  `keep_within`: drop translates whose
    distance to the origin exceeds this bound (None keeps all).
    """
    g = base_class.representative if isinstance(base_class, ConjugacyClass) else base_class
    base = axis(g)
    em, ep = base.endpoints()
    endpoint_pairs = {}

    def add(pm, pp):
        key = (round(float(np.angle(pm)), 9), round(float(np.angle(pp)), 9))
        if key not in endpoint_pairs:
            endpoint_pairs[key] = (float(np.angle(pm)), float(np.angle(pp)))

    add(em, ep)
    frontier = [GroupElement(np.eye(2), ())]
    seen_words = {()}
    letters = [group._gen_map[l] for l in (1, -1, 2, -2, 3, -3, 4, -4)]
    for _ in range(depth):
        new_frontier = []
        for w in frontier:
            for let in letters:
                nw = let * w
                if nw.word in seen_words:
                    continue
                seen_words.add(nw.word)
                new_frontier.append(nw)
                add(nw.apply(em), nw.apply(ep))
        frontier = new_frontier
    out = []
    for am, ap in endpoint_pairs.values():
        geo = disk.BoundaryGeodesic(am, ap)
        if keep_within is not None and float(geo.distance(0.0)) > keep_within:
            continue
        out.append(geo)
    return out


class _PointSet:
    """Grid-hashed set of complex points; near-duplicates (within tol) merge.

    Cell size equals tol, so a duplicate always lands in the same or an
    adjacent cell; genuine orbit points are separated by far more than tol.
    """

    def __init__(self, tol):
        self.tol = tol
        self.cells = {}
        self.points = []

    def add(self, p):
        ix, iy = int(np.floor(p.real / self.tol)), int(np.floor(p.imag / self.tol))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q in self.cells.get((ix + dx, iy + dy), ()):
                    if abs(p - q) < self.tol:
                        return False
        self.cells.setdefault((ix, iy), []).append(p)
        self.points.append(p)
        return True


def orbit_point_count(group, radii, generators=None, merge_tol=1e-8):
    """#{gamma : d(o, gamma o) <= R} for each R, via ball-growing orbit BFS.

    `generators`: list of GroupElements (defaults to the four canonical
    generators); the identity point is counted.
    """
    gens = generators if generators is not None else group.generators
    pairs = []
    for g in gens:
        pairs.append(g.disk_pair)
        pairs.append(g.inverse().disk_pair)
    rmax = float(max(np.atleast_1d(radii)))
    pset = _PointSet(merge_tol)
    pset.add(0.0 + 0.0j)
    frontier = np.array([0.0 + 0.0j])
    while frontier.size:
        imgs = [disk.su11_apply(pr, frontier) for pr in pairs]
        cand = np.concatenate(imgs)
        cand = cand[disk.dist(cand, 0.0) <= rmax + 1e-12]
        frontier = np.array([p for p in cand if pset.add(complex(p))])
    pts = np.array(pset.points)
    d = disk.dist(pts, 0.0)
    return [int(np.sum(d <= R + 1e-12)) for R in np.atleast_1d(radii)]


def free_orbit_count(group, letters, radii, max_word_len=24, slack=3.0 * SYSTOLE):
    """Orbit count over reduced words in a free sub-alphabet, with pruning.

    Counts the identity.  Suitable for <a1> and <a1,b1>, which are free.
    """
    rmax = float(max(radii))
    gen = {l: group._gen_map[l] for l in letters}
    counts_pts = [0.0]
    frontier = [((), GroupElement(np.eye(2), ()))]
    for _ in range(max_word_len):
        nxt = []
        for word, el in frontier:
            for l in letters:
                if word and word[-1] == -l:
                    continue
                ne = el * gen[l]
                p = ne.apply(0.0)
                d = float(disk.dist(p, 0.0))
                if d <= rmax + 1e-12:
                    counts_pts.append(d)
                if d <= rmax + slack:
                    nxt.append((word + (l,), ne))
        frontier = nxt
        if not frontier:
            break
    arr = np.array(counts_pts)
    return [int(np.sum(arr <= R + 1e-12)) for R in np.atleast_1d(radii)]


# The genus-2 relator over the 8-letter alphabet, [a1,b1][a2,b2].
_RELATOR = (1, 2, -1, -2, 3, 4, -3, -4)


def _word_inverse(w):
    return tuple(-l for l in reversed(w))


def _free_reduce(w):
    out = []
    for l in w:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def _cyclic_reduce(w):
    w = _free_reduce(w)
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def _relator_subwords(k):
    """All length-k subwords of cyclic rotations of the relator and its inverse,
    mapped to their complements' inverses (the equal-in-group replacement)."""
    table = {}
    for rel in (_RELATOR, _word_inverse(_RELATOR)):
        n = len(rel)
        doubled = rel + rel
        for i in range(n):
            sub = doubled[i:i + k]
            comp = doubled[i + k:i + n]
            table.setdefault(sub, _word_inverse(comp))
    return table


_SHORTEN = {k: _relator_subwords(k) for k in (7, 6, 5)}
_EXCHANGE = _relator_subwords(4)


def dehn_cyclic_shorten(word):
    """Shorten a cyclic word to geodesic length via Dehn's algorithm.

    The surface-group relator has only length-1 pieces (C'(1/8)), so replacing
    any subword that covers more than half of a relator cycle terminates in a
    shortest cyclic representative.
    """
    w = _cyclic_reduce(word)
    changed = True
    while changed and w:
        changed = False
        n = len(w)
        doubled = w + w
        for k in (7, 6, 5):
            if k > n:
                continue
            table = _SHORTEN[k]
            for i in range(n):
                sub = doubled[i:i + k]
                if sub in table:
                    rest = doubled[i + k:i + n]
                    w = _cyclic_reduce(table[sub] + rest)
                    changed = True
                    break
            if changed:
                break
    return w


def conjugacy_normal_form(word):
    """Canonical form of the group conjugacy class of a cyclic word.

    Dehn-shortens to geodesic length, then closes under rotations and
    half-relator exchanges (length-preserving), taking the lexicographic
    minimum.  Two words are conjugate in the surface group iff their normal
    forms agree (Dehn / Greendlinger for C'(1/8) presentations).
    """
    w = dehn_cyclic_shorten(word)
    if not w:
        return ()
    seen = set()
    frontier = {_canonical_rotation(w)}
    while frontier:
        cur = frontier.pop()
        if cur in seen:
            continue
        seen.add(cur)
        n = len(cur)
        doubled = cur + cur
        if n >= 4:
            for i in range(n):
                sub = doubled[i:i + 4]
                repl = _EXCHANGE.get(sub)
                if repl is None:
                    continue
                cand = _cyclic_reduce(repl + doubled[i + 4:i + n])
                if len(cand) < n:
                    # an exchange exposed further shortening; restart from there
                    return conjugacy_normal_form(cand)
                frontier.add(_canonical_rotation(cand))
    return min(seen, key=lambda t: tuple(_LETTER_RANK[l] for l in t))


def mark_distinct(classes):
    """Boolean list: True for the first occurrence of each group-conjugacy class.

    Word-necklace classes can repeat a geodesic once relator rewrites kick in
    (word length >= 4); orbit counts use only the marked representatives.
    """
    seen = set()
    flags = []
    for c in classes:
        nf = conjugacy_normal_form(c.cyclic_word)
        flags.append(nf not in seen)
        seen.add(nf)
    return flags


def write_class_csv(path, classes, extra_columns=None):
    """Class database CSV: cyclic_word, trace, length_g1, primitive [+ extras]."""
    extra_columns = extra_columns or {}
    names = ["cyclic_word", "trace", "length_g1", "primitive"] + list(extra_columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i, c in enumerate(classes):
            row = [c.word_text, f"{abs(c.representative.trace):.17g}",
                   f"{c.length_g1:.17g}", int(c.primitive)]
            for col in extra_columns.values():
                v = col[i]
                row.append(f"{v:.17g}" if isinstance(v, float) else v)
            w.writerow(row)
