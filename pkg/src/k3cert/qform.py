"""Isotropy, representation and bounded enumeration for lattice quadratic forms.

Finite searches are organised around one fact: for a class ``A`` with
``A^2 > 0`` in a lattice of signature ``(1, r-1)`` the form

    P_A(v) = 2 (A.v)^2 / A^2 - v^2

is positive definite (it is ``+v^2`` along ``A`` and ``-v^2`` on ``A^perp``).
Any set of classes with bounded ``A``-degree and bounded-below square lies in
an ellipsoid ``P_A(v) <= const``, which :func:`ellipsoid_points` walks exactly
(Fincke-Pohst with rational arithmetic).
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from .exceptions import InvalidAmpleError, InvalidInputError
from .lattice import DivisorClass, Lattice

DEFAULT_SEARCH_CAP = 10_000
# full-box witness search is abandoned beyond this many prefixes
_BOX_BUDGET = 2_000_000


def search_cap() -> int:
    """Witness-search coordinate cap, overridable by ``K3CERT_SEARCH_CAP``."""
    raw = os.environ.get("K3CERT_SEARCH_CAP")
    if raw is None:
        return DEFAULT_SEARCH_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidInputError(f"K3CERT_SEARCH_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InvalidInputError("K3CERT_SEARCH_CAP must be positive")
    return cap


def sign_normalize(coords: Sequence[int]) -> tuple[int, ...]:
    """Choose between ``v`` and ``-v`` so the first nonzero coordinate is positive."""
    for c in coords:
        if c:
            return tuple(coords) if c > 0 else tuple(-x for x in coords)
    return tuple(coords)


def height_key(coords: Sequence[int]) -> tuple:
    """Order used to pick a canonical witness: sup-norm, then l1-norm, then
    colexicographic."""
    return (max(map(abs, coords), default=0), sum(map(abs, coords)), tuple(reversed(coords)))


def smallest(candidates) -> tuple[int, ...] | None:
    best = None
    for c in candidates:
        c = sign_normalize(c)
        if best is None or height_key(c) < height_key(best):
            best = c
    return best


# --------------------------------------------------------------------------
# ellipsoid enumeration

def ellipsoid_points(m: Sequence[Sequence[Fraction]], bound) -> Iterator[tuple[int, ...]]:
    """Yield every integer ``x`` with ``x^t m x <= bound`` (``m`` positive definite)."""
    n = len(m)
    bound = Fraction(bound)
    if bound < 0:
        return
    q = [[Fraction(0)] * n for _ in range(n)]
    a = [[Fraction(v) for v in row] for row in m]
    for i in range(n):
        q[i][i] = a[i][i] - sum(q[k][k] * q[k][i] ** 2 for k in range(i))
        if q[i][i] <= 0:
            raise InvalidInputError("ellipsoid form is not positive definite")
        for j in range(i + 1, n):
            q[i][j] = (a[i][j] - sum(q[k][k] * q[k][i] * q[k][j] for k in range(i))) / q[i][i]

    x = [0] * n

    def walk(i: int, remaining: Fraction):
        centre = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        t = remaining / q[i][i]
        radius = math.isqrt(math.floor(t)) + 1
        lo = math.floor(centre) - radius
        hi = math.ceil(centre) + radius
        for xi in range(lo, hi + 1):
            d = q[i][i] * (xi - centre) ** 2
            if d <= remaining:
                x[i] = xi
                if i == 0:
                    yield tuple(x)
                else:
                    yield from walk(i - 1, remaining - d)
        x[i] = 0

    yield from walk(n - 1, bound)


def _require_positive(a: DivisorClass) -> int:
    s = a.square
    if s <= 0:
        raise InvalidAmpleError(f"reference class must have positive square, got {s}")
    return s


def slab_form(a: DivisorClass) -> list[list[Fraction]]:
    """Gram matrix of ``P_A``."""
    lat = a.lattice
    s = _require_positive(a)
    deg = [a.dot(e) for e in lat.basis()]
    r = lat.rank
    return [[Fraction(2 * deg[i] * deg[j], s) - lat.gram[i][j] for j in range(r)] for i in range(r)]


def slab_vectors(a: DivisorClass, deg_lo: int, deg_hi: int, norm_lo: int
                 ) -> Iterator[DivisorClass]:
    """All ``v`` with ``deg_lo <= A.v <= deg_hi`` and ``v^2 >= norm_lo``.

    Requires a hyperbolic lattice; the result is complete.
    """
    lat = a.lattice
    s = _require_positive(a)
    if not lat.is_hyperbolic:
        raise InvalidInputError("slab enumeration needs signature (1, r-1, 0)")
    if deg_lo > deg_hi:
        return
    k = max(abs(deg_lo), abs(deg_hi))
    bound = Fraction(2 * k * k, s) - norm_lo
    for x in ellipsoid_points(slab_form(a), bound):
        v = DivisorClass(x, lat)
        d = a.dot(v)
        if deg_lo <= d <= deg_hi and v.square >= norm_lo:
            yield v


def enumerate_norm_vectors(lattice: Lattice, norm: int, ample: DivisorClass,
                           degree_max: int) -> list[DivisorClass]:
    """Every ``v`` with ``v^2 = norm`` and ``0 < ample.v <= degree_max``,
    sorted lexicographically."""
    if ample.lattice != lattice:
        raise InvalidInputError("ample class is not in the given lattice")
    _require_positive(ample)
    if degree_max < 1:
        return []
    found = [v for v in slab_vectors(ample, 1, degree_max, norm) if v.square == norm]
    return sorted(found, key=lambda v: v.coords)


def project_orthogonal(h: DivisorClass, r: DivisorClass) -> Fraction:
    """Square of the projection of ``r`` onto ``h^perp``:
    ``r^2 - (h.r)^2 / h^2``."""
    s = h.square
    if s <= 0:
        raise InvalidInputError("projection needs h^2 > 0")
    return Fraction(r.square) - Fraction(h.dot(r) ** 2, s)


# --------------------------------------------------------------------------
# box search with one coordinate solved exactly

def _shell(k: int, m: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length ``k`` with ``max|x_i| = m``."""
    if m == 0:
        yield (0,) * k
        return
    inner = range(-m + 1, m)
    full = range(-m, m + 1)
    for i in range(k):
        for head in itertools.product(inner, repeat=i):
            for edge in (-m, m):
                for tail in itertools.product(full, repeat=k - i - 1):
                    yield head + (edge,) + tail


def _completions(lat: Lattice, n: int, p: int, x: list[int]) -> list[int]:
    """Values ``t`` with ``x[p] = t`` solving ``x^t G x = n`` (``x[p]`` ignored)."""
    g = lat.gram
    x[p] = 0
    b = sum(g[p][i] * x[i] for i in range(len(x)) if i != p)
    c = lat.form(x, x)
    a = g[p][p]
    if a:
        disc = b * b - a * (c - n)
        if disc < 0:
            return []
        t = math.isqrt(disc)
        if t * t != disc:
            return []
        return [num // a for num in {-b + t, -b - t} if num % a == 0]
    if b:
        return [] if (n - c) % (2 * b) else [(n - c) // (2 * b)]
    if c != n:
        return []
    # every t works; the smallest completion is the only one that matters
    return [0] if any(x) else [1]


def _height_search(lat: Lattice, n: int, cap: int | None,
                   budget: int | None = None) -> tuple[int, ...] | None:
    """Smallest nonzero solution of ``x^t G x = n`` in :func:`height_key` order.

    Prefixes (all coordinates but one) are visited shell by shell; a found
    solution is final once its height does not exceed the current shell.
    Gives up (None) past ``cap`` or after ``budget`` prefixes.
    """
    r = lat.rank
    g = lat.gram
    p = next((i for i in range(r) if g[i][i]), r - 1)
    rest = [i for i in range(r) if i != p]
    found: list[tuple[int, ...]] = []
    seen = 0
    m = 0
    while cap is None or m <= cap:
        for prefix in _shell(r - 1, m):
            seen += 1
            x = [0] * r
            for i, c in zip(rest, prefix):
                x[i] = c
            for t in _completions(lat, n, p, x):
                x[p] = t
                if any(x) and (cap is None or abs(t) <= cap):
                    found.append(tuple(x))
        ready = [x for x in found if max(map(abs, x)) <= m]
        if ready:
            return smallest(ready)
        if budget is not None and seen > budget:
            return None
        m += 1
    return None


# --------------------------------------------------------------------------
# isotropy

class IsotropyStatus(str, Enum):
    ISOTROPIC = "isotropic"
    ANISOTROPIC = "anisotropic"
    UNKNOWN = "unknown"


class IsotropyMethod(str, Enum):
    CLOSED_FORM_RANK2 = "closed_form_rank2"
    LOCAL_GLOBAL = "local_global"
    MEYER_RANK5 = "meyer_rank5"
    BOUNDED_SEARCH = "bounded_search"


@dataclass(frozen=True)
class IsotropyVerdict:
    status: IsotropyStatus
    method: IsotropyMethod
    witness: DivisorClass | None = None
    note: str = ""

    def __post_init__(self):
        if self.status is IsotropyStatus.ISOTROPIC:
            w = self.witness
            if w is None or not w or w.square != 0:
                raise AssertionError("isotropic verdict needs a nonzero isotropic witness")

    @property
    def isotropic(self) -> bool:
        return self.status is IsotropyStatus.ISOTROPIC


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def rank2_isotropic_lines(g) -> list[tuple[int, ...]]:
    """Primitive isotropic vectors (one per line) of a binary form, or []."""
    (a, b), (_, c) = g
    d = b * b - a * c
    if not _is_square(d):
        return []
    s = math.isqrt(d)
    if a:
        cand = [(-b + s, a), (-b - s, a)]
    elif c:
        cand = [(c, -b + s), (c, -b - s)]
    else:
        cand = [(1, 0), (0, 1)]
    lines = set()
    for x, y in cand:
        k = math.gcd(x, y)
        if k:
            lines.add(sign_normalize((x // k, y // k)))
    return sorted(lines, key=height_key)


def _valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol ``(a, b)_p`` for nonzero integers and a prime ``p``."""
    if a == 0 or b == 0:
        raise InvalidInputError("hilbert symbol needs nonzero arguments")
    alpha, u = _valuation(a, p)
    beta, v = _valuation(b, p)
    if p == 2:
        def eps(z):
            return ((z - 1) // 2) % 2

        def omega(z):
            return ((z * z - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    e = (alpha * beta * ((p - 1) // 2)) % 2
    res = -1 if e else 1
    if beta % 2:
        res *= _legendre(u, p)
    if alpha % 2:
        res *= _legendre(v, p)
    return res


def _legendre(u: int, p: int) -> int:
    t = pow(u % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def is_padic_square(d: int, p: int) -> bool:
    v, u = _valuation(d, p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return _legendre(u, p) == 1


def _local_isotropic(diag: Sequence[int], p: int) -> bool:
    n = len(diag)
    if n >= 5:
        return True
    d = math.prod(diag)
    if n == 1:
        return False
    if n == 2:
        return is_padic_square(-d, p)
    eps = 1
    for i in range(n):
        for j in range(i + 1, n):
            eps *= hilbert_symbol(diag[i], diag[j], p)
    if n == 3:
        return hilbert_symbol(-1, -d, p) == eps
    return not (is_padic_square(d, p) and eps == -hilbert_symbol(-1, -1, p))


def locally_isotropic(lat: Lattice) -> dict:
    """Local solubility of ``v^2 = 0`` at infinity and every relevant prime.

    Returns ``{place: bool}`` with place ``"inf"`` or a prime; the form is
    isotropic over Q iff every value is True (Hasse-Minkowski).
    """
    from sympy import primefactors

    from .lattice import diagonalize

    diag_q = diagonalize(lat.gram)
    if any(d == 0 for d in diag_q):
        raise InvalidInputError("degenerate lattice")
    diag = [int(d.numerator * d.denominator) for d in diag_q]
    places: dict = {"inf": any(d > 0 for d in diag) and any(d < 0 for d in diag)}
    primes = {2}
    for d in diag:
        primes.update(primefactors(abs(d)))
    for p in sorted(primes):
        places[p] = _local_isotropic(diag, p)
    return places


def isotropic_exists(lat: Lattice, cap: int | None = None) -> IsotropyVerdict:
    sig = lat.signature
    if sig.zero:
        raise InvalidInputError("isotropy test needs a nondegenerate lattice")
    r = lat.rank
    if r == 2:
        lines = rank2_isotropic_lines(lat.gram)
        if lines:
            return IsotropyVerdict(IsotropyStatus.ISOTROPIC, IsotropyMethod.CLOSED_FORM_RANK2,
                                   DivisorClass(lines[0], lat))
        return IsotropyVerdict(IsotropyStatus.ANISOTROPIC, IsotropyMethod.CLOSED_FORM_RANK2,
                               note="discriminant form is not a perfect square")
    if sig.positive == 0 or sig.negative == 0:
        return IsotropyVerdict(IsotropyStatus.ANISOTROPIC, IsotropyMethod.LOCAL_GLOBAL,
                               note="definite over R")
    cap = search_cap() if cap is None else cap
    if r >= 5:
        w = _rank5_witness(lat)
        return IsotropyVerdict(IsotropyStatus.ISOTROPIC, IsotropyMethod.MEYER_RANK5,
                               DivisorClass(w, lat))
    places = locally_isotropic(lat)
    bad = [str(p) for p, ok in places.items() if not ok]
    if bad:
        return IsotropyVerdict(IsotropyStatus.ANISOTROPIC, IsotropyMethod.LOCAL_GLOBAL,
                               note="no local solution at " + ", ".join(bad))
    w = _height_search(lat, 0, cap)
    if w is None:
        return IsotropyVerdict(IsotropyStatus.UNKNOWN, IsotropyMethod.LOCAL_GLOBAL,
                               note=f"locally isotropic everywhere; no witness with "
                                    f"coordinates <= {cap}")
    return IsotropyVerdict(IsotropyStatus.ISOTROPIC, IsotropyMethod.LOCAL_GLOBAL,
                           DivisorClass(w, lat))


def _rank5_witness(lat: Lattice) -> tuple[int, ...]:
    # small full boxes first; then isotropic coordinate sublattices; then
    # unbounded growth (an indefinite form of rank >= 5 is isotropic)
    r = lat.rank
    w = _height_search(lat, 0, None, budget=_BOX_BUDGET)
    if w is not None:
        return w
    for k in (2, 3, 4):
        for idx in itertools.combinations(range(r), k):
            sub = Lattice(tuple(tuple(lat.gram[i][j] for j in idx) for i in idx))
            if sub.signature.zero:
                continue
            verdict = isotropic_exists(sub)
            if verdict.isotropic:
                x = [0] * r
                for i, c in zip(idx, verdict.witness.coords):
                    x[i] = c
                return sign_normalize(x)
    w = _height_search(lat, 0, None)
    assert w is not None
    return w


# --------------------------------------------------------------------------
# representation of integers

@dataclass(frozen=True)
class Representation:
    """Result of :func:`represents`.

    ``exact`` is True when ``vector`` is not None, or when the search
    provably covered every solution; otherwise ``cap`` is the coordinate
    bound that was exhausted.
    """

    n: int
    vector: DivisorClass | None
    exact: bool
    cap: int | None = None

    @property
    def found(self) -> bool:
        return self.vector is not None


def _pell_unit(d: int) -> tuple[int, int]:
    """Fundamental solution of ``x^2 - d y^2 = 1`` (``d`` > 0, not a square)."""
    a0 = math.isqrt(d)
    m, den, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - d * q * q != 1:
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def rank2_search_bound(g, n: int) -> int:
    """Coordinate bound containing a representative of every solution orbit
    of ``g(x, y) = n`` for an indefinite binary form (``n != 0``).

    For a non-square discriminant the bound comes from a power of the Pell
    unit that preserves the congruence class of ``(X, y)`` with
    ``X = g00 x + g01 y``; when the form is isotropic the solution set is
    finite and bounded via the factorisation of ``X^2 - D y^2``.
    """
    (a, b), (_, c) = g
    if not a:
        if not c:
            return abs(n)
        a, c = c, a
    d = b * b - a * c
    big_n = a * n
    if _is_square(d):
        s = math.isqrt(d)
        ymax = abs(big_n) // s + 1
        xmax_big = abs(big_n)
    else:
        x1, y1 = _pell_unit(d)
        xk, yk = x1, y1
        m = abs(a)
        steps = 0
        while (xk - 1) % m or yk % m:
            xk, yk = xk * x1 + d * yk * y1, xk * y1 + yk * x1
            steps += 1
            if steps > 4 * m * m + 4:
                raise AssertionError("unit order search did not terminate")
        sq_n = math.isqrt(abs(big_n)) + 1
        sq_d = math.isqrt(d)
        eps_up = xk + yk * (sq_d + 1)
        ymax = sq_n * max(yk, (eps_up + 1) // (2 * sq_d) + 1)
        xmax_big = math.isqrt(abs(big_n) + d * ymax * ymax) + 1
    xmax = (xmax_big + abs(b) * ymax) // abs(a) + 1
    return max(xmax, ymax)


def represents(lat: Lattice, n: int, cap: int | None = None) -> Representation:
    """Find some nonzero ``v`` with ``v^2 = n``.

    Definite lattices and indefinite rank-2 lattices are decided exactly
    (the latter as long as the orbit bound fits under ``cap``); otherwise a
    failed search is reported together with its cap.
    """
    cap = search_cap() if cap is None else cap
    sig = lat.signature
    if not sig.zero and (sig.positive == 0 or sig.negative == 0):
        sgn = 1 if sig.positive else -1
        if n * sgn < 0 or n == 0:
            return Representation(n, None, True)
        m = [[sgn * Fraction(x) for x in row] for row in lat.gram]
        sols = [x for x in ellipsoid_points(m, abs(n)) if lat.form(x, x) == n and any(x)]
        w = smallest(sols)
        return Representation(n, None if w is None else DivisorClass(w, lat), True)
    if lat.rank == 2 and not sig.zero:
        if n == 0:
            lines = rank2_isotropic_lines(lat.gram)
            vec = DivisorClass(lines[0], lat) if lines else None
            return Representation(n, vec, True)
        bound = rank2_search_bound(lat.gram, n)
        h = min(bound, cap)
        w = _height_search(lat, n, h)
        if w is not None:
            return Representation(n, DivisorClass(w, lat), True)
        return Representation(n, None, bound <= cap, None if bound <= cap else cap)
    w = _height_search(lat, n, cap)
    if w is not None:
        return Representation(n, DivisorClass(w, lat), True)
    return Representation(n, None, False, cap)
