"""Exact arithmetic in a class-2 nilpotent group given by Mal'cev data.

Generators come in four blocks: a_1..a_n of infinite order modulo the
commutator subgroup, b_1..b_r of finite order l_i modulo the commutator
subgroup, one central infinite-order generator c, and central torsion
generators d_1..d_t of orders k_1..k_t.  Every commutator of generators is
central and recorded as a vector of (c, d_1..d_t) exponents:

    [a_j, a_i] = c^alpha[i,j][0] * d_1^alpha[i,j][1] * ...   for i < j
    [b_j, b_i] = c^beta[i,j][0]  * ...                       for i < j
    [a_i, b_j] = c^gamma[i,j][0] * ...
    b_i^l_i    = c^eta[i][0]     * ...

Elements live in the unique normal form
a_1^{i_1}..a_n^{i_n} b_1^{j_1}..b_r^{j_r} c^p d_1^{q_1}..d_t^{q_t}
with 0 <= j_x < l_x and 0 <= q_x < k_x.  Multiplication collects words into
this form, paying the central cost of each swap; the pairwise cost of moving
x^q past y^s is [x, y]^{q s} because all commutators are central.

All arithmetic is exact.  The low-level `*_exponents` helpers only use
+, -, *, // and %, so exponent entries can be Python ints or numpy integer
arrays; the brute-force oracle relies on that to evaluate batches of
assignments at once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence


class MalcevError(Exception):
    pass


class IndexOutOfRange(MalcevError):
    pass


class NonPositiveOrder(MalcevError):
    pass


class AssociativityFailure(MalcevError):
    """Structure constants are inconsistent; carries a witness triple."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


class UnknownGenerator(MalcevError):
    pass


class InvalidAutomorphism(MalcevError):
    pass


CostVector = tuple  # (c_exponent, (d_1 .. d_t exponents))


@dataclass(frozen=True)
class NormalForm:
    """Exponent vector of a normal-form word: a-block, b-block, c, d-block."""

    a: tuple
    b: tuple
    c: int
    d: tuple

    def as_vector(self) -> list:
        return [*self.a, *self.b, self.c, *self.d]

    def is_identity(self) -> bool:
        return (
            all(x == 0 for x in self.a)
            and all(x == 0 for x in self.b)
            and self.c == 0
            and all(x == 0 for x in self.d)
        )


@dataclass(frozen=True)
class Automorphism:
    """Generator images (and images under the inverse map) in normal form.

    `images` lists the image of a_1..a_n, b_1..b_r, c, d_1..d_t in that
    order.  The inverse images are supplied by the caller and checked by
    composition; deciding surjectivity from images alone is not attempted.
    """

    images: tuple
    inverse_images: tuple
    name: str | None = None

    def inverse(self) -> "Automorphism":
        nm = None if self.name is None else self.name + "^-1"
        return Automorphism(self.inverse_images, self.images, nm)


@dataclass(frozen=True)
class MalcevPresentation:
    n: int
    r: int
    t: int
    l: tuple
    k: tuple
    # (i, j) -> cost vector, with 1-based generator indices and i < j for
    # alpha/beta; gamma is keyed by (a-index, b-index).
    alpha: Mapping
    beta: Mapping
    gamma: Mapping
    eta: Mapping  # i -> cost vector for b_i^l_i
    names: tuple
    automorphisms: Mapping = field(default_factory=dict)

    @property
    def num_generators(self) -> int:
        return self.n + self.r + 1 + self.t


def default_names(n: int, r: int, t: int) -> tuple:
    names = [f"a{i}" for i in range(1, n + 1)]
    names += [f"b{i}" for i in range(1, r + 1)]
    names.append("c")
    names += [f"d{i}" for i in range(1, t + 1)]
    return tuple(names)


def _normalize_cost_map(kind: str, raw: Mapping, p_t: int, k: Sequence, key_len: int) -> dict:
    """Accepts {(i, j, m): value} triples and folds them into cost vectors.

    Entries for torsion coordinates (m >= 1) are stored reduced mod k_m.
    """
    folded: dict = {}
    for key, value in raw.items():
        if len(key) != key_len + 1:
            raise IndexOutOfRange(f"{kind}: bad key {key}")
        *gens, m = key
        if not 0 <= m <= p_t:
            raise IndexOutOfRange(f"{kind}{key}: central index {m} out of range")
        c, d = folded.get(tuple(gens), (0, [0] * p_t))
        d = list(d)
        if m == 0:
            c += value
        else:
            d[m - 1] += value
        folded[tuple(gens)] = (c, d)
    out = {}
    for gens, (c, d) in folded.items():
        d = tuple(x % k[m] for m, x in enumerate(d))
        if c != 0 or any(d):
            out[gens] = (c, d)
    return out


def make_presentation(
    n: int,
    r: int,
    t: int,
    l: Sequence = (),
    k: Sequence = (),
    alpha: Mapping | None = None,
    beta: Mapping | None = None,
    gamma: Mapping | None = None,
    eta: Mapping | None = None,
    names: Sequence | None = None,
    automorphisms: Mapping | None = None,
) -> MalcevPresentation:
    """Builds a presentation from {(i, j, m): value} structure-constant maps.

    Raises IndexOutOfRange / NonPositiveOrder on malformed data; consistency
    of the constants themselves is checked by `validate_presentation`.
    """
    if n < 0 or r < 0 or t < 0:
        raise IndexOutOfRange("generator counts must be nonnegative")
    l = tuple(l)
    k = tuple(k)
    if len(l) != r:
        raise IndexOutOfRange(f"expected {r} torsion orders l, got {len(l)}")
    if len(k) != t:
        raise IndexOutOfRange(f"expected {t} central orders k, got {len(k)}")
    if any(x < 1 for x in l):
        raise NonPositiveOrder(f"every l_i must be >= 1, got {l}")
    if any(x < 1 for x in k):
        raise NonPositiveOrder(f"every k_i must be >= 1, got {k}")

    alpha_map = _normalize_cost_map("alpha", alpha or {}, t, k, 2)
    beta_map = _normalize_cost_map("beta", beta or {}, t, k, 2)
    gamma_map = _normalize_cost_map("gamma", gamma or {}, t, k, 2)
    eta_map = _normalize_cost_map("eta", eta or {}, t, k, 1)
    eta_map = {i[0]: v for i, v in eta_map.items()}

    for (i, j) in alpha_map:
        if not (1 <= i < j <= n):
            raise IndexOutOfRange(f"alpha index ({i},{j}) needs 1 <= i < j <= n={n}")
    for (i, j) in beta_map:
        if not (1 <= i < j <= r):
            raise IndexOutOfRange(f"beta index ({i},{j}) needs 1 <= i < j <= r={r}")
    for (i, j) in gamma_map:
        if not (1 <= i <= n and 1 <= j <= r):
            raise IndexOutOfRange(f"gamma index ({i},{j}) out of range")
    for i in eta_map:
        if not 1 <= i <= r:
            raise IndexOutOfRange(f"eta index {i} out of range")

    names = tuple(names) if names is not None else default_names(n, r, t)
    if len(names) != n + r + 1 + t:
        raise IndexOutOfRange(f"expected {n + r + 1 + t} generator names, got {len(names)}")
    if len(set(names)) != len(names):
        raise IndexOutOfRange("generator names must be distinct")
    for nm in names:
        if not nm or nm[0].isupper() or ":" in nm or "^" in nm:
            raise IndexOutOfRange(f"bad generator name {nm!r} (lowercase token required)")

    return MalcevPresentation(
        n=n, r=r, t=t, l=l, k=k,
        alpha=alpha_map, beta=beta_map, gamma=gamma_map, eta=eta_map,
        names=names, automorphisms=dict(automorphisms or {}),
    )


# ---------------------------------------------------------------------------
# exponent-level core (int or numpy array entries)
# ---------------------------------------------------------------------------

def pair_costs(p: MalcevPresentation, ua, ub, va, vb) -> list:
    """Central cost of collecting (a^ua b^ub) * (a^va b^vb) into a^(ua+va) b^(ub+vb).

    Index 0 is the c-exponent, index m the d_m-exponent.  Moving the right
    factor's a-block left past the left factor's b-block costs
    [b_j, a_i]^(ub_j * va_i) = [a_i, b_j]^(-ub_j * va_i); merging the two
    a-blocks costs [a_j, a_i]^(ua_j * va_i) for i < j, and likewise for b.
    """
    costs = [0] * (p.t + 1)

    def add(vec, factor):
        c, d = vec
        if c != 0:
            costs[0] = costs[0] + c * factor
        for m, dm in enumerate(d):
            if dm != 0:
                costs[m + 1] = costs[m + 1] + dm * factor

    for (i, j), vec in p.gamma.items():
        add(vec, -(ub[j - 1] * va[i - 1]))
    for (i, j), vec in p.alpha.items():
        add(vec, ua[j - 1] * va[i - 1])
    for (i, j), vec in p.beta.items():
        add(vec, ub[j - 1] * vb[i - 1])
    return costs


def self_costs(p: MalcevPresentation, a, b) -> list:
    """Cost vector Q(g) with g*g = a^(2a) b^(2b) c^(2c+Q_0) d^(2d+Q_m)."""
    return pair_costs(p, a, b, a, b)


def reduce_exponents(p: MalcevPresentation, a, b_raw, c_raw, d_raw):
    """Restores the b/d range discipline on raw exponent vectors.

    Each b_i is reduced mod l_i, paying eta_i per subtracted l_i (floor
    division, so negative exponents work), then each d_m is reduced mod k_m.
    """
    b = list(b_raw)
    c = c_raw
    d = list(d_raw)
    for i in range(p.r):
        li = p.l[i]
        q = b[i] // li
        b[i] = b[i] - q * li
        vec = p.eta.get(i + 1)
        if vec is not None:
            ec, ed = vec
            if ec != 0:
                c = c + ec * q
            for m, em in enumerate(ed):
                if em != 0:
                    d[m] = d[m] + em * q
    for m in range(p.t):
        d[m] = d[m] % p.k[m]
    return list(a), b, c, d


def multiply_exponents(p: MalcevPresentation, ua, ub, uc, ud, va, vb, vc, vd):
    costs = pair_costs(p, ua, ub, va, vb)
    a = [x + y for x, y in zip(ua, va)]
    b = [x + y for x, y in zip(ub, vb)]
    c = uc + vc + costs[0]
    d = [x + y + w for x, y, w in zip(ud, vd, costs[1:])]
    return reduce_exponents(p, a, b, c, d)


def power_exponents(p: MalcevPresentation, ga, gb, gc, gd, e):
    """Closed-form power: g^e = a^(e ga) b^(e gb) c^(e gc + C(e,2) Q_0) ...

    with Q the self-collection cost of g; exact for every integer e (for
    e = -1 it reproduces the inversion formula).  Binomials stay integral
    because e*(e-1) is even.
    """
    q = self_costs(p, ga, gb)
    binom = (e * (e - 1)) // 2
    a = [e * x for x in ga]
    b = [e * x for x in gb]
    c = e * gc + binom * q[0]
    d = [e * x + binom * qm for x, qm in zip(gd, q[1:])]
    return reduce_exponents(p, a, b, c, d)


# ---------------------------------------------------------------------------
# public element operations
# ---------------------------------------------------------------------------

def identity(p: MalcevPresentation) -> NormalForm:
    return NormalForm((0,) * p.n, (0,) * p.r, 0, (0,) * p.t)


def element_from_exponents(p: MalcevPresentation, a, b, c, d) -> NormalForm:
    """Normal form of the ordered word a^a b^b c^c d^d with raw integer exponents."""
    a, b, c, d = reduce_exponents(p, list(a), b, c, d)
    return NormalForm(tuple(a), tuple(b), c, tuple(d))


def element_from_vector(p: MalcevPresentation, vec: Sequence) -> NormalForm:
    if len(vec) != p.num_generators:
        raise IndexOutOfRange(f"expected {p.num_generators} exponents, got {len(vec)}")
    n, r = p.n, p.r
    return element_from_exponents(
        p, vec[:n], vec[n:n + r], vec[n + r], vec[n + r + 1:]
    )


def generator(p: MalcevPresentation, index: int) -> NormalForm:
    if not 0 <= index < p.num_generators:
        raise UnknownGenerator(f"generator index {index} out of range")
    vec = [0] * p.num_generators
    vec[index] = 1
    return element_from_vector(p, vec)


def generator_index(p: MalcevPresentation, name: str) -> int:
    try:
        return p.names.index(name)
    except ValueError:
        raise UnknownGenerator(f"unknown generator {name!r}") from None


def multiply(p: MalcevPresentation, u: NormalForm, v: NormalForm) -> NormalForm:
    a, b, c, d = multiply_exponents(p, u.a, u.b, u.c, u.d, v.a, v.b, v.c, v.d)
    return NormalForm(tuple(a), tuple(b), c, tuple(d))


def power(p: MalcevPresentation, u: NormalForm, e: int) -> NormalForm:
    a, b, c, d = power_exponents(p, u.a, u.b, u.c, u.d, e)
    return NormalForm(tuple(a), tuple(b), c, tuple(d))


def invert(p: MalcevPresentation, u: NormalForm) -> NormalForm:
    return power(p, u, -1)


def commutator(p: MalcevPresentation, u: NormalForm, v: NormalForm) -> NormalForm:
    w = multiply(p, invert(p, u), invert(p, v))
    w = multiply(p, w, u)
    return multiply(p, w, v)


def evaluate_word(p: MalcevPresentation, word: Sequence) -> NormalForm:
    """Left-to-right product of (generator index, exponent) pairs."""
    acc = identity(p)
    for index, exponent in word:
        acc = multiply(p, acc, power(p, generator(p, index), exponent))
    return acc


def random_element(p: MalcevPresentation, rng: random.Random, bound: int) -> NormalForm:
    vec = [rng.randint(-bound, bound) for _ in range(p.num_generators)]
    return element_from_vector(p, vec)


def validate_presentation(
    p: MalcevPresentation, trials: int = 200, seed: int = 0
) -> MalcevPresentation:
    """Checks bounds plus randomized associativity and inverse laws.

    Inconsistent structure constants surface as an AssociativityFailure with
    a concrete witness triple.  Passing trials do not prove consistency, but
    at desk scale a bad constant is found almost immediately.
    """
    if any(x < 1 for x in p.l) or any(x < 1 for x in p.k):
        raise NonPositiveOrder(f"orders must be positive: l={p.l} k={p.k}")
    # Re-check index ranges in case the presentation was built by hand.
    for (i, j) in p.alpha:
        if not (1 <= i < j <= p.n):
            raise IndexOutOfRange(f"alpha index ({i},{j})")
    for (i, j) in p.beta:
        if not (1 <= i < j <= p.r):
            raise IndexOutOfRange(f"beta index ({i},{j})")
    for (i, j) in p.gamma:
        if not (1 <= i <= p.n and 1 <= j <= p.r):
            raise IndexOutOfRange(f"gamma index ({i},{j})")
    for i in p.eta:
        if not 1 <= i <= p.r:
            raise IndexOutOfRange(f"eta index {i}")

    rng = random.Random(seed)
    one = identity(p)
    for _ in range(trials):
        u = random_element(p, rng, 5)
        v = random_element(p, rng, 5)
        w = random_element(p, rng, 5)
        left = multiply(p, multiply(p, u, v), w)
        right = multiply(p, u, multiply(p, v, w))
        if left != right:
            raise AssociativityFailure(
                f"(uv)w != u(vw) for u={u} v={v} w={w}", (u, v, w)
            )
        if multiply(p, u, invert(p, u)) != one:
            raise AssociativityFailure(f"u * u^-1 != 1 for u={u}", (u,))
    return p


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

def identity_automorphism(p: MalcevPresentation) -> Automorphism:
    images = tuple(generator(p, i) for i in range(p.num_generators))
    return Automorphism(images, images, "id")


def apply_automorphism_exponents(p: MalcevPresentation, theta: Automorphism, a, b, c, d):
    """Exponent-level image: fold image powers over the given exponents."""
    acc = ([0] * p.n, [0] * p.r, 0, [0] * p.t)
    for img, e in zip(theta.images, [*a, *b, c, *d]):
        if isinstance(e, int) and e == 0:
            continue
        pw = power_exponents(p, img.a, img.b, img.c, img.d, e)
        acc = multiply_exponents(p, *acc, *pw)
    return acc


def apply_automorphism(p: MalcevPresentation, theta: Automorphism, u: NormalForm) -> NormalForm:
    """Image of u: substitute generator images into u's normal-form word."""
    a, b, c, d = apply_automorphism_exponents(p, theta, u.a, u.b, u.c, u.d)
    return NormalForm(tuple(a), tuple(b), c, tuple(d))


def _apply_images(p: MalcevPresentation, images: Sequence, u: NormalForm) -> NormalForm:
    acc = identity(p)
    for img, e in zip(images, u.as_vector()):
        if isinstance(e, int) and e == 0:
            continue
        acc = multiply(p, acc, power(p, img, e))
    return acc


def _central_cost_element(p: MalcevPresentation, vec: CostVector) -> NormalForm:
    c, d = vec
    return element_from_exponents(p, [0] * p.n, [0] * p.r, c, list(d))


def validate_automorphism(p: MalcevPresentation, theta: Automorphism) -> Automorphism:
    """Checks the image data defines an automorphism of the presented group.

    Verifies: c/d images are central words over {c, d_i}; images respect
    every defining relation (commutator values, torsion powers); composing
    with the supplied inverse images fixes all generators, both ways round.
    """
    if len(theta.images) != p.num_generators or len(theta.inverse_images) != p.num_generators:
        raise InvalidAutomorphism(
            f"need {p.num_generators} images, got {len(theta.images)}"
        )
    label = theta.name or "automorphism"
    for imgs in (theta.images, theta.inverse_images):
        for idx in range(p.n + p.r, p.num_generators):
            im = imgs[idx]
            if any(x != 0 for x in im.a) or any(x != 0 for x in im.b):
                raise InvalidAutomorphism(
                    f"{label}: image of central generator {p.names[idx]} is not central"
                )

    checks = []
    for (i, j), vec in sorted(p.alpha.items()):
        checks.append((
            commutator(p, theta.images[j - 1], theta.images[i - 1]),
            _central_cost_element(p, vec),
            f"[{p.names[j-1]},{p.names[i-1]}]",
        ))
    for (i, j), vec in sorted(p.beta.items()):
        checks.append((
            commutator(p, theta.images[p.n + j - 1], theta.images[p.n + i - 1]),
            _central_cost_element(p, vec),
            f"[{p.names[p.n+j-1]},{p.names[p.n+i-1]}]",
        ))
    for (i, j), vec in sorted(p.gamma.items()):
        checks.append((
            commutator(p, theta.images[i - 1], theta.images[p.n + j - 1]),
            _central_cost_element(p, vec),
            f"[{p.names[i-1]},{p.names[p.n+j-1]}]",
        ))
    for i in range(1, p.r + 1):
        checks.append((
            power(p, theta.images[p.n + i - 1], p.l[i - 1]),
            _central_cost_element(p, p.eta.get(i, (0, (0,) * p.t))),
            f"{p.names[p.n+i-1]}^{p.l[i-1]}",
        ))
    for m in range(1, p.t + 1):
        checks.append((
            power(p, theta.images[p.n + p.r + m], p.k[m - 1]),
            identity(p),
            f"{p.names[p.n+p.r+m]}^{p.k[m-1]}",
        ))
    for lhs, relation_value, what in checks:
        if lhs != _apply_images(p, theta.images, relation_value):
            raise InvalidAutomorphism(f"{label}: relation {what} not respected")

    inverse = theta.inverse()
    for idx in range(p.num_generators):
        g = generator(p, idx)
        if apply_automorphism(p, inverse, apply_automorphism(p, theta, g)) != g:
            raise InvalidAutomorphism(
                f"{label}: inverse images do not undo the map on {p.names[idx]}"
            )
        if apply_automorphism(p, theta, apply_automorphism(p, inverse, g)) != g:
            raise InvalidAutomorphism(
                f"{label}: images do not undo the inverse map on {p.names[idx]}"
            )
    return theta


def compose_automorphisms(
    p: MalcevPresentation, outer: Automorphism, inner: Automorphism
) -> Automorphism:
    """(outer o inner): g -> outer(inner(g))."""
    images = tuple(apply_automorphism(p, outer, img) for img in inner.images)
    inverse_images = tuple(
        apply_automorphism(p, inner.inverse(), img) for img in outer.inverse_images
    )
    return Automorphism(images, inverse_images)


def inner_automorphism(p: MalcevPresentation, h: NormalForm) -> Automorphism:
    """Conjugation g -> h g h^-1."""
    hinv = invert(p, h)

    def conj(by, byinv, g):
        return multiply(p, multiply(p, by, g), byinv)

    images = tuple(
        conj(h, hinv, generator(p, i)) for i in range(p.num_generators)
    )
    inverse_images = tuple(
        conj(hinv, h, generator(p, i)) for i in range(p.num_generators)
    )
    return Automorphism(images, inverse_images)


def is_identity_automorphism(p: MalcevPresentation, theta: Automorphism) -> bool:
    return all(
        theta.images[i] == generator(p, i) for i in range(p.num_generators)
    )


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def _cost_map_to_rows(m: Mapping, pair: bool) -> list:
    rows = []
    for key in sorted(m):
        c, d = m[key]
        gens = list(key) if pair else [key]
        if c != 0:
            rows.append([*gens, 0, c])
        for idx, dm in enumerate(d):
            if dm != 0:
                rows.append([*gens, idx + 1, dm])
    return rows


def automorphism_to_dict(theta: Automorphism) -> dict:
    return {
        "images": [list(im.as_vector()) for im in theta.images],
        "inverse_images": [list(im.as_vector()) for im in theta.inverse_images],
    }


def automorphism_from_dict(p: MalcevPresentation, doc: Mapping, name: str | None = None) -> Automorphism:
    images = tuple(element_from_vector(p, v) for v in doc["images"])
    inverse_images = tuple(element_from_vector(p, v) for v in doc["inverse_images"])
    return Automorphism(images, inverse_images, name)


def presentation_to_dict(p: MalcevPresentation) -> dict:
    return {
        "n": p.n,
        "r": p.r,
        "t": p.t,
        "l": list(p.l),
        "k": list(p.k),
        "alpha": _cost_map_to_rows(p.alpha, pair=True),
        "beta": _cost_map_to_rows(p.beta, pair=True),
        "gamma": _cost_map_to_rows(p.gamma, pair=True),
        "eta": _cost_map_to_rows(p.eta, pair=False),
        "names": list(p.names),
        "automorphisms": {
            name: automorphism_to_dict(th) for name, th in sorted(p.automorphisms.items())
        },
    }


def presentation_from_dict(doc: Mapping, validate: bool = True) -> MalcevPresentation:
    def rows_to_map(rows, pair):
        out = {}
        for row in rows:
            *key, m, value = row
            gens = tuple(key) if pair else (key[0],)
            out[(*gens, m)] = out.get((*gens, m), 0) + value
        return out

    p = make_presentation(
        n=doc["n"],
        r=doc["r"],
        t=doc["t"],
        l=doc.get("l", ()),
        k=doc.get("k", ()),
        alpha=rows_to_map(doc.get("alpha", []), True),
        beta=rows_to_map(doc.get("beta", []), True),
        gamma=rows_to_map(doc.get("gamma", []), True),
        eta=rows_to_map(doc.get("eta", []), False),
        names=doc.get("names"),
    )
    auts = {}
    for name, adoc in doc.get("automorphisms", {}).items():
        theta = automorphism_from_dict(p, adoc, name)
        if validate:
            validate_automorphism(p, theta)
        auts[name] = theta
    return replace(p, automorphisms=auts)
