"""Built-in presentations and extensions used by tests, fuzzing and demos."""

from __future__ import annotations

from dataclasses import replace

from . import malcev
from .malcev import Automorphism, MalcevPresentation


def _aut(p: MalcevPresentation, name: str, images, inverse_images=None) -> Automorphism:
    imgs = tuple(malcev.element_from_vector(p, v) for v in images)
    if inverse_images is None:
        invs = imgs
    else:
        invs = tuple(malcev.element_from_vector(p, v) for v in inverse_images)
    return malcev.validate_automorphism(p, Automorphism(imgs, invs, name))


def integers() -> MalcevPresentation:
    """The group of integers under addition, generator `a`.

    The always-present central generator c rides along as an extra free
    central direction; equations over `a` alone behave exactly as in the
    integers, with the c block unconstrained.
    """
    p = malcev.make_presentation(n=1, r=0, t=0, names=("a", "c"))
    auts = {
        "neg": _aut(p, "neg", [[-1, 0], [0, 1]]),  # a -> a^-1, c -> c
    }
    return replace(p, automorphisms=auts)


def heisenberg() -> MalcevPresentation:
    """Discrete Heisenberg group: c = [a1, a2] central, alpha_120 = -1."""
    p = malcev.make_presentation(
        n=2, r=0, t=0,
        alpha={(1, 2, 0): -1},
        names=("a1", "a2", "c"),
    )
    auts = {
        # a1 -> a1^-1, a2 -> a2^-1 fixes c = [a1, a2].
        "inv": _aut(p, "inv", [[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
        # a1 <-> a2 inverts c.
        "swap": _aut(p, "swap", [[0, 1, 0], [1, 0, 0], [0, 0, -1]]),
        # a1 -> a1^2 a2, a2 -> a1 (determinant -1 shear), c -> c^-1.
        "shear": _aut(
            p, "shear",
            [[2, 1, 0], [1, 0, 0], [0, 0, -1]],
            [[0, 1, 0], [1, -2, 2], [0, 0, -1]],
        ),
    }
    return replace(p, automorphisms=auts)


def torsion_heisenberg() -> MalcevPresentation:
    """Heisenberg-like group with a torsion generator b and torsion centre d.

    Relations: c = [a1, a2], d = [a1, b] = [a2, b], b^2 = c, d^2 = 1.
    """
    p = malcev.make_presentation(
        n=2, r=1, t=1,
        l=(2,), k=(2,),
        alpha={(1, 2, 0): -1},
        gamma={(1, 1, 1): 1, (2, 1, 1): 1},
        eta={(1, 0): 1},
        names=("a1", "a2", "b", "c", "d"),
    )
    auts = {
        # a1 <-> a2, b -> b c^-1, c -> c^-1, d -> d; an involution.
        "swap": _aut(
            p, "swap",
            [[0, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, 1, -1, 0],
             [0, 0, 0, -1, 0], [0, 0, 0, 0, 1]],
        ),
        # a1 -> a1^-1, a2 -> a2^-1, b, c, d fixed; an involution.
        "flip": _aut(
            p, "flip",
            [[-1, 0, 0, 0, 0], [0, -1, 0, 0, 0], [0, 0, 1, 0, 0],
             [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]],
        ),
    }
    return replace(p, automorphisms=auts)


def _order_two_extension(base: MalcevPresentation, flip_name: str):
    """Semidirect product with C2 acting by the named involution; s^2 = 1."""
    from . import extension as ext_mod

    one = malcev.identity(base)
    ext = ext_mod.ExtensionPresentation(
        base=base,
        f=2,
        psi=(malcev.identity_automorphism(base), base.automorphisms[flip_name]),
        mult_table={
            (0, 0): (one, 0),
            (0, 1): (one, 1),
            (1, 0): (one, 1),
            (1, 1): (one, 0),
        },
        inv_table={0: (one, 0), 1: (one, 1)},
    )
    return ext_mod.validate_extension(ext)


def infinite_dihedral():
    """Integers extended by the inverting involution: t1 a t1^-1 = a^-1."""
    return _order_two_extension(integers(), "neg")


def heisenberg_c2():
    """Heisenberg extended by a1 -> a1^-1, a2 -> a2^-1 (which fixes c)."""
    return _order_two_extension(heisenberg(), "inv")


GROUPS = {
    "integers": integers,
    "heisenberg": heisenberg,
    "torsion_heisenberg": torsion_heisenberg,
}

EXTENSIONS = {
    "infinite_dihedral": infinite_dihedral,
    "heisenberg_c2": heisenberg_c2,
}


def get_group(name: str) -> MalcevPresentation:
    try:
        return GROUPS[name]()
    except KeyError:
        raise KeyError(
            f"unknown catalog group {name!r}; available: {sorted(GROUPS)}"
        ) from None


def get_extension(name: str):
    try:
        return EXTENSIONS[name]()
    except KeyError:
        raise KeyError(
            f"unknown catalog extension {name!r}; available: {sorted(EXTENSIONS)}"
        ) from None
