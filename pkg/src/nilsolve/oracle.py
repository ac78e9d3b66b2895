"""Brute-force ground truth: exhaustive scan of bounded assignments.

The oracle evaluates the equation directly (collection arithmetic only,
never the symbolic reduction), scanning unbounded exponents over [-B, B],
torsion exponents over their full residue ranges and, in extensions, every
transversal index.  The first witness in lexicographic order is returned.

Assignment tuples are ordered: transversal indices first (one per variable,
in variable order), then per variable the exponents (a-block, b-block, c,
d-block).  Lexicographic order scans each coordinate ascending.

Chunks of the assignment space are evaluated with numpy int64 arrays; the
collection formulas only use +, *, // and %, so they vectorize unchanged.
Bounds are desk-scale, far from wrapping 64-bit arithmetic.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

import numpy as np

from . import extension as ext_mod
from . import malcev
from .equations import EquationWord
from .extension import ExtensionPresentation, GElement, GEquationWord
from .malcev import MalcevPresentation


def _variable_ranges(p: MalcevPresentation, bound: int) -> list:
    """Coordinate value lists for one variable block, in block order."""
    span = list(range(-bound, bound + 1))
    ranges = [span] * p.n
    ranges += [list(range(li)) for li in p.l]
    ranges.append(span)
    ranges += [list(range(ki)) for ki in p.k]
    return ranges


def _decode_chunk(flat: np.ndarray, ranges: Sequence) -> list:
    """Mixed-radix decode of flat indices, first coordinate most significant."""
    sizes = [len(rg) for rg in ranges]
    coords = []
    stride = math.prod(sizes)
    rem = flat
    for size, values in zip(sizes, ranges):
        stride //= size
        digit = rem // stride
        rem = rem - digit * stride
        coords.append(np.asarray(values, dtype=np.int64)[digit])
    return coords


def _block_exponents(p: MalcevPresentation, coords: Sequence):
    n, r, t = p.n, p.r, p.t
    a = list(coords[:n])
    b = list(coords[n:n + r])
    c = coords[n + r]
    d = list(coords[n + r + 1:])
    return a, b, c, d


def _first_true(mask: np.ndarray):
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def _evaluate_group_word(p, eq: EquationWord, blocks: Mapping):
    """Vectorized substitute(): exponent arrays in, exponent arrays out."""
    w0 = eq.constants[0]
    acc = (list(w0.a), list(w0.b), w0.c, list(w0.d))
    for occ, w in zip(eq.occurrences, eq.constants[1:]):
        value = blocks[occ.var]
        if occ.twist is not None:
            value = malcev.apply_automorphism_exponents(p, occ.twist, *value)
        if occ.epsilon == -1:
            value = malcev.power_exponents(p, *value, -1)
        acc = malcev.multiply_exponents(p, *acc, *value)
        acc = malcev.multiply_exponents(p, *acc, w.a, w.b, w.c, w.d)
    return acc


def _identity_mask(acc, size: int) -> np.ndarray:
    mask = np.ones(size, dtype=bool)
    a, b, c, d = acc
    for comp in [*a, *b, c, *d]:
        mask &= np.asarray(comp == 0) if isinstance(comp, np.ndarray) else np.full(size, comp == 0)
    return mask


def _scan_group(eq: EquationWord, p: MalcevPresentation, bound: int, chunk: int):
    variables = eq.variables
    per_var = _variable_ranges(p, bound)
    ranges = []
    for _ in variables:
        ranges.extend(per_var)
    total = math.prod(len(rg) for rg in ranges) if ranges else 1
    width = len(per_var)
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop, dtype=np.int64)
        coords = _decode_chunk(flat, ranges) if ranges else []
        blocks = {
            var: _block_exponents(p, coords[i * width:(i + 1) * width])
            for i, var in enumerate(variables)
        }
        acc = _evaluate_group_word(p, eq, blocks)
        hit = _first_true(_identity_mask(acc, stop - start))
        if hit is not None:
            witness = {}
            for i, var in enumerate(variables):
                vals = [int(coords[i * width + j][hit]) for j in range(width)]
                witness[var] = malcev.element_from_vector(p, vals)
            return witness
    return None


def _g_multiply_exponents(ext, acc, acc_tau, value, value_tau):
    p = ext.base
    conj = malcev.apply_automorphism_exponents(p, ext.psi[acc_tau], *value)
    h = malcev.multiply_exponents(p, *acc, *conj)
    hc, tau = ext.mult_table[(acc_tau, value_tau)]
    h = malcev.multiply_exponents(p, *h, hc.a, hc.b, hc.c, hc.d)
    return h, tau


def _g_invert_exponents(ext, value, tau):
    p = ext.base
    hi, tau_inv = ext.inv_table[tau]
    hinv = malcev.power_exponents(p, *value, -1)
    conj = malcev.apply_automorphism_exponents(p, ext.psi[tau_inv], *hinv)
    h = malcev.multiply_exponents(p, hi.a, hi.b, hi.c, hi.d, *conj)
    return h, tau_inv


def _scan_extension(eq: GEquationWord, ext: ExtensionPresentation, bound: int, chunk: int):
    p = ext.base
    variables = eq.variables
    per_var = _variable_ranges(p, bound)
    width = len(per_var)
    ranges = []
    for _ in variables:
        ranges.extend(per_var)
    total = math.prod(len(rg) for rg in ranges) if ranges else 1

    for cosets in itertools.product(range(ext.f), repeat=len(variables)):
        choice = dict(zip(variables, cosets))
        # The final coset index depends only on the transversal choices;
        # skip whole subspaces that cannot reach the identity coset.
        coset = eq.constants[0].tau
        for occ, w in zip(eq.occurrences, eq.constants[1:]):
            z = choice[occ.var]
            if occ.epsilon == -1:
                z = ext.inv_table[z][1]
            coset = ext_mod.coset_product(ext, coset, z)
            coset = ext_mod.coset_product(ext, coset, w.tau)
        if coset != 0:
            continue
        for start in range(0, total, chunk):
            stop = min(start + chunk, total)
            flat = np.arange(start, stop, dtype=np.int64)
            coords = _decode_chunk(flat, ranges) if ranges else []
            blocks = {
                var: _block_exponents(p, coords[i * width:(i + 1) * width])
                for i, var in enumerate(variables)
            }
            w0 = eq.constants[0]
            acc = (list(w0.h.a), list(w0.h.b), w0.h.c, list(w0.h.d))
            acc_tau = w0.tau
            for occ, w in zip(eq.occurrences, eq.constants[1:]):
                value = blocks[occ.var]
                vtau = choice[occ.var]
                if occ.epsilon == -1:
                    value, vtau = _g_invert_exponents(ext, value, vtau)
                acc, acc_tau = _g_multiply_exponents(ext, acc, acc_tau, value, vtau)
                acc, acc_tau = _g_multiply_exponents(
                    ext, acc, acc_tau, (w.h.a, w.h.b, w.h.c, w.h.d), w.tau
                )
            if acc_tau != 0:
                continue
            hit = _first_true(_identity_mask(acc, stop - start))
            if hit is not None:
                witness = {}
                for i, var in enumerate(variables):
                    vals = [int(coords[i * width + j][hit]) for j in range(width)]
                    witness[var] = GElement(
                        malcev.element_from_vector(p, vals), choice[var]
                    )
                return witness
    return None


def brute_force_oracle(eq, group, bound: int, chunk: int = 1 << 15):
    """First witness in lexicographic order within the bound, or None.

    Over a plain presentation: assignment maps variables to NormalForms.
    Over an extension: to GElements, scanning all transversal indices too.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if isinstance(group, ExtensionPresentation):
        if not isinstance(eq, GEquationWord):
            raise TypeError("extension oracle expects a GEquationWord")
        return _scan_extension(eq, group, bound, chunk)
    if not isinstance(eq, EquationWord):
        raise TypeError("group oracle expects an EquationWord")
    return _scan_group(eq, group, bound, chunk)
