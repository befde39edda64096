"""Exact single-cell laws in rational arithmetic.

The three inputs of one cell of the increment recursion take 8 values, plus one bit for
the auxiliary alpha draw, so their joint law is a finite table that can be pushed through
the recursion exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .passage import alpha_rule, increment_step


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _bern(q: Fraction, b: int) -> Fraction:
    return q if b else 1 - q


def west_fraction(p: Fraction, u: Fraction) -> Fraction:
    return p * (1 - u) / (u + p * (1 - u))


@dataclass(frozen=True)
class CellLaw:
    p: Fraction
    u: Fraction
    west: Fraction
    joint: dict  # (alpha, I_out, J_out) -> probability

    def marginal(self, axis: int) -> Fraction:
        return sum((pr for k, pr in self.joint.items() if k[axis] == 1), Fraction(0))

    def pair(self, a: int, b: int) -> dict:
        out: dict = {}
        for k, pr in self.joint.items():
            key = (k[a], k[b])
            out[key] = out.get(key, Fraction(0)) + pr
        return out


def cell_law(p, u, west=None) -> CellLaw:
    """Joint law of (alpha, I_out, J_out) when (w, I_in, J_in) are independent
    Ber(p), Ber(u), Ber(west) and the alpha draw is an independent Ber(p).

    ``west`` defaults to l(u); other values serve as negative controls.
    """
    p, u = _frac(p), _frac(u)
    lw = west_fraction(p, u) if west is None else _frac(west)
    joint: dict = {}
    for om, i_in, j_in, beta in itertools.product((0, 1), repeat=4):
        pr = _bern(p, om) * _bern(u, i_in) * _bern(lw, j_in) * _bern(p, beta)
        i_out, j_out = increment_step(om, j_in, i_in)
        key = (alpha_rule(om, i_in, j_in, beta), i_out, j_out)
        joint[key] = joint.get(key, Fraction(0)) + pr
    return CellLaw(p, u, lw, joint)


def factorization_defects(law: CellLaw) -> dict:
    """Exact differences between the joint law and the product of the target marginals.

    Keys ``full`` (triple), ``increments`` (the (I, J) pair alone) and ``marginals``.
    All values are zero exactly when the single-cell stationarity identity holds.
    """
    targets = (law.p, law.u, law.west)
    full = {}
    for key in itertools.product((0, 1), repeat=3):
        prod = Fraction(1)
        for b, q in zip(key, targets):
            prod *= _bern(q, b)
        full[key] = law.joint.get(key, Fraction(0)) - prod
    pair = law.pair(1, 2)
    inc = {k: pair.get(k, Fraction(0)) - _bern(law.u, k[0]) * _bern(law.west, k[1])
           for k in itertools.product((0, 1), repeat=2)}
    marg = {name: law.marginal(ax) - q for ax, (name, q) in enumerate(zip(("alpha", "I", "J"), targets))}
    return {"full": full, "increments": inc, "marginals": marg}


def factorizes(p, u) -> bool:
    d = factorization_defects(cell_law(p, u))
    return all(v == 0 for part in d.values() for v in part.values())
