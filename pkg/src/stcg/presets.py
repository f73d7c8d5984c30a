"""Ready-made model documents for the command line and the test suite.

Each builder returns a plain dict in the format :func:`stcg.model.load_model`
accepts, so presets can be dumped to json, edited, and reloaded like any
user-written model file.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .operators import ModeSpec, OperatorSum, monomial_label

__all__ = ["PRESETS", "get_preset", "rabi", "parametron", "duffing"]


def rabi() -> dict:
    """Resonant qubit-cavity dipole coupling, lab frame.

    Cavity and qubit share the frequency ``w``; the dipole product
    ``(a + a')(sm + sp)`` splits into one co-rotating pair (static in the
    interaction picture) and one counter-rotating pair at ``+-2w``.
    """
    return {
        "name": "rabi",
        "modes": [
            {"name": "a", "kind": "bosonic", "truncation": 30},
            {"name": "q", "kind": "two_level"},
        ],
        "symbols": {"w": "2pi*2GHz", "g": "2pi*0.4GHz"},
        "filter": {"kind": "gaussian", "tau": "0.2ns"},
        "terms": [
            {"coupling": "g/2", "frequency": "0", "operator": "a*sp"},
            {"coupling": "g/2", "frequency": "0", "operator": "a'*sm"},
            {"coupling": "g/2", "frequency": "2*w", "operator": "a*sm"},
            {"coupling": "g/2", "frequency": "-2*w", "operator": "a'*sp"},
        ],
    }


def parametron() -> dict:
    """Kerr cat qubit: a transmon-style mode with self-Kerr ``chi``, driven
    parametrically at twice its frequency, written in the frame rotating at
    half the pump frequency ``wp``.

    The detuning ``Delta0`` and the squeezing drive ``beta0`` turn on
    linearly over the window ``T`` (``ramps`` below); the Kerr terms are
    static.  The static ``Delta0`` entry cancels the accumulated detuning at
    the end of the ramp and is excluded from ramping explicitly.
    """
    return {
        "name": "parametron",
        "modes": [{"name": "a", "kind": "bosonic", "truncation": 20}],
        "symbols": {
            "wp": "2pi*16GHz",
            "Delta0": "-2pi*67MHz",
            "beta0": "2pi*200MHz",
            "chi": "2pi*68MHz",
            "T": "50ns",
        },
        "filter": {"kind": "gaussian", "tau": "0.125ns"},
        "ramps": [
            {"symbol": "Delta0", "duration": "T"},
            {"symbol": "beta0", "duration": "T"},
        ],
        "terms": [
            {
                "coupling": "Delta0",
                "frequency": "0",
                "operator": "a'*a",
                "ramped": False,
            },
            {"coupling": "-Delta0", "frequency": "0", "operator": "a'*a"},
            {"coupling": "beta0", "frequency": "0", "operator": "a'^2"},
            {"coupling": "beta0", "frequency": "0", "operator": "a^2"},
            {"coupling": "beta0", "frequency": "-2*wp", "operator": "a'^2"},
            {"coupling": "beta0", "frequency": "2*wp", "operator": "a^2"},
            {"coupling": "2*beta0", "frequency": "wp", "operator": "a'*a"},
            {"coupling": "2*beta0", "frequency": "-wp", "operator": "a'*a"},
            {"coupling": "-chi/2", "frequency": "0", "operator": "a'^2*a^2"},
            {"coupling": "-chi/2", "frequency": "wp", "operator": "a^2"},
            {"coupling": "-chi/3", "frequency": "wp", "operator": "a'*a^3"},
            {"coupling": "-chi/2", "frequency": "-wp", "operator": "a'^2"},
            {"coupling": "-chi/3", "frequency": "-wp", "operator": "a'^3*a"},
            {"coupling": "-chi/12", "frequency": "2*wp", "operator": "a^4"},
            {"coupling": "-chi/12", "frequency": "-2*wp", "operator": "a'^4"},
        ],
    }


def duffing(truncation: int = 12) -> dict:
    """Quartic drive mixer: ``det*a'*a`` plus ``g4`` times the fourth power
    of ``a exp(-i*5*w*t) + a' exp(+i*5*w*t)``, with ``w`` one sixth of the
    drive frequency.

    The quartic is expanded symbolically here, so the document carries only
    plain monomial terms (frequencies ``0, +-10w, +-20w``).
    """
    modes = (ModeSpec("a", "bosonic", truncation),)
    lower = OperatorSum.monomial(modes, ((0, 1),))
    raise_ = OperatorSum.monomial(modes, ((1, 0),))
    # (operator, frequency of its exp(-i*freq*t) factor)
    factors = [(lower, Fraction(5)), (raise_, Fraction(-5))]
    merged: dict[tuple, dict] = {}
    for combo in itertools.product(factors, repeat=4):
        freq = sum(f for _, f in combo)
        op = combo[0][0]
        for nxt, _ in combo[1:]:
            op = op.matmul(nxt)
        for key, coeff in op.terms.items():
            slot = merged.setdefault((freq, key), {"coeff": 0})
            slot["coeff"] += int(coeff)

    def freq_str(f: Fraction) -> str:
        if f == 0:
            return "0"
        return f"{f}*w" if f != 1 else "w"

    terms = [
        {"coupling": "det", "frequency": "0", "operator": "a'*a"},
    ]
    for (freq, key), slot in sorted(merged.items()):
        c = slot["coeff"]
        coupling = "g4" if c == 1 else f"{c}*g4"
        terms.append(
            {
                "coupling": coupling,
                "frequency": freq_str(freq),
                "operator": monomial_label(modes, key),
            }
        )
    return {
        "name": "duffing",
        "modes": [{"name": "a", "kind": "bosonic", "truncation": truncation}],
        "symbols": {
            "w": "2pi*1GHz",
            "g4": "2pi*20MHz",
            "det": "0",
        },
        "filter": {"kind": "gaussian", "tau": "0.5ns"},
        "terms": terms,
    }


PRESETS = {"rabi": rabi, "parametron": parametron, "duffing": duffing}


def get_preset(name: str) -> dict:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    return builder()
