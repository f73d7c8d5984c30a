"""Input models and assembly of effective coarse-grained generators.

A :class:`ModelSpec` lists interaction-picture Hamiltonian terms
``g * h * exp(-i*w*t)`` over declared modes and symbols.  Assembly contracts
products of these terms into an :class:`EffectiveModel`: a corrected
Hamiltonian plus pseudo-dissipators, with coefficients built from the
closed-form contraction coefficients.  Linearly ramped amplitudes are
encoded as pairs of frequency-shifted static terms and resolved after
assembly by a series limit in the shift regulator.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import sympy as sp

from .contraction import (
    FrequencyTuple,
    UnresolvedSingularityError,
    contraction_coefficient,
)
from .operators import (
    DEFAULT_DEGREE_CAP,
    ModeSpec,
    OperatorSum,
    monomial_label,
    parse_operator,
)
from .symbols import TAU, TIME, FilterSpec, FreqExpr, GaussianFilter, scalar_eval

__all__ = [
    "HamiltonianTermSpec",
    "DissipatorTermSpec",
    "ModelSpec",
    "EffectiveModel",
    "load_model",
    "parse_quantity",
    "effective_hamiltonian",
    "effective_dissipators",
    "assemble",
    "encode_linear_ramp",
    "prune_terms",
    "ir_limit",
    "export_model",
    "load_effective",
]

#: Default name of the frequency-shift regulator used for ramps.
RAMP_REGULATOR = "delta"


@dataclass(frozen=True)
class HamiltonianTermSpec:
    """One Hamiltonian term ``coeff * op * exp(-i*freq*t)``."""

    coeff: sp.Expr
    freq: FreqExpr
    op: OperatorSum

    def conjugate(self) -> "HamiltonianTermSpec":
        return HamiltonianTermSpec(
            sp.conjugate(self.coeff), -self.freq, self.op.adjoint()
        )


@dataclass(frozen=True)
class DissipatorTermSpec:
    """Pseudo-dissipator ``rate * exp(-i*freq*t) * (L rho J - {JL, rho}/2)``."""

    rate: sp.Expr
    freq: FreqExpr
    left: OperatorSum
    right: OperatorSum

    def conjugate(self) -> "DissipatorTermSpec":
        return DissipatorTermSpec(
            sp.conjugate(self.rate),
            -self.freq,
            self.right.adjoint(),
            self.left.adjoint(),
        )


@dataclass
class ModelSpec:
    """Interaction-picture model: modes, symbols, terms, and the filter."""

    name: str
    modes: tuple[ModeSpec, ...]
    terms: tuple[HamiltonianTermSpec, ...]
    filter_spec: FilterSpec
    params: dict[str, float | None] = field(default_factory=dict)
    regulator: str | None = None

    def __post_init__(self):
        self.modes = tuple(self.modes)
        self.terms = tuple(self.terms)
        declared = set(self.params) | {TAU.name, TIME.name}
        if self.regulator:
            declared.add(self.regulator)
        for term in self.terms:
            used = {s.name for s in term.coeff.free_symbols} | set(
                term.freq.symbols
            )
            unknown = used - declared
            if unknown:
                raise ValueError(
                    f"model {self.name!r} uses undeclared symbol(s) "
                    f"{sorted(unknown)}"
                )

    def check_hermitian(self):
        """Every term must have its conjugate partner in the list."""
        remaining = list(self.terms)
        while remaining:
            term = remaining.pop()
            partner = term.conjugate()
            for i, cand in enumerate(remaining):
                if (
                    cand.freq == partner.freq
                    and cand.op == partner.op
                    and sp.simplify(cand.coeff - partner.coeff) == 0
                ):
                    remaining.pop(i)
                    break
            else:
                if not _is_self_conjugate(term):
                    raise ValueError(
                        f"model {self.name!r} not Hermitian: no conjugate "
                        f"partner for term at frequency {term.freq}"
                    )

    def numeric_assignment(
        self, overrides: Mapping[str, float] | None = None
    ) -> dict[str, float]:
        out = {k: v for k, v in self.params.items() if v is not None}
        out.update(overrides or {})
        missing = [
            k for k in self.params if k not in out or out[k] is None
        ]
        if missing:
            raise ValueError(f"no numeric value for symbol(s) {missing}")
        return out


def _is_self_conjugate(term: HamiltonianTermSpec) -> bool:
    partner = term.conjugate()
    return (
        partner.freq == term.freq
        and partner.op == term.op
        and sp.simplify(partner.coeff - term.coeff) == 0
    )


@dataclass
class EffectiveModel:
    """Assembled coarse-grained generator through a given order."""

    order: int
    modes: tuple[ModeSpec, ...]
    hamiltonian: tuple[HamiltonianTermSpec, ...]
    dissipators: tuple[DissipatorTermSpec, ...]
    filter_spec: FilterSpec
    provenance: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, EffectiveModel):
            return NotImplemented
        return (
            self.order == other.order
            and self.modes == other.modes
            and _term_map(self.hamiltonian) == _term_map(other.hamiltonian)
            and _diss_map(self.dissipators) == _diss_map(other.dissipators)
        )


def _term_map(terms):
    out = {}
    for term in terms:
        for key, coeff in term.op.terms.items():
            k = (key, term.freq)
            out[k] = sp.expand(out.get(k, sp.Integer(0)) + coeff * term.coeff)
    return {k: sp.nsimplify(v) for k, v in out.items() if v != 0}


def _diss_map(terms):
    out = {}
    for term in terms:
        for lk, lc in term.left.terms.items():
            for jk, jc in term.right.terms.items():
                k = (lk, jk, term.freq)
                out[k] = sp.expand(
                    out.get(k, sp.Integer(0)) + lc * jc * term.rate
                )
    return {k: sp.nsimplify(v) for k, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

_QUANTITY_RE = re.compile(
    r"^\s*(?P<sign>[-+]\s*)?(?P<twopi>2\s*pi\s*\*\s*)?"
    r"(?P<num>[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?)"
    r"\s*(?P<unit>[A-Za-z]*)\s*$"
)

_UNIT_SCALE = {
    "": 1.0,
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    "GHz": 1e9,
    "THz": 1e12,
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
    "ps": 1e-12,
}


def parse_quantity(text) -> float:
    """Parse ``"2pi*2GHz"``-style quantities to plain numbers.

    Frequencies are angular (rad/s): a Hz-family unit gives cycles/s, and
    the explicit ``2pi*`` prefix multiplies by 2*pi -- never implicitly.
    Times use second-family units.  Bare numbers pass through.
    """
    if isinstance(text, (int, float)):
        return float(text)
    match = _QUANTITY_RE.match(str(text))
    if not match:
        raise ValueError(f"cannot parse quantity {text!r}")
    unit = match.group("unit")
    if unit not in _UNIT_SCALE:
        raise ValueError(f"unknown unit {unit!r} in {text!r}")
    value = float(match.group("num")) * _UNIT_SCALE[unit]
    if match.group("twopi"):
        value *= 2.0 * 3.141592653589793
    if (match.group("sign") or "").strip() == "-":
        value = -value
    return value


def _coupling_locals(names: Iterable[str]) -> dict:
    out = {n: sp.Symbol(n, real=True) for n in names}
    out["t"] = TIME
    out["tau"] = TAU
    return out


def load_model(document, auto_conjugates: bool = False) -> ModelSpec:
    """Build a :class:`ModelSpec` from a model document (dict, json text,
    or path to a json file).

    With ``auto_conjugates`` missing conjugate partners are added; otherwise
    a non-Hermitian term list is rejected.
    """
    if isinstance(document, str):
        if document.lstrip().startswith("{"):
            document = json.loads(document)
        else:
            with open(document) as fh:
                document = json.load(fh)
    modes = tuple(
        ModeSpec(m["name"], m["kind"], m.get("truncation"))
        for m in document.get("modes", [])
    )
    symbols = document.get("symbols", [])
    if isinstance(symbols, Mapping):
        symbols = [{"name": k, "value": v} for k, v in symbols.items()]
    params: dict[str, float | None] = {}
    for entry in symbols:
        value = entry.get("value")
        params[entry["name"]] = None if value is None else parse_quantity(value)

    filt = document.get("filter", {"kind": "gaussian"})
    if filt.get("kind", "gaussian") != "gaussian":
        raise ValueError(f"unsupported filter kind {filt.get('kind')!r}")
    tau = filt.get("tau")
    filter_spec = GaussianFilter(TAU if tau is None else parse_quantity(tau))
    if tau is not None:
        params.setdefault(TAU.name, parse_quantity(tau))

    locs = _coupling_locals(params)
    ramps = document.get("ramps", [])
    regulator = document.get("regulator", RAMP_REGULATOR) if ramps else None
    terms = []
    for entry in document.get("terms", []):
        coeff = sp.sympify(entry["coupling"], locals=locs)
        freq = FreqExpr.parse(entry["frequency"])
        unknown = set(freq.symbols) - set(params)
        if unknown:
            raise ValueError(f"undeclared frequency symbol(s) {sorted(unknown)}")
        op = parse_operator(entry["operator"], modes)
        term = HamiltonianTermSpec(coeff, freq, op)
        # A term is ramped (coupling means coeff * t/duration) when a ramp
        # entry's symbol appears in its coupling; an explicit "ramped" field
        # on the term overrides the symbol match.
        matched = None
        if entry.get("ramped") is not False:
            for ramp in ramps:
                if sp.Symbol(ramp["symbol"], real=True) in coeff.free_symbols:
                    matched = ramp
                    break
            if entry.get("ramped") and matched is None:
                raise ValueError(
                    f"term at frequency {freq} marked ramped but no ramp "
                    "entry names a symbol from its coupling"
                )
        if matched is None:
            terms.append(term)
        else:
            duration = sp.Symbol(matched["duration"], positive=True)
            params.setdefault(matched["duration"], None)
            terms.extend(encode_linear_ramp(term, duration, regulator))

    model = ModelSpec(
        name=document.get("name", "model"),
        modes=modes,
        terms=tuple(terms),
        filter_spec=filter_spec,
        params=params,
        regulator=regulator,
    )
    if auto_conjugates:
        model = _complete_conjugates(model)
    model.check_hermitian()
    return model


def _complete_conjugates(model: ModelSpec) -> ModelSpec:
    terms = list(model.terms)
    for term in model.terms:
        partner = term.conjugate()
        if _is_self_conjugate(term):
            continue
        found = any(
            cand.freq == partner.freq
            and cand.op == partner.op
            and sp.simplify(cand.coeff - partner.coeff) == 0
            for cand in terms
            if cand is not term
        )
        if not found:
            terms.append(partner)
    return ModelSpec(
        name=model.name,
        modes=model.modes,
        terms=tuple(terms),
        filter_spec=model.filter_spec,
        params=model.params,
        regulator=model.regulator,
    )


# ---------------------------------------------------------------------------
# Ramps
# ---------------------------------------------------------------------------


def encode_linear_ramp(
    term: HamiltonianTermSpec,
    duration: sp.Symbol,
    regulator: str = RAMP_REGULATOR,
) -> tuple[HamiltonianTermSpec, HamiltonianTermSpec]:
    """Encode ``coeff * (t/T)`` as two static terms split by a regulator.

    ``g*(t/T)*exp(-i*w*t)`` is the limit of ``(i*g/(2*d*T)) *
    [exp(-i*(w+d)*t) - exp(-i*(w-d)*t)]`` as the shift ``d`` goes to zero;
    the limit is taken after assembly (series in ``d``, keeping the
    constant part).  The symmetric split keeps the encoded term list
    exactly Hermitian at finite shift, not just in the limit.
    """
    shift = sp.Symbol(regulator, real=True)
    if shift in term.coeff.free_symbols:
        raise ValueError(f"regulator {regulator!r} already used in coupling")
    base = sp.I * term.coeff / (2 * shift * duration)
    reg = FreqExpr.symbol(regulator)
    return (
        HamiltonianTermSpec(base, term.freq + reg, term.op),
        HamiltonianTermSpec(-base, term.freq - reg, term.op),
    )


def _ramp_limit(groups: Mapping, regulator: str):
    """Take the regulator -> 0 limit groupwise.

    ``groups`` maps a merge key to a list of ``(coeff, shift_multiple)``
    pairs; the combined coefficient including the residual phase
    ``exp(-i*m*shift*t)`` is expanded in the shift and the constant term
    kept.  Surviving negative powers mean the ramp limit does not exist.
    """
    shift = sp.Symbol(regulator, real=True)
    out = {}
    for key, pieces in groups.items():
        combined = sp.Add(
            *(
                coeff * sp.exp(-sp.I * _frac_to_rational(m) * shift * TIME)
                for coeff, m in pieces
            )
        )
        if shift not in combined.free_symbols:
            value = combined
        else:
            series = combined.series(shift, 0, 1).removeO()
            series = sp.expand(series)
            for order in range(1, 32):
                pole = series.coeff(shift, -order)
                if pole != 0 and sp.simplify(pole) != 0:
                    raise UnresolvedSingularityError(
                        f"ramp limit diverges (shift^-{order}) for term {key}"
                    )
            value = series.coeff(shift, 0)
        value = sp.expand(value)
        if value != 0:
            out[key] = value
    return out


def _frac_to_rational(f: Fraction) -> sp.Rational:
    return sp.Rational(f.numerator, f.denominator)


def _split_regulator(freq: FreqExpr, regulator: str | None):
    """Return (base frequency, regulator multiple)."""
    if regulator is None or regulator not in freq.symbols:
        return freq, Fraction(0)
    coeffs = dict(freq.coeffs)
    mult = coeffs.pop(regulator)
    return FreqExpr(coeffs), mult


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def _rev_neg(freqs: Sequence[FreqExpr]) -> tuple[FreqExpr, ...]:
    return tuple(-w for w in reversed(freqs))


def _neg(freqs: Sequence[FreqExpr]) -> tuple[FreqExpr, ...]:
    return tuple(-w for w in freqs)


def _orders(order, minimum: int) -> list[int]:
    if isinstance(order, int):
        return list(range(minimum, order + 1))
    return [k for k in order if k >= minimum]


def effective_hamiltonian(
    model: ModelSpec, order, degree_cap: int = DEFAULT_DEGREE_CAP
) -> tuple[HamiltonianTermSpec, ...]:
    """Corrected Hamiltonian terms through the given order.

    For every tuple of input terms the coefficient is the symmetrized
    contraction coefficient times the product of couplings; the operator is
    the product of the tuple's operators (outermost last), the frequency the
    tuple sum.  Terms merge on (canonical monomial, frequency).
    """
    merged: dict = {}
    filt = model.filter_spec
    for k in _orders(order, 1):
        for combo in itertools.product(model.terms, repeat=k):
            mu = tuple(term.freq for term in combo)
            c_fwd = contraction_coefficient(FrequencyTuple(mu), filt)
            c_bwd = contraction_coefficient(FrequencyTuple(_rev_neg(mu)), filt)
            coupling = sp.Mul(*(term.coeff for term in combo))
            q = (c_fwd + c_bwd) / 2 * coupling
            if q == 0:
                continue
            op = combo[-1].op
            for term in reversed(combo[:-1]):
                op = op.matmul(term.op, degree_cap)
            total = FreqExpr.zero()
            for w in mu:
                total = total + w
            for key, mono in op.terms.items():
                slot = (key, total)
                merged[slot] = merged.get(slot, sp.Integer(0)) + q * mono
    return _finish_hamiltonian(model, merged)


def _finish_hamiltonian(model, merged):
    grouped: dict = {}
    for (key, freq), coeff in merged.items():
        base, mult = _split_regulator(freq, model.regulator)
        grouped.setdefault((key, base), []).append((coeff, mult))
    if model.regulator:
        final = _ramp_limit(grouped, model.regulator)
    else:
        final = {
            key: sp.expand(sp.Add(*(c for c, _ in pieces)))
            for key, pieces in grouped.items()
        }
    out = []
    for (key, base) in sorted(final, key=lambda kb: (str(kb[1]), kb[0])):
        coeff = final[(key, base)]
        if coeff == 0:
            continue
        out.append(
            HamiltonianTermSpec(
                coeff, base, OperatorSum.monomial(model.modes, key)
            )
        )
    return tuple(out)


def effective_dissipators(
    model: ModelSpec,
    order,
    convention: str = "plain",
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> tuple[DissipatorTermSpec, ...]:
    """Pseudo-dissipator terms through the given order (empty below 2).

    The rate combines the direct contraction coefficient with a mirrored
    one; ``convention`` selects how the mirrored frequency tuple is formed:
    "plain" uses the negated tuples ``(-nu, -mu)``, "reversed" additionally
    reverses both.  "plain" is the default because it closes the term set
    under conjugation exactly (see tests); the alternate is kept for
    comparison.
    """
    if convention not in ("plain", "reversed"):
        raise ValueError(f"unknown convention {convention!r}")
    merged: dict = {}
    filt = model.filter_spec
    for k in _orders(order, 2):
        for l in range(1, k):
            r = k - l
            for lcombo in itertools.product(model.terms, repeat=l):
                mu = tuple(term.freq for term in lcombo)
                for rcombo in itertools.product(model.terms, repeat=r):
                    nu = tuple(term.freq for term in rcombo)
                    c_fwd = contraction_coefficient(
                        FrequencyTuple(mu, nu), filt
                    )
                    if convention == "plain":
                        mirror = FrequencyTuple(_neg(nu), _neg(mu))
                    else:
                        mirror = FrequencyTuple(_rev_neg(nu), _rev_neg(mu))
                    c_bwd = contraction_coefficient(mirror, filt)
                    coupling = sp.Mul(
                        *(term.coeff for term in lcombo),
                        *(term.coeff for term in rcombo),
                    )
                    rate = -sp.I * (c_fwd - c_bwd) * coupling
                    if rate == 0:
                        continue
                    left = lcombo[-1].op
                    for term in reversed(lcombo[:-1]):
                        left = left.matmul(term.op, degree_cap)
                    right = rcombo[0].op
                    for term in rcombo[1:]:
                        right = right.matmul(term.op, degree_cap)
                    total = FreqExpr.zero()
                    for w in mu + nu:
                        total = total + w
                    for lkey, lmono in left.terms.items():
                        for jkey, jmono in right.terms.items():
                            slot = (lkey, jkey, total)
                            merged[slot] = (
                                merged.get(slot, sp.Integer(0))
                                + rate * lmono * jmono
                            )
    grouped: dict = {}
    for (lkey, jkey, freq), ratev in merged.items():
        base, mult = _split_regulator(freq, model.regulator)
        grouped.setdefault((lkey, jkey, base), []).append((ratev, mult))
    if model.regulator:
        final = _ramp_limit(grouped, model.regulator)
    else:
        final = {
            key: sp.expand(sp.Add(*(c for c, _ in pieces)))
            for key, pieces in grouped.items()
        }
    out = []
    for (lkey, jkey, base) in sorted(
        final, key=lambda kb: (str(kb[2]), kb[0], kb[1])
    ):
        rate = final[(lkey, jkey, base)]
        if rate == 0:
            continue
        out.append(
            DissipatorTermSpec(
                rate,
                base,
                OperatorSum.monomial(model.modes, lkey),
                OperatorSum.monomial(model.modes, jkey),
            )
        )
    return tuple(out)


def assemble(
    model: ModelSpec,
    order: int,
    convention: str = "plain",
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> EffectiveModel:
    """Full effective model: Hamiltonian and dissipators through ``order``."""
    return EffectiveModel(
        order=order,
        modes=model.modes,
        hamiltonian=effective_hamiltonian(model, order, degree_cap),
        dissipators=effective_dissipators(model, order, convention, degree_cap),
        filter_spec=model.filter_spec,
        provenance={"model": model.name, "convention": convention},
    )


# ---------------------------------------------------------------------------
# Post-processing
# ---------------------------------------------------------------------------


def ir_limit(expr: sp.Expr, tau: sp.Symbol = TAU) -> sp.Expr:
    """Drop exponentially filtered content: any ``exp`` carrying ``tau``
    (a non-zero filtered frequency) goes to zero, bare ``tau`` powers stay.

    Models the regime where every retained frequency mismatch is far above
    the filter cutoff."""
    expr = sp.expand(expr)
    return sp.expand(
        expr.replace(
            lambda e: e.func is sp.exp and e.has(tau),
            lambda e: sp.Integer(0),
        )
    )


def _peak_magnitude(coeff, assignment, times) -> float:
    values = []
    for t in times:
        point = dict(assignment)
        point[TIME.name] = t
        values.append(abs(scalar_eval(coeff, point)))
    return max(values)


def prune_terms(
    eff: EffectiveModel,
    threshold: float,
    assignment: Mapping[str, float],
    time_window: tuple[float, float] | None = None,
    samples: int = 9,
) -> EffectiveModel:
    """Drop terms whose peak numeric magnitude is below ``threshold``.

    Time-dependent coefficients are maximized over ``time_window`` on a
    uniform sample grid.  The dropped-term census lands in provenance.
    """
    if time_window is None:
        times = [0.0]
    else:
        t0, t1 = time_window
        times = [t0 + (t1 - t0) * i / (samples - 1) for i in range(samples)]
    ham = [
        term
        for term in eff.hamiltonian
        if _peak_magnitude(term.coeff, assignment, times) >= threshold
    ]
    dis = [
        term
        for term in eff.dissipators
        if _peak_magnitude(term.rate, assignment, times) >= threshold
    ]
    provenance = dict(eff.provenance)
    provenance["pruned"] = {
        "threshold": threshold,
        "hamiltonian_dropped": len(eff.hamiltonian) - len(ham),
        "dissipators_dropped": len(eff.dissipators) - len(dis),
    }
    return EffectiveModel(
        order=eff.order,
        modes=eff.modes,
        hamiltonian=tuple(ham),
        dissipators=tuple(dis),
        filter_spec=eff.filter_spec,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------


def _mono_label(modes, op: OperatorSum) -> str:
    ((key, coeff),) = op.terms.items()
    if coeff != 1:
        raise ValueError("export expects unit-coefficient monomials")
    return monomial_label(modes, key)


def export_model(eff: EffectiveModel, fmt: str = "json"):
    """Serialize an effective model ("json" dict or "text" listing)."""
    if fmt == "json":
        return {
            "order": eff.order,
            "modes": [
                {"name": m.name, "kind": m.kind, "truncation": m.truncation}
                for m in eff.modes
            ],
            "hamiltonian": [
                {
                    "coeff": str(term.coeff),
                    "frequency": str(term.freq),
                    "operator": _mono_label(eff.modes, term.op),
                }
                for term in eff.hamiltonian
            ],
            "dissipators": [
                {
                    "rate": str(term.rate),
                    "L": _mono_label(eff.modes, term.left),
                    "J": _mono_label(eff.modes, term.right),
                    "frequency": str(term.freq),
                }
                for term in eff.dissipators
            ],
        }
    if fmt == "text":
        lines = [f"# effective model, order {eff.order}", "[hamiltonian]"]
        for term in eff.hamiltonian:
            lines.append(
                f"  {_mono_label(eff.modes, term.op):<16} "
                f"freq {str(term.freq):<18} coeff {term.coeff}"
            )
        lines.append("[dissipators]")
        for term in eff.dissipators:
            lines.append(
                f"  L {_mono_label(eff.modes, term.left):<12} "
                f"J {_mono_label(eff.modes, term.right):<12} "
                f"freq {str(term.freq):<18} rate {term.rate}"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def load_effective(document, filter_spec: FilterSpec | None = None) -> EffectiveModel:
    """Inverse of :func:`export_model` for the json format."""
    if isinstance(document, str):
        document = json.loads(document)
    modes = tuple(
        ModeSpec(m["name"], m["kind"], m.get("truncation"))
        for m in document["modes"]
    )
    locs = _coupling_locals(
        set().union(
            *(
                _symbol_names(entry.get("coeff") or entry.get("rate"))
                for entry in document["hamiltonian"] + document["dissipators"]
            )
        )
        if (document["hamiltonian"] or document["dissipators"])
        else []
    )
    ham = tuple(
        HamiltonianTermSpec(
            sp.sympify(entry["coeff"], locals=locs),
            FreqExpr.parse(entry["frequency"]),
            parse_operator(entry["operator"], modes),
        )
        for entry in document["hamiltonian"]
    )
    dis = tuple(
        DissipatorTermSpec(
            sp.sympify(entry["rate"], locals=locs),
            FreqExpr.parse(entry["frequency"]),
            parse_operator(entry["L"], modes),
            parse_operator(entry["J"], modes),
        )
        for entry in document["dissipators"]
    )
    return EffectiveModel(
        order=document["order"],
        modes=modes,
        hamiltonian=ham,
        dissipators=dis,
        filter_spec=filter_spec or GaussianFilter(),
        provenance={"loaded": True},
    )


def _symbol_names(expr_text: str) -> set[str]:
    return set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", expr_text)) - {
        "I",
        "exp",
        "sqrt",
        "pi",
        "E",
        "conjugate",
        "t",
        "tau",
        "re",
        "im",
    }
