"""Filtered chain complexes and their persistence: sublevel and quotient
barcodes, the Morse max-min energy estimate, and the circle one-form model.

Field-coefficient complexes are reduced by the standard column algorithm.
Novikov-coefficient complexes are handled by expanding generators over the
truncated exponent lattice (each T^lambda g at filtration value v_g - lambda),
which realizes the covering-space quotients as finite linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .barcode import Bar, GradedBarcode, ParameterError
from .fields import QQ
from .novikov import NovikovScalar
from .rational import NEG_INF, INF


class MorseStructureError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    gid: str
    degree: int
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class FilteredComplex:
    """Chain complex with rational filtration values.

    boundary: ((src_gid, tgt_gid, coeff), ...); coefficients are field
    elements when precision is None, NovikovScalar otherwise.  The boundary
    lowers degree by one and never raises the filtration (Novikov case:
    valuation of each entry >= the filtration gap).
    """
    field: object
    generators: tuple
    boundary: tuple
    precision: object = None  # None for field coefficients

    def __post_init__(self):
        byid = {}
        for g in self.generators:
            if g.gid in byid:
                raise MorseStructureError(f"duplicate generator id {g.gid!r}")
            byid[g.gid] = g
        ent = {}
        for src, tgt, coeff in self.boundary:
            if src not in byid or tgt not in byid:
                raise MorseStructureError("boundary references unknown generator")
            s, t = byid[src], byid[tgt]
            if t.degree != s.degree - 1:
                raise MorseStructureError(
                    f"boundary {src}->{tgt} does not lower degree by one")
            if self.precision is None:
                if self.field.is_zero(coeff):
                    continue
                if t.value > s.value:
                    raise MorseStructureError(
                        f"boundary {src}->{tgt} raises the filtration")
            else:
                if not isinstance(coeff, NovikovScalar):
                    raise MorseStructureError("Novikov complex needs NovikovScalar entries")
                if coeff.is_zero():
                    continue
                gap = t.value - s.value
                if gap > 0 and coeff.valuation() < gap:
                    raise MorseStructureError(
                        f"boundary {src}->{tgt}: valuation below the filtration gap")
            if (src, tgt) in ent:
                raise MorseStructureError(f"duplicate boundary entry {src}->{tgt}")
            ent[(src, tgt)] = coeff
        object.__setattr__(self, "_byid", byid)
        object.__setattr__(self, "_entries", ent)
        self._check_dd()

    def _check_dd(self):
        out = {}
        for (src, mid), c1 in self._entries.items():
            for (src2, tgt), c2 in self._entries.items():
                if src2 != mid:
                    continue
                key = (src, tgt)
                prod = c1.mul(c2) if self.precision is not None else self.field.mul(c1, c2)
                if key in out:
                    out[key] = out[key].add(prod) if self.precision is not None \
                        else self.field.add(out[key], prod)
                else:
                    out[key] = prod
        for key, v in out.items():
            zero = v.is_zero() if self.precision is not None else self.field.is_zero(v)
            if not zero:
                raise MorseStructureError(f"boundary does not square to zero at {key}")

    def gen(self, gid) -> Generator:
        return self._byid[gid]

    def coeff(self, src, tgt):
        return self._entries.get((src, tgt))


# --- reduction ------------------------------------------------------------

def _reduce(C: FilteredComplex):
    """Standard persistence column reduction in filtration order.

    Returns (order, pairs, unpaired) where order is the generator list in
    filtration order, pairs are (birth_pos, death_pos), unpaired are
    positions of essential creators.
    """
    field = C.field
    order = sorted(C.generators, key=lambda g: (g.value, g.degree, g.gid))
    pos = {g.gid: k for k, g in enumerate(order)}
    cols = []
    for g in order:
        col = {}
        for h in order:
            c = C.coeff(g.gid, h.gid)
            if c is not None and not field.is_zero(c):
                col[pos[h.gid]] = c
        cols.append(col)
    low_owner = {}
    pairs = []
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            if low not in low_owner:
                low_owner[low] = j
                pairs.append((low, j))
                break
            jp = low_owner[low]
            factor = field.div(col[low], cols[jp][low])
            for r, c in cols[jp].items():
                prev = col.get(r, field.zero())
                nxt = field.sub(prev, field.mul(factor, c))
                if field.is_zero(nxt):
                    col.pop(r, None)
                else:
                    col[r] = nxt
    deaths = {j for _, j in pairs}
    killed = {i for i, _ in pairs}
    # columns still nonzero are deaths; empty columns without a killer are essential
    unpaired = [k for k in range(len(order)) if k not in deaths and k not in killed]
    return order, pairs, unpaired


def _require_field_case(C: FilteredComplex, allow_novikov):
    if C.precision is None:
        return C
    if not allow_novikov:
        raise MorseStructureError("operation needs field coefficients")
    return expand_novikov(C)


def expand_novikov(C: FilteredComplex, window=None, max_generators=20000) -> FilteredComplex:
    """Field-coefficient expansion of a Novikov complex over the truncated
    exponent lattice: generators T^lambda g at value v_g - lambda."""
    if C.precision is None:
        return C
    exps = [Fraction(0)]
    for (_, _), coeff in C._entries.items():
        exps.extend(e for e, _ in coeff.terms)
    denom = 1
    for e in exps:
        denom = denom * e.denominator // math.gcd(denom, e.denominator)
    step = Fraction(1, denom)
    values = [g.value for g in C.generators] or [Fraction(0)]
    spread = max(values) - min(values)
    if window is None:
        window = 2 * (max(exps) + spread) + 1
    window = min(Fraction(window), Fraction(C.precision))
    count = int(window / step)
    if count * len(C.generators) > max_generators:
        raise MorseStructureError("Novikov expansion too large; coarsen exponents")
    lattice = [k * step for k in range(count)]
    gens = []
    for g in C.generators:
        for lam in lattice:
            gens.append(Generator(f"{g.gid}@{lam}", g.degree, g.value - lam))
    boundary = []
    for (src, tgt), coeff in C._entries.items():
        for lam in lattice:
            for e, cval in coeff.terms:
                mu = lam + e
                if mu < window:
                    boundary.append((f"{src}@{lam}", f"{tgt}@{mu}", cval))
    return FilteredComplex(C.field, tuple(gens), tuple(boundary))


def sublevel_persistence(C: FilteredComplex) -> GradedBarcode:
    """Barcode of the sublevel filtration (field coefficients)."""
    if C.precision is not None:
        raise MorseStructureError("sublevel_persistence needs field coefficients")
    order, pairs, unpaired = _reduce(C)
    bars = []
    for i, j in pairs:
        birth, death = order[i], order[j]
        if birth.value < death.value:
            bars.append(Bar(birth.value, death.value, birth.degree))
    for k in unpaired:
        g = order[k]
        bars.append(Bar(g.value, INF, g.degree))
    return GradedBarcode.of(bars)


def quotient_persistence(C: FilteredComplex) -> GradedBarcode:
    """Barcode of the quotient family c -> H_*(C / C_{<=c}).

    Realized through the sublevel reduction pairing: a finite pair
    (birth b, death d) in degree k contributes [b, d) in degree k+1, and an
    essential degree-k generator at value v contributes [-inf, v) in degree k.
    Validated against the direct rank oracle in the test suite.
    """
    Cf = _require_field_case(C, allow_novikov=True)
    order, pairs, unpaired = _reduce(Cf)
    bars = []
    for i, j in pairs:
        birth, death = order[i], order[j]
        if birth.value < death.value:
            bars.append(Bar(birth.value, death.value, death.degree))
    for k in unpaired:
        g = order[k]
        bars.append(Bar(NEG_INF, g.value, g.degree))
    return GradedBarcode.of(bars)


# --- Morse graphs -----------------------------------------------------------

@dataclass(frozen=True)
class MorsePoint:
    pid: str
    index: int
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class MorseGraph:
    """Critical points with the directed flow relation (upper -> lower,
    index difference exactly one)."""
    points: tuple
    connections: tuple  # (upper_pid, lower_pid)

    def __post_init__(self):
        byid = {p.pid: p for p in self.points}
        if len(byid) != len(self.points):
            raise MorseStructureError("duplicate critical point ids")
        for up, lo in self.connections:
            if up not in byid or lo not in byid:
                raise MorseStructureError("connection references unknown point")
            if byid[up].index != byid[lo].index + 1:
                raise MorseStructureError(
                    f"connection {up}->{lo} must drop the index by exactly one")
        object.__setattr__(self, "_byid", byid)


def morse_energy_estimate(graph: MorseGraph) -> Fraction:
    """The max-min estimate: over flow sources p, the minimum of
    |f(p) - f(q)| over their flow targets q, maximized."""
    partners = {}
    for up, lo in graph.connections:
        partners.setdefault(up, []).append(lo)
    if not partners:
        raise ParameterError("no connected pairs: estimate undefined")
    best = None
    for up, los in partners.items():
        pu = graph._byid[up]
        m = min(abs(pu.value - graph._byid[lo].value) for lo in los)
        if best is None or m > best:
            best = m
    return best


# --- the circle one-form model ----------------------------------------------

def circle_one_form(a_plus, a_minus, field=QQ):
    """Two-critical-point Morse model of the graph of a one-form on the
    circle with enclosed areas a_plus, a_minus.

    The boundary of the index-1 point carries the two gradient trajectories
    as Novikov terms with exponents {0, |a_plus - a_minus|}; coefficients are
    chosen non-cancelling so the symmetric-area case stays nonzero.  Returns
    (complex, expected_energy) with expected_energy = min(a_plus, a_minus).
    """
    a_plus, a_minus = Fraction(a_plus), Fraction(a_minus)
    if a_plus <= 0 or a_minus <= 0:
        raise ParameterError("areas must be positive")
    small = min(a_plus, a_minus)
    period = abs(a_plus - a_minus)
    precision = 2 * (a_plus + a_minus) + 1
    coeff = NovikovScalar.make(field, precision,
                               [(Fraction(0), field.one()), (period, field.one())])
    gens = (Generator("min", 0, Fraction(0)), Generator("max", 1, small))
    C = FilteredComplex(field, gens, (("max", "min", coeff),), precision=precision)
    return C, small


def novikov_presentation_from_complex(C: FilteredComplex, degree=0):
    """Presentation of the degree-`degree` part of the complex's homology-type
    module over the Novikov ring: generators are the degree-`degree`
    generators at normalized filtration, relations the value-twisted boundary
    columns from one degree up."""
    if C.precision is None:
        raise MorseStructureError("needs Novikov coefficients")
    from .energy import NovikovPresentation
    rows_g = [g for g in C.generators if g.degree == degree]
    cols_g = [g for g in C.generators if g.degree == degree + 1]
    field, precision = C.field, Fraction(C.precision)
    rows = []
    for h in rows_g:
        row = []
        for g in cols_g:
            coeff = C.coeff(g.gid, h.gid)
            if coeff is None:
                row.append(NovikovScalar.zero(field, precision))
            else:
                twist = g.value - h.value
                row.append(NovikovScalar.make(
                    field, precision, [(e + twist, cv) for e, cv in coeff.terms],
                    exact=coeff.exact))
        rows.append(tuple(row))
    return NovikovPresentation(len(rows_g), tuple(rows), field, precision)


def circle_energy(C: FilteredComplex):
    """Both pipeline routes for the circle model: quotient-persistence torsion
    threshold and Novikov torsion exponent."""
    from .barcode import torsion_threshold
    from .energy import torsion_exponent
    quot = torsion_threshold(quotient_persistence(C))
    pres = novikov_presentation_from_complex(C, degree=0)
    nov = torsion_exponent(pres)
    return quot, nov.exponent
