"""Hom-persistence modules, the displacement-energy lower bound e_D, and the
Novikov-module formulation.

hom_persistence(F, G) is the c-indexed barcode of the two-term Hom complex
between grid presentations of F and the c-translate of G.  The complex is
additive in both arguments, so it is evaluated per bar pair: degree-0
cohomology is the Hom space, degree-1 the first derived Hom of the
presentations.  Dimensions are sampled at the pair's critical c values,
midpoints, and one point beyond each side (outside the sweep window all Hom
spaces are provably stable); tau-composition ranks between consecutive
samples assemble the intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .barcode import Bar, GradedBarcode
from .fields import F2
from .linalg import Matrix
from .novikov import NovikovScalar, PrecisionExhausted
from .rational import INF, NEG_INF, ext_add, is_finite


class UnsupportedInput(ValueError):
    pass


# --- per-pair two-term complexes --------------------------------------------

def _alive(bar: Bar, t) -> bool:
    return bar.birth <= t and t < bar.death


def _pair_t_samples(bar_f: Bar, bar_g: Bar, c):
    pts = set()
    for e in (bar_f.birth, bar_f.death):
        if is_finite(e):
            pts.add(Fraction(e))
    for e in (bar_g.birth, bar_g.death):
        if is_finite(e):
            pts.add(ext_add(e, c))
    pts = sorted(pts)
    if not pts:
        return [Fraction(0)]
    return [pts[0] - 1] + pts + [pts[-1] + 1]


@dataclass
class _PairComplex:
    """Two-term Hom complex of a single bar pair at a fixed shift c, over a
    fixed t-sample list."""
    field: object
    samples: list
    c0_slots: list       # t-sample indices carrying a C^0 coordinate
    c1_slots: list       # consecutive-pair indices carrying a C^1 coordinate
    d0: Matrix           # C^0 -> C^1


def _pair_complex(field, bar_f, bar_g, c, samples):
    af = [_alive(bar_f, s) for s in samples]
    ag = [_alive(bar_g, s - c) for s in samples]
    c0 = [k for k in range(len(samples)) if af[k] and ag[k]]
    c1 = [k for k in range(len(samples) - 1) if ag[k] and af[k + 1]]
    col_of = {k: i for i, k in enumerate(c0)}
    one, zero = field.one(), field.zero()
    rows = []
    for k in c1:
        row = [zero] * len(c0)
        if af[k] and af[k + 1] and k in col_of:
            row[col_of[k]] = field.add(row[col_of[k]], one)
        if ag[k] and ag[k + 1] and (k + 1) in col_of:
            row[col_of[k + 1]] = field.sub(row[col_of[k + 1]], one)
        rows.append(row)
    d0 = Matrix.from_rows(field, rows, ncols=len(c0))
    return _PairComplex(field, samples, c0, c1, d0)


def _pair_dims(cx: _PairComplex):
    r = cx.d0.rank()
    h0 = len(cx.c0_slots) - r
    h1 = len(cx.c1_slots) - r
    return h0, h1


def _chain_map(field, bar_g, c, cp, cx, cx2):
    """Chain map C(c) -> C(c') induced by precomposition with the target's
    translation structure map; c <= c', same t-sample list."""
    samples = cx.samples

    def g_step(s):
        return _alive(bar_g, s - cp) and _alive(bar_g, s - c)

    one, zero = field.one(), field.zero()
    phi0 = Matrix.from_rows(field, [
        [one if (k == k2 and g_step(samples[k])) else zero for k2 in cx.c0_slots]
        for k in cx2.c0_slots], ncols=len(cx.c0_slots))
    phi1 = Matrix.from_rows(field, [
        [one if (k == k2 and g_step(samples[k])) else zero for k2 in cx.c1_slots]
        for k in cx2.c1_slots], ncols=len(cx.c1_slots))
    return phi0, phi1


def _induced_ranks(field, bar_f, bar_g, c, cp):
    """Ranks of H^0(c)->H^0(c') and H^1(c)->H^1(c') for one bar pair."""
    samples = sorted(set(_pair_t_samples(bar_f, bar_g, c))
                     | set(_pair_t_samples(bar_f, bar_g, cp)))
    cx = _pair_complex(field, bar_f, bar_g, c, samples)
    cx2 = _pair_complex(field, bar_f, bar_g, cp, samples)
    phi0, phi1 = _chain_map(field, bar_g, c, cp, cx, cx2)
    # H^0: kernels pushed forward
    kern = cx.d0.nullspace()
    if kern:
        cols = kern[0]
        for v in kern[1:]:
            cols = cols.hstack(v)
        r0 = phi0.mul(cols).rank()
    else:
        r0 = 0
    # H^1: cokernels
    r_d0p = cx2.d0.rank()
    r1 = cx2.d0.hstack(phi1).rank() - r_d0p
    return r0, r1


def _pair_criticals(bar_f: Bar, bar_g: Bar):
    vals = set()
    for x in (bar_f.birth, bar_f.death):
        for y in (bar_g.birth, bar_g.death):
            if is_finite(x) and is_finite(y):
                vals.add(Fraction(x) - Fraction(y))
    return sorted(vals)


def _pair_bars(field, bar_f: Bar, bar_g: Bar):
    """Intervals in c of H^0 and H^1 for one source/target bar pair."""
    crit = _pair_criticals(bar_f, bar_g)
    if crit:
        c_samples = [crit[0] - 1]
        for i, v in enumerate(crit):
            c_samples.append(v)
            if i + 1 < len(crit):
                c_samples.append((v + crit[i + 1]) / 2)
        c_samples.append(crit[-1] + 1)
    else:
        c_samples = [Fraction(0)]
    critset = set(crit)
    dims = []
    for cv in c_samples:
        cx = _pair_complex(field, bar_f, bar_g, cv,
                           _pair_t_samples(bar_f, bar_g, cv))
        dims.append(_pair_dims(cx))
    out = {0: [], 1: []}
    for h in (0, 1):
        alive = [d[h] > 0 for d in dims]
        k = 0
        while k < len(c_samples):
            if not alive[k]:
                k += 1
                continue
            start = k
            while k + 1 < len(c_samples) and alive[k + 1]:
                r = _induced_ranks(field, bar_f, bar_g,
                                   c_samples[k], c_samples[k + 1])[h]
                if r == 0:
                    break
                k += 1
            # run = [start..k]
            if start == 0 and crit:
                birth = NEG_INF
            elif not crit:
                birth = NEG_INF
            else:
                assert c_samples[start] in critset, "bar born off the critical grid"
                birth = c_samples[start]
            if k == len(c_samples) - 1:
                death = INF
            else:
                assert c_samples[k + 1] in critset, "bar dying off the critical grid"
                death = c_samples[k + 1]
            out[h].append((birth, death))
            k += 1
    return out


# --- Hom persistence ----------------------------------------------------------

@dataclass(frozen=True)
class HomPersistence:
    """c-indexed barcode of the Hom complex, with its critical grid."""
    barcode: GradedBarcode
    criticals: tuple
    window: tuple  # (lo, hi) sweep window; outside it everything is stable

    def dim_at(self, c, degree) -> int:
        return sum(1 for b in self.barcode
                   if b.degree == degree and b.birth <= c and c < b.death)


def hom_persistence(F: GradedBarcode, G: GradedBarcode, field=F2) -> HomPersistence:
    """Assemble the Hom persistence of the pair (F, G) in the shift variable."""
    bars = []
    criticals = set()
    for i, bf in enumerate(F.bars):
        for j, bg in enumerate(G.bars):
            criticals.update(_pair_criticals(bf, bg))
            pieces = _pair_bars(field, bf, bg)
            deg = bg.degree - bf.degree
            for birth, death in pieces[0]:
                bars.append(Bar(birth, death, deg))
            for birth, death in pieces[1]:
                bars.append(Bar(birth, death, deg + 1))
    crit = tuple(sorted(criticals))
    window = (crit[0], crit[-1]) if crit else (Fraction(0), Fraction(0))
    return HomPersistence(GradedBarcode.of(bars), crit, window)


def e_D(F: GradedBarcode, G: GradedBarcode, field=F2, deg0_only=False):
    """Torsion threshold of the Hom persistence: the displacement-energy
    lower bound.  deg0_only restricts to the degree-0 part, for comparison
    with the Hom-group inequality."""
    from .barcode import torsion_threshold
    hp = hom_persistence(F, G, field)
    bc = hp.barcode.in_degree(0) if deg0_only else hp.barcode
    return torsion_threshold(bc)


# --- Novikov module -----------------------------------------------------------

@dataclass(frozen=True)
class NovikovPresentation:
    """Finitely presented module over the truncated Novikov ring: cokernel of
    the relation matrix (rows = generators, columns = relations)."""
    gens: int
    relations: tuple  # tuple of rows, each a tuple of NovikovScalar
    field: object
    precision: Fraction

    def ncols(self):
        return len(self.relations[0]) if self.relations else 0


def novikov_module(F: GradedBarcode, G: GradedBarcode, field=F2,
                   precision=Fraction(64)) -> NovikovPresentation:
    """Degree-0 part of the Hom module over the Novikov ring: one generator
    per degree-0 Hom-persistence bar at its earliest nonzero shift, with the
    diagonal relation T^length killing it."""
    for bc in (F, G):
        for bar in bc.bars:
            if not (is_finite(bar.birth) and is_finite(bar.death)):
                raise UnsupportedInput(
                    "Novikov presentation needs finite endpoints (a free part "
                    "would be required otherwise)")
    hp = hom_persistence(F, G, field)
    pieces = [b for b in hp.barcode if b.degree == 0]
    n = len(pieces)
    rows = []
    for r in range(n):
        row = []
        for ccol in range(n):
            if r == ccol:
                ln = pieces[r].length()
                if ln >= precision:
                    raise PrecisionExhausted(
                        f"bar length {ln} at or beyond precision {precision}")
                row.append(NovikovScalar.monomial(field, precision, ln))
            else:
                row.append(NovikovScalar.zero(field, precision))
        rows.append(tuple(row))
    return NovikovPresentation(n, tuple(rows), field, Fraction(precision))


@dataclass(frozen=True)
class TorsionResult:
    exponent: object  # Fraction, or INF when free
    free: bool


def torsion_exponent(P: NovikovPresentation) -> TorsionResult:
    """Valuation-pivot elimination over the Novikov scalars.

    Diagonalizes the relation matrix by always pivoting on a minimal-valuation
    entry (the valuation-ring analogue of diagonal reduction); the largest
    elementary exponent is inf{c : T^c annihilates the cokernel}.  A generator
    with no relation left is a free summand (reported with a flag); an
    inexactly-zero entry at that stage raises PrecisionExhausted instead.
    """
    rows = [list(r) for r in P.relations]
    n_rows = P.gens
    if n_rows == 0:
        return TorsionResult(Fraction(0), False)
    n_cols = len(rows[0]) if rows else 0
    row_alive = list(range(n_rows))
    col_alive = list(range(n_cols))
    exponents = []
    while row_alive and col_alive:
        pivot = None
        for r in row_alive:
            for ccol in col_alive:
                e = rows[r][ccol]
                if not e.is_zero():
                    v = e.valuation()
                    if pivot is None or v < pivot[0]:
                        pivot = (v, r, ccol)
        if pivot is None:
            break
        v, pr, pc = pivot
        pv = rows[pr][pc]
        for ccol in col_alive:
            if ccol == pc:
                continue
            e = rows[pr][ccol]
            if e.is_zero():
                continue
            factor = e.divide(pv)
            for r in row_alive:
                rows[r][ccol] = rows[r][ccol].sub(rows[r][pc].mul(factor))
        for r in row_alive:
            if r == pr:
                continue
            e = rows[r][pc]
            if e.is_zero():
                continue
            factor = e.divide(pv)
            for ccol in col_alive:
                rows[r][ccol] = rows[r][ccol].sub(rows[pr][ccol].mul(factor))
        exponents.append(v)
        row_alive.remove(pr)
        col_alive.remove(pc)
    if len(exponents) < n_rows:
        # leftover generators: free, unless inexact zeros cloud the call
        for r in row_alive:
            for ccol in col_alive:
                e = rows[r][ccol]
                if e.is_zero() and not e.exact:
                    raise PrecisionExhausted(
                        "relation vanished below precision; free-vs-torsion "
                        "undecidable at this cutoff")
        return TorsionResult(INF, True)
    return TorsionResult(max(exponents) if exponents else Fraction(0), False)
