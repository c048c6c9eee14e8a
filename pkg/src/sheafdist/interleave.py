"""Interleaving calculus on graded barcodes.

The closed-form rule: a shift-c morphism from a bar [bs,ds) to a bar [bt,dt)
(same degree) is nonzero, and then one-dimensional with a canonical
generator, exactly when

    bs <= bt + c   and   bt + c < ds   and   ds <= dt + c.

This is the unique rule consistent with tau_{0,c} being nonzero on a bar iff
c < length and with bars translating by +c; it is validated wholesale against
the grid oracle rather than trusted.  Composites of canonical generators obey
a single overlap inequality: gen(i->j, c1) then gen(j->k, c2) equals
gen(i->k, c1+c2) when b_k + c1 + c2 < d_i, else zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .barcode import Bar, GradedBarcode, ParameterError, shift_barcode, torsion_threshold
from .fields import F2
from .rational import INF, ext_add, is_finite

YES, NO, UNKNOWN = "yes", "no", "unknown"


class CertificateError(ValueError):
    pass


class UnknownOutcome(RuntimeError):
    """Search exceeded the documented exhaustive bound without a decision."""


# --- the closed-form Hom rule ----------------------------------------------

def hom_nonzero(src: Bar, tgt: Bar, c) -> bool:
    """Is the shift-c morphism space from src to tgt one-dimensional?"""
    if src.degree != tgt.degree:
        return False
    bt_c = ext_add(tgt.birth, c)
    dt_c = ext_add(tgt.death, c)
    return src.birth <= bt_c and bt_c < src.death and src.death <= dt_c


def composite_nonzero(src: Bar, tgt: Bar, total_shift) -> bool:
    """Overlap condition under which a chain of canonical generators from
    src to tgt with the given total shift composes to the canonical
    generator rather than zero."""
    return ext_add(tgt.birth, total_shift) < src.death


def hom_pairs(F: GradedBarcode, G: GradedBarcode, c):
    """Index pairs (i, j) with a nonzero shift-c generator F_i -> G_j."""
    return [(i, j) for i, bi in enumerate(F.bars) for j, bj in enumerate(G.bars)
            if hom_nonzero(bi, bj, c)]


@dataclass(frozen=True)
class ShiftedHomGen:
    src_index: int
    tgt_index: int
    src: Bar
    tgt: Bar
    shift: Fraction


def shifted_hom_basis(F: GradedBarcode, G: GradedBarcode, c):
    """Canonical generators of the shift-c morphism space F -> T_c G."""
    c = Fraction(c)
    if c < 0:
        raise ParameterError("shift must be >= 0")
    return [ShiftedHomGen(i, j, F.bars[i], G.bars[j], c) for i, j in hom_pairs(F, G, c)]


# --- morphisms as generator-coefficient tables ------------------------------

@dataclass(frozen=True)
class BarMorphism:
    """A morphism source -> T_shift(target), as coefficients over the
    canonical bar-pair generators."""
    source: GradedBarcode
    target: GradedBarcode
    shift: Fraction
    field: object
    entries: tuple  # ((src_index, tgt_index, coeff), ...) sorted by indices

    def __post_init__(self):
        seen = set()
        for i, j, coeff in self.entries:
            if (i, j) in seen:
                raise CertificateError("duplicate morphism entry")
            seen.add((i, j))
            if self.field.is_zero(coeff):
                raise CertificateError("zero coefficient stored")
            if not hom_nonzero(self.source.bars[i], self.target.bars[j], self.shift):
                raise CertificateError(
                    f"entry ({i},{j}) is not a legal shift-{self.shift} generator")

    @staticmethod
    def make(source, target, shift, field, coeffs: dict) -> "BarMorphism":
        entries = tuple(sorted((i, j, c) for (i, j), c in coeffs.items()
                               if not field.is_zero(c)))
        return BarMorphism(source, target, Fraction(shift), field, entries)

    def is_zero(self) -> bool:
        return not self.entries

    def coeff_map(self) -> dict:
        return {(i, j): c for i, j, c in self.entries}


def zero_bar_morphism(source, target, shift, field) -> BarMorphism:
    return BarMorphism.make(source, target, shift, field, {})


def tau_morphism(F: GradedBarcode, c, field=F2) -> BarMorphism:
    """tau_{0,c}: diagonal, canonical generator wherever c < bar length."""
    c = Fraction(c)
    if c < 0:
        raise ParameterError("tau needs c >= 0")
    coeffs = {(i, i): field.one() for i, bar in enumerate(F.bars) if c < bar.length()}
    return BarMorphism.make(F, F, c, field, coeffs)


def compose_bar_morphisms(first: BarMorphism, second: BarMorphism) -> BarMorphism:
    """(T_a second) o first for first: F -> T_a G, second: G -> T_b H."""
    if first.target != second.source:
        raise CertificateError("composition target/source mismatch")
    f = first.field
    total = first.shift + second.shift
    acc = {}
    second_by_src = {}
    for j, k, y in second.entries:
        second_by_src.setdefault(j, []).append((k, y))
    for i, j, x in first.entries:
        src_bar = first.source.bars[i]
        for k, y in second_by_src.get(j, ()):
            if composite_nonzero(src_bar, second.target.bars[k], total):
                key = (i, k)
                acc[key] = f.add(acc.get(key, f.zero()), f.mul(x, y))
    return BarMorphism.make(first.source, second.target, total, f, acc)


def bar_morphisms_equal(m1: BarMorphism, m2: BarMorphism) -> bool:
    if (m1.source, m1.target, m1.shift) != (m2.source, m2.target, m2.shift):
        return False
    c1, c2 = m1.coeff_map(), m2.coeff_map()
    keys = set(c1) | set(c2)
    f = m1.field
    return all(f.eq(c1.get(k, f.zero()), c2.get(k, f.zero())) for k in keys)


# --- certificates ------------------------------------------------------------

@dataclass(frozen=True)
class InterleavingCertificate:
    """Shift parameters with the four morphisms of the interleaving
    definition; conditions (1) and (2) are machine-checked by verify()."""
    F: GradedBarcode
    G: GradedBarcode
    a: Fraction
    b: Fraction
    alpha: BarMorphism   # F -> T_a G
    beta: BarMorphism    # G -> T_b F
    gamma: BarMorphism   # G -> T_b F
    delta: BarMorphism   # F -> T_a G

    @property
    def field(self):
        return self.alpha.field

    def total(self) -> Fraction:
        return self.a + self.b


def verify_certificate(cert: InterleavingCertificate) -> bool:
    """Exact check of conditions (1) and (2)."""
    F, G, a, b = cert.F, cert.G, cert.a, cert.b
    if a < 0 or b < 0:
        return False
    for morph, src, tgt, shift in (
            (cert.alpha, F, G, a), (cert.delta, F, G, a),
            (cert.beta, G, F, b), (cert.gamma, G, F, b)):
        if morph.source != src or morph.target != tgt or morph.shift != shift:
            return False
    f = cert.field
    cond1 = bar_morphisms_equal(compose_bar_morphisms(cert.alpha, cert.beta),
                                tau_morphism(F, a + b, f))
    cond2 = bar_morphisms_equal(compose_bar_morphisms(cert.gamma, cert.delta),
                                tau_morphism(G, a + b, f))
    return cond1 and cond2


def identity_certificate(F: GradedBarcode, field=F2) -> InterleavingCertificate:
    ident = tau_morphism(F, 0, field)
    return InterleavingCertificate(F, F, Fraction(0), Fraction(0),
                                   ident, ident, ident, ident)


def swap_certificate(cert: InterleavingCertificate) -> InterleavingCertificate:
    """Certificate for (G, F) at (b, a): the symmetry remark."""
    return InterleavingCertificate(cert.G, cert.F, cert.b, cert.a,
                                   cert.gamma, cert.delta, cert.alpha, cert.beta)


def shift_certificate(F: GradedBarcode, u, field=F2) -> InterleavingCertificate:
    """(F, T_u F) is (0, u)-interleaved: alpha = delta = tau pattern,
    beta = gamma = identity on the shifted copy."""
    u = Fraction(u)
    if u < 0:
        raise ParameterError("shift must be >= 0")
    G = shift_barcode(F, u)
    alpha = BarMorphism.make(F, G, Fraction(0), field,
                             {(i, i): field.one() for i, bar in enumerate(F.bars)
                              if u < bar.length()})
    beta = BarMorphism.make(G, F, u, field,
                            {(i, i): field.one() for i in range(len(F.bars))})
    cert = InterleavingCertificate(F, G, Fraction(0), u, alpha, beta, beta, alpha)
    if not verify_certificate(cert):
        raise CertificateError("shift certificate failed verification")
    return cert


# --- factorization search ----------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    assign_cap: int = 20000       # nodes in the shared-witness backtracking
    enum_cap: int = 1 << 16       # alpha subsets per connected component
    oracle_dim_bound: int = 6     # grid oracle total-dimension bound


DEFAULT_CONFIG = SearchConfig()


def _max_bipartite_matching(adj):
    """adj: node -> iterable of right nodes; returns dict left->right."""
    match_right = {}

    def try_assign(left, seen):
        for right in adj[left]:
            if right in seen:
                continue
            seen.add(right)
            if right not in match_right or try_assign(match_right[right], seen):
                match_right[right] = left
                return True
        return False

    for left in adj:
        try_assign(left, set())
    return {l: r for r, l in match_right.items()}


def _gf2_solve(cols, target):
    """Solve sum of chosen cols == target over F_2; returns chosen indices."""
    basis = []  # (lead_bit, value, varset)
    for idx, col in enumerate(cols):
        v, vs = col, 1 << idx
        for lead, pv, pvs in basis:
            if v >> lead & 1:
                v ^= pv
                vs ^= pvs
        if v:
            basis.append((v.bit_length() - 1, v, vs))
            basis.sort(key=lambda x: -x[0])
    t, ts = target, 0
    for lead, pv, pvs in basis:
        if t >> lead & 1:
            t ^= pv
            ts ^= pvs
    if t:
        return None
    return [i for i in range(len(cols)) if ts >> i & 1]


def factors_through(F: GradedBarcode, G: GradedBarcode, a, b,
                    field=F2, config=DEFAULT_CONFIG):
    """Decide whether tau_{0,a+b}(F) factors as (T_a beta) o alpha through T_a G.

    Returns (status, alpha, beta); morphisms are present exactly when the
    status is YES.  Search order: per-bar matching with cross-term checks,
    then exhaustive F_2 enumeration split by connected components; UNKNOWN
    above the enumeration cap, reported distinctly from NO.
    """
    a, b = Fraction(a), Fraction(b)
    if a < 0 or b < 0:
        raise ParameterError("shifts must be >= 0")
    c = a + b
    long_bars = [i for i, bar in enumerate(F.bars) if c < bar.length()]
    if not long_bars:
        return YES, zero_bar_morphism(F, G, a, field), zero_bar_morphism(G, F, b, field)

    legal_a = set(hom_pairs(F, G, a))
    legal_b = set(hom_pairs(G, F, b))
    witnesses = {i: [j for j in range(len(G.bars))
                     if (i, j) in legal_a and (j, i) in legal_b]
                 for i in long_bars}
    if any(not ws for ws in witnesses.values()):
        return NO, None, None

    # legal target cells (i, k) carry a composite coefficient constraint
    cell = {(i, k) for i, k in hom_pairs(F, F, c)}

    def build(assignment):
        one = field.one()
        alpha = {(i, j): one for i, j in assignment.items()}
        beta = {(j, i): one for i, j in assignment.items()}
        am = BarMorphism.make(F, G, a, field, alpha)
        bm = BarMorphism.make(G, F, b, field, beta)
        if bar_morphisms_equal(compose_bar_morphisms(am, bm), tau_morphism(F, c, field)):
            return am, bm
        return None

    # (i) injective witness matching: distinct columns kill cross terms
    matching = _max_bipartite_matching(witnesses)
    if len(matching) == len(long_bars):
        built = build(matching)
        if built:
            return YES, built[0], built[1]

    # (ii) shared witnesses allowed when the cross cells vanish
    def conflict(i, k, j):
        return ((i, k) in cell) or ((k, i) in cell)

    order = sorted(long_bars, key=lambda i: len(witnesses[i]))
    budget = [config.assign_cap]

    def backtrack(pos, assignment):
        if budget[0] <= 0:
            return None
        if pos == len(order):
            return dict(assignment)
        i = order[pos]
        for j in witnesses[i]:
            budget[0] -= 1
            if budget[0] <= 0:
                return None
            ok = all(not conflict(i, k, j) for k, jk in assignment.items() if jk == j)
            if ok:
                assignment[i] = j
                out = backtrack(pos + 1, assignment)
                if out is not None:
                    return out
                del assignment[i]
        return None

    shared = backtrack(0, {})
    if shared is not None:
        built = build(shared)
        if built:
            return YES, built[0], built[1]

    # (iii) exhaustive enumeration over F_2, by connected components
    if getattr(field, "p", None) != 2:
        return UNKNOWN, None, None
    useful_j = {j for j in range(len(G.bars))
                if any((i, j) in legal_a for i in long_bars)
                and any((j, k) in legal_b for k in long_bars)}
    avars = [(i, j) for i in long_bars for j in useful_j if (i, j) in legal_a]
    bvars = [(j, k) for j in useful_j for k in long_bars if (j, k) in legal_b]

    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for i, j in avars:
        union(("F", i), ("G", j))
    for j, k in bvars:
        union(("G", j), ("F", k))

    comps = {}
    for i in long_bars:
        comps.setdefault(find(("F", i)), []).append(i)

    alpha_coeffs, beta_coeffs = {}, {}
    one = field.one()
    for root, members in comps.items():
        ca = [(i, j) for (i, j) in avars if find(("F", i)) == root]
        cb = [(j, k) for (j, k) in bvars if find(("F", k)) == root]
        constraints = [(i, k) for i in members for k in members if (i, k) in cell]
        targets = 0
        row_of = {ik: n for n, ik in enumerate(constraints)}
        for n, (i, k) in enumerate(constraints):
            if i == k:
                targets |= 1 << n
        if not ca and not targets:
            continue
        if 1 << len(ca) > config.enum_cap:
            return UNKNOWN, None, None
        solved = None
        for mask in range(1 << len(ca)):
            chosen_a = [ca[t] for t in range(len(ca)) if mask >> t & 1]
            a_rows = {}
            for i, j in chosen_a:
                a_rows.setdefault(j, set()).add(i)
            cols = []
            for j, k in cb:
                bits = 0
                for i in a_rows.get(j, ()):
                    if (i, k) in row_of:
                        bits |= 1 << row_of[(i, k)]
                cols.append(bits)
            sol = _gf2_solve(cols, targets)
            if sol is not None:
                solved = (chosen_a, [cb[t] for t in sol])
                break
        if solved is None:
            return NO, None, None
        for i, j in solved[0]:
            alpha_coeffs[(i, j)] = one
        for j, k in solved[1]:
            beta_coeffs[(j, k)] = one

    am = BarMorphism.make(F, G, a, field, alpha_coeffs)
    bm = BarMorphism.make(G, F, b, field, beta_coeffs)
    if not bar_morphisms_equal(compose_bar_morphisms(am, bm), tau_morphism(F, c, field)):
        raise CertificateError("internal: enumerated factorization failed verification")
    return YES, am, bm


def is_interleaved(F: GradedBarcode, G: GradedBarcode, a, b,
                   field=F2, config=DEFAULT_CONFIG):
    """Decide the (a,b)-interleaving of (F, G).

    Conditions (1) and (2) reference disjoint morphism quadruples, so the
    decision decouples into the two factorizations; this is checked against
    the full-definition grid oracle in the test suite, never assumed silently.
    Returns (status, certificate-or-None).
    """
    s1, alpha, beta = factors_through(F, G, a, b, field, config)
    if s1 == NO:
        return NO, None
    s2, gamma, delta = factors_through(G, F, b, a, field, config)
    if s2 == NO:
        return NO, None
    if UNKNOWN in (s1, s2):
        return UNKNOWN, None
    cert = InterleavingCertificate(F, G, Fraction(a), Fraction(b),
                                   alpha, beta, gamma, delta)
    if not verify_certificate(cert):
        raise CertificateError("internal: constructed certificate failed verification")
    return YES, cert


# --- translation distance ----------------------------------------------------

@dataclass
class DistanceResult:
    value: object                 # Fraction, INF, or None when bracketed
    attained: object              # bool, or None when not applicable
    certificate: object = None    # InterleavingCertificate or None
    certificate_shifts: object = None  # (a, b) where the certificate lives
    bracket: object = None        # (lower, upper) when unknown leaves occurred


def _candidate_offsets(F, G):
    pts = set(F.finite_endpoints()) | set(G.finite_endpoints())
    d0 = {Fraction(0)}
    for x in pts:
        for y in pts:
            if x > y:
                d0.add(x - y)
    return sorted(d0)


def translation_distance(F: GradedBarcode, G: GradedBarcode,
                         field=F2, config=DEFAULT_CONFIG) -> DistanceResult:
    """inf{a+b : (F,G) is (a,b)-interleaved}, searched over the finite corner
    grid generated by pairwise endpoint differences; the attainment flag
    records whether the infimum is achieved."""
    if F == G:
        return DistanceResult(Fraction(0), True, identity_certificate(F, field),
                              (Fraction(0), Fraction(0)))
    d0 = _candidate_offsets(F, G)
    thr_f, thr_g = torsion_threshold(F), torsion_threshold(G)
    upper = None
    if is_finite(thr_f) and is_finite(thr_g):
        upper = thr_f + thr_g
    sums = {Fraction(0)} | set(d0)
    for x in d0:
        for y in d0:
            sums.add(x + y)
    sums = sorted(s for s in sums if upper is None or s <= upper)

    def next_gap(x):
        for d in d0:
            if d > x:
                return d - x
        return Fraction(1)

    cache = {}

    def probe(aa, bb):
        key = (aa, bb)
        if key not in cache:
            cache[key] = is_interleaved(F, G, aa, bb, field, config)
        return cache[key]

    unknown_sums = []
    for s in sums:
        coords = sorted({x for x in d0 if x <= s} | {s - x for x in d0 if x <= s})
        hit = None
        for aa in coords:
            bb = s - aa
            eps = min(next_gap(aa), next_gap(bb), next_gap(s) / 2) / 3
            status, _ = probe(aa + eps, bb + eps)
            if status == YES:
                hit = (aa, bb, eps)
                break
            if status == UNKNOWN:
                unknown_sums.append(s)
        if hit is None:
            continue
        value = s
        if unknown_sums and min(unknown_sums) < value:
            return DistanceResult(None, None, bracket=(min(unknown_sums), value))
        # attainment: exact feasibility anywhere on the diagonal a+b = s
        exact_points = list(coords)
        exact_points += [(coords[t] + coords[t + 1]) / 2 for t in range(len(coords) - 1)]
        for aa in exact_points:
            bb = s - aa
            if bb < 0 or aa < 0:
                continue
            status, cert = probe(aa, bb)
            if status == YES:
                return DistanceResult(value, True, cert, (aa, bb))
        aa, bb, eps = hit
        status, cert = probe(aa + eps, bb + eps)
        return DistanceResult(value, False, cert, (aa + eps, bb + eps))
    if unknown_sums:
        return DistanceResult(None, None, bracket=(min(unknown_sums), INF))
    return DistanceResult(INF, False)


# --- composition lemmas -------------------------------------------------------

def compose_certificates(c01: InterleavingCertificate,
                         c12: InterleavingCertificate) -> InterleavingCertificate:
    """Chain certificates: (F0,F1) at (a0,b0) and (F1,F2) at (a1,b1) give
    (F0,F2) at (a0+a1, b0+b1)."""
    if not verify_certificate(c01) or not verify_certificate(c12):
        raise CertificateError("inputs failed verification")
    if c01.G != c12.F:
        raise CertificateError("certificates do not chain")
    alpha = compose_bar_morphisms(c01.alpha, c12.alpha)
    beta = compose_bar_morphisms(c12.beta, c01.beta)
    gamma = compose_bar_morphisms(c12.gamma, c01.gamma)
    delta = compose_bar_morphisms(c01.delta, c12.delta)
    out = InterleavingCertificate(c01.F, c12.G, c01.a + c12.a, c01.b + c12.b,
                                  alpha, beta, gamma, delta)
    if not verify_certificate(out):
        raise CertificateError("composed certificate failed verification")
    return out


def hom_certificate(cf: InterleavingCertificate,
                    cg: InterleavingCertificate,
                    config=DEFAULT_CONFIG) -> InterleavingCertificate:
    """From certificates for (F0,F1) and (G0,G1), a verified certificate for
    the Hom persistence pair at shifts (b_F + a_G, a_F + b_G).

    Feasibility at exactly these shifts is what the Hom-interleaving lemma
    guarantees; the morphisms are found by the same certified search used
    everywhere and re-verified.
    """
    from .energy import hom_persistence
    if not verify_certificate(cf) or not verify_certificate(cg):
        raise CertificateError("inputs failed verification")
    field = cf.field
    h0 = hom_persistence(cf.F, cg.F, field).barcode
    h1 = hom_persistence(cf.G, cg.G, field).barcode
    a = cf.b + cg.a
    b = cf.a + cg.b
    status, cert = is_interleaved(h0, h1, a, b, field, config)
    if status != YES:
        raise CertificateError(
            f"hom certificate search returned {status} at shifts ({a},{b})")
    return cert


def homotopy_compose(family, step_shifts=None, field=F2, config=DEFAULT_CONFIG):
    """Compose step certificates along a finite family of barcodes.

    family: barcodes F_{s_0},...,F_{s_n}; step_shifts: per-step (a_k, b_k)
    budgets (for the built-in pure-shift model these are the per-step
    Riemann increments).  Every step certificate is searched at its stated
    shifts and verified; the totals add up componentwise.  Aborts with the
    failing index if a step cannot be certified.
    """
    if len(family) < 1:
        raise ParameterError("empty family")
    if len(family) == 1:
        return identity_certificate(family[0], field)
    if step_shifts is None:
        raise ParameterError("step_shifts required for a nontrivial family")
    if len(step_shifts) != len(family) - 1:
        raise ParameterError("one (a,b) budget per step required")
    cert = None
    for k in range(len(family) - 1):
        a_k, b_k = Fraction(step_shifts[k][0]), Fraction(step_shifts[k][1])
        status, step = is_interleaved(family[k], family[k + 1], a_k, b_k, field, config)
        if status != YES:
            raise CertificateError(f"step {k} not certified at ({a_k},{b_k}): {status}")
        cert = step if cert is None else compose_certificates(cert, step)
    return cert


def make_shift_family(F: GradedBarcode, rates, step=None):
    """Built-in pure-shift family: fiberwise-constant model where each step
    translates all bars by rate_k * step.

    Returns (family, step_shifts, total_abs) with step_shifts the per-step
    (a,b) = (max(-w,0), max(w,0)) increments and total_abs the Riemann sum
    of |rate| * step.
    """
    rates = [Fraction(r) for r in rates]
    step = Fraction(1, len(rates)) if step is None else Fraction(step)
    family = [F]
    shifts = []
    total_abs = Fraction(0)
    current = F
    for r in rates:
        w = r * step
        current = current.translate(w)
        family.append(current)
        shifts.append((max(-w, Fraction(0)), max(w, Fraction(0))))
        total_abs += abs(w)
    return family, shifts, total_abs
