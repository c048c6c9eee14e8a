"""Finite-grid presentations of persistence modules and the exhaustive
interleaving oracle.

A GridModule stores, per homological degree, dimensions over a strictly
increasing rational grid and the structure matrices between consecutive
points.  Between grid points the module is constant; after the last grid
point it stays constant until ``last_death`` (a rational > grid[-1], or INF),
where everything still alive dies.  That flag is the right-end convention
that removes the finite-window ambiguity.

Sheaf morphisms F -> T_c G are realized as natural transformations of the
module presentations in the reversed direction, with components
G-value(t - c) -> F-value(t); this normalization makes tau_{0,c} on a bar
nonzero exactly when c < length, matching the translation calculus.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

from .barcode import Bar, GradedBarcode, ParameterError
from .linalg import Matrix
from .rational import INF, is_finite


class GridStructureError(ValueError):
    pass


class OracleScopeError(RuntimeError):
    """Instance is outside the documented brute-force oracle bound."""


@dataclass(frozen=True)
class GridModule:
    field: object
    grid: tuple            # strictly increasing Fractions
    last_death: object     # Fraction > grid[-1], or INF
    data: tuple            # ((degree, dims tuple, maps tuple[Matrix]), ...)

    def __post_init__(self):
        if not self.grid:
            raise GridStructureError("empty grid")
        if any(self.grid[i] >= self.grid[i + 1] for i in range(len(self.grid) - 1)):
            raise GridStructureError("grid not strictly increasing")
        if is_finite(self.last_death) and not self.last_death > self.grid[-1]:
            raise GridStructureError("last_death must exceed the last grid point")
        n = len(self.grid)
        for degree, dims, maps in self.data:
            if len(dims) != n or len(maps) != n - 1:
                raise GridStructureError(f"degree {degree}: dims/maps length mismatch")
            for i, m in enumerate(maps):
                if (m.nrows, m.ncols) != (dims[i + 1], dims[i]):
                    raise GridStructureError(
                        f"degree {degree}: map {i} is {m.nrows}x{m.ncols}, "
                        f"expected {dims[i + 1]}x{dims[i]}")

    @staticmethod
    def make(field, grid, degree_data, last_death=INF):
        """degree_data: dict degree -> (dims, maps)."""
        grid = tuple(Fraction(t) for t in grid)
        data = tuple(sorted((deg, tuple(dims), tuple(maps))
                            for deg, (dims, maps) in degree_data.items()))
        return GridModule(field, grid, last_death, data)

    # --- queries ----------------------------------------------------------
    def degrees(self):
        return [deg for deg, _, _ in self.data]

    def dims(self, degree):
        for deg, dims, _ in self.data:
            if deg == degree:
                return dims
        return (0,) * len(self.grid)

    def maps(self, degree):
        for deg, _, maps in self.data:
            if deg == degree:
                return maps
        z = Matrix.zeros(self.field, 0, 0)
        return (z,) * (len(self.grid) - 1)

    def total_dim(self) -> int:
        return sum(sum(dims) for _, dims, _ in self.data)

    def criticals(self):
        """Parameter values where the module may change."""
        out = list(self.grid)
        if is_finite(self.last_death):
            out.append(self.last_death)
        return out

    def _index_at(self, t):
        """Largest grid index i with grid[i] <= t, or None below the grid."""
        i = bisect.bisect_right(self.grid, t) - 1
        return None if i < 0 else i

    def dim_at(self, t, degree) -> int:
        if is_finite(self.last_death) and t >= self.last_death:
            return 0
        i = self._index_at(t)
        return 0 if i is None else self.dims(degree)[i]

    def struct_map(self, t0, t1, degree) -> Matrix:
        """The structure map value(t0) -> value(t1), t0 <= t1."""
        if t1 < t0:
            raise ParameterError("struct_map needs t0 <= t1")
        d0, d1 = self.dim_at(t0, degree), self.dim_at(t1, degree)
        if d0 == 0 or d1 == 0:
            return Matrix.zeros(self.field, d1, d0)
        i0, i1 = self._index_at(t0), self._index_at(t1)
        m = Matrix.identity(self.field, d0)
        maps = self.maps(degree)
        for i in range(i0, i1):
            m = maps[i].mul(m)
        return m


def to_grid(barcode: GradedBarcode, field) -> GridModule:
    """Present a barcode (finite births; deaths finite or INF) on the grid of
    its finite endpoints."""
    for bar in barcode:
        if not is_finite(bar.birth):
            raise GridStructureError("to_grid needs finite births")
    pts = barcode.finite_endpoints()
    if not pts:
        pts = [Fraction(0)]
    grid = tuple(pts)
    degree_data = {}
    for deg in barcode.degrees():
        bars = [b for b in barcode if b.degree == deg]
        alive = [[k for k, b in enumerate(bars) if b.birth <= t and t < b.death]
                 for t in grid]
        dims = tuple(len(a) for a in alive)
        maps = []
        for i in range(len(grid) - 1):
            rows = tuple(tuple(field.one() if src == tgt else field.zero()
                               for src in alive[i])
                         for tgt in alive[i + 1])
            maps.append(Matrix(field, dims[i + 1], dims[i], rows))
        degree_data[deg] = (dims, tuple(maps))
    return GridModule.make(field, grid, degree_data, last_death=INF)


def _extended(module: GridModule, degree):
    """Dims and maps with one virtual point appended encoding last_death."""
    dims = list(module.dims(degree))
    maps = list(module.maps(degree))
    if is_finite(module.last_death):
        dims.append(0)
        maps.append(Matrix.zeros(module.field, 0, dims[-2]))
    else:
        dims.append(dims[-1])
        maps.append(Matrix.identity(module.field, dims[-1]))
    return dims, maps


def _death_value(module: GridModule, last_alive_ext_index):
    """Death of a bar alive through extended index j (0-based)."""
    n = len(module.grid)
    j = last_alive_ext_index
    if j + 1 <= n - 1:
        return module.grid[j + 1]
    if j == n - 1:
        return module.last_death
    return INF  # survived the virtual point (last_death is INF)


def decompose(module: GridModule) -> GradedBarcode:
    """Interval decomposition via the rank function (exact, field-agnostic)."""
    bars = []
    for degree in module.degrees():
        dims, maps = _extended(module, degree)
        n = len(dims)
        rank = [[0] * n for _ in range(n)]
        for i in range(n):
            m = Matrix.identity(module.field, dims[i])
            rank[i][i] = dims[i]
            for j in range(i + 1, n):
                m = maps[j - 1].mul(m)
                rank[i][j] = m.rank()

        def r(i, j):
            if i < 0 or j > n - 1 or i > j:
                return 0
            return rank[i][j]

        n_grid = len(module.grid)
        for i in range(n_grid):  # births only at real grid points
            for j in range(i, n):
                mult = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
                if mult < 0:
                    raise GridStructureError("negative interval multiplicity")
                if mult:
                    bars.extend([Bar(module.grid[i], _death_value(module, j), degree)] * mult)
    return GradedBarcode.of(bars)


@dataclass
class _Chain:
    degree: int
    birth: int                 # grid index
    vectors: dict              # ext index -> column tuple
    death_ext: object = None   # last alive extended index, set when it dies


def decompose_with_basis(module: GridModule):
    """Left-to-right basis change.

    Returns (barcode, info) where info[degree] = (chains, bases) with
    bases[i] = (Matrix whose columns are the chain vectors at grid index i,
    tuple of chain list-positions in column order).  The basis conjugates the
    structure maps into an exact 0/1 interval pattern.
    """
    field = module.field
    all_bars = []
    info = {}
    for degree in module.degrees():
        dims, maps = _extended(module, degree)
        n_ext = len(dims)
        chains: list[_Chain] = []
        alive: list[int] = []  # positions into chains

        def reduce_against(w, pivots, corrections=None):
            w = list(w)
            for row in range(len(w) - 1, -1, -1):
                if field.is_zero(w[row]):
                    continue
                hit = pivots.get(row)
                if hit is None:
                    continue
                pos, pvec = hit
                coeff = field.div(w[row], pvec[row])
                w = [field.sub(a, field.mul(coeff, b)) for a, b in zip(w, pvec)]
                if corrections is not None:
                    corrections.append((pos, coeff))
            return w

        def leading_row(w):
            for row in range(len(w) - 1, -1, -1):
                if not field.is_zero(w[row]):
                    return row
            return None

        # index 0
        pivots = {}
        for r in range(dims[0]):
            vec = tuple(field.one() if k == r else field.zero() for k in range(dims[0]))
            chains.append(_Chain(degree, 0, {0: vec}))
            alive.append(len(chains) - 1)
            pivots[r] = (len(chains) - 1, list(vec))

        bases_cols = {0: list(alive)}
        for i in range(n_ext - 1):
            m = maps[i]
            new_pivots = {}
            survivors = []
            # oldest first; ties broken by creation order (list order is stable)
            for pos in sorted(alive, key=lambda p: (chains[p].birth, p)):
                ch = chains[pos]
                v = ch.vectors[i]
                w = [field.zero()] * m.nrows
                for col, coef in enumerate(v):
                    if field.is_zero(coef):
                        continue
                    for row in range(m.nrows):
                        w[row] = field.add(w[row], field.mul(m.rows[row][col], coef))
                corrections = []
                w = reduce_against(w, new_pivots, corrections)
                for other_pos, coeff in corrections:
                    oc = chains[other_pos]
                    for t in range(ch.birth, i + 1):
                        ch.vectors[t] = tuple(
                            field.sub(a, field.mul(coeff, b))
                            for a, b in zip(ch.vectors[t], oc.vectors[t]))
                lead = leading_row(w)
                if lead is None:
                    ch.death_ext = i  # alive through ext index i, dead at i+1
                else:
                    ch.vectors[i + 1] = tuple(w)
                    new_pivots[lead] = (pos, w)
                    survivors.append(pos)
            # complete to a basis of the next space with newborn chains
            for r in range(m.nrows):
                if r in new_pivots:
                    continue
                vec = [field.one() if k == r else field.zero() for k in range(m.nrows)]
                vec = reduce_against(vec, new_pivots)
                lead = leading_row(vec)
                if lead is None:
                    raise GridStructureError("basis completion failed")
                birth = i + 1
                if birth >= len(module.grid):
                    raise GridStructureError("chain born at the virtual point")
                chains.append(_Chain(degree, birth, {i + 1: tuple(vec)}))
                new_pivots[lead] = (len(chains) - 1, vec)
                survivors.append(len(chains) - 1)
            alive = survivors
            if i + 1 < len(module.grid):
                bases_cols[i + 1] = list(alive)
        for pos in alive:
            chains[pos].death_ext = n_ext - 1

        bases = []
        for i in range(len(module.grid)):
            cols = sorted(bases_cols.get(i, []))
            matrix = Matrix(field, dims[i], len(cols),
                            tuple(tuple(chains[pos].vectors[i][r] for pos in cols)
                                  for r in range(dims[i])))
            bases.append((matrix, tuple(cols)))
        info[degree] = (chains, bases)
        for ch in chains:
            death = _death_value(module, ch.death_ext)
            all_bars.append(Bar(module.grid[ch.birth], death, degree))
    return GradedBarcode.of(all_bars), info


# --- shift morphisms between grid modules ---------------------------------

@dataclass(frozen=True)
class GridMorphism:
    """A sheaf morphism source -> T_shift(target) between grid modules.

    Components are stored at a fixed sample set; at sample s the matrix maps
    target-value(s - shift) -> source-value(s).
    """
    source: GridModule
    target: GridModule
    shift: Fraction
    samples: tuple
    comps: tuple  # ((degree, (Matrix per sample)), ...)

    def degrees(self):
        return [deg for deg, _ in self.comps]

    def _mats(self, degree):
        for deg, mats in self.comps:
            if deg == degree:
                return mats
        return None

    def component(self, degree, t) -> Matrix:
        """Component at an arbitrary parameter (constant between samples)."""
        nrows = self.source.dim_at(t, degree)
        ncols = self.target.dim_at(t - self.shift, degree)
        mats = self._mats(degree)
        if mats is None or t < self.samples[0]:
            return Matrix.zeros(self.source.field, nrows, ncols)
        i = bisect.bisect_right(self.samples, t) - 1
        m = mats[i]
        if (m.nrows, m.ncols) != (nrows, ncols):
            raise GridStructureError("sample set misses a critical value")
        return m

    def is_zero(self) -> bool:
        return all(m.is_zero() for _, mats in self.comps for m in mats)


def _sample_set(*value_lists):
    vals = sorted({Fraction(v) for vs in value_lists for v in vs})
    if not vals:
        vals = [Fraction(0)]
    vals.append(vals[-1] + 1)  # one point beyond, capturing the stable tail
    return tuple(vals)


def morphism_samples(source: GridModule, target: GridModule, shift) -> tuple:
    return _sample_set(source.criticals(),
                       [t + shift for t in target.criticals()])


def _morphism_from_components(source, target, shift, samples, degree_mats):
    comps = tuple(sorted((deg, tuple(mats)) for deg, mats in degree_mats.items()))
    return GridMorphism(source, target, Fraction(shift), samples, comps)


def zero_morphism(source, target, shift) -> GridMorphism:
    samples = morphism_samples(source, target, shift)
    degs = sorted(set(source.degrees()) | set(target.degrees()))
    mats = {deg: [Matrix.zeros(source.field, source.dim_at(s, deg),
                               target.dim_at(s - shift, deg)) for s in samples]
            for deg in degs}
    return _morphism_from_components(source, target, shift, samples, mats)


def tau_grid(module: GridModule, c) -> GridMorphism:
    """tau_{0,c} as a grid morphism module -> T_c(module)."""
    c = Fraction(c)
    if c < 0:
        raise ParameterError("tau needs c >= 0")
    samples = morphism_samples(module, module, c)
    mats = {deg: [module.struct_map(s - c, s, deg) for s in samples]
            for deg in module.degrees()}
    return _morphism_from_components(module, module, c, samples, mats)


def compose_shift_morphisms(first: GridMorphism, second: GridMorphism) -> GridMorphism:
    """(T_a second) o first for first: F -> T_a G, second: G -> T_b H."""
    if first.target is not second.source and first.target != second.source:
        raise GridStructureError("composition source/target mismatch")
    F, H = first.source, second.target
    shift = first.shift + second.shift
    samples = morphism_samples(F, H, shift)
    degs = sorted(set(first.degrees()) | set(second.degrees()))
    mats = {}
    for deg in degs:
        out = []
        for s in samples:
            x1 = first.component(deg, s)
            x2 = second.component(deg, s - first.shift)
            out.append(x1.mul(x2))
        mats[deg] = out
    return _morphism_from_components(F, H, shift, samples, mats)


def morphisms_equal(m1: GridMorphism, m2: GridMorphism) -> bool:
    if m1.shift != m2.shift:
        return False
    samples = sorted(set(m1.samples) | set(m2.samples))
    degs = set(m1.degrees()) | set(m2.degrees())
    for deg in degs:
        for s in samples:
            if not m1.component(deg, s).eq(m2.component(deg, s)):
                return False
    return True


def verify_naturality(m: GridMorphism) -> bool:
    F, G, c = m.source, m.target, m.shift
    degs = set(F.degrees()) | set(G.degrees())
    for deg in degs:
        for i in range(len(m.samples) - 1):
            s, s2 = m.samples[i], m.samples[i + 1]
            left = F.struct_map(s, s2, deg).mul(m.component(deg, s))
            right = m.component(deg, s2).mul(G.struct_map(s - c, s2 - c, deg))
            if not left.eq(right):
                return False
    return True


def morphism_space(F: GridModule, G: GridModule, c) -> list:
    """Basis of shift-c morphisms F -> T_c G (exact naturality solve)."""
    c = Fraction(c)
    if c < 0:
        raise ParameterError("morphism_space needs c >= 0")
    field = F.field
    samples = morphism_samples(F, G, c)
    degs = sorted(set(F.degrees()) | set(G.degrees()))

    var_index = {}
    shapes = {}
    for deg in degs:
        for si, s in enumerate(samples):
            nr, nc = F.dim_at(s, deg), G.dim_at(s - c, deg)
            shapes[(deg, si)] = (nr, nc)
            for r in range(nr):
                for cc in range(nc):
                    var_index[(deg, si, r, cc)] = len(var_index)
    nvars = len(var_index)
    rows = []
    for deg in degs:
        for si in range(len(samples) - 1):
            s, s2 = samples[si], samples[si + 1]
            fmap = F.struct_map(s, s2, deg)
            gmap = G.struct_map(s - c, s2 - c, deg)
            nr2, _ = shapes[(deg, si + 1)]
            _, nc1 = shapes[(deg, si)]
            for r2 in range(nr2):
                for c1 in range(nc1):
                    row = [field.zero()] * nvars
                    # sum_k fmap[r2,k] X_s[k,c1] - sum_k X_s2[r2,k] gmap[k,c1] = 0
                    for k in range(fmap.ncols):
                        if not field.is_zero(fmap.rows[r2][k]):
                            row[var_index[(deg, si, k, c1)]] = field.add(
                                row[var_index[(deg, si, k, c1)]], fmap.rows[r2][k])
                    for k in range(gmap.nrows):
                        if not field.is_zero(gmap.rows[k][c1]):
                            idx = var_index[(deg, si + 1, r2, k)]
                            row[idx] = field.sub(row[idx], gmap.rows[k][c1])
                    if any(not field.is_zero(e) for e in row):
                        rows.append(tuple(row))
    system = Matrix.from_rows(field, rows, ncols=nvars)
    basis = []
    for vec in system.nullspace():
        mats = {}
        for deg in degs:
            out = []
            for si in range(len(samples)):
                nr, nc = shapes[(deg, si)]
                out.append(Matrix(field, nr, nc, tuple(
                    tuple(vec.rows[var_index[(deg, si, r, cc)]][0] for cc in range(nc))
                    for r in range(nr))))
            mats[deg] = out
        basis.append(_morphism_from_components(F, G, c, samples, mats))
    for m in basis:
        assert verify_naturality(m)
    return basis


# --- the exhaustive ground-truth oracle ------------------------------------

def _flatten_bits(morphism: GridMorphism, samples, degs, field) -> int:
    """Encode an F_2 morphism as a bitmask over a canonical entry order."""
    bits = 0
    pos = 0
    for deg in degs:
        for s in samples:
            m = morphism.component(deg, s)
            for r in range(m.nrows):
                for cc in range(m.ncols):
                    if not field.is_zero(m.rows[r][cc]):
                        bits |= 1 << pos
                    pos += 1
    return bits


def _gf2_solvable(columns, target) -> bool:
    """Is target an F_2 combination of the given bitmask columns?"""
    pivots = []  # (leading_bit, value)
    for col in columns:
        v = col
        for lead, pv in pivots:
            if v >> lead & 1:
                v ^= pv
        if v:
            pivots.append((v.bit_length() - 1, v))
            pivots.sort(reverse=True)
    t = target
    for lead, pv in pivots:
        if t >> lead & 1:
            t ^= pv
    return t == 0


def _exists_factorization(F, G, a, b, pair_cap, solve_cap):
    """Does tau_{0,a+b}(F) factor as (T_a beta) o alpha through T_a G?"""
    field = F.field
    basis_a = morphism_space(F, G, a)
    basis_b = morphism_space(G, F, b)
    tau = tau_grid(F, a + b)
    samples = morphism_samples(F, F, a + b)
    degs = sorted(set(F.degrees()) | set(G.degrees()))
    tau_bits = _flatten_bits(tau, samples, degs, field)
    na, nb = len(basis_a), len(basis_b)
    cross = [[_flatten_bits(compose_shift_morphisms(ai, bj), samples, degs, field)
              for bj in basis_b] for ai in basis_a]
    if tau_bits == 0:
        return True  # zero morphisms suffice
    if na + nb <= pair_cap:
        for ka in range(1 << na):
            rows = [i for i in range(na) if ka >> i & 1]
            for kb in range(1 << nb):
                acc = 0
                for i in rows:
                    for j in range(nb):
                        if kb >> j & 1:
                            acc ^= cross[i][j]
                if acc == tau_bits:
                    return True
        return False
    if na <= solve_cap:
        for ka in range(1 << na):
            rows = [i for i in range(na) if ka >> i & 1]
            cols = []
            for j in range(nb):
                acc = 0
                for i in rows:
                    acc ^= cross[i][j]
                cols.append(acc)
            if _gf2_solvable(cols, tau_bits):
                return True
        return False
    raise OracleScopeError(
        f"morphism spaces too large for enumeration ({na}+{nb} basis elements)")


def brute_force_interleaved(F: GridModule, G: GridModule, a, b,
                            dim_bound=6, pair_cap=14, solve_cap=20) -> bool:
    """Ground-truth oracle for the interleaving conditions over F_2.

    Enumerates (alpha, beta) pairs for condition (1) and, independently,
    (gamma, delta) for condition (2).  Above the pair cap it enumerates one
    side and decides the other by exact GF(2) elimination, which settles the
    same existential statement.
    """
    a, b = Fraction(a), Fraction(b)
    if a < 0 or b < 0:
        raise ParameterError("shifts must be >= 0")
    if getattr(F.field, "p", None) != 2:
        raise OracleScopeError("oracle runs over F_2")
    if F.total_dim() > dim_bound or G.total_dim() > dim_bound:
        raise OracleScopeError(f"total dimension exceeds the oracle bound {dim_bound}")
    cond1 = _exists_factorization(F, G, a, b, pair_cap, solve_cap)
    if not cond1:
        return False
    cond2 = _exists_factorization(G, F, b, a, pair_cap, solve_cap)
    return cond2
