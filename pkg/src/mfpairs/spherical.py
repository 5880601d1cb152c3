"""Compact irreducible symmetric pairs: the eleven-family catalog.

For each family the involution acts on the big torus as a signed
coordinate permutation in a maximally split alignment, so restricted
roots, their multiplicities, the simple restricted system, the dual
fundamental system and the spherical (Cartan-Helgason) lattice are all
computable in exact arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .branching import EmbeddingMap, fixed_vector_dim
from .errors import CatalogKeyError, DimensionMismatchError, IntegrityError
from .linalg import frac_rank, frac_solve
from .rootsys import build_root_system, check_dominant_integral, expand_rows
from .weights import ReductiveType, SimpleFactor, Weight


@dataclass(frozen=True)
class Involution:
    """theta* eps_i = sign_i * eps_{perm_i} on the big coordinate vector."""

    perm: tuple
    sign: tuple

    def __post_init__(self):
        n = len(self.perm)
        chk = [0] * n
        for i, (p, s) in enumerate(zip(self.perm, self.sign)):
            if self.perm[p] != i or s * self.sign[p] != 1:
                raise IntegrityError("theta is not an involution")
            chk[p] += 1
        if any(c != 1 for c in chk):
            raise IntegrityError("theta permutation is not a bijection")

    def apply_row(self, row):
        out = [0] * len(row)
        for i, x in enumerate(row):
            out[self.perm[i]] = self.sign[i] * x
        return type(row)(out) if isinstance(row, tuple) else np.array(out)

    def apply_rows(self, rows: np.ndarray) -> np.ndarray:
        out = np.empty_like(rows)
        cols = np.asarray(self.perm)
        sg = np.asarray(self.sign)
        out[:, cols] = rows * sg[None, :]
        return out


@dataclass(frozen=True)
class SymmetricPair:
    """One Table-row instance (G_n, K_n) with torus-level data."""

    family_id: int
    params: tuple  # sorted (name, value) pairs
    name: str
    big: ReductiveType
    small: ReductiveType
    emb: EmbeddingMap
    theta: Involution
    table_rank: int
    table_dim: int

    @property
    def key(self) -> str:
        qs = "&".join(f"{k}={v}" for k, v in self.params)
        return f"table2/row{self.family_id}?{qs}"


@dataclass(frozen=True)
class RestrictedRootSystem:
    """Sigma_n with multiplicities, Psi_n, and the dual system Xi_n.

    Functionals are Fraction tuples on the big coordinate space in the
    sum-zero gauge for A blocks.
    """

    rank: int
    rtype: str  # diagram of Sigma (may contain BC components)
    psi_type: str  # diagram of the simple system Psi
    simple: tuple
    positive: tuple
    multiplicities: dict
    fundamental: tuple
    dim_m: int

    def matches(self, name: str) -> bool:
        return _signature_of_name(name) == _signature_of_psis(self.simple)


# ---------------------------------------------------------------------------
# gauge helpers (Fraction functionals on big coordinates)
# ---------------------------------------------------------------------------

def _gauge(rtype: ReductiveType, vec):
    """Sum-zero gauge per A block; other coordinates untouched."""
    v = [Fraction(x) for x in vec]
    for f, (a, b) in zip(rtype.factors, rtype.blocks()):
        if f.family == "A":
            mean = sum(v[a:b]) / (b - a)
            for i in range(a, b):
                v[i] -= mean
    return tuple(v)


def _fdot(u, v):
    return sum(a * b for a, b in zip(u, v))


def weight_functional(rtype: ReductiveType, w: Weight):
    """Weight as a gauged Fraction functional (charges dropped; the
    symmetric catalog's big groups are semisimple)."""
    return _gauge(rtype, [Fraction(c, 2) for c in w.coords2])


def functional_to_weight(rtype: ReductiveType, func) -> Weight:
    """Integral weight representative of a gauged functional."""
    v = [Fraction(x) for x in func]
    coords = []
    for f, (a, b) in zip(rtype.factors, rtype.blocks()):
        blk = v[a:b]
        if f.family == "A":
            blk = [x - blk[-1] for x in blk]  # back to canonical gauge
        coords.extend(blk)
    return rtype.weight(coords)


# ---------------------------------------------------------------------------
# restricted root system from theta
# ---------------------------------------------------------------------------

def restricted_roots(pair: SymmetricPair) -> RestrictedRootSystem:
    rt = pair.big
    rs = build_root_system(rt)
    theta = pair.theta
    mult: dict = {}
    for prow in rs.positive_rows:
        for row in (prow, tuple(-x for x in prow)):
            tr = theta.apply_row(row)
            bar = _gauge(rt, [Fraction(a - b, 4) for a, b in zip(row, tr)])
            if all(x == 0 for x in bar):
                continue
            if _lex_positive(bar):
                mult[bar] = mult.get(bar, 0) + 1
    sigma_plus = sorted(mult)
    sp_set = set(sigma_plus)
    simple = tuple(
        b for b in sigma_plus
        if not any(tuple(x - y for x, y in zip(b, c)) in sp_set for c in sigma_plus)
    )
    rank_a = _minus_eigenspace_dim(pair)
    if frac_rank(simple) != len(simple) or len(simple) != rank_a:
        raise IntegrityError(
            f"{pair.name}: simple restricted system has wrong rank "
            f"({len(simple)} vs a-dimension {rank_a})"
        )
    dim_m = rank_a + sum(mult.values())
    fundamental = _dual_system(simple)
    psi_type = _canonical_name(_signature_of_psis(simple))
    sigma_type = _sigma_name(simple, sp_set)
    return RestrictedRootSystem(
        rank=rank_a,
        rtype=sigma_type,
        psi_type=psi_type,
        simple=simple,
        positive=tuple(sigma_plus),
        multiplicities=mult,
        fundamental=fundamental,
        dim_m=dim_m,
    )


def _lex_positive(vec) -> bool:
    for x in vec:
        if x != 0:
            return x > 0
    return False


def _minus_eigenspace_dim(pair: SymmetricPair) -> int:
    rt = pair.big
    n = rt.ncoords
    basis = []
    th_plus_id = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        ge = _gauge(rt, e)
        basis.append(ge)
        te = [Fraction(0)] * n
        te[pair.theta.perm[i]] = Fraction(pair.theta.sign[i])
        th_plus_id.append(_gauge(rt, [a + b for a, b in zip(te, e)]))
    return frac_rank(basis) - frac_rank(th_plus_id)


def _dual_system(simple):
    """xi_l with <xi_l, psi_m>/<psi_m, psi_m> = delta_{l,m}."""
    r = len(simple)
    gram = [[_fdot(simple[i], simple[j]) for j in range(r)] for i in range(r)]
    out = []
    for l in range(r):
        rhs = [Fraction(0)] * r
        rhs[l] = _fdot(simple[l], simple[l])
        coeff = frac_solve(gram, rhs)
        vec = tuple(
            sum(coeff[j] * simple[j][i] for j in range(r))
            for i in range(len(simple[0]))
        )
        out.append(vec)
    return tuple(out)


# -- diagram classification -------------------------------------------------

def _signature_of_psis(simple):
    """Canonical multiset of (letter, rank) for the simple system's diagram."""
    r = len(simple)
    norms = [_fdot(s, s) for s in simple]
    adj = {i: set() for i in range(r)}
    for i in range(r):
        for j in range(i + 1, r):
            if _fdot(simple[i], simple[j]) != 0:
                adj[i].add(j)
                adj[j].add(i)
    comps = []
    seen = set()
    for i in range(r):
        if i in seen:
            continue
        comp, stack = [], [i]
        seen.add(i)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    sig = []
    for comp in comps:
        sig.append(_classify_component(comp, adj, norms))
    return tuple(sorted(sig))


def _classify_component(comp, adj, norms):
    k = len(comp)
    degs = {x: len(adj[x] & set(comp)) for x in comp}
    if max(degs.values(), default=0) >= 3:
        return ("D", k)  # fork; exceptional shapes cannot arise from A-D input
    comp_norms = {norms[x] for x in comp}
    if len(comp_norms) == 1:
        # path of equal norms: A_k; note D3 = A3 canonically
        return ("A", k)
    if k == 2:
        return ("B", 2)  # B2 = C2 canonically
    # path with a unique short/long end
    short = min(comp_norms)
    nshort = sum(1 for x in comp if norms[x] == short)
    return ("B", k) if nshort == 1 else ("C", k)


def _signature_of_name(name: str):
    sig = []
    for tok in name.split("x"):
        tok = tok.strip()
        fam, rk = tok[0].upper(), int(tok[1:])
        if fam == "A" and rk == 1:
            sig.append(("A", 1))
        elif rk == 2 and fam in ("B", "C"):
            sig.append(("B", 2))
        elif fam == "D" and rk == 2:
            sig += [("A", 1), ("A", 1)]
        elif fam == "D" and rk == 3:
            sig.append(("A", 3))
        elif fam == "BC":
            sig.append(("B", rk) if rk > 2 else ("B", 2))
        else:
            sig.append((fam, rk))
    return tuple(sorted(sig))


def _sigma_name(simple, sigma_plus_set):
    """Name of Sigma itself; components with doubled roots become BC."""
    base = _signature_of_psis(simple)
    doubled = any(
        tuple(2 * x for x in b) in sigma_plus_set for b in sigma_plus_set
    )
    if doubled and len(base) == 1:
        return f"BC{base[0][1]}"
    nm = "x".join(f"{fam}{rk}" for fam, rk in base)
    return ("BC:" + nm) if doubled else nm


def _canonical_name(sig):
    return "x".join(f"{fam}{rk}" for fam, rk in sig)


# ---------------------------------------------------------------------------
# Cartan-Helgason
# ---------------------------------------------------------------------------

def spherical_lattice_contains(pair: SymmetricPair, lam: Weight) -> bool:
    """lam in Lambda_n: some Weyl image vanishes on t_n and pairs to a
    nonnegative integer with every simple restricted root."""
    rt = pair.big
    rs = build_root_system(rt)
    check_dominant_integral(rs, lam)
    rrs = cached_restricted_roots(pair)
    row = rt.to_row(lam)[None, :]
    orbit, _ = expand_rows(rt, row, np.ones(1, dtype=np.int64))
    coords = orbit[:, : rt.ncoords]
    timg = pair.theta.apply_rows(coords)
    s = coords + timg
    # t-vanishing: zero modulo A-block shifts
    ok = np.ones(len(s), dtype=bool)
    for f, (a, b) in zip(rt.factors, rt.blocks()):
        if f.family == "A":
            ok &= np.all(s[:, a:b] == s[:, a:a + 1], axis=1)
        else:
            ok &= np.all(s[:, a:b] == 0, axis=1)
    for idx in np.flatnonzero(ok):
        lbar = _gauge(rt, [Fraction(int(x), 2) for x in coords[idx]])
        good = True
        for psi in rrs.simple:
            ratio = _fdot(lbar, psi) / _fdot(psi, psi)
            if ratio.denominator != 1 or ratio < 0:
                good = False
                break
        if good:
            return True
    return False


@dataclass(frozen=True)
class CartanHelgasonReport:
    pair_key: str
    bound: int
    rows: tuple  # (Weight, in_lattice, fixed_dim)
    verdict: bool
    witnesses: tuple

    def __bool__(self):
        return self.verdict


def verify_cartan_helgason(pair: SymmetricPair, height_bound: int) -> CartanHelgasonReport:
    """Check 'lam spherical <=> dim V^K = 1' and 'dim V^K <= 1' up to height."""
    if height_bound < 1:
        raise CatalogKeyError("height bound must be >= 1")
    big = build_root_system(pair.big)
    small = build_root_system(pair.small)
    rows = []
    witnesses = []
    for lam in pair.big.dominant_weights_by_height(height_bound):
        inlat = spherical_lattice_contains(pair, lam)
        fdim = fixed_vector_dim(big, lam, small, pair.emb)
        rows.append((lam, inlat, fdim))
        if fdim > 1 or inlat != (fdim == 1):
            witnesses.append((lam, inlat, fdim))
    return CartanHelgasonReport(
        pair_key=pair.key,
        bound=height_bound,
        rows=tuple(rows),
        verdict=not witnesses,
        witnesses=tuple(witnesses),
    )


_rr_cache: dict = {}


def cached_restricted_roots(pair: SymmetricPair) -> RestrictedRootSystem:
    hit = _rr_cache.get(pair)
    if hit is None:
        hit = _rr_cache[pair] = restricted_roots(pair)
    return hit


# ---------------------------------------------------------------------------
# Table catalog
# ---------------------------------------------------------------------------

def _sel_row(n, idxs, scale=1):
    row = [0] * n
    for i in idxs:
        row[i] = scale
    return tuple(row)


def _so_type(m: int):
    """ReductiveType pieces of SO(m): (factors, torus, plane-count)."""
    if m <= 1:
        return (), 0, 0
    if m == 2:
        return (), 1, 1
    k = m // 2
    if m % 2:
        return (SimpleFactor("B", k),), 0, k
    if k == 1:
        return (), 1, 1
    return (SimpleFactor("D", k),), 0, k


def _group_manifold(fam: str, rank: int, n_label: int, family_id: int, nmin: int, n: int):
    if n < nmin:
        raise CatalogKeyError(f"row {family_id} needs n >= {nmin}")
    f = SimpleFactor(fam, rank)
    big = ReductiveType((f, f))
    small = ReductiveType((f,))
    w = f.ncoords
    M = [_sel_row(2 * w, (i, w + i)) for i in range(w)]
    emb = EmbeddingMap(big, small, tuple(M))
    theta = Involution(
        tuple(list(range(w, 2 * w)) + list(range(w))), (1,) * (2 * w)
    )
    return big, small, emb, theta


def build_pair(family_id: int, **params) -> SymmetricPair:
    """Table row -> fully populated symmetric pair spec."""
    p = dict(params)
    n = p.get("n")
    pp, qq = p.get("p"), p.get("q")

    if family_id == 1:
        big, small, emb, theta = _group_manifold("A", n - 1, n, 1, 2, n)
        rank, dim = n - 1, n * n - 1
        name = f"SU({n})xSU({n})/diag"
    elif family_id == 2:
        big, small, emb, theta = _group_manifold("B", n, n, 2, 1, n)
        rank, dim = n, 2 * n * n + n
        name = f"Spin({2*n+1})xSpin({2*n+1})/diag"
    elif family_id == 3:
        big, small, emb, theta = _group_manifold("D", n, n, 3, 2, n)
        rank, dim = n, 2 * n * n - n
        name = f"Spin({2*n})xSpin({2*n})/diag"
    elif family_id == 4:
        big, small, emb, theta = _group_manifold("C", n, n, 4, 1, n)
        rank, dim = n, 2 * n * n + n
        name = f"Sp({n})xSp({n})/diag"
    elif family_id in (5, 8, 10):
        if pp is None or qq is None or pp < 1 or qq < pp:
            raise CatalogKeyError(f"row {family_id} needs 1 <= p <= q")
        big, small, emb, theta, rank, dim, name = _grassmann(family_id, pp, qq)
    elif family_id == 6:
        if n is None or n < 2:
            raise CatalogKeyError("row 6 needs n >= 2")
        big = ReductiveType((SimpleFactor("A", n - 1),))
        m = n // 2
        factors, torus, _ = _so_type(n)
        small = ReductiveType(factors, torus)
        rows = []
        for i in range(m):
            row = [0] * n
            row[i], row[n - 1 - i] = 1, -1
            rows.append(tuple(row))
        emb = EmbeddingMap(big, small, tuple(rows))
        theta = Involution(tuple(range(n)), (-1,) * n)
        rank, dim = n - 1, (n - 1) * (n + 2) // 2
        name = f"SU({n})/SO({n})"
    elif family_id == 7:
        if n is None or n < 2:
            raise CatalogKeyError("row 7 needs n >= 2")
        big = ReductiveType((SimpleFactor("A", 2 * n - 1),))
        small = ReductiveType((SimpleFactor("C", n),))
        rows = []
        for i in range(n):
            row = [0] * (2 * n)
            row[2 * i], row[2 * i + 1] = 1, -1
            rows.append(tuple(row))
        emb = EmbeddingMap(big, small, tuple(rows))
        perm = []
        for i in range(n):
            perm += [2 * i + 1, 2 * i]
        theta = Involution(tuple(perm), (-1,) * (2 * n))
        rank, dim = n - 1, 2 * n * n - n - 1
        name = f"SU({2*n})/Sp({n})"
    elif family_id == 9:
        if n is None or n < 2:
            raise CatalogKeyError("row 9 needs n >= 2")
        big = ReductiveType((SimpleFactor("D", n),))
        small = ReductiveType((SimpleFactor("A", n - 1),), 1)
        # determinant charge in the double-cover normalization (2x) so spin
        # weights of Spin(2n) restrict integrally
        M = [_sel_row(n, (i,)) for i in range(n)] + [(2,) * n]
        emb = EmbeddingMap(big, small, tuple(M))
        # pair coordinates from the end: (n-2, n-1), (n-4, n-3), ...
        perm = list(range(n))
        i = n - 1
        while i - 1 >= 0:
            perm[i], perm[i - 1] = i - 1, i
            i -= 2
        theta = Involution(tuple(perm), (1,) * n)
        rank, dim = n // 2, n * (n - 1)
        name = f"SO({2*n})/U({n})"
    elif family_id == 11:
        if n is None or n < 1:
            raise CatalogKeyError("row 11 needs n >= 1")
        big = ReductiveType((SimpleFactor("C", n),))
        small = ReductiveType((SimpleFactor("A", n - 1),) if n >= 2 else (), 1)
        M = [_sel_row(n, (i,)) for i in range(n)] + [(1,) * n]
        if n == 1:
            M = [(1,)]
        emb = EmbeddingMap(big, small, tuple(M))
        theta = Involution(tuple(range(n)), (-1,) * n)
        rank, dim = n, n * (n + 1)
        name = f"Sp({n})/U({n})"
    else:
        raise CatalogKeyError(f"unknown Table row {family_id}")

    pair = SymmetricPair(
        family_id=family_id,
        params=tuple(sorted(p.items())),
        name=name,
        big=big,
        small=small,
        emb=emb,
        theta=theta,
        table_rank=rank,
        table_dim=dim,
    )
    # cheap invariants: dim M = dim G - dim K
    if big.group_dim - small.group_dim != dim:
        raise IntegrityError(
            f"{name}: dim G - dim K = {big.group_dim - small.group_dim} != {dim}"
        )
    return pair


def _grassmann(family_id: int, p: int, q: int):
    if family_id == 5:
        big = ReductiveType((SimpleFactor("A", p + q - 1),))
        n = p + q
        facs = []
        if p >= 2:
            facs.append(SimpleFactor("A", p - 1))
        if q >= 2:
            facs.append(SimpleFactor("A", q - 1))
        small = ReductiveType(tuple(facs), 1)
        rows = []
        if p >= 2:
            rows += [_sel_row(n, (i,)) for i in range(p)]
        if q >= 2:
            rows += [_sel_row(n, (p + j,)) for j in range(q)]
        charge = tuple([q] * p + [-p] * q)
        rows.append(charge)
        emb = EmbeddingMap(big, small, tuple(rows))
        perm = list(range(n))
        for i in range(p):
            perm[i], perm[p + i] = p + i, i
        theta = Involution(tuple(perm), (1,) * n)
        return big, small, emb, theta, p, 2 * p * q, f"SU({p+q})/S(U({p})xU({q}))"

    if family_id == 10:
        big = ReductiveType((SimpleFactor("C", p + q),))
        small = ReductiveType((SimpleFactor("C", p), SimpleFactor("C", q)))
        n = p + q
        rows = [_sel_row(n, (i,)) for i in range(n)]
        emb = EmbeddingMap(big, small, tuple(rows))
        perm = list(range(n))
        for i in range(p):
            perm[i], perm[p + i] = p + i, i
        theta = Involution(tuple(perm), (1,) * n)
        return big, small, emb, theta, p, 4 * p * q, f"Sp({p+q})/Sp({p})xSp({q})"

    # family 8: SO(p+q) / SO(p) x SO(q)
    N = p + q
    bfacs, btorus, m = _so_type(N)
    if not bfacs:
        raise CatalogKeyError("row 8 needs p + q >= 3")
    big = ReductiveType(bfacs, btorus)
    pf, pt, pk = _so_type(p)
    qf, qt, qk = _so_type(q)
    small = ReductiveType(pf + qf, pt + qt)
    # emb: block planes in order (p-planes, then q-planes); both odd leaves
    # the mixed last plane unused
    rows = [_sel_row(m, (i,)) for i in range(pk)]
    rows += [_sel_row(m, (pk + j,)) for j in range(qk)]
    # order rows to match small's layout: factor coords first, charges last;
    # SO(2) blocks become charges in the double-cover (2x) normalization
    fac_rows, ch_rows = [], []
    at = 0
    for part, fl, tor in ((p, pf, pt), (q, qf, qt)):
        cnt = _so_type(part)[2]
        if tor:
            ch_rows.append(tuple(2 * x for x in rows[at]))
        else:
            fac_rows += rows[at:at + cnt]
        at += cnt
    emb = EmbeddingMap(big, small, tuple(fac_rows + ch_rows))
    sign = [-1] * p + [1] * (m - p)
    theta = Involution(tuple(range(m)), tuple(sign))
    return big, small, emb, theta, p, p * q, f"SO({p+q})/SO({p})xSO({q})"
