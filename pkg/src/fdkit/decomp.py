"""Indecomposable decomposition, iso testing, and the class registry.

Everything runs through the endomorphism ring: rad(End) is the radical of
the matrix trace form (valid since p exceeds every module dimension we
touch), a nontrivial idempotent of End/rad is lifted by Newton iteration
e <- 3e^2 - 2e^3, and the module splits along its image.  Over a finite
field the semisimple quotient is a product of matrix rings over fields, so
indecomposability is "the quotient is commutative with a single block".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy import GF, Poly, symbols

from . import linalg
from .algebra import Algebra, radical
from .errors import CutoffExceeded, InvariantViolation, ZeroModule
from .linalg import RowBasis, eye, matmul, nullspace, rref, zeros
from .modules import Module, ModuleMap, hom_space, is_projective, submodule

_T = symbols("t")


def _gf_factors(coeffs_ascending: list[int], p: int) -> list[list[int]]:
    """Distinct irreducible factors (ascending coeff lists) of a poly mod p."""
    poly = Poly(list(reversed(coeffs_ascending)), _T, domain=GF(p))
    return [
        [int(c) % p for c in reversed(f.all_coeffs())]
        for f, _ in poly.factor_list()[1]
        if f.degree() >= 1
    ]


def _poly_xgcd(a: list[int], b: list[int], p: int):
    """Extended gcd for ascending-coefficient polys over F_p."""
    pa = Poly(list(reversed(a)), _T, domain=GF(p))
    pb = Poly(list(reversed(b)), _T, domain=GF(p))
    s, t, g = pa.gcdex(pb)  # s*a + t*b = g
    return (
        [int(c) % p for c in reversed(s.all_coeffs())],
        [int(c) % p for c in reversed(t.all_coeffs())],
        [int(c) % p for c in reversed(g.all_coeffs())],
    )


class MultClosure:
    """A finite-dimensional algebra presented by a coordinate multiplication."""

    def __init__(self, dim: int, p: int, mult, unit: np.ndarray):
        self.dim = dim
        self.p = p
        self.mult = mult
        self.unit = unit

    def power_list(self, z: np.ndarray, n: int) -> list[np.ndarray]:
        out = [self.unit.copy()]
        for _ in range(n):
            out.append(self.mult(out[-1], z))
        return out

    def minpoly(self, z: np.ndarray) -> list[int]:
        """Monic minimal polynomial of z, ascending coefficients."""
        rows = [self.unit.copy()]
        while True:
            rows.append(self.mult(rows[-1], z))
            mat = np.array(rows, dtype=np.int64)
            red, piv = rref(mat, self.p)
            if red.shape[0] < mat.shape[0]:
                k = len(rows) - 1  # z^k depends on lower powers
                dep = linalg.solve(np.array(rows[:-1]).T, rows[-1], self.p)
                coeffs = [(-int(c)) % self.p for c in dep] + [1]
                return coeffs
            if len(rows) > self.dim + 1:
                raise CutoffExceeded("minpoly search ran away")

    def evaluate(self, coeffs: list[int], z: np.ndarray) -> np.ndarray:
        out = zeros(self.dim)
        power = self.unit.copy()
        for c in coeffs:
            if c:
                out = (out + c * power) % self.p
            power = self.mult(power, z)
        return out


def _split_idempotent_from(closure: MultClosure, z: np.ndarray):
    """Idempotent from an element whose minpoly has >= 2 distinct factors."""
    f = closure.minpoly(z)
    factors = _gf_factors(f, closure.p)
    if len(factors) < 2:
        return None
    f1 = factors[0]
    rest = [1]
    for g in factors[1:]:
        pr = Poly(list(reversed(rest)), _T, domain=GF(closure.p)) * Poly(
            list(reversed(g)), _T, domain=GF(closure.p)
        )
        rest = [int(c) % closure.p for c in reversed(pr.all_coeffs())]
    s, t, g = _poly_xgcd(f1, rest, closure.p)
    if len(g) != 1:
        return None  # repeated factor: not semisimple here, give up on z
    ginv = pow(g[0], closure.p - 2, closure.p)
    # e = (t * rest / g)(z): identity on the f1-kernel component
    tr = Poly(list(reversed(t)), _T, domain=GF(closure.p)) * Poly(
        list(reversed(rest)), _T, domain=GF(closure.p)
    )
    coeffs = [(int(c) * ginv) % closure.p for c in reversed(tr.all_coeffs())]
    e = closure.evaluate(coeffs, z)
    if not np.any(e) or np.array_equal(e, closure.unit):
        return None
    return e


def find_idempotent_semisimple(closure: MultClosure, candidates, rng) -> np.ndarray | None:
    """Nontrivial idempotent of a semisimple algebra, None if a division ring."""
    if closure.dim == 1:
        return None
    for z in candidates:
        e = _split_idempotent_from(closure, z)
        if e is not None:
            return e
    # a handful of random combinations; deterministic given the caller's rng
    base = list(candidates)
    for _ in range(40):
        co = rng.integers(0, closure.p, size=len(base))
        z = zeros(closure.dim)
        for c, b in zip(co, base):
            z = (z + int(c) * b) % closure.p
        e = _split_idempotent_from(closure, z)
        if e is not None:
            return e
    return None


# -- endomorphism ring machinery -------------------------------------------------


class EndData:
    """Hom(m, m) with product f*g = f o g and trace-form radical."""

    def __init__(self, m: Module):
        if m.dim == 0:
            raise ZeroModule("End of the zero module")
        self.module = m
        self.p = m.p
        maps = hom_space(m, m)
        self.stack = np.stack([f.matrix for f in maps])
        self.r = len(maps)
        self.basis = RowBasis(self.stack.reshape(self.r, -1), self.p)
        if self.basis.dim != self.r:
            raise InvariantViolation("End basis not independent")
        self.unit = self.coords(eye(m.dim))
        t = np.einsum("iab,jba->ij", self.stack, self.stack) % self.p
        self.rad_rows = nullspace(t, self.p)
        self._quot = None

    def coords(self, mat: np.ndarray) -> np.ndarray:
        c = self.basis.coords(mat.reshape(-1))
        if c is None:
            raise InvariantViolation("matrix not in End")
        return c

    def matrix(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords % self.p, self.stack, axes=([0], [0])) % self.p

    def mult_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.coords(matmul(self.matrix(a), self.matrix(b), self.p))

    def in_radical(self, mat: np.ndarray) -> bool:
        c = self.coords(mat)
        if self.rad_rows.shape[0] == 0:
            return not np.any(c)
        return RowBasis(self.rad_rows, self.p, reduced=True).contains_vector(c)

    def quotient(self):
        """(closure, lift, proj) for End/rad in complement coordinates."""
        if self._quot is not None:
            return self._quot
        p = self.p
        rb = RowBasis(self.rad_rows, p, reduced=True)
        kept = [j for j in range(self.r) if j not in rb.pivots]
        q = len(kept)
        proj = zeros((q, self.r))
        for r_, j in enumerate(kept):
            proj[r_, j] = 1
        for i, pc in enumerate(rb.pivots):
            for r_, j in enumerate(kept):
                proj[r_, pc] = (-rb.rows[i, j]) % p
        lift = zeros((self.r, q))
        for r_, j in enumerate(kept):
            lift[j, r_] = 1

        def mult(a, b):
            return proj @ self.mult_coords(lift @ a % p, lift @ b % p) % p

        closure = MultClosure(q, p, mult, proj @ self.unit % p)
        self._quot = (closure, lift, proj)
        return self._quot

    def lift_idempotent(self, ebar: np.ndarray) -> np.ndarray:
        """Newton-lift an idempotent of End/rad to an idempotent matrix."""
        closure, lift, proj = self.quotient()
        e = self.matrix(lift @ ebar % self.p)
        for _ in range(64):
            e2 = matmul(e, e, self.p)
            if np.array_equal(e2, e):
                return e
            e = (3 * e2 - 2 * matmul(e2, e, self.p)) % self.p
        raise CutoffExceeded("idempotent lifting did not converge")


def _center_basis(closure: MultClosure) -> np.ndarray:
    """z central: z*e_j - e_j*z = 0 for all basis e_j; solve over z coords."""
    cons = []
    for j in range(closure.dim):
        ej = zeros(closure.dim)
        ej[j] = 1
        block = []
        for i in range(closure.dim):
            ei = zeros(closure.dim)
            ei[i] = 1
            block.append((closure.mult(ei, ej) - closure.mult(ej, ei)) % closure.p)
        cons.append(np.array(block).T)  # rows: output coords, cols: z coords
    consm = np.concatenate(cons, axis=0)
    return nullspace(consm, closure.p)


def _is_commutative(closure: MultClosure) -> bool:
    for i in range(closure.dim):
        ei = zeros(closure.dim)
        ei[i] = 1
        for j in range(i + 1, closure.dim):
            ej = zeros(closure.dim)
            ej[j] = 1
            if not np.array_equal(closure.mult(ei, ej), closure.mult(ej, ei)):
                return False
    return True


def find_nontrivial_idempotent(end: EndData, rng) -> np.ndarray | None:
    """A nontrivial idempotent endomorphism matrix, or None if End is local."""
    closure, lift, proj = end.quotient()
    if closure.dim == 1:
        return None
    candidates = []
    center = _center_basis(closure)
    candidates.extend(list(center))
    for i in range(closure.dim):
        ei = zeros(closure.dim)
        ei[i] = 1
        candidates.append(ei)
    ebar = find_idempotent_semisimple(closure, candidates, rng)
    if ebar is None:
        if _is_commutative(closure):
            return None
        raise CutoffExceeded("no idempotent found in a noncommutative block")
    return end.lift_idempotent(ebar)


def is_indecomposable(session, m: Module) -> bool:
    """End/rad must be commutative with a single field block."""
    if m.dim == 0:
        raise ZeroModule("zero module is not indecomposable")
    end = session.end_data(m)
    closure, _, _ = end.quotient()
    if closure.dim == 1:
        return True
    if not _is_commutative(closure):
        return False
    return find_idempotent_semisimple(closure, _basis_candidates(closure), session.rng("indec")) is None


def _basis_candidates(closure: MultClosure):
    out = []
    for i in range(closure.dim):
        ei = zeros(closure.dim)
        ei[i] = 1
        out.append(ei)
    return out


# -- decomposition ---------------------------------------------------------------


@dataclass
class Factor:
    class_id: int
    module: Module
    incl: ModuleMap  # factor -> decomposed module
    proj: ModuleMap  # decomposed module -> factor
    to_rep: ModuleMap  # iso factor -> registry representative


@dataclass
class Decomposition:
    module: Module
    factors: list[Factor]

    def class_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for f in self.factors:
            out[f.class_id] = out.get(f.class_id, 0) + 1
        return out

    def nonprojective_multiset(self, registry) -> dict[int, int]:
        out = {}
        for cid, mult in self.class_multiset().items():
            if not registry.classes[cid].is_projective:
                out[cid] = mult
        return out


@dataclass
class IsoClass:
    class_id: int
    representative: Module
    is_projective: bool


class ClassRegistry:
    """Session-wide iso-class registry; ids in first-seen order."""

    def __init__(self, session):
        self.session = session
        self.classes: list[IsoClass] = []
        self._by_invariant: dict[tuple, list[int]] = {}

    def find_or_insert(self, m: Module) -> tuple[int, ModuleMap]:
        """(class id, iso m -> representative); m must be indecomposable."""
        key = m.invariant_key()
        for cid in self._by_invariant.get(key, []):
            rep = self.classes[cid].representative
            w = _indec_iso(self.session, m, rep)
            if w is not None:
                return cid, w
        cid = len(self.classes)
        self.classes.append(IsoClass(cid, m, is_projective(m)))
        self._by_invariant.setdefault(key, []).append(cid)
        return cid, ModuleMap.identity(m)


def _indec_iso(session, m: Module, n: Module):
    """Iso witness between indecomposables, or None (local End argument)."""
    if m.dim != n.dim or m.invariant_key() != n.invariant_key():
        return None
    if m.content_hash() == n.content_hash():
        return ModuleMap.identity(m)
    fwd = hom_space(m, n)
    if not fwd:
        return None
    bwd = hom_space(n, m)
    if not bwd:
        return None
    end = session.end_data(m)
    for f in fwd:
        for g in bwd:
            comp = matmul(g.matrix, f.matrix, m.p)
            if not end.in_radical(comp):
                ff = ModuleMap(m, n, f.matrix, check=False)
                if ff.is_isomorphism():
                    return ff
    return None


def decompose(session, m: Module, *, _depth: int = 0) -> Decomposition:
    """Split into indecomposables by recursive idempotent splitting."""
    if m.dim == 0:
        return Decomposition(m, [])
    if _depth > 2 * m.dim + 8:
        raise CutoffExceeded("decomposition recursion ran away")
    end = session.end_data(m)
    e = find_nontrivial_idempotent(end, session.rng("decompose"))
    if e is None:
        cid, to_rep = session.registry.find_or_insert(m)
        return Decomposition(
            m, [Factor(cid, m, ModuleMap.identity(m), ModuleMap.identity(m), to_rep)]
        )
    factors: list[Factor] = []
    for proj_mat in (e, (eye(m.dim) - e) % m.p):
        rows = rref(proj_mat.T, m.p)[0]  # column space of the projection
        piece, incl = submodule(m, rows)
        basis = RowBasis(rows, m.p, reduced=True)
        pr_rows = basis.coords_matrix(proj_mat.T)
        if pr_rows is None:
            raise InvariantViolation("projection image escaped its column space")
        proj = ModuleMap(m, piece, pr_rows.T, check=False)
        subdec = decompose(session, piece, _depth=_depth + 1)
        for f in subdec.factors:
            factors.append(
                Factor(
                    f.class_id,
                    f.module,
                    f.incl.then(incl),
                    proj.then(f.proj),
                    f.to_rep,
                )
            )
    if sum(f.module.dim for f in factors) != m.dim:
        raise InvariantViolation("decomposition dims do not add up")
    return Decomposition(m, factors)


def is_isomorphic(session, m: Module, n: Module):
    """(bool, witness ModuleMap) via Krull-Schmidt matching of class multisets."""
    if m.algebra is not n.algebra:
        from .errors import AlgebraMismatch

        raise AlgebraMismatch("iso test across algebras")
    if m.dim != n.dim:
        return False, None
    if m.dim == 0:
        return True, ModuleMap(m, n, zeros((0, 0)), check=False)
    if m.invariant_key() != n.invariant_key():
        return False, None
    dm = session.decompose(m)
    dn = session.decompose(n)
    if dm.class_multiset() != dn.class_multiset():
        return False, None
    used = [False] * len(dn.factors)
    total = zeros((n.dim, m.dim))
    for fm in dm.factors:
        found = None
        for j, fn in enumerate(dn.factors):
            if not used[j] and fn.class_id == fm.class_id:
                found = j
                break
        fn = dn.factors[found]
        used[found] = True
        piece = fm.proj.then(fm.to_rep).then(fn.to_rep.inverse()).then(fn.incl)
        total = (total + piece.matrix) % m.p
    wit = ModuleMap(m, n, total, check=False)
    if not wit.is_isomorphism():
        raise InvariantViolation("assembled witness is not an isomorphism")
    return True, wit


# -- endomorphism algebras and primitive idempotents ------------------------------


def end_algebra(session, m: Module) -> Algebra:
    """End(m) as a first-class algebra (product = composition f o g)."""
    if m.dim == 0:
        raise ZeroModule("End of the zero module")
    end = session.end_data(m)
    r = end.r
    sc = zeros((r, r, r))
    for i in range(r):
        for j in range(r):
            sc[i, j] = end.coords(matmul(end.stack[i], end.stack[j], end.p))
    alg = Algebra(
        m.algebra.field,
        sc,
        end.unit,
        basis_labels=[f"f{i}" for i in range(r)],
        origin="endomorphism",
    )
    complete_primitive_idempotents(session, alg)
    return alg


def complete_primitive_idempotents(session, alg: Algebra) -> list[np.ndarray]:
    """Compute (and attach) a complete orthogonal primitive idempotent set."""
    if alg.idempotents is not None:
        return alg.idempotents
    p = alg.p
    closure = MultClosure(alg.dim, p, lambda a, b: alg.mult(a, b), alg.unit.copy())
    rad = radical(alg)
    rb = rad.basis
    kept = [j for j in range(alg.dim) if j not in rb.pivots]
    q = len(kept)
    proj = zeros((q, alg.dim))
    for r_, j in enumerate(kept):
        proj[r_, j] = 1
    for i, pc in enumerate(rb.pivots):
        for r_, j in enumerate(kept):
            proj[r_, pc] = (-rb.rows[i, j]) % p
    lift = zeros((alg.dim, q))
    for r_, j in enumerate(kept):
        lift[j, r_] = 1

    def qmult(a, b):
        return proj @ alg.mult(lift @ a % p, lift @ b % p) % p

    qclosure = MultClosure(q, p, qmult, proj @ alg.unit % p)
    prims_bar = _primitive_orthogonal_idempotents(qclosure, session.rng("prims"))
    # sequential Newton lift keeping orthogonality
    lifted: list[np.ndarray] = []
    for ebar in prims_bar:
        f = alg.unit.copy()
        for e in lifted:
            f = (f - e) % p
        x = lift @ ebar % p
        x = alg.mult(alg.mult(f, x), f)
        for _ in range(64):
            x2 = alg.mult(x, x)
            if np.array_equal(x2, x):
                break
            x = (3 * x2 - 2 * alg.mult(x2, x)) % p
        else:
            raise CutoffExceeded("idempotent lifting did not converge")
        lifted.append(x)
    total = zeros(alg.dim)
    for e in lifted:
        total = (total + e) % p
    if not np.array_equal(total, alg.unit):
        raise InvariantViolation("primitive idempotents do not sum to 1")
    alg.idempotents = lifted
    alg._check_idempotents()
    return lifted


def _primitive_orthogonal_idempotents(closure: MultClosure, rng) -> list[np.ndarray]:
    """Complete primitive orthogonal idempotents of a semisimple algebra."""
    out = []
    stack = [closure.unit.copy()]
    guard = 0
    while stack:
        guard += 1
        if guard > 4 * closure.dim + 16:
            raise CutoffExceeded("semisimple splitting ran away")
        e = stack.pop()
        sub = _corner(closure, e)
        cand = _basis_candidates_corner(closure, e)
        ebar = find_idempotent_semisimple(sub, cand, rng)
        if ebar is None:
            out.append(e)
            continue
        e1 = sub.lifted(ebar)
        stack.append(e1)
        stack.append((e - e1) % closure.p)
    return out


class _CornerClosure(MultClosure):
    def __init__(self, parent: MultClosure, e: np.ndarray, rows: RowBasis):
        self.parent = parent
        self.rows = rows
        super().__init__(rows.dim, parent.p, self._mult, rows.coords(e))

    def _mult(self, a, b):
        pa = np.tensordot(a % self.p, self.rows.rows, axes=([0], [0])) % self.p
        pb = np.tensordot(b % self.p, self.rows.rows, axes=([0], [0])) % self.p
        return self.rows.coords(self.parent.mult(pa, pb))

    def lifted(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords % self.p, self.rows.rows, axes=([0], [0])) % self.p


def _corner(closure: MultClosure, e: np.ndarray) -> _CornerClosure:
    rows = []
    for i in range(closure.dim):
        ei = zeros(closure.dim)
        ei[i] = 1
        rows.append(closure.mult(closure.mult(e, ei), e))
    basis = RowBasis(np.array(rows), closure.p)
    return _CornerClosure(closure, e, basis)


def _basis_candidates_corner(sub: _CornerClosure, e: np.ndarray | None = None):
    out = []
    for i in range(sub.dim):
        ei = zeros(sub.dim)
        ei[i] = 1
        out.append(ei)
    return out
