"""Left modules over a finite-dimensional F_p-algebra.

A Module is a stack of action matrices, one per algebra basis element, with
act(b_i) @ act(b_j) = act(b_i * b_j).  Vectors are columns; a ModuleMap f has
matrix of shape (dim dst, dim src) and satisfies f A = A f on every action.

Projective covers are minimal by construction (generators are lifted weight
vectors of the top), so iterated kernels are the minimal syzygies used by
every projective-dimension computation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import Algebra, AlgebraEmbedding, Subspace, radical
from .errors import (
    AlgebraMismatch,
    AmbientMismatch,
    InvariantViolation,
    NoIdempotents,
    NotComposable,
    ZeroModule,
)
from .linalg import RowBasis, asmod, eye, matmul, nullspace, rref, zeros


class Module:
    """Left module as a tuple of action matrices over the algebra basis."""

    def __init__(self, algebra: Algebra, action: np.ndarray, check: str = "gens"):
        self.algebra = algebra
        self.p = algebra.p
        self.action = asmod(action, self.p)
        if self.action.ndim != 3 or self.action.shape[0] != algebra.dim:
            raise InvariantViolation("action stack has wrong shape")
        self.dim = self.action.shape[1]
        if self.action.shape[2] != self.dim:
            raise InvariantViolation("action matrices must be square")
        self._hash = None
        self._invariant = None
        if check != "none":
            self._check(full=(check == "full"))

    def _check(self, full: bool):
        alg, p = self.algebra, self.p
        unit_act = np.tensordot(alg.unit, self.action, axes=([0], [0])) % p
        if not np.array_equal(unit_act, eye(self.dim)):
            raise InvariantViolation("unit does not act as the identity")
        if self.dim == 0:
            return
        if full:
            gen_vecs = [alg.basis_vector(i) for i in range(alg.dim)]
        else:
            gen_vecs = alg.generators()
        for g in gen_vecs:
            ga = self.act_elem(g)
            lhs = np.einsum("ab,jbc->jac", ga, self.action) % p  # act(g) act(b_j)
            coefs = np.tensordot(asmod(g, p), alg.sc, axes=([0], [0])) % p
            rhs = np.tensordot(coefs, self.action, axes=([1], [0])) % p  # act(g b_j)
            if not np.array_equal(lhs, rhs):
                raise InvariantViolation("action is not multiplicative")

    def act_elem(self, x: np.ndarray) -> np.ndarray:
        """Action matrix of an arbitrary algebra element."""
        return np.tensordot(asmod(x, self.p), self.action, axes=([0], [0])) % self.p

    def content_hash(self) -> str:
        if self._hash is None:
            h = hashlib.sha256()
            h.update(self.algebra.content_hash().encode())
            h.update(str(self.dim).encode())
            h.update(self.action.tobytes())
            self._hash = h.hexdigest()
        return self._hash

    def invariant_key(self) -> tuple:
        """Cheap iso-invariants: dim, weight dims, radical layer profile."""
        if self._invariant is None:
            weights = ()
            if self.algebra.idempotents is not None:
                weights = tuple(
                    linalg.rank(self.act_elem(e), self.p) for e in self.algebra.idempotents
                )
            layers = tuple(m.dim for m in radical_filtration(self))
            self._invariant = (self.dim, weights, layers)
        return self._invariant

    def __repr__(self):
        return f"Module(dim={self.dim} over dim-{self.algebra.dim} algebra)"


class ModuleMap:
    """Homomorphism of left modules, stored as a (dst, src) matrix."""

    def __init__(self, src: Module, dst: Module, matrix: np.ndarray, check: bool = True):
        if src.algebra is not dst.algebra:
            raise AlgebraMismatch("map between modules over different algebras")
        self.src = src
        self.dst = dst
        self.p = src.p
        self.matrix = asmod(matrix, self.p).reshape(dst.dim, src.dim)
        if check:
            self.verify()

    def verify(self):
        for g in self.src.algebra.generators():
            a, b = self.src.act_elem(g), self.dst.act_elem(g)
            if not np.array_equal(matmul(self.matrix, a, self.p), matmul(b, self.matrix, self.p)):
                raise InvariantViolation("matrix does not intertwine the actions")

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """Composite self-then-other (self: X->Y, other: Y->Z)."""
        if other.src is not self.dst:
            raise NotComposable("maps do not compose")
        return ModuleMap(self.src, other.dst, matmul(other.matrix, self.matrix, self.p), check=False)

    def rank(self) -> int:
        return linalg.rank(self.matrix, self.p)

    def is_injective(self) -> bool:
        return self.rank() == self.src.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.dst.dim

    def is_isomorphism(self) -> bool:
        return self.src.dim == self.dst.dim and self.is_injective()

    def inverse(self) -> "ModuleMap":
        return ModuleMap(self.dst, self.src, linalg.inverse(self.matrix, self.p), check=False)

    def kernel_rows(self) -> np.ndarray:
        return nullspace(self.matrix, self.p)

    def image_rows(self) -> np.ndarray:
        return rref(self.matrix.T, self.p)[0]

    @classmethod
    def zero(cls, src: Module, dst: Module) -> "ModuleMap":
        return cls(src, dst, zeros((dst.dim, src.dim)), check=False)

    @classmethod
    def identity(cls, m: Module) -> "ModuleMap":
        return cls(m, m, eye(m.dim), check=False)


def zero_module(alg: Algebra) -> Module:
    return Module(alg, zeros((alg.dim, 0, 0)), check="none")


def regular_module(alg: Algebra) -> Module:
    return Module(alg, alg.lmul_table(), check="none")


def coregular_module(alg: Algebra) -> Module:
    """Dual of the right regular module: (b.f)(x) = f(x*b)."""
    stack = np.stack([alg.rmul(alg.basis_vector(i)).T for i in range(alg.dim)])
    return Module(alg, stack % alg.p, check="none")


# -- sub/quotient/sum constructions -------------------------------------------


def submodule(m: Module, rows: np.ndarray, *, close: bool = False) -> tuple[Module, ModuleMap]:
    """Submodule spanned by rows (closed under the action unless close=True
    iterates the closure first).  Returns (sub, inclusion)."""
    p = m.p
    rows = asmod(rows, p)
    if rows.size == 0:
        sub = zero_module(m.algebra)
        return sub, ModuleMap(sub, m, zeros((m.dim, 0)), check=False)
    basis = RowBasis(rows, p)
    if close:
        gens = m.algebra.generators()
        while True:
            new = [basis.rows]
            for g in gens:
                new.append(matmul(basis.rows, m.act_elem(g).T, p))
            merged = RowBasis(np.concatenate(new, axis=0), p)
            if merged.dim == basis.dim:
                basis = merged
                break
            basis = merged
    S = basis.rows
    action = zeros((m.algebra.dim, basis.dim, basis.dim))
    for k in range(m.algebra.dim):
        imgs = matmul(S, m.action[k].T, p)  # rows: images of sub basis
        cs = basis.coords_matrix(imgs)
        if cs is None:
            raise InvariantViolation("rows do not span a submodule")
        action[k] = cs.T
    sub = Module(m.algebra, action, check="none")
    incl = ModuleMap(sub, m, S.T, check=False)
    return sub, incl


def quotient_module(m: Module, subrows: np.ndarray) -> tuple[Module, ModuleMap]:
    """Quotient by the submodule spanned by subrows; returns (quot, proj)."""
    p = m.p
    basis = RowBasis(subrows, p) if subrows.size else RowBasis(zeros((0, m.dim)), p)
    pivots = basis.pivots
    kept = [j for j in range(m.dim) if j not in pivots]
    q = len(kept)
    proj = zeros((q, m.dim))
    for r, j in enumerate(kept):
        proj[r, j] = 1
    for i, pc in enumerate(pivots):
        for r, j in enumerate(kept):
            proj[r, pc] = (-basis.rows[i, j]) % p
    lift = zeros((m.dim, q))
    for r, j in enumerate(kept):
        lift[j, r] = 1
    action = zeros((m.algebra.dim, q, q))
    for k in range(m.algebra.dim):
        action[k] = proj @ m.action[k] @ lift % p
    quot = Module(m.algebra, action, check="none")
    return quot, ModuleMap(m, quot, proj, check=False)


@dataclass
class SumData:
    module: Module
    inclusions: list[ModuleMap]
    projections: list[ModuleMap]


def direct_sum(mods: list[Module]) -> SumData:
    if not mods:
        raise ValueError("direct_sum of nothing")
    alg = mods[0].algebra
    for m in mods:
        if m.algebra is not alg:
            raise AlgebraMismatch("direct sum over mixed algebras")
    dims = [m.dim for m in mods]
    total = sum(dims)
    action = zeros((alg.dim, total, total))
    off = 0
    offsets = []
    for m in mods:
        offsets.append(off)
        action[:, off : off + m.dim, off : off + m.dim] = m.action
        off += m.dim
    out = Module(alg, action, check="none")
    incs, projs = [], []
    for m, off in zip(mods, offsets):
        inc = zeros((total, m.dim))
        inc[off : off + m.dim] = eye(m.dim)
        pr = zeros((m.dim, total))
        pr[:, off : off + m.dim] = eye(m.dim)
        incs.append(ModuleMap(m, out, inc, check=False))
        projs.append(ModuleMap(out, m, pr, check=False))
    return SumData(out, incs, projs)


def direct_sum_map(f: ModuleMap, g: ModuleMap, src: SumData, dst: SumData) -> ModuleMap:
    """Block map f + g between explicit two-term sums."""
    mat = zeros((dst.module.dim, src.module.dim))
    mat[: f.dst.dim, : f.src.dim] = f.matrix
    mat[f.dst.dim :, f.src.dim :] = g.matrix
    return ModuleMap(src.module, dst.module, mat, check=False)


def submodule_multiply(i: Subspace, m: Module) -> tuple[Module, ModuleMap]:
    """The submodule generated by i*m; equals i*m itself when i is an ideal."""
    if i.ambient is not m.algebra:
        raise AmbientMismatch("subspace over the wrong algebra")
    if i.dim == 0 or m.dim == 0:
        sub = zero_module(m.algebra)
        return sub, ModuleMap(sub, m, zeros((m.dim, 0)), check=False)
    chunks = [m.act_elem(r).T for r in i.rows]
    rows = rref(np.concatenate(chunks, axis=0), m.p)[0]
    return submodule(m, rows, close=True)


def radical_of_module(m: Module) -> tuple[Module, ModuleMap]:
    return submodule_multiply(radical(m.algebra), m)


def radical_filtration(m: Module) -> list[Module]:
    """[M, rad M, rad^2 M, ...] down to zero (as abstract modules)."""
    out = [m]
    cur = m
    while cur.dim:
        nxt, _ = radical_of_module(cur)
        if nxt.dim == cur.dim:
            raise InvariantViolation("radical filtration does not descend")
        out.append(nxt)
        cur = nxt
    return out


def cyclic_submodule(m: Module, v: np.ndarray) -> tuple[Module, ModuleMap]:
    return submodule(m, asmod(v, m.p).reshape(1, -1), close=True)


# -- hom spaces -----------------------------------------------------------------


def hom_space(m: Module, n: Module) -> list[ModuleMap]:
    """Basis of Hom(m, n), via weight blocks when idempotents are available."""
    if m.algebra is not n.algebra:
        raise AlgebraMismatch("hom between modules over different algebras")
    alg, p = m.algebra, m.p
    if m.dim == 0 or n.dim == 0:
        return []
    if alg.idempotents is None:
        return _hom_plain(m, n)
    return _hom_blocks(m, n)


def _hom_plain(m: Module, n: Module) -> list[ModuleMap]:
    alg, p = m.algebra, m.p
    dm, dn = m.dim, n.dim
    rows = []
    for g in alg.generators():
        X, Y = m.act_elem(g), n.act_elem(g)
        rows.append((np.kron(eye(dn), X.T) - np.kron(Y, eye(dm))) % p)
    ns = nullspace(np.concatenate(rows, axis=0), p)
    return [ModuleMap(m, n, v.reshape(dn, dm), check=False) for v in ns]


def _weight_transform(m: Module):
    """(T, Tinv, slices): stacked weight bases and per-vertex coordinate slices."""
    alg, p = m.algebra, m.p
    blocks = []
    slices = []
    off = 0
    for e in alg.idempotents:
        w = rref(m.act_elem(e).T, p)[0]
        blocks.append(w)
        slices.append((off, off + w.shape[0]))
        off += w.shape[0]
    T = np.concatenate(blocks, axis=0) if blocks else zeros((0, m.dim))
    if off != m.dim:
        raise InvariantViolation("weight spaces do not span")
    C = linalg.inverse(T.T, p)  # coords: c = C @ v
    return T, C, slices


def _hom_blocks(m: Module, n: Module) -> list[ModuleMap]:
    alg, p = m.algebra, m.p
    Tm, Cm, sm = _weight_transform(m)
    Tn, Cn, sn = _weight_transform(n)
    nv = len(alg.idempotents)
    wm = [b - a for a, b in sm]
    wn = [b - a for a, b in sn]
    # unknown layout: F_i blocks concatenated
    offs = []
    off = 0
    for i in range(nv):
        offs.append(off)
        off += wn[i] * wm[i]
    total = off
    pieces = []
    for g in alg.generators():
        for j, ej in enumerate(alg.idempotents):
            gj = alg.mult(ej, g)
            for i, ei in enumerate(alg.idempotents):
                h = alg.mult(gj, ei)
                if not np.any(h):
                    continue
                Xb = (Cm @ m.act_elem(h) @ Tm.T % p)[sm[j][0] : sm[j][1], sm[i][0] : sm[i][1]]
                Yb = (Cn @ n.act_elem(h) @ Tn.T % p)[sn[j][0] : sn[j][1], sn[i][0] : sn[i][1]]
                rows = zeros((wn[j] * wm[i], total))
                if wn[j] * wm[i] == 0:
                    continue
                if wn[j] and wm[j]:
                    rows[:, offs[j] : offs[j] + wn[j] * wm[j]] = np.kron(eye(wn[j]), Xb.T) % p
                if wn[i] and wm[i]:
                    rows[:, offs[i] : offs[i] + wn[i] * wm[i]] = (
                        rows[:, offs[i] : offs[i] + wn[i] * wm[i]] - np.kron(Yb, eye(wm[i]))
                    ) % p
                pieces.append(rows)
    if not pieces:
        ns = eye(total)
    else:
        ns = nullspace(np.concatenate(pieces, axis=0), p)
    out = []
    TnT = Tn.T
    for v in ns:
        F = zeros((n.dim, m.dim))
        for i in range(nv):
            blk = v[offs[i] : offs[i] + wn[i] * wm[i]].reshape(wn[i], wm[i])
            F[sn[i][0] : sn[i][1], sm[i][0] : sm[i][1]] = blk
        out.append(ModuleMap(m, n, TnT @ F @ Cm % p, check=False))
    return out


# -- projectives, covers, syzygies ----------------------------------------------


@dataclass
class ProjectiveData:
    vertex: int
    projective: Module
    rows: np.ndarray  # basis of A*e_i inside the regular module
    gen_coords: np.ndarray  # coordinates of e_i in that basis
    simple: Module


def projective_data(alg: Algebra) -> list[ProjectiveData]:
    if alg.idempotents is None:
        raise NoIdempotents("algebra has no idempotent set")
    if "projdata" in alg._cache:
        return alg._cache["projdata"]
    reg = regular_module(alg)
    out = []
    for i, e in enumerate(alg.idempotents):
        rows = rref(alg.rmul(e).T, alg.p)[0]  # span of b_k * e
        P, _ = submodule(reg, rows)
        basis = RowBasis(rows, alg.p, reduced=True)
        gen = basis.coords(e)
        if gen is None:
            raise InvariantViolation("idempotent not inside its own projective")
        radrows = _radical_rows(P)
        S, _ = quotient_module(P, radrows)
        out.append(ProjectiveData(i, P, rows, gen, S))
    alg._cache["projdata"] = out
    return out


def _radical_rows(m: Module) -> np.ndarray:
    rad = radical(m.algebra)
    if rad.dim == 0 or m.dim == 0:
        return zeros((0, m.dim))
    chunks = [m.act_elem(r).T for r in rad.rows]
    return rref(np.concatenate(chunks, axis=0), m.p)[0]


def simples_and_projectives(alg: Algebra) -> tuple[list[Module], list[Module]]:
    data = projective_data(alg)
    for d in data:
        if _top_weight_dims(d.simple) != _weight_unit(alg, d.vertex, d.simple):
            raise InvariantViolation("top of P(i) is not S(i)")
    return [d.simple for d in data], [d.projective for d in data]


def _top_weight_dims(s: Module):
    return tuple(linalg.rank(s.act_elem(e), s.p) for e in s.algebra.idempotents)


def _weight_unit(alg, vertex, s):
    dims = [0] * len(alg.idempotents)
    dims[vertex] = s.dim
    return tuple(dims)


def top_of(m: Module) -> tuple[Module, ModuleMap]:
    return quotient_module(m, _radical_rows(m))


def projective_cover(m: Module) -> ModuleMap:
    """Minimal surjection P -> m from a direct sum of the P(i)."""
    alg, p = m.algebra, m.p
    if m.dim == 0:
        z = zero_module(alg)
        zmap = ModuleMap(z, m, zeros((0, 0)), check=False)
        zmap.pieces = []
        return zmap
    data = projective_data(alg)
    top, pi = top_of(m)
    chosen = []  # (vertex index, lifted generator in m)
    span = RowBasis(zeros((0, top.dim)), p)
    for i, e in enumerate(alg.idempotents):
        wt = rref(top.act_elem(e).T, p)[0]
        for w in wt:
            if span.contains_vector(w):
                continue
            v0 = linalg.solve(pi.matrix, w, p)
            v = m.act_elem(e) @ v0 % p
            chosen.append((i, v))
            orbit = np.concatenate([top.act_elem(alg.basis_vector(k)) @ w % p for k in range(alg.dim)]).reshape(alg.dim, top.dim)
            span = RowBasis(np.concatenate([span.rows, orbit], axis=0), p)
    if span.dim != top.dim:
        raise InvariantViolation("top generators do not span")
    pieces = [data[i].projective for i, _ in chosen]
    sd = direct_sum(pieces) if pieces else None
    cols = []
    gens = []
    off = 0
    for i, v in chosen:
        rows = data[i].rows
        block = np.stack([m.act_elem(u) @ v % p for u in rows], axis=1)
        cols.append(block)
        gen = zeros(sum(pc.dim for pc in pieces))
        gen[off : off + data[i].projective.dim] = data[i].gen_coords
        gens.append((i, gen))
        off += data[i].projective.dim
    matrix = np.concatenate(cols, axis=1) if cols else zeros((m.dim, 0))
    cover = ModuleMap(sd.module, m, matrix, check=False)
    cover.pieces = gens  # (vertex, generator coords in the summed projective)
    if not cover.is_surjective():
        raise InvariantViolation("cover is not surjective")
    return cover


def syzygy_step(m: Module) -> tuple[Module, ModuleMap, ModuleMap]:
    """(Omega(m), inclusion into P, cover P -> m), all minimal."""
    cover = projective_cover(m)
    ker = cover.kernel_rows()
    sub, incl = submodule(cover.src, ker)
    return sub, incl, cover


def lift_against_cover(cover: ModuleMap, g: ModuleMap) -> ModuleMap:
    """sigma: P -> Y with g o sigma = cover, for a surjection g: Y -> Z.

    P must come from projective_cover (carries its generator pieces); the
    lift sends each generator to a weight-corrected preimage.
    """
    if g.dst.dim != cover.dst.dim:
        raise NotComposable("cover and surjection target different modules")
    P, Y = cover.src, g.src
    alg, p = P.algebra, P.p
    data = projective_data(alg)
    matrix = zeros((Y.dim, P.dim))
    off = 0
    for vertex, gen in cover.pieces:
        rhs = cover.matrix @ gen % p
        y0 = linalg.solve(g.matrix, rhs, p)
        if y0 is None:
            raise InvariantViolation("lift target is not surjective onto the cover image")
        y = Y.act_elem(alg.idempotents[vertex]) @ y0 % p
        rows = data[vertex].rows
        block = np.stack([Y.act_elem(u) @ y % p for u in rows], axis=1)
        matrix[:, off : off + rows.shape[0]] = block
        off += rows.shape[0]
    sigma = ModuleMap(P, Y, matrix, check=False)
    if not np.array_equal(matmul(g.matrix, sigma.matrix, p), cover.matrix):
        raise InvariantViolation("lift does not factor the cover")
    return sigma


def preimage_map(f: ModuleMap, h: ModuleMap) -> ModuleMap:
    """u with f o u = h, for injective f whose image contains im(h)."""
    cols = []
    for j in range(h.src.dim):
        sol = linalg.solve(f.matrix, h.matrix[:, j], f.p)
        if sol is None:
            raise InvariantViolation("preimage does not exist")
        cols.append(sol)
    mat = np.stack(cols, axis=1) if cols else zeros((f.src.dim, 0))
    return ModuleMap(h.src, f.src, mat, check=False)


def is_projective(m: Module) -> bool:
    if m.dim == 0:
        return True
    return projective_cover(m).src.dim == m.dim


# -- loewy series -----------------------------------------------------------------


def loewy_series(m: Module) -> list[list[int]]:
    """Radical layers as simple-multiplicity vectors, top layer first."""
    alg = m.algebra
    if alg.idempotents is None:
        raise NoIdempotents("loewy series needs idempotents")
    data = projective_data(alg)
    sdims = [max(linalg.rank(d.simple.act_elem(alg.idempotents[d.vertex]), m.p), 1) for d in data]
    filt = radical_filtration(m)
    out = []
    for upper, lower in zip(filt, filt[1:]):
        # layer dims: weight dims of upper minus those of lower
        vec = []
        for i, e in enumerate(alg.idempotents):
            du = linalg.rank(upper.act_elem(e), m.p)
            dl = linalg.rank(lower.act_elem(e), m.p)
            q, r = divmod(du - dl, sdims[i])
            if r:
                raise InvariantViolation("layer dimension not divisible by End(S)")
            vec.append(q)
        out.append(vec)
    return out


# -- restriction / induction / tensor ----------------------------------------------


def restrict(emb: AlgebraEmbedding, m: Module) -> Module:
    """View a codomain module as a domain module along the embedding."""
    if m.algebra is not emb.codomain:
        raise AlgebraMismatch("module is not over the embedding codomain")
    stack = np.stack([m.act_elem(emb.images[i]) for i in range(emb.domain.dim)]) if m.dim else zeros((emb.domain.dim, 0, 0))
    return Module(emb.domain, stack, check="none")


def restrict_map(emb: AlgebraEmbedding, f: ModuleMap, rsrc: Module, rdst: Module) -> ModuleMap:
    return ModuleMap(rsrc, rdst, f.matrix, check=False)


@dataclass
class Induced:
    """A tensor-up A (x)_B x with its bookkeeping maps."""

    module: Module  # over A
    proj: np.ndarray  # (q, dimA*dimx): quotient of the plain tensor square
    lift: np.ndarray
    unit: ModuleMap  # x -> restrict(emb, module)
    restricted: Module


def induce(emb: AlgebraEmbedding, x: Module) -> Induced:
    """A (x)_B x as a left A-module, with the canonical unit map."""
    if x.algebra is not emb.domain:
        raise AlgebraMismatch("module is not over the embedding domain")
    A, B, p = emb.codomain, emb.domain, emb.codomain.p
    dA, dx = A.dim, x.dim
    V = dA * dx
    if dx == 0:
        zm = zero_module(A)
        rz = restrict(emb, zm)
        return Induced(zm, zeros((0, 0)), zeros((0, 0)), ModuleMap(x, rz, zeros((0, 0)), check=False), rz)
    rel = []
    for g in B.generators():
        Xg = x.act_elem(g)
        phig = emb.apply(g)
        for a in range(dA):
            c = A.mult(A.basis_vector(a), phig)
            m1 = np.kron(c.reshape(1, dA), eye(dx)).reshape(dx, V)
            m2 = zeros((dx, V))
            m2[:, a * dx : (a + 1) * dx] = Xg.T
            rel.append((m1 - m2) % p)
    relm = np.concatenate(rel, axis=0) if rel else zeros((0, V))
    basis = RowBasis(relm, p)
    pivots = basis.pivots
    kept = [j for j in range(V) if j not in pivots]
    q = len(kept)
    proj = zeros((q, V))
    for r, j in enumerate(kept):
        proj[r, j] = 1
    for i, pc in enumerate(pivots):
        for r, j in enumerate(kept):
            proj[r, pc] = (-basis.rows[i, j]) % p
    lift = zeros((V, q))
    for r, j in enumerate(kept):
        lift[j, r] = 1
    action = zeros((A.dim, q, q))
    for k in range(A.dim):
        action[k] = proj @ np.kron(A.lmul(A.basis_vector(k)), eye(dx)) @ lift % p
    mod = Module(A, action, check="none")
    umat = proj @ np.kron(A.unit.reshape(dA, 1), eye(dx)) % p
    restr = restrict(emb, mod)
    unit = ModuleMap(x, restr, umat, check=False)
    return Induced(mod, proj, lift, unit, restr)


def induce_map(emb: AlgebraEmbedding, f: ModuleMap, ix: Induced, iy: Induced) -> ModuleMap:
    """A (x)_B f between already-induced modules."""
    dA = emb.codomain.dim
    big = np.kron(eye(dA), f.matrix)
    return ModuleMap(ix.module, iy.module, iy.proj @ big @ ix.lift % emb.codomain.p, check=False)


def tensor_dim_right(rm: Module, x: Module) -> int:
    """dim of M (x)_B x for a right module M given over B^op."""
    return _tensor_right_data(rm, x)[0]


def _tensor_right_data(rm: Module, x: Module):
    """(dim, proj, lift) for M (x)_B x; rm is a module over B^op."""
    p = x.p
    B = x.algebra
    dm, dx = rm.dim, x.dim
    V = dm * dx
    if V == 0:
        return 0, zeros((0, 0)), zeros((0, 0))
    rel = []
    for g in B.generators():
        Xg = x.act_elem(g)
        Mg = rm.act_elem(g)  # right action of g on M
        for mu in range(dm):
            mg = Mg[:, mu]
            m1 = np.kron(mg.reshape(1, dm), eye(dx)).reshape(dx, V)
            m2 = zeros((dx, V))
            m2[:, mu * dx : (mu + 1) * dx] = Xg.T
            rel.append((m1 - m2) % p)
    relm = np.concatenate(rel, axis=0)
    basis = RowBasis(relm, p)
    pivots = basis.pivots
    kept = [j for j in range(V) if j not in pivots]
    q = len(kept)
    proj = zeros((q, V))
    for r, j in enumerate(kept):
        proj[r, j] = 1
    for i, pc in enumerate(pivots):
        for r, j in enumerate(kept):
            proj[r, pc] = (-basis.rows[i, j]) % p
    lift = zeros((V, q))
    for r, j in enumerate(kept):
        lift[j, r] = 1
    return q, proj, lift


def tensor_right_map(rm: Module, f: ModuleMap, dx_src_data, dx_dst_data) -> np.ndarray:
    """Matrix of id_M (x) f between tensored spaces."""
    _, proj_d, _ = dx_dst_data
    _, _, lift_s = dx_src_data
    big = np.kron(eye(rm.dim), f.matrix)
    return proj_d @ big @ lift_s % rm.p


# -- exactness ---------------------------------------------------------------------


@dataclass
class ExactSeq:
    """A chain of composable maps claimed exact at the inner joints."""

    maps: list[ModuleMap]

    @classmethod
    def ses(cls, f: ModuleMap, g: ModuleMap) -> "ExactSeq":
        """0 -> src(f) -> mid -> dst(g) -> 0 with explicit zero ends."""
        z1 = zero_module(f.src.algebra)
        z2 = zero_module(f.src.algebra)
        lead = ModuleMap(z1, f.src, zeros((f.src.dim, 0)), check=False)
        tail = ModuleMap(g.dst, z2, zeros((0, g.dst.dim)), check=False)
        return cls([lead, f, g, tail])


def verify_exact(seq: ExactSeq) -> tuple[bool, int | None]:
    """Rank checks at every inner joint; returns (ok, failing position)."""
    maps = seq.maps
    for a, b in zip(maps, maps[1:]):
        if a.dst is not b.src:
            raise NotComposable("consecutive maps do not compose")
    p = maps[0].p
    for k in range(len(maps) - 1):
        f, g = maps[k], maps[k + 1]
        im = f.image_rows()
        ker = g.kernel_rows()
        if im.shape[0] != ker.shape[0] or not np.array_equal(im, ker):
            return False, k
    return True, None


# -- projective dimension -----------------------------------------------------------


@dataclass
class PdResult:
    """Certified projective dimension.

    infinite results carry a cycle certificate: cycle_kind "module" means the
    whole minimal syzygy recurs (Omega^a = Omega^{a+t} up to iso, witness is
    that iso); cycle_kind "class" means an indecomposable summand X of
    Omega^preperiod recurs as a summand of Omega^period(X), which already
    forces the minimal resolution to live forever.
    """

    kind: str  # "finite" | "infinite" | "unknown"
    value: int | None = None  # pd when finite
    preperiod: int | None = None
    period: int | None = None
    cycle_kind: str | None = None  # "module" | "class"
    witness: ModuleMap | None = None
    cycle_classes: tuple[int, ...] | None = None
    cutoff: int | None = None

    def is_finite(self) -> bool:
        return self.kind == "finite"

    def label(self) -> str:
        if self.kind == "finite":
            return f"finite:{self.value}"
        if self.kind == "infinite":
            return f"infinite:{self.cycle_kind}-cycle({self.preperiod},{self.period})"
        return f"unknown:{self.cutoff}"


def projective_dimension(session, m: Module, cutoff: int | None = None) -> PdResult:
    """pd with certificates, computed on the syzygy digraph of iso-classes."""
    return session.pd(m, cutoff)


def global_dimension(session, alg: Algebra, cutoff: int | None = None):
    """Max pd over the simples: PdResult-style aggregate."""
    simples, _ = simples_and_projectives(alg)
    worst = 0
    unknown = None
    for s in simples:
        r = projective_dimension(session, s, cutoff)
        if r.kind == "infinite":
            return r
        if r.kind == "unknown":
            unknown = r
        else:
            worst = max(worst, r.value)
    if unknown is not None:
        return unknown
    return PdResult("finite", value=worst)


def tor_dim(session, rightmod: Module, x: Module, degree: int) -> int:
    """dim Tor_degree^B(M, x) from the minimal resolution of x."""
    import numpy as _np

    if degree == 0:
        return tensor_dim_right(rightmod, x)
    terms, diffs = session.resolution(x, degree + 1)
    # terms[i] = P_i; diffs[i]: P_i -> P_{i-1} (diffs[0]: P_0 -> x)
    data = [_tensor_right_data(rightmod, t) for t in terms]
    t_deg = data[degree][0]
    rank_d = 0
    if degree < len(diffs):
        mat = tensor_right_map(rightmod, diffs[degree], data[degree], data[degree - 1])
        rank_d = linalg.rank(mat, x.p)
    rank_d1 = 0
    if degree + 1 < len(terms):
        mat1 = tensor_right_map(rightmod, diffs[degree + 1], data[degree + 1], data[degree])
        rank_d1 = linalg.rank(mat1, x.p)
    return t_deg - rank_d - rank_d1


# -- syzygy shifting (horseshoe-free) ------------------------------------------


def projective_complement(session, big: Module, part: Module):
    """(P, iso) with big = part + P in iso classes and P projective.

    Raises if the class multiset difference contains a non-projective class.
    """
    db = session.decompose(big)
    dp = session.decompose(part)
    diff = dict(db.class_multiset())
    for cid, mult in dp.class_multiset().items():
        if diff.get(cid, 0) < mult:
            raise InvariantViolation("expected summand is missing")
        diff[cid] -= mult
    reps = []
    for cid, mult in sorted(diff.items()):
        if mult == 0:
            continue
        if not session.registry.classes[cid].is_projective:
            raise InvariantViolation("complement has a non-projective class")
        reps.extend([session.registry.classes[cid].representative] * mult)
    target = direct_sum([part] + reps).module
    comp = direct_sum(reps).module if reps else zero_module(big.algebra)
    ok, wit = session.is_isomorphic(big, target)
    if not ok:
        raise InvariantViolation("complement reassembly failed the iso test")
    return comp, wit


def first_shift(session, f: ModuleMap, g: ModuleMap):
    """0 -> Omega(Z) -> X + P_Z -> Y -> 0 from a SES 0 -> X -> Y -> Z -> 0."""
    X, Y, Z = f.src, f.dst, g.dst
    omz, incl_z, cover_z = session.syzygy_step(Z)
    sigma = lift_against_cover(cover_z, g) if Z.dim else ModuleMap.zero(cover_z.src, Y)
    sd = direct_sum([X, cover_z.src])
    mid = sd.module
    onto = ModuleMap(mid, Y, np.concatenate([f.matrix, sigma.matrix], axis=1), check=False)
    # kernel element for q in Omega(Z): (-f^{-1}(sigma q), q)
    sig_on_ker = incl_z.then(sigma)
    neg = ModuleMap(omz, Y, (-sig_on_ker.matrix) % f.p, check=False)
    back = preimage_map(f, neg)
    into = ModuleMap(
        omz, mid, np.concatenate([back.matrix, incl_z.matrix], axis=0), check=False
    )
    seq = ExactSeq.ses(into, onto)
    ok, pos = verify_exact(seq)
    if not ok:
        raise InvariantViolation(f"first shifting not exact at {pos}")
    return seq, sd


def second_shift(session, f: ModuleMap, g: ModuleMap):
    """0 -> Omega(Y) -> Omega(Z) + P' -> X -> 0, plus the concrete kernel form.

    Returns (seq, pprime, kernel_seq) where kernel_seq has middle ker(theta)
    and seq is the transported sequence with the literal direct sum middle.
    """
    X, Y, Z = f.src, f.dst, g.dst
    omy, incl_y, cover_y = session.syzygy_step(Y)
    theta = cover_y.then(g)
    K, inclK = submodule(cover_y.src, theta.kernel_rows())
    kb = RowBasis(inclK.matrix.T, f.p, reduced=False)
    omy_in_k = kb.coords_matrix(incl_y.matrix.T)
    if omy_in_k is None:
        raise InvariantViolation("Omega(Y) escaped ker(theta)")
    left = ModuleMap(omy, K, omy_in_k.T, check=False)
    right = preimage_map(f, inclK.then(cover_y))
    kernel_seq = ExactSeq.ses(left, right)
    ok, pos = verify_exact(kernel_seq)
    if not ok:
        raise InvariantViolation(f"second shifting kernel form not exact at {pos}")
    omz, _, _ = session.syzygy_step(Z)
    pprime, wit = projective_complement(session, K, omz)
    transported_mid = wit.dst
    seq = ExactSeq.ses(left.then(wit), wit.inverse().then(right))
    ok, pos = verify_exact(seq)
    if not ok:
        raise InvariantViolation(f"second shifting not exact at {pos}")
    return seq, pprime, kernel_seq


def syzygy_of_ses(session, f: ModuleMap, g: ModuleMap):
    """0 -> Omega(X) -> K -> Omega(Z) -> 0 with K = Omega(Y) + projective.

    Returns (seq, mid_complement) where seq's middle is the concrete kernel.
    """
    X, Y, Z = f.src, f.dst, g.dst
    omx, incl_x, cover_x = session.syzygy_step(X)
    omz, incl_z, cover_z = session.syzygy_step(Z)
    sigma = lift_against_cover(cover_z, g) if Z.dim else ModuleMap.zero(cover_z.src, Y)
    sd = direct_sum([cover_x.src, cover_z.src])
    cmap = ModuleMap(
        sd.module,
        Y,
        np.concatenate([matmul(f.matrix, cover_x.matrix, f.p), sigma.matrix], axis=1),
        check=False,
    )
    if not cmap.is_surjective():
        raise InvariantViolation("horseshoe map is not surjective")
    K, inclK = submodule(sd.module, cmap.kernel_rows())
    intoK_rows = np.concatenate([incl_x.matrix, zeros((cover_z.src.dim, omx.dim))], axis=0)
    kb = RowBasis(inclK.matrix.T, f.p)
    cs = kb.coords_matrix(intoK_rows.T)
    if cs is None:
        raise InvariantViolation("Omega(X) escaped the horseshoe kernel")
    left = ModuleMap(omx, K, cs.T, check=False)
    proj_z = sd.projections[1]
    right_full = inclK.then(proj_z)
    # image lies inside Omega(Z): re-coordinate
    zb = RowBasis(incl_z.matrix.T, f.p)
    cz = zb.coords_matrix(right_full.matrix.T)
    if cz is None:
        raise InvariantViolation("horseshoe projection escaped Omega(Z)")
    right = ModuleMap(K, omz, cz.T, check=False)
    seq = ExactSeq.ses(left, right)
    ok, pos = verify_exact(seq)
    if not ok:
        raise InvariantViolation(f"syzygy of sequence not exact at {pos}")
    omy, _, _ = session.syzygy_step(Y)
    comp, _ = projective_complement(session, K, omy)
    return seq, comp


def ses_syzygy_iterate(session, f: ModuleMap, g: ModuleMap, n: int):
    """Apply syzygy_of_ses n times; returns the final (seq, complements)."""
    seq = ExactSeq.ses(f, g)
    comps = []
    for _ in range(n):
        inner_f, inner_g = seq.maps[1], seq.maps[2]
        seq, comp = syzygy_of_ses(session, inner_f, inner_g)
        comps.append(comp)
    return seq, comps


def right_module_of_A(emb: AlgebraEmbedding):
    """A as a right B-module, encoded over B^op via the opposite embedding."""
    from .algebra import opposite

    emb_op = emb.opposite()
    return restrict(emb_op, regular_module(emb_op.codomain))


def quotient_bimodule_A_over_B(emb: AlgebraEmbedding):
    """(A/B) as a right B-module (over B^op), with the quotient map data."""
    a_right = right_module_of_A(emb)
    rows = emb.images  # the copy of B inside A
    quot, proj = quotient_module(a_right, rows)
    return quot, proj


def tor_vanishing_bound(session, emb: AlgebraEmbedding, cutoff: int | None = None):
    """A certified bound n on the vanishing of Tor^B(A_B, -).

    pd(A_B) when finite; the cycle preperiod when the resolution of A_B is
    eventually periodic; None (unknown) otherwise.
    """
    a_right = right_module_of_A(emb)
    res = session.pd(a_right, cutoff)
    if res.kind == "finite":
        return res.value, res
    if res.kind == "infinite":
        return res.preperiod, res
    return None, res
