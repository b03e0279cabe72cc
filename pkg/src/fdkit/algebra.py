"""Finite-dimensional associative algebras over F_p.

An Algebra is a basis plus structure constants: sc[i, j, k] is the
coefficient of b_k in b_i * b_j.  For bound quiver algebras the basis
consists of irreducible paths.  Path notation is read left to right
("p*q" traverses p, then q) while the internal product composes the other
way round, so that left modules carry the usual representation shape:
an arrow a: i -> j acts from the weight space of vertex i to that of
vertex j, and A*e_i is spanned by the paths starting at i.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    AmbientMismatch,
    FieldTooSmall,
    InhomogeneousRelation,
    InvariantViolation,
    NonComposablePath,
    NotAdmissible,
    NotAnIdeal,
    NotFiniteDimensional,
    RadicalCubeNonzero,
)
from .linalg import RowBasis, asmod, eye, matmul, nullspace, rref, zeros

DEFAULT_PRIME = 32003


@dataclass(frozen=True)
class FieldContext:
    """Prime field F_p; p must stay above every algebra dimension used."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
            raise InvariantViolation(f"{self.p} is not prime")


@dataclass(frozen=True)
class Quiver:
    vertex_count: int
    arrows: tuple  # of (name, source, target), vertices 1-based

    def __post_init__(self):
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise InvariantViolation("arrow names must be unique")
        for name, s, t in self.arrows:
            if not (1 <= s <= self.vertex_count and 1 <= t <= self.vertex_count):
                raise InvariantViolation(f"arrow {name}: vertex out of range")

    def arrow_index(self, name: str) -> int:
        for i, a in enumerate(self.arrows):
            if a[0] == name:
                return i
        raise InvariantViolation(f"unknown arrow {name!r}")


@dataclass(frozen=True)
class Presentation:
    """Bound quiver data: relations are lists of (coeff, path-as-arrow-names)."""

    quiver: Quiver
    relations: tuple = ()
    length_cap: int = 30


class PresData:
    """Side table for presentation-born algebras: words, lengths, grading."""

    def __init__(self, quiver, words, sources, targets):
        self.quiver = quiver
        self.words = words  # tuple of arrow-index tuples; trivial path = ()
        self.sources = sources
        self.targets = targets
        self.lengths = [len(w) for w in words]


class Algebra:
    """Associative unital algebra given by structure constants over F_p."""

    def __init__(
        self,
        field: FieldContext,
        sc: np.ndarray,
        unit: np.ndarray,
        basis_labels=None,
        idempotents=None,
        origin: str = "constructed",
        pres: PresData | None = None,
        check: bool = True,
    ):
        self.field = field
        self.p = field.p
        self.sc = asmod(sc, self.p)
        self.dim = self.sc.shape[0]
        self.unit = asmod(unit, self.p)
        self.basis_labels = list(basis_labels) if basis_labels else [f"b{i}" for i in range(self.dim)]
        self.idempotents = None if idempotents is None else [asmod(e, self.p) for e in idempotents]
        self.origin = origin
        self.pres = pres
        self._gens = None
        self._radical = None
        self._hash = None
        self._cache = {}  # scratch for modules.py (projectives, simples, ...)
        if self.p <= self.dim:
            raise FieldTooSmall(f"p={self.p} must exceed dim={self.dim}")
        if check:
            self._check_axioms()

    # -- basic arithmetic ---------------------------------------------------

    def mult(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        m = np.tensordot(asmod(x, self.p), self.sc, axes=([0], [0]))  # (j, k)
        return (asmod(y, self.p) @ m) % self.p

    def lmul(self, x: np.ndarray) -> np.ndarray:
        """Matrix of v -> x*v (columns indexed by basis)."""
        m = np.tensordot(asmod(x, self.p), self.sc, axes=([0], [0]))
        return m.T % self.p

    def rmul(self, y: np.ndarray) -> np.ndarray:
        """Matrix of v -> v*y."""
        m = np.tensordot(self.sc, asmod(y, self.p), axes=([1], [0]))  # (i, k)
        return m.T % self.p

    def lmul_table(self) -> np.ndarray:
        """Stack L[i] = lmul(b_i), the left regular representation."""
        key = "lmul_table"
        if key not in self._cache:
            self._cache[key] = np.ascontiguousarray(np.transpose(self.sc, (0, 2, 1)))
        return self._cache[key]

    def power_of(self, x: np.ndarray, n: int) -> np.ndarray:
        out = self.unit.copy()
        for _ in range(n):
            out = self.mult(out, x)
        return out

    # -- invariants ----------------------------------------------------------

    def _check_axioms(self):
        d, p, sc = self.dim, self.p, self.sc
        if not np.array_equal(self.lmul(self.unit), eye(d)):
            raise InvariantViolation("unit fails on the left")
        if not np.array_equal(self.rmul(self.unit), eye(d)):
            raise InvariantViolation("unit fails on the right")
        for i in range(d):
            lhs = np.tensordot(sc[i], sc, axes=([1], [0])) % p  # (b_i b_j) b_k
            rhs = np.tensordot(sc, sc[i], axes=([2], [0])) % p  # b_i (b_j b_k)
            if not np.array_equal(lhs, rhs):
                raise InvariantViolation(f"associativity fails at basis index {i}")
        if self.idempotents is not None:
            self._check_idempotents()

    def _check_idempotents(self):
        es = self.idempotents
        total = zeros(self.dim)
        for a, e in enumerate(es):
            if not np.array_equal(self.mult(e, e), e):
                raise InvariantViolation(f"idempotent {a} is not idempotent")
            total = (total + e) % self.p
            for b, f in enumerate(es):
                if a != b and np.any(self.mult(e, f)):
                    raise InvariantViolation(f"idempotents {a},{b} not orthogonal")
        if not np.array_equal(total, self.unit):
            raise InvariantViolation("idempotents do not sum to the unit")

    # -- derived data ---------------------------------------------------------

    def generators(self) -> list[np.ndarray]:
        """Small generating set (greedy), always starting with the unit."""
        if self._gens is not None:
            return self._gens
        gens: list[np.ndarray] = []
        span = RowBasis(self.unit.reshape(1, -1), self.p)
        for i in range(self.dim):
            v = zeros(self.dim)
            v[i] = 1
            if span.contains_vector(v):
                continue
            gens.append(v)
            span = self._close_under(span, gens)
        if span.dim != self.dim:
            raise InvariantViolation("generator closure incomplete")
        self._gens = gens
        return gens

    def _close_under(self, span: RowBasis, gens) -> RowBasis:
        rows = span.rows
        if rows.shape[0] == 0:
            rows = self.unit.reshape(1, -1)
        while True:
            new = [rows]
            for g in gens:
                new.append(matmul(rows, self.lmul(g).T, self.p))  # g * row
                new.append(matmul(rows, self.rmul(g).T, self.p))  # row * g
            new.append(np.array([g for g in gens]))
            merged = RowBasis(np.concatenate(new, axis=0), self.p)
            if merged.dim == RowBasis(rows, self.p).dim:
                return merged
            rows = merged.rows

    def content_hash(self) -> str:
        if self._hash is None:
            h = hashlib.sha256()
            h.update(str(self.p).encode())
            h.update(self.sc.tobytes())
            h.update(self.unit.tobytes())
            if self.idempotents is not None:
                for e in self.idempotents:
                    h.update(e.tobytes())
            self._hash = h.hexdigest()
        return self._hash

    def basis_vector(self, i: int) -> np.ndarray:
        v = zeros(self.dim)
        v[i] = 1
        return v

    def __repr__(self):
        return f"Algebra(dim={self.dim}, p={self.p}, origin={self.origin!r})"


# -- subspaces ---------------------------------------------------------------


class Subspace:
    """Canonical (rref) subspace of an algebra's underlying vector space."""

    def __init__(self, ambient: Algebra, rows: np.ndarray):
        self.ambient = ambient
        if rows is None or rows.size == 0:
            rows = zeros((0, ambient.dim))
        self.basis = RowBasis(rows, ambient.p)

    @classmethod
    def zero(cls, ambient: Algebra) -> "Subspace":
        return cls(ambient, zeros((0, ambient.dim)))

    @classmethod
    def full(cls, ambient: Algebra) -> "Subspace":
        return cls(ambient, eye(ambient.dim))

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def rows(self) -> np.ndarray:
        return self.basis.rows

    def contains(self, other: "Subspace") -> bool:
        self._same(other)
        return self.basis.contains_rows(other.rows)

    def contains_vector(self, v) -> bool:
        return self.basis.contains_vector(v)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient is other.ambient
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((id(self.ambient), self.basis))

    def add(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return Subspace(self.ambient, np.concatenate([self.rows, other.rows], axis=0))

    def intersect(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return Subspace(
            self.ambient,
            linalg.intersect_rowspaces(self.rows, other.rows, self.ambient.p),
        )

    def _same(self, other: "Subspace"):
        if self.ambient is not other.ambient:
            raise AmbientMismatch("subspaces live in different algebras")

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.ambient.dim})"


def subspace_product(u: Subspace, v: Subspace) -> Subspace:
    """Span of all pairwise products u_i * v_j."""
    if u.ambient is not v.ambient:
        raise AmbientMismatch("subspace product needs one ambient algebra")
    amb = u.ambient
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(amb)
    chunks = []
    for x in u.rows:
        chunks.append(matmul(v.rows, amb.lmul(x).T, amb.p))  # rows x*v_j
    return Subspace(amb, np.concatenate(chunks, axis=0))


def subspace_power(s: Subspace, n: int) -> Subspace:
    """s^n with s^0 = the full algebra (rad^0(B) = B convention)."""
    out = Subspace.full(s.ambient)
    for _ in range(n):
        out = subspace_product(out, s)
    return out


@dataclass
class IdealCheck:
    is_ideal: bool
    side: str
    witness: tuple | None = None  # (a, x, a*x or x*a) outside the subspace


def check_sided_ideal(amb: Algebra, s: Subspace, side: str) -> IdealCheck:
    """Is s a left/right/two-sided ideal of amb?  Witness on failure."""
    if s.ambient is not amb:
        raise AmbientMismatch("subspace not in the given algebra")
    if side not in ("left", "right", "two-sided"):
        raise ValueError(f"bad side {side!r}")
    sides = ["left", "right"] if side == "two-sided" else [side]
    for sd in sides:
        for x in s.rows:
            prods = amb.lmul(x).T if sd == "left" else amb.rmul(x).T
            # row i of prods is b_i*x (left) or x*b_i (right)
            cs = s.basis.coords_matrix(prods)
            if cs is None:
                for i in range(amb.dim):
                    if not s.contains_vector(prods[i]):
                        return IdealCheck(False, sd, (amb.basis_vector(i), x, prods[i]))
    return IdealCheck(True, side)


def opposite(alg: Algebra) -> Algebra:
    """Same basis, reversed multiplication."""
    return Algebra(
        alg.field,
        np.transpose(alg.sc, (1, 0, 2)).copy(),
        alg.unit,
        basis_labels=alg.basis_labels,
        idempotents=alg.idempotents,
        origin="opposite",
        check=False,
    )


# -- bound quiver construction -----------------------------------------------


def _validate_relation(quiver: Quiver, rel):
    """Return (term_length, [(coeff, arrow-index word)]) for one relation."""
    if not rel:
        raise NotAdmissible("empty relation")
    terms = []
    lengths = set()
    endpoints = set()
    for coeff, path in rel:
        idxs = tuple(quiver.arrow_index(n) for n in path)
        if len(idxs) < 2:
            raise NotAdmissible(f"relation term {path} has length < 2")
        for a, b in zip(idxs, idxs[1:]):
            if quiver.arrows[a][2] != quiver.arrows[b][1]:
                raise NonComposablePath(f"path {path} is not composable")
        lengths.add(len(idxs))
        endpoints.add((quiver.arrows[idxs[0]][1], quiver.arrows[idxs[-1]][2]))
        terms.append((coeff, idxs))
    if len(lengths) > 1:
        raise InhomogeneousRelation("relation mixes term lengths; ledgered limitation")
    if len(endpoints) > 1:
        raise NonComposablePath("relation terms are not parallel paths")
    return lengths.pop(), terms


class _PathReducer:
    """Layer-by-layer basis of a bound quiver algebra.

    Words are tuples of arrow indices in traversal order.  Per layer we keep
    the surviving words and, for every candidate word, its expression over the
    survivors.  reduce() rewrites an arbitrary word into survivor coordinates.
    """

    def __init__(self, quiver: Quiver, rel_by_len, length_cap: int, p: int):
        self.q = quiver
        self.p = p
        self.src = {i: a[1] for i, a in enumerate(quiver.arrows)}
        self.tgt = {i: a[2] for i, a in enumerate(quiver.arrows)}
        self.survivors = {1: [(i,) for i in range(len(quiver.arrows))]}
        if 1 in rel_by_len:  # cannot happen (admissible), be defensive
            raise NotAdmissible("length-1 relation")
        self.expr = {}  # word -> coords over survivors of its length
        self.cand_index = {}
        self._memo = {}
        self.max_len = 1
        if not quiver.arrows:
            self.survivors[1] = []
        ell = 2
        while self.survivors.get(ell - 1):
            if ell > length_cap:
                raise NotFiniteDimensional(
                    f"paths still alive at length {length_cap}; raise length_cap "
                    "or fix the relations"
                )
            self._build_layer(ell, rel_by_len.get(ell, []))
            self.max_len = ell
            ell += 1
        self.rel_leftovers = [l for l in rel_by_len if l > self.max_len]
        # relations entirely beyond the last live layer are vacuous

    def word_ok(self, w) -> bool:
        return all(self.tgt[a] == self.src[b] for a, b in zip(w, w[1:]))

    def _build_layer(self, ell: int, relations):
        prev = self.survivors[ell - 1]
        cands = []
        for s in prev:
            for a in range(len(self.q.arrows)):
                if self.tgt[s[-1]] == self.src[a]:
                    cands.append(s + (a,))
        index = {w: i for i, w in enumerate(cands)}
        self.cand_index[ell] = index
        vectors = []
        # direct relations of this length
        for _, terms in relations:
            v = zeros(len(cands))
            for coeff, word in terms:
                cv = self._cand_coords(word, index, ell)
                v = (v + coeff * cv) % self.p
            vectors.append(v)
        # left extensions of the previous layer's ideal
        for row, words in self._prev_ideal(ell - 1):
            for a in range(len(self.q.arrows)):
                v = zeros(len(cands))
                hit = False
                for coeff, w in zip(row, words):
                    if coeff == 0:
                        continue
                    new = (a,) + w
                    if self.src[w[0]] != self.tgt[a]:
                        continue
                    cv = self._cand_coords(new, index, ell)
                    if np.any(cv):
                        hit = True
                    v = (v + int(coeff) * cv) % self.p
                if hit and np.any(v):
                    vectors.append(v)
        mat = np.array(vectors, dtype=np.int64) if vectors else zeros((0, len(cands)))
        red, pivots = rref(mat, self.p)
        dead = set(pivots)
        survivors = [w for i, w in enumerate(cands) if i not in dead]
        spos = {w: j for j, w in enumerate(survivors)}
        for w in survivors:
            e = zeros(len(survivors))
            e[spos[w]] = 1
            self.expr[w] = e
        for r, pc in zip(red, pivots):
            e = zeros(len(survivors))
            for j in range(len(cands)):
                if j != pc and r[j]:
                    e[spos[cands[j]]] = (-int(r[j])) % self.p
            self.expr[cands[pc]] = e
        self.survivors[ell] = survivors
        if not hasattr(self, "ideal_store"):
            self.ideal_store = {}
        self.ideal_store[ell] = (red, cands)

    def _prev_ideal(self, ell):
        store = getattr(self, "ideal_store", {})
        if ell not in store:
            return []
        red, cands = store[ell]
        return [(row, cands) for row in red]

    def _cand_coords(self, word, index, ell):
        """Coordinates of a length-ell word over this layer's candidates."""
        out = zeros(len(index))
        prefix = word[:-1]
        a = word[-1]
        pc = self.reduce(prefix)
        if pc is None:
            return out
        for coeff, s in zip(pc, self.survivors[len(prefix)]):
            if coeff == 0:
                continue
            if self.tgt[s[-1]] != self.src[a]:
                continue
            out[index[s + (a,)]] = (out[index[s + (a,)]] + int(coeff)) % self.p
        return out

    def reduce(self, word):
        """Coords of a word over the survivors of its length (None if len 0)."""
        if len(word) == 0:
            return None
        if not self.word_ok(word):
            return zeros(len(self.survivors.get(len(word), [])))
        if word in self._memo:
            return self._memo[word]
        ell = len(word)
        survivors = self.survivors.get(ell, [])
        out = zeros(len(survivors))
        if ell == 1:
            out[survivors.index(word)] = 1
        elif word in self.expr:
            out = self.expr[word]
        else:
            prefix = word[:-1]
            a = word[-1]
            pc = self.reduce(prefix)
            for coeff, s in zip(pc, self.survivors.get(len(prefix), [])):
                if coeff == 0:
                    continue
                if self.tgt[s[-1]] != self.src[a]:
                    continue
                ext = s + (a,)
                e = self.expr.get(ext)
                if e is None:  # beyond the last built layer: everything dies
                    continue
                out = (out + int(coeff) * e) % self.p
        self._memo[word] = out
        return out


def build_algebra(pres: Presentation, field: FieldContext | None = None) -> Algebra:
    """Bound quiver algebra kQ/I with basis the irreducible paths."""
    field = field or FieldContext()
    q = pres.quiver
    rel_by_len: dict[int, list] = {}
    for rel in pres.relations:
        ell, terms = _validate_relation(q, rel)
        rel_by_len.setdefault(ell, []).append((ell, terms))
    red = _PathReducer(q, rel_by_len, pres.length_cap, field.p)

    words = [()] * q.vertex_count
    sources = list(range(1, q.vertex_count + 1))
    targets = list(range(1, q.vertex_count + 1))
    labels = [f"e{v}" for v in range(1, q.vertex_count + 1)]
    offset = {0: 0}
    for ell in range(1, red.max_len + 1):
        offset[ell] = len(words)
        for w in red.survivors.get(ell, []):
            words.append(w)
            sources.append(red.src[w[0]])
            targets.append(red.tgt[w[-1]])
            labels.append("*".join(q.arrows[a][0] for a in w))
    dim = len(words)
    if field.p <= dim:
        raise FieldTooSmall(f"p={field.p} must exceed dim={dim}")

    sc = zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            # internal product b_i * b_j corresponds to "traverse j, then i"
            wi, wj = words[i], words[j]
            if len(wj) == 0:
                if len(wi) == 0:
                    if i == j:
                        sc[i, j, i] = 1
                elif sources[i] == targets[j]:
                    sc[i, j, i] = 1
                continue
            if len(wi) == 0:
                if targets[j] == sources[i]:
                    sc[i, j, j] = 1
                continue
            if targets[j] != sources[i]:
                continue
            word = wj + wi
            coeffs = red.reduce(word)
            if coeffs is None or not np.any(coeffs):
                continue
            base = offset.get(len(word))
            if base is None:
                continue
            for c, s in zip(coeffs, red.survivors[len(word)]):
                if c:
                    sc[i, j, words.index(s, base)] = c

    unit = zeros(dim)
    unit[: q.vertex_count] = 1
    idems = []
    for v in range(q.vertex_count):
        e = zeros(dim)
        e[v] = 1
        idems.append(e)
    pdata = PresData(q, tuple(words), sources, targets)
    return Algebra(
        field,
        sc,
        unit,
        basis_labels=labels,
        idempotents=idems,
        origin="presentation",
        pres=pdata,
    )


# -- radicals ------------------------------------------------------------------


def radical(alg: Algebra) -> Subspace:
    """Jacobson radical as a canonical subspace.

    Presentation-born algebras: span of paths of length >= 1.  Otherwise the
    radical of the trace form of the left regular representation, which is
    the Jacobson radical whenever p > dim.
    """
    if alg._radical is not None:
        return alg._radical
    if alg.pres is not None:
        rows = eye(alg.dim)[alg.pres.quiver.vertex_count :]
        rad = Subspace(alg, rows)
    else:
        rad = _trace_form_radical(alg)
    alg._radical = rad
    return rad


def _trace_form_radical(alg: Algebra) -> Subspace:
    L = alg.lmul_table()
    t = np.einsum("iab,jba->ij", L, L) % alg.p
    return Subspace(alg, nullspace(t, alg.p))


def radical_power(alg: Algebra, n: int) -> Subspace:
    return subspace_power(radical(alg), n)


def semisimple_quotient_dim(alg: Algebra) -> int:
    return alg.dim - radical(alg).dim


# -- quotients, subalgebras, matrix algebras ----------------------------------


class QuotientData:
    """Projection/lift pair for an algebra quotient B -> B/I."""

    def __init__(self, parent: Algebra, proj: np.ndarray, lift: np.ndarray):
        self.parent = parent
        self.proj = proj  # (q, d): coordinates of the class of a vector
        self.lift = lift  # (d, q): canonical representative


def quotient_algebra(alg: Algebra, ideal: Subspace, *, check_ideal: bool = True) -> tuple[Algebra, QuotientData]:
    """B/I for a two-sided ideal I, with projection data for inflation."""
    if ideal.ambient is not alg:
        raise AmbientMismatch("ideal lives elsewhere")
    if check_ideal:
        chk = check_sided_ideal(alg, ideal, "two-sided")
        if not chk.is_ideal:
            raise NotAnIdeal("subspace is not a two-sided ideal")
    p = alg.p
    pivots = ideal.basis.pivots
    kept = [j for j in range(alg.dim) if j not in pivots]
    q = len(kept)
    # class coords of v are (v - v[pivots] @ ideal.rows) restricted to kept
    proj = zeros((q, alg.dim))
    for r, j in enumerate(kept):
        proj[r, j] = 1
    red = ideal.rows
    for i, pc in enumerate(pivots):
        for r, j in enumerate(kept):
            proj[r, pc] = (-red[i, j]) % p
    lift = zeros((alg.dim, q))
    for r, j in enumerate(kept):
        lift[j, r] = 1
    sc = zeros((q, q, q))
    for i in range(q):
        bi = lift[:, i]
        for j in range(q):
            prod = alg.mult(bi, lift[:, j])
            sc[i, j] = proj @ prod % p
    unit = proj @ alg.unit % p
    idems = None
    if alg.idempotents is not None and radical(alg).contains(ideal):
        idems = [proj @ e % p for e in alg.idempotents]
    qa = Algebra(
        alg.field,
        sc,
        unit,
        basis_labels=[alg.basis_labels[j] for j in kept],
        idempotents=idems,
        origin="quotient",
    )
    return qa, QuotientData(alg, proj, lift)


class AlgebraEmbedding:
    """Unital injective algebra map B -> A given by images of B's basis."""

    def __init__(self, domain: Algebra, codomain: Algebra, images: np.ndarray, check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.images = asmod(images, codomain.p)
        if self.images.shape != (domain.dim, codomain.dim):
            raise InvariantViolation("embedding image matrix has wrong shape")
        if check:
            self.verify()

    def verify(self):
        B, A, img = self.domain, self.codomain, self.images
        if not np.array_equal((B.unit @ img) % A.p, A.unit):
            raise InvariantViolation("embedding does not preserve the unit")
        if linalg.rank(img, A.p) != B.dim:
            raise InvariantViolation("embedding is not injective")
        for i in range(B.dim):
            lhs = matmul(img, A.lmul(img[i]).T, A.p)  # rows phi(b_i)*phi(b_j)
            rhs = matmul(B.sc[i], img, A.p)  # rows phi(b_i * b_j)
            if not np.array_equal(lhs, rhs):
                raise InvariantViolation(f"embedding not multiplicative at {i}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (asmod(x, self.domain.p) @ self.images) % self.codomain.p

    def push(self, sub: Subspace) -> Subspace:
        if sub.ambient is not self.domain:
            raise AmbientMismatch("subspace not over the embedding domain")
        return Subspace(self.codomain, matmul(sub.rows, self.images, self.codomain.p))

    def image_subspace(self) -> Subspace:
        return Subspace(self.codomain, self.images)

    @classmethod
    def identity(cls, alg: Algebra) -> "AlgebraEmbedding":
        return cls(alg, alg, eye(alg.dim), check=False)

    def compose(self, outer: "AlgebraEmbedding") -> "AlgebraEmbedding":
        """self: C -> B composed with outer: B -> A."""
        if outer.domain is not self.codomain:
            raise AmbientMismatch("embeddings do not chain")
        return AlgebraEmbedding(
            self.domain, outer.codomain, matmul(self.images, outer.images, outer.codomain.p), check=False
        )

    def opposite(self) -> "AlgebraEmbedding":
        return AlgebraEmbedding(opposite(self.domain), opposite(self.codomain), self.images, check=False)


def embedding_from_generator_images(
    dom: Algebra, cod: Algebra, gen_images: dict[str, np.ndarray]
) -> AlgebraEmbedding:
    """Extend images of trivial paths and arrows multiplicatively to the basis.

    dom must be presentation-born; gen_images maps 'e<v>' and arrow names to
    vectors over cod.
    """
    if dom.pres is None:
        raise InvariantViolation("domain must be presentation-born")
    q = dom.pres.quiver
    images = zeros((dom.dim, cod.dim))
    for i, w in enumerate(dom.pres.words):
        if len(w) == 0:
            images[i] = asmod(gen_images[f"e{dom.pres.sources[i]}"], cod.p)
        else:
            acc = asmod(gen_images[q.arrows[w[0]][0]], cod.p)
            for a in w[1:]:
                # traversal order: later arrows multiply on the left
                acc = cod.mult(asmod(gen_images[q.arrows[a][0]], cod.p), acc)
            images[i] = acc
    return AlgebraEmbedding(dom, cod, images)


def subalgebra_from_rows(amb: Algebra, rows: np.ndarray, labels=None, origin="constructed") -> tuple[Algebra, AlgebraEmbedding]:
    """Unital subalgebra spanned by rows (must be closed under products)."""
    basis = RowBasis(rows, amb.p)
    if not basis.contains_vector(amb.unit):
        raise InvariantViolation("subalgebra must contain the unit")
    r = basis.dim
    sc = zeros((r, r, r))
    for i in range(r):
        prods = matmul(basis.rows, amb.lmul(basis.rows[i]).T, amb.p)
        cs = basis.coords_matrix(prods)
        if cs is None:
            raise InvariantViolation("row span is not closed under multiplication")
        sc[i] = cs
    unit = basis.coords(amb.unit)
    sub = Algebra(amb.field, sc, unit, basis_labels=labels, origin=origin)
    emb = AlgebraEmbedding(sub, amb, basis.rows, check=False)
    return sub, emb


def matrix_algebra(lam: Algebra, n: int) -> Algebra:
    """M_n(lam) with basis E_{rc} x b_k, ordered row-major then by k."""
    d = lam.dim
    dim = n * n * d
    idx = lambda r, c, k: (r * n + c) * d + k
    sc = zeros((dim, dim, dim))
    for r in range(n):
        for c in range(n):
            for k in range(d):
                i = idx(r, c, k)
                for c2 in range(n):
                    for k2 in range(d):
                        j = idx(c, c2, k2)
                        prod = lam.sc[k, k2]
                        for k3 in range(d):
                            if prod[k3]:
                                sc[i, j, idx(r, c2, k3)] = prod[k3]
    unit = zeros(dim)
    for r in range(n):
        for k in range(d):
            if lam.unit[k]:
                unit[idx(r, r, k)] = lam.unit[k]
    labels = [
        f"E{r+1}{c+1}({lam.basis_labels[k]})"
        for r in range(n)
        for c in range(n)
        for k in range(d)
    ]
    idems = None
    if lam.idempotents is not None:
        idems = []
        for r in range(n):
            for e in lam.idempotents:
                v = zeros(dim)
                for k in range(d):
                    if e[k]:
                        v[idx(r, r, k)] = e[k]
                idems.append(v)
    return Algebra(lam.field, sc, unit, basis_labels=labels, idempotents=idems, origin="constructed")


def m2_extension(lam: Algebra):
    """A = M_2(lam) and the subalgebra B with rad(lam) in the (1,2) corner.

    Returns (A, B, emb, checks) where checks records the radical-shape
    identities; the strict chain rad(A) < rad(B) <= rad(B)A <= B is enforced,
    the rad^3(B) = rad^2(A) comparison is reported but not asserted (it fails
    already for lam = F_p[x]/(x^2); see the tests).
    """
    if lam.idempotents is None:
        raise InvariantViolation("lam needs an idempotent set")
    A = matrix_algebra(lam, 2)
    d = lam.dim
    radl = radical(lam)
    rows = []
    labels = []

    def place(r, c, vec):
        out = zeros(A.dim)
        out[(r * 2 + c) * d : (r * 2 + c) * d + d] = vec
        return out

    for k in range(d):
        rows.append(place(0, 0, lam.basis_vector(k)))
        labels.append(f"E11({lam.basis_labels[k]})")
    for v in radl.rows:
        rows.append(place(0, 1, v))
        labels.append("E12(rad)")
    for k in range(d):
        rows.append(place(1, 0, lam.basis_vector(k)))
        labels.append(f"E21({lam.basis_labels[k]})")
    for k in range(d):
        rows.append(place(1, 1, lam.basis_vector(k)))
        labels.append(f"E22({lam.basis_labels[k]})")
    B, emb = subalgebra_from_rows(A, np.array(rows), labels=labels, origin="constructed")
    idems = []
    for r in range(2):
        for e in lam.idempotents:
            v = place(r, r, e)
            idems.append(B_coords(B, emb, v))
    B.idempotents = idems
    B._check_idempotents()

    radB = emb.push(radical(B))
    radA = radical(A)
    radBA = subspace_product(radB, Subspace.full(A))
    imgB = emb.image_subspace()
    checks = {
        "radA_lt_radB": radB.contains(radA) and radA.dim < radB.dim,
        "radB_in_radBA": radBA.contains(radB),
        "radBA_in_B": imgB.contains(radBA),
        "rad3B_eq_rad2A": emb.push(radical_power(B, 3)) == radical_power(A, 2),
    }
    if not (checks["radA_lt_radB"] and checks["radB_in_radBA"] and checks["radBA_in_B"]):
        raise InvariantViolation("matrix extension radical chain failed")
    return A, B, emb, checks


def B_coords(B: Algebra, emb: AlgebraEmbedding, v: np.ndarray) -> np.ndarray:
    c = RowBasis(emb.images, B.p).coords(v)
    if c is None:
        raise InvariantViolation("vector not in subalgebra")
    return c


def stabilizer_extension(emb_b: AlgebraEmbedding, ideal: Subspace):
    """A = {a in M_n : a * I_hat <= I_hat} around an embedded algebra B.

    ideal must be a two-sided ideal of B = emb_b.domain; the codomain must be
    a full matrix algebra over F_p (any algebra works computationally, but the
    guarantee A >= B needs B*I <= I which the ideal check provides).
    """
    B, M = emb_b.domain, emb_b.codomain
    chk = check_sided_ideal(B, ideal, "two-sided")
    if not chk.is_ideal:
        raise NotAnIdeal("subspace is not an ideal of B")
    ihat = emb_b.push(ideal)
    p = M.p
    if ihat.dim == 0:
        rows = eye(M.dim)
    else:
        # constrain a = sum a_i b_i by: f(a*w) = 0 for every basis vector w of
        # ihat and every functional f vanishing on ihat
        comp = nullspace(ihat.rows, p)
        if comp.shape[0] == 0:
            rows = eye(M.dim)
        else:
            consm = np.concatenate(
                [matmul(M.rmul(w).T, comp.T, p).T for w in ihat.rows], axis=0
            )
            rows = nullspace(consm, p)
    A, emb_a = subalgebra_from_rows(M, rows, origin="constructed")
    # verify: unital, contains B, ihat is a left ideal of A
    imgA = emb_a.image_subspace()
    if not imgA.contains(emb_b.image_subspace()):
        raise InvariantViolation("stabilizer does not contain B")
    b_in_a = AlgebraEmbedding(
        B, A, np.array([B_coords(A, emb_a, v) for v in emb_b.images])
    )
    ihat_in_a = Subspace(A, np.array([B_coords(A, emb_a, v) for v in ihat.rows]) if ihat.dim else zeros((0, A.dim)))
    chk2 = check_sided_ideal(A, ihat_in_a, "left")
    if not chk2.is_ideal:
        raise InvariantViolation("stabilizer construction failed the left-ideal check")
    return A, b_in_a, emb_a


def truncate_radical_presentation(pres: Presentation, k: int, field: FieldContext | None = None) -> Algebra:
    """kQ/(I + paths of length k): the rad^k = 0 quotient, presentation-born."""
    field = field or FieldContext()
    base = build_algebra(pres, field)
    q = pres.quiver
    extra = []
    for i, w in enumerate(base.pres.words):
        if len(w) == k:
            extra.append([(1, tuple(q.arrows[a][0] for a in w))])
    keep = [r for r in pres.relations if max(len(t[1]) for t in r) < k]
    newp = Presentation(q, tuple(keep) + tuple(extra), pres.length_cap)
    return build_algebra(newp, field)


def triangular_radcube_extension(b: Algebra):
    """Lower triangular 3x3 algebra over the length grading of b (rad^3 = 0).

    Returns (A, emb) with emb the canonical embedding b -> A.  The two
    advertised properties (gl.dim(A) <= 2, rad^2 of image = rad^2(A)) are
    checked by the callers that have module machinery; here we verify the
    radical-square identity, which is pure subspace arithmetic.
    """
    if b.pres is None:
        raise InvariantViolation("triangular construction needs a presentation-born algebra")
    if radical_power(b, 3).dim != 0:
        raise RadicalCubeNonzero("rad^3(b) != 0")
    p = b.p
    lens = b.pres.lengths
    parts = {ell: [i for i, L in enumerate(lens) if L == ell] for ell in (0, 1, 2)}
    n0, n1, n2 = (len(parts[i]) for i in (0, 1, 2))
    # slots: (r, s) with r >= s; entry grade r - s
    slots = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    offs = {}
    off = 0
    for r, s in slots:
        offs[(r, s)] = off
        off += (n0, n1, n2)[r - s]
    dim = off

    def b_index(grade, pos):
        return parts[grade][pos]

    def coords_of(grade, vec_b):
        return [int(vec_b[i]) for i in parts[grade]]

    sc = zeros((dim, dim, dim))
    for r1, s1 in slots:
        g1 = r1 - s1
        for i1, bi in enumerate(parts[g1]):
            x = offs[(r1, s1)] + i1
            for r2, s2 in slots:
                if s1 != r2:
                    continue
                g2 = r2 - s2
                for i2, bj in enumerate(parts[g2]):
                    y = offs[(r2, s2)] + i2
                    prod = b.sc[bi, bj]  # lands in grade g1 + g2
                    if g1 + g2 > 2:
                        continue
                    for pos, k in enumerate(parts[g1 + g2]):
                        if prod[k]:
                            sc[x, y, offs[(r1, s2)] + pos] = prod[k]
    unit = zeros(dim)
    unit_b0 = coords_of(0, b.unit)
    for r in range(3):
        base = offs[(r, r)]
        for i, c in enumerate(unit_b0):
            unit[base + i] = c
    idems = []
    for r in range(3):
        for e in b.idempotents:
            v = zeros(dim)
            for i, bi in enumerate(parts[0]):
                v[offs[(r, r)] + i] = e[bi]
            idems.append(v)
    A = Algebra(b.field, sc, unit, idempotents=idems, origin="constructed")
    images = zeros((b.dim, dim))
    for i in range(b.dim):
        g = lens[i]
        pos = parts[g].index(i)
        if g == 0:
            for r in range(3):
                images[i, offs[(r, r)] + pos] = 1
        elif g == 1:
            images[i, offs[(1, 0)] + pos] = 1
            images[i, offs[(2, 1)] + pos] = 1
        else:
            images[i, offs[(2, 0)] + pos] = 1
    emb = AlgebraEmbedding(b, A, images)
    if emb.push(radical_power(b, 2)) != radical_power(A, 2):
        raise InvariantViolation("triangular construction: rad^2 mismatch")
    return A, emb
