"""Igusa-Todorov functions phi and psi on K(A).

K(A) is the free abelian group on the non-projective indecomposable classes;
the syzygy operator acts additively on it.  phi(M) is the first n at which
the integer rank of <[Omega^n M_i]> stops dropping, and psi(M) adds the
largest finite projective dimension among the summands of Omega^phi(M).
Lemma-style properties of psi are the acceptance contract; the suite below
checks them wholesale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffExceeded, InvariantViolation
from .linalg import int_matrix_rank
from .modules import Module, direct_sum, submodule, verify_exact, ExactSeq
from .linalg import zeros as _zeros


def k_class(session, m: Module) -> dict[int, int]:
    """[m] in K(A): class-id -> multiplicity, projective classes dropped."""
    dec = session.decompose(m)
    return dec.nonprojective_multiset(session.registry)


def omega_on_classes(session, vec: dict[int, int]) -> dict[int, int]:
    """The syzygy operator on K(A), computed summand by summand."""
    out: dict[int, int] = {}
    for cid, mult in vec.items():
        entry = session.registry.classes[cid]
        if entry.is_projective:
            continue
        om = session.syzygy(entry.representative)
        if om.dim == 0:
            continue
        for c2, m2 in session.decompose(om).class_multiset().items():
            if session.registry.classes[c2].is_projective:
                continue
            out[c2] = out.get(c2, 0) + mult * m2
    return out


@dataclass
class PhiData:
    value: int
    ranks: list[int]


@dataclass
class PsiData:
    phi: PhiData
    value: int | None  # None means NeedsLargerCutoff
    summand_pds: dict[int, str] = field(default_factory=dict)

    @property
    def needs_larger_cutoff(self) -> bool:
        return self.value is None


def _rank_of_vectors(vecs: list[dict[int, int]]) -> int:
    cols = sorted({c for v in vecs for c in v})
    if not cols:
        return 0
    pos = {c: i for i, c in enumerate(cols)}
    rows = []
    for v in vecs:
        row = [0] * len(cols)
        for c, mult in v.items():
            row[pos[c]] = mult
        rows.append(row)
    return int_matrix_rank(rows)


def phi(session, m: Module, cutoff: int | None = None) -> PhiData:
    """Least n with rank <[Omega^n M_i]> = rank <[Omega^{n+1} M_i]>."""
    cutoff = cutoff if cutoff is not None else session.config.resolution_cutoff
    base = sorted(session.decompose(m).class_multiset().keys())
    vecs = []
    for cid in base:
        if session.registry.classes[cid].is_projective:
            continue
        vecs.append({cid: 1})
    ranks = [_rank_of_vectors(vecs)]
    cur = vecs
    for n in range(cutoff + 1):
        cur = [omega_on_classes(session, v) for v in cur]
        ranks.append(_rank_of_vectors(cur))
        if ranks[-1] > ranks[-2]:
            raise InvariantViolation("phi rank sequence increased")
        if ranks[-1] == ranks[-2]:
            return PhiData(n, ranks)
    raise CutoffExceeded("phi rank sequence did not plateau (internal error)")


def psi(session, m: Module, cutoff: int | None = None) -> PsiData:
    """phi(m) plus the largest finite pd among summands of Omega^phi(m)."""
    cutoff = cutoff if cutoff is not None else session.config.resolution_cutoff
    ph = phi(session, m, cutoff)
    vec = session.decompose(m).class_multiset()
    for _ in range(ph.value):
        vec = _omega_full(session, vec)
    best = 0
    pds = {}
    unknown = False
    for cid in sorted(vec):
        res = session.class_pd(cid, cutoff)
        pds[cid] = res.label()
        if res.kind == "finite":
            best = max(best, res.value)
        elif res.kind == "unknown":
            unknown = True
    if unknown:
        return PsiData(ph, None, pds)
    return PsiData(ph, ph.value + best, pds)


def _omega_full(session, vec: dict[int, int]) -> dict[int, int]:
    """Omega on class multisets keeping projective summands of the result."""
    out: dict[int, int] = {}
    for cid, mult in vec.items():
        entry = session.registry.classes[cid]
        if entry.is_projective:
            continue
        om = session.syzygy(entry.representative)
        if om.dim == 0:
            continue
        for c2, m2 in session.decompose(om).class_multiset().items():
            out[c2] = out.get(c2, 0) + mult * m2
    return out


def psi_value(session, m: Module, cutoff: int | None = None) -> int:
    res = psi(session, m, cutoff)
    if res.value is None:
        raise CutoffExceeded("psi needs a larger cutoff")
    return res.value


# -- property suite -----------------------------------------------------------


@dataclass
class SuiteEntry:
    check: str
    detail: str
    passed: bool


@dataclass
class SuiteReport:
    entries: list[SuiteEntry]

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def counts(self) -> tuple[int, int]:
        ok = sum(1 for e in self.entries if e.passed)
        return ok, len(self.entries)


def lemma21_suite(session, modules: list[Module], seed_tag: str = "lemma21", max_pairs: int | None = None) -> SuiteReport:
    """Check the psi contract on a module list.

    (1) psi = pd on finite-pd members; (2) psi(X) <= psi(X+Y) and
    psi(n copies of X) = psi(X) for n <= 3; (3) psi(Z) <= psi(X+Y)+1 for
    constructed short exact sequences with finite pd(Z).
    """
    entries: list[SuiteEntry] = []
    rng = session.rng(seed_tag)
    psis = []
    for i, m in enumerate(modules):
        r = session.pd(m)
        pm = psi(session, m)
        psis.append(pm.value)
        if r.kind == "finite" and pm.value is not None:
            entries.append(
                SuiteEntry(
                    "psi=pd",
                    f"module {i} dim {m.dim}: psi={pm.value} pd={r.value}",
                    pm.value == r.value,
                )
            )
        for n in (2, 3):
            s = direct_sum([m] * n).module
            pn = psi(session, s)
            entries.append(
                SuiteEntry(
                    "psi-multiplicity",
                    f"module {i} n={n}: psi={pn.value} vs {pm.value}",
                    pn.value == pm.value,
                )
            )
    pair_budget = max_pairs if max_pairs is not None else len(modules) ** 2
    count = 0
    for i, x in enumerate(modules):
        for j, y in enumerate(modules):
            if i == j:
                continue
            if count >= pair_budget:
                break
            count += 1
            s = direct_sum([x, y]).module
            ps = psi(session, s)
            if psis[i] is None or ps.value is None:
                continue
            entries.append(
                SuiteEntry(
                    "psi-monotone",
                    f"pair ({i},{j}): psi(X)={psis[i]} psi(X+Y)={ps.value}",
                    psis[i] <= ps.value,
                )
            )
    for i, m in enumerate(modules):
        for f, g, tag in _sample_ses(session, m, rng):
            z = g.dst
            rz = session.pd(z)
            if rz.kind != "finite":
                continue
            xy = direct_sum([f.src, f.dst]).module
            pz = psi(session, z)
            pxy = psi(session, xy)
            if pz.value is None or pxy.value is None:
                continue
            entries.append(
                SuiteEntry(
                    "psi-ses",
                    f"module {i} {tag}: psi(Z)={pz.value} psi(X+Y)={pxy.value}",
                    pz.value <= pxy.value + 1,
                )
            )
    return SuiteReport(entries)


def _sample_ses(session, m: Module, rng):
    """A couple of genuine short exact sequences involving m."""
    out = []
    if m.dim == 0:
        return out
    om, incl, cover = session.syzygy_step(m)
    out.append((incl, cover, "cover-sequence"))
    # random submodule and its quotient
    v = rng.integers(0, m.p, size=m.dim)
    sub, sincl = submodule(m, np.array([v]) % m.p, close=True)
    if 0 < sub.dim < m.dim:
        from .modules import quotient_module

        quot, proj = quotient_module(m, sincl.matrix.T)
        out.append((sincl, proj, "cyclic-submodule-sequence"))
    return out
