"""Session state: configuration, caches, and the iso-class registry.

A Session owns every piece of mutable state in the toolkit: memoized
syzygies and decompositions, the class registry, and the seeded random
stream.  All accessors are get-or-compute under one lock, so parallel
callers observe a single logical map.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field

import numpy as np

from . import decomp as _decomp
from . import modules as _modules
from .algebra import Algebra, FieldContext, DEFAULT_PRIME
from .modules import Module, PdResult


@dataclass
class SessionConfig:
    prime: int = DEFAULT_PRIME
    resolution_cutoff: int = 64
    orbit_cutoff: int = 256
    seed: int = 0
    dim_cap: int = 4000
    cache_dir: str | None = None

    def scaled(self, factor: int) -> "SessionConfig":
        return SessionConfig(
            prime=self.prime,
            resolution_cutoff=self.resolution_cutoff * factor,
            orbit_cutoff=self.orbit_cutoff * factor,
            seed=self.seed,
            dim_cap=self.dim_cap * factor,
            cache_dir=self.cache_dir,
        )


class Session:
    def __init__(self, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.field = FieldContext(self.config.prime)
        self.registry = _decomp.ClassRegistry(self)
        self._lock = threading.RLock()
        self._syz: dict[str, tuple] = {}
        self._dec: dict[str, _decomp.Decomposition] = {}
        self._end: dict[str, _decomp.EndData] = {}
        self._pd: dict[str, PdResult] = {}
        self._class_children: dict[int, tuple | None] = {}
        self._induce: dict[tuple, _modules.Induced] = {}

    # -- determinism ---------------------------------------------------------

    def rng(self, tag: str) -> np.random.Generator:
        h = hashlib.sha256(f"{self.config.seed}:{tag}".encode()).digest()
        return np.random.default_rng(int.from_bytes(h[:8], "big"))

    # -- memoized homological steps -------------------------------------------

    def syzygy_step(self, m: Module):
        """(Omega(m), inclusion, cover), memoized by module content."""
        key = m.content_hash()
        with self._lock:
            if key not in self._syz:
                self._syz[key] = _modules.syzygy_step(m)
            return self._syz[key]

    def syzygy(self, m: Module) -> Module:
        return self.syzygy_step(m)[0]

    def nth_syzygy(self, m: Module, n: int) -> Module:
        cur = m
        for _ in range(n):
            cur = self.syzygy(cur)
        return cur

    def resolution(self, x: Module, length: int):
        """(terms, diffs): P_0..P_length and d_i: P_i -> P_{i-1} (d_0 -> x)."""
        terms: list[Module] = []
        diffs: list[_modules.ModuleMap] = []
        cur = x
        prev_incl = None
        for i in range(length + 1):
            sub, incl, cover = self.syzygy_step(cur)
            terms.append(cover.src)
            if i == 0:
                diffs.append(cover)
            else:
                diffs.append(cover.then(prev_incl))
            prev_incl = incl
            cur = sub
            if cur.dim == 0 and i + 1 <= length:
                # resolution already terminated; stop early
                break
        return terms, diffs

    def end_data(self, m: Module) -> _decomp.EndData:
        key = m.content_hash()
        with self._lock:
            if key not in self._end:
                self._end[key] = _decomp.EndData(m)
            return self._end[key]

    def decompose(self, m: Module) -> _decomp.Decomposition:
        key = m.content_hash()
        with self._lock:
            if key not in self._dec:
                self._dec[key] = _decomp.decompose(self, m)
            return self._dec[key]

    def is_isomorphic(self, m: Module, n: Module):
        return _decomp.is_isomorphic(self, m, n)

    def is_indecomposable(self, m: Module) -> bool:
        return _decomp.is_indecomposable(self, m)

    def end_algebra(self, m: Module) -> Algebra:
        return _decomp.end_algebra(self, m)

    # -- projective dimension over the syzygy class digraph --------------------

    def class_children(self, cid: int):
        """Iso-classes of the summands of Omega(representative), memoized."""
        with self._lock:
            if cid in self._class_children:
                return self._class_children[cid]
        entry = self.registry.classes[cid]
        if entry.is_projective:
            out: tuple[int, ...] = ()
        else:
            om = self.syzygy(entry.representative)
            if om.dim > self.config.dim_cap:
                out = None  # exploration boundary
            else:
                out = tuple(sorted(self.decompose(om).class_multiset().keys()))
        with self._lock:
            self._class_children[cid] = out
        return out

    def _explore_classes(self, roots, cutoff: int):
        """Reachable class subgraph up to depth cutoff; returns (edges, open set, depth)."""
        edges: dict[int, tuple] = {}
        depth = {cid: 0 for cid in roots}
        frontier = list(roots)
        open_boundary: set[int] = set()
        level = 0
        while frontier and level < cutoff:
            level += 1
            nxt = []
            for cid in frontier:
                if cid in edges:
                    continue
                ch = self.class_children(cid)
                if ch is None:
                    open_boundary.add(cid)
                    edges[cid] = ()
                    continue
                edges[cid] = ch
                for c in ch:
                    if c not in depth:
                        depth[c] = level
                        nxt.append(c)
            frontier = nxt
        for cid in frontier:  # unexpanded at the depth limit
            open_boundary.add(cid)
            edges.setdefault(cid, ())
        if len(edges) > self.config.orbit_cutoff:
            open_boundary.update(edges)
        return edges, open_boundary, depth

    def _class_pd_results(self, roots, cutoff: int):
        """PdResult per reachable class, via DAG dp + cycle detection."""
        edges, open_boundary, depth = self._explore_classes(roots, cutoff)
        on_cycle: set[int] = set()
        color: dict[int, int] = {}
        stack_list: list[int] = []
        pos: dict[int, int] = {}

        def dfs(c):
            color[c] = 1
            pos[c] = len(stack_list)
            stack_list.append(c)
            for ch in edges.get(c, ()):
                if ch not in edges:
                    continue
                if color.get(ch) == 1:
                    on_cycle.update(stack_list[pos[ch] :])
                elif color.get(ch, 0) == 0:
                    dfs(ch)
            stack_list.pop()
            color[c] = 2

        import sys

        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * len(edges) + 100))
        for c in list(edges):
            if color.get(c, 0) == 0:
                dfs(c)
        sys.setrecursionlimit(old)
        # propagate: infinite if reaches a cycle, unknown if reaches the boundary
        results: dict[int, PdResult] = {}

        def resolve(c, seen):
            if c in results:
                return results[c]
            if c in on_cycle:
                r = PdResult("infinite", preperiod=0, period=self._cycle_period(c, edges, on_cycle), cycle_kind="class")
                results[c] = r
                return r
            if c in open_boundary:
                r = PdResult("unknown", cutoff=cutoff)
                results[c] = r
                return r
            best = 0
            kind = "finite"
            pre = None
            per = None
            for ch in edges.get(c, ()):
                sub = resolve(ch, seen)
                if sub.kind == "infinite":
                    kind = "infinite"
                    pre = (sub.preperiod or 0) + 1
                    per = sub.period
                elif sub.kind == "unknown" and kind != "infinite":
                    kind = "unknown"
                elif sub.kind == "finite" and kind == "finite":
                    best = max(best, sub.value + 1)
            if kind == "finite":
                results[c] = PdResult("finite", value=best if edges.get(c, ()) else 0)
            elif kind == "infinite":
                results[c] = PdResult("infinite", preperiod=pre, period=per, cycle_kind="class")
            else:
                results[c] = PdResult("unknown", cutoff=cutoff)
            return results[c]

        for c in list(edges):
            resolve(c, set())
        return results

    @staticmethod
    def _cycle_period(c, edges, on_cycle) -> int:
        # shortest directed cycle through c inside the cyclic part
        from collections import deque

        dq = deque([(c, 0)])
        dist = {c: 0}
        while dq:
            node, d = dq.popleft()
            for ch in edges.get(node, ()):
                if ch == c:
                    return d + 1
                if ch in on_cycle and ch not in dist:
                    dist[ch] = d + 1
                    dq.append((ch, d + 1))
        return 1

    def pd(self, m: Module, cutoff: int | None = None) -> PdResult:
        cutoff = cutoff if cutoff is not None else self.config.resolution_cutoff
        if m.dim == 0:
            return PdResult("finite", value=0)
        key = (m.content_hash(), cutoff)
        with self._lock:
            cached = self._pd.get(m.content_hash())
            if cached is not None and (cached.kind != "unknown" or cached.cutoff >= cutoff):
                return cached
        if m.dim > self.config.dim_cap:
            return PdResult("unknown", cutoff=0)
        dec = self.decompose(m)
        roots = sorted(dec.class_multiset().keys())
        results = self._class_pd_results(roots, cutoff)
        agg = PdResult("finite", value=0)
        for cid in roots:
            r = results[cid]
            if r.kind == "infinite":
                agg = PdResult(
                    "infinite",
                    preperiod=r.preperiod,
                    period=r.period,
                    cycle_kind="class",
                    cycle_classes=self._cycle_tuple(cid, results),
                )
                break
            if r.kind == "unknown":
                agg = PdResult("unknown", cutoff=cutoff)
            elif agg.kind == "finite":
                agg = PdResult("finite", value=max(agg.value, r.value))
        if agg.kind == "infinite":
            upgraded = self._module_cycle_upgrade(m, cutoff)
            if upgraded is not None:
                agg = upgraded
        with self._lock:
            self._pd[m.content_hash()] = agg
        return agg

    def class_pd(self, cid: int, cutoff: int | None = None) -> PdResult:
        cutoff = cutoff if cutoff is not None else self.config.resolution_cutoff
        results = self._class_pd_results([cid], cutoff)
        return results[cid]

    def _cycle_tuple(self, root, results):
        out = [cid for cid, r in results.items() if r.kind == "infinite" and r.preperiod == 0]
        return tuple(sorted(out))

    def _module_cycle_upgrade(self, m: Module, cutoff: int):
        """Try to certify full syzygy periodicity (sound Tor-vanishing bound)."""
        budget_dim = max(4 * m.dim, 64)
        history = [m]
        cur = m
        for step in range(1, min(cutoff, 24) + 1):
            cur = self.syzygy(cur)
            if cur.dim == 0 or cur.dim > budget_dim:
                return None
            for a, prev in enumerate(history):
                if prev.dim != cur.dim or prev.invariant_key() != cur.invariant_key():
                    continue
                ok, wit = self.is_isomorphic(prev, cur)
                if ok:
                    return PdResult(
                        "infinite",
                        preperiod=a,
                        period=step - a,
                        cycle_kind="module",
                        witness=wit,
                    )
            history.append(cur)
        return None

    def global_dimension(self, alg: Algebra, cutoff: int | None = None) -> PdResult:
        return _modules.global_dimension(self, alg, cutoff)

    def induce(self, emb, x: Module) -> _modules.Induced:
        key = (id(emb), x.content_hash())
        with self._lock:
            if key not in self._induce:
                self._induce[key] = _modules.induce(emb, x)
            return self._induce[key]
