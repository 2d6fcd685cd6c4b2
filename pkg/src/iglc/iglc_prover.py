"""Decision procedure for iGLC with countermodels, plus saturation machinery.

iGLC is iK + Löb's axiom □(□A→A)→□A + the completeness principle A→□A; its
theorems are exactly the sentences valid on all finite irreflexive realistic
frames, which is what the decision core exploits.

Pipeline for decide_iglc, all phases metered by one step budget:

1. a deterministic scan of small (≤2-world) irreflexive realistic models over
   the query's atoms, which settles most refutable inputs immediately;
2. a sound validity certifier: the query follows in IPC, at the level of its
   modal skeleton, from instances of the iGLC axioms over its boxed
   subformulas (K, Löb, completeness, and □-congruence bridges obtained by
   recursion on strictly smaller box depth);
3. the complete core: worlds are candidate subsets of the adequate set
   X = sub(A) ∪ {□B : B ∈ sub(A)} satisfying syntactic closure constraints
   (Hintikka conditions plus derivable box closures), ordered by inclusion
   with the canonical modal relation; incoherent candidates, whose membership
   disagrees with forcing, are eliminated to a fixpoint.  Every X-saturated
   set survives, and the surviving model satisfies membership = forcing, so
   the query is a theorem iff it belongs to every surviving world; otherwise
   any world omitting it roots a countermodel.

Every Invalid answer is machine-checked (frame flags and refutation at the
root) before being returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .formula import (And, Atom, Bottom, Box, Formula, Imp, Or, BOT,
                      atoms, modal_decompose, render, size, subsentences)
from .ipc import ipc_provable
from .kripke import KripkeModel, check_frame, forces

__all__ = [
    "Valid", "Invalid", "BudgetExceeded", "Verdict", "BudgetExhausted",
    "AdequateSet", "SaturatedSet", "DEFAULT_BUDGET",
    "decide_iglc", "derives_iglc", "is_saturated", "saturate", "clear_caches",
]

DEFAULT_BUDGET = 10_000_000

_CANDIDATE_CAP = 250_000
_PROBE_ATOM_CAP = 4
_CONGRUENCE_BOX_CAP = 12


@dataclass(frozen=True)
class Valid:
    witness: tuple[str, ...] = ()


@dataclass(frozen=True)
class Invalid:
    countermodel: KripkeModel
    root: int


@dataclass(frozen=True)
class BudgetExceeded:
    steps_used: int


Verdict = Valid | Invalid | BudgetExceeded


class BudgetExhausted(RuntimeError):
    """Raised by saturation operations when the step budget runs out."""

    def __init__(self, steps_used: int):
        super().__init__(f"budget exhausted after {steps_used} steps")
        self.steps_used = steps_used


class _BudgetHit(Exception):
    pass


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise _BudgetHit()


# formula -> (definitive verdict, step cost of computing it); replaying the
# cost on cache hits keeps budget behavior independent of call history
_verdict_memo: dict[Formula, tuple[Verdict, int]] = {}


def clear_caches() -> None:
    _verdict_memo.clear()
    _probe_models.cache_clear()


def _machine_check(model: KripkeModel, root: int, query: Formula) -> None:
    rep = check_frame(model.frame)
    ok = (rep.is_poset and rep.has_model_property and rep.irreflexive
          and rep.realistic and not forces(model, root, query))
    if not ok:
        raise RuntimeError("internal error: countermodel failed verification "
                           f"for {render(query)}")


# ---------------------------------------------------------------------------
# Phase 1: deterministic small-model scan.

def _upset_choices(n_worlds: int, shape: str) -> list[frozenset[int]]:
    if shape == "single":
        return [frozenset(), frozenset({1})]
    if shape == "chain":
        return [frozenset(), frozenset({2}), frozenset({1, 2})]
    return [frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2})]


def _probe_model_data(names: tuple[str, ...]):
    shapes = [
        ("single", [1], {(1, 1)}, [frozenset()]),
        ("chain", [1, 2], {(1, 1), (2, 2), (1, 2)}, [frozenset(), frozenset({(1, 2)})]),
        ("pair", [1, 2], {(1, 1), (2, 2)}, [frozenset()]),
    ]
    models = []
    for shape, worlds, leq, r_options in shapes:
        ups = _upset_choices(len(worlds), shape)
        for r in r_options:
            for val in itertools.product(ups, repeat=len(names)):
                models.append(KripkeModel.make(
                    worlds, leq, r, dict(zip(names, val))))
    return models


@lru_cache(maxsize=64)
def _probe_models(names: tuple[str, ...]) -> tuple[KripkeModel, ...]:
    return tuple(_probe_model_data(names))


def _probe_scan(a: Formula, bud: _Budget) -> Invalid | None:
    names = tuple(sorted(atoms(a)))
    if len(names) > _PROBE_ATOM_CAP:
        return None
    for model in _probe_models(names):
        bud.charge()
        for w in sorted(model.frame.worlds):
            if not forces(model, w, a):
                return Invalid(model, w)
    return None


# ---------------------------------------------------------------------------
# Phase 1b: structured scan over curated 3–5 world frames (runs before the
# canonical core only when the adequate set is large, where candidate
# enumeration would be the expensive route to a small countermodel).

def _reflexive_transitive(pairs: set[tuple[int, int]], n: int) -> frozenset[tuple[int, int]]:
    rel = set(pairs) | {(i, i) for i in range(1, n + 1)}
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for b2, c in list(rel):
                if b == b2 and (a, c) not in rel:
                    rel.add((a, c))
                    changed = True
    return frozenset(rel)


def _structured_frames() -> list[tuple[int, frozenset, list[frozenset]]]:
    def strict(leq):
        return frozenset((a, b) for a, b in leq if a != b)

    raw = [
        (3, {(1, 2), (2, 3)}, [None, {(1, 2)}, {(1, 3)}, {(1, 3), (2, 3)}]),
        (3, {(1, 2), (1, 3)}, [None, {(1, 2)}]),
        (4, {(1, 2), (1, 3), (2, 4), (3, 4)}, [None, {(1, 4)}, {(1, 2), (1, 3), (1, 4)}]),
        (4, {(1, 2), (1, 3), (1, 4)}, [None, {(1, 2)}]),
        (4, {(1, 2), (2, 3), (2, 4)}, [None, {(1, 2)}, {(1, 3), (1, 4), (2, 3), (2, 4)}]),
        (4, {(1, 2), (2, 3), (3, 4)}, [None, {(1, 2)}]),
        (5, {(1, 2), (2, 3), (2, 4), (2, 5)}, [None, {(1, 2)}]),
        (5, {(1, 2), (1, 3), (1, 4), (1, 5)}, [None, {(1, 2)}]),
    ]
    frames = []
    for n, leq_raw, r_opts in raw:
        leq = _reflexive_transitive(leq_raw, n)
        options = []
        for r in r_opts:
            r = strict(leq) if r is None else frozenset(r)
            ok = all((a, c) in r for (a, b) in leq for (b2, c) in r if b == b2)
            assert ok and all((w, w) not in r for w in range(1, n + 1)) and r <= leq
            options.append(r)
        frames.append((n, leq, options))
    return frames


@lru_cache(maxsize=16)
def _structured_models(names: tuple[str, ...]) -> tuple:
    """Compiled (n, leq_succ, r_succ, atom masks, constructor data) entries."""
    from .kripke import upward_closed_sets
    compiled = []
    for n, leq, r_options in _structured_frames():
        worlds = list(range(1, n + 1))
        ups = upward_closed_sets(worlds, leq)
        ups_masks = [sum(1 << (w - 1) for w in up) for up in ups]
        for r in r_options:
            leq_succ = [0] * n
            r_succ = [0] * n
            for a, b in leq:
                leq_succ[a - 1] |= 1 << (b - 1)
            for a, b in r:
                r_succ[a - 1] |= 1 << (b - 1)
            for val in itertools.product(range(len(ups)), repeat=len(names)):
                masks = {nm: ups_masks[i] for nm, i in zip(names, val)}
                constructor = (worlds, leq, r,
                               {nm: ups[i] for nm, i in zip(names, val)})
                compiled.append((n, tuple(leq_succ), tuple(r_succ), masks, constructor))
    return tuple(compiled)


def _eval_masks(f: Formula, n: int, leq_succ, r_succ, val: dict[str, int],
                cache: dict[Formula, int]) -> int:
    m = cache.get(f)
    if m is not None:
        return m
    full = (1 << n) - 1
    if isinstance(f, Atom):
        m = val.get(f.name, 0)
    elif isinstance(f, Bottom):
        m = 0
    elif isinstance(f, And):
        m = (_eval_masks(f.left, n, leq_succ, r_succ, val, cache)
             & _eval_masks(f.right, n, leq_succ, r_succ, val, cache))
    elif isinstance(f, Or):
        m = (_eval_masks(f.left, n, leq_succ, r_succ, val, cache)
             | _eval_masks(f.right, n, leq_succ, r_succ, val, cache))
    else:
        if isinstance(f, Imp):
            bad = (_eval_masks(f.left, n, leq_succ, r_succ, val, cache)
                   & ~_eval_masks(f.right, n, leq_succ, r_succ, val, cache) & full)
            succ = leq_succ
        else:
            bad = ~_eval_masks(f.inner, n, leq_succ, r_succ, val, cache) & full
            succ = r_succ
        m = 0
        for i in range(n):
            if succ[i] & bad == 0:
                m |= 1 << i
    cache[f] = m
    return m


def _structured_scan(a: Formula, bud: _Budget) -> Invalid | None:
    names = tuple(sorted(atoms(a)))
    if len(names) > 3:
        return None
    for n, leq_succ, r_succ, masks, constructor in _structured_models(names):
        bud.charge()
        truth = _eval_masks(a, n, leq_succ, r_succ, masks, {})
        if truth != (1 << n) - 1:
            worlds, leq, r, val = constructor
            model = KripkeModel.make(worlds, leq, r, val)
            for w in sorted(worlds):
                if not forces(model, w, a):
                    return Invalid(model, w)
    return None


# ---------------------------------------------------------------------------
# Phase 2: sound validity certifier via the modal skeleton.

def _boxed_subformulas(a: Formula) -> list[Formula]:
    inner = [g.inner for g in subsentences(a) if isinstance(g, Box)]
    return sorted(set(inner), key=lambda f: (size(f), render(f)))


def _quick_valid(a: Formula, bud: _Budget, depth: int) -> Valid | None:
    bud.charge()
    if ipc_provable((), modal_decompose(a).skeleton):
        return Valid(("substitution instance of an IPC tautology",))
    boxes = _boxed_subformulas(a)
    if not boxes:
        return None
    axiom_set: list[Formula] = []
    for b in boxes:
        axiom_set.append(Imp(b, Box(b)))                      # completeness
        if isinstance(b, Imp) and isinstance(b.left, Box) and b.left.inner == b.right:
            axiom_set.append(Imp(Box(b), Box(b.right)))       # Löb
        if isinstance(b, Imp):                                # K
            axiom_set.append(Imp(Box(b), Imp(Box(b.left), Box(b.right))))
    if len(boxes) <= _CONGRUENCE_BOX_CAP:
        for x, y in itertools.permutations(boxes, 2):
            bud.charge()
            sub = _decide(Imp(x, y), bud, depth + 1)
            if isinstance(sub, Valid):
                axiom_set.append(Imp(Box(x), Box(y)))         # Nec + K bridge
    for extra in list(axiom_set):
        for g in sorted(subsentences(extra), key=lambda h: (size(h), render(h))):
            if isinstance(g, Box) and g.inner not in boxes:
                axiom_set.append(Imp(g.inner, Box(g.inner)))
                boxes.append(g.inner)
    axiom_set = list(dict.fromkeys(axiom_set))
    goal = a
    for ax in axiom_set:
        goal = Imp(ax, goal)
    bud.charge(len(axiom_set) + 1)
    if ipc_provable((), modal_decompose(goal).skeleton):
        lines = tuple(f"axiom: {render(ax)}" for ax in axiom_set)
        return Valid(lines + ("goal is an IPC consequence of the axioms above "
                              "at the level of the modal skeleton",))
    return None


# ---------------------------------------------------------------------------
# Phase 3: canonical saturation fixpoint over the adequate set.

class _Canonical:
    def __init__(self, a: Formula, bud: _Budget):
        self.bud = bud
        subs = sorted(subsentences(a), key=lambda f: (size(f), render(f)))
        members = list(subs)
        seen = set(subs)
        for s in subs:
            b = Box(s)
            if b not in seen:
                members.append(b)
                seen.add(b)
        members.sort(key=lambda f: (size(f), render(f)))
        self.members = members
        self.index = {f: i for i, f in enumerate(members)}
        self.n = len(members)
        self.query_bit = self.index[a]

        self.imps: list[tuple[int, int, int]] = []
        self.boxes: list[tuple[int, int]] = []
        self.atom_positions: dict[str, int] = {}
        for i, f in enumerate(members):
            if isinstance(f, Imp):
                self.imps.append((i, self.index[f.left], self.index[f.right]))
            elif isinstance(f, Box):
                self.boxes.append((i, self.index[f.inner]))
            elif isinstance(f, Atom):
                self.atom_positions[f.name] = i
        self.imp_mask = sum(1 << i for i, _, _ in self.imps)
        self.box_mask = sum(1 << i for i, _ in self.boxes)

        # Closure rules ({premise bits} -> conclusion bit), necessary for
        # saturated sets, anchored at their largest position for generation.
        self.rules_at: list[list[tuple[tuple[int, ...], int]]] = [[] for _ in members]

        def rule(premises: tuple[int, ...], concl: int) -> None:
            anchor = max((*premises, concl))
            self.rules_at[anchor].append((premises, concl))

        box_of = {c: i for i, c in self.boxes}
        for i, l, r in self.imps:
            rule((i, l), r)                     # →E closure
            rule((r,), i)                       # C ⊢ B→C
            if isinstance(members[l], Bottom) or l == r:
                rule((), i)                     # ⊢ ⊥→C, ⊢ B→B
        for i, c in self.boxes:
            rule((c,), i)                       # completeness: B ⊢ □B
            inner = members[c]
            if isinstance(inner, Bottom):
                for j, _ in self.boxes:         # □⊥ ⊢ □B
                    if j != i:
                        rule((i,), j)
            elif isinstance(inner, And):
                bl = box_of.get(self.index[inner.left])
                br = box_of.get(self.index[inner.right])
                if bl is not None and br is not None:
                    rule((i,), bl)              # □(B∧C) ⊣⊢ □B ∧ □C
                    rule((i,), br)
                    rule((bl, br), i)
            elif isinstance(inner, Or):
                bl = box_of.get(self.index[inner.left])
                br = box_of.get(self.index[inner.right])
                if bl is not None:
                    rule((bl,), i)              # □B ⊢ □(B∨C)
                if br is not None:
                    rule((br,), i)
            elif isinstance(inner, Imp):
                bl = box_of.get(self.index[inner.left])
                br = box_of.get(self.index[inner.right])
                if bl is not None and br is not None:
                    rule((i, bl), br)           # K: □(B→C), □B ⊢ □C

    def _generate(self) -> list[int]:
        members = self.members
        rules_at = self.rules_at
        out: list[int] = []
        bits = 0

        def ok(p: int, v: int, vec: int) -> bool:
            vec |= v << p
            for premises, concl in rules_at[p]:
                if all(vec >> q & 1 for q in premises) and not vec >> concl & 1:
                    return False
            return True

        def rec(p: int, vec: int) -> None:
            self.bud.charge()
            if p == self.n:
                out.append(vec)
                if len(out) > _CANDIDATE_CAP:
                    raise _BudgetHit()
                return
            f = members[p]
            if isinstance(f, Bottom):
                choices = (0,)
            elif isinstance(f, And):
                v = (vec >> self.index[f.left] & 1) & (vec >> self.index[f.right] & 1)
                choices = (v,)
            elif isinstance(f, Or):
                v = (vec >> self.index[f.left] & 1) | (vec >> self.index[f.right] & 1)
                choices = (v,)
            else:
                choices = (0, 1)
            for v in choices:
                if ok(p, v, vec):
                    rec(p + 1, vec | v << p)

        rec(0, bits)
        return out

    def _eliminate(self, cands: list[int]) -> list[int]:
        imps, boxes = self.imps, self.boxes
        imp_mask, box_mask = self.imp_mask, self.box_mask
        while True:
            self.bud.charge(len(cands) * (len(cands) + 1) // 4 + 1)
            fail_imp = []
            miss_box = []
            reqs = []
            for v in cands:
                fi = 0
                for i, l, r in imps:
                    if v >> l & 1 and not v >> r & 1:
                        fi |= 1 << i
                fail_imp.append(fi)
                mb = 0
                req = 0
                for i, c in boxes:
                    if not v >> c & 1:
                        mb |= 1 << i
                    if v >> i & 1:
                        req |= 1 << c
                miss_box.append(mb)
                reqs.append(req)
            keep = []
            changed = False
            for wi, w in enumerate(cands):
                acc_i = 0
                acc_b = 0
                req = reqs[wi]
                for vi, v in enumerate(cands):
                    if w & ~v == 0:
                        acc_i |= fail_imp[vi]
                    if req & ~v == 0 and box_mask & v & ~w:
                        acc_b |= miss_box[vi]
                if (w & imp_mask) == imp_mask & ~acc_i and (w & box_mask) == box_mask & ~acc_b:
                    keep.append(w)
                else:
                    changed = True
            if not changed:
                return keep
            cands = keep

    def sqsubset(self, w: int, v: int) -> bool:
        req = 0
        for i, c in self.boxes:
            if w >> i & 1:
                req |= 1 << c
        return req & ~v == 0 and bool(self.box_mask & v & ~w)

    def to_model(self, worlds: list[int]) -> tuple[KripkeModel, dict[int, int]]:
        order = sorted(worlds)
        label = {v: i + 1 for i, v in enumerate(order)}
        leq = {(label[u], label[v]) for u in order for v in order if u & ~v == 0}
        r = {(label[u], label[v]) for u in order for v in order if self.sqsubset(u, v)}
        val = {name: {label[v] for v in order if v >> p & 1}
               for name, p in self.atom_positions.items()}
        model = KripkeModel.make(list(label.values()), leq, r, val)
        return model, label

    def decide(self) -> Verdict:
        cands = self._generate()
        survivors = self._eliminate(cands)
        qb = self.query_bit
        bad = [w for w in survivors if not w >> qb & 1]
        if not bad:
            return Valid(("certified by saturation of the adequate set: the query "
                          "belongs to every coherent candidate world",))
        root_vec = min(bad)
        cone = [v for v in survivors if root_vec & ~v == 0]
        cone = self._shrink(cone, root_vec)
        model, label = self.to_model(cone)
        return Invalid(model, label[root_vec])

    def _shrink(self, cone: list[int], root_vec: int) -> list[int]:
        """Greedily drop worlds while the root still refutes the query."""
        if len(cone) > 40:
            return cone
        query = self.members[self.query_bit]
        current = list(cone)
        changed = True
        while changed:
            changed = False
            for v in sorted(current, reverse=True):
                if v == root_vec or len(current) == 1:
                    continue
                trial = [u for u in current if u != v]
                self.bud.charge(len(trial))
                model, label = self.to_model(trial)
                if not forces(model, label[root_vec], query):
                    current = trial
                    changed = True
        return current


# ---------------------------------------------------------------------------
# The decision pipeline.

_LARGE_ADEQUATE = 24


def _decide(a: Formula, bud: _Budget, depth: int = 0) -> Verdict:
    hit = _verdict_memo.get(a)
    if hit is not None:
        verdict, cost = hit
        # replaying the recorded cost keeps top-level budget behavior close to
        # a cold run; nested hits charge like any other cheap step, otherwise
        # recorded costs would compound through the recursion
        bud.charge(cost if depth == 0 else 1)
        return verdict
    start = bud.used
    verdict: Verdict | None = _probe_scan(a, bud)
    if verdict is None:
        verdict = _quick_valid(a, bud, depth)
    if verdict is None:
        subs = subsentences(a)
        adequate_size = len(subs | {Box(b) for b in subs})
        if adequate_size > _LARGE_ADEQUATE:
            verdict = _structured_scan(a, bud)
    if verdict is None:
        verdict = _Canonical(a, bud).decide()
    if isinstance(verdict, Invalid):
        _machine_check(verdict.countermodel, verdict.root, a)
    _verdict_memo[a] = (verdict, bud.used - start)
    return verdict


def decide_iglc(a: Formula, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Decide ⊢_iGLC a; Invalid carries a finite irreflexive realistic countermodel."""
    bud = _Budget(budget)
    try:
        return _decide(a, bud)
    except _BudgetHit:
        return BudgetExceeded(bud.used)


def _conjunction(gamma) -> Formula | None:
    ordered = sorted(set(gamma), key=lambda f: (size(f), render(f)))
    if not ordered:
        return None
    conj = ordered[0]
    for f in ordered[1:]:
        conj = And(conj, f)
    return conj


def derives_iglc(gamma, a: Formula, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Decide Γ ⊢_iGLC a via ⋀Γ → a (empty Γ is ⊤)."""
    conj = _conjunction(gamma)
    return decide_iglc(a if conj is None else Imp(conj, a), budget)


# ---------------------------------------------------------------------------
# Adequate sets, saturation, and the extension construction.

@dataclass(frozen=True)
class AdequateSet:
    """A finite set of formulas closed under subsentences."""

    members: frozenset[Formula]

    def __post_init__(self):
        for f in self.members:
            if not subsentences(f) <= self.members:
                raise ValueError(f"not closed under subsentences at {render(f)}")

    @staticmethod
    def standard(a: Formula) -> "AdequateSet":
        """The completeness-construction carrier sub(a) ∪ {□B : B ∈ sub(a)}."""
        subs = subsentences(a)
        return AdequateSet(frozenset(subs) | frozenset(Box(b) for b in subs))

    @staticmethod
    def closure(fs) -> "AdequateSet":
        out: set[Formula] = set()
        for f in fs:
            out |= subsentences(f)
        return AdequateSet(frozenset(out))


@dataclass(frozen=True)
class SaturatedSet:
    members: frozenset[Formula]


def _oracle(gamma, goal: Formula, bud: _Budget) -> bool:
    """Γ ⊢_iGLC goal, raising BudgetExhausted on a blown budget."""
    conj = _conjunction(gamma)
    query = goal if conj is None else Imp(conj, goal)
    verdict = _decide(query, bud)
    return isinstance(verdict, Valid)


def is_saturated(s, x: AdequateSet, budget: int = DEFAULT_BUDGET) -> bool:
    """Clauses: consistent; derivability-closed within x; disjunction-splitting."""
    members = frozenset(s)
    if not members <= x.members:
        raise ValueError("s must be a subset of the adequate set")
    bud = _Budget(budget)
    try:
        if _oracle(members, BOT, bud):
            return False
        for f in sorted(x.members, key=lambda g: (size(g), render(g))):
            if f not in members and _oracle(members, f, bud):
                return False
        for f in members:
            if isinstance(f, Or) and f.left not in members and f.right not in members:
                return False
        return True
    except _BudgetHit:
        raise BudgetExhausted(bud.used) from None


def saturate(r, a: Formula, x: AdequateSet, budget: int = DEFAULT_BUDGET) -> SaturatedSet:
    """Extension-construction run: grow r to an x-saturated set not deriving a.

    The enumeration is members of x by (tree size, rendering), repeated
    cyclically until a full pass adds nothing.
    """
    base = frozenset(r)
    if not base <= x.members:
        raise ValueError("r must be a subset of the adequate set")
    bud = _Budget(budget)
    try:
        if _oracle(base, a, bud):
            raise ValueError("precondition violated: r already derives the goal")
        enum = sorted(x.members, key=lambda g: (size(g), render(g)))
        s = set(base)

        def pick_disjunct(d: Or) -> Formula:
            return d.left if not _oracle(s | {d.left}, a, bud) else d.right

        changed = True
        while changed:
            changed = False
            for b in enum:
                if b in s:
                    if isinstance(b, Or) and b.left not in s and b.right not in s:
                        s.add(pick_disjunct(b))
                        changed = True
                elif _oracle(s, b, bud):
                    s.add(b)
                    if isinstance(b, Or) and b.left not in s and b.right not in s:
                        s.add(pick_disjunct(b))
                    changed = True
        return SaturatedSet(frozenset(s))
    except _BudgetHit:
        raise BudgetExhausted(bud.used) from None
