"""Decision procedure for intuitionistic propositional logic with countermodels.

Provability is decided by terminating contraction-free backward sequent search
(the G4ip rule set), memoized on saturated sequents.  Two sound refutation
shortcuts run first: a classical truth-table scan (classical refutability
implies intuitionistic refutability) and a scan over previously discovered
countermodels.  Countermodels themselves come from a separate saturation
construction: worlds are deductively saturated subsets of the subformula
closure, built on demand from the failure points of the query.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache

from .formula import (And, Atom, Bottom, Formula, Imp, Or, BOT, TOP,
                      atoms, is_box_free, render, size, subsentences)
from .kripke import KripkeModel, forces

__all__ = ["IpcValid", "IpcInvalid", "IpcVerdict", "decide_ipc", "ipc_provable",
           "ipc_equiv", "clear_caches"]

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

_CLASSICAL_ATOM_CAP = 10

_memo: dict[tuple[frozenset[Formula], Formula], bool] = {}
_equiv_memo: dict[tuple[Formula, Formula], bool] = {}
_refuters: list[KripkeModel] = []
_REFUTER_CAP = 128


def clear_caches() -> None:
    _memo.clear()
    _equiv_memo.clear()
    _refuters.clear()


@dataclass(frozen=True)
class IpcValid:
    pass


@dataclass(frozen=True)
class IpcInvalid:
    countermodel: KripkeModel
    world: int


IpcVerdict = IpcValid | IpcInvalid


def _require_box_free(fs) -> None:
    for f in fs:
        if not is_box_free(f):
            raise ValueError(f"boxed formula not allowed here: {render(f)}")


# ---------------------------------------------------------------------------
# Classical truth-table refutation (sound filter: IPC ⊆ classical logic).
# Each formula is evaluated once as a 2^k-bit vector over all assignments.

@lru_cache(maxsize=None)
def _classical_vector(f: Formula, names: tuple[str, ...]) -> int:
    if isinstance(f, Atom):
        i = names.index(f.name)
        block = (1 << (1 << i)) - 1
        pattern = 0
        for hi in range(1 << (len(names) - i - 1)):
            pattern |= block << ((2 * hi + 1) << i)
        return pattern
    if isinstance(f, Bottom):
        return 0
    full = (1 << (1 << len(names))) - 1
    if isinstance(f, And):
        return _classical_vector(f.left, names) & _classical_vector(f.right, names)
    if isinstance(f, Or):
        return _classical_vector(f.left, names) | _classical_vector(f.right, names)
    return (~_classical_vector(f.left, names) | _classical_vector(f.right, names)) & full


def _classically_refuted(ctx: frozenset[Formula], goal: Formula) -> bool:
    names = sorted(set().union(atoms(goal), *(atoms(f) for f in ctx)))
    if len(names) > _CLASSICAL_ATOM_CAP:
        return False
    names = tuple(names)
    bad = ~_classical_vector(goal, names) & ((1 << (1 << len(names))) - 1)
    for f in ctx:
        if not bad:
            return False
        bad &= _classical_vector(f, names)
    return bool(bad)


def _refuted_by_cache(ctx: frozenset[Formula], goal: Formula) -> bool:
    from .kripke import _evaluator
    for m in _refuters:
        ev = _evaluator(m)
        bad = ~ev.truth_mask(goal) & ev.full
        for f in ctx:
            if not bad:
                break
            bad &= ev.truth_mask(f)
        if bad:
            return True
    return False


# ---------------------------------------------------------------------------
# G4ip backward proof search.

def _saturate_context(work: set[Formula], goal: Formula):
    """Apply non-branching invertible rules to a fixpoint.

    Returns (work, goal, proved) where proved=True short-circuits the search.
    """
    while True:
        if BOT in work or goal in work:
            return work, goal, True
        if isinstance(goal, Imp):
            work.add(goal.left)
            goal = goal.right
            continue
        changed = False
        for f in list(work):
            if isinstance(f, And):
                work.discard(f)
                work.add(f.left)
                work.add(f.right)
                changed = True
            elif isinstance(f, Imp):
                l = f.left
                if isinstance(l, Bottom):
                    work.discard(f)          # ⊥→B carries no information
                    changed = True
                elif l == TOP or l == f.right:
                    work.discard(f)
                    if l != f.right:
                        work.add(f.right)    # ⊤→B reduces to B
                    changed = True
                elif isinstance(l, Atom):
                    if l in work:            # L0→: p, p→B ⇒ keep p, get B
                        work.discard(f)
                        work.add(f.right)
                        changed = True
                elif isinstance(l, And):
                    work.discard(f)          # (C∧D)→B ⇒ C→(D→B)
                    work.add(Imp(l.left, Imp(l.right, f.right)))
                    changed = True
                elif isinstance(l, Or):
                    work.discard(f)          # (C∨D)→B ⇒ C→B, D→B
                    work.add(Imp(l.left, f.right))
                    work.add(Imp(l.right, f.right))
                    changed = True
        if not changed:
            return work, goal, False


def _search(ctx: frozenset[Formula], goal: Formula) -> bool:
    work, goal, proved = _saturate_context(set(ctx), goal)
    if proved:
        return True
    key = (frozenset(work), goal)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    _memo[key] = False  # cycle guard; G4ip terminates, this is belt and braces
    result = _decide_saturated(key[0], goal)
    _memo[key] = result
    return result


def _decide_saturated(ctx: frozenset[Formula], goal: Formula) -> bool:
    # Goal is an atom, ⊥, ∧ or ∨ here; context has no ∧ and no reducible →.
    if isinstance(goal, And):
        return _search(ctx, goal.left) and _search(ctx, goal.right)
    for f in ctx:
        if isinstance(f, Or):  # L∨ is invertible: split on the first disjunction
            rest = ctx - {f}
            return (_search(rest | {f.left}, goal)
                    and _search(rest | {f.right}, goal))
    # Choice points: R∨ halves and L→→ for each nested implication.
    if isinstance(goal, Or):
        if _search(ctx, goal.left) or _search(ctx, goal.right):
            return True
    for f in ctx:
        if isinstance(f, Imp) and isinstance(f.left, Imp):
            c, d = f.left.left, f.left.right
            rest = ctx - {f}
            if (_search(rest | {Imp(d, f.right)}, f.left)
                    and _search(rest | {f.right}, goal)):
                return True
    return False


def ipc_provable(context, goal: Formula) -> bool:
    """Decide Γ ⊢_IPC goal for box-free inputs."""
    ctx = frozenset(context)
    _require_box_free(ctx)
    _require_box_free((goal,))
    if _classically_refuted(ctx, goal):
        return False
    if _refuted_by_cache(ctx, goal):
        return False
    result = _search(ctx, goal)
    if not result and len(_refuters) < _REFUTER_CAP and size(goal) + sum(map(size, ctx)) <= 26:
        model, _ = _build_countermodel(ctx, goal)
        _refuters.append(model)
    return result


# ---------------------------------------------------------------------------
# Countermodel construction by saturation.
#
# Worlds are saturated subsets of the subformula closure X: consistent,
# deductively closed within X, and containing a disjunct of each member
# disjunction.  Witness worlds for unprovable implications are generated
# recursively; the intuitionistic order is set inclusion.

def _enumeration(X) -> list[Formula]:
    return sorted(X, key=lambda f: (size(f), render(f)))


def _saturate_set(base: frozenset[Formula], avoid: Formula,
                  enum: list[Formula]) -> frozenset[Formula]:
    s = set(base)
    changed = True
    while changed:
        changed = False
        for b in enum:
            if b in s:
                if isinstance(b, Or) and b.left not in s and b.right not in s:
                    pick = b.left if not _search(frozenset(s | {b.left}), avoid) else b.right
                    s.add(pick)
                    changed = True
            elif _search(frozenset(s), b):
                s.add(b)
                if isinstance(b, Or) and b.left not in s and b.right not in s:
                    pick = b.left if not _search(frozenset(s | {b.left}), avoid) else b.right
                    s.add(pick)
                changed = True
    return frozenset(s)


def _build_countermodel(ctx: frozenset[Formula], goal: Formula) -> tuple[KripkeModel, int]:
    X = set(subsentences(goal))
    for f in ctx:
        X |= subsentences(f)
    enum = _enumeration(X)
    imps = [f for f in enum if isinstance(f, Imp)]

    sats: list[frozenset[Formula]] = []
    ids: dict[frozenset[Formula], int] = {}

    def register(sat: frozenset[Formula]) -> int:
        wid = ids.get(sat)
        if wid is None:
            sats.append(sat)
            wid = len(sats)
            ids[sat] = wid
        return wid

    root = register(_saturate_set(ctx, goal, enum))
    queue = [sats[0]]
    while queue:
        w = queue.pop(0)
        for f in imps:
            if f in w or f.left in w:
                continue  # w itself witnesses f.left∈, f.right∉ when f.left ∈ w
            child = _saturate_set(w | {f.left}, f.right, enum)
            if child not in ids:
                register(child)
                queue.append(child)

    worlds = range(1, len(sats) + 1)
    leq = {(i, j) for i in worlds for j in worlds if sats[i - 1] <= sats[j - 1]}
    val: dict[str, set[int]] = {}
    for i in worlds:
        for f in sats[i - 1]:
            if isinstance(f, Atom):
                val.setdefault(f.name, set()).add(i)
    model = KripkeModel.make(worlds, leq, frozenset(), val)
    return _shrink_model(model, root, ctx, goal)


def _shrink_model(model: KripkeModel, root: int, ctx, goal) -> tuple[KripkeModel, int]:
    """Greedily drop worlds while the root still refutes the sequent."""

    def restricted(keep: set[int]) -> KripkeModel:
        return KripkeModel.make(
            keep,
            {p for p in model.frame.leq if p[0] in keep and p[1] in keep},
            {p for p in model.frame.r if p[0] in keep and p[1] in keep},
            {name: ws & keep for name, ws in model.valuation.items()})

    keep = set(model.frame.worlds)
    changed = len(keep) <= 24
    while changed:
        changed = False
        for w in sorted(keep, reverse=True):
            if w == root or len(keep) == 1:
                continue
            trial = restricted(keep - {w})
            if not forces(trial, root, goal) and all(forces(trial, root, f) for f in ctx):
                keep.discard(w)
                changed = True
    final = restricted(keep)
    relabel = {w: i + 1 for i, w in enumerate(sorted(keep))}
    out = KripkeModel.make(
        sorted(relabel.values()),
        {(relabel[a], relabel[b]) for a, b in final.frame.leq},
        {(relabel[a], relabel[b]) for a, b in final.frame.r},
        {name: {relabel[w] for w in ws} for name, ws in final.valuation.items()})
    return out, relabel[root]


def decide_ipc(assumptions, goal: Formula) -> IpcVerdict:
    """Decide ⋀assumptions → goal in IPC; Invalid carries a refuting model."""
    ctx = frozenset(assumptions)
    _require_box_free(ctx)
    _require_box_free((goal,))
    if ipc_provable(ctx, goal):
        return IpcValid()
    model, root = _build_countermodel(ctx, goal)
    assert not forces(model, root, goal) and all(forces(model, root, f) for f in ctx), \
        "internal error: countermodel failed its own check"
    return IpcInvalid(model, root)


def ipc_equiv(a: Formula, b: Formula) -> bool:
    """IPC interderivability of two box-free formulas."""
    if a == b:
        return True
    key = (a, b) if (size(a), render(a)) <= (size(b), render(b)) else (b, a)
    hit = _equiv_memo.get(key)
    if hit is None:
        hit = ipc_provable((), Imp(a, b)) and ipc_provable((), Imp(b, a))
        _equiv_memo[key] = hit
    return hit
