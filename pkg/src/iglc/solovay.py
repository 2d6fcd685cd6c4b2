"""Extension of a finite rooted model by an infinite descending tail, with
symbolic truth sets.

A finite irreflexive realistic model with a ⪯-least root (relabeled so the
worlds are {1..r} and the root is r) is extended to carrier ℕ: each tail world
i > r sits ⪯-below all of {1..i} and ⊏-above nothing except {1..i-1}, and
world 0 sits ⪯-below everything and ⊏-below all positive worlds.  Atoms hold
only on the core, so every formula's truth set is either finite or all of ℕ.

Truth sets are computed through a finite horizon H = r + |sub(A)| + 1: the
tail profiles (sets of subformulas forced at tail worlds) shrink monotonically
and must repeat within |sub(A)| steps, after which they are constant; world 0
is evaluated by dedicated clauses against the stabilized profile.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import And, Atom, Bottom, Formula, Imp, Or, render, size, subsentences
from .kripke import KripkeModel, check_frame, forces

__all__ = ["ExtendedModel", "TruthSet", "extend_model", "truth_set", "tail_profiles"]


@dataclass(frozen=True)
class TruthSet:
    """Either a finite set of worlds of the extended model, or all of ℕ."""

    all_worlds: bool
    worlds: frozenset[int] = frozenset()

    @staticmethod
    def every() -> "TruthSet":
        return TruthSet(True)

    @staticmethod
    def finite(worlds) -> "TruthSet":
        ws = frozenset(worlds)
        assert 0 not in ws, "forcing at world 0 spreads everywhere"
        return TruthSet(False, ws)

    def __contains__(self, world: int) -> bool:
        return self.all_worlds or world in self.worlds

    def __str__(self) -> str:
        if self.all_worlds:
            return "ALL"
        return "{" + ",".join(map(str, sorted(self.worlds))) + "}"


class ExtendedModel:
    """A finite rooted realistic core {1..r} plus the implied infinite tail."""

    __slots__ = ("core", "r")

    def __init__(self, core: KripkeModel, r: int):
        self.core = core
        self.r = r

    def __repr__(self):
        return f"ExtendedModel(r={self.r})"

    def leq(self, i: int, j: int) -> bool:
        r = self.r
        if 1 <= i <= r and 1 <= j <= r:
            return (i, j) in self.core.frame.leq
        return (i > r and 1 <= j <= i) or i == 0

    def sqsubset(self, i: int, j: int) -> bool:
        r = self.r
        if 1 <= i <= r and 1 <= j <= r:
            return (i, j) in self.core.frame.r
        return (i > r and 1 <= j < i) or (i == 0 and j > 0)

    def holds_atom(self, name: str, i: int) -> bool:
        return 1 <= i <= self.r and i in self.core.valuation.get(name, ())


def extend_model(core: KripkeModel) -> ExtendedModel:
    """Relabel the core to {1..r} with the root at r and attach the tail.

    The core must be finite, irreflexive, realistic (a poset with the model
    property comes with KripkeModel) and possess a ⪯-least element.
    """
    rep = check_frame(core.frame)
    if not rep.irreflexive:
        raise ValueError("core not irreflexive")
    if not rep.realistic:
        raise ValueError("core not realistic")
    worlds = sorted(core.frame.worlds)
    least = [w for w in worlds
             if all((w, v) in core.frame.leq for v in worlds)]
    if not least:
        raise ValueError("core has no least element under the intuitionistic order")
    root = least[0]
    r = len(worlds)
    relabel = {root: r}
    for i, w in enumerate(sorted(set(worlds) - {root})):
        relabel[w] = i + 1
    new_core = KripkeModel.make(
        [relabel[w] for w in worlds],
        {(relabel[a], relabel[b]) for a, b in core.frame.leq},
        {(relabel[a], relabel[b]) for a, b in core.frame.r},
        {p: {relabel[w] for w in ws} for p, ws in core.valuation.items()})
    return ExtendedModel(new_core, r)


def _horizon(m: ExtendedModel, a: Formula) -> int:
    return m.r + len(subsentences(a)) + 1


def _truth_table(m: ExtendedModel, a: Formula) -> dict[Formula, list[bool]]:
    """Truth of every subformula at worlds 1..H (index = world), then world 0.

    Core worlds keep their core forcing (their successor sets do not change
    under the extension); tail worlds are evaluated in increasing order, and
    world 0 last, by its dedicated clauses.
    """
    r, H = m.r, _horizon(m, a)
    subs = sorted(subsentences(a), key=lambda f: (size(f), render(f)))
    truth: dict[Formula, list[bool]] = {f: [False] * (H + 1) for f in subs}

    for f in subs:
        for i in range(1, r + 1):
            truth[f][i] = forces(m.core, i, f)

    for i in range(r + 1, H + 1):
        for f in subs:
            row = truth[f]
            if isinstance(f, Atom):
                row[i] = False
            elif isinstance(f, Bottom):
                row[i] = False
            elif isinstance(f, And):
                row[i] = truth[f.left][i] and truth[f.right][i]
            elif isinstance(f, Or):
                row[i] = truth[f.left][i] or truth[f.right][i]
            elif isinstance(f, Imp):
                lrow, rrow = truth[f.left], truth[f.right]
                row[i] = all(rrow[j] or not lrow[j] for j in range(1, i + 1))
            else:
                irow = truth[f.inner]
                row[i] = all(irow[j] for j in range(1, i))

    stable = {f for f in subs if truth[f][H]}
    if stable != {f for f in subs if truth[f][H - 1]}:
        raise AssertionError("tail profiles failed to stabilize within the horizon")

    zero: dict[Formula, bool] = {}
    for f in subs:
        if isinstance(f, (Atom, Bottom)):
            zero[f] = False
        elif isinstance(f, And):
            zero[f] = zero[f.left] and zero[f.right]
        elif isinstance(f, Or):
            zero[f] = zero[f.left] or zero[f.right]
        elif isinstance(f, Imp):
            pointwise = all(truth[f.right][j] or not truth[f.left][j]
                            for j in range(1, H + 1))
            zero[f] = pointwise and (zero[f.right] or not zero[f.left])
        else:
            zero[f] = (f.inner in stable
                       and all(truth[f.inner][j] for j in range(1, m.r + 1)))
    for f in subs:
        truth[f][0] = zero[f]
    return truth


def truth_set(m: ExtendedModel, a: Formula) -> TruthSet:
    """The exact truth set of a in the infinite extended model."""
    H = _horizon(m, a)
    truth = _truth_table(m, a)
    row = truth[a]
    if row[0]:
        assert all(row[i] for i in range(1, H + 1)), \
            "world 0 forced the formula but a positive world refutes it"
        return TruthSet.every()
    assert not row[H], "formula stabilized true on the tail but fails at world 0"
    return TruthSet.finite(i for i in range(1, H + 1) if row[i])


def tail_profiles(m: ExtendedModel, a: Formula) -> list[frozenset[Formula]]:
    """Subformula profiles forced at the tail worlds r+1 … H, in order."""
    truth = _truth_table(m, a)
    H = _horizon(m, a)
    subs = subsentences(a)
    return [frozenset(f for f in subs if truth[f][i])
            for i in range(m.r + 1, H + 1)]
