"""NNIL class machinery and the star transform (left adjoint of NNIL ⊆ IPC).

A class table for a finite alphabet is the least fixpoint of: start from ⊥ and
the atoms; repeatedly add α→β for implication-free α and current classes β,
and close under ∧ and ∨; deduplicate by IPC equivalence.  Local finiteness of
NNIL makes the fixpoint terminate (guarded by a class-count budget).

Deduplication would be hopeless with prover calls alone, so every class keeps
a semantic fingerprint: its truth masks over a family of small intuitionistic
models.  Distinct fingerprints prove inequivalence outright; colliding ones
are confirmed by the prover, and a refuted equivalence contributes its
countermodel to the family, which keeps fingerprints separating as the table
grows.

star(a) is the disjunction of the implication-maximal class representatives R
with ⊢ R→a (equivalent to the disjunction over all such R, but small).
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (And, Atom, Bottom, Formula, Imp, Or, BOT,
                      atoms, is_box_free, render, substitute)
from .ipc import decide_ipc, ipc_provable, IpcInvalid
from .kripke import KripkeModel

__all__ = ["NnilClassTable", "AlphabetTooLarge", "ClassBudgetExceeded",
           "is_nnil", "enumerate_nnil_classes", "nnil_star",
           "DEFAULT_MAX_ATOMS", "DEFAULT_CLASS_BUDGET"]

DEFAULT_MAX_ATOMS = 3
DEFAULT_CLASS_BUDGET = 4000


class AlphabetTooLarge(ValueError):
    """More atoms than the configured alphabet cap."""


class ClassBudgetExceeded(RuntimeError):
    """The class fixpoint outgrew its budget; the alphabet is too large."""


def _contains_imp(f: Formula) -> bool:
    if isinstance(f, Imp):
        return True
    if isinstance(f, (And, Or)):
        return _contains_imp(f.left) or _contains_imp(f.right)
    return False


def is_nnil(a: Formula) -> bool:
    """No implication occurs in the antecedent of another implication."""
    if not is_box_free(a):
        raise ValueError(f"boxed formula not allowed here: {render(a)}")
    if isinstance(a, (Atom, Bottom)):
        return True
    if isinstance(a, (And, Or)):
        return is_nnil(a.left) and is_nnil(a.right)
    return not _contains_imp(a.left) and is_nnil(a.right)


# ---------------------------------------------------------------------------
# Fingerprint model family.

class _Family:
    """Small intuitionistic models compiled to successor bitmasks.

    A fingerprint is the tuple of per-model truth masks; the concatenation of
    all masks into one integer supports the pointwise-implication test
    (R valid→ a on the whole family iff concat(R) & ~concat(a) == 0).
    """

    def __init__(self, names: tuple[str, ...]):
        self.names = names
        # (world_count, leq successor masks per world, atom name -> truth mask)
        self.models: list[tuple[int, tuple[int, ...], dict[str, int]]] = []
        self.offsets: list[int] = []
        self.total_bits = 0
        for val in self._valuations(1, [0b1]):
            self._add_model(1, (0b1,), val)
        for val in self._valuations(2, [0b00, 0b10, 0b11]):
            self._add_model(2, (0b11, 0b10), val)
        fork_upsets = [0b000, 0b010, 0b100, 0b110, 0b111]
        for val in self._valuations(3, fork_upsets):
            self._add_model(3, (0b111, 0b010, 0b100), val)

    def _valuations(self, n: int, upsets: list[int]):
        vals = [{}]
        for name in self.names:
            vals = [{**v, name: up} for v in vals for up in upsets]
        return vals

    def _add_model(self, n: int, leq_succ: tuple[int, ...], val: dict[str, int]) -> None:
        self.models.append((n, leq_succ, val))
        self.offsets.append(self.total_bits)
        self.total_bits += n

    def add_kripke(self, model: KripkeModel) -> None:
        order = sorted(model.frame.worlds)
        idx = {w: i for i, w in enumerate(order)}
        succ = [0] * len(order)
        for a, b in model.frame.leq:
            succ[idx[a]] |= 1 << idx[b]
        val = {}
        for name in self.names:
            mask = 0
            for w in model.valuation.get(name, ()):
                mask |= 1 << idx[w]
            val[name] = mask
        self._add_model(len(order), tuple(succ), val)

    def eval(self, f: Formula) -> tuple[int, ...]:
        return tuple(self._eval_one(f, m) for m in self.models)

    def _eval_one(self, f: Formula, model) -> int:
        n, succ, val = model
        full = (1 << n) - 1
        if isinstance(f, Atom):
            return val.get(f.name, 0)
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, And):
            return self._eval_one(f.left, model) & self._eval_one(f.right, model)
        if isinstance(f, Or):
            return self._eval_one(f.left, model) | self._eval_one(f.right, model)
        fail = self._eval_one(f.left, model) & ~self._eval_one(f.right, model) & full
        mask = 0
        for i in range(n):
            if succ[i] & fail == 0:
                mask |= 1 << i
        return mask

    def imp_fp(self, fl: tuple[int, ...], fr: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for (n, succ, _), l, r in zip(self.models, fl, fr):
            fail = l & ~r & ((1 << n) - 1)
            mask = 0
            if fail == 0:
                mask = (1 << n) - 1
            else:
                for i in range(n):
                    if succ[i] & fail == 0:
                        mask |= 1 << i
            out.append(mask)
        return tuple(out)

    def concat(self, fp: tuple[int, ...]) -> int:
        total = 0
        for off, mask in zip(self.offsets, fp):
            total |= mask << off
        return total


# ---------------------------------------------------------------------------
# Canonical class tables, one per alphabet arity.

class _CanonicalTable:
    def __init__(self, arity: int, budget: int):
        self.names = tuple(f"a{i + 1}" for i in range(arity))
        self.budget = budget
        self.family = _Family(self.names)
        self.reps: list[Formula] = []
        self.fps: list[tuple[int, ...]] = []
        self.concats: list[int] = []
        self.by_concat: dict[int, int] = {}
        self.impl_free: list[int] = []
        self._leq_memo: dict[tuple[int, int], bool] = {}
        self._star_memo: dict[Formula, Formula] = {}
        self._build()

    # -- construction -------------------------------------------------------

    def _refingerprint(self) -> None:
        self.fps = [self.family.eval(rep) for rep in self.reps]
        self.concats = [self.family.concat(fp) for fp in self.fps]
        self.by_concat = {c: i for i, c in enumerate(self.concats)}
        self._leq_memo.clear()

    def _classify(self, cand: Formula, fp: tuple[int, ...]) -> int:
        """Return the class index of cand, inserting a new class if needed."""
        while True:
            key = self.family.concat(fp)
            idx = self.by_concat.get(key)
            if idx is None:
                if len(self.reps) >= self.budget:
                    raise ClassBudgetExceeded(
                        f"more than {self.budget} NNIL classes over "
                        f"{len(self.names)} names: the alphabet is too large "
                        "for full class enumeration")
                self.reps.append(cand)
                self.fps.append(fp)
                self.concats.append(key)
                self.by_concat[key] = len(self.reps) - 1
                return len(self.reps) - 1
            rep = self.reps[idx]
            if self._confirm_equiv(cand, rep):
                return idx
            fp = self.family.eval(cand)  # family grew inside _confirm_equiv

    def _confirm_equiv(self, a: Formula, b: Formula) -> bool:
        """Prover-confirmed equivalence; on failure the family gains a separator."""
        for x, y in ((a, b), (b, a)):
            if not ipc_provable((), Imp(x, y)):
                verdict = decide_ipc((), Imp(x, y))
                assert isinstance(verdict, IpcInvalid)
                self.family.add_kripke(verdict.countermodel)
                self._refingerprint()
                return False
        return True

    def _build(self) -> None:
        for seed in [BOT, *(Atom(n) for n in self.names)]:
            self._classify(seed, self.family.eval(seed))
        # Implication-free classes: close atoms ∪ {⊥} under ∧,∨ first.
        frontier = 0
        while frontier < len(self.reps):
            top = len(self.reps)
            for i in range(top):
                for j in range(max(i, frontier), top):
                    for comb in (And(self.reps[i], self.reps[j]), Or(self.reps[i], self.reps[j])):
                        fp = self.family.eval(comb)
                        self._classify(comb, fp)
            frontier = top
        self.impl_free = list(range(len(self.reps)))
        # Main fixpoint: arrows over current classes, then ∧/∨ closure, repeat.
        arrow_done: set[tuple[int, int]] = set()
        pair_done: set[tuple[int, int]] = set()
        while True:
            top = len(self.reps)
            for ai in self.impl_free:
                for bi in range(top):
                    if (ai, bi) in arrow_done:
                        continue
                    arrow_done.add((ai, bi))
                    cand = Imp(self.reps[ai], self.reps[bi])
                    fp = self.family.imp_fp(self.fps[ai], self.fps[bi])
                    self._classify(cand, fp)
            top2 = len(self.reps)
            for i in range(top2):
                for j in range(i, top2):
                    if (i, j) in pair_done:
                        continue
                    pair_done.add((i, j))
                    x, y = self.reps[i], self.reps[j]
                    self._classify(And(x, y),
                                   tuple(a & b for a, b in zip(self.fps[i], self.fps[j])))
                    self._classify(Or(x, y),
                                   tuple(a | b for a, b in zip(self.fps[i], self.fps[j])))
            if len(self.reps) == top:
                break

    # -- queries -------------------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        """⊢ reps[i] → reps[j], fingerprint-screened and prover-confirmed."""
        if i == j:
            return True
        hit = self._leq_memo.get((i, j))
        if hit is None:
            hit = (self.concats[i] & ~self.concats[j] == 0
                   and ipc_provable((), Imp(self.reps[i], self.reps[j])))
            self._leq_memo[(i, j)] = hit
        return hit

    def star(self, f: Formula) -> Formula:
        out = self._star_memo.get(f)
        if out is not None:
            return out
        target = self.family.concat(self.family.eval(f))
        selected = [i for i in range(len(self.reps))
                    if self.concats[i] & ~target == 0
                    and ipc_provable((), Imp(self.reps[i], f))]
        maximal = [i for i in selected
                   if not any(j != i and self.leq(i, j) for j in selected)]
        result: Formula = BOT
        for k, i in enumerate(maximal):
            result = self.reps[i] if k == 0 else Or(result, self.reps[i])
        self._star_memo[f] = result
        return result


_tables: dict[tuple[int, int], _CanonicalTable] = {}


def _canonical_table(arity: int, budget: int) -> _CanonicalTable:
    tbl = _tables.get((arity, budget))
    if tbl is None:
        tbl = _CanonicalTable(arity, budget)
        _tables[(arity, budget)] = tbl
    return tbl


# ---------------------------------------------------------------------------
# Public surface.

@dataclass(frozen=True)
class NnilClassTable:
    """Pairwise IPC-inequivalent NNIL representatives over a finite alphabet."""

    atoms: tuple[str, ...]
    representatives: tuple[Formula, ...]


def enumerate_nnil_classes(atom_names, budget: int = DEFAULT_CLASS_BUDGET,
                           max_atoms: int = DEFAULT_MAX_ATOMS) -> NnilClassTable:
    """Least fixpoint of the NNIL class construction over the given atoms."""
    names = tuple(atom_names)
    if len(set(names)) != len(names):
        raise ValueError("duplicate atom names")
    if len(names) > max_atoms:
        raise AlphabetTooLarge(f"{len(names)} atoms exceeds the cap of {max_atoms}")
    tbl = _canonical_table(len(names), budget)
    back = {c: Atom(n) for c, n in zip(tbl.names, names)}
    return NnilClassTable(names, tuple(substitute(r, back) for r in tbl.reps))


def nnil_star(a: Formula, max_atoms: int = DEFAULT_MAX_ATOMS,
              budget: int = DEFAULT_CLASS_BUDGET) -> Formula:
    """Strongest NNIL consequence-preserving approximation from below.

    The output O satisfies ⊢ O → a, and ⊢ B → O for every NNIL class
    representative B with ⊢ B → a.
    """
    if not is_box_free(a):
        raise ValueError(f"boxed formula not allowed here: {render(a)}")
    names = sorted(atoms(a))
    if len(names) > max_atoms:
        raise AlphabetTooLarge(f"{len(names)} atoms exceeds the cap of {max_atoms}")
    tbl = _canonical_table(len(names), budget)
    fwd = {n: Atom(c) for n, c in zip(names, tbl.names)}
    back = {c: Atom(n) for n, c in zip(names, tbl.names)}
    return substitute(tbl.star(substitute(a, fwd)), back)
