"""Finite bi-relational Kripke frames and models, forcing, frame-property checks.

A frame carries an intuitionistic partial order ``leq`` (⪯) and a modal
relation ``r`` (⊏) subject to the model property ⪯∘⊏ ⊆ ⊏.  Worlds are small
integers; relations are explicit pair sets.  Evaluation uses per-world
successor bitmasks internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from .formula import And, Atom, Bottom, Box, Formula, Imp, Or, atoms

__all__ = [
    "Frame", "KripkeModel", "FrameReport", "ModelError",
    "check_frame", "forces", "valid_on_model", "valid_on_frame",
    "model_to_json", "model_from_json", "model_to_dot", "upward_closed_sets",
]

VALID_ON_FRAME_WORLD_LIMIT = 8


class ModelError(ValueError):
    """Raised on malformed or invariant-violating model data."""


@dataclass(frozen=True)
class Frame:
    """Raw frame data; invariants are reported by check_frame, not enforced here."""

    worlds: frozenset[int]
    leq: frozenset[tuple[int, int]]
    r: frozenset[tuple[int, int]]

    @staticmethod
    def make(worlds, leq, r) -> "Frame":
        return Frame(frozenset(worlds),
                     frozenset((int(a), int(b)) for a, b in leq),
                     frozenset((int(a), int(b)) for a, b in r))


@dataclass(frozen=True)
class FrameReport:
    is_poset: bool
    has_model_property: bool
    irreflexive: bool
    transitive: bool
    semi_transitive: bool
    realistic: bool
    conversely_well_founded: bool

    def as_dict(self) -> dict[str, bool]:
        return dict(self.__dict__)


def _has_cycle(worlds, succ) -> bool:
    # Iterative DFS; a back edge in r means some nonempty set lacks a maximal element.
    color = {w: 0 for w in worlds}
    for start in worlds:
        if color[start]:
            continue
        stack = [(start, iter(succ.get(start, ())))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return True
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


def check_frame(frame: Frame) -> FrameReport:
    """Evaluate the seven frame properties by direct definition on finite data.

    Successor bitmasks keep the relational composites near-linear in the
    number of relation pairs.
    """
    ws = frame.worlds
    leq, r = frame.leq, frame.r
    order = sorted(ws)
    idx = {w: i for i, w in enumerate(order)}
    leq_succ = [0] * len(order)
    r_succ = [0] * len(order)
    for a, b in leq:
        leq_succ[idx[a]] |= 1 << idx[b]
    for a, b in r:
        r_succ[idx[a]] |= 1 << idx[b]
    reflexive = all(leq_succ[i] >> i & 1 for i in range(len(order)))
    antisym = all(not (leq_succ[idx[b]] >> idx[a] & 1)
                  for a, b in leq if a != b)
    leq_trans = all(leq_succ[idx[b]] & ~leq_succ[idx[a]] == 0 for a, b in leq)
    is_poset = reflexive and antisym and leq_trans
    model_property = all(r_succ[idx[b]] & ~r_succ[idx[a]] == 0 for a, b in leq)
    irreflexive = all(not (r_succ[i] >> i & 1) for i in range(len(order)))
    transitive = all(r_succ[idx[b]] & ~r_succ[idx[a]] == 0 for a, b in r)
    # ⊏∘⊏ ⊆ ⊏∘⪯: anything two ⊏-steps away is one ⊏-step then ⪯-up.
    reach_up = []
    for i in range(len(order)):
        u = 0
        m = r_succ[i]
        while m:
            j = (m & -m).bit_length() - 1
            u |= leq_succ[j]
            m &= m - 1
        reach_up.append(u)
    semi_transitive = all(r_succ[idx[b]] & ~reach_up[idx[a]] == 0 for a, b in r)
    realistic = r <= leq
    succ: dict[int, list[int]] = {}
    for a, b in r:
        succ.setdefault(a, []).append(b)
    cwf = not _has_cycle(ws, succ)
    return FrameReport(is_poset, model_property, irreflexive, transitive,
                       semi_transitive, realistic, cwf)


class KripkeModel:
    """Frame plus monotone valuation; invariants are checked at construction."""

    __slots__ = ("frame", "valuation")

    def __init__(self, frame: Frame, valuation: dict[str, frozenset[int]] | None = None):
        self.frame = frame
        self.valuation = {p: frozenset(v) for p, v in (valuation or {}).items()}
        ws = frame.worlds
        if not ws:
            raise ModelError("empty world set")
        for rel, name in ((frame.leq, "leq"), (frame.r, "r")):
            for a, b in rel:
                if a not in ws or b not in ws:
                    raise ModelError(f"{name} pair ({a},{b}) mentions unknown world")
        rep = check_frame(frame)
        if not rep.is_poset:
            raise ModelError("leq is not a partial order")
        if not rep.has_model_property:
            raise ModelError("model property fails (leq∘r ⊄ r)")
        for p, trues in self.valuation.items():
            if not trues <= ws:
                raise ModelError(f"valuation of {p!r} mentions unknown world")
            for a, b in frame.leq:
                if a in trues and b not in trues:
                    raise ModelError(f"valuation of {p!r} not monotone ({a}⪯{b})")

    def __hash__(self):
        return hash((self.frame, tuple(sorted(self.valuation.items()))))

    def __eq__(self, other):
        return (isinstance(other, KripkeModel) and self.frame == other.frame
                and self.valuation == other.valuation)

    def __repr__(self):
        return f"KripkeModel({self.frame!r}, {self.valuation!r})"

    @staticmethod
    def make(worlds, leq, r, valuation) -> "KripkeModel":
        return KripkeModel(Frame.make(worlds, leq, r),
                           {p: frozenset(v) for p, v in valuation.items()})


class _Evaluator:
    """Per-model bitmask evaluation of all subformulas, cached by formula."""

    def __init__(self, model: KripkeModel):
        self.model = model
        self.order = sorted(model.frame.worlds)
        self.index = {w: i for i, w in enumerate(self.order)}
        n = len(self.order)
        self.full = (1 << n) - 1
        self.leq_succ = [0] * n
        self.r_succ = [0] * n
        for a, b in model.frame.leq:
            self.leq_succ[self.index[a]] |= 1 << self.index[b]
        for a, b in model.frame.r:
            self.r_succ[self.index[a]] |= 1 << self.index[b]
        self.cache: dict[Formula, int] = {}

    def truth_mask(self, f: Formula) -> int:
        m = self.cache.get(f)
        if m is None:
            m = self._compute(f)
            self.cache[f] = m
        return m

    def _compute(self, f: Formula) -> int:
        if isinstance(f, Atom):
            mask = 0
            for w in self.model.valuation.get(f.name, ()):
                mask |= 1 << self.index[w]
            return mask
        if isinstance(f, Bottom):
            return 0
        if isinstance(f, And):
            return self.truth_mask(f.left) & self.truth_mask(f.right)
        if isinstance(f, Or):
            return self.truth_mask(f.left) | self.truth_mask(f.right)
        if isinstance(f, Imp):
            fail = self.truth_mask(f.left) & ~self.truth_mask(f.right)
            return self._all_succ(self.leq_succ, ~fail & self.full)
        if isinstance(f, Box):
            return self._all_succ(self.r_succ, self.truth_mask(f.inner))
        raise TypeError(f"not a formula: {f!r}")

    def _all_succ(self, succ: list[int], good: int) -> int:
        mask = 0
        for i in range(len(self.order)):
            if succ[i] & ~good == 0:
                mask |= 1 << i
        return mask


_EVALUATORS: dict[int, tuple[KripkeModel, _Evaluator]] = {}


def _evaluator(model: KripkeModel) -> _Evaluator:
    hit = _EVALUATORS.get(id(model))
    if hit is not None and hit[0] is model:
        return hit[1]
    ev = _Evaluator(model)
    if len(_EVALUATORS) > 256:
        _EVALUATORS.clear()
    _EVALUATORS[id(model)] = (model, ev)
    return ev


def forces(model: KripkeModel, world: int, f: Formula) -> bool:
    """The forcing relation M,w ⊩ A."""
    ev = _evaluator(model)
    if world not in ev.index:
        raise ModelError(f"unknown world id {world}")
    return bool(ev.truth_mask(f) >> ev.index[world] & 1)


def valid_on_model(model: KripkeModel, f: Formula) -> bool:
    """True iff f is forced at every world."""
    ev = _evaluator(model)
    return ev.truth_mask(f) == ev.full


def upward_closed_sets(worlds, leq) -> list[frozenset[int]]:
    """All ⪯-upward-closed subsets of a finite poset, in a deterministic order."""
    order = sorted(worlds)
    ups = []
    for bits in range(1 << len(order)):
        chosen = {order[i] for i in range(len(order)) if bits >> i & 1}
        if all(b in chosen for a, b in leq if a in chosen):
            ups.append(frozenset(chosen))
    return ups


def valid_on_frame(frame: Frame, f: Formula, world_limit: int = VALID_ON_FRAME_WORLD_LIMIT) -> bool:
    """True iff f holds under every monotone valuation of its atoms.

    Only the atoms occurring in f need a valuation; refuses frames larger than
    the world limit (the valuation space is exponential in |W|).
    """
    if len(frame.worlds) > world_limit:
        raise ModelError(
            f"frame has {len(frame.worlds)} worlds; valid_on_frame limit is {world_limit}")
    names = sorted(atoms(f))
    ups = upward_closed_sets(frame.worlds, frame.leq)
    assignment: dict[str, frozenset[int]] = {}

    def go(i: int) -> bool:
        if i == len(names):
            model = KripkeModel(frame, dict(assignment))
            return valid_on_model(model, f)
        for up in ups:
            assignment[names[i]] = up
            if not go(i + 1):
                return False
        return True

    return go(0)


# ---------------------------------------------------------------------------
# JSON and DOT interchange.

def model_to_json(model: KripkeModel) -> str:
    worlds = sorted(model.frame.worlds)
    leq = sorted((a, b) for a, b in model.frame.leq if a != b)
    r = sorted(model.frame.r)
    val = {p: sorted(v) for p, v in sorted(model.valuation.items()) if v}
    return json.dumps({"worlds": worlds, "leq": [list(p) for p in leq],
                       "r": [list(p) for p in r], "val": val})


def model_from_json(text: str) -> KripkeModel:
    """Load a model; reflexive ⪯ pairs may be omitted and are added here."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"bad model JSON: {e}") from None
    if not isinstance(data, dict):
        raise ModelError("model JSON must be an object")
    try:
        worlds = [int(w) for w in data["worlds"]]
        leq = {(int(a), int(b)) for a, b in data.get("leq", [])}
        r = {(int(a), int(b)) for a, b in data.get("r", [])}
        val = {str(p): [int(w) for w in ws] for p, ws in data.get("val", {}).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"bad model JSON structure: {e}") from None
    leq |= {(w, w) for w in worlds}
    return KripkeModel.make(worlds, leq, r, val)


def _hasse(worlds, leq) -> set[tuple[int, int]]:
    strict = {(a, b) for a, b in leq if a != b}
    return {(a, b) for a, b in strict
            if not any((a, z) in strict and (z, b) in strict for z in worlds)}


def model_to_dot(model: KripkeModel) -> str:
    """DOT export: solid edges ⊏, dashed edges the Hasse reduction of ⪯."""
    worlds = sorted(model.frame.worlds)
    lines = ["digraph model {"]
    for w in worlds:
        forced = ",".join(p for p in sorted(model.valuation) if w in model.valuation[p])
        label = f"{w}: {forced}" if forced else str(w)
        lines.append(f'  w{w} [label="{label}"];')
    for a, b in sorted(model.frame.r):
        lines.append(f"  w{a} -> w{b};")
    for a, b in sorted(_hasse(worlds, model.frame.leq)):
        lines.append(f"  w{a} -> w{b} [style=dashed];")
    lines.append("}")
    return "\n".join(lines)
