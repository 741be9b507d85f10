"""Small cancellation conditions C(n), C'(lambda), Gr(n) and Gr'(lambda).

Only simple cycles are inspected: a reduced closed path that is a short
concatenation of pieces contains a simple cycle that is one as well, so the
answer over simple cycles equals the answer over all nontrivial closed paths
(the tests confirm this by brute force on small graphs).

Minimal circular segmentation.  Let ``ext[i]`` be the longest piece starting
at edge ``i`` of a cycle.  Pieces are closed under subpaths, so a piece may
always be shortened; hence from a fixed cut point the greedy "jump as far as
possible" segmentation is optimal, and minimising over all cut points gives
the exact minimum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InputError, PreconditionFailed
from .graph_core import DEFAULT_CYCLE_BUDGET, Cycle, LabelledGraph, format_word, simple_cycles
from .pieces import CLOSED_PATH_NOTE, ORBIT_CONVENTION_NOTE, PieceIndex

CANONICAL_CYCLE_NOTE = "cycles are reported at their lexicographically least rotation and orientation"


@dataclass(frozen=True)
class Condition:
    kind: str  # "C", "Cp", "Gr", "Grp"
    n: int | None = None
    ratio: Fraction | None = None

    @property
    def essential(self) -> bool:
        return self.kind in ("Gr", "Grp")

    @property
    def metric(self) -> bool:
        return self.kind in ("Cp", "Grp")

    def __str__(self) -> str:
        if self.metric:
            return f"{self.kind}:{self.ratio}"
        return f"{self.kind}{self.n}"


def parse_condition(text: str) -> Condition:
    """Parse ``C7``, ``Gr6``, ``Cp:1/6`` or ``Grp:1/6``."""
    m = re.fullmatch(r"(C|Gr)(\d+)", text.strip())
    if m:
        return Condition(m.group(1), n=int(m.group(2)))
    m = re.fullmatch(r"(Cp|Grp):(\d+)/(\d+)", text.strip())
    if m:
        ratio = Fraction(int(m.group(2)), int(m.group(3)))
        if ratio <= 0:
            raise InputError("ratio must be positive")
        return Condition(m.group(1), ratio=ratio)
    raise InputError(f"cannot parse condition {text!r}")


@dataclass
class CycleStats:
    cycle: Cycle
    max_piece: int
    min_segments: int | None  # None when some edge is not a piece
    segmentation: list[tuple[int, int]] | None

    @property
    def unsegmentable(self) -> bool:
        return self.min_segments is None

    def to_dict(self, g: LabelledGraph) -> dict:
        return {
            "length": len(self.cycle),
            "word": format_word(self.cycle.word, g.alphabet),
            "start": self.cycle.path.start,
            "max_piece": self.max_piece,
            "min_segments": self.min_segments,
            "unsegmentable": self.unsegmentable,
        }


@dataclass
class ConditionReport:
    condition: str
    holds: bool
    witness: dict | None
    stats: list[dict]
    notes: list[str] = field(default_factory=list)
    alternate: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "holds": self.holds,
            "witness": self.witness,
            "stats": self.stats,
            "notes": self.notes,
        }
        if self.alternate is not None:
            out["alternate_convention"] = self.alternate
        return out


def min_circular_segmentation(ext: Sequence[int]) -> tuple[int, list[tuple[int, int]]] | None:
    """Fewest pieces covering a cycle whose piece extents are ``ext``.

    Returns the count with the segmentation as ``(offset, length)`` pairs,
    or None when some position admits no piece.

    >>> min_circular_segmentation([2, 1, 2, 1])
    (2, [(0, 2), (2, 2)])
    """
    n = len(ext)
    if n == 0 or min(ext) == 0:
        return None
    best = None
    for s in range(n):
        pos, segs = s, []
        while pos < s + n:
            step = min(ext[pos % n], s + n - pos)
            segs.append((pos % n, step))
            pos += step
            if best is not None and len(segs) >= len(best):
                break
        if best is None or len(segs) < len(best):
            best = segs
    return len(best), best


def cycle_stats(idx: PieceIndex, cycles: Sequence[Cycle], essential: bool) -> list[CycleStats]:
    out = []
    for c in cycles:
        ext = idx.extension_lengths(c.word, essential)
        seg = min_circular_segmentation(ext)
        out.append(CycleStats(c, max(ext), None if seg is None else seg[0], None if seg is None else seg[1]))
    return out


def _segment_witness(g: LabelledGraph, st: CycleStats) -> dict:
    word = st.cycle.word
    n = len(word)
    segs = []
    for off, length in st.segmentation:
        piece = tuple(word[(off + k) % n] for k in range(length))
        segs.append({"offset": off, "length": length, "word": format_word(piece, g.alphabet)})
    return {
        "cycle": st.cycle.path.to_dict(),
        "cycle_word": format_word(word, g.alphabet),
        "segments": segs,
    }


def _long_piece_witness(g: LabelledGraph, idx: PieceIndex, st: CycleStats, essential: bool) -> dict:
    word = st.cycle.word
    n = len(word)
    ext = idx.extension_lengths(word, essential)
    off = ext.index(st.max_piece)
    piece = tuple(word[(off + k) % n] for k in range(st.max_piece))
    return {
        "cycle": st.cycle.path.to_dict(),
        "cycle_word": format_word(word, g.alphabet),
        "piece_offset": off,
        "piece_length": st.max_piece,
        "piece_word": format_word(piece, g.alphabet),
        "witness_starts": idx.witnesses(piece),
    }


def _evaluate(g: LabelledGraph, idx: PieceIndex, cond: Condition, cycles: Sequence[Cycle]) -> ConditionReport:
    stats = cycle_stats(idx, cycles, cond.essential)
    witness = None
    for st in stats:
        if cond.metric:
            bad = st.max_piece >= cond.ratio * len(st.cycle)
            if bad:
                witness = _long_piece_witness(g, idx, st, cond.essential)
        else:
            bad = st.min_segments is not None and st.min_segments < cond.n
            if bad:
                witness = _segment_witness(g, st)
        if witness is not None:
            break
    notes = [CANONICAL_CYCLE_NOTE, CLOSED_PATH_NOTE]
    if cond.essential:
        notes.append(ORBIT_CONVENTION_NOTE if idx.orbit_mode == "union"
                     else "automorphisms are taken per component")
    if any(st.unsegmentable for st in stats):
        notes.append("cycles containing a non-piece edge are unsegmentable and impose no constraint")
    return ConditionReport(str(cond), witness is None, witness, [st.to_dict(g) for st in stats], notes)


def check_condition(g: LabelledGraph, idx: PieceIndex | None, cond: Condition | str,
                    budget: int = DEFAULT_CYCLE_BUDGET, cycles: Sequence[Cycle] | None = None) -> ConditionReport:
    """Evaluate any of the four conditions.

    For Gr conditions on graphs with several components both orbit
    conventions are evaluated; a disagreement is attached to the report.
    """
    if isinstance(cond, str):
        cond = parse_condition(cond)
    g.require_reduced()
    idx = idx or PieceIndex(g)
    if cycles is None:
        cycles = simple_cycles(g, budget)
    report = _evaluate(g, idx, cond, cycles)
    if cond.essential and len(g.components) > 1 and idx.automorphisms.orbits != idx.automorphisms.component_orbits:
        other_mode = "component" if idx.orbit_mode == "union" else "union"
        other = _evaluate(g, idx.with_orbit_mode(other_mode), cond, cycles)
        if other.holds != report.holds:
            report.alternate = {"orbit_mode": other_mode, "holds": other.holds, "witness": other.witness}
    return report


def check_Cn(g: LabelledGraph, idx: PieceIndex | None, n: int, budget: int = DEFAULT_CYCLE_BUDGET,
             cycles: Sequence[Cycle] | None = None) -> ConditionReport:
    return check_condition(g, idx, Condition("C", n=n), budget, cycles)


def check_Cprime(g: LabelledGraph, idx: PieceIndex | None, ratio: Fraction, budget: int = DEFAULT_CYCLE_BUDGET,
                 cycles: Sequence[Cycle] | None = None) -> ConditionReport:
    return check_condition(g, idx, Condition("Cp", ratio=Fraction(ratio)), budget, cycles)


def check_Gr(g: LabelledGraph, idx: PieceIndex | None, n: int, budget: int = DEFAULT_CYCLE_BUDGET,
             cycles: Sequence[Cycle] | None = None) -> ConditionReport:
    return check_condition(g, idx, Condition("Gr", n=n), budget, cycles)


def check_Grprime(g: LabelledGraph, idx: PieceIndex | None, ratio: Fraction, budget: int = DEFAULT_CYCLE_BUDGET,
                  cycles: Sequence[Cycle] | None = None) -> ConditionReport:
    return check_condition(g, idx, Condition("Grp", ratio=Fraction(ratio)), budget, cycles)


def cprime_implies_c(report: ConditionReport) -> ConditionReport:
    """The C(floor(1/lambda)+1) report implied by a holding C'(lambda) report."""
    cond = parse_condition(report.condition)
    if not cond.metric:
        raise PreconditionFailed("expected a metric condition report")
    if not report.holds:
        raise PreconditionFailed("the metric condition does not hold; nothing is implied")
    n = int(1 / cond.ratio) + 1
    kind = "Gr" if cond.essential else "C"
    return ConditionReport(f"{kind}{n}", True, None, report.stats,
                           report.notes + [f"derived from {report.condition} without a new search"])
