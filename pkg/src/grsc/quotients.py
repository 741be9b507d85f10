"""Cheap nontriviality certificates: abelianisation and small permutation quotients.

A word that survives in some quotient of the group is nontrivial in the
group itself, so both checks are sound one-sided tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graph_core import Word


def abelian_image(w: Sequence, rank: int) -> list[int]:
    v = [0] * rank
    for x, s in w:
        v[x] += s
    return v


class RelationLattice:
    """Integer row span of the abelianised relators, kept in echelon form."""

    def __init__(self, rows: Sequence[Sequence[int]], rank: int):
        self.rank = rank
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        work = [list(r) for r in rows if any(r)]
        col = 0
        while work and col < rank:
            nz = [r for r in work if r[col] != 0]
            if not nz:
                col += 1
                continue
            # Euclid on column col until a single row remains non-zero there
            while len(nz) > 1:
                nz.sort(key=lambda r: abs(r[col]))
                piv = nz[0]
                for r in nz[1:]:
                    q = r[col] // piv[col]
                    for k in range(rank):
                        r[k] -= q * piv[k]
                nz = [r for r in nz if r[col] != 0]
            piv = nz[0]
            if piv[col] < 0:
                piv[:] = [-x for x in piv]
            self.rows.append(piv)
            self.pivots.append(col)
            work = [r for r in work if r is not piv and any(r)]
            col += 1

    def contains(self, v: Sequence[int]) -> bool:
        v = list(v)
        for row, col in zip(self.rows, self.pivots):
            if v[col] % row[col]:
                return False
            q = v[col] // row[col]
            if q:
                for k in range(self.rank):
                    v[k] -= q * row[k]
        return not any(v)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of ``v`` modulo the lattice."""
        v = list(v)
        for row, col in zip(self.rows, self.pivots):
            q = v[col] // row[col]
            if q:
                for k in range(self.rank):
                    v[k] -= q * row[k]
        return tuple(v)


# ------------------------------------------------------ permutation quotients


@dataclass(frozen=True)
class PermRep:
    """Images of each letter as a permutation of range(degree)."""

    degree: int
    images: tuple[tuple[int, ...], ...]

    def act(self, point: int, w: Sequence) -> int:
        for x, s in w:
            img = self.images[x]
            if s > 0:
                point = img[point]
            else:
                point = img.index(point)
        return point

    def inverse_images(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for img in self.images:
            inv = [0] * self.degree
            for i, j in enumerate(img):
                inv[j] = i
            out.append(tuple(inv))
        return tuple(out)

    def is_identity(self, w: Sequence) -> bool:
        inv = self.inverse_images()
        perm = list(range(self.degree))
        for x, s in w:
            table = self.images[x] if s > 0 else inv[x]
            perm = [table[p] for p in perm]
        return perm == list(range(self.degree))


def low_index_reps(rank: int, relators: Sequence[Word], max_degree: int, node_budget: int = 200_000) -> list[PermRep]:
    """Transitive permutation representations of degree <= max_degree.

    Coset tables are filled in row-major order, new points numbered on first
    use, and every relator is scanned at every point after each definition.
    Stops quietly once ``node_budget`` definitions have been tried.
    """
    cols = 2 * rank  # column 2x is letter x, 2x+1 its inverse
    rels = [[2 * x + (0 if s > 0 else 1) for x, s in r] for r in relators if r]
    reps: list[PermRep] = []
    nodes = 0

    def scan(table: list[list[int]], n: int) -> bool:
        """Propagate deductions; False on a contradiction."""
        changed = True
        while changed:
            changed = False
            for p in range(n):
                for r in rels:
                    # forward as far as defined
                    f, i = p, 0
                    while i < len(r) and table[f][r[i]] >= 0:
                        f = table[f][r[i]]
                        i += 1
                    if i == len(r):
                        if f != p:
                            return False
                        continue
                    b, j = p, len(r)
                    while j > i and table[b][r[j - 1] ^ 1] >= 0:
                        b = table[b][r[j - 1] ^ 1]
                        j -= 1
                    if j == i + 1:
                        c = r[i]
                        if table[f][c] >= 0 or table[b][c ^ 1] >= 0:
                            if table[f][c] != b:
                                return False
                            continue
                        table[f][c] = b
                        table[b][c ^ 1] = f
                        changed = True
                    elif j == i and f != b:
                        return False
        return True

    def first_gap(table, n):
        for p in range(n):
            for c in range(cols):
                if table[p][c] < 0:
                    return p, c
        return None

    def search(table: list[list[int]], n: int) -> None:
        nonlocal nodes
        if nodes > node_budget:
            return
        gap = first_gap(table, n)
        if gap is None:
            images = tuple(tuple(table[p][2 * x] for p in range(n)) for x in range(rank))
            reps.append(PermRep(n, images))
            return
        p, c = gap
        targets = [q for q in range(n) if table[q][c ^ 1] < 0]
        if n < max_degree:
            targets.append(n)
        for q in targets:
            nodes += 1
            t = [row[:] for row in table]
            m = n
            if q == n:
                t.append([-1] * cols)
                m = n + 1
            t[p][c] = q
            t[q][c ^ 1] = p
            if scan(t, m):
                search(t, m)

    start = [[-1] * cols]
    if scan(start, 1):
        search(start, 1)
    return reps


class QuotientFamily:
    """A bundle of small quotients used as a fingerprint for group elements."""

    def __init__(self, rank: int, relators: Sequence[Word], max_degree: int = 5, node_budget: int = 20_000):
        self.rank = rank
        self.lattice = RelationLattice([abelian_image(r, rank) for r in relators], rank)
        seen = set()
        self.reps: list[PermRep] = []
        for rep in low_index_reps(rank, relators, max_degree, node_budget):
            if rep.degree > 1 and rep.images not in seen:
                seen.add(rep.images)
                self.reps.append(rep)
        self._inv = [rep.inverse_images() for rep in self.reps]

    def separates(self, w: Sequence) -> str | None:
        """Name of a quotient in which ``w`` is nontrivial, if any."""
        if not self.lattice.contains(abelian_image(w, self.rank)):
            return "abelianisation"
        for k, rep in enumerate(self.reps):
            if not rep.is_identity(w):
                return f"permutation quotient {k} of degree {rep.degree}"
        return None

    def fingerprint(self, w: Sequence) -> tuple:
        """Image of ``w`` in the abelianisation times the permutation quotients."""
        out: list = [self.lattice.reduce(abelian_image(w, self.rank))]
        for rep, inv in zip(self.reps, self._inv):
            perm = list(range(rep.degree))
            for x, s in w:
                table = rep.images[x] if s > 0 else inv[x]
                perm = [table[p] for p in perm]
            out.append(tuple(perm))
        return tuple(out)
