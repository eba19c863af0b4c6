"""
Q_X-level stratification of a module character with respect to a parabolic
subgroup, Q_X-shapes, the Levi factors induced in the ambient classical group,
highest-weight label constraints and central pairings.
"""

from collections import defaultdict
from functools import reduce
from itertools import permutations
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from app.exceptions import ContractError, CorruptedCharacterError, ParseError
from app.services.characters import Character, Decomposition, decompose, weyl_character
from app.services.rootcore import (
    RootSystem,
    SimpleType,
    Weight,
    format_weight,
    is_self_dual,
    is_subdominant,
    lowest_weight,
)

logger = structlog.get_logger(__name__)

SYMMETRIC_FORMS = ("symmetric", "orthogonal")
SKEW_FORMS = ("skew", "symplectic")
EXTENSIONS = (".2", ".3", ".S3")


class LeviSubset(BaseModel):
    """Simple roots of the Levi factor L_X' (1-based); empty for the Borel"""

    model_config = ConfigDict(frozen=True)

    rank: int
    nodes: Tuple[int, ...] = ()

    @classmethod
    def borel(cls, rank: int) -> "LeviSubset":
        return cls(rank=rank, nodes=())

    @classmethod
    def of(cls, rank: int, nodes) -> "LeviSubset":
        chosen = tuple(sorted(set(nodes)))
        if any(i < 1 or i > rank for i in chosen):
            raise ContractError(f"Levi nodes {chosen} out of range 1..{rank}")
        if len(chosen) == rank:
            raise ContractError("Levi subset must be proper for a parabolic")
        return cls(rank=rank, nodes=chosen)

    @classmethod
    def parse(cls, text: str, rank: int) -> "LeviSubset":
        """ "borel" or comma-separated node numbers"""
        text = (text or "").strip().lower()
        if text in ("", "borel"):
            return cls.borel(rank)
        try:
            nodes = [int(part) for part in text.split(",")]
        except ValueError:
            raise ParseError(
                f"Cannot parse subset {text!r}; expected 'borel' or e.g. 2,3,4"
            )
        return cls.of(rank, nodes)

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(i for i in range(1, self.rank + 1) if i not in self.nodes)

    @property
    def is_borel(self) -> bool:
        return not self.nodes


class Level(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    index: int
    weights: Character
    shapes: FrozenSet[Tuple[int, ...]]

    @property
    def dim(self) -> int:
        return self.weights.dim

    @property
    def distinct(self) -> int:
        return len(self.weights)


class ParabolicLevels(BaseModel):
    """Levels W_0 .. W_ell of a module with respect to a parabolic"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    x_type: SimpleType
    delta: Tuple[int, ...]
    subset: LeviSubset
    levels: List[Level]
    ell: int

    @property
    def half(self) -> int:
        return self.ell // 2

    def dims(self) -> List[int]:
        return [level.dim for level in self.levels]


class LeviFactor(BaseModel):
    level: int
    kind: str
    rank: int
    dim: int
    nodes: Tuple[int, ...]

    @property
    def tag(self) -> str:
        return f"{self.kind}{self.rank}"


class LeviStructure(BaseModel):
    """Simple factors of L' in the ambient classical group"""

    form: str
    ambient_rank: int
    factors: List[LeviFactor]

    @property
    def has_a1(self) -> bool:
        return bool(self.a1_positions)

    @property
    def a1_positions(self) -> List[int]:
        return [f.nodes[0] for f in self.factors if f.rank == 1]

    @property
    def levi_nodes(self) -> List[int]:
        return sorted(node for f in self.factors for node in f.nodes)


class ConstraintPattern(BaseModel):
    case: str
    assignment: Dict[int, int]
    condition: Optional[str] = None


class ConstraintReport(BaseModel):
    extension: str
    allowed_patterns: List[ConstraintPattern]

    @property
    def is_empty(self) -> bool:
        return not self.allowed_patterns


def _delta_minus_coords(
    rs: RootSystem, delta: Sequence[int], weights: np.ndarray
) -> np.ndarray:
    """Integer root coordinates of delta - mu for each row mu"""
    diff = np.asarray(delta, dtype=np.int64)[None, :] - weights
    scaled = diff.dot(rs.coord_matrix.T)
    den = rs.inv_cartan_den
    if np.any(scaled % den) or np.any(scaled < 0):
        rows = np.any((scaled % den) != 0, axis=1) | np.any(scaled < 0, axis=1)
        bad = int(np.nonzero(rows)[0][0])
        raise CorruptedCharacterError(
            f"Weight {format_weight(weights[bad])} is not under {format_weight(delta)}",
            {"weight": format_weight(weights[bad])},
        )
    return scaled // den


def level_decomposition(
    rs: RootSystem, delta: Sequence[int], subset: LeviSubset, char: Character
) -> ParabolicLevels:
    """Bucket the weights of ``char`` by Q_X-level relative to ``delta``.

    Raises:
        CorruptedCharacterError: if a weight is not under delta
    """
    if subset.rank != rs.rank:
        raise ContractError(f"Subset rank {subset.rank} does not match {rs.type}")
    items = list(char.items())
    weights = np.array([w for w, _ in items], dtype=np.int64)
    weights = weights.reshape(len(items), rs.rank)
    coords = _delta_minus_coords(rs, delta, weights)
    comp = [i - 1 for i in subset.complement]
    shape_rows = coords[:, comp]
    level_of = shape_rows.sum(axis=1)
    ell = int(level_of.max()) if len(items) else 0

    buckets: Dict[int, Dict[Weight, int]] = defaultdict(dict)
    shapes: Dict[int, set] = defaultdict(set)
    for (w, m), lvl, shape in zip(items, level_of.tolist(), shape_rows.tolist()):
        buckets[lvl][w] = m
        shapes[lvl].add(tuple(shape))
    levels = [
        Level(
            index=i,
            weights=Character(char.group, buckets.get(i, {})),
            shapes=frozenset(shapes.get(i, set())),
        )
        for i in range(ell + 1)
    ]
    logger.debug(
        "levels computed", type=str(rs.type), delta=format_weight(delta), ell=ell
    )
    return ParabolicLevels(
        x_type=rs.type, delta=tuple(delta), subset=subset, levels=levels, ell=ell
    )


def level_of_lowest(rs: RootSystem, delta: Sequence[int], subset: LeviSubset) -> int:
    """Q_X-level of the lowest weight of V(delta)"""
    low = np.array([lowest_weight(rs, delta)], dtype=np.int64)
    coords = _delta_minus_coords(rs, delta, low)[0]
    return int(sum(coords[i - 1] for i in subset.complement))


def shapes(pl: ParabolicLevels, i: int) -> FrozenSet[Tuple[int, ...]]:
    if not 0 <= i <= pl.ell:
        raise ContractError(f"Level {i} outside 0..{pl.ell}")
    return pl.levels[i].shapes


def level_reducible(pl: ParabolicLevels, i: int) -> bool:
    """Sufficient criterion: two distinct shapes in one level"""
    return len(shapes(pl, i)) >= 2


def level_factor_count(rs: RootSystem, pl: ParabolicLevels, i: int) -> Decomposition:
    """Composition factors of level i for the Levi subgroup, by extraction"""
    if not 0 <= i <= pl.ell:
        raise ContractError(f"Level {i} outside 0..{pl.ell}")
    return decompose(rs, pl.levels[i].weights, nodes=pl.subset.nodes)


def levi_structure(rs: RootSystem, pl: ParabolicLevels, form: str) -> LeviStructure:
    """Simple factors of the Levi L' = L_{e_1} ... L_{e_r} of the induced parabolic.

    Off-middle levels of dimension d > 1 give A_{d-1}; the middle level gives
    Isom(W_{ell/2})' when its dimension exceeds 1 (skew) or 2 (symmetric).
    """
    if form not in SYMMETRIC_FORMS + SKEW_FORMS:
        raise ContractError(
            f"levi_structure needs a symmetric or skew form, got {form!r}"
        )
    if not is_self_dual(rs, pl.delta):
        raise ContractError(
            f"{format_weight(pl.delta)} is not self-dual;"
            " the ambient group is not Sp or SO"
        )
    symmetric = form in SYMMETRIC_FORMS
    dims = pl.dims()
    n = sum(dims) // 2
    factors: List[LeviFactor] = []

    def add(e: int, kind: str, rank: int, nodes: Tuple[int, ...]) -> None:
        factors.append(
            LeviFactor(level=e, kind=kind, rank=rank, dim=dims[e], nodes=nodes)
        )

    cum = 0
    for e in range(pl.half + 1):
        d = dims[e]
        if 2 * e == pl.ell:
            k = d // 2
            top = tuple(range(n - k + 1, n + 1))
            if not symmetric:
                if d > 1:
                    add(e, "A" if k == 1 else "C", k, top)
            elif d == 3:
                add(e, "A", 1, (n,))
            elif d == 4:
                add(e, "A", 1, (n - 1,))
                add(e, "A", 1, (n,))
            elif d == 6:
                # D3 is A3, with the branch node in the middle
                add(e, "A", 3, (n - 1, n - 2, n))
            elif d > 4:
                add(e, "B" if d % 2 else "D", k, top)
        else:
            if d > 1:
                add(e, "A", d - 1, tuple(range(cum + 1, cum + d)))
            cum += d
    return LeviStructure(form=form, ambient_rank=n, factors=factors)


def _pattern(
    levi_nodes: Sequence[int],
    assign: Dict[int, int],
    case: str,
    condition: Optional[str] = None,
) -> ConstraintPattern:
    full = {node: 0 for node in levi_nodes}
    full.update(assign)
    return ConstraintPattern(
        case=case, assignment=dict(sorted(full.items())), condition=condition
    )


def ford_constraints(ls: LeviStructure, extension: str) -> ConstraintReport:
    """Label patterns on the Levi nodes permitted for a triple with this extension"""
    if extension not in EXTENSIONS:
        raise ContractError(
            f"Unknown extension {extension!r}; expected one of {', '.join(EXTENSIONS)}"
        )
    nodes = ls.levi_nodes
    a1 = [f for f in ls.factors if f.rank == 1]
    a2 = [f for f in ls.factors if f.kind == "A" and f.rank == 2]
    patterns: List[ConstraintPattern] = []

    def allow(
        assign: Dict[int, int], case: str, condition: Optional[str] = None
    ) -> None:
        patterns.append(_pattern(nodes, assign, case, condition))

    if extension == ".2":
        for f in a1:
            allow({f.nodes[0]: 1}, "A1 factor, label 1")
    elif extension == ".3":
        for f in a1:
            allow({f.nodes[0]: 2}, "A1 factor, label 2")
        for f in a2:
            allow({f.nodes[0]: 1}, "A2 factor, labels (1,0)")
            allow({f.nodes[1]: 1}, "A2 factor, labels (0,1)")
    else:
        for f in ls.factors:
            if f.kind == "A" and f.rank == 5:
                allow({f.nodes[0]: 1}, "A5 factor, first node")
                allow({f.nodes[-1]: 1}, "A5 factor, last node")
            if f.kind == "A" and f.rank == 3:
                allow({f.nodes[1]: 1}, "A3 factor, exterior square")
        for f in a2:
            allow({f.nodes[0]: 2}, "A2 factor, symmetric square", "p != 2")
            allow({f.nodes[-1]: 2}, "A2 factor, symmetric square", "p != 2")
        for f in a1:
            allow({f.nodes[0]: 5}, "A1 factor, label 5", "p not in {2,3,5}")
        for f in a2:
            for g in a1:
                allow({f.nodes[0]: 1, g.nodes[0]: 1}, "A2 and A1 factors")
                allow({f.nodes[-1]: 1, g.nodes[0]: 1}, "A2 and A1 factors")
        for f, g in permutations(a1, 2):
            allow({f.nodes[0]: 2, g.nodes[0]: 1}, "two A1 factors", "p != 2")
        if ls.factors and ls.factors[-1].tag == "C3":
            allow({ls.factors[-1].nodes[0]: 1}, "C3 factor, first node")
    return ConstraintReport(extension=extension, allowed_patterns=patterns)


def central_pairing(
    rs: RootSystem, subset: LeviSubset, mu: Sequence[int]
) -> List[int]:
    """Exponent of the central cocharacter of each complement node on mu.

    The cocharacter of node k is the fundamental coweight scaled by the
    smallest positive integer that pairs it integrally with every weight.
    """
    scaled = rs.scaled_coords(mu)
    det = rs.inv_cartan_den
    pairing = []
    for k in subset.complement:
        g = reduce(gcd, (int(x) for x in rs.coord_matrix[k - 1]), det)
        pairing.append(int(scaled[k - 1]) // g)
    return pairing


def _distinct_at(
    rs: RootSystem, top: Sequence[int], level: int, cap: Optional[int]
) -> int:
    char = weyl_character(rs, top, cap)
    pl = level_decomposition(rs, top, LeviSubset.borel(rs.rank), char)
    return pl.levels[level].distinct if level <= pl.ell else 0


def level_induction_bound(
    rs: RootSystem,
    delta: Sequence[int],
    mu: Sequence[int],
    a: int,
    r: int,
    cap: Optional[int] = None,
) -> bool:
    """Check that r distinct weights of V(mu) at level a give r in V(delta)
    at level a + b.

    b is the height of delta - mu.
    """
    if not is_subdominant(rs, mu, delta):
        raise ContractError(
            f"{format_weight(mu)} is not subdominant to {format_weight(delta)}"
        )
    gap = tuple(x - y for x, y in zip(delta, mu))
    b = int(rs.scaled_height(gap) // rs.inv_cartan_den)
    below = _distinct_at(rs, mu, a, cap)
    above = _distinct_at(rs, delta, a + b, cap)
    logger.debug(
        "level induction",
        mu=format_weight(mu),
        delta=format_weight(delta),
        b=b,
        below=below,
        above=above,
    )
    return below < r or above >= r


def _format_shapes(shape_set) -> str:
    return ";".join("(" + ",".join(str(x) for x in s) + ")" for s in sorted(shape_set))


def format_levels_tsv(
    pl: ParabolicLevels, structure: Optional[LeviStructure] = None
) -> str:
    """Columns: level, dim, distinct weights, shapes, Levi factor tag"""
    tags: Dict[int, List[str]] = defaultdict(list)
    if structure is not None:
        for f in structure.factors:
            tags[f.level].append(f.tag)
    lines = ["level\tdim\tdistinct\tshapes\tfactor"]
    for level in pl.levels:
        tag = "+".join(tags[level.index]) or "-"
        shape_text = _format_shapes(level.shapes)
        lines.append(
            f"{level.index}\t{level.dim}\t{level.distinct}\t{shape_text}\t{tag}"
        )
    return "\n".join(lines) + "\n"
