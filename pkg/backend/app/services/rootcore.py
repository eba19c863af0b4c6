"""
Root systems of the simple types, weight-lattice arithmetic and Weyl-group
combinatorics.

Weights are tuples of Dynkin labels (coefficients on the fundamental dominant
weights); roots are tuples of simple-root coordinates. Nodes use Bourbaki
numbering. Node numbers in public arguments are 1-based, tuple positions are
0-based.
"""

import re
from collections import Counter
from fractions import Fraction
from functools import lru_cache, reduce
from math import factorial, gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
import sympy
from pydantic import BaseModel, ConfigDict

from app.exceptions import (
    CapExceededError,
    ContractError,
    InvalidAutomorphismError,
    InvalidTypeError,
    ParseError,
)

logger = structlog.get_logger(__name__)

Weight = Tuple[int, ...]
Root = Tuple[int, ...]

# family -> (minimum rank, maximum rank or None)
RANK_BOUNDS: Dict[str, Tuple[int, Optional[int]]] = {
    "A": (1, None),
    "B": (2, None),
    "C": (2, None),
    "D": (3, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}

_TYPE_RE = re.compile(r"^\s*([A-Za-z])\s*(\d+)\s*$")


class SimpleType(BaseModel):
    """Dynkin type of a simple group, e.g. A5 or E6"""

    model_config = ConfigDict(frozen=True)

    family: str
    rank: int

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


class RootCoords(BaseModel):
    """Exact rational vector in simple-root coordinates"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coords: Tuple[Fraction, ...]

    @property
    def height(self) -> Fraction:
        return sum(self.coords, Fraction(0))

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __str__(self) -> str:
        terms = [f"{c}*b{i}" for i, c in enumerate(self.coords, start=1) if c]
        return " + ".join(terms) if terms else "0"


class GraphAut(BaseModel):
    """Diagram automorphism acting on labels by w'_i = w_{perm(i)}"""

    model_config = ConfigDict(frozen=True)

    perm: Tuple[int, ...]
    name: str = ""

    @classmethod
    def identity(cls, rank: int) -> "GraphAut":
        return cls(perm=tuple(range(1, rank + 1)), name="id")

    @classmethod
    def from_cycles(
        cls, rank: int, cycles: Sequence[Sequence[int]], name: str = ""
    ) -> "GraphAut":
        """Build from disjoint cycles; (1 3 4) sends 1 to 3, 3 to 4, 4 to 1"""
        perm = list(range(1, rank + 1))
        for cycle in cycles:
            for pos, node in enumerate(cycle):
                perm[node - 1] = cycle[(pos + 1) % len(cycle)]
        return cls(perm=tuple(perm), name=name)

    def compose(self, other: "GraphAut") -> "GraphAut":
        """Automorphism acting as self after other"""
        # (self . other)(w)_i = other(w)_{self(i)} = w_{other(self(i))}
        return GraphAut(perm=tuple(other.perm[p - 1] for p in self.perm))

    @property
    def order(self) -> int:
        power, n = self, 1
        ident = tuple(range(1, len(self.perm) + 1))
        while power.perm != ident:
            power = power.compose(self)
            n += 1
        return n

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(1, len(self.perm) + 1))


def check_rank_bounds(family: str, rank: int) -> None:
    """Raise InvalidTypeError naming the violated bound"""
    if family not in RANK_BOUNDS:
        raise InvalidTypeError(f"Unknown family {family!r}; expected one of A-G")
    low, high = RANK_BOUNDS[family]
    if rank < low:
        raise InvalidTypeError(
            f"{family}{rank}: rank must be >= {low} for type {family}"
        )
    if high is not None and rank > high:
        raise InvalidTypeError(
            f"{family}{rank}: rank must be <= {high} for type {family}"
        )


def simple_type(family: str, rank: int) -> SimpleType:
    """Validated SimpleType constructor"""
    family = family.upper()
    check_rank_bounds(family, rank)
    return SimpleType(family=family, rank=rank)


def parse_type(text: str) -> SimpleType:
    """Parse "A5", "D10", "E6" into a SimpleType"""
    match = _TYPE_RE.match(text or "")
    if not match or match.group(1).upper() not in RANK_BOUNDS:
        raise ParseError(f"Cannot parse type {text!r}; expected e.g. A5, D10, E6")
    return simple_type(match.group(1), int(match.group(2)))


def parse_weight(text: str, rank: Optional[int] = None) -> Weight:
    """Parse comma-separated Dynkin labels, e.g. "0,0,1,0,0" """
    try:
        labels = tuple(int(part) for part in text.split(","))
    except (AttributeError, ValueError):
        raise ParseError(
            f"Cannot parse weight {text!r}; expected comma-separated integers"
        )
    if rank is not None and len(labels) != rank:
        raise ParseError(f"Weight {text!r} has {len(labels)} labels, rank is {rank}")
    return labels


def format_weight(w: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in w)


def fundamental_weight(rank: int, i: int, coeff: int = 1) -> Weight:
    """coeff * lambda_i as a label vector"""
    return tuple(coeff if j == i else 0 for j in range(1, rank + 1))


def cartan_matrix(t: SimpleType) -> List[List[int]]:
    """Cartan matrix with entry [i][j] = <alpha_i, alpha_j^vee>"""
    n, fam = t.rank, t.family
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        a[i][j], a[j][i] = aij, aji

    if fam in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if fam == "B":
            link(n - 2, n - 1, -2, -1)
        elif fam == "C":
            link(n - 2, n - 1, -1, -2)
    elif fam == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif fam == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif fam == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif fam == "G":
        link(0, 1, -1, -3)
    return a


def _positive_roots(cartan: List[List[int]]) -> List[Root]:
    """Positive roots by the root-string algorithm"""
    n = len(cartan)
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    found = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            labels = [sum(beta[k] * cartan[k][j] for k in range(n)) for j in range(n)]
            for i in range(n):
                p = 0
                while True:
                    down = list(beta)
                    down[i] -= p + 1
                    if tuple(down) not in found:
                        break
                    p += 1
                if p - labels[i] > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(found, key=lambda r: (sum(r), r))


def _symmetrizer(cartan: List[List[int]]) -> Tuple[int, ...]:
    """d_i with d_i * a_ij = d_j * a_ji, long nodes scaled to 1"""
    n = len(cartan)
    d: List[Optional[Fraction]] = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and cartan[i][j] != 0 and d[j] is None:
                d[j] = d[i] * cartan[i][j] / cartan[j][i]
                stack.append(j)
    low = min(d)
    return tuple(int(x / low) for x in d)


def _weyl_order_of(rank: int, n_pos: int, laced: bool) -> int:
    """Order of an irreducible Weyl group identified by its invariants"""
    if rank == 0:
        return 1
    if laced:
        if n_pos == rank * (rank + 1) // 2:
            return factorial(rank + 1)
        if rank >= 4 and n_pos == rank * (rank - 1):
            return 2 ** (rank - 1) * factorial(rank)
        exceptional = {(6, 36): 51840, (7, 63): 2903040, (8, 120): 696729600}
    else:
        if n_pos == rank * rank:
            return 2**rank * factorial(rank)
        exceptional = {(4, 24): 1152, (2, 6): 12}
    try:
        return exceptional[(rank, n_pos)]
    except KeyError:
        raise ContractError(
            f"Unrecognised Weyl group: rank {rank}, {n_pos} positive roots"
        )


class RootSystem:
    """Immutable root datum of a simple type.

    Attributes:
        type: the SimpleType
        cartan: rank x rank integer matrix, row i is alpha_i in labels
        pos_roots: positive roots in simple-root coordinates, sorted by
            (height, lexicographic)
        symmetrizer: d_i making diag(d) . cartan symmetric
        rho: all-ones label vector
        inv_cartan_num / inv_cartan_den: integer adjugate and determinant of
            the Cartan matrix
        e_const: maximum squared root-length ratio
    """

    def __init__(self, t: SimpleType):
        self.type = t
        self.rank = n = t.rank
        self.cartan: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(r) for r in cartan_matrix(t)
        )
        self.pos_roots: Tuple[Root, ...] = tuple(
            _positive_roots([list(r) for r in self.cartan])
        )
        self.symmetrizer = _symmetrizer([list(r) for r in self.cartan])
        self.rho: Weight = (1,) * n
        self.e_const = max(self.symmetrizer)

        matrix = sympy.Matrix(self.cartan)
        self.inv_cartan_den = int(matrix.det())
        adj = matrix.adjugate()
        self.inv_cartan_num = tuple(
            tuple(int(adj[i, j]) for j in range(n)) for i in range(n)
        )
        # coords * det = coord_matrix . labels
        self.coord_matrix = np.array(self.inv_cartan_num, dtype=np.int64).T
        lcm_d = reduce(lambda x, y: x * y // gcd(x, y), self.symmetrizer, 1)
        self.form_scale = self.inv_cartan_den * lcm_d
        # <lambda, mu> * form_scale = lambda^T . form_matrix . mu
        self.form_matrix = np.array(
            [
                [
                    (lcm_d // self.symmetrizer[j]) * int(self.coord_matrix[j, k])
                    for k in range(n)
                ]
                for j in range(n)
            ],
            dtype=np.int64,
        )
        self.short_nodes = frozenset(
            i + 1 for i, d in enumerate(self.symmetrizer) if d > 1
        )
        self._parabolic_cache: Dict[FrozenSet[int], int] = {}
        self.coroots: Tuple[Tuple[int, ...], ...] = tuple(
            self._coroot(beta) for beta in self.pos_roots
        )
        self.weyl_order = self.parabolic_order(range(1, n + 1))

    # -- internal helpers -------------------------------------------------

    def _root_form(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        """(a, b) for root-coordinate vectors, long roots of squared length 2"""
        n = self.rank
        return sum(
            (
                Fraction(a[i] * b[j] * self.cartan[i][j], self.symmetrizer[j])
                for i in range(n)
                for j in range(n)
            ),
            Fraction(0),
        )

    def _coroot(self, beta: Root) -> Tuple[int, ...]:
        norm = self._root_form(beta, beta)
        coeffs = []
        for j, c in enumerate(beta):
            value = Fraction(2 * c) / (self.symmetrizer[j] * norm)
            if value.denominator != 1:
                raise ContractError(f"Non-integral coroot for {beta} in {self.type}")
            coeffs.append(int(value))
        return tuple(coeffs)

    def parabolic_order(self, nodes: Iterable[int]) -> int:
        """Order of the Weyl group generated by reflections in the given nodes"""
        key = frozenset(nodes)
        cached = self._parabolic_cache.get(key)
        if cached is not None:
            return cached
        remaining = {i - 1 for i in key}
        order = 1
        while remaining:
            start = remaining.pop()
            comp, stack = {start}, [start]
            while stack:
                i = stack.pop()
                for j in list(remaining):
                    if self.cartan[i][j] != 0:
                        remaining.discard(j)
                        comp.add(j)
                        stack.append(j)
            outside = [k for k in range(self.rank) if k not in comp]
            n_pos = sum(1 for r in self.pos_roots if all(r[k] == 0 for k in outside))
            laced = all(
                self.cartan[i][j] in (0, -1) for i in comp for j in comp if i != j
            )
            order *= _weyl_order_of(len(comp), n_pos, laced)
        self._parabolic_cache[key] = order
        return order

    # -- arithmetic -------------------------------------------------------

    def reflect(self, w: Sequence[int], i: int) -> Weight:
        """Simple reflection s_i (0-based node index)"""
        c = w[i]
        if c == 0:
            return tuple(w)
        row = self.cartan[i]
        return tuple(w[j] - c * row[j] for j in range(self.rank))

    def scaled_coords(self, w: Sequence[int]) -> Tuple[int, ...]:
        """det(cartan) times the root coordinates of w"""
        scaled = self.coord_matrix.dot(np.asarray(w, dtype=np.int64))
        return tuple(int(x) for x in scaled)

    def scaled_height(self, w: Sequence[int]) -> int:
        return int(self.coord_matrix.dot(np.asarray(w, dtype=np.int64)).sum())

    def root_to_weight(self, coords: Sequence[int]) -> Weight:
        """Labels of sum c_i alpha_i"""
        n = self.rank
        return tuple(
            sum(coords[i] * self.cartan[i][j] for i in range(n)) for j in range(n)
        )

    def inner_product_scaled(self, a: Sequence[int], b: Sequence[int]) -> int:
        """form_scale * (a, b) for label vectors, exact integer"""
        left = np.asarray(a, dtype=np.int64)
        right = np.asarray(b, dtype=np.int64)
        return int(left.dot(self.form_matrix).dot(right))

    def coroot_pairing(self, w: Sequence[int], index: int) -> int:
        """<w, beta^vee> for the positive root pos_roots[index]"""
        return sum(x * c for x, c in zip(w, self.coroots[index]))

    def levi_root_indices(self, nodes: Optional[FrozenSet[int]]) -> List[int]:
        """Indices of positive roots supported on the given 0-based nodes"""
        if nodes is None:
            return list(range(len(self.pos_roots)))
        outside = [i for i in range(self.rank) if i not in nodes]
        return [
            k
            for k, r in enumerate(self.pos_roots)
            if all(r[i] == 0 for i in outside)
        ]

    def __repr__(self) -> str:
        return f"RootSystem({self.type})"


@lru_cache(maxsize=None)
def build_root_system(t: SimpleType) -> RootSystem:
    """Construct (and cache) the root system of a simple type.

    Raises:
        InvalidTypeError: if (family, rank) violates the rank bounds
    """
    check_rank_bounds(t.family, t.rank)
    rs = RootSystem(t)
    logger.debug("root system built", type=str(t), positive_roots=len(rs.pos_roots))
    return rs


def weyl_group_order(t: SimpleType) -> int:
    return build_root_system(t).weyl_order


def node_set(
    rs: RootSystem, nodes: Optional[Iterable[int]]
) -> Optional[FrozenSet[int]]:
    """1-based node numbers -> 0-based frozenset (None means all nodes)"""
    if nodes is None:
        return None
    result = frozenset(i - 1 for i in nodes)
    if any(i < 0 or i >= rs.rank for i in result):
        raise ContractError(f"Node subset {sorted(nodes)} out of range for {rs.type}")
    return result


def node_indices(rs: RootSystem, nodes: Optional[FrozenSet[int]]) -> List[int]:
    return list(range(rs.rank)) if nodes is None else sorted(nodes)


def roots_by_height(rs: RootSystem) -> Dict[int, int]:
    """Number of positive roots of each height"""
    counts = Counter(sum(r) for r in rs.pos_roots)
    return dict(sorted(counts.items()))


def to_root_coords(rs: RootSystem, w: Sequence[int]) -> RootCoords:
    """Exact simple-root coordinates c with cartan^T . c = labels"""
    den = rs.inv_cartan_den
    return RootCoords(coords=tuple(Fraction(x, den) for x in rs.scaled_coords(w)))


def height(rc: RootCoords) -> Fraction:
    return rc.height


def is_under(rs: RootSystem, mu: Sequence[int], nu: Sequence[int]) -> bool:
    """True iff nu - mu is a non-negative integer combination of simple roots"""
    den = rs.inv_cartan_den
    diff = [a - b for a, b in zip(nu, mu)]
    return all(x >= 0 and x % den == 0 for x in rs.scaled_coords(diff))


def is_dominant(w: Sequence[int], nodes: Optional[FrozenSet[int]] = None) -> bool:
    if nodes is None:
        return all(x >= 0 for x in w)
    return all(w[i] >= 0 for i in nodes)


def is_subdominant(rs: RootSystem, mu: Sequence[int], delta: Sequence[int]) -> bool:
    return is_dominant(mu) and is_under(rs, mu, delta)


def dominant_conjugate(
    rs: RootSystem, w: Sequence[int], nodes: Optional[Iterable[int]] = None
) -> Weight:
    """Reflect at the most negative label (smallest node on ties) until dominant.

    With ``nodes`` only reflections in those (1-based) nodes are used, giving
    the dominant conjugate for the corresponding Levi subgroup.
    """
    return dominant_conjugate_on_indices(rs, w, node_indices(rs, node_set(rs, nodes)))


def dominant_conjugate_on_indices(
    rs: RootSystem, w: Sequence[int], idx: Sequence[int]
) -> Weight:
    """dominant_conjugate with 0-based node indices"""
    current = tuple(w)
    while True:
        pick, low = -1, 0
        for i in idx:
            if current[i] < low:
                pick, low = i, current[i]
        if pick < 0:
            return current
        current = rs.reflect(current, pick)


def duality(rs: RootSystem, w: Sequence[int]) -> Weight:
    """Highest weight of the dual module: -w0(w)"""
    return dominant_conjugate(rs, tuple(-x for x in w))


def lowest_weight(rs: RootSystem, lam: Sequence[int]) -> Weight:
    if not is_dominant(lam):
        raise ContractError(
            f"lowest_weight needs a dominant weight, got {format_weight(lam)}"
        )
    return tuple(-x for x in duality(rs, lam))


def is_self_dual(rs: RootSystem, lam: Sequence[int]) -> bool:
    return duality(rs, lam) == tuple(lam)


def orbit_size(
    rs: RootSystem, w: Sequence[int], nodes: Optional[Iterable[int]] = None
) -> int:
    """|W_J| / |Stab(w)| for the Weyl group W_J of the node subset (default all)"""
    js = node_set(rs, nodes)
    if not is_dominant(w, js):
        raise ContractError(
            f"orbit_size needs a dominant weight, got {format_weight(w)}"
        )
    idx = node_indices(rs, js)
    stab = [i + 1 for i in idx if w[i] == 0]
    return rs.parabolic_order(i + 1 for i in idx) // rs.parabolic_order(stab)


def weyl_orbit(
    rs: RootSystem,
    w: Sequence[int],
    cap: int,
    nodes: Optional[Iterable[int]] = None,
) -> List[Weight]:
    """All Weyl conjugates of a dominant weight, starting with the weight itself.

    Raises:
        CapExceededError: if the orbit is larger than ``cap``
    """
    size = orbit_size(rs, w, nodes)
    if size > cap:
        raise CapExceededError(f"orbit of {format_weight(w)} in {rs.type}", size, cap)
    idx = node_indices(rs, node_set(rs, nodes))
    start = tuple(w)
    orbit, seen, frontier = [start], {start}, [start]
    while frontier:
        nxt = []
        for v in frontier:
            for i in idx:
                if v[i] > 0:
                    u = rs.reflect(v, i)
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
        orbit.extend(nxt)
        frontier = nxt
    return orbit


def graph_automorphisms(t: SimpleType) -> Dict[str, GraphAut]:
    """Named nontrivial diagram automorphisms available for the type"""
    n, fam = t.rank, t.family
    auts: Dict[str, GraphAut] = {}
    if fam == "A" and n >= 2:
        auts["flip"] = GraphAut(
            perm=tuple(n + 1 - i for i in range(1, n + 1)), name="flip"
        )
    elif fam == "D":
        auts["swap"] = GraphAut.from_cycles(n, [(n - 1, n)], name="swap")
        if n == 4:
            auts["triality"] = GraphAut.from_cycles(4, [(1, 3, 4)], name="triality")
    elif fam == "E" and n == 6:
        auts["flip"] = GraphAut.from_cycles(6, [(1, 6), (3, 5)], name="flip")
    return auts


def validate_graph_aut(rs: RootSystem, sigma: GraphAut) -> None:
    n = rs.rank
    if sorted(sigma.perm) != list(range(1, n + 1)):
        raise InvalidAutomorphismError(f"{sigma.perm} is not a permutation of 1..{n}")
    a = rs.cartan
    for i in range(n):
        for j in range(n):
            if a[sigma.perm[i] - 1][sigma.perm[j] - 1] != a[i][j]:
                raise InvalidAutomorphismError(
                    f"{sigma.perm} does not preserve the Cartan matrix of {rs.type}"
                )


def apply_graph_aut(rs: RootSystem, sigma: GraphAut, w: Sequence[int]) -> Weight:
    validate_graph_aut(rs, sigma)
    return tuple(w[p - 1] for p in sigma.perm)


def generate_aut_group(rank: int, gens: Iterable[GraphAut]) -> List[GraphAut]:
    """Closure of the generators under composition, identity first"""
    ident = GraphAut.identity(rank)
    group = {ident.perm: ident}
    frontier = [ident]
    gens = list(gens)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = h.compose(g)
                if k.perm not in group:
                    group[k.perm] = k
                    nxt.append(k)
        frontier = nxt
    return list(group.values())


def highest_root(rs: RootSystem) -> Root:
    return rs.pos_roots[-1]
