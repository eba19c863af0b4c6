"""
Characteristic-zero characters: Freudenthal multiplicities, Weyl dimensions,
Premet weight sets, the character ring (tensor, exterior and symmetric powers)
and decomposition by highest-weight extraction.
"""

import threading
from collections import defaultdict
from fractions import Fraction
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import structlog
from pydantic import BaseModel

from app.config import get_settings
from app.exceptions import CapExceededError, ContractError, NotACharacterError
from app.services.rootcore import (
    RootSystem,
    SimpleType,
    Weight,
    build_root_system,
    dominant_conjugate_on_indices,
    format_weight,
    is_dominant,
    node_indices,
    node_set,
    orbit_size,
    weyl_orbit,
)

logger = structlog.get_logger(__name__)

# (type, highest weight, 0-based Levi nodes or None) -> dominant multiplicities
_MemoKey = Tuple[SimpleType, Weight, Optional[FrozenSet[int]]]
_FREUDENTHAL_MEMO: Dict[_MemoKey, Dict[Weight, int]] = {}
_MEMO_LOCK = threading.Lock()

Chooser = Callable[[List[Weight]], Weight]


def _resolve_cap(cap: Optional[int]) -> int:
    return get_settings().cap if cap is None else cap


class Budget:
    """Running count of entries charged against the cap"""

    def __init__(self, cap: Optional[int] = None):
        self.cap = _resolve_cap(cap)
        self.used = 0

    def charge(self, amount: int, what: str) -> None:
        self.used += amount
        if self.used > self.cap:
            raise CapExceededError(what, self.used, self.cap)


class Character:
    """Finite map weight -> positive multiplicity.

    ``group`` labels the group the weights belong to ("A5", "A1^2", ...);
    ``highest`` is set for characters of irreducible modules.
    """

    __slots__ = ("group", "entries", "highest")

    def __init__(
        self,
        group: str,
        entries: Mapping[Weight, int],
        highest: Optional[Weight] = None,
    ):
        cleaned: Dict[Weight, int] = {}
        for w, m in entries.items():
            if m < 0:
                raise ContractError(
                    f"Negative multiplicity {m} at {format_weight(w)}"
                )
            if m:
                cleaned[tuple(w)] = int(m)
        self.group = group
        self.entries = cleaned
        self.highest = tuple(highest) if highest is not None else None

    @classmethod
    def trivial(cls, group: str, rank: int) -> "Character":
        return cls(group, {(0,) * rank: 1}, highest=(0,) * rank)

    @property
    def dim(self) -> int:
        return sum(self.entries.values())

    @property
    def rank(self) -> int:
        return len(next(iter(self.entries))) if self.entries else 0

    def mult(self, w: Sequence[int]) -> int:
        return self.entries.get(tuple(w), 0)

    def items(self):
        return self.entries.items()

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Character):
            return NotImplemented
        return self.group == other.group and self.entries == other.entries

    def __repr__(self) -> str:
        return f"Character({self.group}, dim={self.dim}, weights={len(self.entries)})"

    def to_json(self) -> dict:
        """Canonical JSON form, weights in lexicographic order"""
        return {
            "type": self.group,
            "highest": (
                format_weight(self.highest) if self.highest is not None else None
            ),
            "dim": self.dim,
            "weights": [
                {"wt": format_weight(w), "mult": m}
                for w, m in sorted(self.entries.items())
            ],
        }


class Decomposition(BaseModel):
    """Highest weights of composition factors with multiplicities"""

    group: str
    factors: Dict[Tuple[int, ...], int]

    @property
    def kappa(self) -> int:
        return sum(self.factors.values())

    @property
    def distinct(self) -> int:
        return len(self.factors)

    def to_json(self) -> dict:
        return {
            "factors": [
                {"hw": format_weight(w), "mult": m}
                for w, m in sorted(self.factors.items())
            ]
        }


def group_label(rs: RootSystem) -> str:
    return str(rs.type)


def is_p_restricted(lam: Sequence[int], p: int) -> bool:
    return is_dominant(lam) and (p == 0 or all(x < p for x in lam))


# -- Freudenthal ----------------------------------------------------------


def _form_rows(rs: RootSystem) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in rs.form_matrix)


def _ip(form: Tuple[Tuple[int, ...], ...], a: Sequence[int], b: Sequence[int]) -> int:
    n = len(a)
    return sum(
        a[i] * sum(form[i][j] * b[j] for j in range(n)) for i in range(n) if a[i]
    )


def _dominant_weights(
    rs: RootSystem,
    lam: Weight,
    root_wts: List[Weight],
    js: Optional[FrozenSet[int]],
) -> List[Weight]:
    """Dominant weights below lam, by successive subtraction of positive roots"""
    seen = {lam}
    frontier = [lam]
    n = rs.rank
    while frontier:
        nxt = []
        for mu in frontier:
            for rw in root_wts:
                nu = tuple(mu[j] - rw[j] for j in range(n))
                if nu not in seen and is_dominant(nu, js):
                    seen.add(nu)
                    nxt.append(nu)
        frontier = nxt
    return list(seen)


def _freudenthal_table(
    rs: RootSystem, lam: Weight, js: Optional[FrozenSet[int]]
) -> Dict[Weight, int]:
    if not is_dominant(lam, js):
        raise ContractError(f"{format_weight(lam)} is not dominant for {rs.type}")
    n = rs.rank
    idx = node_indices(rs, js)
    form = _form_rows(rs)
    root_wts = [rs.root_to_weight(rs.pos_roots[k]) for k in rs.levi_root_indices(js)]
    root_forms = [
        tuple(sum(form[i][j] * rw[j] for j in range(n)) for i in range(n))
        for rw in root_wts
    ]
    root_norms = [
        sum(rw[i] * rf[i] for i in range(n)) for rw, rf in zip(root_wts, root_forms)
    ]

    dominant = _dominant_weights(rs, lam, root_wts, js)
    dominant.sort(
        key=lambda mu: rs.scaled_height(tuple(a - b for a, b in zip(lam, mu)))
    )

    def shifted_norm(mu: Sequence[int]) -> int:
        shifted = tuple(x + 1 for x in mu)
        return _ip(form, shifted, shifted)

    top = shifted_norm(lam)
    mult: Dict[Weight, int] = {lam: 1}
    conj: Dict[Weight, Weight] = {}
    for mu in dominant:
        if mu == lam:
            continue
        total = 0
        for rw, rf, rn in zip(root_wts, root_forms, root_norms):
            base = sum(mu[i] * rf[i] for i in range(n))
            k = 1
            while True:
                nu = tuple(mu[j] + k * rw[j] for j in range(n))
                dom = conj.get(nu)
                if dom is None:
                    dom = dominant_conjugate_on_indices(rs, nu, idx)
                    conj[nu] = dom
                m = mult.get(dom, 0)
                if not m:
                    break
                total += m * (base + k * rn)
                k += 1
        denom = top - shifted_norm(mu)
        value, rem = divmod(2 * total, denom)
        if rem or value <= 0:
            raise ContractError(
                f"Freudenthal recursion failed at {format_weight(mu)}"
                f" in V({format_weight(lam)})"
            )
        mult[mu] = value
    return mult


def dominant_multiplicities(
    rs: RootSystem, lam: Sequence[int], nodes: Optional[Iterable[int]] = None
) -> Dict[Weight, int]:
    """Multiplicities of the dominant weights of V(lam).

    With ``nodes`` the module is the irreducible of the Levi subgroup generated
    by those (1-based) nodes and "dominant" is relative to that Levi.
    """
    js = node_set(rs, nodes)
    key = (rs.type, tuple(lam), js)
    table = _FREUDENTHAL_MEMO.get(key)
    if table is None:
        table = _freudenthal_table(rs, tuple(lam), js)
        with _MEMO_LOCK:
            table = _FREUDENTHAL_MEMO.setdefault(key, table)
        logger.debug(
            "freudenthal table",
            type=str(rs.type),
            highest=format_weight(lam),
            dominant=len(table),
        )
    return table


def freudenthal_multiplicity(
    rs: RootSystem, lam: Sequence[int], mu: Sequence[int]
) -> int:
    """Multiplicity of mu in the characteristic-zero irreducible V(lam)"""
    if not is_dominant(lam):
        raise ContractError(f"{format_weight(lam)} is not dominant for {rs.type}")
    table = dominant_multiplicities(rs, lam)
    return table.get(dominant_conjugate_on_indices(rs, mu, range(rs.rank)), 0)


def seitz86_multiplicity(
    m: int, a: int, b: int, i: int, j: int, r: int, s: int, p: int
) -> int:
    """Multiplicity of lam - (alpha_r + ... + alpha_s) in V_{A_m}(a*lam_i + b*lam_j).

    Args:
        m: rank of the type A group
        a, b: nonzero labels at nodes i < j
        r, s: 1 <= r <= i and j <= s <= m
        p: characteristic (0 allowed)
    """
    nodes_ok = 1 <= i < j <= m and 1 <= r <= i and j <= s <= m
    if not (nodes_ok and a != 0 and b != 0 and p >= 0):
        raise ContractError(
            "seitz86 hypotheses violated: "
            f"m={m} a={a} b={b} i={i} j={j} r={r} s={s} p={p}"
        )
    if p > 0 and (a + b + j - i) % p == 0:
        return j - i
    return j - i + 1


def weyl_dimension(
    rs: RootSystem, lam: Sequence[int], nodes: Optional[Iterable[int]] = None
) -> int:
    """Weyl dimension formula over the positive roots (of the Levi, if given)"""
    if not is_dominant(lam, node_set(rs, nodes)):
        raise ContractError(f"{format_weight(lam)} is not dominant for {rs.type}")
    num, den = 1, 1
    for k in rs.levi_root_indices(node_set(rs, nodes)):
        num *= rs.coroot_pairing(lam, k) + rs.coroot_pairing(rs.rho, k)
        den *= rs.coroot_pairing(rs.rho, k)
    value = Fraction(num, den)
    if value.denominator != 1:
        raise ContractError(f"Non-integral Weyl dimension for {format_weight(lam)}")
    return int(value)


def _expand(
    rs: RootSystem,
    table: Mapping[Weight, int],
    cap: int,
    nodes: Optional[Iterable[int]],
    what: str,
) -> Dict[Weight, int]:
    nodes = None if nodes is None else list(nodes)
    size = sum(orbit_size(rs, mu, nodes) for mu in table)
    if size > cap:
        raise CapExceededError(what, size, cap)
    entries: Dict[Weight, int] = {}
    for mu, m in table.items():
        for w in weyl_orbit(rs, mu, cap, nodes):
            entries[w] = m
    return entries


def weyl_character(
    rs: RootSystem,
    lam: Sequence[int],
    cap: Optional[int] = None,
    nodes: Optional[Iterable[int]] = None,
) -> Character:
    """Full character of V(lam) (Weyl-module character at any p).

    Raises:
        CapExceededError: if the number of distinct weights exceeds the cap
    """
    nodes = None if nodes is None else list(nodes)
    table = dominant_multiplicities(rs, lam, nodes)
    what = f"character of {format_weight(lam)} in {rs.type}"
    entries = _expand(rs, table, _resolve_cap(cap), nodes, what)
    return Character(group_label(rs), entries, highest=tuple(lam))


def character_dimension(
    rs: RootSystem, lam: Sequence[int], nodes: Optional[Iterable[int]] = None
) -> int:
    """Dimension of V(lam); for a Levi given by ``nodes``, summed over its
    dominant weights"""
    if nodes is None:
        return weyl_dimension(rs, lam)
    nodes = list(nodes)
    table = dominant_multiplicities(rs, lam, nodes)
    return sum(m * orbit_size(rs, mu, nodes) for mu, m in table.items())


def weight_set(
    rs: RootSystem, lam: Sequence[int], cap: Optional[int] = None
) -> Character:
    """Weights of V(lam) with multiplicity 1: the Premet weight set"""
    if not is_dominant(lam):
        raise ContractError(f"{format_weight(lam)} is not dominant for {rs.type}")
    root_wts = [rs.root_to_weight(r) for r in rs.pos_roots]
    dominant = _dominant_weights(rs, tuple(lam), root_wts, None)
    entries = _expand(
        rs,
        {mu: 1 for mu in dominant},
        _resolve_cap(cap),
        None,
        f"weight set of {format_weight(lam)}",
    )
    return Character(group_label(rs), entries, highest=tuple(lam))


# -- character ring -------------------------------------------------------


def _multiply(
    a: Mapping[Weight, int], b: Mapping[Weight, int], budget: Budget, what: str
) -> Dict[Weight, int]:
    budget.charge(len(a) * len(b), what)
    out: Dict[Weight, int] = defaultdict(int)
    for wa, ma in a.items():
        for wb, mb in b.items():
            out[tuple(x + y for x, y in zip(wa, wb))] += ma * mb
    return out


def tensor(c1: Character, c2: Character, cap: Optional[int] = None) -> Character:
    """Tensor product: convolution of weight maps"""
    if c1.group != c2.group:
        raise ContractError(f"Cannot tensor characters of {c1.group} and {c2.group}")
    product = _multiply(
        c1.entries, c2.entries, Budget(cap), f"tensor product in {c1.group}"
    )
    return Character(c1.group, product)


def adams_operation(c: Character, k: int) -> Character:
    """psi^k: every weight scaled by k"""
    return Character(c.group, {tuple(k * x for x in w): m for w, m in c.items()})


def dual_character(c: Character) -> Character:
    return Character(c.group, {tuple(-x for x in w): m for w, m in c.items()})


def _newton_power(c: Character, k: int, signed: bool, cap: Optional[int]) -> Character:
    if k < 0:
        raise ContractError(f"Power index must be non-negative, got {k}")
    zero = (0,) * c.rank
    if k == 0:
        return Character(c.group, {zero: 1})
    if not c.entries:
        return Character(c.group, {})
    budget = Budget(cap)
    kind = "exterior" if signed else "symmetric"
    what = f"{kind} power {k} of {c.group}"
    adams = [None] + [adams_operation(c, i).entries for i in range(1, k + 1)]
    powers: List[Dict[Weight, int]] = [{zero: 1}]
    for n in range(1, k + 1):
        acc: Dict[Weight, int] = defaultdict(int)
        for i in range(1, n + 1):
            sign = -1 if signed and i % 2 == 0 else 1
            for w, m in _multiply(powers[n - i], adams[i], budget, what).items():
                acc[w] += sign * m
        level: Dict[Weight, int] = {}
        for w, m in acc.items():
            q, rem = divmod(m, n)
            if rem:
                raise ContractError(
                    f"Newton recursion produced a non-integral coefficient at step {n}"
                )
            if q:
                level[w] = q
        powers.append(level)
    return Character(c.group, powers[k])


def exterior_power(c: Character, k: int, cap: Optional[int] = None) -> Character:
    """k-th exterior power through the Newton identities over Adams operations"""
    return _newton_power(c, k, signed=True, cap=cap)


def symmetric_power(c: Character, k: int, cap: Optional[int] = None) -> Character:
    return _newton_power(c, k, signed=False, cap=cap)


# -- decomposition --------------------------------------------------------


def _under_levi(
    rs: RootSystem, mu: Weight, nu: Weight, js: Optional[FrozenSet[int]]
) -> bool:
    den = rs.inv_cartan_den
    diff = rs.scaled_coords(tuple(a - b for a, b in zip(nu, mu)))
    for i, x in enumerate(diff):
        if x < 0 or x % den:
            return False
        if js is not None and i not in js and x:
            return False
    return True


def _maximal(
    rs: RootSystem, weights: List[Weight], js: Optional[FrozenSet[int]]
) -> List[Weight]:
    return sorted(
        mu
        for mu in weights
        if not any(nu != mu and _under_levi(rs, mu, nu, js) for nu in weights)
    )


def decompose(
    rs: RootSystem,
    c: Character,
    cap: Optional[int] = None,
    nodes: Optional[Iterable[int]] = None,
    chooser: Optional[Chooser] = None,
) -> Decomposition:
    """Split a character into irreducible characters by highest-weight extraction.

    The dominant weight of greatest height is extracted first, ties broken by
    descending lexicographic labels. ``chooser`` may override the pick among
    the currently maximal dominant weights.

    Raises:
        NotACharacterError: if a multiplicity goes negative or dimensions disagree
    """
    nodes = None if nodes is None else list(nodes)
    js = node_set(rs, nodes)
    remaining = {w: m for w, m in c.items() if is_dominant(w, js)}
    factors: Dict[Weight, int] = defaultdict(int)
    while remaining:
        if chooser is not None:
            pick = chooser(_maximal(rs, list(remaining), js))
        else:
            pick = max(remaining, key=lambda w: (rs.scaled_height(w), w))
        count = remaining[pick]
        for w, k in dominant_multiplicities(rs, pick, nodes).items():
            left = remaining.get(w, 0) - count * k
            if left < 0:
                raise NotACharacterError(
                    f"Extracting {count} x V({format_weight(pick)}) leaves"
                    f" multiplicity {left} at {format_weight(w)}"
                )
            if left:
                remaining[w] = left
            else:
                remaining.pop(w, None)
        factors[pick] += count
    total = sum(m * character_dimension(rs, w, nodes) for w, m in factors.items())
    if total != c.dim:
        raise NotACharacterError(
            f"Factors account for dimension {total}, character has {c.dim}"
        )
    return Decomposition(group=c.group, factors=dict(factors))


def _dot_dominant(rs: RootSystem, w: Sequence[int]) -> Optional[Tuple[Weight, int]]:
    """(dominant weight, sign) with w + rho = sign * u(dominant + rho).

    None when w + rho lies on a wall.
    """
    shifted = tuple(x + 1 for x in w)
    sign = 1
    while True:
        pick = next((i for i, x in enumerate(shifted) if x < 0), -1)
        if pick < 0:
            break
        shifted = rs.reflect(shifted, pick)
        sign = -sign
    if 0 in shifted:
        return None
    return tuple(x - 1 for x in shifted), sign


def exterior_square_decomposition(
    rs: RootSystem, lam: Sequence[int], cap: Optional[int] = None
) -> Decomposition:
    """Factors of the exterior square of V(lam) without building the square.

    Brauer-Klimyk over the weights mu of V gives V x V as sum of V(lam + mu)
    and the second Adams operation as sum of V(2 mu), each straightened by
    the dot action. The exterior square is half their difference.
    """
    lam = tuple(lam)
    acc: Dict[Weight, int] = defaultdict(int)
    for mu, m in weyl_character(rs, lam, cap).items():
        for target, sign in (
            (tuple(a + b for a, b in zip(lam, mu)), 1),
            (tuple(2 * x for x in mu), -1),
        ):
            straightened = _dot_dominant(rs, target)
            if straightened is not None:
                nu, eps = straightened
                acc[nu] += sign * eps * m
    factors: Dict[Weight, int] = {}
    for nu, twice in acc.items():
        if twice < 0 or twice % 2:
            raise NotACharacterError(
                f"Exterior square coefficient {twice}/2 at {format_weight(nu)}"
            )
        if twice:
            factors[nu] = twice // 2
    return Decomposition(group=group_label(rs), factors=factors)


def character_from_decomposition(
    rs: RootSystem,
    d: Decomposition,
    cap: Optional[int] = None,
    nodes: Optional[Iterable[int]] = None,
) -> Character:
    """Rebuild the character of a direct sum of irreducibles"""
    entries: Dict[Weight, int] = defaultdict(int)
    for hw, m in d.factors.items():
        for w, k in weyl_character(rs, hw, cap, nodes).items():
            entries[w] += m * k
    return Character(d.group, entries)


# -- predicates on restricted data ----------------------------------------

_SPECIAL_CHARACTERISTIC = {"B": 2, "C": 2, "F": 2, "G": 3}


def tensor_decomposable_predicate(t: SimpleType, p: int, lam: Sequence[int]) -> bool:
    """True iff V(lam) is a twisted tensor product of short-root and long-root parts"""
    if not is_p_restricted(lam, p):
        raise ContractError(f"{format_weight(lam)} is not {p}-restricted")
    if _SPECIAL_CHARACTERISTIC.get(t.family) != p:
        return False
    short = build_root_system(t).short_nodes
    support = {i for i, x in enumerate(lam, start=1) if x > 0}
    return bool(support & short) and bool(support - short)


def min_factors_rank_one(c_restricted: Character) -> int:
    """Maximum weight multiplicity over a product of A1s.

    Every weight space of an irreducible module for a product of A1s is
    one-dimensional, so this bounds the number of composition factors below.
    """
    return max(c_restricted.entries.values(), default=0)
