"""
Embeddings X < G = Isom(V_X(delta)): the invariant form, the ambient classical
group, the torus-restriction map on weights and root-restriction tables.
"""

from collections import Counter
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from app.exceptions import ContractError, UnknownFormError
from app.services.characters import Character, group_label, weyl_character
from app.services.rootcore import (
    RootSystem,
    SimpleType,
    Weight,
    build_root_system,
    format_weight,
    fundamental_weight,
    is_dominant,
    is_self_dual,
    simple_type,
)

logger = structlog.get_logger(__name__)

CLASSICAL = ("A", "B", "C", "D")


class FormKind(str, Enum):
    SYMMETRIC = "symmetric"
    SKEW = "skew"
    NONE = "none"


class FormType(BaseModel):
    """Invariant bilinear form on V_X(delta), with a quoted quadratic type at p = 2"""

    model_config = ConfigDict(frozen=True)

    kind: FormKind
    p2_override: Optional[str] = None

    def __str__(self) -> str:
        return self.kind.value


class EmbeddingSpec(BaseModel):
    """X < G given by the T_X-weights theta_1 .. theta_n.

    theta_i is the restriction of epsilon_i to the maximal torus of X.
    """

    group: str
    x_type: Optional[SimpleType] = None
    delta: Optional[Tuple[int, ...]] = None
    dim: int
    form: FormType
    ambient: SimpleType
    theta: List[Tuple[int, ...]]

    @classmethod
    def from_theta(
        cls, group: str, ambient: SimpleType, theta: Sequence[Sequence[int]]
    ) -> "EmbeddingSpec":
        """Embedding of a product of A1s (or any X) given directly by its T_X-weights"""
        if ambient.family not in CLASSICAL:
            raise ContractError(f"Ambient {ambient} is not classical")
        expected = ambient.rank + 1 if ambient.family == "A" else ambient.rank
        if len(theta) != expected:
            raise ContractError(
                f"{ambient} needs {expected} theta entries, got {len(theta)}"
            )
        kind = {"A": FormKind.NONE, "C": FormKind.SKEW}.get(
            ambient.family, FormKind.SYMMETRIC
        )
        return cls(
            group=group,
            dim=_natural_dim(ambient),
            form=FormType(kind=kind),
            ambient=ambient,
            theta=[tuple(t) for t in theta],
        )

    def to_json(self) -> dict:
        return {
            "x": self.group,
            "delta": format_weight(self.delta) if self.delta is not None else None,
            "dim": self.dim,
            "form": str(self.form),
            "ambient": str(self.ambient),
            "theta": [format_weight(t) for t in self.theta],
        }


class RootRestriction(BaseModel):
    node: int
    restriction: Tuple[int, ...]
    root_coords: Optional[Tuple[int, ...]] = None


class RootRestrictionTable(BaseModel):
    rows: List[RootRestriction]


def _natural_dim(t: SimpleType) -> int:
    return {"A": t.rank + 1, "B": 2 * t.rank + 1}.get(t.family, 2 * t.rank)


def form_sign(rs_x: RootSystem, delta: Sequence[int]) -> FormType:
    """Steinberg's criterion: parity of the sum of <delta, beta^vee> over beta > 0"""
    if not is_dominant(delta):
        raise ContractError(f"{format_weight(delta)} is not dominant for {rs_x.type}")
    if not is_self_dual(rs_x, delta):
        return FormType(kind=FormKind.NONE)
    total = sum(rs_x.coroot_pairing(delta, k) for k in range(len(rs_x.pos_roots)))
    return FormType(kind=FormKind.SKEW if total % 2 else FormKind.SYMMETRIC)


def form_sign_by_height(rs_x: RootSystem, delta: Sequence[int]) -> FormType:
    """Same answer from <delta, 2 rho^vee> = 2 ht(delta)"""
    if not is_self_dual(rs_x, delta):
        return FormType(kind=FormKind.NONE)
    doubled, rem = divmod(2 * rs_x.scaled_height(delta), rs_x.inv_cartan_den)
    if rem:
        raise ContractError(f"<{format_weight(delta)}, 2 rho^vee> is not integral")
    return FormType(kind=FormKind.SKEW if doubled % 2 else FormKind.SYMMETRIC)


def ambient_group(dim_w: int, form: FormType, p: int = 0) -> SimpleType:
    """Isom(W)' for a module of dimension dim_w carrying the given form.

    Raises:
        UnknownFormError: p = 2 with a form and no quoted quadratic type
        ContractError: skew form on an odd-dimensional space
    """
    if dim_w < 2:
        raise ContractError(
            f"Module of dimension {dim_w} has no ambient classical group"
        )
    kind = form.kind
    if kind == FormKind.NONE:
        return simple_type("A", dim_w - 1)
    if p == 2:
        if form.p2_override is None:
            raise UnknownFormError(
                f"Quadratic type of a {dim_w}-dimensional module is unknown at p=2"
            )
        kind = FormKind.SYMMETRIC if form.p2_override == "orthogonal" else FormKind.SKEW
    if kind == FormKind.SKEW:
        if dim_w % 2:
            raise ContractError(f"Skew form on odd dimension {dim_w}")
        return simple_type("C", dim_w // 2)
    if dim_w % 2:
        return simple_type("B", (dim_w - 1) // 2)
    return simple_type("D", dim_w // 2)


def _level_key(rs_x: RootSystem, delta: Sequence[int], w: Weight):
    coords = rs_x.scaled_coords(tuple(a - b for a, b in zip(delta, w)))
    den = rs_x.inv_cartan_den
    unit = tuple(c // den for c in coords)
    # level, then descending lexicographic on root coordinates
    return (sum(unit), tuple(-c for c in unit))


def torus_assignment(
    rs_x: RootSystem,
    delta: Sequence[int],
    char: Optional[Character] = None,
    form: Optional[FormType] = None,
    ambient: Optional[SimpleType] = None,
    p: int = 0,
    cap: Optional[int] = None,
) -> EmbeddingSpec:
    """Pair the weights of V_X(delta) into theta_1 .. theta_n.

    Weights are sorted by Borel level, then by root coordinates; each weight
    is paired with its negation and the earlier one is kept. With no form
    (or an explicit type A ambient) theta is the full sorted weight list.

    Raises:
        ContractError: the weight multiset is not negation-symmetric
    """
    delta = tuple(delta)
    if char is None:
        char = weyl_character(rs_x, delta, cap)
    if form is None:
        form = form_sign(rs_x, delta)
    if ambient is None:
        ambient = ambient_group(char.dim, form, p)
    elif ambient.family not in CLASSICAL:
        raise ContractError(f"Ambient {ambient} is not classical")
    if _natural_dim(ambient) != char.dim:
        raise ContractError(
            f"{ambient} has natural dimension {_natural_dim(ambient)},"
            f" module has {char.dim}"
        )

    ordered: List[Weight] = []
    for w in sorted(char.entries, key=lambda w: _level_key(rs_x, delta, w)):
        ordered.extend([w] * char.mult(w))

    if ambient.family == "A":
        theta = ordered
    else:
        for w, m in char.items():
            if char.mult(tuple(-x for x in w)) != m:
                raise ContractError(
                    f"Weight {format_weight(w)} and its negation"
                    " have different multiplicities"
                )
        remaining = Counter(char.entries)
        theta = []
        for w in ordered:
            neg = tuple(-x for x in w)
            if neg == w:
                if remaining[w] >= 2:
                    remaining[w] -= 2
                    theta.append(w)
            elif remaining[w] and remaining[neg]:
                remaining[w] -= 1
                remaining[neg] -= 1
                theta.append(w)
        if len(theta) != ambient.rank:
            raise ContractError(
                f"Pairing produced {len(theta)} entries,"
                f" {ambient} has rank {ambient.rank}"
            )

    logger.debug(
        "torus assignment",
        x=str(rs_x.type),
        delta=format_weight(delta),
        ambient=str(ambient),
    )
    return EmbeddingSpec(
        group=group_label(rs_x),
        x_type=rs_x.type,
        delta=delta,
        dim=char.dim,
        form=form,
        ambient=ambient,
        theta=theta,
    )


def epsilon_matrix(ambient: SimpleType) -> np.ndarray:
    """Rows: doubled epsilon_j coefficient of each fundamental weight of G"""
    fam, n = ambient.family, ambient.rank
    if fam not in CLASSICAL:
        raise ContractError(f"No epsilon coordinates for {ambient}")
    if fam == "A":
        m = np.zeros((n + 1, n), dtype=np.int64)
        for j in range(n):
            m[j, j:] = 2
        return m
    m = np.zeros((n, n), dtype=np.int64)
    if fam == "C":
        for j in range(n):
            m[j, j:] = 2
    elif fam == "B":
        for j in range(n):
            m[j, j : n - 1] = 2
            m[j, n - 1] = 1
    else:
        for j in range(n - 1):
            m[j, j : n - 2] = 2
            m[j, n - 2] = 1
            m[j, n - 1] = 1
        m[n - 1, n - 2] = -1
        m[n - 1, n - 1] = 1
    return m


def epsilon_coordinates(ambient: SimpleType, labels: Sequence[int]) -> Tuple[int, ...]:
    """Doubled epsilon coordinates of a weight given in Dynkin labels"""
    doubled = epsilon_matrix(ambient).dot(np.asarray(labels, dtype=np.int64))
    return tuple(int(x) for x in doubled)


def restrict_weights(spec: EmbeddingSpec, char: Character) -> Character:
    """Substitute epsilon_i -> theta_i in every weight of an ambient character"""
    if not char.entries:
        return Character(spec.group, {})
    items = list(char.items())
    weights = np.array([w for w, _ in items], dtype=np.int64)
    mults = np.array([m for _, m in items], dtype=np.int64)
    eps = weights.dot(epsilon_matrix(spec.ambient).T)
    theta = np.array(spec.theta, dtype=np.int64)
    doubled = eps.dot(theta)
    if np.any(doubled % 2):
        raise ContractError(f"Restriction through {spec.ambient} is not integral on X")
    restricted = doubled // 2
    unique, inverse = np.unique(restricted, axis=0, return_inverse=True)
    totals = np.zeros(len(unique), dtype=np.int64)
    np.add.at(totals, inverse.reshape(-1), mults)
    return Character(
        spec.group,
        {tuple(int(x) for x in row): int(t) for row, t in zip(unique, totals)},
    )


def restrict_character(
    rs_g: RootSystem,
    lam: Sequence[int],
    spec: EmbeddingSpec,
    cap: Optional[int] = None,
) -> Character:
    """Character of V_G(lam) restricted to X.

    Raises:
        CapExceededError: if V_G(lam) has too many weights
        ContractError: rs_g is not the ambient group of the embedding
    """
    if rs_g.type != spec.ambient:
        raise ContractError(f"Embedding lives in {spec.ambient}, not {rs_g.type}")
    restricted = restrict_weights(spec, weyl_character(rs_g, lam, cap))
    logger.debug(
        "restricted",
        ambient=str(rs_g.type),
        lam=format_weight(lam),
        dim=restricted.dim,
    )
    return restricted


def _last_restriction(spec: EmbeddingSpec) -> Tuple[int, ...]:
    theta = spec.theta
    fam = spec.ambient.family
    if fam == "C":
        return tuple(2 * x for x in theta[-1])
    if fam == "B":
        return tuple(theta[-1])
    return tuple(a + b for a, b in zip(theta[-2], theta[-1]))


def root_restrictions(spec: EmbeddingSpec) -> RootRestrictionTable:
    """alpha_i|X = theta_i - theta_{i+1}, with the classical closing row"""
    theta = spec.theta
    rows = [
        tuple(a - b for a, b in zip(theta[i], theta[i + 1]))
        for i in range(len(theta) - 1)
    ]
    if spec.ambient.family != "A":
        rows.append(_last_restriction(spec))
    rs_x = build_root_system(spec.x_type) if spec.x_type is not None else None
    table = []
    for node, r in enumerate(rows, start=1):
        coords = None
        if rs_x is not None:
            scaled = rs_x.scaled_coords(r)
            coords = tuple(c // rs_x.inv_cartan_den for c in scaled)
        table.append(RootRestriction(node=node, restriction=r, root_coords=coords))
    return RootRestrictionTable(rows=table)


def _root_expression(coords: Optional[Sequence[int]]) -> str:
    if coords is None:
        return "-"
    terms = []
    for i, c in enumerate(coords, start=1):
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if terms else "")
        mag = "" if abs(c) == 1 else str(abs(c))
        terms.append(f"{sign}{mag}b{i}")
    return "".join(terms) or "0"


def format_root_restrictions_tsv(table: RootRestrictionTable) -> str:
    lines = ["node\trestriction\troots"]
    for row in table.rows:
        restriction = format_weight(row.restriction)
        lines.append(f"a{row.node}\t{restriction}\t{_root_expression(row.root_coords)}")
    return "\n".join(lines) + "\n"


def natural_embedding_check(family: str, rank: int, cap: Optional[int] = None) -> bool:
    """Y classical in SL(W) on its natural module: lambda_i|Y has highest
    weight delta_i.

    Checked for i <= rank - 2 (at least i = 1).
    """
    x = simple_type(family, rank)
    if x.family not in ("B", "C", "D"):
        raise ContractError(f"{x} is not an orthogonal or symplectic type")
    rs_x = build_root_system(x)
    natural = fundamental_weight(rank, 1)
    char = weyl_character(rs_x, natural, cap)
    ambient = simple_type("A", char.dim - 1)
    spec = torus_assignment(
        rs_x,
        natural,
        char=char,
        form=FormType(kind=FormKind.NONE),
        ambient=ambient,
    )
    rs_g = build_root_system(ambient)
    for i in range(1, max(1, rank - 2) + 1):
        lam = fundamental_weight(ambient.rank, i)
        restricted = restrict_character(rs_g, lam, spec, cap)
        top = max(restricted.entries, key=lambda w: (rs_x.scaled_height(w), w))
        if top != fundamental_weight(rank, i):
            logger.info(
                "natural embedding mismatch", y=str(x), i=i, top=format_weight(top)
            )
            return False
    return True
