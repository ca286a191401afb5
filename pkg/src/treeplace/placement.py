"""Top-down replica placement from the contribution tables.

Starting at the artificial root with hop index 0, each visit of
``(v, i)`` equips the equip set ``e(v, i)``, then recurses into every
child: equipped children restart at index 0, the rest carry ``i + 1``
(their nearest equipped ancestor is one hop further away). Traversal is
an explicit stack so degenerate path trees of depth 1e5 are fine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contribution import ContributionTable
from .errors import ContractViolationError, InfeasibleError
from .transform import StarTree

REASON_ROOT_OVERLOAD = "workload at the root exceeds capacity"


@dataclass(frozen=True)
class PlacementResult:
    replicas_star: tuple[str, ...]  # star node ids, ascending
    replicas_original: tuple[str, ...]  # original internal node ids, ascending
    cardinality: int
    trace: tuple[tuple[str, int, tuple[str, ...]], ...]  # (node, index, placed)


def place_replicas(star: StarTree, table: ContributionTable) -> PlacementResult:
    """Walk the tree and collect the replica set recorded in the tables.

    The trace logs every call in deterministic preorder (children in
    ascending id order), including calls on ineligible leaves. The
    resulting cardinality must equal the table's minimum count; any
    mismatch is a solver bug.
    """
    children = star.children
    by_id = star.by_id
    placed: set[str] = set()
    trace: list[tuple[str, int, tuple[str, ...]]] = []

    stack: list[tuple[str, int]] = [(star.root_plus, 0)]
    while stack:
        vid, idx = stack.pop()
        node = by_id[vid]
        if node.leaf is not None and not node.leaf.eligible:
            trace.append((vid, idx, ()))
            continue
        e_set = table.equip_set(vid, idx)
        trace.append((vid, idx, e_set))
        placed.update(e_set)
        e_lookup = set(e_set)
        for child in reversed(children[vid]):
            stack.append((child, 0 if child in e_lookup else idx + 1))

    for rid in placed:
        leaf = by_id[rid].leaf
        if leaf is not None and not leaf.eligible:
            raise ContractViolationError(f"replica placed on ineligible leaf {rid!r}")
    if len(placed) != table.min_replica_count:
        raise ContractViolationError(
            f"placed {len(placed)} replicas, tables promised {table.min_replica_count}"
        )
    replicas = tuple(sorted(placed))
    return PlacementResult(
        replicas_star=replicas,
        replicas_original=map_replicas_to_original(replicas, star),
        cardinality=len(replicas),
        trace=tuple(trace),
    )


def map_replicas_to_original(replicas: tuple[str, ...], star: StarTree) -> tuple[str, ...]:
    """Project star replicas back onto original internal nodes.

    Internal star nodes are their own image; an eligible leaf stands in
    for the internal node it replaced during normalization.
    """
    out = []
    for rid in replicas:
        node = star.by_id[rid]
        if node.leaf is None:
            out.append(rid)
        else:
            origin = node.leaf.origin_internal
            if origin is None:
                raise ContractViolationError(f"ineligible leaf {rid!r} in replica set")
            out.append(origin)
    return tuple(sorted(out))


def root_workload_check(star: StarTree, result: PlacementResult) -> None:
    """Defense-in-depth: re-derive the workload that stops at the old root.

    Every demanding bundle flows to its nearest equipped ancestor (or
    itself). If the old root is equipped its own load must fit the
    capacity; if not, nothing may be left over at the root, because no
    demand can cross the zero-bandwidth artificial link. A correct
    Phase 1 can never trip this; raising loudly beats returning a bogus
    placement.
    """
    equipped = set(result.replicas_star)
    by_id = star.by_id
    root_children = star.children[star.root_plus]
    assert len(root_children) == 1
    old_root = root_children[0]

    root_load = 0
    unabsorbed = 0
    for leaf_node in star.leaves:
        leaf = leaf_node.leaf
        assert leaf is not None
        if leaf.weight == 0:
            continue
        cur = leaf_node
        served_at = None
        while True:
            if cur.id in equipped and (cur.id != leaf_node.id or leaf.eligible):
                served_at = cur.id
                break
            if cur.id == old_root:
                break
            cur = by_id[cur.parent]  # type: ignore[index]
        if served_at is None:
            unabsorbed += leaf.weight
        elif served_at == old_root:
            root_load += leaf.weight

    if old_root in equipped:
        if root_load > star.capacity:
            raise InfeasibleError(REASON_ROOT_OVERLOAD, ((old_root, root_load),))
    elif unabsorbed:
        raise InfeasibleError(REASON_ROOT_OVERLOAD, ((old_root, unabsorbed),))
