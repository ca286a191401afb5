"""Independent feasibility checking for a replica set on an instance.

This module re-derives everything from the raw definitions and shares no
code with the solver pipeline: clients are assigned to their nearest
replica ancestor within their hop range, server loads are summed against
the capacity, and link flows are checked against bandwidth in one of two
semantics:

* ``per-bundle`` (default): the merged flow of each sibling-client
  bundle must fit every link on its serving path, each bundle checked
  independently even where paths share a link;
* ``aggregate``: the summed flow of all bundles crossing a link must
  fit its bandwidth. Aggregate feasibility implies per-bundle
  feasibility, never the other way around.

Zero-demand clients need no server and add no flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import StructureError
from .instance import NetworkInstance, NodeSpec
from .transform import StarTree

MODE_PER_BUNDLE = "per-bundle"
MODE_AGGREGATE = "aggregate"

_UNBOUNDED = math.inf


@dataclass(frozen=True)
class RuleViolation:
    kind: str  # "unserved" | "capacity" | "bandwidth" | "qos"
    location: str  # client id, server id, or child-end id of the link
    amount: int  # demand for unserved; excess over the limit otherwise


@dataclass(frozen=True)
class FeasibilityReport:
    mode: str
    assignment: dict[str, str | None]  # client -> serving replica (None: w = 0)
    server_loads: dict[str, int]
    link_flows: dict[str, dict]  # child-end id -> {"total": int, "parts": [[label, flow], ...]}
    violations: tuple[RuleViolation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def to_document(self) -> dict:
        return {
            "mode": self.mode,
            "feasible": self.feasible,
            "assignment": dict(sorted(self.assignment.items())),
            "server_loads": dict(sorted(self.server_loads.items())),
            "link_flows": {k: self.link_flows[k] for k in sorted(self.link_flows)},
            "violations": [
                {"kind": v.kind, "location": v.location, "amount": v.amount}
                for v in self.violations
            ],
        }


def closest_assignment(
    inst: NetworkInstance, replicas: set[str]
) -> tuple[dict[str, str | None], list[RuleViolation]]:
    """Assign every demanding client to the nearest replica ancestor.

    The walk stops after q(v) hops; a client that finds no replica in
    range is an "unserved" violation carrying its demand. By
    construction an assigned client is always within range, so a
    separate qos violation cannot occur.
    """
    by_id = inst.by_id
    assignment: dict[str, str | None] = {}
    violations: list[RuleViolation] = []
    for client in inst.clients:
        if client.w == 0:
            assignment[client.id] = None
            continue
        found = None
        cur = client.parent
        for _hop in range(client.q):  # type: ignore[arg-type]
            if cur is None:
                break
            if cur in replicas:
                found = cur
                break
            cur = by_id[cur].parent
        assignment[client.id] = found
        if found is None:
            violations.append(RuleViolation("unserved", client.id, client.w))  # type: ignore[arg-type]
    return assignment, violations


def _bundles(inst: NetworkInstance) -> list[tuple[str, list[NodeSpec]]]:
    """Sibling clients grouped under their shared parent, id-sorted."""
    groups: dict[str, list[NodeSpec]] = {}
    for client in inst.clients:
        groups.setdefault(client.parent, []).append(client)  # type: ignore[arg-type]
    return sorted(groups.items())


def verify_placement(
    inst: NetworkInstance, replicas: set[str] | frozenset[str], mode: str = MODE_PER_BUNDLE
) -> FeasibilityReport:
    """Full feasibility report for a replica set.

    ``replicas`` must name internal nodes only; anything else is a
    caller contract breach, not a reportable violation.
    """
    if mode not in (MODE_PER_BUNDLE, MODE_AGGREGATE):
        raise ValueError(f"unknown mode {mode!r}")
    replica_set = set(replicas)
    internal = set(inst.internal_ids)
    stray = replica_set - internal
    if stray:
        raise StructureError(f"replica set contains non-internal nodes: {sorted(stray)}")

    by_id = inst.by_id
    assignment, violations = closest_assignment(inst, replica_set)

    loads: dict[str, int] = {r: 0 for r in sorted(replica_set)}
    for cid, server in assignment.items():
        if server is not None:
            loads[server] += by_id[cid].w  # type: ignore[operator]
    for server in sorted(loads):
        if loads[server] > inst.capacity:
            violations.append(
                RuleViolation("capacity", server, loads[server] - inst.capacity)
            )

    # Link flows. Every client edge carries just its own demand; above the
    # bundle's parent the merged flow travels together up to the server.
    flows: dict[str, list[tuple[str, int]]] = {}
    for client in inst.clients:
        if client.w and assignment.get(client.id):
            flows.setdefault(client.id, []).append((client.id, client.w))
    for parent_id, members in _bundles(inst):
        served = [c for c in members if assignment.get(c.id)]
        if not served:
            continue
        server = assignment[served[0].id]
        bundle_flow = sum(c.w for c in served)  # type: ignore[misc]
        # all served siblings share one nearest ancestor
        assert all(assignment[c.id] == server for c in served)
        cur = parent_id
        while cur != server:
            flows.setdefault(cur, []).append((parent_id, bundle_flow))
            cur = by_id[cur].parent  # type: ignore[assignment]

    link_flows: dict[str, dict] = {}
    for child_end in sorted(flows):
        parts = sorted(flows[child_end])
        total = sum(f for _, f in parts)
        link_flows[child_end] = {"total": total, "parts": [[label, f] for label, f in parts]}
        bw = by_id[child_end].bw
        assert bw is not None
        if mode == MODE_AGGREGATE:
            if total > bw:
                violations.append(RuleViolation("bandwidth", child_end, total - bw))
        else:
            worst = max(f for _, f in parts)
            if worst > bw:
                violations.append(RuleViolation("bandwidth", child_end, worst - bw))

    ordered = tuple(sorted(violations, key=lambda v: (v.kind, v.location)))
    return FeasibilityReport(
        mode=mode,
        assignment=assignment,
        server_loads=loads,
        link_flows=link_flows,
        violations=ordered,
    )


def verify_star_placement(
    star: StarTree, replicas: set[str] | frozenset[str]
) -> tuple[bool, list[RuleViolation]]:
    """Per-bundle feasibility of a replica set directly on a star tree.

    Used to cross-check that normalization preserves feasibility: for
    any replica set, the verdict here must match verify_placement on the
    original instance with the same (projected) set. Eligible leaves may
    serve themselves at distance zero.
    """
    by_id = star.by_id
    replica_set = set(replicas)
    violations: list[RuleViolation] = []
    loads: dict[str, int] = {}
    for leaf_node in star.leaves:
        leaf = leaf_node.leaf
        assert leaf is not None
        if leaf.weight == 0:
            continue
        server = None
        cur: str | None = leaf_node.id
        path_min: int | float = _UNBOUNDED
        for hop in range(leaf.qos + 1):
            if cur is None or cur == star.root_plus:
                break
            if cur in replica_set:
                server = cur
                break
            path_min = min(path_min, by_id[cur].bw)  # type: ignore[type-var]
            cur = by_id[cur].parent
        if server is None:
            violations.append(RuleViolation("unserved", leaf_node.id, leaf.weight))
            continue
        if leaf.weight > path_min:
            violations.append(
                RuleViolation("bandwidth", leaf_node.id, int(leaf.weight - path_min))
            )
        loads[server] = loads.get(server, 0) + leaf.weight
    for server in sorted(loads):
        if loads[server] > star.capacity:
            violations.append(RuleViolation("capacity", server, loads[server] - star.capacity))
    return (not violations, violations)
