"""Problem instances: a rooted tree of internal nodes with client leaves.

An instance is a tree network. Internal nodes may host replicas, clients
sit at the leaves and issue ``w`` requests that must be served by a
replica within ``q`` hops up the tree. Every non-root node has a
bandwidth limit on the link to its parent, and every replica server has
the same capacity ``W``.

The document format is JSON::

    {
      "W": 15,
      "nodes": [
        {"id": "r", "parent": null, "kind": "internal"},
        {"id": "s", "parent": "r", "kind": "internal", "bw": 9},
        {"id": "c1", "parent": "s", "kind": "client", "bw": 4, "w": 3, "q": 2}
      ]
    }

Unknown fields are rejected. The id ``__r_plus__`` is reserved for the
artificial root added by the transformation stage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Any, NamedTuple

from .errors import MalformedDocumentError, RoleError, StructureError

ARTIFICIAL_ROOT_ID = "__r_plus__"
RESERVED_NODE_IDS = frozenset({ARTIFICIAL_ROOT_ID})

KIND_CLIENT = "client"
KIND_INTERNAL = "internal"

_NODE_FIELDS = {"id", "parent", "kind", "bw", "w", "q"}
_TOP_FIELDS = {"W", "nodes"}

# Violation codes that indicate a role problem rather than a shape problem.
_ROLE_CODES = frozenset(
    {"root-role", "client-children", "client-fields", "internal-fields"}
)


@dataclass(frozen=True)
class NodeSpec:
    """One tree node as written in the document."""

    id: str
    parent: str | None
    kind: str
    bw: int | None = None  # link to parent; None only on the root
    w: int | None = None  # request count, clients only
    q: int | None = None  # QoS hop limit, clients only

    @property
    def is_client(self) -> bool:
        return self.kind == KIND_CLIENT


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``code`` is stable, ``message`` is for humans."""

    code: str
    node: str | None
    message: str

    def __str__(self) -> str:
        where = f" at {self.node!r}" if self.node is not None else ""
        return f"[{self.code}]{where}: {self.message}"


@dataclass(frozen=True)
class NetworkInstance:
    """An immutable validated-or-validatable instance.

    Node order is normalized to ascending id so that value equality and
    serialization are canonical. The derived accessors (``by_id``,
    ``children`` ...) assume the instance passed validation; run
    :func:`validate_instance` first for untrusted data.
    """

    capacity: int
    nodes: tuple[NodeSpec, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.nodes, key=lambda n: n.id))
        object.__setattr__(self, "nodes", ordered)

    @cached_property
    def by_id(self) -> dict[str, NodeSpec]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def root(self) -> NodeSpec:
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise StructureError(f"expected exactly one root, found {len(roots)}")
        return roots[0]

    @cached_property
    def children(self) -> dict[str, tuple[NodeSpec, ...]]:
        table: dict[str, list[NodeSpec]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                table[n.parent].append(n)
        # self.nodes is id-sorted, so each child list is already sorted
        return {k: tuple(v) for k, v in table.items()}

    @cached_property
    def clients(self) -> tuple[NodeSpec, ...]:
        return tuple(n for n in self.nodes if n.is_client)

    @cached_property
    def internal_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if not n.is_client)


class PrecheckFinding(NamedTuple):
    client: str
    kind: str  # "link-bandwidth" | "capacity"
    demand: int
    limit: int


def _require(cond: bool, exc: type[Exception], msg: str) -> None:
    if not cond:
        raise exc(msg)


def _node_from_mapping(raw: Any) -> NodeSpec:
    _require(isinstance(raw, dict), MalformedDocumentError, "node entries must be objects")
    unknown = set(raw) - _NODE_FIELDS
    _require(not unknown, MalformedDocumentError, f"unknown node fields: {sorted(unknown)}")
    _require("id" in raw and "kind" in raw, MalformedDocumentError, "node needs 'id' and 'kind'")
    _require("parent" in raw, MalformedDocumentError, f"node {raw.get('id')!r} needs 'parent'")
    node_id = raw["id"]
    _require(isinstance(node_id, str) and node_id != "", MalformedDocumentError, "node id must be a non-empty string")
    parent = raw["parent"]
    _require(parent is None or isinstance(parent, str), MalformedDocumentError, f"parent of {node_id!r} must be a string or null")
    kind = raw["kind"]
    _require(kind in (KIND_CLIENT, KIND_INTERNAL), MalformedDocumentError, f"node {node_id!r} has unknown kind {kind!r}")
    for key in ("bw", "w", "q"):
        val = raw.get(key)
        _require(
            val is None or (isinstance(val, int) and not isinstance(val, bool)),
            MalformedDocumentError,
            f"field {key!r} of {node_id!r} must be an integer",
        )
    return NodeSpec(
        id=node_id,
        parent=parent,
        kind=kind,
        bw=raw.get("bw"),
        w=raw.get("w"),
        q=raw.get("q"),
    )


def parse_instance(text: str) -> NetworkInstance:
    """Parse and validate an instance document.

    Raises MalformedDocumentError for syntax/schema problems,
    StructureError for tree-shape problems and RoleError for node-role
    problems. The returned instance always passes validation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), MalformedDocumentError, "document root must be an object")
    unknown = set(doc) - _TOP_FIELDS
    _require(not unknown, MalformedDocumentError, f"unknown document fields: {sorted(unknown)}")
    _require("W" in doc and "nodes" in doc, MalformedDocumentError, "document needs 'W' and 'nodes'")
    cap = doc["W"]
    _require(
        isinstance(cap, int) and not isinstance(cap, bool),
        MalformedDocumentError,
        "'W' must be an integer",
    )
    _require(isinstance(doc["nodes"], list), MalformedDocumentError, "'nodes' must be an array")
    nodes = tuple(_node_from_mapping(raw) for raw in doc["nodes"])
    inst = NetworkInstance(capacity=cap, nodes=nodes)
    violations = validate_instance(inst)
    if violations:
        first = violations[0]
        exc = RoleError if first.code in _ROLE_CODES else StructureError
        raise exc("; ".join(str(v) for v in violations))
    return inst


def serialize_instance(inst: NetworkInstance) -> str:
    """Canonical document text: key-sorted, id-sorted nodes, newline-terminated."""
    nodes = []
    for n in inst.nodes:
        entry: dict[str, Any] = {"id": n.id, "parent": n.parent, "kind": n.kind}
        if n.bw is not None:
            entry["bw"] = n.bw
        if n.w is not None:
            entry["w"] = n.w
        if n.q is not None:
            entry["q"] = n.q
        nodes.append(entry)
    doc = {"W": inst.capacity, "nodes": nodes}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def validate_instance(inst: NetworkInstance) -> list[Violation]:
    """Check every typed invariant; empty list means the instance is valid.

    Works on arbitrary instances (duplicates, cycles ...) without relying
    on the cached derived accessors.
    """
    out: list[Violation] = []
    add = lambda code, node, msg: out.append(Violation(code, node, msg))  # noqa: E731

    if not (isinstance(inst.capacity, int) and inst.capacity >= 1):
        add("capacity", None, f"capacity W must be a positive integer, got {inst.capacity!r}")

    seen: set[str] = set()
    for n in inst.nodes:
        if n.id in seen:
            add("duplicate-id", n.id, "node id appears more than once")
        seen.add(n.id)
        if n.id in RESERVED_NODE_IDS:
            add("reserved-id", n.id, "node id is reserved for the artificial root")

    by_id = {n.id: n for n in inst.nodes}
    roots = [n for n in inst.nodes if n.parent is None]
    if len(roots) != 1:
        add("root-count", None, f"expected exactly one root (parent null), found {len(roots)}")
    for n in inst.nodes:
        if n.parent is not None and n.parent not in by_id:
            add("unknown-parent", n.id, f"parent {n.parent!r} does not exist")
        if n.parent == n.id:
            add("cycle", n.id, "node is its own parent")

    # Reachability from the root doubles as cycle detection.
    if len(roots) == 1 and not any(v.code in ("unknown-parent", "duplicate-id") for v in out):
        children: dict[str, list[str]] = {n.id: [] for n in inst.nodes}
        for n in inst.nodes:
            if n.parent is not None:
                children[n.parent].append(n.id)
        reached: set[str] = set()
        stack = [roots[0].id]
        while stack:
            cur = stack.pop()
            if cur in reached:
                continue
            reached.add(cur)
            stack.extend(children[cur])
        for n in inst.nodes:
            if n.id not in reached:
                add("cycle", n.id, "node is not reachable from the root (cycle or orphan)")

    child_count: dict[str, int] = {n.id: 0 for n in inst.nodes}
    for n in inst.nodes:
        if n.parent in child_count:
            child_count[n.parent] += 1

    n_clients = 0
    n_internal = 0
    for n in inst.nodes:
        is_root = n.parent is None
        if n.kind == KIND_CLIENT:
            n_clients += 1
            if is_root:
                add("root-role", n.id, "root must be an internal node")
            if child_count[n.id]:
                add("client-children", n.id, "clients must be leaves")
            if not (isinstance(n.w, int) and n.w >= 0):
                add("client-fields", n.id, "client needs integer w >= 0")
            if not (isinstance(n.q, int) and n.q >= 1):
                add("client-fields", n.id, "client needs integer q >= 1")
        else:
            n_internal += 1
            if n.w is not None or n.q is not None:
                add("internal-fields", n.id, "internal nodes carry no w/q")
            if child_count[n.id] == 0:
                add("childless-internal", n.id, "internal node has no children")
        if is_root:
            if n.bw is not None:
                add("root-bw", n.id, "root has no parent link, bw must be absent")
        elif not (isinstance(n.bw, int) and n.bw >= 0):
            add("bw", n.id, "non-root node needs integer bw >= 0")

    if n_clients == 0:
        add("no-client", None, "instance needs at least one client")
    if n_internal == 0:
        add("no-internal", None, "instance needs at least one internal node")
    return out


def precheck_client_links(inst: NetworkInstance) -> list[PrecheckFinding]:
    """Fast infeasibility screen on client edges and the shared capacity.

    A client whose demand exceeds its own link bandwidth can never be
    served; a client whose demand exceeds W can never fit on any server.
    Findings are sorted by client id; an empty list means the screen
    passed. Tightening any bandwidth can only grow the finding set.
    """
    out: list[PrecheckFinding] = []
    for c in inst.clients:  # id-sorted already
        assert c.w is not None and c.bw is not None
        if c.w > c.bw:
            out.append(PrecheckFinding(c.id, "link-bandwidth", c.w, c.bw))
        if c.w > inst.capacity:
            out.append(PrecheckFinding(c.id, "capacity", c.w, inst.capacity))
    return out


def instance_signature(inst: NetworkInstance) -> tuple:
    """Hashable value identity, handy for caching in tests."""
    return (inst.capacity, tuple((f.name, getattr(n, f.name)) for n in inst.nodes for f in fields(n)))
