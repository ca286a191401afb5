import json

import pytest

from treeplace.errors import MalformedDocumentError, RoleError, StructureError
from treeplace.generator import GenConfig, generate
from treeplace.instance import (
    NetworkInstance,
    NodeSpec,
    instance_signature,
    parse_instance,
    precheck_client_links,
    serialize_instance,
    validate_instance,
)

MINIMAL = {
    "W": 10,
    "nodes": [
        {"id": "r", "parent": None, "kind": "internal"},
        {"id": "c", "parent": "r", "kind": "client", "bw": 5, "w": 3, "q": 1},
    ],
}


def doc(**overrides):
    d = json.loads(json.dumps(MINIMAL))
    d.update(overrides)
    return d


def test_parse_minimal():
    inst = parse_instance(json.dumps(MINIMAL))
    assert inst.capacity == 10
    assert inst.root.id == "r"
    assert [c.id for c in inst.clients] == ["c"]
    assert inst.internal_ids == ("r",)


def test_round_trip_is_canonical(worked_example):
    text = serialize_instance(worked_example)
    again = parse_instance(text)
    assert again == worked_example
    assert serialize_instance(again) == text
    assert text.endswith("\n")


def test_round_trip_generated():
    for seed in range(10):
        inst = generate(GenConfig(seed=seed, internal=5, clients=8, capacity=20))
        assert parse_instance(serialize_instance(inst)) == inst


def test_node_order_is_normalized():
    a = NetworkInstance(
        capacity=5,
        nodes=(
            NodeSpec("b", "a", "client", bw=1, w=1, q=1),
            NodeSpec("a", None, "internal"),
        ),
    )
    assert [n.id for n in a.nodes] == ["a", "b"]
    assert instance_signature(a) == instance_signature(
        NetworkInstance(capacity=5, nodes=tuple(reversed(a.nodes)))
    )


@pytest.mark.parametrize(
    "mangle,exc",
    [
        (lambda d: d.update(extra=1), MalformedDocumentError),
        (lambda d: d.pop("W"), MalformedDocumentError),
        (lambda d: d.update(W="ten"), MalformedDocumentError),
        (lambda d: d.update(W=True), MalformedDocumentError),
        (lambda d: d.update(nodes={}), MalformedDocumentError),
        (lambda d: d["nodes"][0].update(color="red"), MalformedDocumentError),
        (lambda d: d["nodes"][0].pop("parent"), MalformedDocumentError),
        (lambda d: d["nodes"][1].update(kind="server"), MalformedDocumentError),
        (lambda d: d["nodes"][1].update(w="3"), MalformedDocumentError),
        (lambda d: d["nodes"][1].update(w=None), RoleError),
        (lambda d: d["nodes"][1].update(q=0), RoleError),
        (lambda d: d["nodes"][0].update(w=1), RoleError),
        (lambda d: d["nodes"][1].update(parent=None), StructureError),  # two roots
        (lambda d: d["nodes"][1].update(parent="ghost"), StructureError),
        (lambda d: d["nodes"][1].update(id="r"), StructureError),  # duplicate
        (lambda d: d["nodes"][1].update(id="__r_plus__"), StructureError),
        (lambda d: d["nodes"][0].update(bw=4), StructureError),  # root bw
        (lambda d: d.update(W=0), StructureError),
    ],
)
def test_parse_rejects(mangle, exc):
    d = doc()
    mangle(d)
    with pytest.raises(exc):
        parse_instance(json.dumps(d))


def test_parse_rejects_invalid_json():
    with pytest.raises(MalformedDocumentError):
        parse_instance("{nope")


def test_client_with_children_is_role_error():
    d = doc()
    d["nodes"].append({"id": "x", "parent": "c", "kind": "client", "bw": 1, "w": 1, "q": 1})
    with pytest.raises(RoleError):
        parse_instance(json.dumps(d))


def test_childless_internal_rejected():
    d = doc()
    d["nodes"].append({"id": "s", "parent": "r", "kind": "internal", "bw": 4})
    with pytest.raises(StructureError, match="no children"):
        parse_instance(json.dumps(d))


def test_cycle_detected_without_recursion():
    # a <-> b cycle detached from the root
    d = doc()
    d["nodes"] += [
        {"id": "u", "parent": "v", "kind": "internal", "bw": 1},
        {"id": "v", "parent": "u", "kind": "internal", "bw": 1},
    ]
    inst = NetworkInstance(
        capacity=10,
        nodes=tuple(
            NodeSpec(n["id"], n.get("parent"), n["kind"], n.get("bw"), n.get("w"), n.get("q"))
            for n in d["nodes"]
        ),
    )
    codes = {v.code for v in validate_instance(inst)}
    assert "cycle" in codes


def test_validate_clean_instance_returns_nothing(worked_example, shared_link):
    assert validate_instance(worked_example) == []
    assert validate_instance(shared_link) == []


def test_zero_weight_client_is_valid():
    d = doc()
    d["nodes"][1]["w"] = 0
    inst = parse_instance(json.dumps(d))
    assert inst.clients[0].w == 0


def test_zero_bandwidth_edge_is_valid():
    # bw 0 starves the link but the document is well-formed
    d = doc()
    d["nodes"][1]["bw"] = 0
    assert parse_instance(json.dumps(d)).by_id["c"].bw == 0


def test_precheck_flags_demand_over_link():
    d = doc()
    d["nodes"][1].update(w=7, bw=5)
    findings = precheck_client_links(parse_instance(json.dumps(d)))
    assert [(f.client, f.kind, f.demand, f.limit) for f in findings] == [
        ("c", "link-bandwidth", 7, 5)
    ]


def test_precheck_flags_demand_over_capacity():
    d = doc(W=4)
    d["nodes"][1].update(w=5, bw=9)
    findings = precheck_client_links(parse_instance(json.dumps(d)))
    assert [(f.client, f.kind) for f in findings] == [("c", "capacity")]


def test_precheck_clean(worked_example):
    assert precheck_client_links(worked_example) == []


def test_children_accessor_sorted(worked_example):
    for parent, kids in worked_example.children.items():
        ids = [k.id for k in kids]
        assert ids == sorted(ids)
