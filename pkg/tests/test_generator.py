import pytest

from treeplace.errors import ConfigError
from treeplace.generator import (
    DualRoleNetwork,
    GenConfig,
    fictivize,
    generate,
    generate_dual_role,
    parse_dual_role,
    serialize_dual_role,
    small_corpus_config,
)
from treeplace.instance import serialize_instance, validate_instance
from treeplace.oracle import dual_role_brute_force_min
from treeplace.solver import solve_instance


def test_same_seed_same_document():
    cfg = GenConfig(seed=42, internal=6, clients=9, capacity=30)
    assert serialize_instance(generate(cfg)) == serialize_instance(generate(cfg))


def test_different_seeds_differ():
    a = GenConfig(seed=1, internal=6, clients=9, capacity=30)
    b = GenConfig(seed=2, internal=6, clients=9, capacity=30)
    assert serialize_instance(generate(a)) != serialize_instance(generate(b))


def test_path_shape_is_a_chain():
    inst = generate(GenConfig(seed=0, internal=5, clients=3, capacity=30, shape="path"))
    parents = {n.id: n.parent for n in inst.nodes if n.kind == "internal"}
    assert parents == {
        "n000": None, "n001": "n000", "n002": "n001", "n003": "n002", "n004": "n003",
    }


def test_balanced_shape_respects_branching():
    inst = generate(
        GenConfig(seed=4, internal=15, clients=10, capacity=30, shape="balanced",
                  branching=(2, 2))
    )
    kids: dict[str, int] = {}
    for n in inst.nodes:
        if n.kind == "internal" and n.parent is not None:
            kids[n.parent] = kids.get(n.parent, 0) + 1
    assert kids and all(v <= 2 for v in kids.values())


def test_random_shape_is_valid_and_covered():
    for seed in range(10):
        inst = generate(GenConfig(seed=seed, internal=7, clients=8, capacity=30))
        assert validate_instance(inst) == []
        with_kids = {n.parent for n in inst.nodes if n.parent is not None}
        internal = {n.id for n in inst.nodes if n.kind == "internal"}
        assert internal <= with_kids  # no childless internal survives


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(shape="star"),
        dict(internal=0),
        dict(clients=0),
        dict(capacity=0),
        dict(qos_range=(0, 2)),
        dict(branching=(0, 2)),
        dict(weight_range=(5, 1)),
    ],
)
def test_config_rejections(kwargs):
    base = dict(seed=1, internal=4, clients=5, capacity=20)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        generate(GenConfig(**base))


def test_too_few_clients_for_skeleton():
    cfg = GenConfig(seed=1, internal=5, clients=1, capacity=20,
                    shape="balanced", branching=(4, 4))
    with pytest.raises(ConfigError, match="childless"):
        generate(cfg)


def test_small_corpus_configs_always_generate():
    for seed in range(50):
        inst = generate(small_corpus_config(seed))
        assert validate_instance(inst) == []


# --- dual-role generation and the client/server rewrite -------------------


def chain3() -> DualRoleNetwork:
    return DualRoleNetwork(
        capacity=10,
        parents={"a": None, "b": "a", "c": "b"},
        bandwidth={"a": 99, "b": 5, "c": 5},
        demand={"a": (2, 0), "b": (3, 1), "c": (4, 1)},
    )


def test_fictivize_shape():
    inst = fictivize(chain3())
    internal = sorted(n.id for n in inst.nodes if n.kind == "internal")
    clients = {n.id: n for n in inst.nodes if n.kind == "client"}
    assert internal == ["a", "b", "c"]
    assert sorted(clients) == ["a_req", "b_req", "c_req"]
    # stand-ins keep the weight, gain one hop, and ride a link that
    # cannot bind (total demand = 9)
    assert (clients["a_req"].w, clients["a_req"].q, clients["a_req"].bw) == (2, 1, 9)
    assert (clients["b_req"].w, clients["b_req"].q, clients["b_req"].bw) == (3, 2, 9)
    assert (clients["c_req"].w, clients["c_req"].q, clients["c_req"].bw) == (4, 2, 9)


def test_fictivize_prunes_demandless_subtrees():
    net = DualRoleNetwork(
        capacity=10,
        parents={"a": None, "b": "a", "dead": "a", "deader": "dead"},
        bandwidth={"a": 9, "b": 9, "dead": 9, "deader": 9},
        demand={"b": (3, 0)},
    )
    inst = fictivize(net)
    ids = {n.id for n in inst.nodes}
    assert ids == {"a", "b", "b_req"}


def test_fictivize_keeps_demandless_ancestors():
    # a has no demand of its own but must stay: it is on b's path
    inst = fictivize(
        DualRoleNetwork(
            capacity=10,
            parents={"a": None, "b": "a"},
            bandwidth={"a": 9, "b": 4},
            demand={"b": (3, 1)},
        )
    )
    assert {n.id for n in inst.nodes} == {"a", "b", "b_req"}


def test_fictivize_zero_demand_everywhere():
    net = DualRoleNetwork(
        capacity=10,
        parents={"a": None},
        bandwidth={"a": 9},
        demand={"a": (0, 2)},
    )
    with pytest.raises(ConfigError, match="no demand"):
        fictivize(net)


def test_chain3_solution_matches_dual_brute_force():
    net = chain3()
    expect = dual_role_brute_force_min(net.demand, net.parents, net.bandwidth, net.capacity)
    got = solve_instance(fictivize(net))
    assert expect.minimum == len(got.replicas)


def test_dual_role_generation_deterministic():
    a = generate_dual_role(seed=9, size=6, capacity=8)
    b = generate_dual_role(seed=9, size=6, capacity=8)
    assert serialize_dual_role(a) == serialize_dual_role(b)
    assert any(w for w, _ in a.demand.values())


def test_dual_role_document_round_trip():
    net = generate_dual_role(seed=11, size=5, capacity=7)
    text = serialize_dual_role(net)
    back = parse_dual_role(text)
    assert back == net
    assert serialize_dual_role(back) == text
