from itertools import combinations

import pytest

from topocheck.census import get_census, random_topology
from topocheck.errors import CarrierMismatchError
from topocheck.initial import FiniteFunction
from topocheck.setcore import Carrier, PointSet, all_subsets
from topocheck.topology import (
    Topology,
    alexandrov_topology,
    closed_sets,
    closure_of,
    closure_table,
    discrete,
    generate_from_subbasis,
    indiscrete,
    interior_of,
    is_continuous,
    is_finer,
    specialization_preorder,
    validate,
    validate_masks,
)

C2 = Carrier(2)
C3 = Carrier(3)


def sets(carrier, *families):
    return [PointSet.of(carrier, f) for f in families]


def sierpinski():
    t, report = validate(C2, sets(C2, [], [0], [0, 1]))
    assert report is None
    return t


class TestValidate:
    def test_sierpinski_is_valid(self):
        t = sierpinski()
        assert t.opens == (0, 1, 3)

    def test_missing_union(self):
        t, report = validate(C2, sets(C2, [], [0], [1]))
        assert t is None
        assert report.axioms == ["full carrier", "union closure"]
        assert "union closure: {0},{1} -> {0,1} missing" in report.lines()

    def test_missing_intersection(self):
        t, report = validate(C3, sets(C3, [], [0, 1], [1, 2], [0, 1, 2]))
        assert t is None
        assert report.axioms == ["intersection closure"]
        assert report.violations[0].witness == [0b011, 0b110]
        assert report.violations[0].missing == 0b010

    def test_missing_empty_set(self):
        _, report = validate(C2, sets(C2, [0, 1]))
        assert report.axioms == ["empty set"]

    def test_empty_carrier(self):
        c0 = Carrier(0)
        t, report = validate(c0, [c0.empty()])
        assert report is None
        assert len(t) == 1

    def test_empty_family_on_empty_carrier(self):
        t, report = validate(Carrier(0), [])
        assert t is None
        assert report.axioms == ["empty set", "full carrier"]

    def test_duplicates_are_ignored(self):
        t, report = validate(C2, sets(C2, [], [], [0, 1]))
        assert report is None
        assert t == indiscrete(C2)

    def test_member_over_other_carrier(self):
        with pytest.raises(CarrierMismatchError):
            validate(C2, [Carrier(3).full()])

    def test_raw_masks_agree(self):
        t, _ = validate_masks(2, [0, 1, 3])
        assert t == sierpinski()
        with pytest.raises(CarrierMismatchError):
            validate_masks(2, [0, 4])


def violated_axioms(n, family):
    """Axioms a family of frozensets violates, with the least witness pairs, by plain set logic."""
    carrier = frozenset(range(n))
    key = lambda s: sum(1 << p for p in s)
    ordered = sorted(family, key=key)
    found = []
    if frozenset() not in family:
        found.append(("empty set", None))
    if carrier not in family:
        found.append(("full carrier", None))
    for name, op in (("intersection closure", frozenset.intersection), ("union closure", frozenset.union)):
        for a, b in combinations(ordered, 2):
            if op(a, b) not in family:
                found.append((name, [key(a), key(b)]))
                break
    return found


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_validate_agrees_with_set_logic_on_every_family(n):
    subsets = [frozenset(p for p in range(n) if (m >> p) & 1) for m in range(1 << n)]
    accepted = 0
    for code in range(1 << len(subsets)):
        family = {s for i, s in enumerate(subsets) if (code >> i) & 1}
        expected = violated_axioms(n, family)
        t, report = validate_masks(n, [i for i in range(len(subsets)) if (code >> i) & 1])
        if not expected:
            assert report is None
            assert set(t.opens) == {i for i in range(len(subsets)) if (code >> i) & 1}
            accepted += 1
        else:
            assert t is None
            assert [(v.axiom, v.witness or None) for v in report.violations] == expected
    assert accepted == {0: 1, 1: 1, 2: 4, 3: 29}[n]


class TestLargeCarriers:
    def test_discrete_on_sixteen_points(self):
        t, report = validate_masks(16, range(1 << 16))
        assert report is None
        assert len(t) == 1 << 16

    def test_missing_set_on_twelve_points(self):
        masks = [m for m in range(1 << 12) if m != 0b11]
        t, report = validate_masks(12, masks)
        assert t is None
        assert report.axioms == ["intersection closure", "union closure"]
        assert report.violations[0].missing == 0b11

    def test_closure_table_matches_closed_supersets(self):
        for t in [random_topology(8, seed=s) for s in range(5)] + list(get_census(3)):
            closed = t.closed_masks
            everything = list(range(t.carrier.subset_count))
            expected = [min((c for c in closed if a & ~c == 0), key=lambda c: bin(c).count("1")) for a in everything]
            assert closure_table(t, everything).tolist() == expected


def test_topology_is_immutable():
    t = sierpinski()
    with pytest.raises(AttributeError):
        t.opens = ()
    with pytest.raises(ValueError):
        t.member[0] = False


def test_named_topologies():
    assert len(discrete(C3)) == 8
    assert indiscrete(C3).opens == (0, 7)
    assert indiscrete(Carrier(0)) == discrete(Carrier(0))


def test_closed_sets_are_complements():
    t = sierpinski()
    assert [s.mask for s in closed_sets(t)] == [0, 2, 3]


def test_closure_and_interior():
    t = sierpinski()
    one = PointSet.of(C2, [1])
    zero = PointSet.of(C2, [0])
    assert closure_of(t, zero) == C2.full()
    assert closure_of(t, one) == one
    assert interior_of(t, one) == C2.empty()
    assert interior_of(t, C2.full()) == C2.full()


def test_closure_properties_over_census():
    for t in get_census(3):
        for a in all_subsets(C3):
            cl = closure_of(t, a)
            assert a.mask & ~cl.mask == 0
            assert closure_of(t, cl) == cl
            assert (C3.full_mask ^ cl.mask) in t.opens


def test_is_finer_is_a_partial_order():
    census = list(get_census(3))
    for a in census:
        assert is_finer(a, a)
        assert is_finer(discrete(C3), a)
        assert is_finer(a, indiscrete(C3))
    for a in census:
        for b in census:
            if is_finer(a, b) and is_finer(b, a):
                assert a == b


def test_is_finer_carrier_mismatch():
    with pytest.raises(CarrierMismatchError):
        is_finer(discrete(C2), discrete(C3))


class TestContinuity:
    def test_identity_on_same_topology(self):
        f = FiniteFunction(C2, C2, [0, 1])
        t = sierpinski()
        assert is_continuous(f, t, t)

    def test_into_discrete_from_indiscrete(self):
        f = FiniteFunction(C2, C2, [0, 1])
        assert not is_continuous(f, indiscrete(C2), discrete(C2))
        assert is_continuous(f, discrete(C2), indiscrete(C2))

    def test_constant_map_is_continuous(self):
        f = FiniteFunction(C2, C3, [1, 1])
        assert is_continuous(f, indiscrete(C2), discrete(C3))

    def test_mismatched_carriers(self):
        f = FiniteFunction(C2, C3, [0, 1])
        with pytest.raises(CarrierMismatchError):
            is_continuous(f, sierpinski(), sierpinski())


class TestGeneration:
    def test_subbasis_example(self):
        t = generate_from_subbasis(C3, sets(C3, [0, 1], [1, 2]))
        assert t.opens == (0b000, 0b010, 0b011, 0b110, 0b111)

    def test_empty_subbasis_is_indiscrete(self):
        assert generate_from_subbasis(C3, []) == indiscrete(C3)

    def test_singletons_give_discrete(self):
        assert generate_from_subbasis(C3, sets(C3, [0], [1], [2])) == discrete(C3)

    def test_topology_generates_itself(self):
        for t in get_census(3):
            assert generate_from_subbasis(C3, t.open_sets()) == t

    def test_alexandrov_inverts_specialization(self):
        for t in get_census(3):
            assert alexandrov_topology(C3, specialization_preorder(t)) == t

    def test_specialization_of_sierpinski(self):
        # 1 is in the closure of {0}: the minimal open around 1 is the carrier
        assert specialization_preorder(sierpinski()) == (0b01, 0b11)


def test_topology_equality_and_hash():
    a = Topology(C2, [3, 0, 1])
    assert a == sierpinski()
    assert hash(a) == hash(sierpinski())
    assert Topology(Carrier(1), [0, 1]) != Topology(C2, [0, 1])
