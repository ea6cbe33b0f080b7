"""Zoo evaluation, normalization, query accounting, and graph parsing."""
import math

import numpy as np
import pytest

from curvsub import (
    GraphParseError,
    InvalidInstanceError,
    QuerySession,
    Subset,
    make_concave_over_modular,
    make_hidden_set,
    make_modular,
    make_modulated,
    make_tabulated,
    make_truncation,
    parse_graph,
    singleton_vector,
)

from conftest import bf_is_monotone, bf_is_submodular, fixed_zoo, value_table_loop

TOL = 1e-9


class TestSubset:
    def test_basic_ops(self):
        s = Subset.from_indices(5, [0, 2])
        assert s.mask == 0b101
        assert s.cardinality == 2
        assert s.indices() == (0, 2)
        assert s.add(1).mask == 0b111
        assert s.remove(0).mask == 0b100
        assert s.complement().mask == 0b11010
        assert Subset.full(3).mask == 7

    def test_out_of_range_bits_rejected(self):
        with pytest.raises(ValueError):
            Subset(0b1000, 3)
        with pytest.raises(ValueError):
            Subset.from_indices(3, [3])

    def test_ground_set_mismatch(self):
        with pytest.raises(ValueError):
            Subset(1, 3).union(Subset(1, 4))


class TestEvaluate:
    def test_modular_example(self):
        oracle = make_modular([1, 2, 3])
        session = QuerySession()
        assert oracle.evaluate(Subset(0b101, 3), session) == pytest.approx(4.0)
        assert session.count == 1

    def test_hidden_set_example(self):
        oracle = make_hidden_set(5, 2, 1, Subset.from_indices(5, [0, 1]))
        session = QuerySession()
        # f({0,1}) = min(0+1, 2, 2) = 1
        assert oracle.evaluate(Subset(0b11, 5), session) == pytest.approx(1.0)
        # f({2,3}) = min(2+1, 2, 2) = 2
        assert oracle.evaluate(Subset(0b1100, 5), session) == pytest.approx(2.0)
        # f({0}) = min(0+1, 1, 2) = 1
        assert oracle.evaluate(Subset(1, 5), session) == pytest.approx(1.0)
        assert oracle.evaluate(Subset.empty(5), session) == 0.0

    def test_modulated_example(self):
        oracle = make_modulated(make_truncation(5, 2), 0.5)
        session = QuerySession()
        assert oracle.evaluate(Subset(0b11, 5), session) == pytest.approx(2.0)

    def test_modulated_hidden_at_r(self):
        base = make_hidden_set(5, 2, 1, Subset.from_indices(5, [0, 1]))
        oracle = make_modulated(base, 0.5)
        assert oracle.value(0b11) == pytest.approx(1.5)

    def test_modulated_extremes(self):
        base = make_truncation(5, 2)
        assert make_modulated(base, 0.0).value(0b111) == pytest.approx(3.0)
        assert make_modulated(base, 1.0).value(0b111) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        oracle = make_modular([1, 2, 3])
        with pytest.raises(ValueError):
            oracle.evaluate(Subset(1, 4), QuerySession())

    def test_session_counts_every_call(self):
        oracle = make_modulated(make_truncation(4, 2), 0.5)
        session = QuerySession()
        for mask in range(16):
            oracle.evaluate(Subset(mask, 4), session)
        assert session.count == 16


class TestConstructors:
    def test_hidden_set_validates(self):
        with pytest.raises(InvalidInstanceError):
            make_hidden_set(5, 3, 1, Subset.from_indices(5, [0, 1]))  # |R| != alpha
        with pytest.raises(InvalidInstanceError):
            make_hidden_set(5, 2, 0.5, Subset.from_indices(5, [0, 1]))  # beta < 1

    def test_modulated_validates_kappa(self):
        base = make_truncation(4, 2)
        for bad in (-0.1, 1.5):
            with pytest.raises(InvalidInstanceError):
                make_modulated(base, bad)

    def test_concave_validates_exponent(self):
        for bad in (0.0, 1.2, -0.5):
            with pytest.raises(InvalidInstanceError):
                make_concave_over_modular([(1.0, [1, 2])], bad)

    def test_concave_values(self):
        ones = make_concave_over_modular([(1.0, [1, 1, 1, 1])], 0.5)
        assert ones.value(0b1111) == pytest.approx(2.0)
        two = make_concave_over_modular([(1.0, [4, 9])], 0.5)
        assert two.value(0b11) == pytest.approx(math.sqrt(13))
        linear = make_concave_over_modular([(2.0, [1, 2])], 1.0)
        assert linear.value(0b11) == pytest.approx(6.0)

    def test_tabulated_requires_normalization(self):
        with pytest.raises(InvalidInstanceError):
            make_tabulated([1.0, 2.0])
        with pytest.raises(InvalidInstanceError):
            make_tabulated([0.0, 1.0, 2.0])  # not a power of two


class TestSingletonVector:
    def test_modular(self):
        assert singleton_vector(make_modular([1, 2, 3])).tolist() == [1, 2, 3]

    def test_hidden_all_ones(self):
        oracle = make_hidden_set(4, 2, 1, Subset.from_indices(4, [0, 1]))
        assert singleton_vector(oracle).tolist() == [1, 1, 1, 1]

    def test_modulated(self):
        oracle = make_modulated(make_truncation(3, 1), 0.5)
        assert singleton_vector(oracle).tolist() == [1, 1, 1]

    def test_uses_exactly_n_queries(self):
        session = QuerySession()
        singleton_vector(make_truncation(7, 3), session)
        assert session.count == 7


class TestZooProperties:
    @pytest.mark.parametrize("name,oracle", fixed_zoo())
    def test_normalized_monotone_submodular(self, name, oracle):
        table = value_table_loop(oracle)
        assert table[0] == 0.0, name
        assert (table >= -TOL).all(), name
        assert bf_is_monotone(table, oracle.n), name
        assert bf_is_submodular(table, oracle.n), name

    @pytest.mark.parametrize("name,oracle", fixed_zoo())
    def test_vectorized_matches_scalar(self, name, oracle):
        table = value_table_loop(oracle)
        assert np.allclose(table, oracle.value_table(), atol=TOL), name

    def test_integer_valued_members(self):
        for oracle in (make_truncation(5, 2),
                       make_hidden_set(5, 2, 1, Subset.from_indices(5, [0, 1]))):
            table = value_table_loop(oracle)
            assert np.allclose(table, np.round(table))

    def test_modulated_identity(self):
        base = make_truncation(5, 2)
        oracle = make_modulated(base, 0.3)
        for mask in range(32):
            expected = 0.3 * base.value(mask) + 0.7 * bin(mask).count("1")
            assert abs(oracle.value(mask) - expected) < 1e-12


class TestParseGraph:
    def test_triangle(self):
        g = parse_graph("3 3\n0 1\n1 2\n0 2")
        assert g.node_count == 3 and g.m == 3
        assert g.edges == ((0, 1), (1, 2), (0, 2))

    def test_single_edge(self):
        g = parse_graph("2 1\n0 1")
        assert g.m == 1
        assert g.source == 0 and g.sink == 1

    def test_self_loop_rejected(self):
        with pytest.raises(GraphParseError) as err:
            parse_graph("2 1\n0 0")
        assert err.value.line_no == 2

    def test_out_of_range_endpoint(self):
        with pytest.raises(GraphParseError):
            parse_graph("2 1\n0 2")

    def test_malformed_line(self):
        with pytest.raises(GraphParseError) as err:
            parse_graph("2 1\n0 1 junk")
        assert err.value.line_no == 2

    def test_wrong_edge_count(self):
        with pytest.raises(GraphParseError):
            parse_graph("3 2\n0 1")
