"""Curvature quantities, the ordering chain, and the decomposition."""
import math

import numpy as np
import pytest

from curvsub import (
    IncompleteSampleError,
    InvalidOverrideError,
    NonSubmodularError,
    QuerySession,
    ScaleError,
    Subset,
    ZeroSingletonError,
    curve_normalize,
    estimate_curvature_from_samples,
    hat_curvature,
    make_concave_over_modular,
    make_hidden_set,
    make_modular,
    make_modulated,
    make_tabulated,
    make_truncation,
    set_curvature,
    singleton_vector,
    tilde_curvature,
    total_curvature,
)

from conftest import (
    bf_hat_curvature,
    bf_is_monotone,
    bf_is_submodular,
    bf_set_curvature,
    bf_tilde_curvature,
    bf_total_curvature,
    fixed_zoo,
    random_zoo_oracle,
    value_table_loop,
)

TOL = 1e-9
SQRT = make_concave_over_modular([(1.0, [1, 1, 1, 1])], 0.5)


class TestTotalCurvature:
    def test_modular_is_zero(self):
        report = total_curvature(make_modular([1, 2, 3]))
        assert report.total == pytest.approx(0.0, abs=TOL)
        assert report.argmin_element == 0  # tie toward lowest index
        assert report.queries_used == 7

    def test_truncation_is_one(self):
        assert total_curvature(make_truncation(5, 2)).total == pytest.approx(1.0)

    def test_modulated_value(self):
        oracle = make_modulated(make_truncation(5, 2), 0.4)
        assert total_curvature(oracle).total == pytest.approx(0.4, abs=TOL)

    @pytest.mark.parametrize("n", [3, 10, 50])
    def test_query_budget_exact(self, n):
        session = QuerySession()
        total_curvature(make_truncation(n, max(1, n // 2)), session)
        assert session.count == 2 * n + 1

    def test_zero_singleton_raises(self):
        with pytest.raises(ZeroSingletonError):
            total_curvature(make_modular([0, 1, 2]))

    def test_non_submodular_raises(self):
        # supermodular: f(X) = |X|^2 scaled into a valid table
        n = 3
        table = [float(m.bit_count() ** 2) for m in range(1 << n)]
        with pytest.raises(NonSubmodularError):
            total_curvature(make_tabulated(table))

    @pytest.mark.parametrize("name,oracle", fixed_zoo())
    def test_matches_brute_force(self, name, oracle):
        table = value_table_loop(oracle)
        if any(table[1 << j] == 0 for j in range(oracle.n)):
            pytest.skip("zero singleton")
        expected = bf_total_curvature(table, oracle.n)
        assert total_curvature(oracle).total == pytest.approx(expected, abs=TOL), name


class TestSetCurvature:
    def test_modular_any_set(self):
        oracle = make_modular([1, 2, 3, 4])
        for mask in (0b1, 0b101, 0b1111):
            assert set_curvature(oracle, Subset(mask, 4)) == pytest.approx(0.0, abs=TOL)

    def test_sqrt_cardinality(self):
        expected = 1 - (2 - math.sqrt(3))
        assert set_curvature(SQRT, Subset.full(4)) == pytest.approx(expected, abs=TOL)

    def test_truncation_inactive_inside(self):
        assert set_curvature(make_truncation(5, 2), Subset(0b11, 5)) == pytest.approx(0.0)

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            set_curvature(make_truncation(4, 2), Subset.empty(4))

    def test_full_set_equals_total(self):
        oracle = make_modulated(make_truncation(6, 3), 0.7)
        assert set_curvature(oracle, Subset.full(6)) == pytest.approx(
            total_curvature(oracle).total, abs=TOL
        )


class TestHatCurvature:
    def test_modular_zero(self):
        assert hat_curvature(make_modular([1, 2]), Subset.full(2)) == pytest.approx(0.0)

    def test_symmetric_equals_set_curvature(self):
        assert hat_curvature(SQRT, Subset.full(4)) == pytest.approx(
            1 - (2 - math.sqrt(3)), abs=TOL
        )

    def test_hidden_set_full(self):
        oracle = make_hidden_set(4, 2, 1, Subset.from_indices(4, [0, 1]))
        table = value_table_loop(oracle)
        expected = bf_hat_curvature(table, 0b1111, 4)
        assert hat_curvature(oracle, Subset.full(4)) == pytest.approx(expected, abs=TOL)
        assert expected == pytest.approx(1.0)  # all co-singleton gains vanish


class TestTildeCurvature:
    def test_modular_zero(self):
        oracle = make_modular([1, 2, 3])
        for mask in (0b1, 0b110, 0b111):
            assert tilde_curvature(oracle, Subset(mask, 3)) == pytest.approx(0.0, abs=TOL)

    def test_truncation_full(self):
        assert tilde_curvature(make_truncation(3, 1), Subset.full(3)) == pytest.approx(1.0)

    def test_scale_guard(self):
        with pytest.raises(ScaleError):
            tilde_curvature(make_truncation(13, 2), Subset.full(13), table_limit=12)

    @pytest.mark.parametrize("name,oracle", fixed_zoo())
    def test_matches_brute_force_on_v(self, name, oracle):
        table = value_table_loop(oracle)
        if any(table[1 << j] == 0 for j in range(oracle.n)):
            pytest.skip("zero singleton")
        expected = bf_tilde_curvature(table, (1 << oracle.n) - 1, oracle.n)
        got = tilde_curvature(oracle, Subset.full(oracle.n))
        assert got == pytest.approx(expected, abs=TOL), name


class TestOrderingChain:
    def test_chain_on_random_instances(self):
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(50):
            n = int(rng.integers(3, 7))
            oracle = random_zoo_oracle(rng, n)
            table = value_table_loop(oracle)
            if any(table[1 << j] == 0 for j in range(n)):
                continue
            kf = total_curvature(oracle).total
            for s_mask in range(1, 1 << n):
                s = Subset(s_mask, n)
                k_hat = hat_curvature(oracle, s)
                k_set = set_curvature(oracle, s)
                k_tilde = tilde_curvature(oracle, s)
                assert k_hat <= k_set + TOL
                assert k_set <= k_tilde + TOL
                assert k_tilde <= kf + TOL
                checked += 1
        assert checked > 500


class TestCurveNormalize:
    def test_recovers_modulation_base(self):
        base = make_truncation(5, 2)
        oracle = make_modulated(base, 0.6)
        dec = curve_normalize(oracle)
        assert dec.kappa == pytest.approx(0.6, abs=TOL)
        for mask in range(32):
            assert dec.normalized.value(mask) == pytest.approx(base.value(mask), abs=1e-8)

    def test_modular_yields_zero_part(self):
        oracle = make_modular([1, 2, 3])
        dec = curve_normalize(oracle)
        assert dec.kappa == 0.0
        assert dec.singletons.tolist() == [1, 2, 3]
        assert all(dec.normalized.value(m) == 0.0 for m in range(8))

    def test_concave_example_value(self):
        dec = curve_normalize(SQRT)
        kappa = math.sqrt(3) - 1
        expected = (2 - (1 - kappa) * 4) / kappa
        assert dec.kappa == pytest.approx(kappa, abs=TOL)
        assert dec.normalized.value(0b1111) == pytest.approx(expected, abs=1e-8)
        assert expected == pytest.approx(1.2679, abs=1e-4)

    def test_reconstruction_exact(self):
        for name, oracle in fixed_zoo():
            table = value_table_loop(oracle)
            if any(table[1 << j] == 0 for j in range(oracle.n)):
                continue
            dec = curve_normalize(oracle)
            for mask in range(1 << oracle.n):
                assert dec.value(mask) == pytest.approx(table[mask], abs=TOL), name

    def test_normalized_part_properties(self):
        # Lemma: the normalized part is monotone, nonnegative, submodular,
        # below the singleton sum, and has curvature one.
        for name, oracle in fixed_zoo():
            table = value_table_loop(oracle)
            if any(table[1 << j] == 0 for j in range(oracle.n)):
                continue
            dec = curve_normalize(oracle)
            if dec.kappa == 0.0:
                continue
            norm_table = value_table_loop(dec.normalized)
            n = oracle.n
            assert norm_table[0] == pytest.approx(0.0, abs=TOL), name
            assert (norm_table >= -TOL).all(), name
            assert bf_is_monotone(norm_table, n), name
            assert bf_is_submodular(norm_table, n), name
            for mask in range(1 << n):
                singles = sum(dec.singletons[j] for j in range(n) if mask >> j & 1)
                assert norm_table[mask] <= singles + TOL, name
            assert bf_total_curvature(norm_table, n) == pytest.approx(1.0, abs=TOL), name

    def test_override_accepted_above(self):
        oracle = make_modulated(make_truncation(5, 2), 0.4)
        dec = curve_normalize(oracle, kappa_override=0.8)
        assert dec.kappa == 0.8
        for mask in range(32):
            assert dec.value(mask) == pytest.approx(oracle.value(mask), abs=TOL)

    def test_override_below_rejected(self):
        oracle = make_modulated(make_truncation(5, 2), 0.4)
        with pytest.raises(InvalidOverrideError):
            curve_normalize(oracle, kappa_override=0.2)


class TestLemmaBounds:
    def test_singleton_sandwich(self):
        # (1 - kappa) * sum f(j) <= f(X) <= sum f(j) on the whole zoo
        for name, oracle in fixed_zoo():
            table = value_table_loop(oracle)
            if any(table[1 << j] == 0 for j in range(oracle.n)):
                continue
            kappa = total_curvature(oracle).total
            singles = singleton_vector(oracle)
            for mask in range(1 << oracle.n):
                s = sum(singles[j] for j in range(oracle.n) if mask >> j & 1)
                assert table[mask] <= s + TOL, name
                assert table[mask] >= (1 - kappa) * s - TOL, name


class TestEstimateFromSamples:
    def _samples(self, oracle):
        n = oracle.n
        full = Subset.full(n)
        subsets = [full] + [Subset(1 << j, n) for j in range(n)] + [
            full.remove(j) for j in range(n)
        ]
        return [(s, oracle.value(s.mask)) for s in subsets]

    def test_modular(self):
        assert estimate_curvature_from_samples(
            self._samples(make_modular([1, 1, 1]))
        ) == pytest.approx(0.0)

    def test_truncation(self):
        assert estimate_curvature_from_samples(
            self._samples(make_truncation(5, 2))
        ) == pytest.approx(1.0)

    def test_modulated(self):
        oracle = make_modulated(make_truncation(5, 2), 0.4)
        assert estimate_curvature_from_samples(self._samples(oracle)) == pytest.approx(
            0.4, abs=TOL
        )

    def test_missing_sample_identified(self):
        oracle = make_truncation(4, 2)
        samples = self._samples(oracle)
        dropped = [item for item in samples if item[0].mask != 0b0111]
        with pytest.raises(IncompleteSampleError) as err:
            estimate_curvature_from_samples(dropped)
        assert err.value.missing_mask == 0b0111
