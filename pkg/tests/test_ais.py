"""Active information storage: analytic AR(1) oracle and degenerate cases."""

import numpy as np
import pytest

from infonet import (
    Coupling,
    Dataset,
    GroundTruthSpec,
    InferenceSettings,
    VariableRef,
    ais_estimate,
    generate_dataset,
)


class TestStorage:
    def test_ar1_matches_analytic_value(self):
        ds = generate_dataset(
            GroundTruthSpec(
                n_processes=1,
                n_samples=10000,
                topology=(Coupling(0, 0, 1, 0.8),),
                seed=97,
            )
        )
        result = ais_estimate(ds, 0, InferenceSettings(seed=81))
        analytic = -0.5 * np.log2(1 - 0.64)
        assert result.value_bits == pytest.approx(analytic, abs=0.02)
        assert VariableRef(0, 1) in result.selected_embedding
        assert result.test.significant

    def test_iid_process_reports_nothing(self):
        empties = 0
        for seed in range(10):
            ds = generate_dataset(
                GroundTruthSpec(n_processes=1, n_samples=1500, seed=400 + seed)
            )
            result = ais_estimate(ds, 0, InferenceSettings(seed=seed))
            if not result.selected_embedding:
                empties += 1
                assert result.value_bits == 0.0
                assert result.test.p_value == 1.0
                assert not result.test.significant
                assert np.all(result.local == 0.0)
        assert empties >= 7

    def test_pure_alternation_one_bit(self):
        values = np.tile([0.0, 1.0], 400)[np.newaxis, :, np.newaxis]
        ds = Dataset(values=values, kind="discrete", alphabet_size=2)
        settings = InferenceSettings(estimator="discrete", seed=82)
        result = ais_estimate(ds, 0, settings)
        assert VariableRef(0, 1) in result.selected_embedding
        assert result.value_bits == pytest.approx(1.0, abs=1e-4)
        assert result.test.significant

    def test_phase_slipping_alternation_storage(self):
        # alternation with 5% slips: detectable and analytically 1 - H2(0.05)
        rng = np.random.default_rng(820)
        slip = 0.05
        x = np.zeros(8000, dtype=np.int64)
        for t in range(1, 8000):
            x[t] = 1 - x[t - 1] if rng.uniform() >= slip else x[t - 1]
        ds = Dataset(
            values=x.astype(float)[np.newaxis, :, np.newaxis],
            kind="discrete",
            alphabet_size=2,
        )
        settings = InferenceSettings(estimator="discrete", seed=83)
        result = ais_estimate(ds, 0, settings)
        analytic = 1.0 + slip * np.log2(slip) + (1 - slip) * np.log2(1 - slip)
        assert VariableRef(0, 1) in result.selected_embedding
        assert result.value_bits == pytest.approx(analytic, abs=0.03)
        assert result.test.significant

    def test_local_average_identity(self):
        ds = generate_dataset(
            GroundTruthSpec(
                n_processes=1,
                n_samples=4000,
                topology=(Coupling(0, 0, 1, 0.7),),
                seed=83,
            )
        )
        result = ais_estimate(ds, 0, InferenceSettings(seed=84))
        assert np.mean(result.local) == pytest.approx(result.value_bits, rel=1e-10)

    def test_non_negative(self):
        ds = generate_dataset(GroundTruthSpec(n_processes=1, n_samples=2000, seed=85))
        result = ais_estimate(ds, 0, InferenceSettings(seed=86))
        assert result.value_bits >= -1e-9

    def test_embedding_dominates_single_variables(self):
        # joint storage of the selected set is at least each single variable's
        ds = generate_dataset(
            GroundTruthSpec(
                n_processes=1,
                n_samples=6000,
                topology=(Coupling(0, 0, 1, 0.5), Coupling(0, 0, 2, 0.3)),
                seed=87,
            )
        )
        result = ais_estimate(ds, 0, InferenceSettings(seed=88))
        if len(result.selected_embedding) >= 2:
            from infonet import embed, gaussian_mi, normalize

            norm = normalize(ds)
            real = embed(norm, 0, result.selected_embedding, max_lag=5)
            for j in range(len(result.selected_embedding)):
                single = gaussian_mi(real.lagged[:, j : j + 1], real.present[:, None])
                assert result.value_bits >= single.value - 1e-9
