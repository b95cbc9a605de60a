import numpy as np
import pytest

from colgibbs import (
    collinear_input_chain,
    impulse_response,
    load_dataset,
    make_dataset,
    noise_variance_from_snr,
    random_common_denominator_tfs,
)
from colgibbs.datagen import DescriptorError, validate_descriptor


class TestImpulseResponse:
    def test_geometric_pole(self):
        a = 0.7
        h, tail = impulse_response([1.0], [1.0, -a], 6)
        assert np.allclose(h, a ** np.arange(6))
        assert tail > 0

    def test_truncation_tail_bound(self):
        # worst allowed pole modulus 0.95: relative tail past p=50 is small
        h, tail = impulse_response([1.0], [1.0, -0.95], 50, horizon=2000)
        geometric = 0.95 ** 50  # envelope ratio of the remaining mass
        assert tail < 2 * geometric
        assert tail < 1e-1


class TestRandomTfs:
    def test_shared_denominator(self):
        rng = np.random.default_rng(0)
        tfs = random_common_denominator_tfs(4, 5, 30, rng)
        assert tfs.m == 4
        assert tfs.denominator.shape == (6,)
        roots = np.roots(tfs.denominator)
        assert np.all(np.abs(roots) <= 0.95 + 1e-9)
        assert np.all(np.abs(roots) >= 0.5 - 1e-9)
        for h in tfs.firs:
            assert h.shape == (30,)

    def test_tail_bounds_reported(self):
        rng = np.random.default_rng(1)
        tfs = random_common_denominator_tfs(3, 5, 50, rng)
        assert len(tfs.tail_bounds) == 3
        assert all(0 <= t < 0.2 for t in tfs.tail_bounds)

    def test_seeded_reproducibility(self):
        t1 = random_common_denominator_tfs(2, 5, 20, np.random.default_rng(7))
        t2 = random_common_denominator_tfs(2, 5, 20, np.random.default_rng(7))
        for a, b in zip(t1.firs, t2.firs):
            assert np.array_equal(a, b)


class TestCollinearChain:
    def test_innovation_variance_inversion(self):
        # eta = 1, c = 0.99 gives w2 = 0.36 (1/0.99^2 - 1)
        rng = np.random.default_rng(2)
        base = rng.standard_normal(2_000_000)
        base = (base - base.mean()) / base.std()
        chain = collinear_input_chain(base, [0.99], rng)
        r = chain[1] - chain[0]
        w2_expected = 0.36 * (1.0 / 0.99 ** 2 - 1.0)
        # MA(1) with coefficient -0.8: Var(r) = (1 + 0.64) w2
        assert abs(np.var(r) - 1.64 * w2_expected) < 0.001

    def test_c_to_one_limit(self):
        rng = np.random.default_rng(3)
        base = rng.standard_normal(10_000)
        chain = collinear_input_chain(base, [0.999999], rng)
        assert np.abs(chain[1] - chain[0]).max() < 1e-2

    def test_adjacent_correlations_near_target(self):
        rng = np.random.default_rng(4)
        base = rng.standard_normal(100_000)
        chain = collinear_input_chain(base, [0.99] * 9, rng)
        for a, b in zip(chain[:-1], chain[1:]):
            c = abs(np.corrcoef(a, b)[0, 1])
            assert abs(c - 0.99) < 0.005

    def test_end_to_end_correlation(self):
        # the stated innovation rule uses the AR-style variance in the
        # inversion, so realized links sit near 0.994 and the (1,10)
        # correlation lands near 0.994^9, not the 0.99^9 = 0.9135 of an
        # exact-MA inversion
        rng = np.random.default_rng(5)
        base = rng.standard_normal(100_000)
        chain = collinear_input_chain(base, [0.99] * 9, rng)
        c = abs(np.corrcoef(chain[0], chain[9])[0, 1])
        assert abs(c - 0.994 ** 9) < 0.01

    def test_invalid_target(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            collinear_input_chain(rng.standard_normal(100), [1.0], rng)


class TestNoiseVariance:
    def test_unit_variance_factor(self):
        rng = np.random.default_rng(7)
        signal = rng.standard_normal(500_000)
        assert abs(noise_variance_from_snr(signal, 0.3) - 0.3) < 0.005

    def test_divisor_example(self):
        rng = np.random.default_rng(8)
        signal = np.sqrt(10.0) * rng.standard_normal(500_000)
        assert abs(noise_variance_from_snr(signal, 0.2) - 2.0) < 0.05

    def test_constant_signal(self):
        with pytest.raises(ValueError):
            noise_variance_from_snr(np.ones(100), 0.3)


EX1_DESC = {
    "m": 2, "n": 200, "p": 20, "alpha": 0.9, "degree": 5,
    "noise_factor": 0.2, "seed": 3, "inputs": {"kind": "identical"},
}


class TestDatasets:
    def test_identical_inputs_dataset(self):
        ds = make_dataset(EX1_DESC)
        assert np.array_equal(ds.problem.inputs[0], ds.problem.inputs[1])
        assert ds.collinear_channels == (0, 1)
        noiseless = sum(G @ b for G, b in zip(ds.problem.G_blocks, ds.truth.blocks))
        assert abs(np.var(ds.problem.Y - noiseless) / ds.sigma2 - 1) < 0.35

    def test_chain_dataset(self):
        desc = dict(EX1_DESC, m=6, n=5_000,
                    inputs={"kind": "chain", "channels": 4, "c": 0.99})
        ds = make_dataset(desc)
        assert ds.collinear_channels == (0, 1, 2, 3)
        c01 = abs(np.corrcoef(ds.problem.inputs[0], ds.problem.inputs[1])[0, 1])
        assert c01 > 0.98
        c45 = abs(np.corrcoef(ds.problem.inputs[4], ds.problem.inputs[5])[0, 1])
        assert c45 < 0.1

    def test_roundtrip(self, tmp_path):
        ds = make_dataset(EX1_DESC)
        ds.save(tmp_path)
        loaded = load_dataset(tmp_path)
        assert np.allclose(loaded.problem.Y, ds.problem.Y)
        assert np.allclose(loaded.truth.stacked, ds.truth.stacked)
        assert loaded.sigma2 == ds.sigma2

    def test_determinism(self):
        a = make_dataset(EX1_DESC)
        b = make_dataset(EX1_DESC)
        assert np.array_equal(a.problem.Y, b.problem.Y)

    @pytest.mark.parametrize("mutation, message", [
        ({"m": None}, "missing"),
        ({"alpha": 1.5}, "alpha"),
        ({"inputs": {"kind": "mystery"}}, "kind"),
        ({"inputs": {"kind": "chain", "channels": 99, "c": 0.9}}, "channels"),
        ({"inputs": {"kind": "chain", "channels": 4, "c": 1.7}}, "c"),
    ])
    def test_descriptor_validation(self, mutation, message):
        desc = dict(EX1_DESC)
        for key, value in mutation.items():
            if value is None:
                desc.pop(key)
            else:
                desc[key] = value
        with pytest.raises(DescriptorError, match=message):
            validate_descriptor(desc)
