"""State construction, validation, sampling, and the JSON schema."""

import json

import numpy as np
import pytest

from csskit import (
    Bipartition,
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    StateFileError,
    TraceNotOne,
    UnknownName,
    bell_state,
    ghz_state,
    load_state,
    max_mixed,
    named_state,
    random_product_pure,
    random_state,
    save_state,
    validate,
    w_state,
    werner_state,
)
from csskit.states import partial_transpose_cut, state_from_dict, state_to_dict


class TestValidate:
    def test_max_mixed_valid(self):
        s = validate(np.eye(4) / 4, (2, 2))
        assert s.dims == (2, 2)

    def test_trace_not_one(self):
        with pytest.raises(TraceNotOne):
            validate(np.eye(2), (2,))

    def test_bell_matrix_valid(self):
        m = np.zeros((4, 4))
        m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = 0.5
        validate(m, (2, 2))

    def test_not_hermitian(self):
        m = np.eye(2) / 2
        m[0, 1] = 0.3
        with pytest.raises(NotHermitian):
            validate(m, (2,))

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            validate(np.diag([1.5, -0.5]), (2,))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            validate(np.eye(4) / 4, (2, 3))

    def test_message_lists_every_violation(self):
        with pytest.raises(TraceNotOne) as err:
            validate(np.diag([2.0, -0.5]), (2,))
        assert "trace" in str(err.value)
        assert "eigenvalue" in str(err.value)


class TestNamedStates:
    def test_bell_corners(self):
        m = bell_state().mat
        assert m[0, 0] == m[0, 3] == m[3, 0] == m[3, 3] == 0.5
        assert np.count_nonzero(m) == 4

    def test_ghz_corners(self):
        m = ghz_state().mat
        assert m[0, 0] == m[0, 7] == m[7, 0] == m[7, 7] == 0.5
        assert np.count_nonzero(m) == 4
        assert ghz_state().dims == (2, 2, 2)

    def test_w_block(self):
        m = w_state().mat
        for i in (1, 2, 4):
            for j in (1, 2, 4):
                assert m[i, j] == pytest.approx(1 / 3)
        assert np.count_nonzero(m) == 9

    def test_werner_mixture(self):
        np.testing.assert_allclose(
            werner_state(0.5).mat, 0.5 * bell_state().mat + 0.5 * np.eye(4) / 4
        )
        with pytest.raises(ValueError):
            werner_state(1.2)

    def test_dispatch(self):
        assert named_state("bell").dims == (2, 2)
        assert named_state("werner", p=0.3).dims == (2, 2)
        assert named_state("max_mixed", dims=(2, 3)).dim == 6
        with pytest.raises(UnknownName):
            named_state("bellish")
        with pytest.raises(UnknownName):
            named_state("werner")


class TestRandomState:
    def test_deterministic_per_seed(self):
        a = random_state((2, 2), 123)
        b = random_state((2, 2), 123)
        assert np.array_equal(a.mat, b.mat)

    def test_samples_validate(self):
        rng = np.random.default_rng(5)
        for _ in range(10_000):
            random_state((2, 2), rng)  # validate() runs inside

    def test_mean_approaches_max_mixed(self):
        rng = np.random.default_rng(6)
        acc = np.zeros((4, 4), dtype=complex)
        n = 10_000
        for _ in range(n):
            acc += random_state((2, 2), rng).mat
        assert np.abs(acc / n - np.eye(4) / 4).max() < 0.02

    def test_negative_pt_eigenvalue_counts(self):
        # 2x2 partial transposes have at most one negative eigenvalue,
        # 2x3 at most two; checked in bulk with batched eigvalsh.
        rng = np.random.default_rng(7)
        for dims, max_neg in (((2, 2), 1), ((2, 3), 2)):
            d = int(np.prod(dims))
            g = rng.standard_normal((10_000, d, d)) + 1j * rng.standard_normal((10_000, d, d))
            rho = g @ np.conj(np.swapaxes(g, 1, 2))
            rho /= np.trace(rho, axis1=1, axis2=2).real[:, None, None]
            da, db = dims
            pt = rho.reshape(-1, da, db, da, db).transpose(0, 1, 4, 3, 2).reshape(-1, d, d)
            counts = (np.linalg.eigvalsh(pt) < -1e-9).sum(axis=1)
            assert counts.max() <= max_neg


class TestRandomProductPure:
    def test_single_factor_pure(self):
        s = random_product_pure((2,), 3)
        assert np.trace(s.mat @ s.mat).real == pytest.approx(1.0, abs=1e-12)

    def test_two_qubit_is_ppt(self):
        for seed in range(50):
            s = random_product_pure((2, 2), seed)
            pt = partial_transpose_cut(s.mat, s.dims, Bipartition.default(2))
            assert np.linalg.eigvalsh(pt)[0] >= -1e-12

    def test_marginals_pure(self):
        from csskit import partial_trace

        s = random_product_pure((2, 3), 11)
        for keep in ((0,), (1,)):
            marg = partial_trace(s.mat, s.dims, keep)
            assert np.trace(marg @ marg).real == pytest.approx(1.0, abs=1e-12)


class TestBipartition:
    def test_from_cut_and_default(self):
        cut = Bipartition.from_cut([0], 3)
        assert cut.side_a == (0,) and cut.side_b == (1, 2)
        assert Bipartition.default(2).side_b == (1,)

    def test_bipartite_dims(self):
        cut = Bipartition.from_cut([1], 3)
        assert cut.bipartite_dims((2, 3, 2)) == (3, 4)

    def test_invalid(self):
        with pytest.raises(DimensionMismatch):
            Bipartition(side_a=(), side_b=(0,))
        with pytest.raises(DimensionMismatch):
            Bipartition(side_a=(0,), side_b=(0, 1))
        with pytest.raises(DimensionMismatch):
            Bipartition.from_cut([3], 2)
        with pytest.raises(DimensionMismatch):
            Bipartition.from_cut([0, 1], 2)  # empty side B


class TestJsonSchema:
    def test_round_trip_exact(self, tmp_path):
        s = random_state((2, 3), 99)
        path = tmp_path / "state.json"
        save_state(s, path)
        loaded = load_state(path)
        assert np.array_equal(loaded.mat, s.mat)
        assert loaded.dims == s.dims

    def test_dict_shape(self):
        d = state_to_dict(bell_state())
        assert d["dims"] == [2, 2]
        assert d["matrix"][0][0] == [0.5, 0.0]
        again = state_from_dict(d)
        assert np.array_equal(again.mat, bell_state().mat)

    def test_missing_fields_named(self):
        with pytest.raises(StateFileError) as err:
            state_from_dict({"matrix": []})
        assert "dims" in str(err.value)
        with pytest.raises(StateFileError) as err:
            state_from_dict({"dims": [2]})
        assert "matrix" in str(err.value)

    def test_bad_matrix_named(self):
        with pytest.raises(StateFileError) as err:
            state_from_dict({"dims": [2], "matrix": [[1.0, 0.0], [0.0, 1.0]]})
        assert "matrix" in str(err.value)

    def test_malformed_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(StateFileError):
            load_state(path)

    def test_whitespace_tolerant(self, tmp_path):
        path = tmp_path / "spaced.json"
        payload = state_to_dict(max_mixed((2,)))
        path.write_text("\n  " + json.dumps(payload, indent=4) + "\n\n")
        assert load_state(path).dim == 2
