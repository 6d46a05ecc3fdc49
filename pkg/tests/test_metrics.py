"""Negativity, the lower bound, and witness construction."""

import numpy as np
import pytest

from csskit import (
    Bipartition,
    DegenerateInput,
    ShapeMismatch,
    WitnessOperator,
    bell_state,
    build_witness,
    closest_separable,
    eval_witness,
    lower_bound,
    lower_bound_report,
    max_mixed,
    min_hsd,
    negativity,
    paper_negativity,
    probe_witness_min,
    pt_spectrum_report,
    random_product_pure,
    random_state,
    w_state,
    werner_state,
)
from csskit.metrics import SpectrumReport
from csskit.solver import case_formula
from csskit.states import partial_transpose_cut

from conftest import random_entangled_solvable, random_local_unital_dilation
from csskit.channels import apply_channel, apply_dilation, random_unital_channel


class TestNegativity:
    def test_bell(self):
        assert negativity(bell_state()) == pytest.approx(0.5, abs=1e-12)
        assert paper_negativity(bell_state()) == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        for seed in range(10):
            assert negativity(random_product_pure((2, 2), seed)) == 0.0

    def test_werner_grid(self):
        # brute-force eigensolver oracle over the mixing grid
        for p in np.linspace(0, 1, 21):
            expected = max(0.0, (3 * p - 1) / 4)
            assert negativity(werner_state(p)) == pytest.approx(expected, abs=1e-10)

    def test_spectrum_report_fields(self):
        rep = pt_spectrum_report(bell_state())
        assert isinstance(rep, SpectrumReport)
        assert rep.pos_rank == 3
        assert rep.neg_sum == pytest.approx(0.5, abs=1e-12)
        assert rep.neg_sq_sum == pytest.approx(0.25, abs=1e-12)


class TestLowerBound:
    def test_bell_tight(self):
        lb = lower_bound(bell_state())
        assert lb == pytest.approx((0.5) ** 2 / 3 + 0.25, abs=1e-12)
        assert lb == pytest.approx(min_hsd(bell_state()), abs=1e-9)

    def test_separable_zero(self):
        assert lower_bound(werner_state(0.2)) == 0.0
        assert lower_bound(max_mixed((2, 3))) == 0.0

    def test_never_exceeds_min_hsd(self):
        rng = np.random.default_rng(321)
        for dims in ((2, 2), (2, 3)):
            for _ in range(200):
                s = random_entangled_solvable(dims, rng)
                assert lower_bound(s) <= min_hsd(s) + 1e-9

    def test_tight_exactly_on_case_a(self):
        rng = np.random.default_rng(322)
        hit = 0
        for _ in range(100):
            s = random_entangled_solvable((2, 2), rng)
            cf = case_formula(pt_spectrum_report(s).spectrum, s.dims)
            if cf.case_id == "2x2-A":
                hit += 1
                assert abs(lower_bound(s) - min_hsd(s)) <= 1e-9
        assert hit > 50

    def test_case_b_gap_is_the_perfect_square(self):
        # the bound misses case-B distances by exactly the square residual
        rng = np.random.default_rng(323)
        checked = 0
        while checked < 20:
            s = random_entangled_solvable((2, 3), rng)
            spectrum = pt_spectrum_report(s).spectrum
            cf = case_formula(spectrum, s.dims)
            if cf.case_id == "2x3-1neg-B":
                lam6 = abs(spectrum[-1])
                lam5 = spectrum[4]
                residual = (lam6 - 5 * lam5) ** 2 / 20
            elif cf.case_id == "2x3-2neg-B":
                lam5, lam6 = abs(spectrum[-2]), abs(spectrum[-1])
                lam4 = spectrum[3]
                residual = (lam5 + lam6 - 4 * lam4) ** 2 / 12
            else:
                continue
            checked += 1
            assert min_hsd(s) == pytest.approx(lower_bound(s) + residual, abs=1e-9)

    def test_report_diagnostics(self):
        rep = lower_bound_report(bell_state())
        assert rep.trace_form_bound == pytest.approx(4 * rep.bound)
        assert rep.pos_rank == rep.pos_rank_matrix == 3


class TestWitness:
    def test_bell_expectation(self):
        res = closest_separable(bell_state())
        w = build_witness(bell_state(), res.css)
        assert eval_witness(w, bell_state()) == pytest.approx(-1 / np.sqrt(3), abs=1e-9)
        assert eval_witness(w, res.css) == pytest.approx(0.0, abs=1e-9)
        assert w.norm_check == pytest.approx(np.sqrt(1 / 3), abs=1e-12)

    def test_bell_positive_on_product_states(self):
        res = closest_separable(bell_state())
        w = build_witness(bell_state(), res.css)
        assert probe_witness_min(w, (2, 2), probes=10_000, seed=0) >= -1e-9

    def test_degenerate_input(self):
        sep = werner_state(0.2)
        res = closest_separable(sep)
        with pytest.raises(DegenerateInput):
            build_witness(sep, res.css)

    def test_identity_witness_constant(self):
        w = WitnessOperator(w=np.eye(4) / 2.0, norm_check=1.0)
        for seed in range(5):
            val = eval_witness(w, random_state((2, 2), seed))
            assert val == pytest.approx(0.5, abs=1e-12)

    def test_bell_witness_on_max_mixed(self):
        res = closest_separable(bell_state())
        w = build_witness(bell_state(), res.css)
        assert eval_witness(w, max_mixed((2, 2))) >= -1e-9

    def test_shape_mismatch(self):
        w = WitnessOperator(w=np.eye(4), norm_check=1.0)
        with pytest.raises(ShapeMismatch):
            eval_witness(w, max_mixed((2,)))

    def test_detects_exactly_the_entangled(self):
        # negative expectation on its target iff the target is entangled
        rng = np.random.default_rng(324)
        for dims in ((2, 2), (2, 3)):
            for _ in range(30):
                s = random_entangled_solvable(dims, rng)
                res = closest_separable(s)
                w = build_witness(s, res.css)
                assert negativity(s) > 0
                assert eval_witness(w, s) < 0

    def test_random_2x3_witness(self):
        rng = np.random.default_rng(325)
        s = random_entangled_solvable((2, 3), rng)
        res = closest_separable(s)
        w = build_witness(s, res.css)
        assert eval_witness(w, s) == pytest.approx(-np.sqrt(res.distance_sq), abs=1e-9)
        assert probe_witness_min(w, (2, 3), probes=5_000, seed=1) >= -1e-9


class TestLowerBoundUnderLocalUnitalMaps:
    def test_neg_sum_never_increases_on_states(self):
        # local unital channels: PT-spectrum majorization controls neg_sum
        rng = np.random.default_rng(326)
        for _ in range(200):
            s = random_entangled_solvable((2, 2), rng)
            channel = random_local_unital_dilation(rng)
            out = apply_dilation(s, channel)
            assert negativity(out) <= negativity(s) + 1e-9

    def test_neg_sum_never_increases_at_spectral_level(self):
        # a global unital channel applied to the Hermitian operator itself
        rng = np.random.default_rng(327)
        cut = Bipartition.default(2)
        for k in range(200):
            s = random_entangled_solvable((2, 2), rng)
            channel = random_unital_channel(4, 3, 5000 + k)
            pt = partial_transpose_cut(s.mat, s.dims, cut)
            out = apply_channel(channel, pt)
            w_in = np.linalg.eigvalsh(pt)
            w_out = np.linalg.eigvalsh(0.5 * (out + out.conj().T))
            assert -w_out[w_out < 0].sum() <= -w_in[w_in < 0].sum() + 1e-9
