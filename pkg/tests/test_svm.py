import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phonodiverge.svm import (
    FEASIBILITY_TOL,
    decision_function,
    dual_objective,
    dump_model,
    evaluate_cell,
    kkt_max_violation,
    make_split,
    predict,
    rbf_kernel,
    rbf_kernel_matrix,
    train_smo,
)
from phonodiverge.synth import qp_oracle_svm


def two_class_data(rng, n_per, d=2, gap=0.0):
    real = rng.standard_normal((n_per, d))
    fake = rng.standard_normal((n_per, d)) + gap
    x = np.vstack([real, fake])
    y = np.concatenate([-np.ones(n_per), np.ones(n_per)])
    return x, y


class TestMakeSplit:
    def test_balanced_80_20(self):
        plan = make_split(100, 100, 0.8, seed=0)
        assert len(plan.real_train) == len(plan.fake_train) == 80
        assert len(plan.real_test) == len(plan.fake_test) == 20

    def test_majority_downsampled(self):
        plan = make_split(150, 100, 0.8, seed=1)
        used_real = set(plan.real_train) | set(plan.real_test)
        assert len(used_real) == 100
        assert len(plan.real_train) == 80 and len(plan.real_test) == 20
        assert max(used_real) <= 149 and min(used_real) >= 0

    def test_same_seed_identical(self):
        assert make_split(57, 44, 0.7, seed=9) == make_split(57, 44, 0.7, seed=9)

    def test_different_seeds_differ(self):
        assert make_split(100, 100, 0.8, seed=0) != make_split(100, 100, 0.8, seed=1)

    def test_no_train_test_overlap(self):
        plan = make_split(63, 51, 0.75, seed=3)
        assert not (set(plan.real_train) & set(plan.real_test))
        assert not (set(plan.fake_train) & set(plan.fake_test))

    def test_floor_rule(self):
        plan = make_split(7, 7, 0.8, seed=0)  # floor(5.6) = 5
        assert len(plan.real_train) == 5 and len(plan.real_test) == 2

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.1, 1.7])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ValueError, match="ratio"):
            make_split(10, 10, ratio, seed=0)

    def test_below_min_count(self):
        with pytest.raises(ValueError, match="min_count"):
            make_split(10, 3, 0.8, seed=0, min_count=4)

    def test_empty_side_guard(self):
        with pytest.raises(ValueError, match="empty side"):
            make_split(2, 2, 0.9, seed=0)  # floor(1.8)=1 train, 1 test: fine at 3
            make_split(3, 3, 0.05, seed=0)


class TestRbfKernel:
    def test_self_is_one(self):
        x = np.array([0.3, -2.0])
        assert rbf_kernel(x, x, gamma=2.5) == 1.0

    def test_unit_distance(self):
        assert rbf_kernel(np.zeros(1), np.ones(1), gamma=1.0) == pytest.approx(
            math.exp(-1), abs=1e-12
        )

    def test_gamma_monotone(self):
        x, y = np.zeros(2), np.array([1.0, 1.0])
        vals = [rbf_kernel(x, y, g) for g in (0.1, 1.0, 10.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal((4, 3)), rng.standard_normal((5, 3))
        m = rbf_kernel_matrix(a, b, gamma=0.7)
        for i in range(4):
            for j in range(5):
                assert m[i, j] == pytest.approx(rbf_kernel(a[i], b[j], 0.7), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 20), st.floats(0.05, 5.0))
    def test_kernel_matrix_psd(self, seed, n, gamma):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((n, 3))
        k = rbf_kernel_matrix(pts, pts, gamma)
        eigs = np.linalg.eigvalsh(0.5 * (k + k.T))
        assert eigs.min() >= -1e-8


class TestTrainSmo:
    def test_two_point_separable(self):
        x = np.array([[0.0], [1.0]])
        y = np.array([-1.0, 1.0])
        model = train_smo(x, y, c=10.0, gamma=1.0, seed=0)
        assert predict(model, x[0]) == -1
        assert predict(model, x[1]) == 1

    def test_xor_rbf(self):
        x = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        model = train_smo(x, y, c=10.0, gamma=1.0, seed=0)
        assert list(predict(model, x)) == [-1, -1, 1, 1]

    def test_gamma_default_is_one_over_d(self):
        rng = np.random.default_rng(0)
        x, y = two_class_data(rng, 10, d=5, gap=3.0)
        model = train_smo(x, y, seed=0)
        assert model.gamma == pytest.approx(1 / 5)

    def test_feasibility_at_convergence(self):
        rng = np.random.default_rng(1)
        for seed in range(5):
            x, y = two_class_data(rng, 15, gap=1.0)
            m = train_smo(x, y, c=1.0, seed=seed)
            assert m.converged
            assert (m.alphas >= -FEASIBILITY_TOL).all()
            assert (m.alphas <= m.c + FEASIBILITY_TOL).all()
            assert abs(float(m.alphas @ m.labels)) <= 1e-6

    def test_kkt_satisfied_at_convergence(self):
        rng = np.random.default_rng(2)
        x, y = two_class_data(rng, 20, gap=1.5)
        m = train_smo(x, y, c=1.0, tol=1e-3, seed=3)
        xs = (x - m.feature_means) / m.feature_stds
        k = rbf_kernel_matrix(xs, xs, m.gamma)
        assert kkt_max_violation(k, y, m.alphas, m.bias, m.c) <= 1e-3 + 1e-9

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        x, y = two_class_data(rng, 12, gap=0.5)
        m1 = train_smo(x, y, seed=7)
        m2 = train_smo(x, y, seed=7)
        assert np.array_equal(m1.alphas, m2.alphas) and m1.bias == m2.bias

    def test_constant_feature_handled(self):
        x = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        m = train_smo(x, y, c=10.0, seed=0)
        assert m.feature_stds[1] == 1.0
        assert list(predict(m, x)) == [-1, -1, 1, 1]

    @pytest.mark.parametrize(
        "x,y,err",
        [
            (np.zeros((3, 2)), np.array([1.0, 1.0, 1.0]), "single-class"),
            (np.zeros((3, 2)), np.array([1.0, -1.0, 0.5]), "labels"),
            (np.zeros((1, 2)), np.array([1.0]), "at least 2"),
            (np.full((2, 2), np.nan), np.array([1.0, -1.0]), "non-finite"),
            (np.zeros((3, 2)), np.array([1.0, -1.0]), "shapes"),
        ],
    )
    def test_input_validation(self, x, y, err):
        with pytest.raises(ValueError, match=err):
            train_smo(x, y)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 5_000))
    def test_label_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        x, y = two_class_data(rng, 8, gap=1.0)
        probe = rng.standard_normal((6, 2))
        m_pos = train_smo(x, y, c=1.0, seed=seed)
        m_neg = train_smo(x, -y, c=1.0, seed=seed)
        assert np.array_equal(
            np.asarray(predict(m_pos, probe)), -np.asarray(predict(m_neg, probe))
        )


class TestOracle:
    def test_dual_matches_qp_oracle_small(self):
        rng = np.random.default_rng(10)
        for trial in range(20):
            n = int(rng.integers(4, 11))
            d = int(rng.integers(1, 4))
            x = rng.standard_normal((n, d))
            y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
            if len(np.unique(y)) < 2:
                y[0] = -y[0]
            c = float(rng.choice([0.5, 1.0, 10.0]))
            model = train_smo(x, y, c=c, tol=1e-8, max_passes=30, seed=trial)
            ours = dual_objective(
                rbf_kernel_matrix(
                    (x - model.feature_means) / model.feature_stds,
                    (x - model.feature_means) / model.feature_stds,
                    model.gamma,
                ),
                y,
                model.alphas,
            )
            _, ref = qp_oracle_svm(x, y, c=c, gamma=model.gamma)
            assert ours == pytest.approx(ref, abs=1e-6), trial

    def test_oracle_never_below_smo(self):
        # The oracle maximizes the same concave dual: its value bounds
        # any feasible SMO iterate from above.
        rng = np.random.default_rng(20)
        for trial in range(10):
            x = rng.standard_normal((8, 2))
            y = np.array([-1.0] * 4 + [1.0] * 4)
            model = train_smo(x, y, c=1.0, tol=1e-4, seed=trial)
            xs = (x - model.feature_means) / model.feature_stds
            ours = dual_objective(rbf_kernel_matrix(xs, xs, model.gamma), y, model.alphas)
            _, ref = qp_oracle_svm(x, y, c=1.0, gamma=model.gamma)
            assert ref >= ours - 1e-6


class TestPredict:
    def _model(self):
        x = np.array([[0.0], [1.0]])
        y = np.array([-1.0, 1.0])
        return train_smo(x, y, c=10.0, gamma=1.0, seed=0)

    def test_far_point_gets_sign_of_bias(self):
        m = self._model()
        far = np.array([1e3])
        assert decision_function(m, far) == pytest.approx(m.bias, abs=1e-12)
        expected = 1 if m.bias >= 0 else -1
        assert predict(m, far) == expected

    def test_zero_decision_breaks_positive(self):
        m = self._model()
        object.__setattr__(m, "bias", 0.0)
        far = np.array([1e3])
        assert decision_function(m, far) == 0.0
        assert predict(m, far) == 1

    def test_duplicate_sv_with_zero_coeff_is_noop(self):
        m = self._model()
        m2 = type(m)(
            support_vectors=np.vstack([m.support_vectors, m.support_vectors[:1]]),
            coeffs=np.concatenate([m.coeffs, [0.0]]),
            bias=m.bias,
            gamma=m.gamma,
            c=m.c,
            feature_means=m.feature_means,
            feature_stds=m.feature_stds,
            alphas=m.alphas,
            labels=m.labels,
            sweeps=m.sweeps,
            converged=m.converged,
        )
        probe = np.linspace(-2, 3, 11)[:, None]
        assert np.allclose(
            decision_function(m, probe), decision_function(m2, probe), atol=1e-15
        )

    def test_dimension_mismatch(self):
        m = self._model()
        with pytest.raises(ValueError, match="dimension"):
            decision_function(m, np.zeros(3))

    def test_batch_and_single_agree(self):
        m = self._model()
        pts = np.array([[-0.5], [0.2], [1.4]])
        batch = decision_function(m, pts)
        singles = [decision_function(m, p) for p in pts]
        assert np.allclose(batch, singles, atol=0)


class TestEvaluateCell:
    def test_same_distribution_near_chance(self):
        rng = np.random.default_rng(0)
        real = rng.standard_normal((200, 2))
        fake = rng.standard_normal((200, 2))
        acc, counts = evaluate_cell(real, fake, seed=1)
        assert 0.35 <= acc <= 0.65
        assert counts.total == 80  # 40 test samples per class

    def test_separated_six_sigma(self):
        rng = np.random.default_rng(1)
        real = rng.standard_normal((200, 2))
        fake = rng.standard_normal((200, 2)) + 6.0
        acc, counts = evaluate_cell(real, fake, seed=2)
        assert acc >= 0.99
        assert counts.fn + counts.fp <= 1

    def test_fake_is_positive_class(self):
        rng = np.random.default_rng(2)
        real = rng.standard_normal((50, 2))
        fake = rng.standard_normal((50, 2)) + 6.0
        _, counts = evaluate_cell(real, fake, seed=0)
        # All fakes land in tp+fn, all reals in tn+fp.
        assert counts.tp + counts.fn == 10
        assert counts.tn + counts.fp == 10
        assert counts.tp >= 9  # separable: fakes predicted positive

    def test_deterministic_across_runs(self):
        rng = np.random.default_rng(3)
        real = rng.standard_normal((60, 3))
        fake = rng.standard_normal((60, 3)) + 0.8
        a1 = evaluate_cell(real, fake, seed=11)
        a2 = evaluate_cell(real, fake, seed=11)
        assert a1 == a2

    def test_imbalanced_input_downsampled(self):
        rng = np.random.default_rng(4)
        real = rng.standard_normal((90, 2))
        fake = rng.standard_normal((30, 2)) + 6.0
        acc, counts = evaluate_cell(real, fake, seed=5)
        assert counts.total == 12  # 6 per class at ratio 0.8 on m=30
        assert acc >= 0.9


class TestDumpModel:
    def test_json_fields(self, tmp_path):
        import json

        x = np.array([[0.0], [1.0]])
        y = np.array([-1.0, 1.0])
        m = train_smo(x, y, c=10.0, gamma=1.0, seed=0)
        p = tmp_path / "model.json"
        dump_model(m, p)
        data = json.loads(p.read_text())
        assert set(data) == {
            "gamma",
            "C",
            "bias",
            "feature_means",
            "feature_stds",
            "coeffs",
            "support_vectors",
        }
        assert data["gamma"] == 1.0
        assert len(data["coeffs"]) == len(data["support_vectors"])
