import numpy as np
import pytest

from funcroc import (
    Curve,
    DegenerateDirectionError,
    FunctionalSample,
    Group,
    InsufficientSampleError,
    IntegralIndex,
    LinearIndex,
    MaxIndex,
    MinIndex,
    PenaltySpec,
    ProcessSpec,
    QuadraticIndex,
    ScenarioSpec,
    apply_index,
    auc,
    eigendecompose,
    fit_mean_difference,
    fit_optimal_linear,
    fit_quadratic,
    generate_scenario,
    index_scores,
    inner_product,
    make_uniform_grid,
    norm,
    project_scores,
    quadratic_population,
    sample_covariance,
    sample_gaussian,
    score_sample,
    second_difference_penalty,
)


def fourier_sample(rng, n, grid, mean_coefs, coef_sd, group):
    """Curves with independent normal coordinates in an orthonormal basis."""
    k = len(mean_coefs)
    basis = np.column_stack(
        [np.sqrt(2.0) * np.sin((2 * ell - 1) * np.pi * grid.points / 2) for ell in range(1, k + 1)]
    )
    coefs = mean_coefs + rng.standard_normal((n, k)) * coef_sd
    return FunctionalSample(grid, coefs @ basis.T, group), basis


class TestApplyIndex:
    def test_max_and_min(self):
        grid = make_uniform_grid(3)
        x = Curve(grid, [0.1, 0.5, 0.2])
        assert apply_index(MaxIndex(), x) == 0.5
        assert apply_index(MinIndex(), x) == pytest.approx(0.1)

    def test_integral_is_weighted_sum(self):
        grid = make_uniform_grid(100)
        x = Curve(grid, np.ones(100))
        assert apply_index(IntegralIndex(), x) == pytest.approx(grid.span)

    def test_self_projection_returns_norm(self):
        rng = np.random.default_rng(0)
        grid = make_uniform_grid(30)
        x = Curve(grid, rng.standard_normal(30))
        beta = Curve(grid, x.values / norm(x))
        assert apply_index(LinearIndex(beta), x) == pytest.approx(norm(x))

    def test_zero_quadratic_part_is_pure_linear(self):
        rng = np.random.default_rng(1)
        s = sample_gaussian(ProcessSpec.brownian(), make_uniform_grid(40), 30, rng)
        basis = eigendecompose(sample_covariance(s), 3)
        alpha = np.array([1.0, -2.0, 0.5])
        idx = QuadraticIndex(basis=basis, k=3, lambda_mat=np.zeros((3, 3)), alpha_vec=alpha)
        scores = project_scores(s, basis, 3)
        assert np.allclose(index_scores(idx, s), 2.0 * scores @ alpha)


class TestFitMeanDifference:
    def test_direction_is_normalized_mean_gap(self):
        grid = make_uniform_grid(50)
        shape = np.sin(np.pi * grid.points)
        d = FunctionalSample(grid, np.vstack([2 * shape, 2 * shape]), Group.DISEASED)
        h = FunctionalSample(grid, np.zeros((2, 50)), Group.HEALTHY)
        idx = fit_mean_difference(d, h)
        expected = shape / np.sqrt(np.sum(grid.weights * shape**2))
        assert np.allclose(idx.beta.values, expected, atol=1e-12)
        assert norm(idx.beta) == pytest.approx(1.0, abs=1e-8)

    def test_swapping_groups_negates_the_direction(self):
        spec = ScenarioSpec(name="P1", n_d=40, n_h=40, seed=5, rho=1.0)
        d, h = generate_scenario(spec)
        forward = fit_mean_difference(d, h)
        backward = fit_mean_difference(h, d)
        assert np.allclose(forward.beta.values, -backward.beta.values, atol=1e-12)

    def test_identical_samples_are_degenerate(self):
        spec = ScenarioSpec(name="P1", n_d=10, n_h=10, seed=6, rho=1.0)
        d, _ = generate_scenario(spec)
        with pytest.raises(DegenerateDirectionError):
            fit_mean_difference(d, d)

    def test_reaches_published_accuracy_on_shifted_brownian(self):
        spec = ScenarioSpec(name="P1", n_d=300, n_h=300, seed=7, rho=1.0)
        d, h = generate_scenario(spec)
        value = auc(score_sample(fit_mean_difference(d, h), d, h))
        assert value == pytest.approx(0.9653, abs=0.03)


class TestFitOptimalLinear:
    def test_recovers_population_direction_under_identity_scores(self):
        # five-mode model with equal coordinate variances: the optimal
        # direction is the mean difference itself
        rng = np.random.default_rng(8)
        grid = make_uniform_grid(120)
        mean_gap = np.array([0.8, -0.5, 0.3, 0.2, -0.4])
        d, basis = fourier_sample(rng, 5000, grid, mean_gap, 1.0, Group.DISEASED)
        h, _ = fourier_sample(rng, 5000, grid, np.zeros(5), 1.0, Group.HEALTHY)
        idx = fit_optimal_linear(d, h, var_fraction=0.999)
        target = basis @ mean_gap
        target = target / np.sqrt(np.sum(grid.weights * target**2))
        cosine = float(np.sum(grid.weights * idx.beta.values * target))
        assert np.degrees(np.arccos(np.clip(abs(cosine), 0, 1))) < 5.0

    def test_identical_samples_are_degenerate(self):
        spec = ScenarioSpec(name="P1", n_d=20, n_h=20, seed=9, rho=1.0)
        d, _ = generate_scenario(spec)
        with pytest.raises(DegenerateDirectionError):
            fit_optimal_linear(d, d)

    def test_reaches_published_accuracy_on_shifted_brownian(self):
        spec = ScenarioSpec(name="P1", n_d=300, n_h=300, seed=10, rho=1.0)
        d, h = generate_scenario(spec)
        value = auc(score_sample(fit_optimal_linear(d, h), d, h))
        assert value == pytest.approx(0.9892, abs=0.01)

    def test_unit_norm_and_orientation(self):
        spec = ScenarioSpec(name="P1", n_d=60, n_h=60, seed=11, rho=2.0)
        d, h = generate_scenario(spec)
        idx = fit_optimal_linear(d, h)
        assert norm(idx.beta) == pytest.approx(1.0, abs=1e-8)
        gap = Curve(d.grid, d.values.mean(axis=0) - h.values.mean(axis=0))
        assert inner_product(idx.beta, gap) >= 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_objective_beats_random_directions_in_the_same_span(self, seed):
        rng = np.random.default_rng(700 + seed)
        spec = ScenarioSpec(name="P1", n_d=80, n_h=80, seed=int(seed), rho=1.0, grid_size=60)
        d, h = generate_scenario(spec)
        idx = fit_optimal_linear(d, h, mode="average", var_fraction=0.95)

        from funcroc import choose_dimension, combine_covariances

        cov_d, cov_h = sample_covariance(d), sample_covariance(h)
        pooled = combine_covariances(cov_d, cov_h, "pooled", n_a=d.n, n_b=h.n)
        average = combine_covariances(cov_d, cov_h, "average")
        basis = eigendecompose(pooled, len(d.grid))
        k = choose_dimension(basis, 0.95)
        grid = d.grid
        gap = d.values.mean(axis=0) - h.values.mean(axis=0)

        def objective(beta_values):
            numer = float(np.sum(grid.weights * beta_values * gap))
            smooth = average.matrix @ (grid.weights * beta_values)
            denom = float(np.sum(grid.weights * beta_values * smooth))
            return numer / np.sqrt(denom)

        best = objective(idx.beta.values)
        for _ in range(100):
            coefs = rng.standard_normal(k)
            candidate = basis.eigenfunctions[:, :k] @ coefs
            candidate /= np.sqrt(np.sum(grid.weights * candidate**2))
            assert objective(candidate) <= best + 1e-10

    def test_pooled_mode_reduces_to_eigenvalue_rescaling(self):
        spec = ScenarioSpec(name="P1", n_d=100, n_h=100, seed=13, rho=1.0, grid_size=50)
        d, h = generate_scenario(spec)
        idx = fit_optimal_linear(d, h, mode="pooled", var_fraction=0.95)

        from funcroc import choose_dimension, combine_covariances

        pooled = combine_covariances(
            sample_covariance(d), sample_covariance(h), "pooled", n_a=d.n, n_b=h.n
        )
        basis = eigendecompose(pooled, len(d.grid))
        k = choose_dimension(basis, 0.95)
        gap = d.values.mean(axis=0) - h.values.mean(axis=0)
        delta = basis.eigenfunctions[:, :k].T @ (d.grid.weights * gap)
        direct = basis.eigenfunctions[:, :k] @ (delta / basis.eigenvalues[:k])
        direct /= np.sqrt(np.sum(d.grid.weights * direct**2))
        assert np.allclose(idx.beta.values, direct, atol=1e-8)

    def test_penalty_shrinks_toward_smooth_directions(self):
        spec = ScenarioSpec(name="P1", n_d=80, n_h=80, seed=14, rho=1.0, grid_size=60)
        d, h = generate_scenario(spec)
        plain = fit_optimal_linear(d, h)
        damped = fit_optimal_linear(d, h, penalty=PenaltySpec(lam=1e-3))
        grid = d.grid

        def roughness(values):
            first = np.gradient(values, grid.points)
            second = np.gradient(first, grid.points)
            return float(np.sum(grid.weights * second**2))

        assert roughness(damped.beta.values) < roughness(plain.beta.values)

    def test_penalty_matrix_dimension_mismatch_raises(self):
        spec = ScenarioSpec(name="P1", n_d=40, n_h=40, seed=15, rho=1.0, grid_size=40)
        d, h = generate_scenario(spec)
        with pytest.raises(ValueError):
            fit_optimal_linear(d, h, penalty=PenaltySpec(lam=0.1, matrix=np.eye(2)))

    def test_second_difference_penalty_is_psd(self):
        spec = ScenarioSpec(name="P1", n_d=40, n_h=40, seed=16, rho=1.0, grid_size=40)
        d, h = generate_scenario(spec)
        basis = eigendecompose(sample_covariance(d), 6)
        penalty = second_difference_penalty(basis, 6)
        assert np.allclose(penalty, penalty.T)
        assert np.linalg.eigvalsh(penalty).min() >= -1e-10


class TestScaleInvarianceOfRanking:
    @pytest.mark.parametrize("c", [0.5, 3.0, 17.0])
    def test_positive_rescaling_preserves_roc_and_auc(self, c):
        spec = ScenarioSpec(name="P1", n_d=50, n_h=50, seed=17, rho=1.0, grid_size=40)
        d, h = generate_scenario(spec)
        idx = fit_optimal_linear(d, h)
        scaled = LinearIndex(Curve(d.grid, c * idx.beta.values))
        base = score_sample(idx, d, h)
        moved = score_sample(scaled, d, h)
        assert np.array_equal(np.argsort(moved.diseased), np.argsort(base.diseased))
        assert auc(base) == auc(moved)

        from funcroc import roc_curve

        assert np.array_equal(roc_curve(base).roc_values, roc_curve(moved).roc_values)


class TestFitQuadratic:
    def test_null_case_collapses_to_coin_flip(self):
        rng = np.random.default_rng(18)
        grid = make_uniform_grid(60)
        d = sample_gaussian(ProcessSpec.brownian(), grid, 2000, rng, Group.DISEASED)
        h = sample_gaussian(ProcessSpec.brownian(), grid, 2000, rng, Group.HEALTHY)
        idx = fit_quadratic(d, h)
        assert auc(score_sample(idx, d, h)) == pytest.approx(0.5, abs=0.03)

    def test_same_scores_give_exactly_zero_quadratic_part(self):
        spec = ScenarioSpec(name="P1", n_d=50, n_h=50, seed=19, rho=1.0, grid_size=40)
        d, _ = generate_scenario(spec)
        idx = fit_quadratic(d, d)
        assert np.all(idx.lambda_mat == 0.0)
        assert np.all(idx.alpha_vec == 0.0)

    def test_reaches_published_accuracy_on_mode_swapped_model(self):
        spec = ScenarioSpec(name="C20", n_d=300, n_h=300, seed=20)
        d, h = generate_scenario(spec)
        value = auc(score_sample(fit_quadratic(d, h), d, h))
        assert value == pytest.approx(0.9090, abs=0.04)

    def test_perfect_rule_when_covariances_differ_at_origin(self):
        spec = ScenarioSpec(name="D20", n_d=300, n_h=300, seed=21)
        d, h = generate_scenario(spec)
        value = auc(score_sample(fit_quadratic(d, h), d, h))
        assert value >= 0.999

    def test_insufficient_group_size_is_reported(self):
        spec = ScenarioSpec(name="D20", n_d=4, n_h=300, seed=22)
        d, h = generate_scenario(spec)
        with pytest.raises(InsufficientSampleError, match="diseased"):
            fit_quadratic(d, h)

    def test_ridge_rescues_singular_scores(self):
        # duplicated curves make the score covariance singular
        grid = make_uniform_grid(30)
        rng = np.random.default_rng(23)
        base = sample_gaussian(ProcessSpec.brownian(), grid, 40, rng, Group.DISEASED)
        dup = FunctionalSample(grid, np.vstack([base.values[:2]] * 20), Group.DISEASED)
        h = sample_gaussian(ProcessSpec.brownian(), grid, 40, rng, Group.HEALTHY)

        from funcroc import SingularCovarianceError

        with pytest.raises(SingularCovarianceError) as excinfo:
            fit_quadratic(dup, h, var_fraction=0.95, ridge=0.0)
        assert excinfo.value.group == "diseased"
        idx = fit_quadratic(dup, h, var_fraction=0.95, ridge=1e-6)
        assert np.all(np.isfinite(idx.lambda_mat))


class TestQuadraticPopulation:
    def test_equal_covariances_zero_out_the_quadratic_term(self):
        sigma = np.array([[2.0, 0.3], [0.3, 1.0]])
        lam, alpha = quadratic_population(
            np.array([1.0, 0.0]), np.array([0.0, 0.0]), sigma, sigma
        )
        assert np.all(lam == 0.0)
        assert np.allclose(alpha, np.linalg.solve(sigma, [1.0, 0.0]))

    def test_diagonal_closed_form(self):
        lam_d = np.array([2.0, 0.3])
        lam_h = np.array([0.405, 0.045])
        lam, alpha = quadratic_population(
            np.zeros(2), np.zeros(2), np.diag(lam_d), np.diag(lam_h)
        )
        expected = (lam_h - lam_d) / (lam_d * lam_h)  # independent arithmetic
        assert np.allclose(np.diag(lam), expected, atol=1e-12)
        assert np.allclose(lam - np.diag(np.diag(lam)), 0.0)
        assert np.all(alpha == 0.0)

    def test_non_spd_input_rejected(self):
        with pytest.raises(ValueError):
            quadratic_population(
                np.zeros(2), np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2)
            )

    @pytest.mark.parametrize("seed", range(4))
    def test_projected_decomposition_identity(self, seed):
        # -x' L x + 2 a' x recomposes from the two weighted square norms
        # plus the projected linear part, for finite-rank diagonal models
        rng = np.random.default_rng(800 + seed)
        k = 5
        lam_d = rng.uniform(0.2, 3.0, k)
        lam_h = rng.uniform(0.2, 3.0, k)
        mu_d = rng.standard_normal(k) * lam_d  # keeps mu inside the operator range
        mu_h = rng.standard_normal(k) * lam_h
        lam, alpha = quadratic_population(mu_d, mu_h, np.diag(lam_d), np.diag(lam_h))
        alpha0 = mu_d / lam_d - mu_h / lam_h
        for _ in range(5):
            x = rng.standard_normal(k)
            direct = -x @ lam @ x + 2.0 * alpha @ x
            split = -(
                np.sum((x / np.sqrt(lam_d)) ** 2) - np.sum((x / np.sqrt(lam_h)) ** 2)
            ) + 2.0 * float(alpha0 @ x)
            assert direct == pytest.approx(split, abs=1e-10)


class TestGroupSwapAntisymmetry:
    def test_linear_auc_complements_under_swap(self):
        spec = ScenarioSpec(name="P1", n_d=40, n_h=40, seed=24, rho=1.0, grid_size=30)
        d, h = generate_scenario(spec)
        idx = fit_mean_difference(d, h)
        forward = auc(score_sample(idx, d, h))
        backward = auc(score_sample(idx, h, d))
        assert forward + backward == 1.0
