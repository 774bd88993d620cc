mod common;

use common::{random_pd, rel_diff, rng, tiny_instance};
use ggm_core::solvers::{
    ggl_objective, joint_objective, reference_oracle, solve_ggl, solve_gl, solve_joint_hidden,
    solve_lvgl, AdmissibleSet, OracleProblem, OracleStart,
};
use ggm_core::{Error, ObservedCovariances, PairWeights, PenaltyWeights, SolverConfig, SymMatrix};

fn covs(mats: Vec<SymMatrix>) -> ObservedCovariances {
    ObservedCovariances::from_matrices(mats).unwrap()
}

/// Term-by-term evaluation written independently of the library objective.
fn objective_by_hand(
    s: &[SymMatrix],
    p: &[SymMatrix],
    c: &[SymMatrix],
    rho: f64,
    beta: f64,
    rp: f64,
    bp: f64,
) -> f64 {
    let mut f = 0.0;
    for k in 0..s.len() {
        let r = s[k].as_matrix() - p[k].as_matrix();
        let chol = r.clone().cholesky().unwrap();
        let logdet: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        f += (&r * c[k].as_matrix()).trace() - logdet;
        let n = r.nrows();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    f += rho * s[k].get(i, j).abs();
                }
            }
        }
        f += beta * p[k].trace();
    }
    for a in 0..s.len() {
        for b in (a + 1)..s.len() {
            let ds = s[a].as_matrix() - s[b].as_matrix();
            let n = ds.nrows();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        f += rp * ds[(i, j)].abs();
                    }
                }
            }
            f += bp * (p[a].as_matrix() - p[b].as_matrix()).abs().sum();
        }
    }
    f
}

#[test]
fn objective_examples() {
    let c = covs(vec![SymMatrix::identity(2)]);
    let w = PenaltyWeights::tied(1, 0.0, 0.0, 0.0, 0.0).unwrap();
    let f = joint_objective(
        &[SymMatrix::identity(2)],
        &[SymMatrix::zeros(2)],
        &c,
        &w,
        false,
    );
    assert!((f - 2.0).abs() < 1e-14);

    let mut r = rng(31);
    let cm = random_pd(3, 0.5, &mut r);
    let s = random_pd(3, 1.0, &mut r);
    let p = random_pd(3, 0.0, &mut r).scale(0.1);
    let c2 = covs(vec![cm.clone(), cm.clone()]);
    let w0 = PenaltyWeights::tied(2, 0.3, 0.2, 0.0, 0.0).unwrap();
    let w1 = PenaltyWeights::tied(2, 0.3, 0.2, 5.0, 7.0).unwrap();
    let f0 = joint_objective(
        &[s.clone(), s.clone()],
        &[p.clone(), p.clone()],
        &c2,
        &w0,
        false,
    );
    let f1 = joint_objective(
        &[s.clone(), s.clone()],
        &[p.clone(), p.clone()],
        &c2,
        &w1,
        false,
    );
    assert_eq!(f0, f1);

    let s2 = random_pd(3, 1.0, &mut r);
    let got = joint_objective(
        &[s.clone(), s2.clone()],
        &[p.clone(), p.clone()],
        &c2,
        &w1,
        false,
    );
    let want = objective_by_hand(
        &[s, s2],
        &[p.clone(), p],
        &[cm.clone(), cm],
        0.3,
        0.2,
        5.0,
        7.0,
    );
    assert!(rel_diff(got, want) < 1e-12, "{got} vs {want}");

    let bad = joint_objective(
        &[SymMatrix::identity(2)],
        &[SymMatrix::identity(2).scale(2.0)],
        &c,
        &w,
        false,
    );
    assert_eq!(bad, f64::INFINITY);
}

#[test]
fn joint_identity_covariance_recovers_identity() {
    let c = covs(vec![SymMatrix::identity(4)]);
    let w = PenaltyWeights::tied(1, 0.0, 1e3, 0.0, 0.0).unwrap();
    let est = solve_joint_hidden(&c, &w, &SolverConfig::default()).unwrap();
    assert!(est.s_hat[0].max_abs_diff(&SymMatrix::identity(4)) < 1e-3);
    assert!(est.p_hat[0].max_abs_diff(&SymMatrix::zeros(4)) < 1e-3);
}

#[test]
fn joint_fusion_limit_gives_identical_layers() {
    let mut r = rng(32);
    let c = random_pd(4, 0.3, &mut r);
    let cv = covs(vec![c.clone(), c]);
    let w = PenaltyWeights::tied(2, 0.05, 0.1, 1e3, 1e3).unwrap();
    let est = solve_joint_hidden(&cv, &w, &SolverConfig::tight(1e-9, 20_000)).unwrap();
    assert!(est.s_hat[0].max_abs_diff(&est.s_hat[1]) < 1e-6);
    assert!(est.p_hat[0].max_abs_diff(&est.p_hat[1]) < 1e-6);
}

#[test]
fn joint_estimate_invariants() {
    for seed in 0..5 {
        let c = tiny_instance(5, 3, 100, seed);
        let w = PenaltyWeights::tied(3, 0.05, 0.2, 0.03, 0.1).unwrap();
        let cfg = SolverConfig::default();
        let est = solve_joint_hidden(&c, &w, &cfg).unwrap();
        assert!(est.converged);
        assert_eq!(est.residual_history.len(), est.iterations);
        for (s, p) in est.s_hat.iter().zip(&est.p_hat) {
            assert!(p.min_eigenvalue().unwrap() >= -1e-8);
            assert!((s - p).min_eigenvalue().unwrap() >= cfg.pd_floor / 2.0);
            for m in [s, p] {
                let a = m.as_matrix();
                assert!((a - a.transpose()).amax() <= 1e-12);
            }
        }
        let recomputed = joint_objective(&est.s_hat, &est.p_hat, &c, &w, false);
        assert!(rel_diff(est.objective, recomputed) <= 1e-9);

        let again = solve_joint_hidden(&c, &w, &cfg).unwrap();
        for (a, b) in est.s_hat.iter().zip(&again.s_hat) {
            assert_eq!(a, b);
        }
        assert_eq!(est.objective.to_bits(), again.objective.to_bits());

        let longer = SolverConfig {
            max_iters: 2 * est.iterations,
            tol_primal: 1e-12,
            tol_dual: 1e-12,
            ..cfg.clone()
        };
        let short = SolverConfig {
            max_iters: est.iterations,
            tol_primal: 1e-12,
            tol_dual: 1e-12,
            ..cfg.clone()
        };
        let f_short = solve_joint_hidden(&c, &w, &short).unwrap().objective;
        let f_long = solve_joint_hidden(&c, &w, &longer).unwrap().objective;
        assert!(f_long <= f_short + cfg.tol_primal);
    }
}

#[test]
fn nonpositive_offdiag_set_is_respected() {
    let c = tiny_instance(4, 2, 50, 3);
    let w = PenaltyWeights::tied(2, 0.01, 0.2, 0.01, 0.1).unwrap();
    let cfg = SolverConfig {
        admissible_set: AdmissibleSet::NonpositiveOffdiag,
        ..SolverConfig::default()
    };
    let est = solve_joint_hidden(&c, &w, &cfg).unwrap();
    for s in &est.s_hat {
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(s.get(i, j) <= 0.0);
                }
            }
        }
    }
}

#[test]
fn gl_examples() {
    let cov = SymMatrix::from_diagonal(&[0.5, 2.0, 4.0]);
    let s = solve_gl(&cov, 0.3, &SolverConfig::tight(1e-10, 10_000)).unwrap();
    assert!(s.max_abs_diff(&SymMatrix::from_diagonal(&[2.0, 0.5, 0.25])) < 1e-6);

    let mut r = rng(33);
    let cov = random_pd(5, 0.2, &mut r);
    let s = solve_gl(&cov, 1e3, &SolverConfig::default()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            if i != j {
                assert_eq!(s.get(i, j), 0.0);
            }
        }
    }
}

#[test]
fn reduction_identities() {
    let tight = SolverConfig::tight(1e-10, 50_000);
    for seed in 0..4 {
        let c = tiny_instance(5, 2, 80, 100 + seed);
        let single = c.layer(0);
        let cov = &c.covs()[0];

        // K = 1 joint is LVGL
        let w = PenaltyWeights::tied(1, 0.05, 0.3, 0.0, 0.0).unwrap();
        let joint = solve_joint_hidden(&single, &w, &tight).unwrap();
        let (s, p) = solve_lvgl(cov, 0.05, 0.3, &tight).unwrap();
        let lv = joint_objective(&[s], &[p], &single, &w, false);
        assert!(rel_diff(joint.objective, lv) <= 1e-6);

        // huge beta: LVGL is GL
        let (s, p) = solve_lvgl(cov, 0.05, 1e6, &tight).unwrap();
        assert!(p.as_matrix().amax() <= 1e-4);
        let gl = solve_gl(cov, 0.05, &tight).unwrap();
        assert!((s.as_matrix() - gl.as_matrix()).norm() <= 1e-3);

        // no group term: GGL is K separate GLs
        let ggl = solve_ggl(&c, 0.05, 0.0, &tight).unwrap();
        for (k, est) in ggl.s_hat.iter().enumerate() {
            let gl = solve_gl(&c.covs()[k], 0.05, &tight).unwrap();
            assert!(est.max_abs_diff(&gl) <= 1e-6 * gl.as_matrix().amax());
        }
    }
}

#[test]
fn ggl_group_limit_gives_identical_layers() {
    let mut r = rng(34);
    let c = random_pd(4, 0.3, &mut r);
    let cv = covs(vec![c.clone(), c]);
    let est = solve_ggl(&cv, 0.02, 10.0, &SolverConfig::default()).unwrap();
    assert!(est.s_hat[0].max_abs_diff(&est.s_hat[1]) < 1e-9);
    assert!(
        rel_diff(
            est.objective,
            ggl_objective(&est.s_hat, &cv, 0.02, 10.0, false)
        ) <= 1e-9
    );
}

#[test]
fn input_errors() {
    let c = covs(vec![SymMatrix::identity(3)]);
    let w2 = PenaltyWeights::tied(2, 0.1, 0.1, 0.1, 0.1).unwrap();
    assert!(matches!(
        solve_joint_hidden(&c, &w2, &SolverConfig::default()),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        ObservedCovariances::from_matrices(vec![SymMatrix::identity(3), SymMatrix::identity(2)]),
        Err(Error::InvalidInput(_))
    ));
    assert!(PenaltyWeights::new(
        vec![0.1],
        vec![-0.1],
        PairWeights::zeros(1),
        PairWeights::zeros(1)
    )
    .is_err());
    let bad_cfg = SolverConfig {
        max_iters: 0,
        ..SolverConfig::default()
    };
    assert!(solve_ggl(&c, 0.1, 0.0, &bad_cfg).is_err());
}

#[test]
fn oracle_recovers_unpenalized_optimum() {
    let mut r = rng(35);
    let cov = random_pd(3, 0.5, &mut r);
    let problem = OracleProblem::Ggl {
        covs: covs(vec![cov.clone()]),
        lambda1: 0.0,
        lambda2: 0.0,
        penalize_diagonal: false,
    };
    let sol = reference_oracle(&problem, 100_000, OracleStart::default()).unwrap();
    assert!(sol.s[0].max_abs_diff(&cov.inverse_pd().unwrap()) < 1e-3);
}

#[test]
fn oracle_is_start_independent_and_feasible() {
    let c = tiny_instance(4, 2, 60, 7);
    let problem = OracleProblem::JointHidden {
        covs: c,
        weights: PenaltyWeights::tied(2, 0.05, 0.2, 0.05, 0.1).unwrap(),
        penalize_diagonal: false,
    };
    let a = reference_oracle(&problem, 50_000, OracleStart { scale: 1.0 }).unwrap();
    let b = reference_oracle(&problem, 50_000, OracleStart { scale: 3.0 }).unwrap();
    assert!(rel_diff(a.objective, b.objective) <= 2e-3);
    for sol in [&a, &b] {
        for (s, p) in sol.s.iter().zip(&sol.p) {
            assert!(p.min_eigenvalue().unwrap() >= -1e-10);
            assert!((s - p).min_eigenvalue().unwrap() > 0.0);
        }
        assert!(sol.objective.is_finite());
    }
}

#[test]
fn oracle_rejects_large_problems() {
    let mut r = rng(36);
    let problem = OracleProblem::lvgl(random_pd(6, 0.5, &mut r), 0.1, 0.1).unwrap();
    assert!(matches!(
        reference_oracle(&problem, 10, OracleStart::default()),
        Err(Error::InvalidInput(_))
    ));
}
