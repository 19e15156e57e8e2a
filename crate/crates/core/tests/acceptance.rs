//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test -p dpp-core --test acceptance -- --nocapture`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpp_core::barriers;
use dpp_core::domain::{build_grid, DiscreteDomain, Shape};
use dpp_core::operators::OperatorSpec;
use dpp_core::parabolic::{
    column_is_decreasing, consistency_table, Nonlinearity, TestFunction,
};
use dpp_core::solver::{self, SolveOptions};
use dpp_core::verify;
use dpp_core::ScalarField;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Hop counts over the strict-ball graph, recomputed from coordinates.
fn bfs_hops(domain: &DiscreteDomain) -> Vec<usize> {
    let n = domain.len();
    let eps2 = domain.epsilon() * domain.epsilon() * (1.0 - 1e-9);
    let mut adj = vec![Vec::new(); n];
    for (i, row) in adj.iter_mut().enumerate() {
        for j in 0..n {
            let (p, q) = (domain.point(i), domain.point(j));
            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
            if i != j && d2 < eps2 {
                row.push(j);
            }
        }
    }
    let mut hops = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &b in domain.boundary_indices() {
        hops[b as usize] = 0;
        queue.push_back(b as usize);
    }
    while let Some(j) = queue.pop_front() {
        for &i in &adj[j] {
            if domain.is_interior(i) && hops[i] == usize::MAX {
                hops[i] = hops[j] + 1;
                queue.push_back(i);
            }
        }
    }
    hops
}

#[test]
fn criterion_1_mcf_barrier_identity() {
    // Disk with partition radius R = 0.2, K = 8 annuli at eps = 0.05: the
    // domain occupies |x| < 0.1 and the collar band extends to R.
    let eps = 0.05;
    let h = 0.01;
    let domain = build_grid(Shape::Disk { radius: 0.1 }, h, eps, 0.1).unwrap();
    let annuli = domain.annular_partition().unwrap();
    assert_eq!(annuli.count(), 8);
    let v = barriers::mcf_barrier(&domain, &annuli);
    let spec = OperatorSpec::mean_curvature(ScalarField::zeros(domain.len()), 16);
    let tv = spec.apply(&domain, &v).unwrap();

    let mut checked = 0;
    for &i in domain.interior_indices() {
        let p = domain.point(i as usize);
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if r + SQRT_2 * eps < 0.1 {
            let err = (tv[i as usize] - (v[i as usize] - eps * eps)).abs();
            assert!(err <= 1e-12, "identity off by {err:.3e} at {p:?}");
            checked += 1;
        }
    }
    assert!(checked > 0, "no interior point clears the collar");

    let (sigma, witness) = verify::strict_slack(&domain, &spec, &v).unwrap();
    assert!(
        sigma >= eps * eps - 1e-12,
        "strict slack {sigma:.6e} < eps^2 at point {witness}"
    );
    println!(
        "acceptance 1: curvature barrier identity exact at {checked} points, slack {sigma:.6e}: PASS"
    );
}

#[test]
fn criterion_2_eikonal_bfs_equivalence() {
    for (label, shape) in [
        ("1-d", Shape::Interval { a: 0.0, b: 1.0 }),
        ("2-d", Shape::Rectangle { min: [0.0, 0.0], max: [1.0, 1.0] }),
    ] {
        let domain = build_grid(shape, 0.05, 0.25, 0.25).unwrap();
        let spec = OperatorSpec::eikonal(ScalarField::constant(domain.len(), 1.0));
        let (u, report) = solver::perron_solve_from_below(
            &domain,
            &spec,
            &ScalarField::zeros(domain.len()),
            SolveOptions::with_tolerance(1e-10),
        )
        .unwrap();
        let hops = bfs_hops(&domain);
        let mut worst = 0.0f64;
        for i in 0..domain.len() {
            worst = worst.max((u[i] - 0.25 * hops[i] as f64).abs());
        }
        assert!(worst <= 1e-10, "{label}: max deviation {worst:.3e}");
        let max_hops = *hops.iter().filter(|&&h| h != usize::MAX).max().unwrap();
        assert_eq!(max_hops, domain.validate_chain_reachability().unwrap());
        assert_eq!(report.iterations, max_hops + 1, "{label}");
        println!(
            "acceptance 2 ({label}): BFS equivalence, deviation {worst:.2e}, iterations {} = max_hops + 1: PASS",
            report.iterations
        );
    }
}

#[test]
fn criterion_3_tow_small_instance_and_max_principle() {
    // Three-point instance: interior 0.5 sees exactly {0, 0.5, 1}.
    let domain = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.5, 0.6, 0.6).unwrap();
    let g = domain.extend_boundary_values(|p| p[0].clamp(0.0, 1.0)).unwrap();
    let spec = OperatorSpec::tug_of_war(g);
    let seed = barriers::constant_subsolution(&domain, &spec);
    let (u, _) =
        solver::perron_solve_from_below(&domain, &spec, &seed, SolveOptions::with_tolerance(1e-13))
            .unwrap();
    for i in 0..domain.len() {
        let x = domain.point(i)[0];
        let want = x.clamp(0.0, 1.0);
        assert!((u[i] - want).abs() <= 1e-12, "value at {x}");
    }

    let grid = build_grid(Shape::Rectangle { min: [0.0, 0.0], max: [1.0, 1.0] }, 0.1, 0.25, 0.25)
        .unwrap();
    for seed_id in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_id);
        let g = ScalarField::from_fn(grid.len(), |i| {
            if grid.is_interior(i) {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            }
        });
        let spec = OperatorSpec::tug_of_war(g.clone());
        let start = barriers::constant_subsolution(&grid, &spec);
        let (u, _) = solver::perron_solve_from_below(
            &grid,
            &spec,
            &start,
            SolveOptions::with_tolerance(1e-10),
        )
        .unwrap();
        let gmax = grid.boundary_indices().iter().map(|&b| g[b as usize]).fold(f64::MIN, f64::max);
        let gmin = grid.boundary_indices().iter().map(|&b| g[b as usize]).fold(f64::MAX, f64::min);
        assert!(u.max() <= gmax + 1e-9 && u.min() >= gmin - 1e-9, "seed {seed_id}");
    }
    println!("acceptance 3: three-point value (0, 0.5, 1) and 20 random max principles: PASS");
}

#[test]
fn criterion_4_biased_two_sided_agreement() {
    // h = 1/21 keeps every interior point away from layer edges, so the
    // exponential barrier seeds the descent.
    let domain =
        build_grid(Shape::Rectangle { min: [0.0, 0.0], max: [1.0, 1.0] }, 1.0 / 21.0, 0.1, 0.1)
            .unwrap();
    let g = domain.extend_boundary_values(|p| p[0] - 0.5 * p[1]).unwrap();
    for drift in [0.0, 1.0] {
        let spec = OperatorSpec::biased_tug_of_war(
            g.clone(),
            Some(ScalarField::constant(domain.len(), 1.0)),
            drift,
        );
        let (gap, _) = verify::check_two_sided_gap(&domain, &spec, 1e-13).unwrap();
        assert!(gap <= 1e-9, "drift {drift}: gap {gap:.3e}");
        println!("acceptance 4 (c = {drift}): two-sided gap {gap:.3e} <= 1e-9: PASS");
    }
}

struct MatrixEntry {
    domain: DiscreteDomain,
    spec: OperatorSpec,
}

/// One well-posed instance per stationary operator kind.
fn operator_matrix() -> Vec<MatrixEntry> {
    let interval = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.1, 0.25, 0.25).unwrap();
    let g_ramp = interval.extend_boundary_values(|p| p[0]).unwrap();
    let disk_wide = build_grid(Shape::Disk { radius: 0.4 }, 0.08, 0.25, 0.5).unwrap();
    let disk_mcf = build_grid(Shape::Disk { radius: 0.3 }, 0.05, 0.2, 0.3).unwrap();
    vec![
        MatrixEntry { domain: interval.clone(), spec: OperatorSpec::tug_of_war(g_ramp.clone()) },
        MatrixEntry {
            domain: interval.clone(),
            spec: OperatorSpec::biased_tug_of_war(
                g_ramp.clone(),
                Some(ScalarField::constant(interval.len(), 1.0)),
                1.0,
            ),
        },
        MatrixEntry {
            domain: interval.clone(),
            spec: OperatorSpec::eikonal(ScalarField::constant(interval.len(), 1.0)),
        },
        MatrixEntry {
            domain: disk_wide.clone(),
            spec: OperatorSpec::mean_value(ScalarField::zeros(disk_wide.len()), 7.0),
        },
        MatrixEntry {
            domain: disk_mcf.clone(),
            spec: OperatorSpec::mean_curvature(ScalarField::zeros(disk_mcf.len()), 16),
        },
        MatrixEntry {
            domain: disk_wide.clone(),
            spec: OperatorSpec::peres_sheffield(ScalarField::zeros(disk_wide.len()), 10.0),
        },
    ]
}

#[test]
fn criterion_5_axiom_matrix() {
    for entry in operator_matrix() {
        let record = verify::check_monotonicity(&entry.domain, &entry.spec, 100, 42).unwrap();
        assert!(record.passed, "{}: worst {:.3e}", record.name, record.worst_slack);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = verify::random_field(entry.domain.len(), 1.0, &mut rng);
        for c in [0.0, 0.5, 3.0] {
            let record = verify::check_translation(&entry.domain, &entry.spec, &u, c).unwrap();
            assert!(record.passed, "{}", record.name);
        }
    }

    // Scaling margin for the shifted operators with min f > 0.
    let interval = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.1, 0.25, 0.25).unwrap();
    let lambda = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let nonneg = ScalarField::from_fn(interval.len(), |_| rng.gen_range(0.0..1.0));

    let eik = OperatorSpec::eikonal(ScalarField::constant(interval.len(), 1.0))
        .with_shift(&interval, 2.0)
        .unwrap();
    let record = verify::check_scaling(&interval, &eik, &nonneg, lambda).unwrap();
    let analytic = (lambda - 1.0) * (0.25f64 * 1.0).min(2.0);
    assert!(record.passed);
    assert!(
        (record.worst_slack - analytic).abs() <= 0.1 * analytic,
        "eikonal sigma {} vs analytic {analytic}",
        record.worst_slack
    );

    let biased = OperatorSpec::biased_tug_of_war(
        ScalarField::zeros(interval.len()),
        Some(ScalarField::constant(interval.len(), 1.0)),
        1.0,
    )
    .with_shift(&interval, 1.0)
    .unwrap();
    let record = verify::check_scaling(&interval, &biased, &nonneg, lambda).unwrap();
    let analytic = (lambda - 1.0) * (0.25f64 * 0.25 * 1.0 / 2.0).min(1.0);
    assert!(record.passed);
    assert!(
        (record.worst_slack - analytic).abs() <= 0.1 * analytic,
        "biased sigma {} vs analytic {analytic}",
        record.worst_slack
    );
    println!("acceptance 5: monotonicity x100, translation c in {{0, 0.5, 3}}, scaling margins: PASS");
}

#[test]
fn criterion_6_strict_comparison_matrix() {
    // (operator, bundled strict barrier) pairs on edge-free lattices, each
    // tested against the constant subsolution and the ascending limit.
    let interval_fine = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 1.0 / 21.0, 0.1, 0.1)
        .unwrap();
    let g_ramp = interval_fine.extend_boundary_values(|p| p[0]).unwrap();
    let interval_eik = build_grid(Shape::Interval { a: 0.0, b: 1.0 }, 0.04, 0.25, 0.25).unwrap();
    let disk = build_grid(Shape::Disk { radius: 0.1 }, 0.01, 0.05, 0.1).unwrap();

    let entries = vec![
        MatrixEntry {
            domain: interval_fine.clone(),
            spec: OperatorSpec::tug_of_war(g_ramp.clone()),
        },
        MatrixEntry {
            domain: interval_fine.clone(),
            spec: OperatorSpec::biased_tug_of_war(
                g_ramp.clone(),
                Some(ScalarField::constant(interval_fine.len(), 1.0)),
                1.0,
            ),
        },
        MatrixEntry {
            domain: interval_eik.clone(),
            spec: OperatorSpec::eikonal(ScalarField::constant(interval_eik.len(), 1.0)),
        },
        MatrixEntry {
            domain: disk.clone(),
            spec: OperatorSpec::mean_curvature(ScalarField::zeros(disk.len()), 16),
        },
    ];

    let mut pairs = 0;
    for entry in entries {
        let (barrier, sigma) =
            barriers::default_strict_supersolution(&entry.domain, &entry.spec).unwrap().unwrap();
        assert!(sigma > 0.0);
        let sub = barriers::default_subsolution(&entry.domain, &entry.spec).unwrap();
        let record = verify::check_comparison(&entry.domain, &entry.spec, &sub, &barrier).unwrap();
        assert!(record.passed, "{}: margin {:.3e}", record.name, record.worst_slack);
        let (limit, _) = solver::perron_solve_from_below(
            &entry.domain,
            &entry.spec,
            &sub,
            SolveOptions::with_tolerance(1e-11),
        )
        .unwrap();
        let record = verify::check_comparison(&entry.domain, &entry.spec, &limit, &barrier).unwrap();
        assert!(record.passed, "{} (limit): margin {:.3e}", record.name, record.worst_slack);
        pairs += 1;
    }
    println!("acceptance 6: {pairs} operator/barrier pairs, zero comparison violations: PASS");
}

#[test]
fn criterion_7_parabolic_consistency() {
    let ladder = [0.2, 0.1, 0.05];
    let phi = TestFunction::half_square();
    let heat = Nonlinearity::heat(1);
    let rows = consistency_table(&phi, &heat, &ladder, 1).unwrap();
    assert!(column_is_decreasing(&rows), "{rows:?}");
    assert!(
        rows[2].max_error <= 0.5 * rows[0].max_error,
        "last {:.3e} vs first {:.3e}",
        rows[2].max_error,
        rows[0].max_error
    );
    let doubled = consistency_table(&phi, &heat, &ladder, 2).unwrap();
    for (a, b) in rows.iter().zip(&doubled) {
        let change = (a.max_error - b.max_error).abs();
        assert!(
            change <= 0.1 * a.max_error + 1e-12,
            "doubling moved entry at eps {} by {:.3e} ({:.3e} -> {:.3e})",
            a.epsilon,
            change,
            a.max_error,
            b.max_error
        );
    }
    let summary: Vec<String> =
        rows.iter().map(|r| format!("{:.4e}@{}", r.max_error, r.epsilon)).collect();
    println!("acceptance 7: consistency column [{}] decreasing, doubling-stable: PASS", summary.join(", "));
}

#[test]
fn criterion_8_degeneration_identities() {
    let grid = build_grid(Shape::Rectangle { min: [0.0, 0.0], max: [1.0, 1.0] }, 0.1, 0.25, 0.25)
        .unwrap();
    let g = grid.extend_boundary_values(|p| (3.0 * p[0]).sin() * p[1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let u = verify::random_field(grid.len(), 1.0, &mut rng);

    let tow = OperatorSpec::tug_of_war(g.clone()).apply(&grid, &u).unwrap();

    let p_collapse = 1.0 + 4.0 / (grid.spacing() * grid.spacing()) + 1.0;
    let ps = OperatorSpec::peres_sheffield(g.clone(), p_collapse).apply(&grid, &u).unwrap();
    for i in 0..grid.len() {
        assert_eq!(tow[i].to_bits(), ps[i].to_bits(), "ps2d collapse at {i}");
    }

    let biased = OperatorSpec::biased_tug_of_war(g.clone(), None, 0.0).apply(&grid, &u).unwrap();
    for i in 0..grid.len() {
        assert_eq!(tow[i].to_bits(), biased[i].to_bits(), "biased collapse at {i}");
    }

    let mv = OperatorSpec::mean_value(g, 2.0);
    let (alpha, _) = mv.mean_value_weights(grid.dim()).unwrap();
    assert_eq!(alpha, 0.0);
    println!("acceptance 8: ps2d and biased collapses bit-identical, alpha(p=2) = 0: PASS");
}
