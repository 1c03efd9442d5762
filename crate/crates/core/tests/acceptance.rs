//! Acceptance suite. Run with `--nocapture` to see one verdict line per
//! criterion.

use std::time::Instant;

use effham::eigen::{diagonalize_symmetric, exact_levels, exact_spectrum, ExactOptions, Matrix};
use effham::ising::{Scales, SchedulePoint, Topology};
use effham::perturbation::{assemble, FlipStructure, Orders};
use effham::subspace::{brute_force_low_states, choose_elimination_order, enumerate_low_states};
use effham::sweep::{run_sweep, run_sweep_on_basis, uniform_grid, SelectionRule, SweepConfig, WarningCode};
use effham::{IsingProblem, Schedule, SubspaceBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {id} [{name}]: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn small_instance(seed: u64) -> IsingProblem {
    let topo = match seed % 3 {
        0 => Topology::path(2),
        1 => Topology::ring(3),
        _ => Topology::grid(2, 2),
    };
    topo.instance(seed).unwrap()
}

/// Eight qubits: two `K_{2,2}` cells joined by strong couplers, so both
/// `J = -1` and `J = ±1/3` occur.
fn eight_qubit_instance(seed: u64) -> IsingProblem {
    Topology::chimera(1, 2, 2).instance(1000 + seed).unwrap()
}

/// Checks the built matrix for symmetry, Hamming-{1,2} sparsity, vanishing
/// third order and non-positive ground second order. Returns a failure note.
fn structural_check(problem: &IsingProblem, basis: &SubspaceBasis, k: usize, s: f64, schedule: &Schedule) -> Option<String> {
    let fs = FlipStructure::new(problem, basis).unwrap();
    let terms = fs.level_terms(k).unwrap();
    let h = assemble(&terms, s, schedule.at(s).unwrap(), Orders::default()).ok()?;
    let size = basis.len();
    for a in 0..size {
        for b in 0..size {
            if h.matrix[(a, b)].to_bits() != h.matrix[(b, a)].to_bits() {
                return Some(format!("asymmetric at ({a},{b})"));
            }
            if a != b && h.matrix[(a, b)] != 0.0 {
                let d = basis.states()[a].hamming(&basis.states()[b]);
                if d != 1 && d != 2 {
                    return Some(format!("entry at Hamming distance {d}"));
                }
            }
        }
        if fs.third_order_diagonal(k, a) != 0.0 {
            return Some("third-order diagonal nonzero".into());
        }
    }
    if k == 0 && h.second_order[0] > 0.0 {
        return Some("positive ground second order".into());
    }
    None
}

#[test]
fn criterion_1_full_subspace_exactness() {
    let schedule = Schedule::synthetic_default();
    let grid = uniform_grid(0.0, 1.0, 11).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let p = small_instance(seed);
        let dim = 1usize << p.n();
        let sweep = run_sweep(&p, &schedule, &SweepConfig::new(dim, dim, grid.clone())).unwrap();
        assert_eq!(sweep.basis_size, dim);
        for pt in &sweep.points {
            let exact = exact_spectrum(&p, pt.s, &schedule, dim).unwrap();
            for (a, b) in pt.energies().iter().zip(&exact.eigenvalues) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let ok = worst <= 1e-9;
    verdict(1, "full-subspace exactness", ok, &format!("max error {worst:.3e}, limit 1e-9"));
    assert!(ok);
}

#[test]
fn criterion_2_closed_forms() {
    let schedule = Schedule::synthetic_default();
    let grid = uniform_grid(0.0, 1.0, 21).unwrap();
    let mut worst_gap: f64 = 0.0;
    for h in [1.0, 1.0 / 3.0, -0.7, 2.5] {
        let p = IsingProblem::new(1, vec![h], vec![]).unwrap();
        let sweep = run_sweep(&p, &schedule, &SweepConfig::new(2, 2, grid.clone())).unwrap();
        for pt in &sweep.points {
            let sc = schedule.at(pt.s).unwrap();
            let expect = (sc.delta * sc.delta + sc.eps * sc.eps * h * h).sqrt();
            worst_gap = worst_gap.max((pt.gap.unwrap() - expect).abs());
        }
    }

    let classical = Schedule::new(vec![
        SchedulePoint { s: 0.0, delta: 0.0, eps: 0.5 },
        SchedulePoint { s: 1.0, delta: 0.0, eps: 9.0 },
    ])
    .unwrap();
    let mut worst_diag: f64 = 0.0;
    for seed in 0..4 {
        let p = Topology::grid(2, 3).instance(seed).unwrap();
        let mut energies: Vec<f64> = (0..64u64)
            .map(|x| p.classical_energy(&effham::SpinState::from_index(6, x)).unwrap())
            .collect();
        energies.sort_by(f64::total_cmp);
        let sweep = run_sweep(&p, &classical, &SweepConfig::new(64, 64, grid.clone())).unwrap();
        for pt in &sweep.points {
            let half = 0.5 * classical.at(pt.s).unwrap().eps;
            let exact = exact_spectrum(&p, pt.s, &classical, 64).unwrap();
            for k in 0..64 {
                worst_diag = worst_diag
                    .max((pt.levels[k].energy - half * energies[k]).abs())
                    .max((exact.eigenvalues[k] - half * energies[k]).abs());
            }
        }
    }
    let ok = worst_gap <= 1e-12 && worst_diag <= 1e-12;
    verdict(
        2,
        "closed forms",
        ok,
        &format!("n=1 gap error {worst_gap:.3e}, zero-field error {worst_diag:.3e}, limit 1e-12"),
    );
    assert!(ok);
}

struct MirrorRow {
    s: f64,
    error: f64,
    limit: f64,
}

fn mirror_errors(seed: u64, grid: &[f64]) -> Vec<MirrorRow> {
    let schedule = Schedule::synthetic_default();
    let p = eight_qubit_instance(seed);
    let basis = enumerate_low_states(&p, 50).unwrap();
    let sweep = run_sweep_on_basis(&p, &basis, &schedule, &SweepConfig::new(50, 6, grid.to_vec())).unwrap();
    sweep
        .points
        .iter()
        .map(|pt| {
            let exact = exact_spectrum(&p, pt.s, &schedule, 6).unwrap().eigenvalues;
            let error = (1..6)
                .map(|k| (pt.relative(k) - (exact[k] - exact[0])).abs())
                .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
            let eps = schedule.at(pt.s).unwrap().eps;
            MirrorRow {
                s: pt.s,
                error,
                limit: 0.02 * 0.5 * eps * basis.spread(),
            }
        })
        .collect()
}

#[test]
fn criterion_3_methodology_mirror() {
    let grid: Vec<f64> = (0..=14).map(|i| 0.3 + 0.05 * i as f64).collect();
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_at = (0, 0.0);
    let mut early_ratio: f64 = 0.0;
    let mut per_point = vec![0.0f64; grid.len()];
    for seed in 0..10 {
        for (i, row) in mirror_errors(seed, &grid).into_iter().enumerate() {
            let ratio = row.error / row.limit;
            per_point[i] = per_point[i].max(ratio);
            if row.s >= 0.5 - 1e-12 {
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_at = (seed, row.s);
                }
                ok &= row.error <= row.limit;
            } else {
                early_ratio = early_ratio.max(ratio);
            }
        }
    }
    let within_from = (0..grid.len())
        .find(|&i| per_point[i..].iter().all(|&r| r <= 1.0))
        .map(|i| grid[i]);
    verdict(
        3,
        "8-qubit methodology mirror",
        ok,
        &format!(
            "worst error/limit {worst_ratio:.3} for s >= 0.5 (instance {}, s={:.2}); s < 0.5 worst {early_ratio:.3}, not checked; all instances within the limit from s={within_from:?}",
            worst_at.0, worst_at.1
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_monotone_improvement() {
    let schedule = Schedule::synthetic_default();
    let s = 0.45;
    let mut medians = Vec::new();
    for ns in [50, 100, 200] {
        let mut errors: Vec<f64> = (0..10)
            .map(|seed| {
                let p = eight_qubit_instance(seed);
                let sweep = run_sweep(&p, &schedule, &SweepConfig::new(ns, 6, vec![s])).unwrap();
                let exact = exact_spectrum(&p, s, &schedule, 6).unwrap().eigenvalues;
                sweep.points[0]
                    .energies()
                    .iter()
                    .zip(&exact)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, |m: f64, e| if e.is_nan() { f64::INFINITY } else { m.max(e) })
            })
            .collect();
        errors.sort_by(f64::total_cmp);
        medians.push(0.5 * (errors[4] + errors[5]));
    }
    let ok = medians.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        4,
        "monotone improvement in N_S",
        ok,
        &format!("median max error at s=0.45 for N_S 50/100/200: {medians:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_enumeration_equivalence() {
    let mut cases = 0;
    let mut ok = true;
    let mut note = String::new();
    for seed in 0..20u64 {
        let p = match seed % 3 {
            0 => Topology::chimera(1, 2, 2).instance(seed).unwrap(),
            1 => Topology::grid(3, 4).instance(seed).unwrap(),
            _ => Topology::chimera(1, 2, 4).instance(seed).unwrap(),
        };
        for target in [10usize, 100, 1000] {
            let target = target.min(1 << p.n());
            let fast = enumerate_low_states(&p, target).unwrap();
            let slow = brute_force_low_states(&p, target).unwrap();
            cases += 1;
            let same = fast.len() == slow.len()
                && fast
                    .energies()
                    .iter()
                    .zip(slow.energies())
                    .all(|(a, b)| (a - b).abs() <= 1e-9);
            if !same && ok {
                note = format!("; first mismatch: n={}, seed {seed}, target {target}", p.n());
            }
            ok &= same;
        }
    }
    verdict(5, "enumeration oracle equivalence", ok, &format!("{cases} cases{note}"));
    assert!(ok);
}

#[test]
fn criterion_6_eigensolver_contracts() {
    let (mut recon, mut ortho, mut trace): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=64);
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        let norm = a.frobenius_norm();
        let dec = diagonalize_symmetric(&a).unwrap();
        let v = dec.vectors();
        let lam = dec.values();
        let rebuilt = Matrix::from_fn(n, |i, j| (0..n).map(|k| lam[k] * v[k][i] * v[k][j]).sum());
        let diff = Matrix::from_fn(n, |i, j| rebuilt[(i, j)] - a[(i, j)]);
        recon = recon.max(diff.frobenius_norm() / norm);
        for p in 0..n {
            for q in 0..n {
                let d: f64 = v[p].iter().zip(&v[q]).map(|(x, y)| x * y).sum();
                ortho = ortho.max((d - if p == q { 1.0 } else { 0.0 }).abs());
            }
        }
        trace = trace.max((lam.iter().sum::<f64>() - a.trace()).abs() / norm);
    }
    let ok = recon <= 1e-10 && ortho <= 1e-10 && trace <= 1e-9;
    verdict(
        6,
        "eigensolver contracts",
        ok,
        &format!("relative reconstruction {recon:.3e}, orthonormality {ortho:.3e}, relative trace {trace:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_7_structural_invariants() {
    let schedule = Schedule::synthetic_default();
    let mut built = 0;
    let mut failure = None;
    let mut bases: Vec<(IsingProblem, SubspaceBasis)> = Vec::new();
    for seed in 0..20 {
        let p = small_instance(seed);
        let b = SubspaceBasis::full(&p).unwrap();
        bases.push((p, b));
    }
    for seed in 0..10 {
        let p = eight_qubit_instance(seed);
        for ns in [50, 100] {
            let b = enumerate_low_states(&p, ns).unwrap();
            bases.push((p.clone(), b));
        }
    }
    for (p, b) in &bases {
        for k in 0..b.len().min(6) {
            for s in [0.3, 0.6, 0.9] {
                built += 1;
                if let Some(msg) = structural_check(p, b, k, s, &schedule) {
                    failure.get_or_insert(msg);
                }
            }
        }
    }
    let ok = failure.is_none();
    verdict(
        7,
        "structural and parity invariants",
        ok,
        &format!("{built} matrices{}", failure.map(|m| format!("; {m}")).unwrap_or_default()),
    );
    assert!(ok);
}

#[test]
fn criterion_8_scale_demonstration() {
    let topo = Topology::chimera(1, 16, 4);
    let p = topo.instance(128).unwrap();
    assert_eq!(p.n(), 128);
    let width = choose_elimination_order(&p).width;
    let schedule = Schedule::synthetic_default();
    let grid = uniform_grid(0.0, 1.0, 21).unwrap();
    let mut config = SweepConfig::new(2000, 2, grid);
    config.rule = SelectionRule::Index;
    let start = Instant::now();
    let sweep = run_sweep(&p, &schedule, &config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let failed: Vec<f64> = sweep.points.iter().filter(|pt| !pt.is_complete()).map(|pt| pt.s).collect();
    let failures_early = failed.iter().all(|&s| s <= 0.1);
    let lambdas_reported = sweep
        .points
        .iter()
        .all(|pt| pt.levels.len() == 2 && pt.levels.iter().all(|l| !l.lambda.lambda_k.is_nan()));
    let untrusted = sweep
        .points
        .iter()
        .filter(|pt| pt.warnings.iter().any(|w| w.code == WarningCode::LambdaUntrusted))
        .count();
    let negative: Vec<f64> = sweep
        .points
        .iter()
        .filter(|pt| pt.warnings.iter().any(|w| w.code == WarningCode::NegativeGap))
        .map(|pt| pt.s)
        .collect();
    let min_gap = sweep.min_gap;
    let ok = width <= 16 && elapsed < 1800.0 && failures_early && lambdas_reported && min_gap.is_some();
    verdict(
        8,
        "128-qubit scale demonstration",
        ok,
        &format!(
            "width {width}, N_S {}, {elapsed:.1} s, failed points at s={failed:?}, {untrusted} points with untrusted lambda, negative gap at s={negative:?}, min gap {:?}",
            sweep.basis_size, min_gap
        ),
    );
    assert!(ok);
}

#[test]
fn oracle_paths_agree_on_mirror_instances() {
    let schedule = Schedule::synthetic_default();
    let p = eight_qubit_instance(0);
    for s in [0.3, 0.6, 0.9] {
        let sc: Scales = schedule.at(s).unwrap();
        let dense = exact_levels(&p, sc, 6, &ExactOptions::default()).unwrap();
        let iter = exact_levels(
            &p,
            sc,
            6,
            &ExactOptions {
                method: effham::eigen::ExactMethod::Iterative,
                seed: 7,
            },
        )
        .unwrap();
        for (a, b) in dense.iter().zip(&iter) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
