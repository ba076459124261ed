//! Built-in verification: a fast pass over the same properties the
//! full test suite checks, runnable from any installed binary.

use entb_core::{
    amplitude_tables, broadcast_numeric, broadcast_separable, copier_quality_report,
    feasibility_score, is_separable, local_output_closed, nonlocal_output_closed,
    orthonormalized_tables, separability_window, uqcm_spec, w_determinants, ComplexMatrix,
    CopierSpec, DensityOperator, PairClass, PairLabel, PureState, SearchConfig, Verdict,
    WindowResult,
};
use entb_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> bool;

pub fn run() -> u8 {
    let checks: &[(&str, Check)] = &[
        ("nonlocal window matches analytic bounds", nonlocal_window),
        ("local window matches analytic bounds", local_window),
        ("closed pair forms match the pipeline", closed_forms),
        ("spot eigenvalues at alpha^2 = 1/2", spot_values),
        ("copier quality conditions", quality),
        ("separable inputs stay nonlocally separable", separable_inputs),
        ("eigenvalue and determinant routes agree", route_agreement),
        ("amplitude tables match reductions", tables),
        ("universal copier scores feasible", uqcm_feasible),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        let ok = check();
        println!("selftest: {name:<44} {}", if ok { "ok" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("selftest: all {} checks passed", checks.len());
        0
    } else {
        println!("selftest: {failures} of {} checks FAILED", checks.len());
        1
    }
}

fn window_bounds(pair: PairClass) -> Option<(f64, f64)> {
    match separability_window(pair, &uqcm_spec()) {
        Ok(WindowResult::Window { alpha_sq_low, alpha_sq_high }) => {
            Some((alpha_sq_low, alpha_sq_high))
        }
        _ => None,
    }
}

fn nonlocal_window() -> bool {
    let Some((low, high)) = window_bounds(PairClass::Nonlocal) else {
        return false;
    };
    let expected = 39.0f64.sqrt() / 16.0;
    (low - (0.5 - expected)).abs() < 1e-6 && (high - (0.5 + expected)).abs() < 1e-6
}

fn local_window() -> bool {
    let Some((low, high)) = window_bounds(PairClass::Local) else {
        return false;
    };
    let expected = 48.0f64.sqrt() / 16.0;
    (low - (0.5 - expected)).abs() < 1e-6 && (high - (0.5 + expected)).abs() < 1e-6
}

fn closed_forms() -> bool {
    let spec = uqcm_spec();
    (0..=20).all(|i| {
        let alpha = (i as f64 / 20.0).sqrt();
        let Ok(outcome) = broadcast_numeric(alpha, &spec) else {
            return false;
        };
        let local = local_output_closed(alpha).unwrap();
        let nonlocal = nonlocal_output_closed(alpha).unwrap();
        outcome.pair_reductions[&PairLabel::AiBi].matrix().max_abs_diff(local.matrix()) < 1e-12
            && outcome.pair_reductions[&PairLabel::AiBii]
                .matrix()
                .max_abs_diff(nonlocal.matrix())
                < 1e-12
    })
}

fn spot_values() -> bool {
    let Ok(outcome) = broadcast_numeric(0.5f64.sqrt(), &uqcm_spec()) else {
        return false;
    };
    let nonlocal = outcome.reports[&PairLabel::AiBii].min_pt_eigenvalue;
    let local = outcome.reports[&PairLabel::AiBi].min_pt_eigenvalue;
    (nonlocal + 1.0 / 12.0).abs() < 1e-12 && (local - 1.0 / 6.0).abs() < 1e-12
}

fn quality() -> bool {
    let Ok(report) = copier_quality_report(&uqcm_spec(), 50, 11) else {
        return false;
    };
    let oracle = (2.0 * (1.0 - (5.0f64 / 6.0).sqrt())).sqrt();
    report.copy_asymmetry_max <= 1e-12
        && report.single_copy_distance_std <= 1e-10
        && report.joint_distance_std <= 1e-10
        && (report.single_copy_distance_mean - oracle).abs() < 1e-6
        && report.joint_distance_min > 0.1
}

fn random_qubit_density(rng: &mut ChaCha8Rng) -> DensityOperator {
    let (x, y, z) = loop {
        let v = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let r2: f64 = v.0 * v.0 + v.1 * v.1 + v.2 * v.2;
        if r2 <= 1.0 {
            break (v.0 * 0.999, v.1 * 0.999, v.2 * 0.999);
        }
    };
    let m = ComplexMatrix::square(
        2,
        vec![
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .unwrap();
    DensityOperator::new(vec![2], m).unwrap()
}

fn separable_inputs() -> bool {
    let spec = uqcm_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    (0..50).all(|_| {
        let k = rng.gen_range(1..=3);
        let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mixture: Vec<_> = weights
            .into_iter()
            .map(|w| (w, random_qubit_density(&mut rng), random_qubit_density(&mut rng)))
            .collect();
        let Ok(outcome) = broadcast_separable(&mixture, &spec) else {
            return false;
        };
        [PairLabel::AiBii, PairLabel::AiiBi].iter().all(|label| {
            let report = &outcome.reports[label];
            report.verdict != Verdict::Inseparable && report.min_pt_eigenvalue >= -1e-10
        })
    })
}

fn route_agreement() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    (0..200).all(|_| {
        let weights: Vec<f64> = (0..6).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let terms: Vec<(f64, DensityOperator)> = weights
            .into_iter()
            .map(|w| {
                let mut amps: Vec<Complex64> = (0..4)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                for a in &mut amps {
                    *a /= norm;
                }
                let psi = PureState::new(vec![2, 2], amps).unwrap();
                (w / total, psi.to_density())
            })
            .collect();
        let rho = DensityOperator::mixture(&terms).unwrap();
        let Ok(report) = is_separable(&rho) else {
            return false;
        };
        let Ok(w) = w_determinants(&rho) else {
            return false;
        };
        let det_inseparable = w[2] < -1e-10 || w[3] < -1e-10;
        match report.verdict {
            Verdict::Inseparable => det_inseparable,
            Verdict::Separable => !det_inseparable,
            Verdict::Boundary => true,
        }
    })
}

fn random_valid_spec(rng: &mut ChaCha8Rng) -> CopierSpec {
    loop {
        let mut c = [[0.0; 4]; 4];
        let mut d = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in 0..4 {
                c[i][k] = rng.gen_range(-1.0..1.0);
                d[i][k] = rng.gen_range(-1.0..1.0);
            }
        }
        if let Ok(spec) = orthonormalized_tables(c, d) {
            return spec;
        }
    }
}

fn tables() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    (0..5).all(|_| {
        let spec = random_valid_spec(&mut rng);
        let alpha = rng.gen_range(0.0..1.0f64);
        let Ok(tables) = amplitude_tables(alpha, &spec) else {
            return false;
        };
        let Ok(outcome) = broadcast_numeric(alpha, &spec) else {
            return false;
        };
        let local = &outcome.pair_reductions[&PairLabel::AiBi];
        let nonlocal = &outcome.pair_reductions[&PairLabel::AiBii];
        (0..4).all(|i| {
            (0..4).all(|j| {
                (tables.local_pair[i][j] - local.matrix().get(i, j).re).abs() < 1e-12
                    && (tables.nonlocal_pair[i][j] - nonlocal.matrix().get(i, j).re).abs() < 1e-12
            })
        })
    })
}

fn uqcm_feasible() -> bool {
    let config = SearchConfig::default();
    feasibility_score(&uqcm_spec().to_flat(), &config) <= 1e-9
}
