//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use qutrit_cavity::amplitudes::assemble_state;
use qutrit_cavity::density::{rho_atoms, rho_field, DensityMatrix};
use qutrit_cavity::measures::{cardano_eigenvalues, measure_sample, negativity, von_neumann_entropy};
use qutrit_cavity::model::{ConfigKind, Frame, JointState, SystemParams};
use qutrit_cavity::oracle::{build_h1, build_h2, integrate, lab_state, IntegratorOptions};
use qutrit_cavity::scenario::{oracle_deviation, run_scenario, MeasureSeries, ScenarioConfig, FIGURE_GAMMAS};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig_params(kind: ConfigKind, gamma: f64) -> SystemParams {
    SystemParams::with_gamma(kind, 1.0, gamma, 5.0).unwrap()
}

/// 50 evenly spaced times in (0, 25].
fn sample_times() -> Vec<f64> {
    (1..=50).map(|i| 0.5 * i as f64).collect()
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in ConfigKind::ALL {
        for gamma in [0.0, 1.0] {
            let p = SystemParams::with_gamma(kind, 1.0, gamma, 2.0).unwrap().with_uniform_grid(5.0, 101).unwrap();
            let d = oracle_deviation(&p).map_err(|e| format!("{kind} gamma={gamma}: {e}"))?;
            worst = worst.max(d);
        }
    }
    check(worst < 1e-6, format!("max amplitude deviation {worst:.2e} (limit 1e-6)"))
}

fn frame_equivalence() -> Outcome {
    let (alpha, gamma, gt) = (2.0, 1.0, 5.0);
    let mut worst: f64 = 1.0;
    for kind in ConfigKind::ALL {
        let p = SystemParams::with_gamma(kind, 1.0, gamma, alpha).unwrap();
        let n_max = p.n_max;
        let opts = IntegratorOptions::for_coupling(p.g);
        let lab0 = JointState::product_coherent(1, 1, alpha, n_max, Frame::Lab);
        let h1 = build_h1(&p.config, p.g, p.lambda, n_max);
        let lab = integrate(&h1, &lab0, &[p.time(gt)], opts).map_err(|e| e.to_string())?.states.remove(0);
        let disp0 = JointState::product_coherent(1, 1, p.beta, n_max, Frame::Transformed);
        let h2 = build_h2(&p.config, p.g, n_max);
        let disp = integrate(&h2, &disp0, &[p.time(gt)], opts).map_err(|e| e.to_string())?.states.remove(0);
        let back = lab_state(&disp, gamma).map_err(|e| e.to_string())?;
        let overlap = lab.inner(&back).map_err(|e| e.to_string())?.norm();
        worst = worst.min(overlap);
    }
    check(worst >= 1.0 - 1e-6, format!("min overlap 1 - {:.2e} (limit 1 - 1e-6)", 1.0 - worst))
}

fn unitarity() -> Outcome {
    let p = fig_params(ConfigKind::V, 6.0);
    let mut worst: f64 = 0.0;
    for kind in ConfigKind::ALL {
        let p = fig_params(kind, 6.0).with_uniform_grid(25.0, 1001).unwrap();
        let dev = p
            .t_grid
            .par_iter()
            .map(|&gt| assemble_state(p.time(gt), &p).map(|s| (s.norm_sqr() - 1.0).abs()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        worst = dev.into_iter().fold(worst, f64::max);
    }
    check(p.n_max >= 255 && worst < 1e-10, format!("n_max {} max |norm - 1| {worst:.2e} (limit 1e-10)", p.n_max))
}

fn initial_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in ConfigKind::ALL {
        for gamma in FIGURE_GAMMAS {
            let p = fig_params(kind, gamma);
            let s = assemble_state(0.0, &p).map_err(|e| e.to_string())?;
            let m = measure_sample(0.0, &s, p.gamma).map_err(|e| e.to_string())?;
            let q = m.mandel_q.ok_or("Mandel parameter undefined at t = 0")?;
            for x in [m.entropy, m.negativity, q, m.s_x, m.s_y] {
                worst = worst.max(x.abs());
            }
        }
    }
    check(worst < 1e-9, format!("max |value| {worst:.2e} over 9 runs (limit 1e-9)"))
}

fn araki_lieb() -> Outcome {
    let mut jobs = Vec::new();
    for kind in ConfigKind::ALL {
        for gt in sample_times() {
            jobs.push((kind, gt));
        }
    }
    let worst = jobs
        .par_iter()
        .map(|&(kind, gt)| -> Result<f64, String> {
            let p = fig_params(kind, 0.0);
            let s = assemble_state(p.time(gt), &p).map_err(|e| e.to_string())?;
            let sa = von_neumann_entropy(&rho_atoms(&s)).map_err(|e| e.to_string())?;
            let sf = von_neumann_entropy(&rho_field(&s)).map_err(|e| e.to_string())?;
            Ok((sa - sf).abs())
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    check(worst < 1e-8, format!("max |S_atoms - S_field| {worst:.2e} at 150 samples (limit 1e-8)"))
}

fn lambda_rank() -> Outcome {
    let p = fig_params(ConfigKind::Lambda, 0.0);
    let mut tail: f64 = 0.0;
    let mut cardano: f64 = 0.0;
    for gt in sample_times() {
        let rho = rho_atoms(&assemble_state(p.time(gt), &p).map_err(|e| e.to_string())?);
        let e = rho.eigenvalues().map_err(|e| e.to_string())?;
        tail = e[3..].iter().fold(tail, |m, x| m.max(x.abs()));
        let mut xi = cardano_eigenvalues(&rho).map_err(|e| e.to_string())?.xi;
        xi.sort_by(|a, b| b.total_cmp(a));
        cardano = (0..3).fold(cardano, |m, k| m.max((xi[k] - e[k]).abs()));
    }
    check(
        tail < 1e-10 && cardano < 1e-8,
        format!("max |eigenvalues 4-9| {tail:.2e} (limit 1e-10), Cardano deviation {cardano:.2e} (limit 1e-8)"),
    )
}

fn figure_runs() -> Result<Vec<(ConfigKind, f64, MeasureSeries)>, String> {
    let mut out = Vec::new();
    for kind in ConfigKind::ALL {
        for gamma in FIGURE_GAMMAS {
            let s = run_scenario(&ScenarioConfig::new(kind, gamma, 5.0)).map_err(|e| e.to_string())?;
            out.push((kind, gamma, s));
        }
    }
    Ok(out)
}

fn entropy_maxima(runs: &[(ConfigKind, f64, MeasureSeries)]) -> Outcome {
    let mut earliest = f64::INFINITY;
    for (kind, gamma, s) in runs {
        let (gt, _) = s.summary.max_entropy.ok_or(format!("{kind} gamma={gamma}: no entropy"))?;
        earliest = earliest.min(gt);
    }
    check(earliest > 0.0, format!("earliest entropy maximum at gt = {earliest}"))
}

/// Crossings closer together than this (in gt) belong to one epoch.
const EPOCH_GAP: f64 = 1.0;

/// Index of the first sample after the initial zero-crossing epoch: the run of
/// sign changes starting at the first one whose successive spacing stays below
/// [`EPOCH_GAP`].
fn end_of_first_crossing_epoch(gt: &[f64], q: &[f64]) -> usize {
    let crossings: Vec<usize> = (1..q.len()).filter(|&i| (q[i - 1] < 0.0) != (q[i] < 0.0)).collect();
    let Some(&first) = crossings.first() else { return 0 };
    let mut last = first;
    for &c in &crossings[1..] {
        if gt[c] - gt[last] >= EPOCH_GAP {
            break;
        }
        last = c;
    }
    last
}

fn mandel_signs(runs: &[(ConfigKind, f64, MeasureSeries)]) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (kind, gamma, s) in runs {
        let gt: Vec<f64> = s.rows.iter().map(|r| r.gt).collect();
        let q: Vec<f64> = s.rows.iter().map(|r| r.mandel_q.unwrap()).collect();
        if *gamma == 0.0 {
            let changes = q.iter().skip(1).any(|&x| x < 0.0) && q.iter().skip(1).any(|&x| x > 0.0);
            ok &= changes;
            if !changes {
                notes.push(format!("{kind} gamma=0 keeps its sign"));
            }
        } else if *gamma == 6.0 {
            let start = end_of_first_crossing_epoch(&gt, &q);
            let later_min = q[start..].iter().cloned().fold(f64::INFINITY, f64::min);
            ok &= later_min >= -1e-9;
            notes.push(format!("{kind} gamma=6 epoch ends at gt = {}, later min Q {later_min:.2e}", gt[start]));
        }
    }
    check(ok, notes.join("; "))
}

fn early_squeezing(runs: &[(ConfigKind, f64, MeasureSeries)]) -> Outcome {
    let min_sx = |kind: ConfigKind| {
        let (_, _, s) = runs.iter().find(|(k, g, _)| *k == kind && *g == 0.0).unwrap();
        s.rows.iter().filter(|r| r.gt > 0.0 && r.gt <= 2.0).map(|r| r.squeezing.unwrap().0).fold(f64::INFINITY, f64::min)
    };
    let (v, xi, l) = (min_sx(ConfigKind::V), min_sx(ConfigKind::Xi), min_sx(ConfigKind::Lambda));
    check(
        v < 0.0 && xi < 0.0 && l < 0.0 && xi.abs() > v.abs() && xi.abs() > l.abs(),
        format!("min S_x on (0, 2]: V {v:.4}, Xi {xi:.4}, Lambda {l:.4}"),
    )
}

fn no_y_squeezing(runs: &[(ConfigKind, f64, MeasureSeries)]) -> Outcome {
    let min_sy = runs
        .iter()
        .flat_map(|(_, _, s)| s.rows.iter().map(|r| r.squeezing.unwrap().1))
        .fold(f64::INFINITY, f64::min);
    check(min_sy >= -1e-9, format!("min S_y {min_sy:.2e} over 9 runs (round-off floor -1e-9)"))
}

fn negativity_calibration() -> Outcome {
    let s = 1.0 / 3f64.sqrt();
    let mut v = [Complex64::new(0.0, 0.0); 9];
    for j in 0..3 {
        v[4 * j] = Complex64::new(s, 0.0);
    }
    let max = negativity(&DensityMatrix::pure_atoms(&v)).map_err(|e| e.to_string())?;

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut qutrit = || {
        let raw: [Complex64; 3] = std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        raw.map(|z| z / norm)
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (qutrit(), qutrit());
        let product: [Complex64; 9] = std::array::from_fn(|k| a[k / 3] * b[k % 3]);
        worst = worst.max(negativity(&DensityMatrix::pure_atoms(&product)).map_err(|e| e.to_string())?.abs());
    }
    check(
        (max - 1.0).abs() < 1e-10 && worst < 1e-10,
        format!("maximally entangled |N - 1| {:.2e}, product states max N {worst:.2e} (limit 1e-10)", (max - 1.0).abs()),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]")
            }
        }
    };

    let t = Instant::now();
    report("1 oracle equivalence", t, oracle_equivalence());
    let t = Instant::now();
    report("2 frame equivalence", t, frame_equivalence());
    let t = Instant::now();
    report("3 unitarity", t, unitarity());
    let t = Instant::now();
    report("4 t=0 identities", t, initial_identities());
    let t = Instant::now();
    report("5 Araki-Lieb equality", t, araki_lieb());
    let t = Instant::now();
    report("6 Lambda rank and Cardano", t, lambda_rank());

    let t = Instant::now();
    match figure_runs() {
        Ok(runs) => {
            report("7a entropy maxima after onset", t, entropy_maxima(&runs));
            report("7b Mandel sign structure", t, mandel_signs(&runs));
            report("7c early x-squeezing, Xi strongest", t, early_squeezing(&runs));
            report("7d no y-squeezing", t, no_y_squeezing(&runs));
        }
        Err(e) => {
            for name in ["7a entropy maxima after onset", "7b Mandel sign structure", "7c early x-squeezing, Xi strongest", "7d no y-squeezing"] {
                report(name, t, Err(e.clone()));
            }
        }
    }
    let t = Instant::now();
    report("8 negativity calibration", t, negativity_calibration());

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
