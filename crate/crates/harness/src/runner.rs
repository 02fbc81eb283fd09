use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use stablearn_core::learner::tomography_success_rate;
use stablearn_core::pauli::{
    char_distribution, q_distribution, subspace_mass, unsigned_stabilizer_group, ORACLE_CAP,
};
use stablearn_core::simstate::{collision_probability, fidelity, trace_distance};
use stablearn_core::{
    learn_state, property_test, random_doped_circuit, reconstruct, row_reduce, DopedCircuit,
    F2Vector, StateSource, StateVector, Subspace,
};

use crate::config::{CircuitSource, ExperimentConfig, Mode};
use crate::report::{Aggregate, CalibrationPoint, Report, TrialReport};
use crate::seed::mix;
use crate::HarnessError;

/// Absolute tolerance of the `validate` identity suites.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Runs every trial of `config` and assembles the report.
pub fn run(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    config.validate()?;
    if config.mode == Mode::Calibrate {
        return calibrate(config);
    }
    let fixed = match &config.circuit {
        CircuitSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(DopedCircuit::from_text(config.n, &text)?)
        }
        CircuitSource::Random { .. } => None,
    };
    let trials: Vec<TrialReport> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, fixed.as_ref(), i))
        .collect();
    let aggregate = Aggregate::from_trials(&trials, config.threshold());
    Ok(Report {
        config: config.clone(),
        trials,
        calibration: Vec::new(),
        chosen_constant: None,
        aggregate,
    })
}

fn run_trial(config: &ExperimentConfig, fixed: Option<&DopedCircuit>, index: usize) -> TrialReport {
    let seed = mix(config.seed, index as u64);
    let mut report = TrialReport::new(index, seed);
    let mut rng = StdRng::seed_from_u64(seed);
    let start = Instant::now();
    let outcome = match config.mode {
        Mode::Test => test_trial(config, fixed, &mut rng, &mut report),
        Mode::Learn => learn_trial(config, fixed, &mut rng, &mut report),
        Mode::Validate => validate_trial(config, fixed, &mut rng, &mut report),
        Mode::Calibrate => unreachable!("calibrate has no per-trial runs"),
    };
    if let Err(e) = outcome {
        report.success = false;
        report.error = Some(e.to_string());
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// The trial's input circuit.
fn input_circuit(
    config: &ExperimentConfig,
    fixed: Option<&DopedCircuit>,
    rng: &mut StdRng,
) -> Result<DopedCircuit, HarnessError> {
    match (&config.circuit, fixed) {
        (_, Some(c)) => Ok(c.clone()),
        (CircuitSource::Random { gates, doping }, None) => Ok(random_doped_circuit(
            config.n,
            *gates,
            config.t,
            (*doping).into(),
            rng,
        )?),
        (CircuitSource::File(_), None) => unreachable!("file circuits are parsed up front"),
    }
}

fn input_state(
    config: &ExperimentConfig,
    fixed: Option<&DopedCircuit>,
    rng: &mut StdRng,
) -> Result<(StateVector, usize), HarnessError> {
    let circ = input_circuit(config, fixed, rng)?;
    Ok((circ.prepare(&config.caps())?, circ.t_count()))
}

fn test_trial(
    config: &ExperimentConfig,
    fixed: Option<&DopedCircuit>,
    rng: &mut StdRng,
    report: &mut TrialReport,
) -> Result<(), HarnessError> {
    let psi = if config.haar {
        StateVector::haar_random(config.n, rng)
    } else {
        input_state(config, fixed, rng)?.0
    };
    let src = StateSource::new(psi).with_caps(config.caps());
    let outcome = property_test(&src, config.tester_k(), config.eps, config.delta, rng)?;
    report.k_hat = Some(outcome.k_hat);
    report.accept = Some(outcome.accept);
    report.copies_used = src.copies_consumed();
    report.success = outcome.accept != config.haar;
    Ok(())
}

fn learn_trial(
    config: &ExperimentConfig,
    fixed: Option<&DopedCircuit>,
    rng: &mut StdRng,
    report: &mut TrialReport,
) -> Result<(), HarnessError> {
    let (psi, _) = input_state(config, fixed, rng)?;
    let src = StateSource::new(psi.clone()).with_caps(config.caps());
    let mut learned = learn_state(&src, config.eps, config.delta, &config.learner, rng)?;
    learned.seed = Some(report.seed);
    report.t_hat = Some(learned.t_hat);
    report.copies_used = src.copies_consumed();
    if report.copies_used != learned.budget.total_copies() {
        return Err(HarnessError::Meter {
            metered: report.copies_used,
            budgeted: learned.budget.total_copies(),
        });
    }
    let estimate = reconstruct(&learned)?;
    let d = trace_distance(&psi, &estimate)?;
    report.trace_distance = Some(d);
    report.fidelity = Some(fidelity(&psi, &estimate)?);
    report.success = d <= config.eps;
    Ok(())
}

fn random_subspace(n: usize, rng: &mut StdRng) -> Result<Subspace, HarnessError> {
    let k = rng.gen_range(0..=2 * n);
    let vs: Vec<F2Vector> = (0..k).map(|_| F2Vector::random(n, rng)).collect();
    Ok(row_reduce(n, &vs)?)
}

/// Checks the exact identities of `p_ψ` and `q_ψ` on one random state and
/// subspace; failed suites are listed in `report.failures`.
fn validate_trial(
    config: &ExperimentConfig,
    fixed: Option<&DopedCircuit>,
    rng: &mut StdRng,
    report: &mut TrialReport,
) -> Result<(), HarnessError> {
    let n = config.n;
    if n > ORACLE_CAP {
        return Err(stablearn_core::Error::Capacity {
            what: "oracle qubit count",
            requested: n,
            cap: ORACLE_CAP,
        }
        .into());
    }
    let (psi, t_count) = input_state(config, fixed, rng)?;
    let p = char_distribution(&psi)?;
    let q = q_distribution(&p);
    let t = random_subspace(n, rng)?;
    let perp = t.symplectic_complement();
    let size_t = (1u64 << t.dim()) as f64;
    let mut fail = |name: &str, ok: bool| {
        if !ok {
            report.failures.push(name.to_string());
        }
    };

    let lhs = subspace_mass(&p, &t)?;
    let rhs = size_t / (1u64 << n) as f64 * subspace_mass(&p, &perp)?;
    fail("duality_p", (lhs - rhs).abs() <= IDENTITY_TOL);

    let lhs = subspace_mass(&q, &t)?;
    let rhs = size_t * perp.elements().map(|x| p.get(&x).powi(2)).sum::<f64>();
    fail("duality_q", (lhs - rhs).abs() <= IDENTITY_TOL);

    fail(
        "q_le_p",
        subspace_mass(&q, &t)? <= subspace_mass(&p, &t)? + IDENTITY_TOL,
    );

    let weyl = unsigned_stabilizer_group(&psi)?;
    let weyl_perp = weyl.symplectic_complement();
    let mut support_ok = true;
    for x in q.support(0.0) {
        support_ok &= weyl_perp.contains(&x)?;
    }
    fail("q_support", support_ok);

    let mut collision_ok = true;
    for split in 0..=n {
        let register: Vec<usize> = (split..n).collect();
        let exact = collision_probability(&psi, &register)?;
        let mass = subspace_mass(&p, &Subspace::trailing_z(n, n - split)?)?;
        collision_ok &= (exact - (1u64 << split) as f64 * mass).abs() <= IDENTITY_TOL;
    }
    fail("collision", collision_ok);

    fail(
        "stabilizer_dimension",
        weyl.is_isotropic() && weyl.dim() + 2 * t_count >= n,
    );

    report.t_hat = Some(n - weyl.dim());
    report.success = report.failures.is_empty();
    Ok(())
}

/// Sweeps the tomography constant over the grid for `t̂ = 1..=t` and picks
/// the smallest constant whose success rate reaches `1 - δ` at every `t̂`.
fn calibrate(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let target = config.threshold();
    let mut grid = config.calibration_grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let jobs: Vec<(f64, usize)> = grid
        .iter()
        .flat_map(|&c| (1..=config.t).map(move |t| (c, t)))
        .collect();
    let points: Vec<CalibrationPoint> = jobs
        .par_iter()
        .map(|&(c, t)| {
            // Common random states across constants for each t.
            let rate = tomography_success_rate(
                t,
                c,
                config.eps,
                config.delta,
                config.trials,
                mix(config.seed, t as u64),
            )?;
            Ok(CalibrationPoint {
                constant: c,
                t,
                successes: (rate * config.trials as f64).round() as usize,
                trials: config.trials,
                success_rate: rate,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    let chosen = grid.iter().copied().find(|&c| {
        points
            .iter()
            .filter(|p| p.constant == c)
            .all(|p| p.success_rate >= target)
    });
    let met = points.iter().filter(|p| p.success_rate >= target).count();
    Ok(Report {
        config: config.clone(),
        trials: Vec::new(),
        aggregate: Aggregate {
            trials: points.len(),
            successes: met,
            success_rate: met as f64 / points.len() as f64,
            mean_trace_distance: None,
            mean_copies: 0.0,
            threshold: target,
            passed: chosen.is_some(),
        },
        calibration: points,
        chosen_constant: chosen,
    })
}
