//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always print. Exits non-zero
//! if any criterion fails other than those listed in `KNOWN_RED`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stablearn::config::default_gates;
use stablearn::{run, CircuitSource, DopingKind, ExperimentConfig, Mode, Report};
use stablearn_core::clifford::MAPPING_GATE_CONSTANT;
use stablearn_core::learner::{sample_counts, tester_samples, BudgetMode};
use stablearn_core::pauli::{
    char_distribution, q_distribution, subspace_mass, unsigned_stabilizer_group,
};
use stablearn_core::simstate::{measure_computational, SimCaps};
use stablearn_core::{
    isotropic_mapping_circuit, random_doped_circuit, random_isotropic_subspace, row_reduce,
    symplectic_product, CliffordCircuit, Doping, F2Vector, LearnerConfig, StateSource, Subspace,
};

/// Criteria that cannot hold as written; the analysis is printed with the line.
const KNOWN_RED: [u32; 1] = [6];

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_subspace(n: usize, rng: &mut StdRng) -> Subspace {
    let k = rng.gen_range(0..=2 * n);
    let vs: Vec<F2Vector> = (0..k).map(|_| F2Vector::random(n, rng)).collect();
    row_reduce(n, &vs).unwrap()
}

fn brute_force_complement(t: &Subspace) -> Subspace {
    let n = t.n();
    let members: Vec<F2Vector> = (0..1u64 << (2 * n))
        .map(|i| F2Vector::from_index(n, i))
        .filter(|a| t.basis().iter().all(|x| !symplectic_product(x, a).unwrap()))
        .collect();
    row_reduce(n, &members).unwrap()
}

fn symplectic_algebra() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut bad = 0;
    let mut checked = 0;
    for n in 1..=10 {
        for _ in 0..100 {
            let t = random_subspace(n, &mut rng);
            let perp = t.symplectic_complement();
            let s = t.join(&random_subspace(n, &mut rng)).unwrap();
            let ok = perp.symplectic_complement() == t
                && t.dim() + perp.dim() == 2 * n
                && s.symplectic_complement().is_subspace_of(&perp).unwrap()
                && (n > 5 || perp == brute_force_complement(&t));
            bad += usize::from(!ok);
            checked += 1;
        }
    }
    outcome(bad == 0, format!("{checked} subspaces, {bad} failures"))
}

fn duality() -> Outcome {
    let mut failures = 0;
    let mut trials = 0;
    for n in 1..=5 {
        let mut cfg = ExperimentConfig::new(Mode::Validate, n);
        cfg.t = n.min(2);
        cfg.trials = 40;
        cfg.seed = 2;
        cfg.circuit = CircuitSource::Random {
            gates: default_gates(n),
            doping: DopingKind::HaarU1,
        };
        let report = run(&cfg).unwrap();
        trials += report.trials.len();
        failures += report.trials.iter().filter(|t| !t.success).count();
    }
    outcome(
        failures == 0,
        format!("{trials} (state, subspace) pairs, {failures} with a failed identity"),
    )
}

fn canonicalization() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let (mut count, mut bad, mut worst) = (0, 0, 0.0f64);
    for n in 2..=10 {
        for d in 1..=n {
            for _ in 0..10 {
                let h = random_isotropic_subspace(n, d, &mut rng).unwrap();
                let c = isotropic_mapping_circuit(&h).unwrap();
                let ok = h.map(&c).unwrap() == Subspace::trailing_z(n, d).unwrap()
                    && c.len() <= MAPPING_GATE_CONSTANT * n * d
                    && c.is_symplectic();
                worst = worst.max(c.len() as f64 / (n * d) as f64);
                bad += usize::from(!ok);
                count += 1;
            }
        }
    }
    outcome(
        bad == 0 && count >= 500,
        format!(
            "{count} subspaces, {bad} failures, max gates/(n·d) = {worst:.2} <= K = {MAPPING_GATE_CONSTANT}"
        ),
    )
}

fn bell_sampling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let n = 4;
    let draws = 50_000u64;
    let mut worst = 0.0f64;
    let mut meter_ok = true;
    for _ in 0..10 {
        let psi = random_doped_circuit(n, default_gates(n), 2, Doping::T, &mut rng)
            .unwrap()
            .prepare(&SimCaps::default())
            .unwrap();
        let q = q_distribution(&char_distribution(&psi).unwrap());
        let src = StateSource::new(psi);
        let mut counts = vec![0u64; 1 << (2 * n)];
        for _ in 0..draws {
            counts[src.bell_difference_sample(&mut rng).unwrap().index() as usize] += 1;
        }
        meter_ok &= src.copies_consumed() == 4 * draws;
        let tv = counts
            .iter()
            .zip(q.table())
            .map(|(&c, &p)| (c as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        worst = worst.max(tv);
    }
    outcome(
        worst <= 0.05 && meter_ok,
        format!("10 states, max TV = {worst:.4} (<= 0.05), 4 copies per sample: {meter_ok}"),
    )
}

fn collision() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let n = 4;
    let pairs = 20_000;
    let mut worst = 0.0f64;
    for t in 0..=2 {
        let psi = random_doped_circuit(n, default_gates(n), 2, Doping::HaarU1, &mut rng)
            .unwrap()
            .prepare(&SimCaps::default())
            .unwrap()
            .apply_circuit(&CliffordCircuit::random(n, default_gates(n), &mut rng))
            .unwrap();
        let p = char_distribution(&psi).unwrap();
        let expected = (1u64 << t) as f64
            * subspace_mass(&p, &Subspace::trailing_z(n, n - t).unwrap()).unwrap();
        let register: Vec<usize> = (t..n).collect();
        let hits = (0..pairs)
            .filter(|_| {
                let (a, _) = measure_computational(&psi, &register, &mut rng).unwrap();
                let (b, _) = measure_computational(&psi, &register, &mut rng).unwrap();
                a == b
            })
            .count();
        worst = worst.max((hits as f64 / pairs as f64 - expected).abs());
    }
    outcome(
        worst <= 0.02,
        format!("t = 0..2, max |empirical - 2^t Σ_T p| = {worst:.4}"),
    )
}

fn tester() -> Outcome {
    let (n, eps, delta) = (8, 0.3, 0.01);
    let mut cfg = ExperimentConfig::new(Mode::Test, n);
    cfg.t = 0;
    cfg.k = Some(n);
    cfg.eps = eps;
    cfg.delta = delta;
    cfg.trials = 200;
    cfg.seed = 6;
    let stab = run(&cfg).unwrap();
    cfg.haar = true;
    cfg.k = Some(1);
    let haar = run(&cfg).unwrap();

    let accept_rate = stab.aggregate.success_rate;
    let reject_rate = haar.aggregate.success_rate;
    let samples = tester_samples(n, eps, delta).unwrap();
    let theorem = ((32.0 * n as f64 + 8.0 * (1.0 / delta).ln()) / eps).ceil() as u64;
    let meters: HashSet<u64> = stab
        .trials
        .iter()
        .chain(&haar.trials)
        .map(|t| t.copies_used)
        .collect();
    let meter_is_samples = meters.len() == 1 && meters.contains(&(4 * samples));
    let meter_is_theorem = meters.len() == 1 && meters.contains(&theorem);
    outcome(
        accept_rate == 1.0 && reject_rate >= 0.95 && meter_is_samples && meter_is_theorem,
        format!(
            "accept rate {accept_rate}, reject rate {reject_rate}, meter {meters:?} = 4·{samples}; \
             literal count ⌈(32n + 8 ln(1/δ))/ε⌉ = {theorem} is not a multiple of 4 and cannot \
             be met with 4-copy samples (meter is the least multiple of 4 above it: {})",
            4 * samples >= theorem && 4 * samples - theorem < 4
        ),
    )
}

fn learner() -> Outcome {
    let (n, eps, delta) = (8, 0.2, 0.1);
    let mut parts = Vec::new();
    let mut pass = true;
    for t in 0..=2 {
        let mut cfg = ExperimentConfig::new(Mode::Learn, n);
        cfg.t = t;
        cfg.eps = eps;
        cfg.delta = delta;
        cfg.trials = 100;
        cfg.seed = 7;
        let report = run(&cfg).unwrap();
        let errors = report.trials.iter().filter(|r| r.error.is_some()).count();
        let t_hat_ok = report
            .trials
            .iter()
            .all(|r| r.t_hat.is_some_and(|h| h <= 2 * t));
        let meter_ok = report.trials.iter().all(|r| {
            let budget = sample_counts(
                n,
                eps,
                delta,
                BudgetMode::Learner { t_hat: r.t_hat },
                &LearnerConfig::default(),
            )
            .unwrap();
            r.copies_used == budget.total_copies()
        });
        let rate = report.aggregate.success_rate;
        pass &= rate >= 0.9 && t_hat_ok && meter_ok && errors == 0;
        parts.push(format!(
            "t={t}: d_tr<=0.2 in {:.0}%, t̂<=2t {t_hat_ok}, meter {meter_ok}",
            100.0 * rate
        ));
    }
    outcome(pass, parts.join("; "))
}

fn stabilizer_dimension() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let (mut count, mut bad) = (0, 0);
    for n in 1..=6 {
        for t in 0..=3 {
            for i in 0..50 {
                let doping = if i % 2 == 0 {
                    Doping::T
                } else {
                    Doping::HaarU1
                };
                let psi = random_doped_circuit(n, default_gates(n), t, doping, &mut rng)
                    .unwrap()
                    .prepare(&SimCaps::default())
                    .unwrap();
                let dim = unsigned_stabilizer_group(&psi).unwrap().dim();
                bad += usize::from(dim + 2 * t < n);
                count += 1;
            }
        }
    }
    outcome(bad == 0, format!("{count} circuits, {bad} below n - 2t"))
}

fn reproducibility() -> Outcome {
    let mut configs = Vec::new();
    let mut learn = ExperimentConfig::new(Mode::Learn, 6);
    learn.t = 2;
    learn.trials = 12;
    learn.seed = 99;
    configs.push(learn);
    let mut test = ExperimentConfig::new(Mode::Test, 6);
    test.trials = 12;
    test.seed = 99;
    configs.push(test);
    let mut validate = ExperimentConfig::new(Mode::Validate, 4);
    validate.trials = 12;
    validate.seed = 99;
    configs.push(validate);
    let mut calibrate = ExperimentConfig::new(Mode::Calibrate, 1);
    calibrate.t = 2;
    calibrate.trials = 20;
    calibrate.calibration_grid = vec![0.05, 0.1];
    configs.push(calibrate);

    let render = |r: &Report| {
        let mut csv = Vec::new();
        r.without_timing().write_csv(&mut csv).unwrap();
        (r.without_timing().to_json(), csv)
    };
    let same = configs.iter().all(|cfg| {
        let a = run(cfg).unwrap();
        let b = run(cfg).unwrap();
        render(&a) == render(&b)
    });
    let circuits_same = {
        let gen = || {
            random_doped_circuit(6, 100, 3, Doping::HaarU1, &mut StdRng::seed_from_u64(11))
                .unwrap()
                .to_text()
        };
        gen() == gen()
    };
    outcome(
        same && circuits_same,
        format!(
            "learn/test/validate/calibrate reports identical modulo timing: {same}; circuits byte-identical: {circuits_same}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            1,
            "symplectic algebra",
            Duration::from_secs(10),
            symplectic_algebra,
        ),
        (2, "duality suite", Duration::from_secs(120), duality),
        (
            3,
            "subspace canonicalization",
            Duration::from_secs(30),
            canonicalization,
        ),
        (
            4,
            "Bell difference sampling",
            Duration::from_secs(300),
            bell_sampling,
        ),
        (5, "collision identity", Duration::from_secs(120), collision),
        (6, "property tester", Duration::from_secs(600), tester),
        (
            7,
            "tomography end-to-end",
            Duration::from_secs(1800),
            learner,
        ),
        (
            8,
            "stabilizer dimension under doping",
            Duration::from_secs(300),
            stabilizer_dimension,
        ),
        (
            9,
            "reproducibility",
            Duration::from_secs(1800),
            reproducibility,
        ),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        let known = KNOWN_RED.contains(&id);
        println!(
            "criterion {id} {}: {name} ({:.1}s, limit {}s) {}{}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail,
            if !pass && known { " [known red]" } else { "" }
        );
        if pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected criterion outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
