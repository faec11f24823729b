//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use polarlab::bounds::{sandwich_report, step2_lower_bound, upper_bound, BoundsConfig, X0Strategy};
use polarlab::hilbert::l_constant;
use polarlab::oracle::{exhaustive_sign_min, grid_norm, quadrature_l, GridSpec};
use polarlab::product_poly::{monomial_norm_exact, sup_norm, FunctionalSystem, OptimizerConfig};
use polarlab::spaces::{PSpace, RandomSource, ScalarField, Vector};
use polarlab::sphere_integrals::{
    fit_asymptotic_slope, mc_log_inverse_pnorm, mc_log_pairing_integral, mc_pnorm_moment, Measure,
};
use polarlab::torus::{
    chebyshev_tail_check, cn_infty_lower_bound, cn_infty_per_factor, f_evaluate, second_moment, sup_norm_polydisc,
    SignAverage, SignMatrix, TorusNet,
};
use rand::Rng;

const FIELDS: [ScalarField; 2] = [ScalarField::Real, ScalarField::Complex];
const SWEEP: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn harmonic(m: usize) -> f64 {
    (1..=m).rev().map(|k| 1.0 / k as f64).sum()
}

fn criterion_1(o: &mut Outcome) {
    let mut worst: f64 = 0.0;
    for d in 2..=64 {
        for field in FIELDS {
            let l = l_constant(d, field).unwrap();
            let q = quadrature_l(d, field).unwrap();
            worst = worst.max((l - q).abs());
            o.check((l - q).abs() <= 1e-8, || format!("d={d} {field}: L={l} quadrature={q}"));
        }
        let l = l_constant(d, ScalarField::Complex).unwrap();
        let h = harmonic(d - 1) / 2.0;
        o.check((-l - h).abs() <= 1e-12, || format!("d={d}: -L={} H/2={h}", -l));
    }
    o.note(format!("max |L - quadrature| = {worst:.2e}"));
}

fn criterion_2(o: &mut Outcome) {
    for (i, d) in [2usize, 4, 8, 16].into_iter().enumerate() {
        let est = mc_log_pairing_integral(
            &Vector::basis(d, 0),
            Measure::UniformEuclidean,
            ScalarField::Complex,
            1_000_000,
            f64::INFINITY,
            &RandomSource::with_stream(2, i as u64),
        )
        .unwrap();
        let target = -l_constant(d, ScalarField::Complex).unwrap();
        let z = (-est.mean - target) / est.std_error;
        o.note(format!("d={d}: z={z:+.2}"));
        o.check(z.abs() <= 3.0, || format!("d={d}: estimate {} vs {target} ± {}", -est.mean, est.std_error));
    }
}

fn criterion_3(o: &mut Outcome) {
    for d in 4..=6 {
        let space = PSpace::new(2.0, d, ScalarField::Complex).unwrap();
        for n in 1..=4 {
            let sys = FunctionalSystem::new((0..n).map(|k| Vector::basis(d, k)).collect(), space).unwrap();
            let v = sup_norm(&sys, &OptimizerConfig::default()).unwrap().value;
            let expected = (n as f64).powf(-(n as f64) / 2.0);
            o.check((v - expected).abs() <= 1e-6, || format!("n={n}, d={d}: {v} vs {expected}"));
        }
    }
}

fn criterion_4(o: &mut Outcome) {
    let mut worst: f64 = 0.0;
    for d in [2usize, 3] {
        for k in [1u32, 2] {
            for p in [1.0, 1.5, 2.0, 3.0] {
                let space = PSpace::new(p, d, ScalarField::Real).unwrap();
                let exps = vec![k; d];
                let exact = monomial_norm_exact(&exps, &space).unwrap();
                let rows: Vec<Vector> = (0..d)
                    .flat_map(|i| std::iter::repeat_n(Vector::basis(d, i), k as usize))
                    .collect();
                let sys = FunctionalSystem::new(rows, space).unwrap();
                let resolution = if d == 2 { 1 << 14 } else { 1 << 9 };
                let grid = grid_norm(&sys, &GridSpec::new(resolution, space).unwrap()).unwrap().value;
                let rel = (exact - grid).abs() / exact;
                worst = worst.max(rel);
                o.check(rel <= 1e-3, || format!("d={d} k={k} p={p}: exact {exact} grid {grid}"));
            }
        }
    }
    for d in 2..=32 {
        for k in 1..=3 {
            let s = step2_lower_bound(1.0, d, k).unwrap();
            o.check(s.per_factor == d as f64, || format!("p=1 d={d}: per-factor {}", s.per_factor));
        }
    }
    o.note(format!("max relative gap = {worst:.2e}"));
}

fn slope(points: &[(f64, f64)]) -> f64 {
    fit_asymptotic_slope(points).unwrap().slope
}

fn criterion_5(o: &mut Outcome) {
    const N: usize = 100_000;
    let f = ScalarField::Real;
    let src = |tag: u64, d: usize| RandomSource::with_stream(5, tag * 1000 + d as u64);
    let pts = |g: &dyn Fn(usize) -> f64| SWEEP.iter().map(|&d| (d as f64, g(d))).collect::<Vec<_>>();

    let s = slope(&pts(&|d| mc_pnorm_moment(3.0, d, f, N, &src(1, d)).unwrap().mean));
    o.note(format!("pnorm moment p=3: {s:.4}"));
    o.check((s + 0.5).abs() <= 0.05, || format!("pnorm moment slope {s}"));

    for (p, target, tag) in [(1.0, -0.5, 2), (4.0, 0.25, 3)] {
        let s = slope(&pts(&|d| mc_log_inverse_pnorm(p, d, f, N, &src(tag, d)).unwrap().mean.exp()));
        o.note(format!("exp log-inverse p={p}: {s:.4}"));
        o.check((s - target).abs() <= 0.05, || format!("log-inverse slope p={p}: {s}"));
    }

    let s = slope(&pts(&|d| {
        let space = PSpace::new(4.0, d, f).unwrap();
        let opt = OptimizerConfig {
            starts: 16,
            ..OptimizerConfig::default()
        };
        upper_bound(&space, N, &opt, &src(4, d)).unwrap().line.value
    }));
    o.note(format!("upper p=4: {s:.4}"));
    o.check((s - 0.5).abs() <= 0.1, || format!("upper bound slope {s}"));

    let s = slope(&pts(&|d| step2_lower_bound(1.5, d, 1).unwrap().per_factor));
    o.note(format!("monomial line p=1.5: {s:.15}"));
    o.check((s - 2.0 / 3.0).abs() <= 1e-12, || format!("monomial line slope {s}"));
}

fn criterion_6(o: &mut Outcome) {
    let mut worst: f64 = f64::NEG_INFINITY;
    for p in [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY] {
        for d in SWEEP {
            let space = PSpace::new(p, d, ScalarField::Real).unwrap();
            let cfg = BoundsConfig {
                samples: 100_000,
                source: RandomSource::with_stream(6, d as u64),
                ..BoundsConfig::default()
            };
            let r = sandwich_report(&space, X0Strategy::WorstCase, &cfg).unwrap();
            let se = r.combined_std_error();
            let upper = r.upper.value;
            let gap = (r.lower - upper) / se;
            worst = worst.max(gap);
            o.check(r.lower >= 1.0, || format!("p={p} d={d}: lower {} < 1", r.lower));
            o.check(gap <= 6.0, || format!("p={p} d={d}: lower {} upper {upper} se {se}", r.lower));
            if p == 2.0 {
                o.check((upper - r.lower).abs() <= 6.0 * se, || {
                    format!("p=2 d={d}: no collapse, {} vs {upper} se {se}", r.lower)
                });
            }
        }
    }
    o.note(format!("max (lower - upper)/se = {worst:+.2}"));
}

fn criterion_7(o: &mut Outcome) {
    let mut rng = RandomSource::new(7).rng();
    let mut pairs = 0;
    for n in 1..=16usize {
        for d in 1..=16 / n {
            pairs += 1;
            let z: Vec<Complex64> = (0..d).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))).collect();
            let expected = (d as f64).powi(n as i32);
            let m = second_moment(n, &z, &SignAverage::Exhaustive).unwrap();
            o.check((m.value - expected).abs() <= 1e-9 * expected, || {
                format!("n={n} d={d}: second moment {} vs {expected}", m.value)
            });
            for scale in [0.25, 0.5, 1.0, 1.5, 2.0, 4.0] {
                let r = scale * expected.sqrt();
                let t = chebyshev_tail_check(n, &z, r, &SignAverage::Exhaustive).unwrap();
                o.check(t.holds && t.empirical <= t.bound, || format!("n={n} d={d} R={r}: tail {} > {}", t.empirical, t.bound));
            }
        }
    }
    let s = exhaustive_sign_min(2, 2, 48).unwrap();
    o.check((s.value - 2.0).abs() <= 1e-9, || format!("sign min(2,2) = {}", s.value));

    let mut probes = 0;
    for d in 1..=3 {
        let net = TorusNet::new(24, d).unwrap();
        for _ in 0..10_000 {
            let z: Vec<Complex64> = (0..d).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))).collect();
            let (idx, dist) = net.nearest(&z).unwrap();
            let direct = idx
                .iter()
                .zip(&z)
                .map(|(&j, w)| (w - Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 24.0)).norm())
                .fold(0.0, f64::max);
            o.check(dist <= net.covering_radius() && direct <= net.covering_radius() + 1e-12, || {
                format!("d={d}: probe at distance {direct}")
            });
            probes += 1;
        }
    }
    o.note(format!("{pairs} (n,d) pairs, {probes} probes"));
}

fn torus_truth(s: &SignMatrix) -> f64 {
    const M: usize = 1 << 20;
    (0..M)
        .map(|i| {
            let z = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 2.0 * PI * i as f64 / M as f64)];
            f_evaluate(s, &z).unwrap().norm()
        })
        .fold(0.0, f64::max)
}

fn criterion_8(o: &mut Outcome) {
    let mut rng = RandomSource::new(8).rng();
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let s = SignMatrix::random(n, 2, &mut rng).unwrap();
        let est = sup_norm_polydisc(&s, 24 * n, true).unwrap();
        let cert = est.upper_certificate.unwrap();
        let truth = torus_truth(&s);
        let ratio = cert / est.value;
        worst_ratio = worst_ratio.max(ratio);
        o.check(est.value <= truth * (1.0 + 1e-9) && truth <= cert, || {
            format!("{:?}: witness {} truth {truth} certificate {cert}", s.rows(), est.value)
        });
        o.check(ratio <= 2.05, || format!("{:?}: ratio {ratio}", s.rows()));
    }
    for _ in 0..1000 {
        let n = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        let s = SignMatrix::random(n, d, &mut rng).unwrap();
        let cert = sup_norm_polydisc(&s, 24 * n, false).unwrap().upper_certificate.unwrap();
        let mut point = || {
            let mut v: Vec<Complex64> = (0..d)
                .map(|_| Complex64::from_polar(rng.random_range(0.0..=1.0), rng.random_range(0.0..2.0 * PI)))
                .collect();
            let k = rng.random_range(0..d);
            let r = v[k].norm();
            v[k] /= r;
            v
        };
        let (w, z) = (point(), point());
        let dist = w.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let lhs = (f_evaluate(&s, &w).unwrap() - f_evaluate(&s, &z).unwrap()).norm();
        o.check(lhs <= n as f64 * E * cert * dist + 1e-12, || format!("Lipschitz: {lhs} at distance {dist}"));
    }
    o.note(format!("max certificate/witness = {worst_ratio:.4}"));
}

fn criterion_9(o: &mut Outcome) {
    for n in 1..=5usize {
        for d in [1usize, 2, 3, 5] {
            let v = cn_infty_lower_bound(n, d).unwrap();
            let expected = 0.5 * ((d as f64).powi(n as i32) / ((24 * n) as f64).powi(d as i32)).sqrt();
            o.check((v - expected).abs() <= 1e-12 * expected, || format!("n={n} d={d}: {v} vs {expected}"));
        }
    }
    let ds = [1e2, 1e3, 1e4, 1e5, 1e6];
    let n = 1e12;
    let fixed: Vec<(f64, f64)> = ds.iter().map(|&d| (d, cn_infty_per_factor(n, d))).collect();
    let s = slope(&fixed);
    o.note(format!("slope at n=1e12: {s:.6}"));
    o.check((s - 0.5).abs() <= 0.01, || format!("per-factor slope {s}"));

    let sup: Vec<(f64, f64)> = ds
        .iter()
        .map(|&d| {
            let best = (0..=60).map(|e| cn_infty_per_factor(10f64.powf(e as f64 / 2.0), d)).fold(0.0, f64::max);
            (d, best)
        })
        .collect();
    let s = slope(&sup);
    o.note(format!("slope of sup over n: {s:.6}"));
    o.check((s - 0.5).abs() <= 0.01, || format!("sup over n slope {s}"));
}

fn criterion_10(o: &mut Outcome) {
    let bin = env!("CARGO_BIN_EXE_polarlab");
    let cases: &[&[&str]] = &[
        &["hilbert", "--d-range", "2..16", "--field", "real"],
        &["bounds", "--p", "3", "--d-range", "2..64", "--geometric", "--samples", "100000", "--seed", "10"],
        &["bounds", "--p", "inf", "--d", "12", "--samples", "100000", "--x0", "best-of-random", "--format", "json-lines"],
        &["rademacher", "--n", "2", "--d", "6", "--trials", "6", "--seed", "10"],
        &["rademacher", "--n", "3", "--d", "9", "--trials", "2", "--moment-trials", "50000", "--seed", "10"],
        &["integrals", "--kind", "log-pairing", "--measure", "pushforward", "--p", "1.5", "--d-range", "2..9", "--samples", "100000"],
        &["integrals", "--kind", "infnorm-moment", "--d-range", "4..256", "--geometric", "--samples", "100000"],
        &["oracle", "quadrature-L", "--d-range", "2..20"],
        &["oracle", "grid-norm", "--p", "1.5", "--rows", "1,0.5;0.2,-1;1,1", "--resolution", "4096"],
        &["oracle", "sign-min", "--n", "2", "--d", "3"],
    ];
    for args in cases {
        let outputs: Vec<_> = ["1", "2", "7"]
            .iter()
            .map(|t| Command::new(bin).args(*args).env("POLARLAB_THREADS", t).output().unwrap())
            .collect();
        let first = &outputs[0];
        o.check(first.status.success(), || format!("{args:?}: exit {:?}", first.status.code()));
        o.check(outputs.iter().all(|x| x.stdout == first.stdout), || format!("{args:?}: output depends on thread count"));
    }
    o.note(format!("{} commands × 3 thread counts", cases.len()));
}

type Criterion = (&'static str, fn(&mut Outcome), Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Hilbert closed forms", criterion_1, Duration::from_secs(10)),
        ("Monte Carlo consistency", criterion_2, Duration::from_secs(120)),
        ("extremal Hilbert configuration", criterion_3, Duration::from_secs(30)),
        ("monomial sup-norm exactness", criterion_4, Duration::from_secs(60)),
        ("asymptotic slopes", criterion_5, Duration::from_secs(600)),
        ("sandwich validity", criterion_6, Duration::from_secs(600)),
        ("torus identities", criterion_7, Duration::from_secs(120)),
        ("torus certificates", criterion_8, Duration::from_secs(180)),
        ("polydisc lower bound arithmetic", criterion_9, Duration::from_secs(5)),
        ("determinism across thread counts", criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let mut o = Outcome::new();
        let start = Instant::now();
        run(&mut o);
        let elapsed = start.elapsed();
        o.check(elapsed <= *budget, || format!("took {elapsed:?}, budget {budget:?}"));
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} {name} [{:.1}s] {}",
            i + 1,
            elapsed.as_secs_f64(),
            o.notes.join("; ")
        );
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
