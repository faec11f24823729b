//! Runs an [`ExperimentConfig`] and collects its records.

use std::time::Instant;

use num_complex::Complex64;

use super::config::{Experiment, ExperimentConfig, IntegralKind, MeasureKind};
use super::output::{sign_text, vector_text, Record};
use crate::bounds::{sandwich_report, BoundsConfig};
use crate::error::{Error, Result};
use crate::hilbert::{self, HilbertConstants};
use crate::oracle::{exhaustive_sign_min, grid_norm, quadrature_l, GridSpec};
use crate::product_poly::{FunctionalSystem, OptimizerConfig};
use crate::spaces::{p_norm, PSpace, RandomSource, Vector};
use crate::sphere_integrals::{self, fit_asymptotic_slope, Measure};
use crate::torus::{self, SignAverage, SignSearch};

/// Records of one run and whether every optimizer converged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub converged: bool,
}

const MOMENT_TAG: u64 = 0x6d6f;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    start: Instant,
    config_json: String,
}

impl Ctx<'_> {
    fn record(&self, kind: &str) -> Record {
        let mut r = Record::new(kind);
        r.push("version", env!("CARGO_PKG_VERSION"));
        r
    }

    fn finish(&self, mut r: Record) -> Record {
        if self.cfg.timing {
            r.push("elapsed_ms", self.start.elapsed().as_secs_f64() * 1e3);
        }
        r.push("config", self.config_json.as_str());
        r
    }
}

fn slope_record(ctx: &Ctx, series: &str, points: &[(f64, f64)]) -> Option<Record> {
    let fit = fit_asymptotic_slope(points).ok()?;
    let mut r = ctx.record("slope_fit");
    r.push("series", series)
        .push("slope", fit.slope)
        .push("intercept", fit.intercept)
        .push("r_squared", fit.r_squared)
        .push("points", fit.points.len());
    Some(ctx.finish(r))
}

/// Executes a validated config.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let ctx = Ctx {
        cfg,
        start: Instant::now(),
        config_json: serde_json::to_string(&cfg.experiment).expect("config serializes"),
    };
    let mut records = Vec::new();
    let mut converged = true;
    match &cfg.experiment {
        Experiment::Hilbert { d, field } => {
            for d in d.values() {
                let h = HilbertConstants::compute(d, *field)?;
                let q = quadrature_l(d, *field)?;
                let mut r = ctx.record("hilbert");
                r.push("d", d)
                    .push("field", field.to_string())
                    .push("l", h.l)
                    .push("c", h.c)
                    .push("gamma_bound", h.gamma_bound)
                    .push("quadrature_l", q)
                    .push("residual", h.l - q)
                    .opt("printed_odd_l", h.printed_odd_l);
                records.push(ctx.finish(r));
            }
        }
        Experiment::Bounds {
            p,
            d,
            field,
            samples,
            seed,
            trunc_m,
            x0,
            candidates,
            starts,
        } => {
            let mut uppers = Vec::new();
            let mut lowers = Vec::new();
            for d in d.values() {
                let space = PSpace::new(*p, d, *field)?;
                let source = RandomSource::with_stream(*seed, d as u64);
                let bc = BoundsConfig {
                    samples: *samples,
                    truncation_m: trunc_m.unwrap_or(f64::INFINITY),
                    optimizer: OptimizerConfig {
                        starts: *starts,
                        source,
                        ..OptimizerConfig::default()
                    },
                    source,
                    ..BoundsConfig::default()
                };
                let rep = sandwich_report(&space, x0.strategy(*candidates), &bc)?;
                converged &= rep.upper_converged;
                uppers.push((d as f64, rep.upper.value));
                lowers.push((d as f64, rep.lower));
                let mut r = ctx.record("bounds");
                r.push("p", *p)
                    .push("d", d)
                    .push("field", field.to_string())
                    .push("samples", *samples)
                    .push("seed", *seed)
                    .push("lower", rep.lower)
                    .push("lower_line", format!("{:?}", rep.lower_line).to_lowercase())
                    .push("mc_lower", rep.mc_lower.value)
                    .push("mc_lower_se", rep.mc_lower.std_error)
                    .push("lower_certified", rep.lower_certified)
                    .push("upper", rep.upper.value)
                    .push("upper_se", rep.upper.std_error)
                    .push("combined_se", rep.combined_std_error())
                    .opt("step2_lower", rep.step2_lower)
                    .opt("torus_lower", rep.torus_lower)
                    .push("hilbert_c", if d >= 2 { hilbert::hilbert_polarization(d, *field)? } else { 1.0 })
                    .push("converged", rep.upper_converged)
                    .push("x0", vector_text(&rep.lower_witness_x0))
                    .push("psi0", vector_text(&rep.upper_witness_psi0));
                records.push(ctx.finish(r));
            }
            records.extend(slope_record(&ctx, "upper", &uppers));
            records.extend(slope_record(&ctx, "lower", &lowers));
        }
        Experiment::Rademacher {
            n,
            d,
            trials,
            exhaustive,
            net_n,
            seed,
            moment_trials,
        } => {
            let (n, d) = (*n, *d);
            let source = RandomSource::new(*seed);
            let mode = if *exhaustive { SignSearch::Exhaustive } else { SignSearch::Random };
            let rep = torus::search_good_signs(n, d, *trials, mode, *net_n, &source)?;
            let cert = rep.sup_norm.upper_certificate.unwrap_or(f64::NAN);
            let mut r = ctx.record("rademacher");
            r.push("n", n)
                .push("d", d)
                .push("seed", *seed)
                .push("net_n", rep.net_n)
                .push("mode", if *exhaustive { "exhaustive" } else { "random" })
                .push("trials_used", rep.trials_used)
                .push("sup_norm", rep.sup_norm.value)
                .push("upper_certificate", cert)
                .push("certificate_factor", torus::certificate_factor(n, rep.net_n))
                .push("certificate_ratio", cert / rep.sup_norm.value)
                .push("heuristic_certificate", rep.sup_norm.heuristic_certificate)
                .push("threshold_2r", rep.threshold_2r)
                .push("satisfied", rep.satisfied)
                .push("second_moment_floor", (d as f64).powf(n as f64 / 2.0))
                .push("cn_lower_bound", torus::cn_infty_lower_bound(n, d)?)
                .push("per_factor_root", torus::cn_infty_per_factor(n as f64, d as f64))
                .push("sign", sign_text(&rep.sign.rows()))
                .push("witness", vector_text(&rep.sup_norm.witness));

            let mut rng = source.substream(MOMENT_TAG).rng();
            let z: Vec<Complex64> = (0..d)
                .map(|_| Complex64::from_polar(1.0, rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::TAU)))
                .collect();
            let avg = if n * d <= 20 {
                SignAverage::Exhaustive
            } else {
                SignAverage::MonteCarlo {
                    trials: *moment_trials,
                    source: source.substream(MOMENT_TAG + 1),
                }
            };
            let m = torus::second_moment(n, &z, &avg)?;
            let radius = (2.0 * (d as f64).powi(n as i32)).sqrt();
            let tail = torus::chebyshev_tail_check(n, &z, radius, &avg)?;
            r.push("moment_mode", if avg == SignAverage::Exhaustive { "exhaustive" } else { "mc" })
                .push("second_moment", m.value)
                .push("second_moment_se", m.std_error)
                .push("second_moment_expected", (d as f64).powi(n as i32))
                .push("tail_radius", radius)
                .push("tail_empirical", tail.empirical)
                .push("tail_bound", tail.bound)
                .push("tail_holds", tail.holds);
            records.push(ctx.finish(r));
        }
        Experiment::Integrals {
            kind,
            p,
            d,
            field,
            samples,
            seed,
            trunc_m,
            measure,
        } => {
            let mut points = Vec::new();
            for d in d.values() {
                let source = RandomSource::with_stream(*seed, d as u64);
                let m = trunc_m.unwrap_or(f64::INFINITY);
                let (est, value) = match kind {
                    IntegralKind::LogPairing => {
                        let x0 = Vector::basis(d, 0);
                        let ms = match measure {
                            MeasureKind::Uniform => Measure::UniformEuclidean,
                            MeasureKind::Pushforward => Measure::QPushforward(crate::spaces::dual_exponent(*p)?),
                        };
                        let e = sphere_integrals::mc_log_pairing_integral(&x0, ms, *field, *samples, m, &source)?;
                        (e, (-e.mean).exp())
                    }
                    IntegralKind::PnormMoment => {
                        let e = sphere_integrals::mc_pnorm_moment(*p, d, *field, *samples, &source)?;
                        (e, e.mean)
                    }
                    IntegralKind::InfnormMoment => {
                        let e = sphere_integrals::mc_infnorm_moment(d, *field, *samples, &source)?;
                        (e, e.mean)
                    }
                    IntegralKind::LogInversePnorm => {
                        let e = sphere_integrals::mc_log_inverse_pnorm(*p, d, *field, *samples, &source)?;
                        (e, e.mean.exp())
                    }
                };
                points.push((d as f64, value));
                let mut r = ctx.record("integral");
                r.push("kind", serde_json::to_value(kind).expect("kind").as_str().unwrap_or_default())
                    .push("p", *p)
                    .push("d", d)
                    .push("field", field.to_string())
                    .push("seed", *seed)
                    .push("mean", est.mean)
                    .push("std_error", est.std_error)
                    .push("value", value)
                    .push("samples", est.samples)
                    .push("redraws", est.redraws)
                    .push("truncation_m", est.truncation_m);
                records.push(ctx.finish(r));
            }
            records.extend(slope_record(&ctx, "value", &points));
        }
        Experiment::QuadratureL { d, field } => {
            for d in d.values() {
                let q = quadrature_l(d, *field)?;
                let l = hilbert::l_constant(d, *field)?;
                let mut r = ctx.record("quadrature_l");
                r.push("d", d)
                    .push("field", field.to_string())
                    .push("quadrature_l", q)
                    .push("closed_form_l", l)
                    .push("residual", l - q);
                records.push(ctx.finish(r));
            }
        }
        Experiment::GridNorm {
            p,
            field,
            rows,
            resolution,
        } => {
            let space = PSpace::new(*p, rows[0].len(), *field)?;
            let sys = FunctionalSystem::from_real_rows(rows, space)?;
            let g = grid_norm(&sys, &GridSpec::new(*resolution, space)?)?;
            let mut r = ctx.record("grid_norm");
            r.push("p", *p)
                .push("d", space.dim())
                .push("field", field.to_string())
                .push("factors", rows.len())
                .push("resolution", *resolution)
                .push("points", g.points)
                .push("value", g.value)
                .push("witness", vector_text(&g.witness));
            if rows.len() == 1 {
                r.push("dual_norm", p_norm(&sys.rows()[0], space.q()));
            }
            records.push(ctx.finish(r));
        }
        Experiment::SignMin { n, d, net_n } => {
            let net = net_n.unwrap_or(24 * n);
            let s = exhaustive_sign_min(*n, *d, net)?;
            let mut r = ctx.record("sign_min");
            r.push("n", *n)
                .push("d", *d)
                .push("net_n", net)
                .push("value", s.value)
                .push("certificate", s.certificate)
                .push("index", s.index)
                .push("sign", sign_text(&s.sign.rows()));
            records.push(ctx.finish(r));
        }
    }
    if records.is_empty() {
        return Err(Error::InvalidArgument("the experiment produced no records".into()));
    }
    Ok(RunOutput { records, converged })
}
