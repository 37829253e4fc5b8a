use std::fmt::Write as _;

use serde::Serialize;
use weakstrat::analysis::quadrature::{hermite_mean_limit, hermite_second_moment_limit, QuadratureResolution};
use weakstrat::analysis::scaling::{moment_scaling, MomentEstimator, ScalingRequest};
use weakstrat::analysis::stats::{correlation, median, SampleSet};
use weakstrat::analysis::taylor::{gamma_exact, taylor_residual};
use weakstrat::analysis::{covar_bound_audit, ks_two_sample, orthogonality_audit, CheckResult, ExperimentReport};
use weakstrat::experiment::{estimator_samples, hermite_samples, oracle_samples, replicate, sextic_samples};
use weakstrat::kernel::{kappa_constant, left_endpoint_cube_defect, right_endpoint_cube_defect, KernelConstants};
use weakstrat::rng::{NormalStream, Substream};
use weakstrat::variations::{power_variation, signed_cubic};
use weakstrat::{FbmSampler, Grid, SeedPolicy, SmoothMap};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;

/// A finished command: its report plus the CSV files to persist.
pub struct RunOutput {
    pub report: ExperimentReport,
    pub files: Vec<(String, String)>,
}

/// Grid level `k` draws replications from streams `(k << 40) + r`.
fn level_seeds(cfg: &ExperimentConfig, level: usize) -> SeedPolicy {
    SeedPolicy::new(cfg.master_seed, (level as u64) << 40)
}

fn new_report(cfg: &ExperimentConfig) -> ExperimentReport {
    ExperimentReport::new(
        cfg.command.name(),
        SeedPolicy::new(cfg.master_seed, 0),
        cfg.n_list.clone(),
        cfg.horizon,
        cfg.replications,
    )
}

fn grid(cfg: &ExperimentConfig, n: u64) -> Result<Grid, CliError> {
    Ok(Grid::new(n, cfg.horizon)?)
}

fn ascending(cfg: &ExperimentConfig) -> Vec<u64> {
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn kappa(cfg: &ExperimentConfig) -> KernelConstants {
    kappa_constant(cfg.truncation)
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        Command::Kappa => unreachable!("kappa prints directly"),
        Command::Converge => converge(cfg),
        Command::Variations => variations(cfg),
        Command::Sextic => sextic(cfg),
        Command::Hermite => hermite(cfg),
        Command::Scaling => scaling(cfg),
        Command::Taylor => taylor(cfg),
        Command::Audit => audit(cfg),
    }
}

#[derive(Serialize)]
struct KsRow {
    n: u64,
    marginal: &'static str,
    statistic: f64,
    critical_001: f64,
}

fn corr_matrix(cols: [&[f64]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[1.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                out[i][j] = correlation(cols[i], cols[j]);
            }
        }
    }
    out
}

fn converge(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let mut files = Vec::new();
    let mut ks_rows = Vec::new();
    let mut corr = Vec::new();
    let g = [cfg.integrand.clone()];
    for (level, &n) in cfg.n_list.iter().enumerate() {
        let seeds = level_seeds(cfg, level);
        let est = estimator_samples(&g, grid(cfg, n)?, cfg.replications, seeds, cfg.method)?;
        let orc = oracle_samples(&g, cfg.refinement_factor * n, cfg.horizon, cfg.replications, seeds)?;
        let pairs: [(&'static str, &[f64], &[f64]); 3] = [
            ("B(T)", &est.terminal, &orc.terminal),
            ("V_n(B,T) vs kappa W(T)", &est.cubic, &orc.cubic),
            ("I_n(g,B,T) vs int g(B) dB", &est.integrals[0], &orc.integrals[0]),
        ];
        for (name, a, b) in pairs {
            let r = ks_two_sample(&SampleSet::new(a.to_vec(), name)?, &SampleSet::new(b.to_vec(), name)?)?;
            report.push_check(CheckResult::below(format!("n={n} KS {name}"), r.statistic, r.critical_001));
            ks_rows.push(KsRow { n, marginal: name, statistic: r.statistic, critical_001: r.critical_001 });
        }
        corr.push(serde_json::json!({
            "n": n,
            "estimator": corr_matrix([&est.terminal, &est.cubic, &est.integrals[0]]),
            "oracle": corr_matrix([&orc.terminal, &orc.cubic, &orc.integrals[0]]),
        }));
        let mut csv = String::from("replication,b_t,v_n,i_n,oracle_b_t,oracle_kappa_w,oracle_integral\n");
        for r in 0..cfg.replications {
            let _ = writeln!(
                csv,
                "{r},{},{},{},{},{},{}",
                est.terminal[r], est.cubic[r], est.integrals[0][r], orc.terminal[r], orc.cubic[r], orc.integrals[0][r]
            );
        }
        files.push((format!("converge_n{n}.csv"), csv));
    }
    report.set_detail("integrand", cfg.integrand.to_string());
    report.set_detail("oracle_refinement_factor", cfg.refinement_factor);
    report.set_detail("ks", ks_rows);
    report.set_detail("correlations_b_v_i", corr);
    Ok(RunOutput { report, files })
}

/// `E|Z|^p` for the orders tabulated by `variations`.
const ABS_NORMAL_MOMENTS: [(f64, f64); 4] = [
    (2.0, 1.0),
    (3.0, 1.595_769_121_605_730_7), // 2 sqrt(2/pi)
    (4.0, 3.0),
    (6.0, 15.0),
];

fn variations(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for (level, &n) in cfg.n_list.iter().enumerate() {
        let grid = grid(cfg, n)?;
        let sampler = FbmSampler::new(grid, cfg.method)?;
        let rows: Vec<Vec<f64>> = replicate(cfg.replications, level_seeds(cfg, level), |s| {
            let path = sampler.sample(s);
            let mut row: Vec<f64> = ABS_NORMAL_MOMENTS
                .iter()
                .map(|&(p, _)| power_variation(&path, p, false).map(|v| v.terminal()).unwrap_or(f64::NAN))
                .collect();
            row.push(signed_cubic(&path).terminal());
            row
        });
        let m = grid.m() as f64;
        let mut csv = String::from("replication,v2,v3_abs,v4,v6,v3_signed\n");
        for (r, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(csv, "{r},{}", cells.join(","));
        }
        files.push((format!("variations_n{n}.csv"), csv));
        let column = |k: usize| -> Result<SampleSet, CliError> {
            Ok(SampleSet::new(rows.iter().map(|r| r[k]).collect(), "power variation")?)
        };
        for (k, &(p, abs_moment)) in ABS_NORMAL_MOMENTS.iter().enumerate() {
            let s = column(k)?;
            let exact = m * (n as f64).powf(-p / 6.0) * abs_moment;
            let name = format!("n={n} mean V_n^{p}");
            report.push_check(CheckResult::within(name, s.mean(), exact, 4.0 * s.std_error()));
            summary.push(serde_json::json!({"n": n, "p": p, "mean": s.mean(), "std_error": s.std_error(), "exact_mean": exact}));
        }
        let s = column(ABS_NORMAL_MOMENTS.len())?;
        report.push_check(CheckResult::within(format!("n={n} mean signed V_n^3"), s.mean(), 0.0, 4.0 * s.std_error()));
        summary.push(serde_json::json!({"n": n, "p": "3 signed", "mean": s.mean(), "variance": s.variance()}));
    }
    report.set_detail("summary", summary);
    Ok(RunOutput { report, files })
}

fn sextic(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let mut csv = String::from("n,replication,terminal,sup_deviation\n");
    let mut medians = Vec::new();
    let ns = ascending(cfg);
    for (level, &n) in ns.iter().enumerate() {
        let rows = sextic_samples(grid(cfg, n)?, cfg.replications, level_seeds(cfg, level), cfg.method)?;
        for (r, row) in rows.iter().enumerate() {
            let _ = writeln!(csv, "{n},{r},{},{}", row.terminal, row.sup_deviation);
        }
        let s = SampleSet::new(rows.iter().map(|r| r.terminal).collect(), "V_n^6(B,T)")?;
        let expected = 15.0 * cfg.horizon;
        report.push_check(CheckResult::within(format!("n={n} mean V_n^6(B,T)"), s.mean(), expected, 3.0 * s.std_error()));
        let med = median(&rows.iter().map(|r| r.sup_deviation).collect::<Vec<_>>());
        medians.push(serde_json::json!({"n": n, "median_sup_deviation": med}));
        if let Some(prev) = medians.len().checked_sub(2).map(|i| medians[i]["median_sup_deviation"].as_f64().unwrap()) {
            report.push_check(CheckResult::below(format!("n={n} median sup deviation decreases"), med, prev));
        }
    }
    report.set_detail("median_sup_deviation", medians);
    Ok(RunOutput { report, files: vec![("sextic.csv".into(), csv)] })
}

fn hermite(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let g = &cfg.integrand;
    if !g.is_bounded() {
        eprintln!("warning: integrand {g} is unbounded; the Hermite variation limits assume bounded derivatives");
    }
    let mut report = new_report(cfg);
    let mut files = Vec::new();
    let res = QuadratureResolution::default();
    let kappa_sq = kappa_constant(cfg.truncation).kappa_sq;
    let mean_limit = hermite_mean_limit(g, cfg.horizon, res);
    let second_moment = hermite_second_moment_limit(g, kappa_sq, cfg.horizon, res);
    let mut rows_out = Vec::new();
    for (level, &n) in cfg.n_list.iter().enumerate() {
        let rows = hermite_samples(g, grid(cfg, n)?, cfg.replications, level_seeds(cfg, level), cfg.method)?;
        let left = SampleSet::new(rows.iter().map(|r| r.left).collect(), "G_n^-")?;
        let right = SampleSet::new(rows.iter().map(|r| r.right).collect(), "G_n^+")?;
        report.push_check(CheckResult::within(format!("n={n} mean G_n^-"), left.mean(), mean_limit, 3.0 * left.std_error()));
        report.push_check(CheckResult::within(format!("n={n} mean G_n^+"), right.mean(), -mean_limit, 3.0 * right.std_error()));
        report.push_check(CheckResult::within(format!("n={n} var G_n^-"), left.variance(), second_moment, 0.1 * second_moment));
        rows_out.push(serde_json::json!({
            "n": n, "mean_left": left.mean(), "se_left": left.std_error(),
            "mean_right": right.mean(), "se_right": right.std_error(), "var_left": left.variance(),
        }));
        let mut csv = String::from("replication,left,right\n");
        for (r, row) in rows.iter().enumerate() {
            let _ = writeln!(csv, "{r},{},{}", row.left, row.right);
        }
        files.push((format!("hermite_n{n}.csv"), csv));
    }
    report.set_detail("integrand", g.to_string());
    report.set_detail("mean_limit", mean_limit);
    report.set_detail("second_moment_limit", second_moment);
    report.set_detail("variance_limit", second_moment - mean_limit * mean_limit);
    report.set_detail("levels", rows_out);
    Ok(RunOutput { report, files })
}

fn scaling(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let n = cfg.n_list[0];
    let mut csv = String::from("estimator,gap,moment,log_gap_over_n,log_moment\n");
    let mut fits = Vec::new();
    for (k, est) in MomentEstimator::ALL.into_iter().enumerate() {
        let mut req = ScalingRequest::new(est, n, cfg.replications, level_seeds(cfg, k));
        req.weight = cfg.integrand.clone();
        let out = moment_scaling(&req)?;
        for ((gap, m), (x, y)) in out.gaps.iter().zip(&out.moments).zip(&out.fit.points) {
            let _ = writeln!(csv, "{est},{gap},{m},{x},{y}");
        }
        let bound = 0.9 * est.theoretical_exponent();
        report.push_check(CheckResult::at_least(format!("{est} slope"), out.fit.slope, bound));
        report.push_check(CheckResult::at_least(format!("{est} r^2"), out.fit.r_squared, 0.95));
        fits.push(serde_json::json!({"estimator": est.name(), "fit": out.fit, "theoretical_exponent": est.theoretical_exponent()}));
    }
    report.set_detail("weight", cfg.integrand.to_string());
    report.set_detail("fits", fits);
    Ok(RunOutput { report, files: vec![("scaling.csv".into(), csv)] })
}

fn taylor(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let mut rng = NormalStream::new(SeedPolicy::new(cfg.master_seed, 0), Substream::Uniform);
    let mut uniform = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_uniform();
    let mut csv = String::from("pair,degree,a,b,trapezoid_defect,gamma_term,r6,integrand_r6\n");
    let (mut worst_poly, mut worst_g) = (0.0f64, 0.0f64);
    for pair in 0..cfg.replications {
        let degree = pair % 6;
        let g = SmoothMap::polynomial((0..=degree).map(|_| uniform(-3.0, 3.0)).collect());
        let (a, b) = (uniform(-2.0, 2.0), uniform(-2.0, 2.0));
        let r = taylor_residual(&g, a, b);
        let d1 = g.derivative(1);
        let scale = g.eval(a).abs() + g.eval(b).abs() + 0.5 * (d1.eval(a).abs() + d1.eval(b).abs()) * (b - a).abs();
        if scale > 0.0 {
            worst_poly = worst_poly.max(r.r6.abs() / scale);
        }
        let rg = taylor_residual(&cfg.integrand, a, b);
        worst_g = worst_g.max(rg.r6.abs());
        let _ = writeln!(csv, "{pair},{degree},{a},{b},{},{},{},{}", r.trapezoid_defect, r.gamma_term, r.r6, rg.r6);
    }
    report.push_check(CheckResult::below("max relative |R6|, degree <= 5", worst_poly, 1e-9));
    let gamma = gamma_exact();
    report.push_check(CheckResult::flag(
        "gamma = 1/(5! 2^4) - 1/(4! 2^4) = -1/480",
        *gamma.numer() as f64 / *gamma.denom() as f64,
        -1.0 / 480.0,
        *gamma.numer() == -1 && *gamma.denom() == 480,
    ));
    report.set_detail("integrand", cfg.integrand.to_string());
    report.set_detail("integrand_max_abs_r6", worst_g);
    Ok(RunOutput { report, files: vec![("taylor.csv".into(), csv)] })
}

const AUDIT_CORRELATIONS: [f64; 7] = [-1.0, -0.9, -0.5, 0.0, 0.5, 0.9, 1.0];

fn audit(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut report = new_report(cfg);
    let mut items_csv = String::from("n,item,max_ratio,min_ratio,pairs\n");
    let mut defects_csv = String::from("n,left_defect,right_defect\n");
    let mut prev: Option<(f64, f64)> = None;
    for &n in &ascending(cfg) {
        let a = covar_bound_audit(n, cfg.horizon)?;
        for it in &a.items {
            let _ = writeln!(items_csv, "{n},{},{},{},{}", it.item, it.max_ratio, it.min_ratio, it.pairs);
        }
        let i = a.item("i").expect("item i");
        report.push_check(CheckResult::within(format!("n={n} item (i) self-pair ratio"), i.max_ratio, 1.0, 0.0));
        let iv = a.item("iv").expect("item iv");
        report.push_check(CheckResult::below(format!("n={n} item (iv) constant"), iv.max_ratio, 1.0));
        let finite = a.items.iter().all(|it| it.is_finite());
        report.push_check(CheckResult::flag(format!("n={n} all ratios finite"), a.beta_upper_constant, a.beta_lower_reciprocal, finite));
        let left = left_endpoint_cube_defect(n, cfg.horizon)?;
        let right = right_endpoint_cube_defect(n, cfg.horizon)?;
        let _ = writeln!(defects_csv, "{n},{left},{right}");
        if let Some((pl, pr)) = prev {
            report.push_check(CheckResult::below(format!("n={n} left defect decreases"), left, pl));
            report.push_check(CheckResult::below(format!("n={n} right defect decreases"), right, pr));
        }
        prev = Some((left, right));
    }
    let mut orth_csv = String::from("p,q,correlation,deviation\n");
    let mut worst = 0.0f64;
    for p in 0..=4 {
        for q in 0..=4 {
            for c in AUDIT_CORRELATIONS {
                let d = orthogonality_audit(p, q, c)?;
                worst = worst.max(d.abs());
                let _ = writeln!(orth_csv, "{p},{q},{c},{d}");
            }
        }
    }
    report.push_check(CheckResult::below("max Hermite orthogonality deviation", worst, 1e-8));
    Ok(RunOutput {
        report,
        files: vec![
            ("audit.csv".into(), items_csv),
            ("defects.csv".into(), defects_csv),
            ("orthogonality.csv".into(), orth_csv),
        ],
    })
}
