use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ibt_core::induced::{AsymptoticReport, KacReport, DEFAULT_CELLS, DEFAULT_R_MAX};
use ibt_core::limits::{
    birkhoff_ensemble, correlation, green_kubo, predict_limit, xi_tail, GreenKubo, LimitCase, LimitPrediction,
    Observable,
};
use ibt_core::parallel::{chunk_rng, chunks};
use ibt_core::stable::ks_distance;
use ibt_core::stats::{empirical_cf, summarize, Summary};
use ibt_core::ulam::Eigenvalue;
use ibt_core::{
    build_ulam, leading_spectrum, make_beta_icf, Execution, IbtError, IbtMap, InducedSystem, SquarePoint,
    StableParams,
};
use serde::{Deserialize, Serialize};

use crate::output::{artifact, invalid, Failure, Sink};

fn system(alpha0: f64, alpha1: f64, n_cells: usize, r_max: usize) -> Result<InducedSystem, Failure> {
    let map = IbtMap::new(&make_beta_icf(alpha0, alpha1)?)?;
    Ok(InducedSystem::new(map, n_cells, r_max)?)
}

fn at_least(name: &str, v: usize, min: usize) -> Result<(), Failure> {
    if v < min {
        return Err(invalid(format!("`{name}` must be at least {min}, got {v}")));
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct IcfInfoArgs {
    #[arg(long)]
    alpha0: f64,
    #[arg(long)]
    alpha1: f64,
    /// Abscissa for the contact-coefficient estimates.
    #[arg(long, default_value_t = 1e-6)]
    probe: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn icf_info(a: IcfInfoArgs) -> Result<(), Failure> {
    let cf = make_beta_icf(a.alpha0, a.alpha1)?;
    let audit = cf.verify_contact(a.probe)?;
    let sink = Sink::open(a.out.as_deref(), "icf-info.json")?;
    let fm = ibt_core::build_factor(&cf)?;
    #[derive(Serialize)]
    struct Info {
        alpha0: f64,
        alpha1: f64,
        c0: f64,
        c1: f64,
        #[serde(rename = "A")]
        a: f64,
        contact_audit: ibt_core::icf::ContactAudit,
    }
    let info = Info {
        alpha0: cf.alpha0(),
        alpha1: cf.alpha1(),
        c0: cf.c0(),
        c1: cf.c1(),
        a: fm.cut(),
        contact_audit: audit,
    };
    sink.json(&artifact("icf-info", &a, info))
}

#[derive(Args, Debug, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long)]
    alpha0: f64,
    #[arg(long)]
    alpha1: f64,
    #[arg(long)]
    x0: f64,
    #[arg(long)]
    y0: f64,
    /// Number of steps; the output has `n + 1` rows.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn trajectory(a: TrajectoryArgs) -> Result<(), Failure> {
    let pt = SquarePoint::new(a.x0, a.y0)?;
    let map = IbtMap::new(&make_beta_icf(a.alpha0, a.alpha1)?)?;
    let sink = Sink::open(a.out.as_deref(), "trajectory.csv")?;
    let orbit = map.iterate(pt, a.n)?;
    let header = artifact("trajectory", &a, serde_json::json!({}));
    sink.csv(
        &header,
        &["k", "x", "y"],
        orbit.iter().enumerate().map(|(k, p)| vec![k as f64, p.x, p.y]),
    )
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitAsymArgs {
    #[arg(long)]
    alpha0: f64,
    #[arg(long)]
    alpha1: f64,
    /// Orbit index at which the asymptotics are compared (at least 1000).
    #[arg(long, default_value_t = 100_000)]
    nmax: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn orbit_asym(a: OrbitAsymArgs) -> Result<(), Failure> {
    at_least("nmax", a.nmax, 1000)?;
    let sys = system(a.alpha0, a.alpha1, a.nmax.max(10_000) + 1, DEFAULT_R_MAX)?;
    let sink = Sink::open(a.out.as_deref(), "orbit-asym.json")?;
    #[derive(Serialize)]
    struct Report {
        p: f64,
        q: f64,
        base_length: f64,
        cells_tabulated: usize,
        asymptotics: AsymptoticReport,
        kac: KacReport,
        tail_exponent: f64,
        tail_exponent_log_spaced: f64,
        tail_exponent_predicted: f64,
    }
    let o = sys.orbit();
    let alpha = sys.map().cut_function().alpha();
    let report = Report {
        p: o.p,
        q: o.q,
        base_length: o.base_length(),
        cells_tabulated: sys.cells().n_max(),
        asymptotics: sys.check_orbit_asymptotics(a.nmax)?,
        kac: sys.kac_sum(),
        tail_exponent: sys.tail_exponent(100, 10_000)?,
        tail_exponent_log_spaced: sys.tail_exponent_log_spaced(100, 10_000, 200)?,
        tail_exponent_predicted: -(2.0 + 1.0 / alpha),
    };
    sink.json(&artifact("orbit-asym", &a, report))
}

#[derive(Args, Debug, Serialize)]
pub struct ReturnHistArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    /// Uniform base points.
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest return time given its own row; longer returns are counted
    /// in the header.
    #[arg(long, default_value_t = 1000)]
    max_n: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Default)]
struct HistCounters {
    beyond_max_n: u64,
    near_cut_redraws: u64,
    censored: u64,
}

pub fn return_hist(a: ReturnHistArgs) -> Result<(), Failure> {
    at_least("samples", a.samples, 1)?;
    at_least("max_n", a.max_n, 2)?;
    let sys = system(a.alpha0, a.alpha1, DEFAULT_CELLS.max(a.max_n + 1), DEFAULT_R_MAX)?;
    let sink = Sink::open(a.out.as_deref(), "return-hist.csv")?;
    let o = sys.orbit();
    let parts = chunks(a.samples, 1 << 16);
    let per_chunk = Execution::Auto.map(parts.len(), |c| -> Result<(Vec<u64>, HistCounters), IbtError> {
        use rand::Rng;
        let mut rng = chunk_rng(a.seed, c as u64);
        let mut counts = vec![0u64; a.max_n + 1];
        let mut k = HistCounters::default();
        let mut done = 0;
        while done < parts[c].1 {
            let x = o.p + (o.q - o.p) * rng.random::<f64>();
            match sys.return_time(x) {
                Ok(r) if r <= a.max_n => counts[r] += 1,
                Ok(_) => k.beyond_max_n += 1,
                Err(IbtError::NearCut { .. }) => {
                    k.near_cut_redraws += 1;
                    continue;
                }
                Err(IbtError::TailOverflow { .. }) => k.censored += 1,
                Err(e) => return Err(e),
            }
            done += 1;
        }
        Ok((counts, k))
    });
    let mut counts = vec![0u64; a.max_n + 1];
    let mut k = HistCounters::default();
    for r in per_chunk {
        let (c, kk) = r?;
        for (t, v) in counts.iter_mut().zip(c) {
            *t += v;
        }
        k.beyond_max_n += kk.beyond_max_n;
        k.near_cut_redraws += kk.near_cut_redraws;
        k.censored += kk.censored;
    }
    let total = a.samples as f64;
    let header = artifact("return-hist", &a, serde_json::json!({ "counters": k }));
    sink.csv(
        &header,
        &["n", "count", "fraction", "predicted"],
        (2..=a.max_n).map(|n| {
            let pred = sys.cell_measure(n).unwrap_or(f64::NAN);
            vec![n as f64, counts[n] as f64, counts[n] as f64 / total, pred]
        }),
    )
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationObservable {
    /// Indicator of the base `[p, q]` with ramps of width 0.05.
    BaseIndicator,
    /// `x - 1/2`
    LinearX,
    /// `y - 1/2`
    LinearY,
}

#[derive(Args, Debug, Serialize)]
pub struct CorrelationsArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    #[arg(long)]
    kmax: usize,
    /// Initial points; each orbit supplies every lag.
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CorrelationObservable::BaseIndicator)]
    observable: CorrelationObservable,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn correlations(a: CorrelationsArgs) -> Result<(), Failure> {
    at_least("samples", a.samples, 1)?;
    let sys = system(a.alpha0, a.alpha1, 1000, DEFAULT_R_MAX)?;
    let o = sys.orbit();
    let obs = match a.observable {
        CorrelationObservable::BaseIndicator => Observable::smooth_indicator(o.p, o.q, 0.05),
        CorrelationObservable::LinearX => Observable::linear_x(1.0),
        CorrelationObservable::LinearY => Observable::linear_y(1.0),
    };
    let sink = Sink::open(a.out.as_deref(), "correlations.csv")?;
    let ks: Vec<usize> = (0..=a.kmax).collect();
    let c = correlation(&obs, &obs, sys.map(), &ks, a.samples, a.seed, Execution::Auto)?;
    let header = artifact("correlations", &a, serde_json::json!({ "redraws": c.redraws }));
    sink.csv(
        &header,
        &["k", "cor", "se"],
        (0..c.k.len()).map(|i| vec![c.k[i] as f64, c.cor[i], c.se[i]]),
    )
}

#[derive(Args, Debug, Serialize)]
pub struct LimitLawArgs {
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn default_r_max() -> usize {
    DEFAULT_R_MAX
}
fn default_n_cells() -> usize {
    DEFAULT_CELLS
}
fn default_t_grid() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0]
}
fn default_gk_samples() -> usize {
    1_000_000
}
fn default_gk_kmax() -> usize {
    2000
}
fn default_xi_samples() -> usize {
    100_000
}

/// Contents of `limit-law --config`. The seed has no default.
#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct LimitLawConfig {
    pub alpha0: f64,
    pub alpha1: f64,
    pub observable: Observable,
    pub n: usize,
    pub n_traj: usize,
    pub seed: u64,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    /// Green–Kubo sample size, used when the prediction is the CLT.
    #[serde(default = "default_gk_samples")]
    pub gk_samples: usize,
    #[serde(default = "default_gk_kmax")]
    pub gk_kmax: usize,
    /// Excursions drawn to count censoring; 0 skips the check.
    #[serde(default = "default_xi_samples")]
    pub xi_samples: usize,
}

impl LimitLawConfig {
    fn validate(&self) -> Result<(), Failure> {
        at_least("n", self.n, 1)?;
        at_least("n_traj", self.n_traj, 1)?;
        at_least("r_max", self.r_max, 2)?;
        at_least("n_cells", self.n_cells, 2)?;
        at_least("gk_samples", self.gk_samples, 2)?;
        if self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(invalid("`t_grid` must be finite"));
        }
        self.observable.validate()?;
        make_beta_icf(self.alpha0, self.alpha1)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CfPoint {
    t: f64,
    empirical_re: f64,
    empirical_im: f64,
    model_re: f64,
    model_im: f64,
    distance: f64,
}

#[derive(Serialize)]
struct LimitLawResult {
    threads: usize,
    prediction: LimitPrediction,
    green_kubo: Option<GreenKubo>,
    /// Law compared against: the prediction's target, or `N(0, sigma^2)`
    /// with the Green–Kubo variance in the CLT case.
    target: Option<StableParams>,
    ensemble: Summary,
    redraws: usize,
    ks: Option<f64>,
    cf: Vec<CfPoint>,
    cf_sup_distance: Option<f64>,
    xi_samples: usize,
    xi_censored: Option<usize>,
}

pub fn limit_law(a: LimitLawArgs, threads: usize) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.config).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            invalid(format!("config not found: {}", a.config.display()))
        } else {
            invalid(format!("cannot read config {}: {e}", a.config.display()))
        }
    })?;
    let cfg: LimitLawConfig =
        serde_json::from_str(&text).map_err(|e| invalid(format!("malformed config {}: {e}", a.config.display())))?;
    cfg.validate()?;
    let sink = Sink::open(a.out.as_deref(), "limit-law.json")?;

    let sys = system(cfg.alpha0, cfg.alpha1, cfg.n_cells, cfg.r_max)?;
    let exec = Execution::Auto;
    let prediction = predict_limit(&cfg.observable, &sys)?;
    let (green_kubo, target) = match prediction.case {
        LimitCase::Clt => {
            let gk = green_kubo(&cfg.observable, sys.map(), cfg.gk_kmax, cfg.gk_samples, cfg.seed, exec)?;
            let t = StableParams::normal(gk.sigma2).ok();
            (Some(gk), t)
        }
        _ => (None, prediction.target),
    };
    let e = birkhoff_ensemble(
        &cfg.observable,
        sys.map(),
        cfg.n,
        cfg.n_traj,
        prediction.norming,
        cfg.seed.wrapping_add(1),
        exec,
    )?;
    let (ks, cf, cf_sup) = match target {
        Some(t) => {
            let ks = ks_distance(&e.samples, &t, exec)?;
            let cf: Vec<CfPoint> = cfg
                .t_grid
                .iter()
                .zip(empirical_cf(&e.samples, &cfg.t_grid))
                .map(|(&s, z)| {
                    let m = t.char_fn(s);
                    CfPoint {
                        t: s,
                        empirical_re: z.re,
                        empirical_im: z.im,
                        model_re: m.re,
                        model_im: m.im,
                        distance: (z - m).norm(),
                    }
                })
                .collect();
            let sup = cf.iter().map(|p| p.distance).fold(0.0, f64::max);
            (Some(ks), cf, Some(sup))
        }
        None => (None, Vec::new(), None),
    };
    let c = prediction.constants;
    let xi_censored = if cfg.xi_samples > 0 && (c.m0 != 0.0 || c.m1 != 0.0) {
        let rep = xi_tail(&cfg.observable, &sys, &[], cfg.xi_samples, cfg.seed.wrapping_add(2), exec)?;
        Some(rep.censored)
    } else {
        None
    };
    let result = LimitLawResult {
        threads,
        prediction,
        green_kubo,
        target,
        ensemble: summarize(&e.samples),
        redraws: e.redraws,
        ks,
        cf,
        cf_sup_distance: cf_sup,
        xi_samples: cfg.xi_samples,
        xi_censored,
    };
    sink.json(&artifact("limit-law", &cfg, result))
}

#[derive(Args, Debug, Serialize)]
pub struct SampleStableArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn sample_stable(a: SampleStableArgs) -> Result<(), Failure> {
    let sp = StableParams::new(a.p, a.a, a.b)?;
    let sink = Sink::open(a.out.as_deref(), "stable.csv")?;
    let xs = sp.sample(a.seed, a.n, Execution::Auto);
    let header = artifact("sample-stable", &a, serde_json::json!({}));
    sink.csv(&header, &["x"], xs.into_iter().map(|x| vec![x]))
}

#[derive(Args, Debug, Serialize)]
pub struct UlamGapArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 256)]
    bins: usize,
    /// Sample points per bin.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of leading eigenvalues reported.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn ulam_gap(a: UlamGapArgs) -> Result<(), Failure> {
    at_least("bins", a.bins, 16)?;
    at_least("samples", a.samples, 1)?;
    if a.k == 0 || a.k > a.bins {
        return Err(invalid(format!("`k` must lie in [1, {}], got {}", a.bins, a.k)));
    }
    let sys = system(a.alpha0, a.alpha1, DEFAULT_CELLS, DEFAULT_R_MAX)?;
    let sink = Sink::open(a.out.as_deref(), "ulam-gap.json")?;
    let op = build_ulam(&sys, a.bins, a.samples, a.seed, Execution::Auto)?;
    let ev = leading_spectrum(&op, a.k)?;
    #[derive(Serialize)]
    struct Spectrum {
        eigenvalues: Vec<Eigenvalue>,
        gap: f64,
        uniformity_deviation: f64,
        row_sum_error: f64,
        near_cut_redraws: usize,
        censored_redraws: usize,
    }
    let gap = 1.0 - ev.get(1).map_or(0.0, |z| z.norm());
    let s = Spectrum {
        eigenvalues: ev.into_iter().map(Eigenvalue::from).collect(),
        gap,
        uniformity_deviation: op.uniformity_deviation()?,
        row_sum_error: op.row_sum_error(),
        near_cut_redraws: op.near_cut,
        censored_redraws: op.censored,
    };
    sink.json(&artifact("ulam-gap", &a, s))
}
