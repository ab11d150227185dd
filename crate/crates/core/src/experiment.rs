//! Monte-Carlo sweeps over one scenario parameter, variant comparisons,
//! summary statistics, CSV output and SVG line charts.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::statistics::Statistics;

use crate::baselines::SchedulerVariant;
use crate::error::{Error, Result};
use crate::sim::{run_scenario, ScenarioConfig, SimOptions};

/// Which scenario parameter a sweep varies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Available computing fluctuation range, in percent.
    ComputeFluctuation,
    /// Available bandwidth fluctuation range, in percent.
    BandwidthFluctuation,
    /// Incoming-satellite computing deficit, in percent.
    HandoverDeficit,
    /// Any numeric config key given as a dotted path, values used as-is.
    Custom { key: String },
}

impl ExperimentKind {
    pub fn name(&self) -> &str {
        match self {
            ExperimentKind::ComputeFluctuation => "compute_fluctuation",
            ExperimentKind::BandwidthFluctuation => "bandwidth_fluctuation",
            ExperimentKind::HandoverDeficit => "handover_deficit",
            ExperimentKind::Custom { .. } => "custom",
        }
    }

    /// Canned sweep values.
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            ExperimentKind::ComputeFluctuation | ExperimentKind::BandwidthFluctuation => {
                vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0]
            }
            ExperimentKind::HandoverDeficit => vec![0.0, 20.0, 40.0, 60.0, 80.0],
            ExperimentKind::Custom { .. } => Vec::new(),
        }
    }

    /// The summarized metric: handover backlog for the deficit sweep, mean delay otherwise.
    pub fn metric(&self) -> Metric {
        match self {
            ExperimentKind::HandoverDeficit => Metric::HandoverBacklogBits,
            _ => Metric::MeanDelaySeconds,
        }
    }

    fn axis_label(&self) -> String {
        match self {
            ExperimentKind::ComputeFluctuation => "Computing resource fluctuation range (%)".into(),
            ExperimentKind::BandwidthFluctuation => "Bandwidth fluctuation range (%)".into(),
            ExperimentKind::HandoverDeficit => "Incoming satellite computing deficit (%)".into(),
            ExperimentKind::Custom { key } => key.clone(),
        }
    }

    /// Applies sweep value `x` to a copy of `base`.
    pub fn apply(&self, base: &ScenarioConfig, x: f64) -> Result<ScenarioConfig> {
        let mut c = base.clone();
        match self {
            ExperimentKind::ComputeFluctuation => c.fluctuation.compute = x / 100.0,
            ExperimentKind::BandwidthFluctuation => c.fluctuation.bandwidth = x / 100.0,
            ExperimentKind::HandoverDeficit => c.handover.incoming_deficit = x / 100.0,
            ExperimentKind::Custom { key } => c = set_key(base, key, x)?,
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanDelaySeconds,
    HandoverBacklogBits,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::MeanDelaySeconds => "Average task completion delay (s)",
            Metric::HandoverBacklogBits => "Satellite backlog at handover (Mb)",
        }
    }

    pub fn of(self, r: &RunRecord) -> f64 {
        match self {
            Metric::MeanDelaySeconds => r.mean_delay_s,
            Metric::HandoverBacklogBits => r.handover_backlog_bits,
        }
    }

    fn chart_scale(self) -> f64 {
        match self {
            Metric::MeanDelaySeconds => 1.0,
            Metric::HandoverBacklogBits => 1e-6,
        }
    }
}

/// Sets a numeric config value by dotted key path (integers are rounded).
pub fn set_key(base: &ScenarioConfig, key: &str, x: f64) -> Result<ScenarioConfig> {
    let bad = |reason: &str| Error::Config(vec![format!("{key}: {reason}")]);
    let mut root = toml::Value::try_from(base).map_err(|e| bad(&e.to_string()))?;
    let mut node = &mut root;
    for part in key.split('.') {
        node = node
            .get_mut(part)
            .ok_or_else(|| bad("unknown configuration key"))?;
    }
    *node = match node {
        toml::Value::Float(_) => toml::Value::Float(x),
        toml::Value::Integer(_) => toml::Value::Integer(x.round() as i64),
        _ => return Err(bad("not a numeric key")),
    };
    root.try_into()
        .map_err(|e: toml::de::Error| bad(&e.to_string()))
}

/// A sweep: one parameter, several values, several variants, common seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub values: Vec<f64>,
    pub variants: Vec<SchedulerVariant>,
    pub seeds: Vec<u64>,
    pub base: ScenarioConfig,
}

pub const DEFAULT_SEEDS_PER_POINT: usize = 20;

impl ExperimentSpec {
    /// Canned sweep with all variants and seeds `1..=20`.
    pub fn canned(kind: ExperimentKind, base: ScenarioConfig) -> Self {
        Self {
            values: kind.default_values(),
            kind,
            variants: SchedulerVariant::ALL.to_vec(),
            seeds: (1..=DEFAULT_SEEDS_PER_POINT as u64).collect(),
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.values.is_empty() {
            errs.push("values: sweep list is empty".to_string());
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            errs.push("values: non-finite sweep value".to_string());
        }
        if self.variants.is_empty() {
            errs.push("variants: no variant selected".to_string());
        }
        if self.seeds.is_empty() {
            errs.push("seeds: no seeds".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Outcome of one (value, variant, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub x: f64,
    pub variant: SchedulerVariant,
    pub seed: u64,
    pub mean_delay_s: f64,
    pub handover_backlog_bits: f64,
    pub unfinished: usize,
}

/// One aggregated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x: f64,
    pub variant: SchedulerVariant,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub x: f64,
    pub variant: SchedulerVariant,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub metric: Metric,
    pub runs: Vec<RunRecord>,
    pub points: Vec<SweepPoint>,
    pub failures: Vec<PointFailure>,
}

impl ExperimentResult {
    /// Per-seed metric values of one variant at one sweep value, in seed order.
    pub fn samples(&self, variant: SchedulerVariant, x: f64) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.variant == variant && r.x == x)
            .map(|r| self.metric.of(r))
            .collect()
    }

    /// Sweep means of one variant in value order.
    pub fn series(&self, variant: SchedulerVariant) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.variant == variant)
            .map(|p| (p.x, p.mean))
            .collect()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))
}

fn record(
    x: f64,
    variant: SchedulerVariant,
    seed: u64,
    config: &ScenarioConfig,
) -> Result<RunRecord> {
    let m = run_scenario(config, variant, SimOptions::default())?;
    Ok(RunRecord {
        x,
        variant,
        seed,
        mean_delay_s: m.mean_delay_s(),
        handover_backlog_bits: m.handover_backlog_bits(),
        unfinished: m.unfinished(),
    })
}

/// Runs every variant on every seed of one scenario (common random numbers).
///
/// Rows come back sorted by variant then seed regardless of scheduling.
pub fn compare_variants(
    config: &ScenarioConfig,
    variants: &[SchedulerVariant],
    seeds: &[u64],
    jobs: usize,
) -> Result<Vec<RunRecord>> {
    let tasks: Vec<(SchedulerVariant, u64)> = variants
        .iter()
        .flat_map(|&v| seeds.iter().map(move |&s| (v, s)))
        .collect();
    let out: Vec<Result<RunRecord>> = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(v, s)| {
                let mut c = config.clone();
                c.simulation.seed = s;
                record(0.0, v, s, &c)
            })
            .collect()
    });
    out.into_iter().collect()
}

/// Runs a sweep; failing runs are reported and skipped.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut configs = Vec::with_capacity(spec.values.len());
    for &x in &spec.values {
        let c = spec.kind.apply(&spec.base, x)?;
        c.validate()?;
        configs.push(c);
    }
    let tasks: Vec<(usize, SchedulerVariant, u64)> = (0..spec.values.len())
        .flat_map(|i| {
            spec.variants
                .iter()
                .flat_map(move |&v| spec.seeds.iter().map(move |&s| (i, v, s)))
        })
        .collect();
    let outcomes: Vec<Result<RunRecord>> = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(i, v, s)| {
                let mut c = configs[i].clone();
                c.simulation.seed = s;
                record(spec.values[i], v, s, &c)
            })
            .collect()
    });

    let metric = spec.kind.metric();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (&(i, variant, seed), o) in tasks.iter().zip(outcomes) {
        match o {
            Ok(r) => runs.push(r),
            Err(e) => failures.push(PointFailure {
                x: spec.values[i],
                variant,
                seed,
                error: e.to_string(),
            }),
        }
    }
    let mut points = Vec::new();
    for &x in &spec.values {
        for &variant in &spec.variants {
            let xs: Vec<f64> = runs
                .iter()
                .filter(|r| r.x == x && r.variant == variant)
                .map(|r| metric.of(r))
                .collect();
            if xs.is_empty() {
                continue;
            }
            let (mean, stderr) = mean_stderr(&xs);
            points.push(SweepPoint {
                x,
                variant,
                mean,
                stderr,
            });
        }
    }
    Ok(ExperimentResult {
        kind: spec.kind.clone(),
        metric,
        runs,
        points,
        failures,
    })
}

/// Sample mean and standard error of the mean (zero error for fewer than two samples).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let mean = xs.mean();
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    (mean, xs.std_dev() / (xs.len() as f64).sqrt())
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (Pearson on average ranks); `NaN` if either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let (ma, mb) = (
        ra.iter().sum::<f64>() / ra.len() as f64,
        rb.iter().sum::<f64>() / rb.len() as f64,
    );
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
    }
    num / (da * db).sqrt()
}

/// One-sided paired t-test p-value for `mean(a − b) < 0`.
///
/// Identical samples give 1; a constant negative difference gives 0.
pub fn paired_less_p(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    if n < 2 {
        return 1.0;
    }
    let (mean, se) = mean_stderr(&d);
    if se == 0.0 {
        return if mean < 0.0 { 0.0 } else { 1.0 };
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("valid degrees of freedom");
    t.cdf(mean / se)
}

/// One-way ANOVA p-value for equal means across groups; 1 when every group is constant and equal.
pub fn anova_p(groups: &[Vec<f64>]) -> f64 {
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    if k < 2 || n <= k {
        return 1.0;
    }
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        between += g.len() as f64 * (m - grand).powi(2);
        within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df_b = (k - 1) as f64;
    let df_w = (n - k) as f64;
    if within == 0.0 {
        return if between == 0.0 { 1.0 } else { 0.0 };
    }
    let f = (between / df_b) / (within / df_w);
    let dist =
        statrs::distribution::FisherSnedecor::new(df_b, df_w).expect("valid degrees of freedom");
    1.0 - dist.cdf(f)
}

/// `x, variant, mean, stderr` rows.
pub fn write_sweep_csv<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "variant", "mean", "stderr"])?;
    for p in &result.points {
        w.write_record([
            p.x.to_string(),
            p.variant.label().to_string(),
            p.mean.to_string(),
            p.stderr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `variant, seed, mean_delay_s, handover_backlog_bits, unfinished` rows, optionally prefixed by `x`.
pub fn write_runs_csv<W: Write>(out: W, runs: &[RunRecord], with_x: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "variant",
        "seed",
        "mean_delay_s",
        "handover_backlog_bits",
        "unfinished",
    ];
    if with_x {
        header.insert(0, "x");
    }
    w.write_record(&header)?;
    for r in runs {
        let mut row = vec![
            r.variant.label().to_string(),
            r.seed.to_string(),
            r.mean_delay_s.to_string(),
            r.handover_backlog_bits.to_string(),
            r.unfinished.to_string(),
        ];
        if with_x {
            row.insert(0, r.x.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).floor() * step;
    let mut t = Vec::new();
    let mut v = start;
    while v <= hi + step * 1e-9 {
        t.push(v);
        v += step;
    }
    t
}

/// Line chart of sweep means with standard-error bars, one series per variant.
pub fn render_svg(result: &ExperimentResult) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (80.0, 20.0, 20.0, 60.0);
    let scale = result.metric.chart_scale();
    let xs: Vec<f64> = result.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = result
        .points
        .iter()
        .flat_map(|p| [(p.mean - p.stderr) * scale, (p.mean + p.stderr) * scale])
        .collect();
    let (x0, x1) = (
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let (x0, x1) = if x0.is_finite() {
        (x0, if x1 > x0 { x1 } else { x0 + 1.0 })
    } else {
        (0.0, 1.0)
    };
    let ymin = ys.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let ymax = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let yt = nice_ticks(ymin, if ymax > ymin { ymax } else { ymin + 1.0 }, 5);
    let (y0, y1) = (yt[0], *yt.last().expect("ticks"));
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        h - bottom,
        w - right,
        h - bottom
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{:.2}" stroke="black"/>"#,
        h - bottom
    );
    let mut xt: Vec<f64> = xs.clone();
    xt.sort_by(f64::total_cmp);
    xt.dedup();
    for x in &xt {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(*x),
            h - bottom + 18.0,
            x
        );
    }
    for y in &yt {
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="lightgray"/>"#,
            py(*y),
            w - right
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(*y) + 4.0,
            format_tick(*y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        h - 15.0,
        xml_escape(&result.kind.axis_label())
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (top + h - bottom) / 2.0,
        result.metric.label()
    );

    let mut variants: Vec<SchedulerVariant> = result.points.iter().map(|p| p.variant).collect();
    variants.dedup();
    variants.sort_by_key(|v| SchedulerVariant::ALL.iter().position(|a| a == v));
    variants.dedup();
    for (i, v) in variants.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<_> = result.points.iter().filter(|p| p.variant == *v).collect();
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.x), py(p.mean * scale)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for p in &pts {
            let (cx, lo, hi) = (
                px(p.x),
                py((p.mean - p.stderr) * scale),
                py((p.mean + p.stderr) * scale),
            );
            let _ = writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{lo:.2}" x2="{cx:.2}" y2="{hi:.2}" stroke="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                py(p.mean * scale)
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            w - right - 150.0,
            w - right - 126.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            w - right - 120.0,
            ly + 4.0,
            v.label()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(y: f64) -> String {
    let r = (y * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
