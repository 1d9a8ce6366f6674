//! Parameter sweeps over the cycles, with CSV and SVG emission.
//!
//! Rows are status-coded instead of aborting mid-sweep: the refrigeration
//! window depends on parameters, and masked regions are data. Grid points
//! that would violate the cycle-spec invariants abort up front, before any
//! computation.

use crate::cycles::{self, CycleMode, CycleSpec};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    Gamma,
    THot,
    TCold,
    OmegaHigh,
    OmegaLow,
}

impl std::fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SweptParameter::Gamma => "gamma",
            SweptParameter::THot => "t-hot",
            SweptParameter::TCold => "t-cold",
            SweptParameter::OmegaHigh => "omega-high",
            SweptParameter::OmegaLow => "omega-low",
        };
        write!(f, "{name}")
    }
}

impl FromStr for SweptParameter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gamma" => Ok(SweptParameter::Gamma),
            "t-hot" => Ok(SweptParameter::THot),
            "t-cold" => Ok(SweptParameter::TCold),
            "omega-high" => Ok(SweptParameter::OmegaHigh),
            "omega-low" => Ok(SweptParameter::OmegaLow),
            other => Err(format!(
                "unknown swept parameter '{other}' \
                 (expected gamma, t-hot, t-cold, omega-high or omega-low)"
            )),
        }
    }
}

/// A uniform inclusive grid over one cycle parameter.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub cycle_mode: CycleMode,
    pub base: CycleSpec,
    pub swept: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub include_ho_baseline: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Degenerate,
    NotRefrigerator,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "OK",
            RowStatus::Degenerate => "DEGENERATE",
            RowStatus::NotRefrigerator => "NOT_REFRIGERATOR",
        }
    }
}

impl FromStr for RowStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "OK" => Ok(RowStatus::Ok),
            "DEGENERATE" => Ok(RowStatus::Degenerate),
            "NOT_REFRIGERATOR" => Ok(RowStatus::NotRefrigerator),
            other => Err(format!("unknown row status '{other}'")),
        }
    }
}

/// One grid point. Heats and net work are always recorded; the merit fields
/// are populated only when the corresponding evaluation came back OK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub swept_value: f64,
    pub merit_nho: Option<f64>,
    pub merit_ho: Option<f64>,
    pub w_total: f64,
    pub heats: [f64; 4],
    pub status: RowStatus,
}

impl SweepSpec {
    fn spec_at(&self, value: f64) -> Result<CycleSpec> {
        let b = &self.base;
        match self.swept {
            SweptParameter::Gamma => CycleSpec::new(
                b.t_hot(),
                b.t_cold(),
                b.omega_high(),
                b.omega_low(),
                value,
                b.scaling_mode(),
            ),
            SweptParameter::THot => CycleSpec::new(
                value,
                b.t_cold(),
                b.omega_high(),
                b.omega_low(),
                b.gamma(),
                b.scaling_mode(),
            ),
            SweptParameter::TCold => CycleSpec::new(
                b.t_hot(),
                value,
                b.omega_high(),
                b.omega_low(),
                b.gamma(),
                b.scaling_mode(),
            ),
            SweptParameter::OmegaHigh => CycleSpec::new(
                b.t_hot(),
                b.t_cold(),
                value,
                b.omega_low(),
                b.gamma(),
                b.scaling_mode(),
            ),
            SweptParameter::OmegaLow => CycleSpec::new(
                b.t_hot(),
                b.t_cold(),
                b.omega_high(),
                value,
                b.gamma(),
                b.scaling_mode(),
            ),
        }
    }

    fn grid_value(&self, index: usize) -> f64 {
        if index + 1 == self.steps {
            self.stop
        } else {
            self.start + (self.stop - self.start) * index as f64 / (self.steps - 1) as f64
        }
    }

    /// Validates the grid and returns one validated spec per point.
    fn validated_grid(&self) -> Result<Vec<(f64, CycleSpec)>> {
        if self.steps < 2 {
            return Err(Error::InvalidSweep(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(Error::InvalidSweep(format!(
                "need finite start < stop, got start = {}, stop = {}",
                self.start, self.stop
            )));
        }
        let mut grid = Vec::with_capacity(self.steps);
        for i in 0..self.steps {
            let value = self.grid_value(i);
            let spec = self
                .spec_at(value)
                .and_then(|s| s.validate_strict().map(|()| s))
                .map_err(|e| {
                    Error::InvalidSweep(format!(
                        "grid point {i} ({} = {value}) violates the cycle invariants: {e}",
                        self.swept
                    ))
                })?;
            grid.push((value, spec));
        }
        Ok(grid)
    }
}

fn eval_point(
    mode: CycleMode,
    spec: &CycleSpec,
    rel_tol: f64,
) -> Result<(RowStatus, Option<f64>, [f64; 4], f64)> {
    match cycles::evaluate(mode, spec, rel_tol) {
        Ok(r) => Ok((RowStatus::Ok, Some(r.merit), r.heats, r.w_total)),
        Err(Error::DegenerateCycle { heats, w_total, .. }) => {
            Ok((RowStatus::Degenerate, None, heats, w_total))
        }
        Err(Error::NotARefrigerator { heats, w_total, .. }) => {
            Ok((RowStatus::NotRefrigerator, None, heats, w_total))
        }
        Err(e) => Err(e),
    }
}

fn baseline_merit(mode: CycleMode, spec: &CycleSpec, rel_tol: f64) -> Result<Option<f64>> {
    let ho = spec.with_gamma(0.0)?;
    Ok(eval_point(mode, &ho, rel_tol)?.1)
}

fn make_row(sweep: &SweepSpec, value: f64, spec: &CycleSpec, rel_tol: f64) -> Result<SweepRow> {
    let (status, merit_nho, heats, w_total) = eval_point(sweep.cycle_mode, spec, rel_tol)?;
    let merit_ho = if sweep.include_ho_baseline {
        baseline_merit(sweep.cycle_mode, spec, rel_tol)?
    } else {
        None
    };
    Ok(SweepRow {
        swept_value: value,
        merit_nho,
        merit_ho,
        w_total,
        heats,
        status,
    })
}

fn make_row_with_baseline(
    sweep: &SweepSpec,
    value: f64,
    spec: &CycleSpec,
    baseline: Option<f64>,
    rel_tol: f64,
) -> Result<SweepRow> {
    let (status, merit_nho, heats, w_total) = eval_point(sweep.cycle_mode, spec, rel_tol)?;
    Ok(SweepRow {
        swept_value: value,
        merit_nho,
        merit_ho: baseline,
        w_total,
        heats,
        status,
    })
}

/// Serial sweep: one row per grid point, ascending in the swept value.
///
/// The harmonic baseline is independent of gamma, so a gamma sweep computes
/// it once; sweeps over any other parameter recompute it per row.
pub fn run_sweep(sweep: &SweepSpec, rel_tol: f64) -> Result<Vec<SweepRow>> {
    let grid = sweep.validated_grid()?;
    if sweep.swept == SweptParameter::Gamma {
        let baseline = if sweep.include_ho_baseline {
            baseline_merit(sweep.cycle_mode, &grid[0].1, rel_tol)?
        } else {
            None
        };
        grid.iter()
            .map(|(v, s)| make_row_with_baseline(sweep, *v, s, baseline, rel_tol))
            .collect()
    } else {
        grid.iter()
            .map(|(v, s)| make_row(sweep, *v, s, rel_tol))
            .collect()
    }
}

/// Parallel sweep over a bounded rayon pool. Rows come back in grid order
/// and are bitwise identical to the serial result; `max_threads = None`
/// uses the global pool.
pub fn run_sweep_parallel(
    sweep: &SweepSpec,
    rel_tol: f64,
    max_threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    match max_threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
            pool.install(|| run_sweep_parallel_inner(sweep, rel_tol))
        }
        None => run_sweep_parallel_inner(sweep, rel_tol),
    }
}

fn run_sweep_parallel_inner(sweep: &SweepSpec, rel_tol: f64) -> Result<Vec<SweepRow>> {
    let grid = sweep.validated_grid()?;
    if sweep.swept == SweptParameter::Gamma {
        let baseline = if sweep.include_ho_baseline {
            baseline_merit(sweep.cycle_mode, &grid[0].1, rel_tol)?
        } else {
            None
        };
        grid.par_iter()
            .map(|(v, s)| make_row_with_baseline(sweep, *v, s, baseline, rel_tol))
            .collect()
    } else {
        grid.par_iter()
            .map(|(v, s)| make_row(sweep, *v, s, rel_tol))
            .collect()
    }
}

pub const CSV_HEADER: &str = "swept_value,merit_nho,merit_ho,W_total,Q1,Q2,Q3,Q4,status";

/// 17 significant digits: enough to reproduce any f64 bit-exactly on
/// parse-back.
fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// Writes the rows as CSV (LF line endings, UTF-8). Merit cells of non-OK
/// rows are left empty.
pub fn emit_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidSweep("no rows to emit".into()));
    }
    let mut buffer = String::new();
    buffer.push_str(CSV_HEADER);
    buffer.push('\n');
    for row in rows {
        let _ = write!(
            buffer,
            "{},{},{},{},{},{},{},{},{}",
            format_number(row.swept_value),
            format_optional(row.merit_nho),
            format_optional(row.merit_ho),
            format_number(row.w_total),
            format_number(row.heats[0]),
            format_number(row.heats[1]),
            format_number(row.heats[2]),
            format_number(row.heats[3]),
            row.status.as_str()
        );
        buffer.push('\n');
    }
    out.write_all(buffer.as_bytes()).map_err(|e| Error::Io {
        path: "<writer>".into(),
        source: e,
    })
}

/// Parses CSV produced by [`emit_csv`] back into rows, bit-exactly.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedCsv("empty input".into()))?;
    if header != CSV_HEADER {
        return Err(Error::MalformedCsv(format!("unexpected header '{header}'")));
    }
    let parse_f64 = |field: &str, line_no: usize| -> Result<f64> {
        field
            .parse::<f64>()
            .map_err(|e| Error::MalformedCsv(format!("line {line_no}: '{field}': {e}")))
    };
    let parse_opt = |field: &str, line_no: usize| -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            parse_f64(field, line_no).map(Some)
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::MalformedCsv(format!(
                "line {line_no}: expected 9 fields, got {}",
                fields.len()
            )));
        }
        rows.push(SweepRow {
            swept_value: parse_f64(fields[0], line_no)?,
            merit_nho: parse_opt(fields[1], line_no)?,
            merit_ho: parse_opt(fields[2], line_no)?,
            w_total: parse_f64(fields[3], line_no)?,
            heats: [
                parse_f64(fields[4], line_no)?,
                parse_f64(fields[5], line_no)?,
                parse_f64(fields[6], line_no)?,
                parse_f64(fields[7], line_no)?,
            ],
            status: RowStatus::from_str(fields[8])
                .map_err(|e| Error::MalformedCsv(format!("line {line_no}: {e}")))?,
        });
    }
    Ok(rows)
}

/// Static-plot appearance knobs.
#[derive(Debug, Clone)]
pub struct PlotConfig {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotConfig {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "swept parameter".into(),
            y_label: "figure of merit".into(),
            width: 800,
            height: 500,
        }
    }
}

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if min == max {
            // flat series: open up a unit band so the line sits mid-plot
            min -= 1.0;
            max += 1.0;
        }
        Axis { min, max }
    }

    fn to_unit(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }
}

/// Renders the OK rows as a standalone SVG line plot: the working-substance
/// merit plus, when present, the harmonic baseline. Output is a pure
/// function of the rows and config.
pub fn emit_svg<W: Write>(rows: &[SweepRow], config: &PlotConfig, out: &mut W) -> Result<()> {
    let plottable: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.status == RowStatus::Ok && r.merit_nho.is_some())
        .collect();
    if plottable.len() < 2 {
        return Err(Error::EmptyPlot(format!(
            "need at least 2 OK rows, found {}",
            plottable.len()
        )));
    }

    let baseline: Vec<(f64, f64)> = plottable
        .iter()
        .filter_map(|r| r.merit_ho.map(|m| (r.swept_value, m)))
        .collect();
    let series: Vec<(f64, f64)> = plottable
        .iter()
        .map(|r| (r.swept_value, r.merit_nho.unwrap()))
        .collect();

    let x_axis = Axis::from_values(series.iter().map(|(x, _)| *x));
    let y_axis = {
        let ys = series
            .iter()
            .map(|(_, y)| *y)
            .chain(baseline.iter().map(|(_, y)| *y));
        let raw = Axis::from_values(ys);
        let pad = 0.05 * (raw.max - raw.min);
        Axis {
            min: raw.min - pad,
            max: raw.max + pad,
        }
    };

    let (w, h) = (config.width as f64, config.height as f64);
    let (left, right, top, bottom) = (80.0, 24.0, 42.0, 64.0);
    let x_px = |v: f64| left + x_axis.to_unit(v) * (w - left - right);
    let y_px = |v: f64| h - bottom - y_axis.to_unit(v) * (h - top - bottom);
    let polyline = |points: &[(f64, f64)]| -> String {
        let mut s = String::new();
        for (i, (x, y)) in points.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", x_px(*x), y_px(*y));
        }
        s
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" \
         viewBox=\"0 0 {0} {1}\">",
        config.width, config.height
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>",
        config.width, config.height
    );
    if !config.title.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>",
            left + (w - left - right) / 2.0,
            xml_escape(&config.title)
        );
    }

    // axes
    let _ = write!(
        svg,
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n\
         <line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
        l = left,
        t = top,
        b = h - bottom,
        r = w - right
    );

    // ticks and grid
    const TICKS: usize = 5;
    for i in 0..=TICKS {
        let frac = i as f64 / TICKS as f64;
        let xv = x_axis.min + frac * (x_axis.max - x_axis.min);
        let yv = y_axis.min + frac * (y_axis.max - y_axis.min);
        let xp = x_px(xv);
        let yp = y_px(yv);
        let _ = write!(
            svg,
            "<line x1=\"{xp:.2}\" y1=\"{:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <text x=\"{xp:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            h - bottom,
            h - bottom + 6.0,
            h - bottom + 20.0,
            format_tick(xv)
        );
        let _ = write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{:.2}\" y2=\"{yp:.2}\" stroke=\"black\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            left - 6.0,
            left,
            left - 10.0,
            yp + 4.0,
            format_tick(yv)
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>",
        left + (w - left - right) / 2.0,
        h - 16.0,
        xml_escape(&config.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2})\">{1}</text>",
        top + (h - top - bottom) / 2.0,
        xml_escape(&config.y_label)
    );

    // series
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>",
        polyline(&series)
    );
    if baseline.len() >= 2 {
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"#7f7f7f\" stroke-width=\"2\" \
             stroke-dasharray=\"6 4\" points=\"{}\"/>",
            polyline(&baseline)
        );
    }

    // legend
    let lx = w - right - 170.0;
    let _ = write!(
        svg,
        "<line x1=\"{lx:.2}\" y1=\"{ty:.2}\" x2=\"{:.2}\" y2=\"{ty:.2}\" stroke=\"#1f77b4\" \
         stroke-width=\"2\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">NHO</text>\n",
        lx + 28.0,
        lx + 34.0,
        top + 12.0,
        ty = top + 8.0
    );
    if baseline.len() >= 2 {
        let _ = write!(
            svg,
            "<line x1=\"{lx:.2}\" y1=\"{ty:.2}\" x2=\"{:.2}\" y2=\"{ty:.2}\" stroke=\"#7f7f7f\" \
             stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">\
             HO baseline</text>\n",
            lx + 28.0,
            lx + 34.0,
            top + 30.0,
            ty = top + 26.0
        );
    }
    svg.push_str("</svg>\n");

    out.write_all(svg.as_bytes()).map_err(|e| Error::Io {
        path: "<writer>".into(),
        source: e,
    })
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs();
    if (1e-3..1e4).contains(&magnitude) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.3e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
