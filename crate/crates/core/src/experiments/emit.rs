//! CSV and self-contained SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::StepProfile;
use crate::trace::FieldTrace;

/// Formats `x` like C's `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    fmt_g(x, 12)
}

/// Formats `x` like C's `%.<digits>g`.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Simple string table with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if self.header.is_empty() {
            return Err(Error::Empty("table"));
        }
        write_file(path, &self.to_csv())
    }
}

/// `t,re,im,abs` CSV of one trace.
pub fn trace_csv(trace: &FieldTrace) -> Result<String> {
    if trace.is_empty() {
        return Err(Error::Empty("trace"));
    }
    let mut out = String::from("t,re,im,abs\n");
    for (t, v) in trace.grid().iter().zip(trace.values()) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_g12(*t),
            fmt_g12(v.re),
            fmt_g12(v.im),
            fmt_g12(v.norm())
        );
    }
    Ok(out)
}

pub fn emit_csv(trace: &FieldTrace, path: &Path) -> Result<()> {
    write_file(path, &trace_csv(trace)?)
}

/// Several traces on one grid as `t,<label>_re,<label>_im,<label>_abs,...`.
pub fn traces_csv(traces: &[&FieldTrace]) -> Result<String> {
    let first = traces.first().ok_or(Error::Empty("trace list"))?;
    if first.is_empty() {
        return Err(Error::Empty("trace"));
    }
    for t in traces {
        if t.grid() != first.grid() {
            return Err(Error::Numerical("traces do not share a grid".into()));
        }
    }
    let mut out = String::from("t");
    for t in traces {
        let l = t.label().as_str();
        let _ = write!(out, ",{l}_re,{l}_im,{l}_abs");
    }
    out.push('\n');
    for (k, t) in first.grid().iter().enumerate() {
        out.push_str(&fmt_g12(*t));
        for tr in traces {
            let v = tr.values()[k];
            let _ = write!(
                out,
                ",{},{},{}",
                fmt_g12(v.re),
                fmt_g12(v.im),
                fmt_g12(v.norm())
            );
        }
        out.push('\n');
    }
    Ok(out)
}

/// `t,omega_p_sq` on `samples` uniform points of `[t_min, t_max]`.
pub fn profile_csv(
    profile: &StepProfile,
    t_min: f64,
    t_max: f64,
    samples: usize,
) -> Result<String> {
    let grid = crate::trace::uniform_grid(t_min, t_max, samples)?;
    let mut out = String::from("t,omega_p_sq\n");
    for t in grid {
        let _ = writeln!(
            out,
            "{},{}",
            fmt_g12(t),
            fmt_g12(profile.omega_p_squared(t))
        );
    }
    Ok(out)
}

/// One polyline of a plot.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Which parts of complex traces to plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Component {
    Real,
    Modulus,
    #[default]
    Both,
}

/// Series for the requested components; the modulus is dashed.
pub fn trace_series(traces: &[&FieldTrace], component: Component) -> Vec<Series> {
    let mut out = Vec::new();
    for tr in traces {
        let label = tr.label().as_str();
        let pts = |f: fn(&num_complex::Complex64) -> f64| -> Vec<(f64, f64)> {
            tr.grid()
                .iter()
                .zip(tr.values())
                .map(|(&t, v)| (t, f(v)))
                .collect()
        };
        if matches!(component, Component::Real | Component::Both) {
            out.push(Series {
                name: format!("Re {label}"),
                points: pts(|v| v.re),
                dashed: false,
            });
        }
        if matches!(component, Component::Modulus | Component::Both) {
            out.push(Series {
                name: format!("|{label}|"),
                points: pts(|v| v.norm()),
                dashed: true,
            });
        }
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line plot with axes, ticks and a legend.
pub fn render_svg(series: &[Series], title: &str, x_label: &str, y_label: &str) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Empty("plot series"));
    }
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        if x.is_finite() && y.is_finite() {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return Err(Error::Numerical("no finite points to plot".into()));
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let (px, py) = (sx(fx), sy(fy));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            fmt_g(fx, 4)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            fmt_g(fy, 4)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#bbbbbb"/>"##,
            sy(0.0),
            LEFT + pw
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
            }
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="6 3""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.trim_end()
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Plots `traces` against `t` and writes the SVG to `path`.
pub fn emit_svg(
    traces: &[&FieldTrace],
    component: Component,
    title: &str,
    path: &Path,
) -> Result<()> {
    if traces.iter().any(|t| t.is_empty()) || traces.is_empty() {
        return Err(Error::Empty("trace"));
    }
    let svg = render_svg(&trace_series(traces, component), title, "t", "E(t)")?;
    write_file(path, &svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TraceLabel;
    use num_complex::Complex64;

    #[test]
    fn g12_matches_printf() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1");
        assert_eq!(fmt_g12(-2.5), "-2.5");
        assert_eq!(fmt_g12(0.1), "0.1");
        assert_eq!(fmt_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g12(1e-5), "1e-05");
        assert_eq!(fmt_g12(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g12(123456789012.0), "123456789012");
        assert_eq!(fmt_g12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(fmt_g12(0.0001), "0.0001");
        assert_eq!(fmt_g12(9.9999999999999e-5), "0.0001");
        assert_eq!(fmt_g(std::f64::consts::PI, 4), "3.142");
    }

    #[test]
    fn empty_input_is_rejected() {
        // FieldTrace itself refuses an empty grid, so emptiness surfaces there.
        assert!(matches!(
            FieldTrace::new(Vec::new(), Vec::new(), TraceLabel::Oracle),
            Err(Error::Empty(_))
        ));
        assert!(matches!(traces_csv(&[]), Err(Error::Empty(_))));
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_svg(&[], Component::Both, "x", &dir.path().join("x.svg")).is_err());
    }

    #[test]
    fn single_point_csv() {
        let tr = FieldTrace::new(
            vec![0.5],
            vec![Complex64::new(3.0, 4.0)],
            TraceLabel::Oracle,
        )
        .unwrap();
        assert_eq!(trace_csv(&tr).unwrap(), "t,re,im,abs\n0.5,3,4,5\n");
    }

    #[test]
    fn two_traces_give_two_polylines_and_legend() {
        let grid = [0.0, 1.0, 2.0];
        let a = FieldTrace::incident(&grid, 1.0).unwrap();
        let b = FieldTrace::from_fn(&grid, TraceLabel::Oracle, |t| Complex64::new(t, 0.0)).unwrap();
        let svg = render_svg(&trace_series(&[&a, &b], Component::Real), "demo", "t", "E").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Re incident") && svg.contains("Re oracle"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn writes_into_new_directories() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/c.csv");
        let mut t = Table::new(["x", "y"]);
        t.push(["1", "2"]);
        t.write_csv(&path).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "x,y\n1,2\n");
    }
}
