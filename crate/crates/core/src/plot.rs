//! Self-contained SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
/// Buckets per series; each contributes its min and max.
const BUCKETS: usize = 1500;

/// Overlay of time series sharing one time axis.
pub fn overlay_svg(title: &str, y_label: &str, series: &[(&str, &TimeSeries)]) -> Result<String> {
    let Some((_, first)) = series.first() else {
        return Err(Error::Data("nothing to plot".into()));
    };
    for (_, s) in series {
        first.check_aligned(s)?;
    }
    let t_end = first.duration().max(first.dt());
    let (mut lo, mut hi) = series
        .iter()
        .flat_map(|(_, s)| s.values())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 * hi.abs().max(1.0) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);

    let (ml, mr, mt, mb) = MARGIN;
    let pw = WIDTH - ml - mr;
    let ph = HEIGHT - mt - mb;
    let px = |t: f64| ml + pw * t / t_end;
    let py = |v: f64| mt + ph * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        w,
        r##"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );

    for tick in ticks(0.0, t_end) {
        let x = px(tick);
        let _ = writeln!(
            w,
            r##"<line x1="{x:.1}" y1="{mt}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##,
            mt + ph
        );
        let _ = writeln!(
            w,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            mt + ph + 16.0,
            label(tick)
        );
    }
    for tick in ticks(lo, hi) {
        let y = py(tick);
        let _ = writeln!(
            w,
            r##"<line x1="{ml}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            ml + pw
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            ml - 6.0,
            y + 4.0,
            label(tick)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t [s]</text>"#,
        ml + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(y_label)
    );

    for (i, (name, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = decimate(s)
            .into_iter()
            .map(|(t, v)| format!("{:.1},{:.1}", px(t), py(v)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = mt + 14.0 + 16.0 * i as f64;
        let lx = ml + pw - 150.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn save_overlay(path: &Path, title: &str, y_label: &str, series: &[(&str, &TimeSeries)]) -> Result<()> {
    std::fs::write(path, overlay_svg(title, y_label, series)?)?;
    Ok(())
}

/// Min and max of each bucket, in time order, so peaks survive.
fn decimate(s: &TimeSeries) -> Vec<(f64, f64)> {
    let v = s.values();
    if v.len() <= 2 * BUCKETS {
        return v.iter().enumerate().map(|(k, &x)| (s.time(k), x)).collect();
    }
    let size = v.len().div_ceil(BUCKETS);
    let mut out = Vec::with_capacity(2 * BUCKETS);
    for (b, chunk) in v.chunks(size).enumerate() {
        let base = b * size;
        let (imin, imax) = chunk.iter().enumerate().fold((0, 0), |(lo, hi), (i, &x)| {
            (if x < chunk[lo] { i } else { lo }, if x > chunk[hi] { i } else { hi })
        });
        let (first, second) = if imin <= imax { (imin, imax) } else { (imax, imin) };
        out.push((s.time(base + first), chunk[first]));
        if second != first {
            out.push((s.time(base + second), chunk[second]));
        }
    }
    out
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
