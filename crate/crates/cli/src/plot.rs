//! Hand-written SVG: a grid of log-log gap-vs-n panels, one row per engine
//! and one column per sequence. Infinite gaps are drawn as red triangles
//! pinned to the top edge of the panel; zero gaps sit on the bottom edge.

use std::fmt::Write as _;

use advdiv::convergence::SequenceTrace;
use advdiv::ExtendedReal;

const PANEL_W: f64 = 180.0;
const PANEL_H: f64 = 110.0;
const GAP: f64 = 14.0;
const LEFT: f64 = 120.0;
const TOP: f64 = 48.0;
const FLOOR_EXP: i32 = -12;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Decade range covering every finite positive gap.
fn decades(traces: &[Vec<SequenceTrace>]) -> (i32, i32) {
    let finite: Vec<f64> = traces
        .iter()
        .flatten()
        .flat_map(|t| t.gaps())
        .filter_map(|g| g.finite())
        .filter(|&g| g > 0.0)
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(0.0f64, f64::max);
    if finite.is_empty() {
        return (-3, 0);
    }
    let lo = (lo.log10().floor() as i32).max(FLOOR_EXP);
    let hi = (hi.log10().ceil() as i32).max(lo + 1);
    (lo, hi)
}

pub fn gap_grid(engines: &[String], sequences: &[String], traces: &[Vec<SequenceTrace>]) -> String {
    let (lo, hi) = decades(traces);
    let width = LEFT + sequences.len() as f64 * (PANEL_W + GAP) + GAP;
    let height = TOP + engines.len() as f64 * (PANEL_H + GAP) + GAP;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="14" font-size="12">gap vs n (log-log), decades 1e{lo} to 1e{hi}</text>"#);
    for (c, name) in sequences.iter().enumerate() {
        let x = LEFT + c as f64 * (PANEL_W + GAP) + PANEL_W / 2.0;
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, TOP - 8.0, esc(name));
    }
    for (r, name) in engines.iter().enumerate() {
        let y = TOP + r as f64 * (PANEL_H + GAP) + PANEL_H / 2.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{}</text>"#, LEFT - 34.0, esc(name));
        for (c, t) in traces.get(r).into_iter().flatten().enumerate() {
            let x0 = LEFT + c as f64 * (PANEL_W + GAP);
            let y0 = TOP + r as f64 * (PANEL_H + GAP);
            panel(&mut s, t, x0, y0, lo, hi, c == 0);
        }
    }
    s.push_str("</svg>\n");
    s
}

fn panel(s: &mut String, t: &SequenceTrace, x0: f64, y0: f64, lo: i32, hi: i32, ticks: bool) {
    let _ = writeln!(s, r##"<rect x="{x0:.1}" y="{y0:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##);
    let span = (hi - lo) as f64;
    let ymap = |g: f64| {
        let e = if g > 0.0 { g.log10().clamp(lo as f64, hi as f64) } else { lo as f64 };
        y0 + PANEL_H * (1.0 - (e - lo as f64) / span)
    };
    for d in lo..=hi {
        let y = ymap(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd" stroke-width="0.5"/>"##,
            x0 + PANEL_W
        );
        if ticks && (d - lo) % 2 == 0 {
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="8">1e{d}</text>"#, x0 - 3.0, y + 3.0);
        }
    }
    let (nmin, nmax) = match (t.steps.iter().min(), t.steps.iter().max()) {
        (Some(&a), Some(&b)) => (a.max(1) as f64, b.max(1) as f64),
        _ => return,
    };
    let xspan = (nmax.ln() - nmin.ln()).max(1e-12);
    let xmap = |n: usize| x0 + 4.0 + (PANEL_W - 8.0) * ((n.max(1) as f64).ln() - nmin.ln()) / xspan;

    let mut run: Vec<(f64, f64)> = Vec::new();
    let flush = |s: &mut String, run: &mut Vec<(f64, f64)>| {
        if run.len() > 1 {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
            let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.2"/>"##, pts.join(" "));
        }
        run.clear();
    };
    for (&n, g) in t.steps.iter().zip(t.gaps()) {
        let x = xmap(n);
        match g {
            ExtendedReal::Finite(v) => {
                let y = ymap(v);
                run.push((x, y));
                let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="1.3" fill="#1f5fa8"/>"##);
            }
            ExtendedReal::PosInfinity => {
                flush(s, &mut run);
                let _ = writeln!(
                    s,
                    r##"<path d="M{:.1},{:.1} L{:.1},{:.1} L{:.1},{:.1} Z" fill="#c0392b"/>"##,
                    x - 2.5,
                    y0 + 6.0,
                    x + 2.5,
                    y0 + 6.0,
                    x,
                    y0 + 1.5
                );
            }
        }
    }
    flush(s, &mut run);
}
