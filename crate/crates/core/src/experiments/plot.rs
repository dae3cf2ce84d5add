//! Static SVG output for convergence runs.

use std::fmt::Write;

use crate::carleman::TruncationReport;

const W: f64 = 420.0;
const H: f64 = 320.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const FLOOR: f64 = 1e-18;

struct Panel {
    x0: f64,
    xlo: f64,
    xhi: f64,
    ylo: f64,
    yhi: f64,
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        self.x0 + PAD + (x - self.xlo) / (self.xhi - self.xlo).max(1e-300) * (W - 2.0 * PAD)
    }

    // y values are log10
    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.ylo) / (self.yhi - self.ylo).max(1e-300) * (H - 2.0 * PAD)
    }

    fn frame(&self, s: &mut String, title: &str, xlabel: &str, xticks: &[f64]) {
        let (l, r) = (self.x0 + PAD, self.x0 + W - PAD);
        let (t, b) = (PAD, H - PAD);
        let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{title}</text>"#, (l + r) / 2.0, t - 12.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{xlabel}</text>"#, (l + r) / 2.0, b + 35.0);
        for &x in xticks {
            let p = self.px(x);
            let _ = writeln!(s, r#"<line x1="{p:.1}" y1="{b}" x2="{p:.1}" y2="{}" stroke="black"/>"#, b + 4.0);
            let _ = writeln!(s, r#"<text x="{p:.1}" y="{}" text-anchor="middle" font-size="10">{}</text>"#, b + 16.0, trim(x));
        }
        let step = ((self.yhi - self.ylo) / 8.0).ceil().max(1.0) as i32;
        let mut e = self.ylo.ceil() as i32;
        while (e as f64) <= self.yhi {
            let p = self.py(e as f64);
            let _ = writeln!(s, r#"<line x1="{}" y1="{p:.1}" x2="{l}" y2="{p:.1}" stroke="black"/>"#, l - 4.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="10">1e{e}</text>"#, l - 6.0, p + 3.0);
            e += step;
        }
    }
}

fn trim(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn lg(v: f64) -> f64 {
    v.max(FLOOR).log10()
}

fn polyline(s: &mut String, pts: &[(f64, f64)], color: &str) {
    let mut d = String::new();
    for (x, y) in pts {
        let _ = write!(d, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim_end());
}

/// Left: ||η1(t)||_inf against t per N. Right: max_t ||η1||_inf against N.
pub fn convergence_svg(title: &str, reports: &[TruncationReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        2.0 * W,
        H + 20.0
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="16" text-anchor="middle" font-size="14">{title}</text>"#, W);
    if reports.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let all = reports.iter().flat_map(|r| r.eta_inf.iter().copied()).filter(|v| *v > 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in all {
        lo = lo.min(lg(v));
        hi = hi.max(lg(v));
    }
    if !lo.is_finite() {
        lo = lg(FLOOR);
        hi = 0.0;
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
    let t_end = reports[0].times.last().copied().unwrap_or(1.0);
    let left = Panel {
        x0: 0.0,
        xlo: 0.0,
        xhi: t_end,
        ylo: lo,
        yhi: hi,
    };
    left.frame(&mut s, "error vs t", "t", &[0.0, t_end / 2.0, t_end]);
    for (i, r) in reports.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = r
            .times
            .iter()
            .zip(&r.eta_inf)
            .filter(|(_, v)| **v > 0.0)
            .map(|(t, v)| (left.px(*t), left.py(lg(*v))))
            .collect();
        polyline(&mut s, &pts, c);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="10" fill="{c}">N={}</text>"#,
            W - PAD + 4.0,
            PAD + 12.0 * i as f64 + 8.0,
            r.n_trunc
        );
    }
    let nmin = reports.iter().map(|r| r.n_trunc).min().unwrap() as f64;
    let nmax = reports.iter().map(|r| r.n_trunc).max().unwrap() as f64;
    let right = Panel {
        x0: W,
        xlo: nmin - 0.5,
        xhi: nmax + 0.5,
        ylo: lo,
        yhi: hi,
    };
    let ticks: Vec<f64> = reports.iter().map(|r| r.n_trunc as f64).collect();
    right.frame(&mut s, "max error vs N", "N", &ticks);
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (right.px(r.n_trunc as f64), right.py(lg(r.max_eta_inf()))))
        .collect();
    polyline(&mut s, &pts, COLORS[0]);
    for (x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{}"/>"#, COLORS[0]);
    }
    s.push_str("</svg>\n");
    s
}
