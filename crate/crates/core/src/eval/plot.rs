use std::f64::consts::TAU;
use std::fmt::Write;

use crate::analysis::{Lattice, StftConfig};
use crate::paths::PathSet;

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 36.0;
const DB_RANGE: f64 = 60.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

/// One row of the figure: a lattice and the paths each tracker found on it.
#[derive(Debug, Clone, Copy)]
pub struct FigureRow<'a> {
    pub label: &'a str,
    pub lattice: &'a Lattice,
    pub lp: Option<&'a PathSet>,
    pub greedy: Option<&'a PathSet>,
}

struct Axes {
    x0: f64,
    y0: f64,
    t_max: f64,
    f_lo: f64,
    f_hi: f64,
}

impl Axes {
    fn x(&self, t: f64) -> f64 {
        self.x0 + MARGIN + t / self.t_max * (PANEL_W - 1.5 * MARGIN)
    }

    fn y(&self, f: f64) -> f64 {
        let u = (f - self.f_lo) / (self.f_hi - self.f_lo);
        self.y0 + PANEL_H - MARGIN - u * (PANEL_H - 1.5 * MARGIN)
    }
}

fn grey(power: f64, max_power: f64) -> u8 {
    if max_power <= 0.0 || power <= 0.0 {
        return 255;
    }
    let db = (10.0 * (power / max_power).log10()).clamp(-DB_RANGE, 0.0);
    // 0 dB is black, -DB_RANGE is near white
    (230.0 * -db / DB_RANGE).round() as u8
}

fn draw_panel(out: &mut String, ax: &Axes, lat: &Lattice, paths: Option<&PathSet>, stft: &StftConfig, title: &str) {
    let (x_lo, x_hi) = (ax.x(0.0), ax.x(ax.t_max));
    let (y_lo, y_hi) = (ax.y(ax.f_lo), ax.y(ax.f_hi));
    let _ = writeln!(
        out,
        r##"<g><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="black" stroke-width="0.5"/>"##,
        x_lo,
        y_hi,
        x_hi - x_lo,
        y_lo - y_hi
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
        0.5 * (x_lo + x_hi),
        y_hi - 6.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="8" text-anchor="end">{:.0}</text><text x="{:.2}" y="{:.2}" font-size="8" text-anchor="end">{:.0}</text>"#,
        x_lo - 3.0,
        y_hi + 8.0,
        ax.f_hi,
        x_lo - 3.0,
        y_lo,
        ax.f_lo
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="8" text-anchor="end">{:.2} s</text>"#,
        x_hi,
        y_lo + 10.0,
        ax.t_max
    );

    let fs = stft.fs;
    let half = stft.hop as f64 / 2.0;
    let max_power = lat.frames().iter().flatten().map(|a| a.power).fold(0.0, f64::max);
    for a in lat.frames().iter().flatten() {
        let c = stft.frame_center(a.frame);
        let f = |dt: f64| (a.omega + a.psi * dt) * fs / TAU;
        let g = grey(a.power, max_power);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="rgb({g},{g},{g})" stroke-width="1.2"/>"#,
            ax.x((c - half) / fs),
            ax.y(f(-half)),
            ax.x((c + half) / fs),
            ax.y(f(half))
        );
    }

    if let Some(ps) = paths {
        for (i, path) in ps.paths.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = path
                .iter()
                .map(|&m| {
                    let a = lat.atom(m);
                    format!("{:.2},{:.2}", ax.x(stft.frame_center(a.frame) / fs), ax.y(a.freq_hz(fs)))
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                pts.join(" ")
            );
        }
    }
    out.push_str("</g>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes_for(lat: &Lattice, stft: &StftConfig, f_range: (f64, f64), x0: f64, y0: f64) -> Axes {
    let t_max = (stft.frame_center(lat.n_frames().max(1)) / stft.fs).max(1e-3);
    Axes { x0, y0, t_max, f_lo: f_range.0, f_hi: f_range.1 }
}

fn header(w: f64, h: f64) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif">"#
    ) + "\n"
}

/// A single panel: atoms as grey segments of slope ψ, paths (if any) colored.
pub fn render_panel_svg(lat: &Lattice, paths: Option<&PathSet>, stft: &StftConfig, f_range: (f64, f64), title: &str) -> String {
    let mut out = header(PANEL_W, PANEL_H);
    draw_panel(&mut out, &axes_for(lat, stft, f_range, 0.0, 0.0), lat, paths, stft, title);
    out.push_str("</svg>\n");
    out
}

/// Grid with one row per entry and columns raw / LP / greedy.
pub fn render_figure(rows: &[FigureRow<'_>], stft: &StftConfig, f_range: (f64, f64)) -> String {
    let mut out = header(3.0 * PANEL_W, rows.len().max(1) as f64 * PANEL_H);
    for (r, row) in rows.iter().enumerate() {
        let y0 = r as f64 * PANEL_H;
        let cols = [(None, "atoms"), (row.lp, "LP"), (row.greedy, "greedy")];
        for (c, (paths, name)) in cols.into_iter().enumerate() {
            let ax = axes_for(row.lattice, stft, f_range, c as f64 * PANEL_W, y0);
            draw_panel(&mut out, &ax, row.lattice, paths, stft, &format!("{} {name}", row.label));
        }
    }
    out.push_str("</svg>\n");
    out
}
