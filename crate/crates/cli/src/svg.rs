//! Scatter plot of a constellation; each point is a circle whose radius is
//! proportional to its probability.

use std::fmt::Write;

use cqam_core::constellation::Constellation;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;
const MAX_RADIUS: f64 = 9.0;

pub fn scatter(c: &Constellation) -> String {
    let extent = c
        .points()
        .iter()
        .map(|x| x.re.abs().max(x.im.abs()))
        .fold(1e-12, f64::max)
        * 1.05;
    let scale = (SIZE / 2.0 - MARGIN) / extent;
    let centre = SIZE / 2.0;
    let p_max = c.probs().iter().copied().fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(c.name()));
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{centre}" x2="{x2}" y2="{centre}" stroke="#bbbbbb"/><line x1="{centre}" y1="{MARGIN}" x2="{centre}" y2="{x2}" stroke="#bbbbbb"/>"##,
        x2 = SIZE - MARGIN
    );
    for (x, p) in c.points().iter().zip(c.probs()) {
        if *p <= 0.0 {
            continue;
        }
        let _ = writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="#1f4e9a"/>"##,
            centre + x.re * scale,
            centre - x.im * scale,
            MAX_RADIUS * p / p_max
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
