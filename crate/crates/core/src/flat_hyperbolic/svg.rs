use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{DevelopedPolygon, FlatStructure};
use crate::error::Result;

pub enum Drawing<'a> {
    Hyperbolic(&'a DevelopedPolygon),
    Flat(&'a FlatStructure),
}

const SIZE: f64 = 800.0;
const CLASS_COLORS: [&str; 3] = ["#d62728", "#1f77b4", "#2ca02c"];

fn fmt(z: Complex64) -> String {
    format!("{:.6} {:.6}", z.re, z.im)
}

/// Path command for the geodesic from `p` to `q`, continuing a path already at `p`.
fn geodesic(p: Complex64, q: Complex64) -> String {
    let cross = p.re * q.im - p.im * q.re;
    if cross.abs() < 1e-12 * (1.0 + p.norm() * q.norm()) {
        return format!("L {}", fmt(q));
    }
    // Circle through p, q and the inverse of p, which is orthogonal to |z| = 1.
    let pi = p / p.norm_sqr();
    let centre = circumcentre(p, q, pi);
    let radius = (p - centre).norm();
    let turn = (p - centre).re * (q - centre).im - (p - centre).im * (q - centre).re;
    format!(
        "A {radius:.6} {radius:.6} 0 0 {} {}",
        u8::from(turn > 0.0),
        fmt(q)
    )
}

fn circumcentre(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    Complex64::new(
        (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d,
        (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d,
    )
}

fn header(out: &mut String, min: Complex64, max: Complex64) {
    let span = (max - min).re.max((max - min).im);
    let stroke = span / 400.0;
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="{:.6} {:.6} {span:.6} {span:.6}">"#,
        min.re, -max.im
    );
    let _ = writeln!(
        out,
        r#"<g transform="scale(1,-1)" fill="none" stroke="black" stroke-width="{stroke:.6}">"#
    );
}

fn hyperbolic(d: &DevelopedPolygon) -> String {
    let mut out = String::new();
    let m = Complex64::new(1.05, 1.05);
    header(&mut out, -m, m);
    let _ = writeln!(
        out,
        r##"<circle id="unit-circle" cx="0" cy="0" r="1" stroke="#888888"/>"##
    );
    for t in &d.triangles {
        let [c, p, q] = t.corners;
        let _ = writeln!(
            out,
            r#"<path class="triangle" data-face="{}" d="M {} {} {} {} Z"/>"#,
            t.face,
            fmt(c),
            geodesic(c, p),
            geodesic(p, q),
            geodesic(q, c)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn flat(fs: &FlatStructure) -> String {
    let mut out = String::new();
    let all = fs.corners.iter().flatten();
    let (mut lo, mut hi) = (
        Complex64::new(f64::MAX, f64::MAX),
        Complex64::new(f64::MIN, f64::MIN),
    );
    for z in all {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let pad = (hi - lo).norm() * 0.05;
    header(
        &mut out,
        lo - Complex64::new(pad, pad),
        hi + Complex64::new(pad, pad),
    );
    for (f, c) in fs.corners.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<path class="triangle" data-face="{f}" fill="#f4f4f4" d="M {} L {} L {} Z"/>"##,
            fmt(c[0]),
            fmt(c[1]),
            fmt(c[2])
        );
    }
    let slot: std::collections::HashMap<usize, (usize, usize)> = fs
        .face_darts
        .iter()
        .enumerate()
        .flat_map(|(f, ds)| ds.iter().enumerate().map(move |(k, &d)| (d, (f, k))))
        .collect();
    for g in fs.gluings.iter().filter(|g| !g.internal) {
        let (f, k) = slot[&g.dart];
        let (p, q) = (fs.corners[f][k], fs.corners[f][(k + 1) % 3]);
        let _ = writeln!(
            out,
            r##"<path class="glued" data-partner="{}" stroke="#ff7f0e" d="M {} L {}"/>"##,
            g.partner,
            fmt(p),
            fmt(q)
        );
    }
    let radius = (hi - lo).norm() / 150.0;
    for (c, classes) in fs.corners.iter().zip(&fs.corner_class) {
        for (z, &cls) in c.iter().zip(classes) {
            let _ = writeln!(
                out,
                r#"<circle class="cone p{}" cx="{:.6}" cy="{:.6}" r="{radius:.6}" fill="{}" stroke="none"/>"#,
                cls + 1,
                z.re,
                z.im,
                CLASS_COLORS[cls]
            );
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn render_svg(target: Drawing<'_>, path: &Path) -> Result<()> {
    let doc = match target {
        Drawing::Hyperbolic(d) => hyperbolic(d),
        Drawing::Flat(fs) => flat(fs),
    };
    std::fs::write(path, doc)?;
    Ok(())
}
