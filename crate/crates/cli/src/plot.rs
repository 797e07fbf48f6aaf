//! Deterministic SVG for spectrum curves: θ on `(0, 1)`, value on `[0, d]`.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use assouad_kit::closed_form::{spectrum_bounds, theta_grid, SpectrumCurve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 16.0;
const BOTTOM: f64 = 44.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const BOUND_SAMPLES: usize = 199;

/// Box dimension, quasi-Assouad dimension and phase transition `ρ` for the
/// dashed envelope.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub box_dim: f64,
    pub quasi_assouad: f64,
    pub rho: f64,
}

impl Bounds {
    /// Parses `box,qa` or `box,qa,rho`; `ρ` defaults to `1 - box/qa`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()?;
        let (box_dim, quasi_assouad, rho) = match parts[..] {
            [b, qa] if qa > 0.0 => (b, qa, 1.0 - b / qa),
            [b, qa, rho] => (b, qa, rho),
            _ => bail!("bounds must be `box,qa` or `box,qa,rho` with qa > 0"),
        };
        Ok(Self {
            box_dim,
            quasi_assouad,
            rho,
        })
    }

    /// Lower and upper bound curves sampled on a fine grid.
    pub fn curves(&self) -> Result<[Vec<(f64, f64)>; 2]> {
        let mut lower = Vec::with_capacity(BOUND_SAMPLES);
        let mut upper = Vec::with_capacity(BOUND_SAMPLES);
        for t in theta_grid::<f64>(BOUND_SAMPLES) {
            let b = spectrum_bounds(self.box_dim, self.quasi_assouad, self.rho, t)?;
            lower.push((t, b.lower));
            upper.push((t, b.upper));
        }
        Ok([lower, upper])
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    y_max: f64,
}

impl Frame {
    fn x(&self, theta: f64) -> f64 {
        LEFT + theta * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        let v = value.clamp(0.0, self.y_max);
        HEIGHT - BOTTOM - v / self.y_max * (HEIGHT - TOP - BOTTOM)
    }

    fn path(&self, points: &[(f64, f64)]) -> String {
        let mut d = String::new();
        for (i, &(t, v)) in points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, self.x(t), self.y(v));
        }
        d
    }
}

/// Renders the curves (solid) and optional bounds (dashed). `d` is the top of
/// the value axis.
pub fn render(curves: &[SpectrumCurve<f64>], bounds: Option<Bounds>, d: f64) -> Result<String> {
    if curves.is_empty() && bounds.is_none() {
        bail!("nothing to plot");
    }
    if let Some(c) = curves.iter().find(|c| c.len() < 2) {
        bail!("curve {:?} has fewer than two samples", c.provenance);
    }
    if !(d > 0.0) {
        bail!("value axis maximum must be positive");
    }
    let frame = Frame { y_max: d };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (frame.x(0.0), frame.x(1.0), frame.y(0.0), frame.y(d));
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = f64::from(i) / 4.0;
        let x = frame.x(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            y0 + 4.0,
            y0 + 16.0
        );
        let v = d * t;
        let y = frame.y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0,
            (v * 1000.0).round() / 1000.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">θ</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 8.0
    );
    let mut legend = Vec::new();
    if let Some(b) = bounds {
        let [lower, upper] = b.curves()?;
        for (points, name) in [(lower, "lower bound"), (upper, "upper bound")] {
            let _ = writeln!(
                svg,
                r##"<path d="{}" fill="none" stroke="#555555" stroke-dasharray="6,4"/>"##,
                frame.path(&points)
            );
            legend.push(("#555555", true, name.to_string()));
        }
    }
    for (i, c) in curves.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let points: Vec<(f64, f64)> = c.theta.iter().copied().zip(c.values.iter().copied()).collect();
        let _ = writeln!(
            svg,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            frame.path(&points)
        );
        legend.push((colour, false, format!("{} spectrum: {}", c.kind.name(), c.provenance)));
    }
    for (i, (colour, dashed, name)) in legend.iter().enumerate() {
        let y = TOP + 8.0 + 14.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x0 + 10.0,
            x0 + 34.0,
            x0 + 40.0,
            y + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use assouad_kit::closed_form::SpectrumKind;

    #[test]
    fn constant_curve_is_horizontal() {
        let c = SpectrumCurve::new(vec![0.25, 0.75], vec![1.0, 1.0], SpectrumKind::Assouad, "flat").unwrap();
        let svg = render(&[c], None, 2.0).unwrap();
        assert!(svg.contains(r#"d="M198.00,186.00 L482.00,186.00""#), "{svg}");
    }

    #[test]
    fn envelope_for_half_and_one() {
        let b = Bounds::parse("0.5,1").unwrap();
        assert_eq!(b.rho, 0.5);
        let [lower, upper] = b.curves().unwrap();
        assert!(lower.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(upper.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(lower.iter().zip(&upper).all(|(l, u)| l.1 <= u.1 + 1e-12));
        let at_rho = lower.iter().zip(&upper).find(|(l, _)| l.0 >= 0.5).unwrap();
        assert!((at_rho.0 .1 - at_rho.1 .1).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_sample() {
        let c = SpectrumCurve::new(vec![0.5], vec![1.0], SpectrumKind::Assouad, "one").unwrap();
        assert!(render(&[c], None, 1.0).is_err());
        assert!(render(&[], None, 1.0).is_err());
    }
}
