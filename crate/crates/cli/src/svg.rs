//! Static SVG drawing of a configuration: sides solid, diagonals dashed.

use std::fmt::Write;

use planar_cc::Configuration;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 80.0;

/// Draws the xy-projection of `config` (gauge-framed solutions lie in that plane).
pub fn render(config: &Configuration) -> String {
    let pts: Vec<(f64, f64)> = config.positions().iter().map(|p| (p.x, p.y)).collect();
    let (min_x, max_x) = bounds(pts.iter().map(|p| p.0));
    let (min_y, max_y) = bounds(pts.iter().map(|p| p.1));
    let span = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let screen: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(x, y)| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale))
        .collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    for (i, j, dashed) in [(0, 1, false), (1, 2, false), (2, 3, false), (3, 0, false), (0, 2, true), (1, 3, true)] {
        let (a, b) = (screen[i], screen[j]);
        let dash = if dashed { r#" stroke-dasharray="8 6""# } else { "" };
        let _ = writeln!(
            out,
            r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2"{dash}/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    let masses = config.masses().as_array();
    let heaviest = masses.iter().copied().fold(0.0, f64::max);
    for (k, &(x, y)) in screen.iter().enumerate() {
        let r = 6.0 + 10.0 * (masses[k] / heaviest).cbrt();
        let _ = writeln!(out, r##"  <circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="#3465a4"/>"##);
        let _ = writeln!(
            out,
            r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="22">{}</text>"#,
            x + r + 4.0,
            y - r - 4.0,
            k + 1
        );
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use planar_cc::Masses;

    #[test]
    fn square_fits_the_view() {
        let c = Configuration::planar([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]], Masses::equal()).unwrap();
        let svg = render(&c);
        assert!(svg.contains(r#"viewBox="0 0 800 800""#));
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains(r#"cx="720.000" cy="80.000""#));
    }
}
