//! Static SVG heatmaps of matrices, one rectangle per cell, row 0 at the top.

use std::fmt::Write as _;

use nalgebra::DMatrix;

/// Colour used for NaN cells.
pub const NAN_COLOR: &str = "#ff00ff";

const CELL: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    /// Linear ramp from white (minimum) to dark blue `#08306b` (maximum).
    Blues,
    /// White for values ≤ 0.5, black above; meant for 0/1 matrices.
    Binary,
    /// Blue `#2166ac` (minimum) through white (midpoint) to red `#b2182b` (maximum).
    Diverging,
}

impl Palette {
    fn describe(self) -> &'static str {
        match self {
            Palette::Blues => "linear ramp from #ffffff at min to #08306b at max",
            Palette::Binary => "#ffffff for value <= 0.5, #000000 above",
            Palette::Diverging => "linear ramp #2166ac at min, #ffffff at midpoint, #b2182b at max",
        }
    }

    fn color(self, t: f64, raw: f64) -> (u8, u8, u8) {
        let lerp = |a: (u8, u8, u8), b: (u8, u8, u8), t: f64| {
            let f = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
            (f(a.0, b.0), f(a.1, b.1), f(a.2, b.2))
        };
        const WHITE: (u8, u8, u8) = (255, 255, 255);
        match self {
            Palette::Blues => lerp(WHITE, (0x08, 0x30, 0x6b), t),
            Palette::Binary => {
                if raw > 0.5 {
                    (0, 0, 0)
                } else {
                    WHITE
                }
            }
            Palette::Diverging => {
                if t < 0.5 {
                    lerp((0x21, 0x66, 0xac), WHITE, 2.0 * t)
                } else {
                    lerp(WHITE, (0xb2, 0x18, 0x2b), 2.0 * t - 1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub svg: String,
    /// Cells rendered in [`NAN_COLOR`].
    pub nan_cells: usize,
}

/// Render `m` with values mapped linearly between its finite min and max
/// (a constant matrix maps to the palette midpoint).
pub fn render_heatmap(m: &DMatrix<f64>, palette: Palette) -> Heatmap {
    let finite: Vec<f64> = m.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    render_heatmap_range(m, palette, lo, hi)
}

/// Render with the colour scale pinned to `[lo, hi]`; values outside are clamped.
pub fn render_heatmap_range(m: &DMatrix<f64>, palette: Palette, lo: f64, hi: f64) -> Heatmap {
    let (rows, cols) = m.shape();
    let any_finite = m.iter().any(|v| v.is_finite());
    let nan_cells = m.iter().filter(|v| !v.is_finite()).count();
    if nan_cells > 0 {
        log::warn!("heatmap has {nan_cells} non-finite cells, drawn in {NAN_COLOR}");
    }
    let (w, h) = (cols * CELL, rows * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#
    );
    let range = if !any_finite {
        "no finite values".to_string()
    } else {
        format!("min {lo:.16e}, max {hi:.16e}")
    };
    let _ = writeln!(
        s,
        "<desc>{rows}x{cols} matrix, row 0 at top, column 0 at left; {range}; colour: {}; non-finite cells: {nan_cells} drawn in {NAN_COLOR}</desc>",
        palette.describe()
    );
    for i in 0..rows {
        for j in 0..cols {
            let v = m[(i, j)];
            let (x, y) = (j * CELL, i * CELL);
            if !v.is_finite() {
                let _ = writeln!(
                    s,
                    r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{NAN_COLOR}" class="nan"/>"#
                );
                continue;
            }
            let t = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
            let (r, g, b) = palette.color(t, v);
            let _ = writeln!(
                s,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>"
            );
        }
    }
    s.push_str("</svg>\n");
    Heatmap { svg: s, nan_cells }
}
