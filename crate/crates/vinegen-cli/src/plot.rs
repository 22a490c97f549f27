//! Minimal SVG rendering: scatter plots and grayscale image grids.

use vinegen::error::{Error, Result};

const CANVAS: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Scatter plot of two columns.
pub fn scatter_svg(rows: &[Vec<f64>], cx: usize, cy: usize) -> Result<String> {
    let d = rows.first().map(|r| r.len()).unwrap_or(0);
    if cx >= d || cy >= d {
        return Err(Error::Domain(format!(
            "column indices ({cx},{cy}) out of range for {d} columns"
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[cx]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[cy]).collect();
    let bounds = |v: &[f64]| -> (f64, f64) {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo < hi {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let span = CANVAS - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + span * (x - x0) / (x1 - x0);
    let py = |y: f64| CANVAS - MARGIN - span * (y - y0) / (y1 - y0);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{span}\" height=\"{span}\" fill=\"none\" stroke=\"#444\"/>\n"
    ));
    for (x, y) in xs.iter().zip(&ys) {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n",
            px(*x),
            py(*y)
        ));
    }
    for (v, x, y, anchor) in [
        (x0, MARGIN, CANVAS - MARGIN / 2.0, "start"),
        (x1, CANVAS - MARGIN, CANVAS - MARGIN / 2.0, "end"),
        (y0, MARGIN / 4.0, CANVAS - MARGIN, "start"),
        (y1, MARGIN / 4.0, MARGIN, "start"),
    ] {
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"11\" text-anchor=\"{anchor}\" fill=\"#444\">{v:.3}</text>\n"
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Grid of flattened square grayscale images (up to 100 rows shown).
pub fn image_grid_svg(rows: &[Vec<f64>], side: usize) -> Result<String> {
    let p = rows.first().map(|r| r.len()).unwrap_or(0);
    if side == 0 || side * side != p {
        return Err(Error::DimensionMismatch(format!(
            "rows have {p} pixels; not {side}x{side} images"
        )));
    }
    let shown = rows.len().min(100);
    let cols = (shown as f64).sqrt().ceil() as usize;
    let grid_rows = shown.div_ceil(cols);
    let cell = 4.0;
    let gap = 2.0 * cell;
    let img_px = side as f64 * cell;
    let width = cols as f64 * (img_px + gap) + gap;
    let height = grid_rows as f64 * (img_px + gap) + gap;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, img) in rows.iter().take(shown).enumerate() {
        let gx = gap + (i % cols) as f64 * (img_px + gap);
        let gy = gap + (i / cols) as f64 * (img_px + gap);
        for r in 0..side {
            for c in 0..side {
                let v = img[r * side + c].clamp(0.0, 1.0);
                let k = (255.0 * (1.0 - v)).round() as u8;
                if k == 255 {
                    continue; // white on white
                }
                svg.push_str(&format!(
                    "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({k},{k},{k})\"/>\n",
                    gx + c as f64 * cell,
                    gy + r as f64 * cell
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
