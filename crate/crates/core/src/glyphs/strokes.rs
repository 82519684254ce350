//! Built-in raster glyph source: 36 uppercase/digit outlines drawn as
//! polyline strokes and rasterized with a round-capped pen. This is what
//! generates the atlas asset shipped with the crate (see the `gen_atlas`
//! example); the renderer itself always goes through the atlas file so
//! measured or custom fonts can be swapped in.

use crate::Image;

pub(crate) const CELL_WIDTH: usize = 38;
pub(crate) const CELL_HEIGHT: usize = 40;
pub(crate) const ORDER: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

/// Pen thickness as a fraction of cell height. Thick enough that a glyph
/// scaled to height 10 still leaves ink in every column after binarization.
const THICKNESS: f64 = 0.12;

struct Outline {
    /// Ink width as a fraction of cell height.
    width: f64,
    polylines: Vec<Vec<(f64, f64)>>,
}

/// Sampled elliptical arc; angles in degrees, y axis pointing down.
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, a0: f64, a1: f64) -> Vec<(f64, f64)> {
    let n = 28;
    (0..=n)
        .map(|i| {
            let t = (a0 + (a1 - a0) * i as f64 / n as f64).to_radians();
            (cx + rx * t.cos(), cy + ry * t.sin())
        })
        .collect()
}

fn join(parts: Vec<Vec<(f64, f64)>>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for part in parts {
        out.extend(part);
    }
    out
}

fn pts(p: &[(f64, f64)]) -> Vec<(f64, f64)> {
    p.to_vec()
}

#[rustfmt::skip]
fn outline(c: char) -> Outline {
    let (width, polylines) = match c {
        'A' => (0.70, vec![
            pts(&[(0.0, 1.0), (0.5, 0.0), (1.0, 1.0)]),
            pts(&[(0.19, 0.64), (0.81, 0.64)]),
        ]),
        'B' => (0.60, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            join(vec![pts(&[(0.0, 0.0), (0.52, 0.0)]), arc(0.52, 0.25, 0.48, 0.25, -90.0, 90.0), pts(&[(0.0, 0.5)])]),
            join(vec![pts(&[(0.0, 0.5), (0.52, 0.5)]), arc(0.52, 0.75, 0.48, 0.25, -90.0, 90.0), pts(&[(0.0, 1.0)])]),
        ]),
        'C' => (0.64, vec![arc(0.5, 0.5, 0.5, 0.5, 50.0, 310.0)]),
        'D' => (0.62, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            join(vec![pts(&[(0.0, 0.0), (0.35, 0.0)]), arc(0.35, 0.5, 0.65, 0.5, -90.0, 90.0), pts(&[(0.0, 1.0)])]),
        ]),
        'E' => (0.56, vec![
            pts(&[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]),
            pts(&[(0.0, 0.5), (0.82, 0.5)]),
        ]),
        'F' => (0.56, vec![
            pts(&[(1.0, 0.0), (0.0, 0.0), (0.0, 1.0)]),
            pts(&[(0.0, 0.5), (0.78, 0.5)]),
        ]),
        'G' => (0.68, vec![
            arc(0.5, 0.5, 0.5, 0.5, 45.0, 315.0),
            pts(&[(0.5, 0.55), (0.97, 0.55), (0.97, 0.80)]),
        ]),
        'H' => (0.62, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            pts(&[(1.0, 0.0), (1.0, 1.0)]),
            pts(&[(0.0, 0.5), (1.0, 0.5)]),
        ]),
        'I' => (0.40, vec![
            pts(&[(0.5, 0.0), (0.5, 1.0)]),
            pts(&[(0.08, 0.0), (0.92, 0.0)]),
            pts(&[(0.08, 1.0), (0.92, 1.0)]),
        ]),
        'J' => (0.52, vec![
            join(vec![pts(&[(1.0, 0.0), (1.0, 0.72)]), arc(0.5, 0.72, 0.5, 0.28, 0.0, 160.0)]),
        ]),
        'K' => (0.62, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            pts(&[(1.0, 0.0), (0.02, 0.55)]),
            pts(&[(0.32, 0.38), (1.0, 1.0)]),
        ]),
        'L' => (0.52, vec![pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)])]),
        'M' => (0.82, vec![pts(&[(0.0, 1.0), (0.0, 0.0), (0.5, 0.62), (1.0, 0.0), (1.0, 1.0)])]),
        'N' => (0.64, vec![pts(&[(0.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0)])]),
        'O' => (0.68, vec![arc(0.5, 0.5, 0.5, 0.5, 0.0, 360.0)]),
        'P' => (0.58, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            join(vec![pts(&[(0.0, 0.0), (0.5, 0.0)]), arc(0.5, 0.27, 0.5, 0.27, -90.0, 90.0), pts(&[(0.0, 0.54)])]),
        ]),
        'Q' => (0.68, vec![
            arc(0.5, 0.5, 0.5, 0.5, 0.0, 360.0),
            pts(&[(0.60, 0.62), (1.0, 1.0)]),
        ]),
        'R' => (0.60, vec![
            pts(&[(0.0, 0.0), (0.0, 1.0)]),
            join(vec![pts(&[(0.0, 0.0), (0.5, 0.0)]), arc(0.5, 0.27, 0.5, 0.27, -90.0, 90.0), pts(&[(0.0, 0.54)])]),
            pts(&[(0.32, 0.54), (1.0, 1.0)]),
        ]),
        'S' => (0.60, vec![
            arc(0.5, 0.27, 0.46, 0.27, -210.0, -30.0),
            pts(&[(0.102, 0.405), (0.898, 0.595)]),
            arc(0.5, 0.73, 0.46, 0.27, 150.0, -30.0),
        ]),
        'T' => (0.60, vec![
            pts(&[(0.0, 0.0), (1.0, 0.0)]),
            pts(&[(0.5, 0.0), (0.5, 1.0)]),
        ]),
        'U' => (0.62, vec![
            join(vec![pts(&[(0.0, 0.0), (0.0, 0.70)]), arc(0.5, 0.70, 0.5, 0.30, 180.0, 0.0), pts(&[(1.0, 0.0)])]),
        ]),
        'V' => (0.66, vec![pts(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)])]),
        'W' => (0.92, vec![pts(&[(0.0, 0.0), (0.25, 1.0), (0.5, 0.30), (0.75, 1.0), (1.0, 0.0)])]),
        'X' => (0.62, vec![
            pts(&[(0.0, 0.0), (1.0, 1.0)]),
            pts(&[(1.0, 0.0), (0.0, 1.0)]),
        ]),
        'Y' => (0.62, vec![
            pts(&[(0.0, 0.0), (0.5, 0.48)]),
            pts(&[(1.0, 0.0), (0.5, 0.48)]),
            pts(&[(0.5, 0.48), (0.5, 1.0)]),
        ]),
        'Z' => (0.58, vec![pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])]),
        '0' => (0.58, vec![
            arc(0.5, 0.5, 0.5, 0.5, 0.0, 360.0),
            pts(&[(0.72, 0.25), (0.28, 0.75)]),
        ]),
        '1' => (0.46, vec![
            pts(&[(0.10, 0.22), (0.52, 0.0), (0.52, 1.0)]),
            pts(&[(0.06, 1.0), (0.95, 1.0)]),
        ]),
        '2' => (0.58, vec![
            join(vec![arc(0.5, 0.26, 0.48, 0.26, -165.0, 15.0), pts(&[(0.0, 1.0), (1.0, 1.0)])]),
        ]),
        '3' => (0.58, vec![
            join(vec![arc(0.45, 0.26, 0.5, 0.26, -140.0, 80.0), arc(0.45, 0.74, 0.5, 0.26, -80.0, 140.0)]),
        ]),
        '4' => (0.64, vec![
            pts(&[(0.68, 0.0), (0.0, 0.66), (1.0, 0.66)]),
            pts(&[(0.68, 0.0), (0.68, 1.0)]),
        ]),
        '5' => (0.58, vec![
            join(vec![pts(&[(0.92, 0.0), (0.10, 0.0), (0.10, 0.42), (0.34, 0.36)]), arc(0.47, 0.66, 0.48, 0.31, -105.0, 125.0)]),
        ]),
        '6' => (0.62, vec![
            arc(0.52, 0.5, 0.48, 0.5, -260.0, -80.0),
            arc(0.52, 0.72, 0.44, 0.27, 0.0, 360.0),
        ]),
        '7' => (0.58, vec![pts(&[(0.0, 0.0), (1.0, 0.0), (0.38, 1.0)])]),
        '8' => (0.62, vec![
            arc(0.5, 0.26, 0.42, 0.26, 0.0, 360.0),
            arc(0.5, 0.74, 0.48, 0.26, 0.0, 360.0),
        ]),
        '9' => (0.62, vec![
            arc(0.48, 0.28, 0.44, 0.27, 0.0, 360.0),
            arc(0.48, 0.5, 0.48, 0.48, -25.0, 100.0),
        ]),
        _ => panic!("no outline for {c:?}"),
    };
    Outline { width, polylines }
}

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (px, py) = p;
    let (ax, ay) = a;
    let (bx, by) = b;
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

/// Rasterize one glyph into its cell: intensity is linear edge coverage of
/// a round pen dragged along the centerline polylines.
pub(crate) fn rasterize_cell(c: char) -> Image {
    let outline = outline(c);
    let t2 = THICKNESS * CELL_HEIGHT as f64 / 2.0;
    let ink_w = outline.width * CELL_HEIGHT as f64;
    let span_x = ink_w - 1.0 - 2.0 * t2;
    let span_y = CELL_HEIGHT as f64 - 1.0 - 2.0 * t2;
    let polys: Vec<Vec<(f64, f64)>> = outline
        .polylines
        .iter()
        .map(|pl| {
            pl.iter()
                .map(|&(u, v)| (t2 + u * span_x, t2 + v * span_y))
                .collect()
        })
        .collect();

    let mut cell = Image::zeros(CELL_WIDTH, CELL_HEIGHT);
    for y in 0..CELL_HEIGHT {
        for x in 0..CELL_WIDTH {
            let p = (x as f64, y as f64);
            let mut d = f64::INFINITY;
            for pl in &polys {
                for seg in pl.windows(2) {
                    d = d.min(dist_to_segment(p, seg[0], seg[1]));
                }
            }
            cell.set(x, y, (t2 + 0.5 - d).clamp(0.0, 1.0));
        }
    }
    cell
}

/// Full atlas strip: 36 equal cells in `ORDER`, left to right.
pub(crate) fn rasterize_atlas() -> Image {
    let mut strip = Image::zeros(CELL_WIDTH * ORDER.chars().count(), CELL_HEIGHT);
    for (i, c) in ORDER.chars().enumerate() {
        strip.paste(&rasterize_cell(c), i * CELL_WIDTH, 0);
    }
    strip
}
