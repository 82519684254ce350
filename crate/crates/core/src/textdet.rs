//! Classical horizontal word detection: global threshold, 8-connected
//! components, then gap-based grouping of components into word boxes.

use serde::{Deserialize, Serialize};

use crate::eval::BBox;
use crate::Image;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    Otsu,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectParams {
    pub threshold_mode: ThresholdMode,
    /// Components smaller than this many foreground pixels are ignored.
    pub min_component_area: usize,
    /// Two components merge when their horizontal gap is at most this factor
    /// times the taller component's height.
    pub merge_gap_factor: f64,
    /// Minimum vertical overlap ratio (relative to the shorter component)
    /// for two components to belong to one word.
    pub vertical_overlap_min: f64,
    pub min_box_height: usize,
}

impl Default for DetectParams {
    fn default() -> DetectParams {
        DetectParams {
            threshold_mode: ThresholdMode::Otsu,
            min_component_area: 4,
            merge_gap_factor: 0.6,
            vertical_overlap_min: 0.5,
            min_box_height: 5,
        }
    }
}

/// Binary foreground mask, same dimensions as the source image.
#[derive(Debug, Clone)]
pub struct BitMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BitMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Otsu's threshold over a 256-bin histogram of `[0, 1]` intensities.
/// Returns `None` when every pixel falls into a single bin (no contrast).
pub fn otsu_threshold(img: &Image) -> Option<f64> {
    let mut hist = [0usize; 256];
    for &v in img.as_slice() {
        let bin = ((v.clamp(0.0, 1.0)) * 255.0).floor() as usize;
        hist[bin.min(255)] += 1;
    }
    if hist.iter().filter(|&&n| n > 0).count() < 2 {
        return None;
    }
    let total = img.as_slice().len() as f64;
    let total_mean: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &n)| i as f64 * n as f64)
        .sum::<f64>()
        / total;

    let mut best_t = 0;
    let mut best_var = -1.0;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for t in 0..255 {
        w0 += hist[t] as f64 / total;
        sum0 += t as f64 * hist[t] as f64 / total;
        if w0 <= 0.0 || w0 >= 1.0 {
            continue;
        }
        let w1 = 1.0 - w0;
        let mu0 = sum0 / w0;
        let mu1 = (total_mean - sum0) / w1;
        let var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    // Foreground is everything strictly above the upper edge of bin `best_t`.
    Some((best_t + 1) as f64 / 255.0)
}

/// Threshold the image; foreground = value strictly greater than the level.
pub fn binarize(img: &Image, mode: ThresholdMode) -> BitMask {
    let level = match mode {
        ThresholdMode::Fixed(level) => Some(level),
        ThresholdMode::Otsu => otsu_threshold(img),
    };
    let data = match level {
        Some(level) => img.as_slice().iter().map(|&v| v > level).collect(),
        // No contrast: empty mask.
        None => vec![false; img.as_slice().len()],
    };
    BitMask {
        width: img.width(),
        height: img.height(),
        data,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub bbox: BBox,
    pub area: usize,
}

/// 8-connected components with tight bounding boxes, in scan order of their
/// first pixel. No area filtering happens here.
pub fn connected_components(mask: &BitMask) -> Vec<Component> {
    let (w, h) = (mask.width, mask.height);
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.data[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        let (mut x0, mut y0) = (start % w, start / w);
        let (mut x1, mut y1) = (x0, y0);
        let mut area = 0usize;
        while let Some(idx) = stack.pop() {
            area += 1;
            let (x, y) = (idx % w, idx / w);
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if mask.data[nidx] && !visited[nidx] {
                        visited[nidx] = true;
                        stack.push(nidx);
                    }
                }
            }
        }
        out.push(Component {
            bbox: BBox::new(x0 as i64, y0 as i64, (x1 + 1) as i64, (y1 + 1) as i64),
            area,
        });
    }
    out
}

/// Vertical overlap of two boxes relative to the shorter one.
pub(crate) fn vertical_overlap_ratio(a: &BBox, b: &BBox) -> f64 {
    let overlap = (a.y1.min(b.y1) - a.y0.max(b.y0)).max(0) as f64;
    let min_h = (a.y1 - a.y0).min(b.y1 - b.y0) as f64;
    if min_h <= 0.0 {
        0.0
    } else {
        overlap / min_h
    }
}

/// Horizontal gap between two boxes; 0 when their x-ranges overlap.
pub(crate) fn horizontal_gap(a: &BBox, b: &BBox) -> i64 {
    (a.x0.max(b.x0) - a.x1.min(b.x1)).max(0)
}

/// Detect horizontal words: threshold, components, size filtering, then a
/// transitive closure of the merge rule (vertical overlap plus bounded
/// horizontal gap). Boxes come back sorted top-to-bottom, left-to-right.
pub fn detect_text(img: &Image, params: &DetectParams) -> Vec<BBox> {
    let mask = binarize(img, params.threshold_mode);
    let comps: Vec<Component> = connected_components(&mask)
        .into_iter()
        .filter(|c| {
            c.area >= params.min_component_area
                && (c.bbox.y1 - c.bbox.y0) as usize >= params.min_box_height
        })
        .collect();
    if comps.is_empty() {
        return Vec::new();
    }

    let mut parent: Vec<usize> = (0..comps.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let (a, b) = (&comps[i].bbox, &comps[j].bbox);
            if vertical_overlap_ratio(a, b) < params.vertical_overlap_min {
                continue;
            }
            let max_h = (a.y1 - a.y0).max(b.y1 - b.y0) as f64;
            if horizontal_gap(a, b) as f64 <= params.merge_gap_factor * max_h {
                let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }

    let mut groups: std::collections::HashMap<usize, BBox> = std::collections::HashMap::new();
    for i in 0..comps.len() {
        let root = find(&mut parent, i);
        groups
            .entry(root)
            .and_modify(|b| *b = b.union(&comps[i].bbox))
            .or_insert(comps[i].bbox);
    }
    let mut boxes: Vec<BBox> = groups.into_values().collect();
    boxes.sort_by_key(|b| (b.y0, b.x0, b.y1, b.x1));
    boxes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_yields_empty_mask() {
        let img = Image::constant(8, 8, 0.5);
        let mask = binarize(&img, ThresholdMode::Otsu);
        assert_eq!(mask.count(), 0);
    }

    #[test]
    fn otsu_splits_a_bimodal_image() {
        let mut img = Image::zeros(8, 8);
        for i in 0..64 {
            img.as_mut_slice()[i] = if i % 2 == 0 { 0.2 } else { 0.8 };
        }
        let t = otsu_threshold(&img).unwrap();
        assert!(t > 0.2 && t <= 0.8, "threshold {t}");
        let mask = binarize(&img, ThresholdMode::Otsu);
        for i in 0..64 {
            assert_eq!(mask.get(i % 8, i / 8), i % 2 != 0);
        }
    }

    #[test]
    fn otsu_matches_exhaustive_search_oracle() {
        // Independent oracle: evaluate the between-class variance of every
        // candidate threshold by direct partition loops.
        let mut img = Image::zeros(16, 4);
        for (i, v) in img.as_mut_slice().iter_mut().enumerate() {
            *v = ((i * 37) % 101) as f64 / 100.0;
        }
        let bins: Vec<usize> = img
            .as_slice()
            .iter()
            .map(|&v| ((v.clamp(0.0, 1.0)) * 255.0).floor().min(255.0) as usize)
            .collect();
        let mut best_t = 0;
        let mut best_var = -1.0;
        for t in 0..255usize {
            let lo: Vec<f64> = bins
                .iter()
                .filter(|&&b| b <= t)
                .map(|&b| b as f64)
                .collect();
            let hi: Vec<f64> = bins.iter().filter(|&&b| b > t).map(|&b| b as f64).collect();
            if lo.is_empty() || hi.is_empty() {
                continue;
            }
            let w0 = lo.len() as f64 / bins.len() as f64;
            let w1 = hi.len() as f64 / bins.len() as f64;
            let mu0 = lo.iter().sum::<f64>() / lo.len() as f64;
            let mu1 = hi.iter().sum::<f64>() / hi.len() as f64;
            let var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
            if var > best_var {
                best_var = var;
                best_t = t;
            }
        }
        let got = otsu_threshold(&img).unwrap();
        assert!((got - (best_t + 1) as f64 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_threshold_is_a_strict_comparison() {
        let img = Image::from_vec(2, 1, vec![0.4, 0.6]).unwrap();
        let mask = binarize(&img, ThresholdMode::Fixed(0.5));
        assert!(!mask.get(0, 0));
        assert!(mask.get(1, 0));
    }

    fn mask_from(rows: &[&str]) -> BitMask {
        let h = rows.len();
        let w = rows[0].len();
        let mut img = Image::zeros(w, h);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                if c == '#' {
                    img.set(x, y, 1.0);
                }
            }
        }
        binarize(&img, ThresholdMode::Fixed(0.5))
    }

    #[test]
    fn single_filled_square_is_one_component() {
        let mask = mask_from(&["#####", "#####", "#####", "#####", "#####"]);
        let comps = connected_components(&mask);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].area, 25);
        assert_eq!(comps[0].bbox, BBox::new(0, 0, 5, 5));
    }

    #[test]
    fn blobs_separated_by_two_columns_are_distinct() {
        let mask = mask_from(&["##..##", "##..##"]);
        assert_eq!(connected_components(&mask).len(), 2);
    }

    #[test]
    fn diagonal_touch_is_connected_under_8_connectivity() {
        let mask = mask_from(&["#.", ".#"]);
        assert_eq!(connected_components(&mask).len(), 1);
    }

    #[test]
    fn blank_image_detects_nothing() {
        let img = Image::zeros(64, 64);
        assert!(detect_text(&img, &DetectParams::default()).is_empty());
    }

    #[test]
    fn two_rows_yield_two_boxes() {
        let mut img = Image::zeros(60, 40);
        for x in 5..25 {
            for y in 5..15 {
                img.set(x, y, 1.0);
            }
        }
        for x in 10..40 {
            for y in 25..35 {
                img.set(x, y, 1.0);
            }
        }
        let boxes = detect_text(&img, &DetectParams::default());
        assert_eq!(boxes.len(), 2);
        assert!(boxes[0].y1 <= 15 && boxes[1].y0 >= 25);
    }

    #[test]
    fn char_gaps_merge_word_gaps_do_not() {
        // Three 10px-tall blocks: gaps of 4 (intra-word) and 12 (inter-word).
        let mut img = Image::zeros(80, 20);
        for (x0, x1) in [(2, 10), (14, 22), (34, 42)] {
            for x in x0..x1 {
                for y in 5..15 {
                    img.set(x, y, 1.0);
                }
            }
        }
        let boxes = detect_text(&img, &DetectParams::default());
        assert_eq!(boxes.len(), 2);
        assert_eq!(boxes[0], BBox::new(2, 5, 22, 15));
        assert_eq!(boxes[1], BBox::new(34, 5, 42, 15));
    }

    #[test]
    fn detected_boxes_contain_foreground_and_stay_inside() {
        let mut img = Image::zeros(30, 30);
        for x in 3..9 {
            for y in 20..28 {
                img.set(x, y, 0.9);
            }
        }
        let boxes = detect_text(&img, &DetectParams::default());
        assert_eq!(boxes.len(), 1);
        let b = boxes[0];
        assert!(b.x0 >= 0 && b.y0 >= 0 && b.x1 <= 30 && b.y1 <= 30);
        assert!(b.x0 < b.x1 && b.y0 < b.y1);
    }
}
