//! Evaluation protocols: IoU-matched detection precision/recall/F-score,
//! Levenshtein edit distance, Crwr (rate of correctly recognized words),
//! and per-(text size, word length) breakdowns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Axis-aligned box: inclusive top-left `(x0, y0)`, exclusive bottom-right
/// `(x1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl BBox {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> BBox {
        debug_assert!(x0 < x1 && y0 < y1, "degenerate box");
        BBox { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn dilated(&self, margin: i64) -> BBox {
        BBox {
            x0: self.x0 - margin,
            y0: self.y0 - margin,
            x1: self.x1 + margin,
            y1: self.y1 + margin,
        }
    }

    pub fn intersection_area(&self, other: &BBox) -> i64 {
        let w = (self.x1.min(other.x1) - self.x0.max(other.x0)).max(0);
        let h = (self.y1.min(other.y1) - self.y0.max(other.y0)).max(0);
        w * h
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.intersection_area(other) > 0
    }
}

/// Intersection over union of two boxes.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Outcome of greedy one-to-one box matching.
#[derive(Debug, Clone)]
pub struct DetectionMatch {
    /// `(pred_idx, gt_idx)` pairs with IoU at or above the threshold.
    pub matches: Vec<(usize, usize)>,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

/// Greedy one-to-one matching in descending IoU order, keeping only pairs
/// with IoU >= `iou_min`. Precision is 1 on an empty prediction set and
/// recall is 1 on empty ground truth, so blank images stay well-defined.
pub fn match_detections(preds: &[BBox], gts: &[BBox], iou_min: f64) -> DetectionMatch {
    let mut scored: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in preds.iter().enumerate() {
        for (gi, g) in gts.iter().enumerate() {
            let v = iou(p, g);
            if v >= iou_min {
                scored.push((v, pi, gi));
            }
        }
    }
    // Descending IoU; index order breaks ties so the result is independent
    // of input permutation only up to equal-IoU groups, which greedy
    // one-to-one matching resolves identically by count.
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut pred_used = vec![false; preds.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut matches = Vec::new();
    for (_, pi, gi) in scored {
        if !pred_used[pi] && !gt_used[gi] {
            pred_used[pi] = true;
            gt_used[gi] = true;
            matches.push((pi, gi));
        }
    }
    let (precision, recall, f_score) = prf(matches.len(), preds.len(), gts.len());
    DetectionMatch {
        matches,
        precision,
        recall,
        f_score,
    }
}

pub(crate) fn prf(matched: usize, preds: usize, gts: usize) -> (f64, f64, f64) {
    let precision = if preds == 0 {
        1.0
    } else {
        matched as f64 / preds as f64
    };
    let recall = if gts == 0 {
        1.0
    } else {
        matched as f64 / gts as f64
    };
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f_score)
}

/// Unit-cost edit distance (insert, delete, substitute) via the two-row DP.
pub fn levenshtein(s: &str, t: &str) -> usize {
    let s: Vec<char> = s.chars().collect();
    let t: Vec<char> = t.chars().collect();
    if s.is_empty() {
        return t.len();
    }
    if t.is_empty() {
        return s.len();
    }
    let mut prev: Vec<usize> = (0..=t.len()).collect();
    let mut cur = vec![0usize; t.len() + 1];
    for (i, &sc) in s.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &tc) in t.iter().enumerate() {
            let sub = prev[j] + usize::from(sc != tc);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[t.len()]
}

/// One (text size, word length) cell of the breakdown table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownCell {
    pub text_size: u32,
    pub word_length: usize,
    pub word_count: usize,
    pub correct: usize,
    pub crwr: f64,
    pub edit_distance: usize,
}

impl BreakdownCell {
    /// Render as `edits/words`, the notation used for edit-distance tables.
    pub fn edit_distance_cell(&self) -> String {
        format!("{}/{}", self.edit_distance, self.word_count)
    }
}

/// Aggregate detection and recognition report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub total_words: usize,
    pub correct_words: usize,
    pub crwr: f64,
    pub total_edit_distance: usize,
    pub average_edit_distance: f64,
    /// Sorted by (text_size, word_length).
    pub breakdowns: Vec<BreakdownCell>,
}

impl EvalReport {
    /// CSV with one row per breakdown cell.
    pub fn breakdown_csv(&self) -> String {
        let mut out =
            String::from("size,word_length,words,correct,crwr,edit_distance,avg_edit_distance\n");
        for c in &self.breakdowns {
            let avg = if c.word_count > 0 {
                c.edit_distance as f64 / c.word_count as f64
            } else {
                0.0
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.text_size, c.word_length, c.word_count, c.correct, c.crwr, c.edit_distance, avg
            ));
        }
        out
    }
}

/// Assemble a report from raw detection counts and per-word recognition
/// pairs. `size_tags` parallels `pairs` when present; untagged words land
/// in the size-0 rows of the breakdown.
pub(crate) fn assemble_report(
    matched: usize,
    preds: usize,
    gts: usize,
    pairs: &[(String, String)],
    size_tags: Option<&[u32]>,
) -> EvalReport {
    let (precision, recall, f_score) = prf(matched, preds, gts);
    let mut cells: BTreeMap<(u32, usize), (usize, usize, usize)> = BTreeMap::new();
    let mut correct_words = 0;
    let mut total_edit = 0;
    for (i, (pred, truth)) in pairs.iter().enumerate() {
        let size = size_tags.map(|t| t[i]).unwrap_or(0);
        let pred_up = pred.to_uppercase();
        let truth_up = truth.to_uppercase();
        let ok = pred_up == truth_up;
        let edits = levenshtein(&pred_up, &truth_up);
        correct_words += usize::from(ok);
        total_edit += edits;
        let cell = cells
            .entry((size, truth.chars().count()))
            .or_insert((0, 0, 0));
        cell.0 += 1;
        cell.1 += usize::from(ok);
        cell.2 += edits;
    }
    let total_words = pairs.len();
    let breakdowns = cells
        .into_iter()
        .map(
            |((text_size, word_length), (word_count, correct, edit_distance))| BreakdownCell {
                text_size,
                word_length,
                word_count,
                correct,
                crwr: correct as f64 / word_count as f64,
                edit_distance,
            },
        )
        .collect();
    EvalReport {
        precision,
        recall,
        f_score,
        total_words,
        correct_words,
        crwr: if total_words > 0 {
            correct_words as f64 / total_words as f64
        } else {
            0.0
        },
        total_edit_distance: total_edit,
        average_edit_distance: if total_words > 0 {
            total_edit as f64 / total_words as f64
        } else {
            0.0
        },
        breakdowns,
    }
}

/// Score recognition output against ground truth. A word is correct iff it
/// matches case-insensitively; edit distances accumulate per cell.
pub fn score_recognition(
    pairs: &[(String, String)],
    size_tags: Option<&[u32]>,
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no recognition pairs to score".into()));
    }
    if let Some(tags) = size_tags {
        if tags.len() != pairs.len() {
            return Err(Error::InvalidArgument(
                "size_tags length must match pairs".into(),
            ));
        }
    }
    // No detection stage here: the vacuous-match convention (as with empty
    // prediction sets) reports P = R = F = 1.
    Ok(assemble_report(0, 0, 0, pairs, size_tags))
}

/// One image's worth of ground truth or predictions for dataset scoring.
#[derive(Debug, Clone)]
pub struct ImageWords {
    pub name: String,
    pub boxes: Vec<BBox>,
    /// Parallel to `boxes`; may be empty strings on the prediction side
    /// when only detection ran.
    pub texts: Vec<String>,
}

/// Evaluate a whole dataset: detection metrics micro-averaged over all
/// boxes, recognition scored on matched box pairs, and every unmatched
/// ground-truth word charged as a whole-word deletion.
pub fn evaluate_dataset(
    gts: &[ImageWords],
    preds: &[ImageWords],
    iou_min: f64,
    size_tag: Option<u32>,
) -> Result<EvalReport> {
    let mut pred_by_name: BTreeMap<&str, &ImageWords> = BTreeMap::new();
    for p in preds {
        pred_by_name.insert(p.name.as_str(), p);
    }
    if let Some(extra) = preds.iter().find(|p| !gts.iter().any(|g| g.name == p.name)) {
        return Err(Error::NameMismatch(extra.name.clone()));
    }

    let mut matched = 0;
    let mut total_preds = 0;
    let mut total_gts = 0;
    let mut pairs: Vec<(String, String)> = Vec::new();
    for gt in gts {
        let pred = pred_by_name
            .get(gt.name.as_str())
            .copied()
            .ok_or_else(|| Error::NameMismatch(gt.name.clone()))?;
        let dm = match_detections(&pred.boxes, &gt.boxes, iou_min);
        matched += dm.matches.len();
        total_preds += pred.boxes.len();
        total_gts += gt.boxes.len();
        let mut gt_matched = vec![false; gt.boxes.len()];
        for &(pi, gi) in &dm.matches {
            gt_matched[gi] = true;
            let text = pred.texts.get(pi).cloned().unwrap_or_default();
            pairs.push((text, gt.texts[gi].clone()));
        }
        for (gi, hit) in gt_matched.iter().enumerate() {
            if !hit {
                // Missed word: scored as a full deletion of the truth.
                pairs.push((String::new(), gt.texts[gi].clone()));
            }
        }
    }
    let tags: Option<Vec<u32>> = size_tag.map(|s| vec![s; pairs.len()]);
    Ok(assemble_report(
        matched,
        total_preds,
        total_gts,
        &pairs,
        tags.as_deref(),
    ))
}
