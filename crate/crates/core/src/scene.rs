//! Synthetic text scene generation with exact word-level ground truth:
//! white words on a black canvas, random count, length, characters, and
//! placement, all deterministic in the seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::BBox;
use crate::glyphs::{self, GlyphSet, ALPHABET};
use crate::img;
use crate::textdet;
use crate::{Error, Image, Result};

/// One ground-truth word: tight ink bounding box plus transcription.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub bbox: BBox,
    pub text: String,
}

/// Parameters for one synthesized scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub canvas_width: usize,
    pub canvas_height: usize,
    pub char_height: usize,
    pub words_min: usize,
    pub words_max: usize,
    pub len_min: usize,
    pub len_max: usize,
    pub margin: usize,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> SceneSpec {
        SceneSpec {
            canvas_width: 324,
            canvas_height: 243,
            char_height: 40,
            words_min: 1,
            words_max: 4,
            len_min: 1,
            len_max: 10,
            margin: 4,
            seed: 0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.canvas_width == 0 || self.canvas_height == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.words_min > self.words_max || self.words_min == 0 {
            return Err(Error::InvalidArgument(
                "words_min must be in 1..=words_max".into(),
            ));
        }
        if self.len_min > self.len_max || self.len_min == 0 {
            return Err(Error::InvalidArgument(
                "len_min must be in 1..=len_max".into(),
            ));
        }
        if self.char_height == 0
            || self.char_height + 2 * self.margin > self.canvas_height
        {
            return Err(Error::InvalidArgument(
                "char_height must satisfy char_height <= canvas_height - 2*margin".into(),
            ));
        }
        Ok(())
    }
}

const PLACEMENT_ATTEMPTS: usize = 1000;

/// Tight bounding box of nonzero pixels, or `None` for a blank image.
fn ink_bbox(img: &Image) -> Option<BBox> {
    let (mut x0, mut y0) = (usize::MAX, usize::MAX);
    let (mut x1, mut y1) = (0usize, 0usize);
    let mut any = false;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.get(x, y) > 0.0 {
                any = true;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    any.then(|| BBox::new(x0 as i64, y0 as i64, (x1 + 1) as i64, (y1 + 1) as i64))
}

/// Word-separability rule used during placement: a candidate is rejected
/// not only when margin-dilated boxes overlap but also when it would sit in
/// another word's horizontal band closer than the detector's merge
/// threshold (gap <= 0.6 * max height at >= 0.5 vertical overlap), which
/// would fuse two ground-truth words into one detected box.
fn placement_conflict(candidate: &BBox, placed: &[BBox], margin: i64) -> bool {
    let cand_dilated = candidate.dilated(margin);
    for other in placed {
        if cand_dilated.intersects(&other.dilated(margin)) {
            return true;
        }
        if textdet::vertical_overlap_ratio(candidate, other) >= 0.5 {
            let max_h = candidate.height().max(other.height()) as f64;
            let min_gap = (0.6 * max_h).ceil() as i64 + 2;
            if textdet::horizontal_gap(candidate, other) < min_gap {
                return true;
            }
        }
    }
    false
}

/// Synthesize one scene. Words that cannot be placed within the attempt
/// budget are dropped, never clipped; the remaining annotations are exact
/// ink bounding boxes. Deterministic in `spec.seed`.
pub fn synthesize_scene(glyphs: &GlyphSet, spec: &SceneSpec) -> Result<(Image, Vec<Annotation>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut canvas = Image::zeros(spec.canvas_width, spec.canvas_height);
    let mut annotations: Vec<Annotation> = Vec::new();
    let mut placed_boxes: Vec<BBox> = Vec::new();

    let word_count = rng.random_range(spec.words_min..=spec.words_max);
    for _ in 0..word_count {
        let len = rng.random_range(spec.len_min..=spec.len_max);
        let text: String = (0..len)
            .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())])
            .collect();
        let word_img = glyphs::render_word(glyphs, &text, spec.char_height)?;
        let Some(rel_box) = ink_bbox(&word_img) else {
            continue;
        };

        let margin = spec.margin as i64;
        // The dilated box must stay inside the canvas.
        let x_lo = spec.margin as i64 - rel_box.x0;
        let x_hi = spec.canvas_width as i64 - spec.margin as i64 - rel_box.x1;
        let y_lo = spec.margin as i64 - rel_box.y0;
        let y_hi = spec.canvas_height as i64 - spec.margin as i64 - rel_box.y1;
        if x_hi < x_lo || y_hi < y_lo {
            continue; // word cannot fit at all
        }

        for _ in 0..PLACEMENT_ATTEMPTS {
            let ox = rng.random_range(x_lo..=x_hi);
            let oy = rng.random_range(y_lo..=y_hi);
            let candidate = BBox::new(
                rel_box.x0 + ox,
                rel_box.y0 + oy,
                rel_box.x1 + ox,
                rel_box.y1 + oy,
            );
            if placement_conflict(&candidate, &placed_boxes, margin) {
                continue;
            }
            canvas.paste(&word_img, ox as usize, oy as usize);
            placed_boxes.push(candidate);
            annotations.push(Annotation {
                bbox: candidate,
                text,
            });
            break;
        }
    }
    Ok((canvas, annotations))
}

/// Compose a scene from pre-cropped word images (with transcriptions),
/// consuming the crops in seeded random order without repetition. Crops
/// taller than 50 px are first brought to height 50; every crop that fits
/// under the rejection-sampled placement is pasted whole.
pub fn compose_from_crops(
    crops: &[(Image, String)],
    canvas_width: usize,
    canvas_height: usize,
    margin: usize,
    seed: u64,
) -> Result<(Image, Vec<Annotation>)> {
    if crops.is_empty() {
        return Err(Error::EmptyCropList);
    }
    if canvas_width == 0 || canvas_height == 0 {
        return Err(Error::ZeroDimension);
    }
    let limit = canvas_height.saturating_sub(2 * margin);
    for (crop, _) in crops {
        if crop.height() > limit.max(crop.height().min(limit)) && crop.height() > limit {
            return Err(Error::CropTooTall {
                height: crop.height(),
                limit,
            });
        }
    }
    for (_, text) in crops {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        if let Some(bad) = text
            .to_uppercase()
            .chars()
            .find(|&c| glyphs::alphabet_index(c).is_none())
        {
            return Err(Error::UnknownCharacter(bad));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..crops.len()).collect();
    order.shuffle(&mut rng);

    let mut canvas = Image::zeros(canvas_width, canvas_height);
    let mut annotations: Vec<Annotation> = Vec::new();
    let mut placed_boxes: Vec<BBox> = Vec::new();
    for idx in order {
        let (crop, text) = &crops[idx];
        let sized = if crop.height() > 50 {
            let w = ((crop.width() as f64 * 50.0 / crop.height() as f64).round() as usize).max(1);
            img::resize_bilinear(crop, w, 50)?
        } else {
            crop.clone()
        };
        if sized.width() + 2 * margin > canvas_width {
            continue;
        }
        let x_hi = canvas_width - margin - sized.width();
        let y_hi = canvas_height - margin - sized.height();
        for _ in 0..PLACEMENT_ATTEMPTS {
            let ox = rng.random_range(margin..=x_hi) as i64;
            let oy = rng.random_range(margin..=y_hi) as i64;
            let candidate = BBox::new(
                ox,
                oy,
                ox + sized.width() as i64,
                oy + sized.height() as i64,
            );
            if placement_conflict(&candidate, &placed_boxes, margin as i64) {
                continue;
            }
            canvas.paste(&sized, ox as usize, oy as usize);
            placed_boxes.push(candidate);
            annotations.push(Annotation {
                bbox: candidate,
                text: text.to_uppercase(),
            });
            break;
        }
    }
    Ok((canvas, annotations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin() -> GlyphSet {
        GlyphSet::builtin()
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let glyphs = builtin();
        let spec = SceneSpec {
            seed: 1234,
            ..SceneSpec::default()
        };
        let (img_a, ann_a) = synthesize_scene(&glyphs, &spec).unwrap();
        let (img_b, ann_b) = synthesize_scene(&glyphs, &spec).unwrap();
        assert_eq!(img_a.as_slice(), img_b.as_slice());
        assert_eq!(ann_a, ann_b);
    }

    #[test]
    fn forced_parameters_give_one_single_char_word() {
        let glyphs = builtin();
        let spec = SceneSpec {
            words_min: 1,
            words_max: 1,
            len_min: 1,
            len_max: 1,
            seed: 7,
            ..SceneSpec::default()
        };
        let (_, anns) = synthesize_scene(&glyphs, &spec).unwrap();
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].text.chars().count(), 1);
    }

    #[test]
    fn all_ink_lies_inside_annotation_boxes() {
        let glyphs = builtin();
        for seed in 0..10u64 {
            let spec = SceneSpec {
                seed,
                ..SceneSpec::default()
            };
            let (img, anns) = synthesize_scene(&glyphs, &spec).unwrap();
            for y in 0..img.height() {
                for x in 0..img.width() {
                    if img.get(x, y) > 0.0 {
                        let inside = anns.iter().any(|a| {
                            (x as i64) >= a.bbox.x0
                                && (x as i64) < a.bbox.x1
                                && (y as i64) >= a.bbox.y0
                                && (y as i64) < a.bbox.y1
                        });
                        assert!(inside, "stray ink at ({x},{y}) seed {seed}");
                    }
                }
            }
        }
    }

    #[test]
    fn annotations_are_tight_and_disjoint() {
        let glyphs = builtin();
        for seed in 20..30u64 {
            let spec = SceneSpec {
                seed,
                char_height: 20,
                ..SceneSpec::default()
            };
            let (img, anns) = synthesize_scene(&glyphs, &spec).unwrap();
            for a in &anns {
                // Tightness: each edge of the bbox carries ink.
                let (x0, y0, x1, y1) =
                    (a.bbox.x0 as usize, a.bbox.y0 as usize, a.bbox.x1 as usize, a.bbox.y1 as usize);
                assert!((x0..x1).any(|x| img.get(x, y0) > 0.0));
                assert!((x0..x1).any(|x| img.get(x, y1 - 1) > 0.0));
                assert!((y0..y1).any(|y| img.get(x0, y) > 0.0));
                assert!((y0..y1).any(|y| img.get(x1 - 1, y) > 0.0));
            }
            for i in 0..anns.len() {
                for j in i + 1..anns.len() {
                    assert_eq!(anns[i].bbox.intersection_area(&anns[j].bbox), 0);
                }
            }
        }
    }

    #[test]
    fn character_frequency_is_uniform() {
        // >= 1e5 characters, each symbol within 5 sigma of 1/36.
        let glyphs = builtin();
        let mut counts = [0usize; 36];
        let mut total = 0usize;
        let mut scene_idx = 0u64;
        while total < 100_000 {
            let spec = SceneSpec {
                canvas_width: 150,
                canvas_height: 24,
                char_height: 10,
                words_min: 1,
                words_max: 1,
                len_min: 10,
                len_max: 10,
                margin: 2,
                seed: crate::seed::derive_seed(99, scene_idx),
            };
            scene_idx += 1;
            let (_, anns) = synthesize_scene(&glyphs, &spec).unwrap();
            for a in &anns {
                for c in a.text.chars() {
                    counts[crate::glyphs::alphabet_index(c).unwrap()] += 1;
                    total += 1;
                }
            }
        }
        let n = total as f64;
        let p = 1.0 / 36.0;
        let sigma = (n * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - n * p).abs();
            assert!(
                dev <= 5.0 * sigma,
                "symbol {} count {} deviates {:.1} sigma",
                ALPHABET[i],
                c,
                dev / sigma
            );
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let spec = SceneSpec {
            words_min: 3,
            words_max: 2,
            ..SceneSpec::default()
        };
        assert!(spec.validate().is_err());
        let spec = SceneSpec {
            char_height: 240,
            ..SceneSpec::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn compose_single_crop_box_matches_dimensions() {
        let crop = Image::constant(30, 20, 0.8);
        let (_, anns) =
            compose_from_crops(&[(crop, "WORD".into())], 324, 243, 4, 5).unwrap();
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].bbox.width(), 30);
        assert_eq!(anns[0].bbox.height(), 20);
    }

    #[test]
    fn compose_resizes_tall_crops_to_height_50() {
        let crop = Image::constant(80, 100, 0.8);
        let (_, anns) =
            compose_from_crops(&[(crop, "TALL".into())], 324, 243, 4, 5).unwrap();
        assert_eq!(anns[0].bbox.height(), 50);
        assert_eq!(anns[0].bbox.width(), 40);
    }

    #[test]
    fn compose_rejects_crop_taller_than_canvas() {
        let crop = Image::constant(10, 300, 0.8);
        assert!(matches!(
            compose_from_crops(&[(crop, "X".into())], 324, 243, 4, 5),
            Err(Error::CropTooTall { .. })
        ));
    }

    #[test]
    fn compose_rejects_empty_list() {
        assert!(matches!(
            compose_from_crops(&[], 324, 243, 4, 5),
            Err(Error::EmptyCropList)
        ));
    }

    #[test]
    fn compose_places_some_of_many_crops_without_overlap() {
        let crops: Vec<(Image, String)> = (0..20)
            .map(|i| (Image::constant(100, 50, 0.9), format!("W{i}")))
            .collect();
        let (_, anns) = compose_from_crops(&crops, 324, 243, 4, 11).unwrap();
        assert!(!anns.is_empty());
        for i in 0..anns.len() {
            for j in i + 1..anns.len() {
                assert_eq!(anns[i].bbox.intersection_area(&anns[j].bbox), 0);
            }
        }
    }
}
