//! Glyph atlas loading and word rendering for the 36-symbol alphabet
//! (A-Z, 0-9), white ink on black.
//!
//! The atlas format is a horizontal strip of 36 equal cells plus a JSON
//! sidecar `{"cell_width": .., "cell_height": .., "order": ".."}`. A
//! default sans-serif atlas is embedded in the crate; regenerate the asset
//! files with `cargo run -p lenstext --example gen_atlas`.

pub(crate) mod strokes;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::img;
use crate::{Error, Image, Result};

/// The recognition alphabet, in canonical (tie-break) order.
pub const ALPHABET: [char; 36] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R', 'S',
    'T', 'U', 'V', 'W', 'X', 'Y', 'Z', '0', '1', '2', '3', '4', '5', '6', '7', '8', '9',
];

/// Index of `c` in [`ALPHABET`], if it is a member.
pub fn alphabet_index(c: char) -> Option<usize> {
    match c {
        'A'..='Z' => Some(c as usize - 'A' as usize),
        '0'..='9' => Some(26 + c as usize - '0' as usize),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtlasMeta {
    cell_width: usize,
    cell_height: usize,
    order: String,
}

/// Fixed raster font: one ink-cropped template per alphabet symbol, all
/// sharing one cell height.
#[derive(Debug, Clone)]
pub struct GlyphSet {
    cell_height: usize,
    /// Indexed by alphabet position; full cell height, cropped to the ink
    /// columns.
    templates: Vec<Image>,
}

impl GlyphSet {
    /// The atlas shipped with the crate (cell height 40).
    pub fn builtin() -> GlyphSet {
        let atlas = img::decode_bytes(
            Path::new("builtin:glyph_atlas.pgm"),
            include_bytes!("../../assets/glyph_atlas.pgm"),
        )
        .expect("embedded glyph atlas decodes");
        let meta: AtlasMeta = serde_json::from_slice(include_bytes!("../../assets/glyph_atlas.json"))
            .expect("embedded glyph metadata parses");
        parse_atlas(&atlas, &meta).expect("embedded glyph atlas is well formed")
    }

    pub fn cell_height(&self) -> usize {
        self.cell_height
    }

    pub fn glyph(&self, c: char) -> Result<&Image> {
        alphabet_index(c)
            .map(|i| &self.templates[i])
            .ok_or(Error::UnknownCharacter(c))
    }

    /// Ink width of `c` at the native cell height.
    pub fn ink_width(&self, c: char) -> Result<usize> {
        Ok(self.glyph(c)?.width())
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        ALPHABET.into_iter()
    }
}

/// Load an atlas strip plus its JSON metadata.
pub fn load_glyph_atlas(image_path: &Path, meta_path: &Path) -> Result<GlyphSet> {
    let atlas = img::load_image(image_path)?;
    let meta_bytes = std::fs::read(meta_path).map_err(|source| Error::Io {
        path: meta_path.to_owned(),
        source,
    })?;
    let meta: AtlasMeta =
        serde_json::from_slice(&meta_bytes).map_err(|e| Error::InvalidArgument(format!(
            "{}: {e}",
            meta_path.display()
        )))?;
    parse_atlas(&atlas, &meta)
}

fn parse_atlas(atlas: &Image, meta: &AtlasMeta) -> Result<GlyphSet> {
    let declared = meta.order.chars().count();
    if meta.cell_width == 0 || atlas.width() % meta.cell_width != 0 {
        return Err(Error::InvalidArgument(format!(
            "atlas width {} is not a multiple of cell_width {}",
            atlas.width(),
            meta.cell_width
        )));
    }
    let cells = atlas.width() / meta.cell_width;
    if cells != declared {
        return Err(Error::GlyphCountMismatch {
            expected: declared,
            got: cells,
        });
    }
    if atlas.height() != meta.cell_height {
        return Err(Error::InvalidArgument(format!(
            "atlas height {} != cell_height {}",
            atlas.height(),
            meta.cell_height
        )));
    }

    let mut templates: Vec<Option<Image>> = vec![None; ALPHABET.len()];
    for (i, c) in meta.order.chars().enumerate() {
        let slot = alphabet_index(c)
            .ok_or_else(|| Error::InvalidArgument(format!("atlas order has {c:?}, not in alphabet")))?;
        let cell = atlas.crop(i * meta.cell_width, 0, meta.cell_width, meta.cell_height);
        if cell.max_value() <= 0.5 {
            return Err(Error::EmptyGlyphCell(c));
        }
        templates[slot] = Some(crop_ink_columns(&cell));
    }
    let mut out = Vec::with_capacity(ALPHABET.len());
    for (slot, template) in templates.into_iter().enumerate() {
        match template {
            Some(t) => out.push(t),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "atlas order is missing {:?}",
                    ALPHABET[slot]
                )))
            }
        }
    }
    Ok(GlyphSet {
        cell_height: meta.cell_height,
        templates: out,
    })
}

/// Keep the full cell height but trim to the columns that carry ink.
fn crop_ink_columns(cell: &Image) -> Image {
    let mut first = None;
    let mut last = 0;
    for x in 0..cell.width() {
        let has_ink = (0..cell.height()).any(|y| cell.get(x, y) > 0.0);
        if has_ink {
            if first.is_none() {
                first = Some(x);
            }
            last = x;
        }
    }
    let first = first.unwrap_or(0);
    cell.crop(first, 0, last - first + 1, cell.height())
}

/// Render `text` as one horizontal word image of the requested character
/// height: glyphs are bilinearly scaled from the cell height preserving
/// aspect, laid left to right with spacing `round(0.15 * char_height)`.
pub fn render_word(glyphs: &GlyphSet, text: &str, char_height: usize) -> Result<Image> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    if char_height == 0 {
        return Err(Error::ZeroDimension);
    }
    let scale = char_height as f64 / glyphs.cell_height() as f64;
    let mut rendered = Vec::new();
    for c in text.chars() {
        let template = glyphs.glyph(c)?;
        let scaled = if char_height == glyphs.cell_height() {
            template.clone()
        } else {
            let w = ((template.width() as f64 * scale).round() as usize).max(1);
            img::resize_bilinear(template, w, char_height)?
        };
        rendered.push(scaled);
    }
    let spacing = (0.15 * char_height as f64).round() as usize;
    let total_w: usize =
        rendered.iter().map(|g| g.width()).sum::<usize>() + spacing * (rendered.len() - 1);
    let mut out = Image::zeros(total_w, char_height);
    let mut x = 0;
    for g in &rendered {
        out.paste(g, x, 0);
        x += g.width() + spacing;
    }
    Ok(out)
}

/// Spacing between glyphs at a given character height.
pub fn glyph_spacing(char_height: usize) -> usize {
    (0.15 * char_height as f64).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::img::BitDepth;

    #[test]
    fn builtin_atlas_has_36_glyphs_at_cell_height_40() {
        let set = GlyphSet::builtin();
        assert_eq!(set.cell_height(), 40);
        for c in ALPHABET {
            let g = set.glyph(c).unwrap();
            assert_eq!(g.height(), 40);
            assert!(g.max_value() > 0.5, "{c} has no solid ink");
        }
    }

    #[test]
    fn embedded_atlas_matches_regenerated_strokes() {
        // Guards against the checked-in asset drifting from the generator.
        let strip = strokes::rasterize_atlas();
        let bytes = crate::img::encode_pgm_bytes(&strip, BitDepth::Eight);
        assert_eq!(
            bytes,
            include_bytes!("../../assets/glyph_atlas.pgm"),
            "assets/glyph_atlas.pgm is stale; regenerate with the gen_atlas example"
        );
    }

    #[test]
    fn wrong_cell_count_is_rejected() {
        let strip = strokes::rasterize_atlas();
        let meta = AtlasMeta {
            cell_width: strokes::CELL_WIDTH,
            cell_height: strokes::CELL_HEIGHT,
            order: strokes::ORDER[..35].to_string(),
        };
        assert!(matches!(
            parse_atlas(&strip, &meta),
            Err(Error::GlyphCountMismatch {
                expected: 35,
                got: 36
            })
        ));
    }

    #[test]
    fn order_must_cover_the_alphabet() {
        let strip = strokes::rasterize_atlas();
        let mut order: Vec<char> = strokes::ORDER.chars().collect();
        order[35] = 'A'; // duplicate leaves '9' missing
        let meta = AtlasMeta {
            cell_width: strokes::CELL_WIDTH,
            cell_height: strokes::CELL_HEIGHT,
            order: order.into_iter().collect(),
        };
        assert!(parse_atlas(&strip, &meta).is_err());
    }

    #[test]
    fn render_height_40_is_the_native_atlas_scale() {
        let set = GlyphSet::builtin();
        let a = render_word(&set, "A", 40).unwrap();
        assert_eq!(a.height(), 40);
        assert_eq!(a.width(), set.ink_width('A').unwrap());
    }

    #[test]
    fn render_layout_arithmetic() {
        let set = GlyphSet::builtin();
        let ab = render_word(&set, "AB", 40).unwrap();
        let expect =
            set.ink_width('A').unwrap() + glyph_spacing(40) + set.ink_width('B').unwrap();
        assert_eq!(ab.width(), expect);
    }

    #[test]
    fn render_at_half_height_halves_widths() {
        let set = GlyphSet::builtin();
        for c in "HELLO".chars() {
            let w40 = set.ink_width(c).unwrap() as f64;
            let g20 = render_word(&set, &c.to_string(), 20).unwrap();
            assert!(
                (g20.width() as f64 - w40 / 2.0).abs() <= 1.0,
                "{c}: {} vs {}",
                g20.width(),
                w40 / 2.0
            );
        }
        let h = render_word(&set, "HELLO", 20).unwrap();
        assert_eq!(h.height(), 20);
    }

    #[test]
    fn render_rejects_bad_input() {
        let set = GlyphSet::builtin();
        assert!(matches!(render_word(&set, "", 40), Err(Error::EmptyText)));
        assert!(matches!(
            render_word(&set, "a?", 40),
            Err(Error::UnknownCharacter('a'))
        ));
    }

    #[test]
    fn every_glyph_keeps_ink_in_every_column_at_all_sizes() {
        // Character segmentation splits words at empty columns, so a glyph
        // must never binarize into column-separated pieces at any of the
        // standard sizes.
        let set = GlyphSet::builtin();
        for c in ALPHABET {
            for height in [40, 30, 20, 10] {
                let g = render_word(&set, &c.to_string(), height).unwrap();
                let mask = crate::textdet::binarize(&g, crate::textdet::ThresholdMode::Otsu);
                for x in 0..g.width() {
                    let any = (0..g.height()).any(|y| mask.get(x, y));
                    assert!(any, "{c} at height {height}: empty column {x}");
                }
            }
        }
    }
}
