//! Distance-matrix images.
//!
//! Audio runs along the horizontal axis and text along the vertical axis, with
//! text frame 0 in the top row. The image is therefore `m` rows by `n`
//! columns, the transpose of the `n x m` distance matrix. Gray levels are
//! min-max normalized, darker meaning nearer.

use std::fmt::Write as _;

use bestalign::{Alignment, Grid};

/// Gray level for a distance matrix whose entries are all equal.
pub const FLAT_GRAY: u8 = 128;
pub const PATH_COLOR: &str = "#ffd700";

/// Gray levels laid out as image rows (one per text frame).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    /// The matrix had no range to normalize; every pixel is [`FLAT_GRAY`].
    pub flat: bool,
}

impl GrayImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// `distances` is indexed `[audio][text]`.
pub fn normalize(distances: &Grid) -> GrayImage {
    let (n, m) = (distances.rows(), distances.cols());
    let (lo, hi) = distances.min_max();
    let flat = hi <= lo;
    let mut pixels = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            let v = if flat {
                FLAT_GRAY
            } else {
                (255.0 * (distances.get(i, j) - lo) / (hi - lo)).round() as u8
            };
            pixels.push(v);
        }
    }
    GrayImage {
        width: n,
        height: m,
        pixels,
        flat,
    }
}

/// Plain (ASCII) PGM, lines kept under 70 characters.
pub fn to_pgm(img: &GrayImage) -> String {
    let mut out = format!("P2\n{} {}\n255\n", img.width, img.height);
    for row in img.pixels.chunks(img.width) {
        let mut line = String::new();
        for v in row {
            let token = v.to_string();
            if !line.is_empty() && line.len() + 1 + token.len() > 70 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&token);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// SVG 1.1 grid of gray cells, with the alignment path drawn over it. Path
/// cells carry `class="path"` and `id="path-{audio}-{text}"`.
pub fn to_svg(img: &GrayImage, path: &Alignment, cell: usize) -> String {
    let (w, h) = (img.width * cell, img.height * cell);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<g id="distances" shape-rendering="crispEdges">"#).unwrap();
    for y in 0..img.height {
        for x in 0..img.width {
            let g = img.get(x, y);
            writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="rgb({g},{g},{g})"/>"#,
                x * cell,
                y * cell
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g id="alignment" shape-rendering="crispEdges">"#).unwrap();
    for (i, &j) in path.indices().iter().enumerate() {
        writeln!(
            out,
            r#"<rect id="path-{i}-{j}" class="path" x="{}" y="{}" width="{cell}" height="{cell}" fill="{PATH_COLOR}" fill-opacity="0.85"/>"#,
            i * cell,
            j * cell
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
