//! CSV, JSON and SVG writers. Numbers are written with `{:e}`, the shortest
//! scientific representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qwm_core::spectrum::SpectrumMap;
use serde::Serialize;

use crate::error::CliError;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A CSV document assembled in memory, header first, LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let mut first = true;
        for v in values {
            if !first {
                self.text.push(',');
            }
            first = false;
            write!(self.text, "{v:e}").expect("writing to a String cannot fail");
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.text)
    }
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("cannot serialise report: {e}")))?;
    text.push('\n');
    write_file(path, &text)
}

/// `{dir}/{stem}_p{p}.{ext}`, with negative components written as `m3`.
pub fn component_path(dir: &Path, stem: &str, p: i32, ext: &str) -> PathBuf {
    let tag = if p < 0 {
        format!("m{}", -p)
    } else {
        format!("{p}")
    };
    dir.join(format!("{stem}_p{tag}.{ext}"))
}

pub fn map_csv(map: &SpectrumMap, x_name: &str, y_name: &str) -> Csv {
    let mut csv = Csv::new(&[x_name, y_name, "value"]);
    for (x, y, v) in map.points() {
        csv.row(&[x, y, v]);
    }
    csv
}

const PALETTE_STEPS: usize = 256;

/// Colour of step `k` of a blue–white–red palette.
fn palette(k: usize) -> (u8, u8, u8) {
    let half = (PALETTE_STEPS / 2) as f64;
    let s = (k as f64 + 0.5 - half) / half;
    let fade = |c: f64, w: f64| (255.0 * (w + (c - w) * s.abs())).round() as u8;
    if s < 0.0 {
        (fade(0.13, 1.0), fade(0.40, 1.0), fade(0.70, 1.0))
    } else {
        (fade(0.70, 1.0), fade(0.09, 1.0), fade(0.17, 1.0))
    }
}

/// Palette step for `v` on a scale symmetric about zero with limit `scale`.
pub fn palette_index(v: f64, scale: f64) -> usize {
    if scale <= 0.0 {
        return PALETTE_STEPS / 2;
    }
    let u = (v / scale).clamp(-1.0, 1.0);
    (((u + 1.0) / 2.0 * PALETTE_STEPS as f64).floor() as usize).min(PALETTE_STEPS - 1)
}

/// Standalone SVG heatmap of `map` with a diverging colour scale centred at
/// zero. The x axis runs left to right and the y axis bottom to top.
pub fn heatmap_svg(map: &SpectrumMap, title: &str) -> String {
    let nx = map.x.values.len();
    let ny = map.y.values.len();
    let cell = (480.0 / nx.max(ny) as f64).max(2.0);
    let (left, top) = (60.0, 40.0);
    let width = left + nx as f64 * cell + 90.0;
    let height = top + ny as f64 * cell + 50.0;
    let scale = map.max_abs();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    for ix in 0..nx {
        for iy in 0..ny {
            let (r, g, b) = palette(palette_index(map.get(ix, iy), scale));
            let x = left + ix as f64 * cell;
            let y = top + (ny - 1 - iy) as f64 * cell;
            let _ = writeln!(
                s,
                r##"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{w:.2}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                w = cell + 0.05
            );
        }
    }
    let bottom = top + ny as f64 * cell;
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        left + nx as f64 * cell / 2.0,
        bottom + 32.0,
        escape(&map.x.name)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ny as f64 * cell / 2.0,
        top + ny as f64 * cell / 2.0,
        escape(&map.y.name)
    );
    for (v, anchor, x) in [
        (map.x.values.first(), "start", left),
        (map.x.values.last(), "end", left + nx as f64 * cell),
    ] {
        if let Some(v) = v {
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{}</text>"#,
                bottom + 14.0,
                tick(*v)
            );
        }
    }
    for (v, y) in [(map.y.values.first(), bottom), (map.y.values.last(), top + 10.0)] {
        if let Some(v) = v {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
                left - 4.0,
                tick(*v)
            );
        }
    }

    let bar_x = left + nx as f64 * cell + 20.0;
    let bar_h = ny as f64 * cell;
    let step_h = bar_h / PALETTE_STEPS as f64;
    for k in 0..PALETTE_STEPS {
        let (r, g, b) = palette(k);
        let y = top + bar_h - (k + 1) as f64 * step_h;
        let _ = writeln!(
            s,
            r##"<rect x="{bar_x:.2}" y="{y:.3}" width="14" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            step_h + 0.01
        );
    }
    for (label, y) in [(scale, top + 10.0), (0.0, top + bar_h / 2.0 + 4.0), (-scale, top + bar_h)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="10">{}</text>"#,
            bar_x + 18.0,
            tick(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn save_svg(path: &Path, svg: &str) -> Result<(), CliError> {
    write_file(path, svg)
}
