//! SVG pictures of forests.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::Vertex;
use crate::rng::mix64;
use crate::view::ForestView;
use crate::Scalar;

pub const HIGHLIGHT: &str = "#d62728";

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub highlight_root: Option<Vertex>,
    /// Pixels per lattice step.
    pub scale: f64,
    /// Edges above this level are clipped; `None` draws everything.
    pub max_level: Option<u32>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { highlight_root: Some(Vertex::ORIGIN), scale: 4.0, max_level: None }
    }
}

/// Stable colour for the tree at root x, kept away from pure red.
pub fn palette(root_x: i64) -> String {
    let h = mix64(root_x as u64 ^ 0x9e37_79b9);
    let hue = 40 + h % 280;
    let sat = 45 + (h >> 16) % 30;
    let light = 35 + (h >> 32) % 25;
    format!("hsl({hue},{sat}%,{light}%)")
}

/// Draws every tree edge as a line from its tail to its head in lattice
/// units times `scale`, with the y axis pointing up.
pub fn render_svg<T: Scalar, V: ForestView<T> + ?Sized>(view: &V, opts: &RenderOptions) -> Result<String> {
    if !(opts.scale > 0.0 && opts.scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale {}", opts.scale)));
    }
    let w = view.window();
    let top = opts.max_level.map_or(w.height(), |m| m.min(w.height())) as i64;
    let s = opts.scale;
    let pad = 2.0 * s;
    let width = w.period() as f64 * s + 2.0 * pad;
    let height = top as f64 * s + 2.0 * pad;
    let highlight = opts.highlight_root.map(|r| w.site_index(r));

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<g transform="translate({pad} {}) scale(1 -1)" stroke-linecap="round">"#, height - pad);
    for i in w.width() as usize..w.vertex_count() {
        let head = w.vertex_at(i);
        if head.y > top {
            break;
        }
        let Some(d) = view.parent_dir(head) else { continue };
        let Some(site) = view.owner(head) else { continue };
        let tail = w.canonicalize(head.pred(d));
        let hx = tail.x + d.dx();
        let colour = if highlight == Some(site) { HIGHLIGHT.to_string() } else { palette(w.site(site).x) };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="{}"/>"#,
            tail.x as f64 * s,
            tail.y as f64 * s,
            hx as f64 * s,
            head.y as f64 * s,
            s / 4.0
        );
    }
    for site in w.sites() {
        let idx = w.site_index(site);
        let fill = if highlight == Some(idx) { HIGHLIGHT.to_string() } else { palette(site.x) };
        let _ = writeln!(out, r#"<circle cx="{}" cy="0" r="{}" fill="{fill}"/>"#, site.x as f64 * s, s / 3.0);
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Number of `<line>` elements `render_svg` will emit.
pub fn expected_segments<T: Scalar, V: ForestView<T> + ?Sized>(view: &V, max_level: Option<u32>) -> usize {
    let w = view.window();
    let top = max_level.map_or(w.height(), |m| m.min(w.height())) as i64;
    (w.width() as usize..w.vertex_count())
        .map(|i| w.vertex_at(i))
        .filter(|v| v.y <= top && view.parent_dir(*v).is_some())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Dir, Window};
    use crate::sidla::{Engine, SidlaState};

    #[test]
    fn roots_only() {
        let state = SidlaState::<f64>::new(Window::new(6, 3).unwrap(), Engine::Rings);
        let svg = render_svg(&state, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<line").count(), 0);
        assert_eq!(svg.matches("<circle").count(), 6);
    }

    #[test]
    fn single_left_edge_is_red() {
        let mut state = SidlaState::<f64>::new(Window::new(6, 3).unwrap(), Engine::Rings);
        state.claim(Vertex::ORIGIN.edge(Dir::Left), 1.0).unwrap();
        let opts = RenderOptions { scale: 10.0, ..Default::default() };
        let svg = render_svg(&state, &opts).unwrap();
        assert!(svg.contains(&format!(r#"<line x1="0" y1="0" x2="-10" y2="10" stroke="{HIGHLIGHT}""#)));
    }

    #[test]
    fn bad_scale() {
        let state = SidlaState::<f64>::new(Window::new(6, 3).unwrap(), Engine::Rings);
        let opts = RenderOptions { scale: 0.0, ..Default::default() };
        assert!(render_svg(&state, &opts).is_err());
    }
}
