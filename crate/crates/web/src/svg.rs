//! A small layered SVG renderer for event graphs and state diagrams.
//!
//! Nodes are placed left to right by longest path from the sources; back
//! edges and self-loops are drawn but do not take part in layering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStyle {
    Box,
    Dashed,
    Dot,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub style: NodeStyle,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub label: String,
    pub back: bool,
}

const CHAR_W: f64 = 7.0;
const NODE_H: f64 = 30.0;
const GAP_X: f64 = 90.0;
const GAP_Y: f64 = 40.0;
const MARGIN: f64 = 30.0;

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

fn width(node: &Node) -> f64 {
    match node.style {
        NodeStyle::Dot => 16.0,
        _ => node.label.chars().count() as f64 * CHAR_W + 24.0,
    }
}

/// Longest-path layer of each node over the forward links.
fn layers(nodes: &[Node], links: &[Link]) -> BTreeMap<String, usize> {
    let mut layer: BTreeMap<String, usize> = nodes.iter().map(|n| (n.id.clone(), 0)).collect();
    for _ in 0..nodes.len() {
        let mut changed = false;
        for l in links.iter().filter(|l| !l.back && l.from != l.to) {
            let (Some(&from), Some(&to)) = (layer.get(&l.from), layer.get(&l.to)) else {
                continue;
            };
            if to < from + 1 {
                layer.insert(l.to.clone(), from + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    layer
}

pub fn render(nodes: &[Node], links: &[Link]) -> String {
    let layer = layers(nodes, links);
    let depth = layer.values().copied().max().map_or(0, |d| d + 1);
    let mut columns: Vec<Vec<&Node>> = vec![Vec::new(); depth];
    for node in nodes {
        columns[layer[&node.id]].push(node);
    }

    let mut pos: BTreeMap<&str, (f64, f64, f64)> = BTreeMap::new();
    let mut x = MARGIN;
    let tallest = columns.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let height = tallest * (NODE_H + GAP_Y) - GAP_Y + 2.0 * MARGIN + 20.0;
    for column in &columns {
        let col_w = column.iter().map(|n| width(n)).fold(0.0, f64::max);
        let col_h = column.len() as f64 * (NODE_H + GAP_Y) - GAP_Y;
        let mut y = (height - col_h) / 2.0;
        for node in column {
            let w = width(node);
            pos.insert(&node.id, (x + (col_w - w) / 2.0, y, w));
            y += NODE_H + GAP_Y;
        }
        x += col_w + GAP_X;
    }
    let total_w = (x - GAP_X + MARGIN).max(2.0 * MARGIN);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{height:.0}" viewBox="0 0 {total_w:.0} {height:.0}" font-family="Helvetica, sans-serif" font-size="12">"#
    );
    svg.push_str(
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>"#,
    );

    for link in links {
        let (Some(&(fx, fy, fw)), Some(&(tx, ty, tw))) = (pos.get(link.from.as_str()), pos.get(link.to.as_str())) else {
            continue;
        };
        let label = escape(&link.label);
        if link.from == link.to {
            let cx = fx + fw / 2.0;
            let _ = write!(
                svg,
                r#"<path class="edge self" d="M{:.1},{fy:.1} C{:.1},{:.1} {:.1},{:.1} {:.1},{fy:.1}" fill="none" stroke="black" marker-end="url(#arrow)"/><text x="{cx:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                cx - 8.0,
                cx - 30.0,
                fy - 30.0,
                cx + 30.0,
                fy - 30.0,
                cx + 8.0,
                fy - 26.0
            );
            continue;
        }
        let (x1, y1) = (fx + fw, fy + NODE_H / 2.0);
        let (x2, y2) = (tx, ty + NODE_H / 2.0);
        if link.back {
            let (bx1, bx2) = (fx + fw / 2.0, tx + tw / 2.0);
            let bottom = fy.max(ty) + NODE_H + GAP_Y * 0.8;
            let _ = write!(
                svg,
                r#"<path class="edge back" d="M{bx1:.1},{:.1} C{bx1:.1},{bottom:.1} {bx2:.1},{bottom:.1} {bx2:.1},{:.1}" fill="none" stroke="gray" stroke-dasharray="4 3" marker-end="url(#arrow)"/>"#,
                fy + NODE_H,
                ty + NODE_H
            );
            if !label.is_empty() {
                let _ = write!(
                    svg,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="gray">{label}</text>"#,
                    (bx1 + bx2) / 2.0,
                    bottom - 4.0
                );
            }
            continue;
        }
        let _ = write!(
            svg,
            r#"<line class="edge" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="black" marker-end="url(#arrow)"/>"#
        );
        if !label.is_empty() {
            let _ = write!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                (x1 + x2) / 2.0,
                (y1 + y2) / 2.0 - 5.0
            );
        }
    }

    for node in nodes {
        let (x, y, w) = pos[node.id.as_str()];
        let label = escape(&node.label);
        match node.style {
            NodeStyle::Dot => {
                let _ = write!(
                    svg,
                    r#"<g class="node"><circle cx="{:.1}" cy="{:.1}" r="8"/><text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text></g>"#,
                    x + 8.0,
                    y + NODE_H / 2.0,
                    x + 8.0,
                    y - 4.0
                );
            }
            NodeStyle::Box | NodeStyle::Dashed => {
                let dash = if node.style == NodeStyle::Dashed { r#" stroke-dasharray="5 3""# } else { "" };
                let _ = write!(
                    svg,
                    r#"<g class="node"><rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{NODE_H}" rx="8" fill="white" stroke="black"{dash}/><text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text></g>"#,
                    x + w / 2.0,
                    y + NODE_H / 2.0 + 4.0
                );
            }
        }
    }
    svg.push_str("</svg>");
    svg
}
