//! Deterministic SVG rendering of (augmented) Newton polygons: lattice
//! grid, support dots, solid hull edges, and a dashed segment from the
//! augmentation point (0, h-1) to the nearest genuine support dot.

use crate::arith::Rat;
use crate::polygon::{AugmentedPolygon, Dot};
use num::ToPrimitive;
use std::fmt::Write;

const UNIT: f64 = 40.0;
const MARGIN: f64 = 40.0;

fn fx(m: f64) -> String {
    // fixed two-decimal formatting keeps output diffable
    format!("{m:.2}")
}

struct Frame {
    w: f64,
    h: f64,
    q_max: f64,
}

impl Frame {
    fn x(&self, m: &Rat) -> String {
        fx(MARGIN + UNIT * m.to_f64().unwrap())
    }
    fn y(&self, q: &Rat) -> String {
        fx(MARGIN + UNIT * (self.q_max - q.to_f64().unwrap()))
    }
    fn xd(&self, d: &Dot) -> String {
        self.x(&crate::arith::rati(d.m as i64))
    }
    fn yd(&self, d: &Dot) -> String {
        self.y(&d.q)
    }
}

/// Render one augmented polygon. `title` goes into a `<title>` element and
/// a caption line; output is SVG 1.1 with no timestamps.
pub fn render_polygon(p: &AugmentedPolygon, title: &str) -> String {
    let mut dots: Vec<Dot> = p.base.dots.clone();
    let added = p.added.clone();
    let m_max = dots
        .iter()
        .map(|d| d.m)
        .chain(std::iter::once(added.m))
        .max()
        .unwrap_or(1)
        .max(1);
    let q_max = dots
        .iter()
        .map(|d| d.q.clone())
        .chain(std::iter::once(added.q.clone()))
        .max()
        .unwrap_or_else(|| crate::arith::rati(1));
    let q_max_f = q_max.to_f64().unwrap().ceil().max(1.0);
    let frame = Frame {
        w: 2.0 * MARGIN + UNIT * m_max as f64,
        h: 2.0 * MARGIN + UNIT * q_max_f + 20.0,
        q_max: q_max_f,
    };
    dots.sort();

    let mut s = String::new();
    write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fx(frame.w),
        fx(frame.h),
        fx(frame.w),
        fx(frame.h)
    )
    .unwrap();
    write!(s, "<title>{}</title>\n", xml_escape(title)).unwrap();

    // lattice grid
    s.push_str("<g stroke=\"#dddddd\" stroke-width=\"1\">\n");
    for m in 0..=m_max {
        let x = frame.x(&crate::arith::rati(m as i64));
        write!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\"/>\n",
            fx(MARGIN),
            fx(MARGIN + UNIT * frame.q_max)
        )
        .unwrap();
    }
    for q in 0..=(frame.q_max as i64) {
        let y = frame.y(&crate::arith::rati(q));
        write!(
            s,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\"/>\n",
            fx(MARGIN),
            fx(MARGIN + UNIT * m_max as f64)
        )
        .unwrap();
    }
    s.push_str("</g>\n");

    // hull edges: solid, except the stretch touching the augmentation point
    s.push_str("<g stroke=\"#000000\" stroke-width=\"2\" fill=\"none\">\n");
    for e in &p.hull.edges {
        let touches_added = e.left == added || e.right == added;
        if touches_added && !dots.contains(&added) {
            // split at the nearest genuine support dot on this edge
            let genuine: Vec<&Dot> =
                e.on_edge.iter().filter(|d| **d != added).collect();
            if let Some(first) = genuine.first() {
                write!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                     stroke-dasharray=\"6 4\"/>\n",
                    frame.xd(&added),
                    frame.yd(&added),
                    frame.xd(first),
                    frame.yd(first)
                )
                .unwrap();
                let far = if e.left == added { &e.right } else { &e.left };
                if *genuine[0] != *far {
                    write!(
                        s,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
                        frame.xd(first),
                        frame.yd(first),
                        frame.xd(far),
                        frame.yd(far)
                    )
                    .unwrap();
                }
            } else {
                write!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                     stroke-dasharray=\"6 4\"/>\n",
                    frame.xd(&e.left),
                    frame.yd(&e.left),
                    frame.xd(&e.right),
                    frame.yd(&e.right)
                )
                .unwrap();
            }
        } else {
            write!(
                s,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
                frame.xd(&e.left),
                frame.yd(&e.left),
                frame.xd(&e.right),
                frame.yd(&e.right)
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n");

    // support dots (filled) and the augmentation point (open, labeled)
    s.push_str("<g>\n");
    for d in &dots {
        write!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#000000\"/>\n",
            frame.xd(d),
            frame.yd(d)
        )
        .unwrap();
        write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">({}, {})</text>\n",
            fx(MARGIN + UNIT * d.m as f64 + 6.0),
            fx(MARGIN + UNIT * (frame.q_max - d.q.to_f64().unwrap()) - 6.0),
            d.m,
            d.q
        )
        .unwrap();
    }
    if !dots.contains(&added) {
        write!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#ffffff\" \
             stroke=\"#000000\" stroke-width=\"2\"/>\n",
            frame.xd(&added),
            frame.yd(&added)
        )
        .unwrap();
        write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">(0, h-1) = (0, {})</text>\n",
            fx(MARGIN + UNIT * added.m as f64 + 6.0),
            fx(MARGIN + UNIT * (frame.q_max - added.q.to_f64().unwrap()) - 6.0),
            added.q
        )
        .unwrap();
    }
    s.push_str("</g>\n");

    write!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\">{}</text>\n",
        fx(MARGIN),
        fx(frame.h - 10.0),
        xml_escape(title)
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

fn xml_escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rati};
    use crate::polygon::{augment, lower_hull, Dot};

    fn dot(m: u32, q: Rat) -> Dot {
        Dot { m, q }
    }

    #[test]
    fn first_example_canyon_picture() {
        // dots of the larger canyon: hull {(0,11),(2,3),(3,0)}, (1,7) on top
        let dots = vec![
            dot(3, rati(0)),
            dot(2, rati(3)),
            dot(1, rati(7)),
            dot(0, rati(11)),
        ];
        let base = lower_hull(&dots[..3]); // genuine support without (0,11)
        let aug = augment(&base, &rati(12));
        let svg = render_polygon(&aug, "canyon 1");
        // solid (3,0)-(2,3) and (2,3)-(1,7); dashed (1,7)-(0,11)
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("(0, h-1) = (0, 11)"));
        assert!(svg.contains("(1, 7)"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        // deterministic
        assert_eq!(svg, render_polygon(&aug, "canyon 1"));
    }

    #[test]
    fn fractional_dot_above_edge() {
        let dots = vec![dot(3, rati(0)), dot(2, rat(7, 2)), dot(1, rati(7))];
        let base = lower_hull(&dots);
        let aug = augment(&base, &rati(12));
        let svg = render_polygon(&aug, "half-integer dot");
        assert!(svg.contains("(2, 7/2)"));
    }

    #[test]
    fn single_dot_gives_one_dashed_edge() {
        let base = lower_hull(&[dot(1, rati(0))]);
        let aug = augment(&base, &rati(3));
        let svg = render_polygon(&aug, "cusp");
        let dashed = svg.matches("stroke-dasharray").count();
        let solid_edges = svg
            .lines()
            .filter(|l| l.starts_with("<line") && !l.contains("dasharray"))
            .count()
            // grid lines excluded: they sit inside the grid group; count
            // only lines after the grid group ends
            ;
        assert_eq!(dashed, 1);
        let after_grid = svg.split("</g>\n").nth(1).unwrap();
        let solid_after = after_grid
            .lines()
            .filter(|l| l.starts_with("<line") && !l.contains("dasharray"))
            .count();
        assert_eq!(solid_after, 0, "{solid_edges}");
    }
}
