//! Deterministic SVG pictures of one- and two-dimensional instances.

use std::fmt::Write as _;

use supcalc::function::PolyhedralFunction;
use supcalc::rational::Rational;
use supcalc::{Error, ExtendedRational, HalfSpace, Polyhedron, QVector, Result};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 30.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let span = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (-1.0, 1.0)
            } else if hi - lo < 1e-9 {
                (lo - 1.0, hi + 1.0)
            } else {
                let pad = (hi - lo) * 0.05;
                (lo - pad, hi + pad)
            }
        };
        Frame { x: span(xs), y: span(ys) }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    }

    fn axes(&self, s: &mut String) {
        let (x0, y0) = self.map(self.x.0, 0.0_f64.clamp(self.y.0, self.y.1));
        let (x1, _) = self.map(self.x.1, 0.0);
        let _ = writeln!(s, r##"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="#999" stroke-width="1"/>"##);
        let (ax, ay0) = self.map(0.0_f64.clamp(self.x.0, self.x.1), self.y.0);
        let (_, ay1) = self.map(0.0, self.y.1);
        let _ = writeln!(s, r##"<line x1="{ax:.2}" y1="{ay0:.2}" x2="{ax:.2}" y2="{ay1:.2}" stroke="#999" stroke-width="1"/>"##);
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"18\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Clips to the cube `[-r, r]^n` so every picture is bounded.
fn clip(p: &Polyhedron, r: &Rational) -> Result<Polyhedron> {
    let n = p.dim();
    let lo = QVector::new(vec![-r.clone(); n]);
    let hi = QVector::new(vec![r.clone(); n]);
    p.intersect(&Polyhedron::boxed(&lo, &hi)?)
}

fn radius_for(p: &Polyhedron) -> Result<Rational> {
    let mut r = Rational::from_int(3);
    if !p.is_empty() {
        for v in p.vertices()? {
            for c in v.iter() {
                r = r.max(&c.abs() + &Rational::one());
            }
        }
    }
    Ok(r.ceil())
}

/// Vertices of a bounded planar polygon in counterclockwise order.
fn polygon(p: &Polyhedron) -> Result<Vec<(f64, f64)>> {
    let pts: Vec<(f64, f64)> = p.vertices()?.iter().map(|v| (v[0].to_f64(), v[1].to_f64())).collect();
    let n = pts.len().max(1) as f64;
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut with_angle: Vec<(f64, (f64, f64))> = pts.into_iter().map(|p| ((p.1 - cy).atan2(p.0 - cx), p)).collect();
    with_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(with_angle.into_iter().map(|(_, p)| p).collect())
}

fn shade(i: usize) -> String {
    let level = 230 - (i * 37) % 150;
    format!("rgb({level},{level},{})", 255 - (i * 23) % 60)
}

fn graph_1d(f: &PolyhedralFunction, title: &str) -> Result<String> {
    let r = radius_for(f.domain())?;
    let dom = clip(f.domain(), &r)?;
    if dom.is_empty() {
        return Err(Error::EmptySet("nothing to draw: empty domain".into()));
    }
    let vs = dom.vertices()?;
    let (lo, hi) = (vs.iter().map(|v| v[0].clone()).min().unwrap(), vs.iter().map(|v| v[0].clone()).max().unwrap());
    let mut xs = vec![lo.clone(), hi.clone()];
    let pieces = f.pieces();
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            let da = &p.a[0] - &q.a[0];
            if !da.is_zero() {
                let x = &(&q.b - &p.b) / &da;
                if x > lo && x < hi {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort();
    xs.dedup();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .filter_map(|x| match f.eval(&QVector::new(vec![x.clone()])) {
            ExtendedRational::Finite(v) => Some((x.to_f64(), v.to_f64())),
            _ => None,
        })
        .collect();
    let frame = Frame::new(&pts.iter().map(|p| p.0).collect::<Vec<_>>(), &pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let mut s = header(title);
    frame.axes(&mut s);
    let path: Vec<String> = pts.iter().map(|&(x, y)| {
        let (px, py) = frame.map(x, y);
        format!("{px:.2},{py:.2}")
    }).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##, path.join(" "));
    for &(x, y) in &pts {
        let (px, py) = frame.map(x, y);
        let _ = writeln!(s, r##"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="#1f4e9c"/>"##);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// The cells where each piece attains the maximum.
fn cells_2d(f: &PolyhedralFunction, title: &str) -> Result<String> {
    let r = radius_for(f.domain())?;
    let dom = clip(f.domain(), &r)?;
    if dom.is_empty() {
        return Err(Error::EmptySet("nothing to draw: empty domain".into()));
    }
    let mut cells = Vec::new();
    let pieces = f.pieces();
    for (i, p) in pieces.iter().enumerate() {
        let rows = pieces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| HalfSpace::new(q.a.sub(&p.a), &p.b - &q.b))
            .collect();
        let cell = dom.intersect(&Polyhedron::new(2, rows, Vec::new())?)?;
        if !cell.is_empty() {
            cells.push((i, polygon(&cell)?));
        }
    }
    let all: Vec<(f64, f64)> = cells.iter().flat_map(|c| c.1.iter().copied()).collect();
    let frame = Frame::new(&all.iter().map(|p| p.0).collect::<Vec<_>>(), &all.iter().map(|p| p.1).collect::<Vec<_>>());
    let mut s = header(title);
    for (i, poly) in &cells {
        let pts: Vec<String> = poly.iter().map(|&(x, y)| {
            let (px, py) = frame.map(x, y);
            format!("{px:.2},{py:.2}")
        }).collect();
        let _ = writeln!(s, r##"<polygon points="{}" fill="{}" stroke="#333" stroke-width="1"/>"##, pts.join(" "), shade(*i));
    }
    frame.axes(&mut s);
    s.push_str("</svg>\n");
    Ok(s)
}

/// Function graph (1-D) or piece cells (2-D).
pub fn function_svg(f: &PolyhedralFunction, title: &str) -> Result<String> {
    match f.dim() {
        1 => graph_1d(f, title),
        2 => cells_2d(f, title),
        d => Err(Error::InvalidInput(format!("plots need dimension 1 or 2, got {d}"))),
    }
}

/// A segment (1-D) or polygon (2-D), clipped to a box when unbounded.
pub fn set_svg(p: &Polyhedron, title: &str) -> Result<String> {
    if p.dim() > 2 || p.dim() == 0 {
        return Err(Error::InvalidInput(format!("plots need dimension 1 or 2, got {}", p.dim())));
    }
    let mut s = header(title);
    if p.is_empty() {
        s.push_str("</svg>\n");
        return Ok(s);
    }
    let c = clip(p, &radius_for(p)?)?;
    if p.dim() == 1 {
        let vs: Vec<f64> = c.vertices()?.iter().map(|v| v[0].to_f64()).collect();
        let frame = Frame::new(&vs, &[0.0]);
        frame.axes(&mut s);
        let (lo, hi) = (vs.iter().copied().fold(f64::INFINITY, f64::min), vs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let (x0, y) = frame.map(lo, 0.0);
        let (x1, _) = frame.map(hi, 0.0);
        let _ = writeln!(s, r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#b03a2e" stroke-width="4"/>"##);
        for x in [x0, x1] {
            let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#b03a2e"/>"##);
        }
    } else {
        let poly = polygon(&c)?;
        let frame = Frame::new(&poly.iter().map(|p| p.0).collect::<Vec<_>>(), &poly.iter().map(|p| p.1).collect::<Vec<_>>());
        frame.axes(&mut s);
        let pts: Vec<String> = poly.iter().map(|&(x, y)| {
            let (px, py) = frame.map(x, y);
            format!("{px:.2},{py:.2}")
        }).collect();
        let _ = writeln!(s, r##"<polygon points="{}" fill="#f2c6c0" stroke="#b03a2e" stroke-width="2"/>"##, pts.join(" "));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
