//! BoxE: entities are points with a translational bump, relations are a pair
//! of boxes, one per argument position.
//!
//! Per component, with box center `c`, width `s = |upper - lower|`,
//! `w = s + 1` and `a = |p - c|`:
//!
//! ```text
//! inside  (a ≤ s/2):  a / w
//! outside:            a·w - κ,   κ = (w - 1)(w - 1/w) / 2
//! ```
//!
//! `κ` makes the two branches meet at the box boundary. The distance to a box
//! is the L2 norm of the per-component values.

use super::{Gradient, ModelParams};

const BASE: usize = 0;
const BUMP: usize = 1;
const HEAD_LO: usize = 2;
const TAIL_LO: usize = 4;

fn kappa(s: f64) -> f64 {
    0.5 * s * s * (s + 2.0) / (s + 1.0)
}

fn kappa_prime(s: f64) -> f64 {
    0.5 * s * (2.0 * s * s + 5.0 * s + 4.0) / ((s + 1.0) * (s + 1.0))
}

struct Component {
    value: f64,
    d_point: f64,
    d_lower: f64,
    d_upper: f64,
}

fn component(point: f64, lower: f64, upper: f64) -> Component {
    let center = 0.5 * (lower + upper);
    let width = (upper - lower).abs();
    let w = width + 1.0;
    let delta = point - center;
    let a = delta.abs();
    let sg = delta.signum() * if delta == 0.0 { 0.0 } else { 1.0 };
    let (value, d_point, d_width) = if a <= 0.5 * width {
        (a / w, sg / w, -a / (w * w))
    } else {
        (a * w - kappa(width), sg * w, a - kappa_prime(width))
    };
    // d_center = -d_point; center = (l+u)/2; width = |u - l|
    let ws = (upper - lower).signum() * if upper == lower { 0.0 } else { 1.0 };
    Component {
        value,
        d_point,
        d_lower: -0.5 * d_point - ws * d_width,
        d_upper: -0.5 * d_point + ws * d_width,
    }
}

fn points(p: &ModelParams, h: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
    let (base, bump) = (&p.tensors[BASE], &p.tensors[BUMP]);
    let p1 = base.row(h).iter().zip(bump.row(t)).map(|(a, b)| a + b).collect();
    let p2 = base.row(t).iter().zip(bump.row(h)).map(|(a, b)| a + b).collect();
    (p1, p2)
}

fn box_distance(p: &ModelParams, point: &[f64], lo_tensor: usize, r: usize) -> Vec<Component> {
    let lower = p.tensors[lo_tensor].row(r);
    let upper = p.tensors[lo_tensor + 1].row(r);
    (0..point.len())
        .map(|k| component(point[k], lower[k], upper[k]))
        .collect()
}

fn norm_of(cs: &[Component]) -> f64 {
    cs.iter().map(|c| c.value * c.value).sum::<f64>().sqrt()
}

pub(super) fn score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (p1, p2) = points(p, h, t);
    -(norm_of(&box_distance(p, &p1, HEAD_LO, r)) + norm_of(&box_distance(p, &p2, TAIL_LO, r)))
}

pub(super) fn grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (p1, p2) = points(p, h, t);
    // (point, box, entity whose base forms the point, entity whose bump is added)
    for (point, lo, based, bumped) in [(&p1, HEAD_LO, h, t), (&p2, TAIL_LO, t, h)] {
        let cs = box_distance(p, point, lo, r);
        let dist = norm_of(&cs);
        if dist == 0.0 {
            continue;
        }
        let outer: Vec<f64> = cs.iter().map(|c| -c.value / dist).collect();
        let d_point: Vec<f64> = cs.iter().zip(&outer).map(|(c, o)| o * c.d_point).collect();
        let d_lower: Vec<f64> = cs.iter().zip(&outer).map(|(c, o)| o * c.d_lower).collect();
        let d_upper: Vec<f64> = cs.iter().zip(&outer).map(|(c, o)| o * c.d_upper).collect();
        g.add_scaled(BASE, based, &d_point, s);
        g.add_scaled(BUMP, bumped, &d_point, s);
        g.add_scaled(lo, r, &d_lower, s);
        g.add_scaled(lo + 1, r, &d_upper, s);
    }
}
