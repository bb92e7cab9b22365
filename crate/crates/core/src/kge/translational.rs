//! Distance-based models: TransE, TransH, TransR, TransD, TransF, SE and
//! Euclidean MuRE.

use super::linalg::{dot, matvec, matvec_t, norm, outer, scaled};
use super::{Gradient, ModelParams, Norm};

fn residual(h: &[f64], r: &[f64], t: &[f64]) -> Vec<f64> {
    h.iter().zip(r).zip(t).map(|((h, r), t)| h + r - t).collect()
}

pub(super) fn transe_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let u = residual(ent.row(h), rel.row(r), ent.row(t));
    match p.norm {
        Norm::L2 => -norm(&u),
        Norm::L1 => -u.iter().map(|v| v.abs()).sum::<f64>(),
    }
}

pub(super) fn transe_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let u = residual(ent.row(h), rel.row(r), ent.row(t));
    let du: Vec<f64> = match p.norm {
        Norm::L2 => {
            let n = norm(&u);
            if n == 0.0 {
                vec![0.0; u.len()]
            } else {
                scaled(&u, -1.0 / n)
            }
        }
        Norm::L1 => u
            .iter()
            .map(|&v| if v > 0.0 { -1.0 } else if v < 0.0 { 1.0 } else { 0.0 })
            .collect(),
    };
    g.add_scaled(0, h, &du, s);
    g.add_scaled(1, r, &du, s);
    g.add_scaled(0, t, &du, -s);
}

// TransH: tensors entity, relation (translation d_r), normal (w_r).
fn transh_parts(p: &ModelParams, h: usize, r: usize, t: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let ent = &p.tensors[0];
    let w = p.tensors[2].row(r);
    let delta: Vec<f64> = ent.row(h).iter().zip(ent.row(t)).map(|(a, b)| a - b).collect();
    let wd = dot(w, &delta);
    let u: Vec<f64> = delta
        .iter()
        .zip(w)
        .zip(p.tensors[1].row(r))
        .map(|((dl, wi), dr)| dl - wd * wi + dr)
        .collect();
    (delta, u, wd)
}

pub(super) fn transh_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (_, u, _) = transh_parts(p, h, r, t);
    -dot(&u, &u)
}

pub(super) fn transh_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (delta, u, wd) = transh_parts(p, h, r, t);
    let w = p.tensors[2].row(r);
    let wu = dot(w, &u);
    let dh: Vec<f64> = u.iter().zip(w).map(|(ui, wi)| -2.0 * (ui - wu * wi)).collect();
    let dw: Vec<f64> = delta
        .iter()
        .zip(&u)
        .map(|(dl, ui)| 2.0 * wu * dl + 2.0 * wd * ui)
        .collect();
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dh, -s);
    g.add_scaled(1, r, &u, -2.0 * s);
    g.add_scaled(2, r, &dw, s);
}

// TransR: tensors entity, relation, projection (d×d row-major).
fn transr_parts(p: &ModelParams, h: usize, r: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
    let ent = &p.tensors[0];
    let delta: Vec<f64> = ent.row(h).iter().zip(ent.row(t)).map(|(a, b)| a - b).collect();
    let md = matvec(p.tensors[2].row(r), &delta);
    let u = md.iter().zip(p.tensors[1].row(r)).map(|(a, b)| a + b).collect();
    (delta, u)
}

pub(super) fn transr_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (_, u) = transr_parts(p, h, r, t);
    -dot(&u, &u)
}

pub(super) fn transr_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (delta, u) = transr_parts(p, h, r, t);
    let mtu = matvec_t(p.tensors[2].row(r), &u);
    g.add_scaled(0, h, &mtu, -2.0 * s);
    g.add_scaled(0, t, &mtu, 2.0 * s);
    g.add_scaled(1, r, &u, -2.0 * s);
    g.add_scaled(2, r, &outer(&u, &delta), -2.0 * s);
}

// TransD: tensors entity, entity_projection, relation, relation_projection.
pub(super) fn transd_parts(p: &ModelParams, h: usize, r: usize, t: usize) -> (Vec<f64>, f64, f64) {
    let (ent, ent_p) = (&p.tensors[0], &p.tensors[1]);
    let (rel, rel_p) = (p.tensors[2].row(r), p.tensors[3].row(r));
    let a = dot(ent_p.row(h), ent.row(h));
    let b = dot(ent_p.row(t), ent.row(t));
    let u = ent
        .row(h)
        .iter()
        .zip(ent.row(t))
        .zip(rel)
        .zip(rel_p)
        .map(|(((hi, ti), ri), pi)| hi - ti + ri + (a - b) * pi)
        .collect();
    (u, a, b)
}

pub(super) fn transd_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (u, _, _) = transd_parts(p, h, r, t);
    -dot(&u, &u)
}

pub(super) fn transd_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (u, a, b) = transd_parts(p, h, r, t);
    let (ent, ent_p) = (&p.tensors[0], &p.tensors[1]);
    let rel_p = p.tensors[3].row(r);
    let gu = scaled(&u, -2.0);
    let gr = dot(&gu, rel_p);
    let dh: Vec<f64> = gu.iter().zip(ent_p.row(h)).map(|(x, hp)| x + gr * hp).collect();
    let dt: Vec<f64> = gu.iter().zip(ent_p.row(t)).map(|(x, tp)| -x - gr * tp).collect();
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, h, ent.row(h), gr * s);
    g.add_scaled(1, t, ent.row(t), -gr * s);
    g.add_scaled(2, r, &gu, s);
    g.add_scaled(3, r, &gu, (a - b) * s);
}

pub(super) fn transf_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    hv.iter()
        .zip(rv)
        .zip(tv)
        .map(|((h, r), t)| (h + r) * t + (t - r) * h)
        .sum()
}

pub(super) fn transf_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    let dh: Vec<f64> = tv.iter().zip(rv).map(|(t, r)| 2.0 * t - r).collect();
    let dt: Vec<f64> = hv.iter().zip(rv).map(|(h, r)| 2.0 * h + r).collect();
    let dr: Vec<f64> = tv.iter().zip(hv).map(|(t, h)| t - h).collect();
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, r, &dr, s);
}

// SE: tensors entity, head_projection (M¹), tail_projection (M²).
fn se_residual(p: &ModelParams, h: usize, r: usize, t: usize) -> Vec<f64> {
    let ent = &p.tensors[0];
    let a = matvec(p.tensors[1].row(r), ent.row(h));
    let b = matvec(p.tensors[2].row(r), ent.row(t));
    a.iter().zip(&b).map(|(x, y)| x - y).collect()
}

pub(super) fn se_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    -norm(&se_residual(p, h, r, t))
}

pub(super) fn se_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let u = se_residual(p, h, r, t);
    let n = norm(&u);
    if n == 0.0 {
        return;
    }
    let du = scaled(&u, -1.0 / n);
    let ent = &p.tensors[0];
    g.add_scaled(0, h, &matvec_t(p.tensors[1].row(r), &du), s);
    g.add_scaled(0, t, &matvec_t(p.tensors[2].row(r), &du), -s);
    g.add_scaled(1, r, &outer(&du, ent.row(h)), s);
    g.add_scaled(2, r, &outer(&du, ent.row(t)), -s);
}

// MuRE: tensors entity, entity_bias (1 column), relation_scale (ρ), relation (translation).
fn mure_residual(p: &ModelParams, h: usize, r: usize, t: usize) -> Vec<f64> {
    let ent = &p.tensors[0];
    ent.row(h)
        .iter()
        .zip(p.tensors[2].row(r))
        .zip(ent.row(t))
        .zip(p.tensors[3].row(r))
        .map(|(((hi, rho), ti), vi)| rho * hi - ti - vi)
        .collect()
}

pub(super) fn mure_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let u = mure_residual(p, h, r, t);
    let bias = &p.tensors[1];
    -dot(&u, &u) + bias.row(h)[0] + bias.row(t)[0]
}

pub(super) fn mure_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let u = mure_residual(p, h, r, t);
    let ent = &p.tensors[0];
    let rho = p.tensors[2].row(r);
    let dh: Vec<f64> = rho.iter().zip(&u).map(|(a, b)| -2.0 * a * b).collect();
    let drho: Vec<f64> = ent.row(h).iter().zip(&u).map(|(a, b)| -2.0 * a * b).collect();
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &u, 2.0 * s);
    g.add_scaled(1, h, &[1.0], s);
    g.add_scaled(1, t, &[1.0], s);
    g.add_scaled(2, r, &drho, s);
    g.add_scaled(3, r, &u, 2.0 * s);
}
