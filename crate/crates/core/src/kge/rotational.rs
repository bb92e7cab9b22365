//! Rotation models: RotatE (complex plane) and QuatE (quaternions).
//!
//! Both store components block-wise: a complex row is `[re.., im..]` and a
//! quaternion row is `[a.., b.., c.., d..]`, one block per part.

use super::{Gradient, ModelParams};

fn rotate_residual(p: &ModelParams, h: usize, r: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
    let ent = &p.tensors[0];
    let phase = p.tensors[1].row(r);
    let k = phase.len();
    let (hr, hi) = ent.row(h).split_at(k);
    let (tr, ti) = ent.row(t).split_at(k);
    let mut ure = vec![0.0; k];
    let mut uim = vec![0.0; k];
    for j in 0..k {
        let (sin, cos) = phase[j].sin_cos();
        ure[j] = hr[j] * cos - hi[j] * sin - tr[j];
        uim[j] = hr[j] * sin + hi[j] * cos - ti[j];
    }
    (ure, uim)
}

pub(super) fn rotate_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ure, uim) = rotate_residual(p, h, r, t);
    let sq: f64 = ure.iter().chain(&uim).map(|v| v * v).sum();
    -sq.sqrt()
}

pub(super) fn rotate_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ure, uim) = rotate_residual(p, h, r, t);
    let n = ure.iter().chain(&uim).map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return;
    }
    let ent = &p.tensors[0];
    let phase = p.tensors[1].row(r);
    let k = phase.len();
    let (hr, hi) = ent.row(h).split_at(k);
    let mut dh = vec![0.0; 2 * k];
    let mut dt = vec![0.0; 2 * k];
    let mut dphase = vec![0.0; k];
    for j in 0..k {
        let (sin, cos) = phase[j].sin_cos();
        let are = -ure[j] / n;
        let aim = -uim[j] / n;
        dh[j] = are * cos + aim * sin;
        dh[k + j] = -are * sin + aim * cos;
        dt[j] = -are;
        dt[k + j] = -aim;
        dphase[j] = are * (-hr[j] * sin - hi[j] * cos) + aim * (hr[j] * cos - hi[j] * sin);
    }
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, r, &dphase, s);
}

type Quat = [f64; 4];

/// Hamilton product.
pub fn hamilton(x: Quat, y: Quat) -> Quat {
    let [a1, b1, c1, d1] = x;
    let [a2, b2, c2, d2] = y;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

fn conj(q: Quat) -> Quat {
    [q[0], -q[1], -q[2], -q[3]]
}

fn dot4(x: Quat, y: Quat) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

fn quat_at(row: &[f64], k: usize, j: usize) -> Quat {
    [row[j], row[k + j], row[2 * k + j], row[3 * k + j]]
}

fn put_quat(row: &mut [f64], k: usize, j: usize, q: Quat) {
    for (part, v) in q.into_iter().enumerate() {
        row[part * k + j] = v;
    }
}

/// Returns the unit quaternion and the original norm (zero quaternions stay zero).
fn unit(q: Quat) -> (Quat, f64) {
    let n = dot4(q, q).sqrt();
    if n == 0.0 {
        (q, 0.0)
    } else {
        ([q[0] / n, q[1] / n, q[2] / n, q[3] / n], n)
    }
}

pub(super) fn quate_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let ent = &p.tensors[0];
    let rel = p.tensors[1].row(r);
    let k = p.dim / 4;
    let (hv, tv) = (ent.row(h), ent.row(t));
    (0..k)
        .map(|j| {
            let (rn, _) = unit(quat_at(rel, k, j));
            dot4(hamilton(quat_at(hv, k, j), rn), quat_at(tv, k, j))
        })
        .sum()
}

pub(super) fn quate_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let ent = &p.tensors[0];
    let rel = p.tensors[1].row(r);
    let k = p.dim / 4;
    let (hv, tv) = (ent.row(h), ent.row(t));
    let mut dh = vec![0.0; p.dim];
    let mut dt = vec![0.0; p.dim];
    let mut dr = vec![0.0; p.dim];
    for j in 0..k {
        let hq = quat_at(hv, k, j);
        let tq = quat_at(tv, k, j);
        let (rn, norm) = unit(quat_at(rel, k, j));
        if norm == 0.0 {
            continue;
        }
        // ⟨x y, z⟩ = ⟨x, z ȳ⟩ = ⟨y, x̄ z⟩
        put_quat(&mut dt, k, j, hamilton(hq, rn));
        put_quat(&mut dh, k, j, hamilton(tq, conj(rn)));
        let gr = hamilton(conj(hq), tq);
        let along = dot4(gr, rn);
        let dq = [
            (gr[0] - along * rn[0]) / norm,
            (gr[1] - along * rn[1]) / norm,
            (gr[2] - along * rn[2]) / norm,
            (gr[3] - along * rn[3]) / norm,
        ];
        put_quat(&mut dr, k, j, dq);
    }
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, r, &dr, s);
}
