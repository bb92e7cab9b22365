//! Multiplicative models: DistMult, ComplEx, HolE, SimplE and CrossE.

use super::{Gradient, ModelParams};

fn trilinear(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x * y * z).sum()
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub(super) fn distmult_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    // r·(h∘t), so swapping h and t gives the same bits.
    rel.row(r).iter().zip(hadamard(ent.row(h), ent.row(t))).map(|(a, b)| a * b).sum()
}

pub(super) fn distmult_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    g.add_scaled(0, h, &hadamard(rv, tv), s);
    g.add_scaled(0, t, &hadamard(hv, rv), s);
    g.add_scaled(1, r, &hadamard(hv, tv), s);
}

// ComplEx rows are [re_0..re_{k-1}, im_0..im_{k-1}].
pub(super) fn complex_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let k = p.dim / 2;
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    let (hr, hi) = hv.split_at(k);
    let (rr, ri) = rv.split_at(k);
    let (tr, ti) = tv.split_at(k);
    (0..k)
        .map(|j| {
            hr[j] * rr[j] * tr[j] + hi[j] * rr[j] * ti[j] + hr[j] * ri[j] * ti[j]
                - hi[j] * ri[j] * tr[j]
        })
        .sum()
}

pub(super) fn complex_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let k = p.dim / 2;
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    let (hr, hi) = hv.split_at(k);
    let (rr, ri) = rv.split_at(k);
    let (tr, ti) = tv.split_at(k);
    let mut dh = vec![0.0; 2 * k];
    let mut dr = vec![0.0; 2 * k];
    let mut dt = vec![0.0; 2 * k];
    for j in 0..k {
        dh[j] = rr[j] * tr[j] + ri[j] * ti[j];
        dh[k + j] = rr[j] * ti[j] - ri[j] * tr[j];
        dr[j] = hr[j] * tr[j] + hi[j] * ti[j];
        dr[k + j] = hr[j] * ti[j] - hi[j] * tr[j];
        dt[j] = hr[j] * rr[j] - hi[j] * ri[j];
        dt[k + j] = hi[j] * rr[j] + hr[j] * ri[j];
    }
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, r, &dr, s);
}

/// Circular correlation `(a ⋆ b)_k = Σ_i a_i b_{(i+k) mod d}`, computed directly.
pub fn circular_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d = a.len();
    (0..d)
        .map(|k| (0..d).map(|i| a[i] * b[(i + k) % d]).sum())
        .collect()
}

pub(super) fn hole_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let corr = circular_correlation(ent.row(h), ent.row(t));
    rel.row(r).iter().zip(&corr).map(|(a, b)| a * b).sum()
}

pub(super) fn hole_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (ent, rel) = (&p.tensors[0], &p.tensors[1]);
    let (hv, rv, tv) = (ent.row(h), rel.row(r), ent.row(t));
    let d = hv.len();
    let dh: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|k| rv[k] * tv[(i + k) % d]).sum())
        .collect();
    let dt: Vec<f64> = (0..d)
        .map(|j| (0..d).map(|k| rv[k] * hv[(j + d - k) % d]).sum())
        .collect();
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(0, t, &dt, s);
    g.add_scaled(1, r, &circular_correlation(hv, tv), s);
}

// SimplE: tensors entity_head, entity_tail, relation, relation_inverse.
pub(super) fn simple_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let (head, tail) = (&p.tensors[0], &p.tensors[1]);
    let (rel, inv) = (p.tensors[2].row(r), p.tensors[3].row(r));
    0.5 * (trilinear(head.row(h), rel, tail.row(t)) + trilinear(head.row(t), inv, tail.row(h)))
}

pub(super) fn simple_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let (head, tail) = (&p.tensors[0], &p.tensors[1]);
    let (rel, inv) = (p.tensors[2].row(r), p.tensors[3].row(r));
    let s = 0.5 * s;
    g.add_scaled(0, h, &hadamard(rel, tail.row(t)), s);
    g.add_scaled(1, t, &hadamard(head.row(h), rel), s);
    g.add_scaled(2, r, &hadamard(head.row(h), tail.row(t)), s);
    g.add_scaled(0, t, &hadamard(inv, tail.row(h)), s);
    g.add_scaled(1, h, &hadamard(head.row(t), inv), s);
    g.add_scaled(3, r, &hadamard(head.row(t), tail.row(h)), s);
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

// CrossE: tensors entity, relation, interaction (c_r), bias (single global row).
fn crosse_hidden(p: &ModelParams, h: usize, r: usize) -> Vec<f64> {
    let hv = p.tensors[0].row(h);
    let rv = p.tensors[1].row(r);
    let c = p.tensors[2].row(r);
    let b = p.tensors[3].row(0);
    (0..hv.len())
        .map(|j| (c[j] * hv[j] * (1.0 + rv[j]) + b[j]).tanh())
        .collect()
}

pub(super) fn crosse_score(p: &ModelParams, h: usize, r: usize, t: usize) -> f64 {
    let z = crosse_hidden(p, h, r);
    sigmoid(z.iter().zip(p.tensors[0].row(t)).map(|(a, b)| a * b).sum())
}

pub(super) fn crosse_grad(p: &ModelParams, h: usize, r: usize, t: usize, s: f64, g: &mut Gradient) {
    let z = crosse_hidden(p, h, r);
    let hv = p.tensors[0].row(h);
    let tv = p.tensors[0].row(t);
    let rv = p.tensors[1].row(r);
    let c = p.tensors[2].row(r);
    let f = sigmoid(z.iter().zip(tv).map(|(a, b)| a * b).sum());
    let k = f * (1.0 - f);
    let dq: Vec<f64> = tv.iter().zip(&z).map(|(t, z)| k * t * (1.0 - z * z)).collect();
    let dh: Vec<f64> = (0..hv.len()).map(|j| dq[j] * c[j] * (1.0 + rv[j])).collect();
    let dc: Vec<f64> = (0..hv.len()).map(|j| dq[j] * hv[j] * (1.0 + rv[j])).collect();
    let dr: Vec<f64> = (0..hv.len()).map(|j| dq[j] * c[j] * hv[j]).collect();
    g.add_scaled(0, t, &z, k * s);
    g.add_scaled(0, h, &dh, s);
    g.add_scaled(1, r, &dr, s);
    g.add_scaled(2, r, &dc, s);
    g.add_scaled(3, 0, &dq, s);
}

#[cfg(test)]
mod tests {
    use super::super::{init_params, ModelKind};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distmult_is_symmetric_and_grad_r_is_h_times_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = init_params(ModelKind::DistMult, 4, 2, 6, &mut rng).unwrap();
        assert_eq!(
            p.score(0, 1, 3).unwrap().to_bits(),
            p.score(3, 1, 0).unwrap().to_bits()
        );
        let g = p.grad(0, 1, 3).unwrap();
        let expect = hadamard(p.tensors[0].row(0), p.tensors[0].row(3));
        assert_eq!(g.get(1, 1).unwrap(), expect.as_slice());
    }

    #[test]
    fn correlation_small_case() {
        // (a ⋆ b)_0 = a·b, (a ⋆ b)_1 = a0 b1 + a1 b2 + a2 b0
        let c = circular_correlation(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        assert_eq!(c, vec![32.0, 1.0 * 5.0 + 2.0 * 6.0 + 3.0 * 4.0, 1.0 * 6.0 + 2.0 * 4.0 + 3.0 * 5.0]);
    }

    #[test]
    fn crosse_score_is_a_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = init_params(ModelKind::CrossE, 3, 1, 8, &mut rng).unwrap();
        let s = p.score(0, 0, 1).unwrap();
        assert!(s > 0.0 && s < 1.0);
        assert!((sigmoid(-800.0)).is_finite() && sigmoid(800.0) == 1.0);
    }
}
