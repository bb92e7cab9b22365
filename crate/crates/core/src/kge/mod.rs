//! Knowledge-graph embedding models: parameters, scoring, analytic gradients
//! and constraint projections.
//!
//! Every score is oriented so that higher means more plausible. Parameters
//! live in a list of row-major [`Tensor`]s whose layout is fixed per model;
//! tensor 0 is always the entity tensor used for alignment.
//!
//! | Model    | Score |
//! |----------|-------|
//! | TransE   | `-‖h + r - t‖` (L2, or L1 by option) |
//! | TransH   | `-‖h⊥ + d_r - t⊥‖²`, `x⊥ = x - (wᵀx)w` |
//! | TransR   | `-‖M_r h + r - M_r t‖²` |
//! | TransD   | `-‖h⊥ + r - t⊥‖²`, `x⊥ = x + (x_pᵀx) r_p` |
//! | TransF   | `(h + r)ᵀt + (t - r)ᵀh` |
//! | DistMult | `⟨h, r, t⟩` |
//! | ComplEx  | `Re ⟨h, r, conj(t)⟩` |
//! | HolE     | `rᵀ(h ⋆ t)` with circular correlation `⋆` |
//! | RotatE   | `-‖h ∘ e^{iθ_r} - t‖` |
//! | SimplE   | `½(⟨h_head, r, t_tail⟩ + ⟨t_head, r_inv, h_tail⟩)` |
//! | QuatE    | `(h ⊗ r̂) · t` with Hamilton product `⊗` |
//! | SE       | `-‖M¹_r h - M²_r t‖` |
//! | MuRE     | `-‖ρ_r ∘ h - (t + r)‖² + b_h + b_t` |
//! | BoxE     | `-Σᵢ dist(pⁱ, boxⁱ_r)` |
//! | CrossE   | `σ(tanh(c_r ∘ h + c_r ∘ h ∘ r + b)ᵀ t)` |

mod bilinear;
mod boxe;
pub(crate) mod linalg;
mod rotational;
mod translational;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    TransE,
    TransH,
    TransR,
    TransD,
    TransF,
    DistMult,
    ComplEx,
    HolE,
    RotatE,
    SimplE,
    QuatE,
    SE,
    MuRE,
    BoxE,
    CrossE,
}

impl ModelKind {
    pub const ALL: [ModelKind; 15] = [
        ModelKind::TransE,
        ModelKind::TransH,
        ModelKind::TransR,
        ModelKind::TransD,
        ModelKind::TransF,
        ModelKind::DistMult,
        ModelKind::ComplEx,
        ModelKind::HolE,
        ModelKind::RotatE,
        ModelKind::SimplE,
        ModelKind::QuatE,
        ModelKind::SE,
        ModelKind::MuRE,
        ModelKind::BoxE,
        ModelKind::CrossE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::TransE => "TransE",
            ModelKind::TransH => "TransH",
            ModelKind::TransR => "TransR",
            ModelKind::TransD => "TransD",
            ModelKind::TransF => "TransF",
            ModelKind::DistMult => "DistMult",
            ModelKind::ComplEx => "ComplEx",
            ModelKind::HolE => "HolE",
            ModelKind::RotatE => "RotatE",
            ModelKind::SimplE => "SimplE",
            ModelKind::QuatE => "QuatE",
            ModelKind::SE => "SE",
            ModelKind::MuRE => "MuRE",
            ModelKind::BoxE => "BoxE",
            ModelKind::CrossE => "CrossE",
        }
    }

    /// `dim` must be a multiple of this.
    pub fn dim_multiple(self) -> usize {
        match self {
            ModelKind::ComplEx | ModelKind::SimplE => 2,
            ModelKind::QuatE => 4,
            _ => 1,
        }
    }

    /// Models whose entity rows are projected into the unit ball.
    fn bounds_entities(self) -> bool {
        matches!(
            self,
            ModelKind::TransE | ModelKind::TransH | ModelKind::TransR | ModelKind::TransD
        )
    }

    pub fn supported_names() -> String {
        Self::ALL
            .iter()
            .map(|k| k.name().to_ascii_lowercase())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| Error::UnknownModel {
                name: s.to_string(),
                supported: Self::supported_names(),
            })
    }
}

/// Distance used by TransE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Entity,
    Relation,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub owner: Owner,
    pub rows: usize,
    pub cols: usize,
    #[serde(skip)]
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: &str, owner: Owner, rows: usize, cols: usize) -> Self {
        Tensor {
            name: name.to_string(),
            owner,
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

pub(crate) struct TensorSpec {
    name: &'static str,
    owner: Owner,
    cols: usize,
}

const fn spec(name: &'static str, owner: Owner, cols: usize) -> TensorSpec {
    TensorSpec { name, owner, cols }
}

fn layout(kind: ModelKind, d: usize) -> Vec<TensorSpec> {
    use Owner::*;
    match kind {
        ModelKind::TransE | ModelKind::TransF | ModelKind::DistMult | ModelKind::HolE => {
            vec![spec("entity", Entity, d), spec("relation", Relation, d)]
        }
        ModelKind::ComplEx | ModelKind::QuatE => {
            vec![spec("entity", Entity, d), spec("relation", Relation, d)]
        }
        ModelKind::TransH => vec![
            spec("entity", Entity, d),
            spec("relation", Relation, d),
            spec("normal", Relation, d),
        ],
        ModelKind::TransR => vec![
            spec("entity", Entity, d),
            spec("relation", Relation, d),
            spec("projection", Relation, d * d),
        ],
        ModelKind::TransD => vec![
            spec("entity", Entity, d),
            spec("entity_projection", Entity, d),
            spec("relation", Relation, d),
            spec("relation_projection", Relation, d),
        ],
        ModelKind::RotatE => vec![spec("entity", Entity, 2 * d), spec("phase", Relation, d)],
        ModelKind::SimplE => vec![
            spec("entity_head", Entity, d / 2),
            spec("entity_tail", Entity, d / 2),
            spec("relation", Relation, d / 2),
            spec("relation_inverse", Relation, d / 2),
        ],
        ModelKind::SE => vec![
            spec("entity", Entity, d),
            spec("head_projection", Relation, d * d),
            spec("tail_projection", Relation, d * d),
        ],
        ModelKind::MuRE => vec![
            spec("entity", Entity, d),
            spec("entity_bias", Entity, 1),
            spec("relation_scale", Relation, d),
            spec("relation", Relation, d),
        ],
        ModelKind::BoxE => vec![
            spec("entity_base", Entity, d),
            spec("entity_bump", Entity, d),
            spec("head_box_lower", Relation, d),
            spec("head_box_upper", Relation, d),
            spec("tail_box_lower", Relation, d),
            spec("tail_box_upper", Relation, d),
        ],
        ModelKind::CrossE => vec![
            spec("entity", Entity, d),
            spec("relation", Relation, d),
            spec("interaction", Relation, d),
            spec("bias", Global, d),
        ],
    }
}

/// Model parameters. Tensor 0 always holds the entity embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub dim: usize,
    pub num_entities: usize,
    pub num_relations: usize,
    pub norm: Norm,
    pub tensors: Vec<Tensor>,
}

/// Sparse gradient: one dense slice per touched (tensor, row).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gradient {
    pub parts: Vec<GradPart>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradPart {
    pub tensor: usize,
    pub row: usize,
    pub values: Vec<f64>,
}

impl Gradient {
    /// Adds `values` into the slice for (tensor, row), creating it if needed.
    pub fn add(&mut self, tensor: usize, row: usize, values: &[f64]) {
        self.add_scaled(tensor, row, values, 1.0);
    }

    pub fn add_scaled(&mut self, tensor: usize, row: usize, values: &[f64], scale: f64) {
        if let Some(part) = self
            .parts
            .iter_mut()
            .find(|p| p.tensor == tensor && p.row == row)
        {
            for (a, b) in part.values.iter_mut().zip(values) {
                *a += scale * b;
            }
        } else {
            self.parts.push(GradPart {
                tensor,
                row,
                values: values.iter().map(|v| scale * v).collect(),
            });
        }
    }

    pub fn get(&self, tensor: usize, row: usize) -> Option<&[f64]> {
        self.parts
            .iter()
            .find(|p| p.tensor == tensor && p.row == row)
            .map(|p| p.values.as_slice())
    }
}

/// Allocates the model's tensors with every value zero.
pub fn zeroed_params(
    kind: ModelKind,
    num_entities: usize,
    num_relations: usize,
    dim: usize,
) -> Result<ModelParams> {
    let multiple = kind.dim_multiple();
    if dim == 0 || dim % multiple != 0 {
        return Err(Error::Dimension {
            model: kind.name().to_string(),
            dim,
            multiple,
        });
    }
    let tensors = layout(kind, dim)
        .into_iter()
        .map(|s| {
            let rows = match s.owner {
                Owner::Entity => num_entities,
                Owner::Relation => num_relations,
                Owner::Global => 1,
            };
            Tensor::zeros(s.name, s.owner, rows, s.cols)
        })
        .collect();
    Ok(ModelParams {
        kind,
        dim,
        num_entities,
        num_relations,
        norm: Norm::L2,
        tensors,
    })
}

/// Initializes parameters uniformly in `[-6/√d, 6/√d]` (RotatE phases uniformly
/// on the circle), then applies [`ModelParams::constrain`].
pub fn init_params<R: Rng + ?Sized>(
    kind: ModelKind,
    num_entities: usize,
    num_relations: usize,
    dim: usize,
    rng: &mut R,
) -> Result<ModelParams> {
    let mut params = zeroed_params(kind, num_entities, num_relations, dim)?;
    let bound = 6.0 / (dim as f64).sqrt();
    for t in &mut params.tensors {
        let (lo, hi) = if kind == ModelKind::RotatE && t.name == "phase" {
            (-std::f64::consts::PI, std::f64::consts::PI)
        } else {
            (-bound, bound)
        };
        for v in &mut t.data {
            *v = rng.random_range(lo..hi);
        }
    }
    if kind.bounds_entities() {
        // Entities start on the unit sphere; training keeps them in the ball.
        let ent = &mut params.tensors[0];
        for i in 0..ent.rows {
            linalg::normalize_in_place(ent.row_mut(i));
        }
    }
    params.constrain();
    Ok(params)
}

impl ModelParams {
    pub fn entity_tensor(&self) -> &Tensor {
        &self.tensors[0]
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    fn check_ids(&self, h: usize, r: usize, t: usize) -> Result<()> {
        for id in [h, t] {
            if id >= self.num_entities {
                return Err(Error::IdOutOfRange {
                    what: "entity",
                    id,
                    size: self.num_entities,
                });
            }
        }
        if r >= self.num_relations {
            return Err(Error::IdOutOfRange {
                what: "relation",
                id: r,
                size: self.num_relations,
            });
        }
        Ok(())
    }

    pub fn score(&self, h: usize, r: usize, t: usize) -> Result<f64> {
        self.check_ids(h, r, t)?;
        Ok(self.score_unchecked(h, r, t))
    }

    pub(crate) fn score_unchecked(&self, h: usize, r: usize, t: usize) -> f64 {
        match self.kind {
            ModelKind::TransE => translational::transe_score(self, h, r, t),
            ModelKind::TransH => translational::transh_score(self, h, r, t),
            ModelKind::TransR => translational::transr_score(self, h, r, t),
            ModelKind::TransD => translational::transd_score(self, h, r, t),
            ModelKind::TransF => translational::transf_score(self, h, r, t),
            ModelKind::SE => translational::se_score(self, h, r, t),
            ModelKind::MuRE => translational::mure_score(self, h, r, t),
            ModelKind::DistMult => bilinear::distmult_score(self, h, r, t),
            ModelKind::ComplEx => bilinear::complex_score(self, h, r, t),
            ModelKind::HolE => bilinear::hole_score(self, h, r, t),
            ModelKind::SimplE => bilinear::simple_score(self, h, r, t),
            ModelKind::CrossE => bilinear::crosse_score(self, h, r, t),
            ModelKind::RotatE => rotational::rotate_score(self, h, r, t),
            ModelKind::QuatE => rotational::quate_score(self, h, r, t),
            ModelKind::BoxE => boxe::score(self, h, r, t),
        }
    }

    /// Analytic gradient of the score with respect to every parameter row the
    /// triple touches. Rows shared by head and tail (self-loops) are summed.
    pub fn grad(&self, h: usize, r: usize, t: usize) -> Result<Gradient> {
        self.check_ids(h, r, t)?;
        let mut g = Gradient::default();
        self.grad_into(h, r, t, 1.0, &mut g);
        Ok(g)
    }

    /// Accumulates `scale * ∇score(h, r, t)` into `g`.
    pub(crate) fn grad_into(&self, h: usize, r: usize, t: usize, scale: f64, g: &mut Gradient) {
        match self.kind {
            ModelKind::TransE => translational::transe_grad(self, h, r, t, scale, g),
            ModelKind::TransH => translational::transh_grad(self, h, r, t, scale, g),
            ModelKind::TransR => translational::transr_grad(self, h, r, t, scale, g),
            ModelKind::TransD => translational::transd_grad(self, h, r, t, scale, g),
            ModelKind::TransF => translational::transf_grad(self, h, r, t, scale, g),
            ModelKind::SE => translational::se_grad(self, h, r, t, scale, g),
            ModelKind::MuRE => translational::mure_grad(self, h, r, t, scale, g),
            ModelKind::DistMult => bilinear::distmult_grad(self, h, r, t, scale, g),
            ModelKind::ComplEx => bilinear::complex_grad(self, h, r, t, scale, g),
            ModelKind::HolE => bilinear::hole_grad(self, h, r, t, scale, g),
            ModelKind::SimplE => bilinear::simple_grad(self, h, r, t, scale, g),
            ModelKind::CrossE => bilinear::crosse_grad(self, h, r, t, scale, g),
            ModelKind::RotatE => rotational::rotate_grad(self, h, r, t, scale, g),
            ModelKind::QuatE => rotational::quate_grad(self, h, r, t, scale, g),
            ModelKind::BoxE => boxe::grad(self, h, r, t, scale, g),
        }
    }

    /// In-place projection onto each model's constraint set.
    pub fn constrain(&mut self) {
        if self.kind.bounds_entities() {
            clip_rows(&mut self.tensors[0], 1.0);
        }
        // Norm bounds from the original model definitions; without them the
        // squared-distance models blow up under summed batch gradients.
        match self.kind {
            ModelKind::TransR => {
                clip_rows(&mut self.tensors[1], 1.0);
                // Frobenius norm ≤ 1 implies ‖M_r e‖ ≤ ‖e‖ ≤ 1.
                clip_rows(&mut self.tensors[2], 1.0);
            }
            ModelKind::TransD => {
                for k in 1..4 {
                    clip_rows(&mut self.tensors[k], 1.0);
                }
                self.clip_transd_projections();
            }
            ModelKind::MuRE => {
                clip_rows(&mut self.tensors[0], 1.0);
                clip_rows(&mut self.tensors[3], 1.0);
            }
            ModelKind::TransH => {
                let normals = &mut self.tensors[2];
                for i in 0..normals.rows {
                    let row = normals.row_mut(i);
                    if !linalg::normalize_in_place(row) {
                        row.fill(0.0);
                        row[0] = 1.0;
                    }
                }
            }
            ModelKind::RotatE => {
                for v in &mut self.tensors[1].data {
                    *v = wrap_angle(*v);
                }
            }
            ModelKind::BoxE => {
                for (lo, hi) in [(2, 3), (4, 5)] {
                    let (left, right) = self.tensors.split_at_mut(hi);
                    for (l, u) in left[lo].data.iter_mut().zip(right[0].data.iter_mut()) {
                        if *l > *u {
                            std::mem::swap(l, u);
                        }
                    }
                }
            }
            _ => {}
        }
    }

    /// Scales each entity row so that its projection `h + (h_pᵀh) r_p` has
    /// norm at most 1 under every relation. The projection is linear in `h`,
    /// so dividing `h` by the largest projected norm is enough.
    fn clip_transd_projections(&mut self) {
        let (ent, rest) = self.tensors.split_at_mut(1);
        let (ent_proj, rel_proj) = (&rest[0], &rest[2]);
        for i in 0..ent[0].rows {
            let h = ent[0].row(i);
            let s = linalg::dot(ent_proj.row(i), h);
            let hh = linalg::dot(h, h);
            let mut worst: f64 = 0.0;
            for r in 0..rel_proj.rows {
                let rp = rel_proj.row(r);
                let sq = hh + 2.0 * s * linalg::dot(h, rp) + s * s * linalg::dot(rp, rp);
                worst = worst.max(sq.max(0.0).sqrt());
            }
            if worst > 1.0 {
                ent[0].row_mut(i).iter_mut().for_each(|v| *v /= worst);
            }
        }
    }

    /// Applies `params[tensor][row] -= lr * values` for every gradient part.
    pub fn apply_descent(&mut self, g: &Gradient, lr: f64) {
        for part in &g.parts {
            let row = self.tensors[part.tensor].row_mut(part.row);
            for (p, v) in row.iter_mut().zip(&part.values) {
                *p -= lr * v;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.tensors
            .iter()
            .all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }
}

/// Scales every row of `t` whose L2 norm exceeds `max` back onto the ball.
fn clip_rows(t: &mut Tensor, max: f64) {
    for i in 0..t.rows {
        let row = t.row_mut(i);
        let n = linalg::norm(row);
        if n > max {
            row.iter_mut().for_each(|v| *v *= max / n);
        }
    }
}

/// Maps an angle into `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let wrapped = theta - TAU * ((theta + PI) / TAU).floor();
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn parse_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
            assert_eq!(k.name().to_lowercase().parse::<ModelKind>().unwrap(), k);
        }
        let err = "ConvE".parse::<ModelKind>().unwrap_err().to_string();
        assert!(err.contains("transe") && err.contains("crosse"));
        assert!("CompGCN".parse::<ModelKind>().is_err());
    }

    #[test]
    fn transe_shapes_and_unit_entities() {
        let p = init_params(ModelKind::TransE, 10, 2, 4, &mut rng()).unwrap();
        assert_eq!((p.tensors[0].rows, p.tensors[0].cols), (10, 4));
        assert_eq!((p.tensors[1].rows, p.tensors[1].cols), (2, 4));
        for i in 0..10 {
            assert!((linalg::norm(p.tensors[0].row(i)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rotate_shapes_and_unit_moduli() {
        let p = init_params(ModelKind::RotatE, 10, 2, 4, &mut rng()).unwrap();
        assert_eq!((p.tensors[0].rows, p.tensors[0].cols), (10, 8));
        assert_eq!((p.tensors[1].rows, p.tensors[1].cols), (2, 4));
        for &theta in &p.tensors[1].data {
            let modulus = (theta.cos().powi(2) + theta.sin().powi(2)).sqrt();
            assert!((modulus - 1.0).abs() < 1e-9);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&theta));
        }
    }

    #[test]
    fn dimension_multiples() {
        for (kind, bad) in [
            (ModelKind::ComplEx, 3),
            (ModelKind::SimplE, 5),
            (ModelKind::QuatE, 6),
            (ModelKind::TransE, 0),
        ] {
            match init_params(kind, 3, 1, bad, &mut rng()) {
                Err(Error::Dimension { multiple, .. }) => {
                    assert_eq!(multiple, kind.dim_multiple().max(1))
                }
                other => panic!("{kind}: expected dimension error, got {other:?}"),
            }
        }
    }

    #[test]
    fn init_is_reproducible() {
        for kind in ModelKind::ALL {
            let a = init_params(kind, 5, 3, 8, &mut rng()).unwrap();
            let b = init_params(kind, 5, 3, 8, &mut rng()).unwrap();
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn projection_examples() {
        let mut p = init_params(ModelKind::TransE, 2, 1, 2, &mut rng()).unwrap();
        p.tensors[0].row_mut(0).copy_from_slice(&[3.0 * 0.6, 3.0 * 0.8]);
        p.constrain();
        let row = p.tensors[0].row(0);
        assert!((row[0] - 0.6).abs() < 1e-12 && (row[1] - 0.8).abs() < 1e-12);

        assert!((wrap_angle(3.0 * std::f64::consts::PI) + std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
        let w = wrap_angle(7.0);
        assert!((w.cos() - 7.0f64.cos()).abs() < 1e-12 && (w.sin() - 7.0f64.sin()).abs() < 1e-12);

        let mut b = init_params(ModelKind::BoxE, 2, 1, 1, &mut rng()).unwrap();
        b.tensors[2].data[0] = 2.0;
        b.tensors[3].data[0] = 1.0;
        b.constrain();
        assert_eq!((b.tensors[2].data[0], b.tensors[3].data[0]), (1.0, 2.0));
    }

    #[test]
    fn out_of_range_ids() {
        let p = init_params(ModelKind::DistMult, 3, 1, 4, &mut rng()).unwrap();
        assert!(p.score(3, 0, 0).is_err());
        assert!(p.score(0, 1, 0).is_err());
        assert!(p.grad(0, 0, 5).is_err());
        assert!(p.score(2, 0, 2).is_ok());
    }

    #[test]
    fn score_is_pure() {
        for kind in ModelKind::ALL {
            let p = init_params(kind, 4, 2, 8, &mut rng()).unwrap();
            let before = p.clone();
            let a = p.score(0, 1, 2).unwrap();
            let _ = p.grad(0, 1, 2).unwrap();
            assert_eq!(a.to_bits(), p.score(0, 1, 2).unwrap().to_bits());
            assert_eq!(p, before);
        }
    }

    #[test]
    fn squared_distance_models_stay_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [ModelKind::TransR, ModelKind::TransD, ModelKind::MuRE] {
            let mut p = init_params(kind, 6, 3, 8, &mut rng).unwrap();
            for t in &mut p.tensors {
                t.data.iter_mut().for_each(|v| *v *= 50.0);
            }
            p.constrain();
            let ent = p.entity_tensor();
            for i in 0..ent.rows {
                assert!(linalg::norm(ent.row(i)) <= 1.0 + 1e-9, "{kind}");
            }
            if kind == ModelKind::TransD {
                for i in 0..6 {
                    for r in 0..3 {
                        let h = p.tensors[0].row(i);
                        let s = linalg::dot(p.tensors[1].row(i), h);
                        let proj: Vec<f64> = h
                            .iter()
                            .zip(p.tensors[3].row(r))
                            .map(|(a, b)| a + s * b)
                            .collect();
                        assert!(linalg::norm(&proj) <= 1.0 + 1e-9);
                    }
                }
            }
            if kind == ModelKind::TransR {
                for r in 0..3 {
                    assert!(linalg::norm(p.tensors[2].row(r)) <= 1.0 + 1e-9);
                }
            }
        }
    }
}
