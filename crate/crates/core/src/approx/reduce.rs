//! Reduction to a hypersurface: proper position, a separating linear form, the
//! optimal polynomial of the image and descent while its discriminant vanishes
//! on the jet.

use crate::elim::VarietySpec;
use crate::genericity::{choose_linear_form, find_proper_position, ChangeRecord, ChangeScope};
use crate::jet::{eval_poly_at_jets_like, Jet};
use crate::poly::{GaussRat, MultiPoly, UniOverPoly};

use super::{ApproxConfig, ApproxError, AtStage, Stage};

/// Outcome of the reduction, everything in working coordinates (`old = M·new`).
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// The variety after the composed change and all descents.
    pub variety: VarietySpec,
    /// Composed ambient change.
    pub change: ChangeRecord,
    /// Linear form on the fiber coordinates.
    pub form: Vec<GaussRat>,
    pub fiber_count: usize,
    /// `P_L` in the base coordinates and `z` (last).
    pub optimal: UniOverPoly,
    /// Discriminant of `P_L`, in the same variables, free of `z`.
    pub discriminant: MultiPoly,
    /// Ambient jets in working coordinates.
    pub jets: Vec<Jet>,
    pub descents: Vec<MultiPoly>,
}

impl Reduction {
    pub fn base_dim(&self) -> usize {
        self.variety.base_count()
    }

    pub fn fiber_dim(&self) -> usize {
        self.variety.fiber_count()
    }

    /// `L` applied to the fiber jets; the zero jet when there are no fiber coordinates.
    pub fn form_value(&self) -> Jet {
        form_value(&self.form, &self.jets[self.base_dim()..], &self.jets[0])
    }
}

pub(crate) fn form_value(form: &[GaussRat], fiber: &[Jet], shape: &Jet) -> Jet {
    let mut acc = Jet::zero(shape.nvars(), shape.order(), shape.ctx());
    acc.set_valid_order(shape.valid_order());
    for (c, j) in form.iter().zip(fiber) {
        acc = &acc + &j.scale_gauss(c);
    }
    acc
}

/// Moves `variety` into proper position, chooses `L` and descends along
/// `R_L = 0` until `R_L` does not vanish on the base jets. Coordinates below
/// `keep` are never changed; descending below them is an error.
pub fn reduce_to_hypersurface(
    variety: &VarietySpec,
    jets: &[Jet],
    cfg: &ApproxConfig,
    depth: usize,
    keep: usize,
) -> Result<Reduction, ApproxError> {
    let stage = Stage::Reduction;
    let mut v = variety.clone();
    let mut jets = jets.to_vec();
    let mut change = ChangeRecord::identity(v.nvars(), ChangeScope::Ambient, cfg.seed);
    let mut descents = Vec::new();
    for round in 0u64.. {
        let m = v.base_count();
        if m < keep {
            return Err(ApproxError::at(stage, depth, "dimension exhausted: descent would move a source coordinate"));
        }
        let seed = cfg.seed.wrapping_add(round);
        let (rec, moved) = find_proper_position(&v, seed, cfg.max_tries, keep).at(stage, depth)?;
        if !rec.is_identity() {
            jets = rec.forward_values(&jets);
            change = change.then(&rec).at(stage, depth)?;
        }
        let choice = choose_linear_form(&moved, seed, cfg.max_tries).at(stage, depth)?;
        let optimal = crate::elim::optimal_polynomial(&moved, &choice.form).at(stage, depth)?;
        let disc = optimal.discriminant().at(stage, depth)?;
        let on_base = disc.remap(m, &(0..m).chain(std::iter::once(0)).collect::<Vec<_>>());
        let value = eval_poly_at_jets_like(&on_base, &jets[..m], &jets[0]);
        let valid = jets.iter().map(|j| j.valid_order()).min().unwrap_or(0);
        if value.max_abs_upto(valid) > cfg.tolerance {
            return Ok(Reduction {
                variety: moved,
                change,
                form: choice.form,
                fiber_count: choice.fiber_count,
                optimal,
                discriminant: disc,
                jets,
                descents,
            });
        }
        if m == 0 || m - 1 < keep {
            return Err(ApproxError::at(
                stage,
                depth,
                "dimension exhausted: the discriminant vanishes on the jet at every level",
            ));
        }
        let ambient: Vec<usize> = (0..m).chain(std::iter::once(0)).collect();
        let extra = disc.remap(moved.nvars(), &ambient);
        descents.push(extra.clone());
        v = moved.descend(extra).at(stage, depth)?;
    }
    unreachable!("the descent loop returns")
}
