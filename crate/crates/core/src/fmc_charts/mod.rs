//! Charts of the compactified configuration space near a limit
//! configuration, indexed by nested collapse trees.

pub mod field;
pub mod finite;
pub mod infinity;
pub mod sample;
pub mod tree;

use rayon::prelude::*;
use serde::Serialize;

pub use finite::{
    chart_xi, check_conditions, realized_points, retraction_r, v_vectors, ConditionResiduals,
    FiniteChart, FiniteChartPoint, FiniteConfigPoint,
};
pub use infinity::{
    chart_xi_infty, check_conditions_infty, realized_points_infty, retraction_r_infty,
    retraction_r_infty_traced, InfinityChart, InfinityChartPoint, InfinityConfigPoint, NuBranch,
};
pub use tree::{validate_tree, NestedTree, Tree, Validation, Variant};

use crate::error::Result;
use crate::rng;

/// Lower bound on `‖v_A‖` (and `‖w̃_A‖`, `‖s̃_i‖`) accepted by `ξ`.
pub const MIN_NORM: f64 = 0.1;
/// Lower bound on the distance between values on different children.
pub const MIN_SEPARATION: f64 = 0.05;

pub fn codim(tree: &Tree) -> usize {
    tree.codim()
}

/// Summary of a randomized round-trip sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub variant: Variant,
    pub seed: u64,
    pub instances: usize,
    /// `max ‖r(ξ(P)) − P‖`.
    pub max_residual: f64,
    pub max_c1: f64,
    pub max_c2: f64,
    pub min_multiple: f64,
    /// Largest codimension met, and whether it always matched the number of
    /// scale parameters of the chart point.
    pub max_codim: usize,
    pub codim_consistent: bool,
    /// Number of times each case of the `ν_i` formula was used.
    pub nu_branches: std::collections::BTreeMap<String, usize>,
}

struct Instance {
    residual: f64,
    cond: ConditionResiduals,
    codim: usize,
    scales: usize,
    branches: Vec<NuBranch>,
}

fn run_instance(seed: u64, k: u64, variant: Variant) -> Result<Instance> {
    let mut r = rng::stream(seed, k);
    let t = sample::random_tree(&mut r, variant);
    match variant {
        Variant::Finite => {
            let p = sample::random_finite_point(&mut r, &t);
            let q = chart_xi(&t, &p)?;
            let back = retraction_r(&t, &q)?;
            Ok(Instance {
                residual: back.distance(&p),
                cond: check_conditions(&t, &q)?,
                codim: t.codim(),
                scales: p.mu.len(),
                branches: Vec::new(),
            })
        }
        Variant::Infinity => {
            let p = sample::random_infinity_point(&mut r, &t);
            let q = chart_xi_infty(&t, &p)?;
            let (back, branches) = retraction_r_infty_traced(&t, &q)?;
            Ok(Instance {
                residual: back.distance(&p),
                cond: check_conditions_infty(&t, &q)?,
                codim: t.codim(),
                scales: p.nu.len() + p.mu.len(),
                branches,
            })
        }
    }
}

/// `instances` random trees and admissible points; instance `k` uses the
/// random stream `k` of `seed`.
pub fn roundtrip_sweep(seed: u64, instances: usize, variant: Variant) -> Result<RoundTripReport> {
    let results: Vec<Result<Instance>> = (0..instances as u64)
        .into_par_iter()
        .map(|k| run_instance(seed, k, variant))
        .collect();
    let mut rep = RoundTripReport {
        variant,
        seed,
        instances,
        max_residual: 0.0,
        max_c1: 0.0,
        max_c2: 0.0,
        min_multiple: f64::INFINITY,
        max_codim: 0,
        codim_consistent: true,
        nu_branches: Default::default(),
    };
    for r in results {
        let i = r?;
        rep.max_residual = rep.max_residual.max(i.residual);
        rep.max_c1 = rep.max_c1.max(i.cond.c1);
        rep.max_c2 = rep.max_c2.max(i.cond.c2);
        rep.min_multiple = rep.min_multiple.min(i.cond.min_multiple);
        rep.max_codim = rep.max_codim.max(i.codim);
        rep.codim_consistent &= i.codim == i.scales;
        for b in i.branches {
            *rep.nu_branches.entry(format!("{b:?}")).or_default() += 1;
        }
    }
    Ok(rep)
}
