//! Exact sector data and quasimap I-functions for toric Deligne-Mumford
//! stacks presented as GIT quotients.
//!
//! Given an integer charge matrix and a stability character, the library
//! computes the stability combinatorics of the quotient, its inertia
//! sectors with ages, the degree-truncated cohomology ring of every
//! sector, and the closed-form localization-residue series: the small
//! I-function, its exponential big dressing, the Givental specialization,
//! and the Euler-twisted variant. All coefficients are exact rationals.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod classes;
pub mod cohomology;
pub mod error;
pub mod exactmath;
pub mod model;
pub mod output;
pub mod sectors;
pub mod selfcheck;
pub mod series;
pub mod zlaurent;

pub use analysis::Analysis;
pub use classes::{CurveClass, LoopSpaceDims, SemipositivityReport};
pub use cohomology::{RingElement, SectorRing};
pub use error::{Error, Result};
pub use exactmath::{IntMatrix, Rat};
pub use model::{GitPresentation, ModelFile, StabilityReport};
pub use sectors::SectorLabel;
pub use series::{BigISeries, Flavor, ISeries, MirrorData, TInsertion, TwistData, ZWindow};
pub use zlaurent::ZLaurent;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::model::{GitPresentation, ModelFile};

    pub(crate) fn model(name: &str, charges: &[Vec<i64>], theta: &[i64]) -> GitPresentation {
        let doc = ModelFile {
            name: name.into(),
            n_rays: charges[0].len(),
            rank: charges.len(),
            charges: charges.to_vec(),
            theta: theta.to_vec(),
            ray_names: None,
        };
        GitPresentation::from_file(&doc).unwrap()
    }

    /// The valid test models (stability holds on all of them). The last
    /// two exercise rank 2, where the charge blocks of the fixed points
    /// are not symmetric.
    pub(crate) fn corpus() -> Vec<GitPresentation> {
        vec![
            model("p1", &[vec![1, 1]], &[1]),
            model("p2", &[vec![1, 1, 1]], &[1]),
            model("p3", &[vec![1, 1, 1, 1]], &[1]),
            model("p4", &[vec![1, 1, 1, 1, 1]], &[1]),
            model("wp_1_2", &[vec![1, 2]], &[1]),
            model("wp_1_1_2", &[vec![1, 1, 2]], &[1]),
            model("local_p2", &[vec![1, 1, 1, -3]], &[1]),
            model("conifold", &[vec![1, 1, -1, -1]], &[1]),
            model("f1", &[vec![1, 1, 0, -1], vec![0, 0, 1, 1]], &[1, 1]),
            model("stacky_rank2", &[vec![1, 1, 0], vec![0, 1, 2]], &[1, 2]),
        ]
    }
}
