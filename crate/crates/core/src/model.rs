//! GIT presentation of the target: `W = C^N` with `G = (C^*)^r` acting
//! through an integer charge matrix, plus a stability character.
//!
//! Everything downstream hangs off the combinatorics computed here: which
//! r-subsets of rays carry the stability character (the torus-fixed points),
//! whether semistable equals stable, the global denominator bound `e`, and
//! the Stanley-Reisner generators of each semistable support.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{
    cone_contains, rational::lcm_big, smith_normal_form, solve_square, IntMatrix, Rat,
};

/// On-disk model document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub n_rays: usize,
    pub rank: usize,
    /// `rank` rows by `n_rays` columns; column `rho` is the character of the
    /// coordinate line bundle `L_rho`.
    pub charges: Vec<Vec<i64>>,
    pub theta: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_names: Option<Vec<String>>,
}

/// Validated triple `(W, G, theta)`.
#[derive(Clone, Debug)]
pub struct GitPresentation {
    name: String,
    n_rays: usize,
    rank: usize,
    charges: IntMatrix,
    theta: Vec<BigInt>,
    ray_names: Vec<String>,
}

impl GitPresentation {
    pub fn from_file(doc: &ModelFile) -> Result<Self> {
        if doc.rank == 0 {
            return Err(Error::Model("rank must be positive".into()));
        }
        if doc.n_rays < doc.rank {
            return Err(Error::Model(format!(
                "need at least rank = {} rays, got {}",
                doc.rank, doc.n_rays
            )));
        }
        if doc.charges.len() != doc.rank {
            return Err(Error::Model(format!(
                "charge matrix has {} rows, expected rank = {}",
                doc.charges.len(),
                doc.rank
            )));
        }
        if doc.charges.iter().any(|row| row.len() != doc.n_rays) {
            return Err(Error::Model(format!(
                "every charge row must have n_rays = {} entries",
                doc.n_rays
            )));
        }
        if doc.theta.len() != doc.rank {
            return Err(Error::Model(format!(
                "theta has {} entries, expected rank = {}",
                doc.theta.len(),
                doc.rank
            )));
        }
        let charges =
            IntMatrix::from_rows(&doc.charges).map_err(|e| Error::Model(e.to_string()))?;
        if charges.rank() < doc.rank {
            return Err(Error::Model(format!(
                "charge matrix has rank {} < {}; the torus does not act faithfully enough",
                charges.rank(),
                doc.rank
            )));
        }
        if doc.theta.iter().all(|&t| t == 0) {
            return Err(Error::Model("theta must be nonzero".into()));
        }
        let ray_names = match &doc.ray_names {
            Some(names) => {
                if names.len() != doc.n_rays {
                    return Err(Error::Model("ray_names length must equal n_rays".into()));
                }
                names.clone()
            }
            None => (0..doc.n_rays).map(|i| format!("x{i}")).collect(),
        };
        Ok(GitPresentation {
            name: doc.name.clone(),
            n_rays: doc.n_rays,
            rank: doc.rank,
            charges,
            theta: doc.theta.iter().map(|&t| BigInt::from(t)).collect(),
            ray_names,
        })
    }

    pub fn load(json: &str) -> Result<Self> {
        let doc: ModelFile = serde_json::from_str(json)
            .map_err(|e| Error::Model(format!("malformed model: {e}")))?;
        Self::from_file(&doc)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rays(&self) -> usize {
        self.n_rays
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn charges(&self) -> &IntMatrix {
        &self.charges
    }

    pub fn charge(&self, i: usize, rho: usize) -> &BigInt {
        &self.charges[(i, rho)]
    }

    pub fn theta(&self) -> &[BigInt] {
        &self.theta
    }

    pub fn ray_name(&self, rho: usize) -> &str {
        &self.ray_names[rho]
    }

    /// Dimension of the quotient stack, `N - r`.
    pub fn dim(&self) -> i64 {
        self.n_rays as i64 - self.rank as i64
    }

    fn theta_rat(&self) -> Vec<Rat> {
        self.theta
            .iter()
            .map(|t| Rat::from_integer(t.clone()))
            .collect()
    }

    fn columns_rat(&self, support: &[usize]) -> Vec<Vec<Rat>> {
        support
            .iter()
            .map(|&rho| {
                (0..self.rank)
                    .map(|i| Rat::from_integer(self.charges[(i, rho)].clone()))
                    .collect()
            })
            .collect()
    }

    /// Is `theta` in the cone of the charges indexed by `support`?
    pub fn support_semistable(&self, support: &[usize]) -> Result<bool> {
        Ok(cone_contains(&self.columns_rat(support), &self.theta_rat())?.is_inside())
    }

    /// True when the coarse space is proper, i.e. the only invariant
    /// functions are constants: no nonzero lattice direction `x >= 0` with
    /// `A x = 0`.
    pub fn coarse_space_proper(&self) -> Result<bool> {
        // Feasibility of {A x = 0, sum x = 1, x >= 0} as cone membership:
        // is (0, .., 0, 1) in the cone of the columns of A stacked over 1?
        let gens: Vec<Vec<Rat>> = (0..self.n_rays)
            .map(|rho| {
                (0..self.rank)
                    .map(|i| Rat::from_integer(self.charges[(i, rho)].clone()))
                    .chain(std::iter::once(Rat::one()))
                    .collect()
            })
            .collect();
        let mut target = vec![Rat::zero(); self.rank];
        target.push(Rat::one());
        Ok(!cone_contains(&gens, &target)?.is_inside())
    }
}

/// An r-subset of rays whose charges span a full-rank cone containing
/// `theta`: a torus-fixed point of the coarse space.
#[derive(Clone, Debug)]
pub struct FixedPointSubset {
    /// Ray indices, strictly increasing.
    pub sigma: Vec<usize>,
    /// The unique coefficients with `theta = sum c_rho A_rho`; nonnegative,
    /// and strictly positive whenever semistable = stable.
    pub coefficients: Vec<Rat>,
    /// `|det A_sigma|`, the order of the stabilizer at this point.
    pub stab_order: BigInt,
    /// Largest elementary divisor of `A_sigma`, the stabilizer's exponent.
    pub stab_exponent: BigInt,
}

/// Outcome of the stability analysis.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub ss_equals_s: bool,
    pub fixed_subsets: Vec<FixedPointSubset>,
    /// lcm of stabilizer exponents; bounds class denominators. Only
    /// meaningful when `ss_equals_s` holds and `fixed_subsets` is nonempty.
    pub exponent_e: BigInt,
    /// On failure: an independent subset of size < r whose cone contains
    /// theta.
    pub witness: Option<Vec<usize>>,
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let needed = k - current.len();
        for i in start..=n.saturating_sub(needed) {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut current, &mut out);
    }
    out
}

/// All r-subsets sigma with `det A_sigma != 0` and `theta` in the cone of
/// `A_sigma`, in lexicographic order.
pub fn fixed_point_subsets(p: &GitPresentation) -> Result<Vec<FixedPointSubset>> {
    let r = p.rank();
    let theta: Vec<Rat> = p
        .theta()
        .iter()
        .map(|t| Rat::from_integer(t.clone()))
        .collect();
    let mut out = Vec::new();
    for sigma in subsets_of_size(p.n_rays(), r) {
        let a_sigma = p.charges().select_columns(&sigma);
        let Some(c) = solve_square(&a_sigma, &theta) else {
            continue;
        };
        if c.iter().any(|x| x.is_negative()) {
            continue;
        }
        let snf = smith_normal_form(&a_sigma);
        out.push(FixedPointSubset {
            sigma,
            coefficients: c,
            stab_order: snf.diagonal_product(),
            stab_exponent: snf.largest_divisor(),
        });
    }
    Ok(out)
}

/// Certifies `W^ss(theta) = W^s(theta)` by checking that every linearly
/// independent ray subset whose cone contains `theta` has full size `r`.
/// By Caratheodory this is equivalent to every semistable support having
/// full-rank charge span.
pub fn check_ss_equals_s(p: &GitPresentation) -> Result<StabilityReport> {
    let r = p.rank();
    for k in 1..r {
        for subset in subsets_of_size(p.n_rays(), k) {
            let a_sub = p.charges().select_columns(&subset);
            if a_sub.rank() < k {
                continue;
            }
            if p.support_semistable(&subset)? {
                return Ok(StabilityReport {
                    ss_equals_s: false,
                    fixed_subsets: fixed_point_subsets(p)?,
                    exponent_e: BigInt::one(),
                    witness: Some(subset),
                });
            }
        }
    }
    let fixed_subsets = fixed_point_subsets(p)?;
    let exponent_e = fixed_subsets
        .iter()
        .fold(BigInt::one(), |acc, f| lcm_big(&acc, &f.stab_exponent));
    Ok(StabilityReport {
        ss_equals_s: true,
        fixed_subsets,
        exponent_e,
        witness: None,
    })
}

/// The global denominator bound: lcm of stabilizer exponents over the
/// fixed-point subsets. Requires semistable = stable.
pub fn exponent_lcm_e(p: &GitPresentation) -> Result<BigInt> {
    let report = check_ss_equals_s(p)?;
    if !report.ss_equals_s {
        return Err(Error::Precondition(format!(
            "semistable != stable (witness rays {:?})",
            report.witness.unwrap_or_default()
        )));
    }
    if report.fixed_subsets.is_empty() {
        return Err(Error::EmptySemistableLocus);
    }
    Ok(report.exponent_e)
}

/// Inclusion-minimal subsets `B` of a semistable support `S` such that
/// removing `B` from `S` destroys semistability. The products
/// `prod_{rho in B} D_rho` generate the Stanley-Reisner ideal of the sector
/// with support `S`.
pub fn sr_generators(p: &GitPresentation, support: &[usize]) -> Result<Vec<Vec<usize>>> {
    if !p.support_semistable(support)? {
        return Err(Error::Precondition(format!(
            "support {support:?} is not semistable"
        )));
    }
    let mut minimal: Vec<Vec<usize>> = Vec::new();
    for size in 1..=support.len() {
        for idx in subsets_of_size(support.len(), size) {
            let b: Vec<usize> = idx.iter().map(|&i| support[i]).collect();
            // Killing theta is upward-closed in B, so supersets of a found
            // generator are never minimal.
            if minimal.iter().any(|m| m.iter().all(|x| b.contains(x))) {
                continue;
            }
            let complement: Vec<usize> = support
                .iter()
                .copied()
                .filter(|rho| !b.contains(rho))
                .collect();
            if !p.support_semistable(&complement)? {
                minimal.push(b);
            }
        }
    }
    Ok(minimal)
}

/// Brute-force stability oracle: scans all ray subsets. Exponential; for
/// tests and small models only.
pub fn ss_equals_s_brute_force(p: &GitPresentation) -> Result<bool> {
    for size in 1..=p.n_rays() {
        for subset in subsets_of_size(p.n_rays(), size) {
            if p.support_semistable(&subset)?
                && p.charges().select_columns(&subset).rank() < p.rank()
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
