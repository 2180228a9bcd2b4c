//! Exact cone membership over the rationals.
//!
//! Decides whether a target vector lies in the cone spanned by a finite set
//! of generators, returning a certificate either way: nonnegative
//! coefficients on the inside, a separating linear functional on the
//! outside. Decision by phase-one simplex with Bland's rule on an
//! all-rational tableau; the outside certificate is the Farkas dual read off
//! the artificial columns.

use num_traits::{One, Signed, Zero};

use super::rational::Rat;
use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum ConeDecision {
    /// `target = sum_j coefficients[j] * generators[j]` with all
    /// coefficients nonnegative.
    Inside { coefficients: Vec<Rat> },
    /// `separating . generators[j] >= 0` for every `j` while
    /// `separating . target < 0`.
    Outside { separating: Vec<Rat> },
}

impl ConeDecision {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConeDecision::Inside { .. })
    }
}

pub fn cone_contains(generators: &[Vec<Rat>], target: &[Rat]) -> Result<ConeDecision, Error> {
    let dim = target.len();
    if let Some(bad) = generators.iter().find(|g| g.len() != dim) {
        return Err(Error::Shape(format!(
            "cone generator has dimension {} but target has dimension {}",
            bad.len(),
            dim
        )));
    }
    let n = generators.len();

    // Scale each row so the right-hand side is nonnegative, then start from
    // the all-artificial basis.
    let signs: Vec<Rat> = target
        .iter()
        .map(|t| {
            if t.is_negative() {
                -Rat::one()
            } else {
                Rat::one()
            }
        })
        .collect();
    // tableau[i] = [structural columns | artificial columns | rhs]
    let width = n + dim + 1;
    let mut tab: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            for g in generators {
                row.push(&signs[i] * &g[i]);
            }
            for k in 0..dim {
                row.push(if k == i { Rat::one() } else { Rat::zero() });
            }
            row.push(&signs[i] * &target[i]);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + dim).collect();
    let cost = |col: usize| -> Rat {
        if col >= n {
            Rat::one()
        } else {
            Rat::zero()
        }
    };

    loop {
        // Reduced costs under the phase-one objective (minimize sum of
        // artificials); Bland's rule picks the lowest eligible column.
        let mut entering = None;
        for j in 0..n + dim {
            if basis.contains(&j) {
                continue;
            }
            let mut rc = cost(j);
            for i in 0..dim {
                let sub = cost(basis[i]) * &tab[i][j];
                rc -= sub;
            }
            if rc.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(enter) = entering else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..dim {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            // Phase-one objective is bounded below by zero, so an unbounded
            // pivot column cannot occur.
            return Err(Error::Internal("unbounded phase-one simplex".into()));
        };
        let pivot = tab[leave][enter].clone();
        for j in 0..width {
            tab[leave][j] = &tab[leave][j] / &pivot;
        }
        for i in 0..dim {
            if i != leave && !tab[i][enter].is_zero() {
                let factor = tab[i][enter].clone();
                for j in 0..width {
                    let sub = &factor * &tab[leave][j];
                    tab[i][j] -= sub;
                }
            }
        }
        basis[leave] = enter;
    }

    let objective: Rat = (0..dim).map(|i| cost(basis[i]) * &tab[i][width - 1]).sum();
    if objective.is_zero() {
        let mut coefficients = vec![Rat::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                coefficients[b] = tab[i][width - 1].clone();
            }
        }
        debug_assert!(verify_inside(generators, target, &coefficients));
        Ok(ConeDecision::Inside { coefficients })
    } else {
        // y_i = (cost of basis) . (i-th artificial column); the Farkas
        // functional is -sign_i * y_i in original coordinates.
        let separating: Vec<Rat> = (0..dim)
            .map(|i| {
                let y_i: Rat = (0..dim).map(|k| cost(basis[k]) * &tab[k][n + i]).sum();
                -(&signs[i] * y_i)
            })
            .collect();
        debug_assert!(verify_outside(generators, target, &separating));
        Ok(ConeDecision::Outside { separating })
    }
}

/// Checks an inside certificate exactly.
pub fn verify_inside(generators: &[Vec<Rat>], target: &[Rat], coefficients: &[Rat]) -> bool {
    if coefficients.len() != generators.len() || coefficients.iter().any(|c| c.is_negative()) {
        return false;
    }
    (0..target.len()).all(|i| {
        let combo: Rat = generators
            .iter()
            .zip(coefficients)
            .map(|(g, c)| &g[i] * c)
            .sum();
        combo == target[i]
    })
}

/// Checks an outside certificate exactly.
pub fn verify_outside(generators: &[Vec<Rat>], target: &[Rat], separating: &[Rat]) -> bool {
    let dot = |v: &[Rat]| -> Rat { v.iter().zip(separating).map(|(a, b)| a * b).sum() };
    generators.iter().all(|g| !dot(g).is_negative()) && dot(target).is_negative()
}
