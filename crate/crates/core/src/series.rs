//! The I-function engine.
//!
//! Assembles the localization-residue coefficient of every contributing
//! curve class into exact Laurent data in `z`: the small I-function, its
//! exponential big dressing, the Givental specialization, and the
//! Euler-twisted variant; plus the structural computations the pipeline
//! exposes (two-path residue cross-check, mirror-map extraction, grading
//! audit).
//!
//! For a class with ray pairings `b_rho` the coefficient is
//!
//! ```text
//!   prod_{b_rho < 0} prod_{b_rho <= nu < 0} (D_rho + (b_rho - nu) z)
//!   ---------------------------------------------------------------  1_sector
//!   prod_{b_rho > 0} prod_{0 <= nu < b_rho} (D_rho + (b_rho - nu) z)
//! ```
//!
//! with `nu` running over integers, every divisor restricted into the ring
//! of the receiving sector, and each denominator factor expanded by the
//! nilpotent geometric series. The alternative route through the virtual
//! normal bundle replaces the numerator range by `floor(b_rho + 1) <= nu <
//! 0` and supplies the missing integer factors as bare divisors; both must
//! agree exactly.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::analysis::Analysis;
use crate::classes::{semipositivity_report, CurveClass, SemipositivityReport};
use crate::cohomology::{RingElement, SectorRing};
use crate::error::{Error, Result};
use crate::exactmath::rational::{ceil_int, floor_int, format_rat};
use crate::exactmath::Rat;
use crate::sectors::{sector_of_class, SectorLabel};
use crate::zlaurent::{invert_linear, ZLaurent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Small,
    Big,
    Givental,
    Twisted,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Small => "small",
            Flavor::Big => "big",
            Flavor::Givental => "givental",
            Flavor::Twisted => "twisted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZWindow {
    /// Window wide enough for every populated power; nothing is dropped.
    Auto,
    Explicit {
        z_min: i64,
        z_max: i64,
    },
}

#[derive(Clone, Debug)]
pub struct SeriesTerm {
    pub class: CurveClass,
    pub sector: SectorLabel,
    pub laurent: ZLaurent,
}

#[derive(Clone, Debug)]
pub struct ISeries {
    pub flavor: Flavor,
    pub d_max: Rat,
    pub z_window: (i64, i64),
    pub terms: Vec<SeriesTerm>,
    pub warnings: Vec<String>,
}

/// Integer range `ceil(b) ..= -1` plus, for integer `b`, the endpoint
/// `nu = b` itself: exactly `{nu in Z : b <= nu < 0}`.
fn numerator_range(b: &Rat) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut nu = ceil_int(b);
    let stop = BigInt::from(-1);
    while nu <= stop {
        out.push(nu.clone());
        nu += 1;
    }
    out
}

/// Integer range `floor(b + 1) ..= -1`: the H^1 weight range of the
/// virtual normal bundle, which omits `nu = b` for integer `b`.
fn normal_bundle_range(b: &Rat) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut nu = floor_int(&(b + Rat::one()));
    let stop = BigInt::from(-1);
    while nu <= stop {
        out.push(nu.clone());
        nu += 1;
    }
    out
}

/// Integer range `0 ..= ceil(b) - 1`: exactly `{nu in Z : 0 <= nu < b}`.
fn denominator_range(b: &Rat) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut nu = BigInt::zero();
    let stop = ceil_int(b) - BigInt::one();
    while nu <= stop {
        out.push(nu.clone());
        nu += 1;
    }
    out
}

fn restricted_divisors(ring: &Arc<SectorRing>, n_rays: usize) -> Vec<RingElement> {
    (0..n_rays)
        .map(|rho| RingElement::divisor(ring, rho))
        .collect()
}

/// Product of the inverted denominator factors, shared by both residue
/// routes.
fn denominator_product(
    divisors: &[RingElement],
    beta: &CurveClass,
    ring: &Arc<SectorRing>,
) -> Result<ZLaurent> {
    let mut acc = ZLaurent::one(ring);
    for (rho, d) in divisors.iter().enumerate() {
        let b = beta.ray_pairing(rho);
        if !b.is_positive() {
            continue;
        }
        for nu in denominator_range(b) {
            let c = b - Rat::from_integer(nu);
            // c > 0 here, so the inversion is well-defined.
            acc = acc.mul(&invert_linear(d, &c)?);
        }
    }
    Ok(acc)
}

/// The Laurent coefficient of one class, by the closed residue formula.
fn residue_coefficient(
    divisors: &[RingElement],
    beta: &CurveClass,
    ring: &Arc<SectorRing>,
) -> Result<ZLaurent> {
    let mut acc = denominator_product(divisors, beta, ring)?;
    for (rho, d) in divisors.iter().enumerate() {
        let b = beta.ray_pairing(rho);
        if !b.is_negative() {
            continue;
        }
        for nu in numerator_range(b) {
            let c = b - Rat::from_integer(nu);
            acc = acc.mul(&ZLaurent::linear(d.clone(), &c));
        }
    }
    Ok(acc)
}

/// The same coefficient through the virtual normal bundle: H^1 weight
/// ranges in the numerator, with the integer-negative rays contributing
/// their bare divisor classes from the ambient-sector normal bundle.
fn normal_bundle_coefficient(
    divisors: &[RingElement],
    beta: &CurveClass,
    ring: &Arc<SectorRing>,
) -> Result<ZLaurent> {
    let mut acc = denominator_product(divisors, beta, ring)?;
    for (rho, d) in divisors.iter().enumerate() {
        let b = beta.ray_pairing(rho);
        if !b.is_negative() {
            continue;
        }
        for nu in normal_bundle_range(b) {
            let c = b - Rat::from_integer(nu);
            acc = acc.mul(&ZLaurent::linear(d.clone(), &c));
        }
        if b.is_integer() {
            acc = acc.mul_ring(d);
        }
    }
    Ok(acc)
}

fn class_label(beta: &CurveClass) -> String {
    let parts: Vec<String> = beta.components().iter().map(format_rat).collect();
    format!("({})", parts.join(", "))
}

fn compute_term(analysis: &Analysis, beta: &CurveClass) -> Result<SeriesTerm> {
    let sector = sector_of_class(analysis.presentation(), beta);
    let ring = analysis.ring(&sector)?;
    let divisors = restricted_divisors(ring, analysis.presentation().n_rays());
    let laurent = residue_coefficient(&divisors, beta, ring)?;
    Ok(SeriesTerm {
        class: beta.clone(),
        sector,
        laurent,
    })
}

fn apply_window(
    terms: &mut [SeriesTerm],
    window: ZWindow,
    warnings: &mut Vec<String>,
) -> (i64, i64) {
    match window {
        ZWindow::Auto => {
            let mut lo = 0i64;
            let mut hi = 0i64;
            for t in terms.iter() {
                if let Some((a, b)) = t.laurent.support_range() {
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
            }
            (lo, hi)
        }
        ZWindow::Explicit { z_min, z_max } => {
            for t in terms.iter_mut() {
                let (kept, dropped) = t.laurent.clip(z_min, z_max);
                if !dropped.is_empty() {
                    warnings.push(format!(
                        "window [{z_min}, {z_max}] drops z powers {:?} from the term at beta = {}",
                        dropped,
                        class_label(&t.class)
                    ));
                }
                t.laurent = kept;
            }
            (z_min, z_max)
        }
    }
}

fn flag_warnings(terms: &[SeriesTerm], warnings: &mut Vec<String>) {
    for t in terms {
        if t.laurent.flagged() {
            warnings.push(format!(
                "ring truncation may have dropped content in the term at beta = {}",
                class_label(&t.class)
            ));
        }
    }
}

/// The small I-function up to degree `d_max`.
pub fn small_i(analysis: &Analysis, d_max: &Rat, window: ZWindow) -> Result<ISeries> {
    let classes = analysis.effective_classes(d_max)?;
    let mut terms: Vec<SeriesTerm> = classes
        .par_iter()
        .map(|beta| compute_term(analysis, beta))
        .collect::<Result<Vec<_>>>()?;

    // The degree-zero term must be exactly the fundamental class.
    let zero_term = terms
        .iter()
        .find(|t| t.class.is_zero())
        .ok_or_else(|| Error::Internal("class enumeration lost beta = 0".into()))?;
    let ring = analysis.ring(&zero_term.sector)?;
    if zero_term.laurent != ZLaurent::one(ring) {
        return Err(Error::Internal(
            "the beta = 0 coefficient is not the fundamental class".into(),
        ));
    }

    let mut warnings = Vec::new();
    flag_warnings(&terms, &mut warnings);
    let z_window = apply_window(&mut terms, window, &mut warnings);
    Ok(ISeries {
        flavor: Flavor::Small,
        d_max: d_max.clone(),
        z_window,
        terms,
        warnings,
    })
}

/// Exact equality of the residue formula against the virtual-normal-bundle
/// route for one class.
pub fn residue_two_path_check(analysis: &Analysis, beta: &CurveClass) -> Result<()> {
    if !crate::classes::f_beta_nonempty(analysis.presentation(), beta)? {
        return Err(Error::Precondition(format!(
            "class {} has empty fixed locus",
            class_label(beta)
        )));
    }
    let sector = sector_of_class(analysis.presentation(), beta);
    let ring = analysis.ring(&sector)?;
    let divisors = restricted_divisors(ring, analysis.presentation().n_rays());
    let direct = residue_coefficient(&divisors, beta, ring)?;
    let via_normal = normal_bundle_coefficient(&divisors, beta, ring)?;
    if direct != via_normal {
        return Err(Error::Check(format!(
            "two-path residue mismatch at beta = {}",
            class_label(beta)
        )));
    }
    Ok(())
}

/// Split-bundle twist data: characters of the summands.
#[derive(Clone, Debug)]
pub struct TwistData {
    pub characters: Vec<Vec<BigInt>>,
}

/// Euler-twisted small I-function: each nonzero class picks up the section
/// weights of the twisting bundle as extra numerator factors
/// `prod_{nu=0}^{b} (D_eta + (b - nu) z)`, weight zero included.
pub fn twisted_small_i(
    analysis: &Analysis,
    twist: &TwistData,
    d_max: &Rat,
    window: ZWindow,
) -> Result<ISeries> {
    let rank = analysis.presentation().rank();
    for eta in &twist.characters {
        if eta.len() != rank {
            return Err(Error::Shape(format!(
                "twist character {:?} has rank {} but the torus has rank {}",
                eta,
                eta.len(),
                rank
            )));
        }
    }
    let classes = analysis.effective_classes(d_max)?;
    // Convexity proxy: every nonzero class must pair to a nonnegative
    // integer with every twist character.
    for beta in &classes {
        if beta.is_zero() {
            continue;
        }
        for eta in &twist.characters {
            let b = beta.pairing(eta);
            if !crate::exactmath::is_nonneg_integer(&b) {
                return Err(Error::Precondition(format!(
                    "twist character {:?} pairs to {} with beta = {}; \
                     a convex split bundle needs nonnegative integers",
                    eta,
                    format_rat(&b),
                    class_label(beta)
                )));
            }
        }
    }

    let mut terms: Vec<SeriesTerm> = classes
        .par_iter()
        .map(|beta| {
            let mut term = compute_term(analysis, beta)?;
            if beta.is_zero() {
                // The unit term of the twisted theory is still the
                // fundamental class; the section-weight factors attach to
                // nonzero classes only.
                return Ok(term);
            }
            let ring = analysis.ring(&term.sector)?;
            for eta in &twist.characters {
                let b = beta.pairing(eta);
                let d_eta = RingElement::character(ring, eta);
                let mut nu = BigInt::zero();
                let stop = b.numer().clone();
                while nu <= stop {
                    let c = &b - Rat::from_integer(nu.clone());
                    term.laurent = term.laurent.mul(&ZLaurent::linear(d_eta.clone(), &c));
                    nu += 1;
                }
            }
            Ok(term)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    flag_warnings(&terms, &mut warnings);
    let z_window = apply_window(&mut terms, window, &mut warnings);
    Ok(ISeries {
        flavor: Flavor::Twisted,
        d_max: d_max.clone(),
        z_window,
        terms,
        warnings,
    })
}

/// Polynomial with rational coefficients in the first Chern classes of a
/// list of characters.
#[derive(Clone, Debug)]
pub struct CharPoly {
    /// The characters `eta_j` the variables refer to.
    pub characters: Vec<Vec<BigInt>>,
    /// Terms `(coefficient, exponents)`, one exponent per character.
    pub terms: Vec<(Rat, Vec<u32>)>,
}

impl CharPoly {
    pub fn constant(c: Rat) -> Self {
        CharPoly {
            characters: Vec::new(),
            terms: vec![(c, Vec::new())],
        }
    }

    /// `scale * c_1(L_eta)`.
    pub fn linear(eta: Vec<BigInt>, scale: Rat) -> Self {
        CharPoly {
            characters: vec![eta],
            terms: vec![(scale, vec![1])],
        }
    }

    /// Evaluates at arguments `c_1(L_eta_j) + beta(L_eta_j) z`.
    fn evaluate(&self, ring: &Arc<SectorRing>, beta: &CurveClass) -> ZLaurent {
        let args: Vec<ZLaurent> = self
            .characters
            .iter()
            .map(|eta| {
                let class = RingElement::character(ring, eta);
                ZLaurent::linear(class, &beta.pairing(eta))
            })
            .collect();
        let mut acc = ZLaurent::zero(ring);
        for (coeff, exps) in &self.terms {
            let mut term = ZLaurent::one(ring);
            for (arg, &e) in args.iter().zip(exps) {
                for _ in 0..e {
                    term = term.mul(arg);
                }
            }
            acc = acc.add(&term.scale(coeff));
        }
        acc
    }
}

/// Formal insertion data for the big I-function.
#[derive(Clone, Debug)]
pub struct TInsertion {
    pub vars: Vec<(String, CharPoly)>,
    /// Truncation order in total t-degree.
    pub order: usize,
}

impl TInsertion {
    pub fn empty() -> Self {
        TInsertion {
            vars: Vec::new(),
            order: 0,
        }
    }
}

/// One class of the dressed series: z-Laurent data per t-monomial.
#[derive(Clone, Debug)]
pub struct BigSeriesTerm {
    pub class: CurveClass,
    pub sector: SectorLabel,
    /// (exponents over the insertion variables, coefficient), sorted by
    /// total degree then lexicographically.
    pub t_terms: Vec<(Vec<u32>, ZLaurent)>,
    /// For the Givental specialization: per variable, the coefficient of
    /// the variable in the absorbed rescaling `q^beta -> q^beta
    /// exp(sum_i t_i beta(L_eta_i))`.
    pub q_rescaling: Option<Vec<Rat>>,
}

#[derive(Clone, Debug)]
pub struct BigISeries {
    pub flavor: Flavor,
    pub d_max: Rat,
    pub t_order: usize,
    pub z_window: (i64, i64),
    pub var_names: Vec<String>,
    pub terms: Vec<BigSeriesTerm>,
    pub warnings: Vec<String>,
}

/// Exponent vectors over `nvars` variables with total degree up to
/// `max_total`, ordered by total degree then lexicographically.
fn multi_indices(nvars: usize, max_total: usize) -> Vec<Vec<u32>> {
    fn compositions(nvars: usize, total: usize, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if nvars == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if nvars == 1 {
            prefix.push(total as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=total {
            prefix.push(e as u32);
            compositions(nvars - 1, total - e, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=max_total {
        compositions(nvars, total, &mut out, &mut Vec::with_capacity(nvars));
    }
    out
}

fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// The big I-function: the small coefficient of each class multiplied by
/// `exp((1/z) sum_i t_i p_i(c_1(L_eta_ij) + beta(L_eta_ij) z))`, expanded
/// to the requested total order in the t variables.
pub fn big_i(
    analysis: &Analysis,
    d_max: &Rat,
    insertion: &TInsertion,
    window: ZWindow,
) -> Result<BigISeries> {
    let classes = analysis.effective_classes(d_max)?;
    let nvars = insertion.vars.len();
    let indices = multi_indices(nvars, insertion.order);

    let mut terms: Vec<BigSeriesTerm> = classes
        .par_iter()
        .map(|beta| {
            let base = compute_term(analysis, beta)?;
            let ring = analysis.ring(&base.sector)?;
            let z_inverse = ZLaurent::monomial(-1, RingElement::one(ring));
            // X_i = (1/z) p_i(c_1 + beta z)
            let args: Vec<ZLaurent> = insertion
                .vars
                .iter()
                .map(|(_, poly)| poly.evaluate(ring, beta).mul(&z_inverse))
                .collect();
            let mut t_terms = Vec::new();
            for m in &indices {
                let mut factor = ZLaurent::one(ring);
                let mut denom = Rat::one();
                for (arg, &e) in args.iter().zip(m) {
                    for _ in 0..e {
                        factor = factor.mul(arg);
                    }
                    denom *= factorial(e);
                }
                let coeff = factor.mul(&base.laurent).scale(&denom.recip());
                if !coeff.is_zero() || m.iter().all(|&e| e == 0) {
                    t_terms.push((m.clone(), coeff));
                }
            }
            Ok(BigSeriesTerm {
                class: beta.clone(),
                sector: base.sector,
                t_terms,
                q_rescaling: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut lo = 0i64;
    let mut hi = 0i64;
    for term in &terms {
        for (_, laurent) in &term.t_terms {
            if laurent.flagged() {
                warnings.push(format!(
                    "ring truncation may have dropped content in the term at beta = {}",
                    class_label(&term.class)
                ));
            }
            if let Some((a, b)) = laurent.support_range() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
    }
    let z_window = match window {
        ZWindow::Auto => (lo, hi),
        ZWindow::Explicit { z_min, z_max } => {
            for term in &mut terms {
                for (m, laurent) in &mut term.t_terms {
                    let (kept, dropped) = laurent.clip(z_min, z_max);
                    if !dropped.is_empty() {
                        warnings.push(format!(
                            "window [{z_min}, {z_max}] drops z powers {:?} from beta = {} at t-index {:?}",
                            dropped,
                            class_label(&term.class),
                            m
                        ));
                    }
                    *laurent = kept;
                }
            }
            (z_min, z_max)
        }
    };

    Ok(BigISeries {
        flavor: Flavor::Big,
        d_max: d_max.clone(),
        t_order: insertion.order,
        z_window,
        var_names: insertion.vars.iter().map(|(n, _)| n.clone()).collect(),
        terms,
        warnings,
    })
}

/// Givental's small I-function: the big dressing specialized to
/// `t = t0 1 + sum_i t_i xi_i` (with optional rational scales on the
/// divisor directions), with the scalar part of the exponent reported per
/// class as a q-rescaling.
pub fn givental_small_i(
    analysis: &Analysis,
    d_max: &Rat,
    order: usize,
    scales: Option<&[Rat]>,
    window: ZWindow,
) -> Result<BigISeries> {
    let rank = analysis.presentation().rank();
    let default_scales = vec![Rat::one(); rank];
    let scales = scales.unwrap_or(&default_scales);
    if scales.len() != rank {
        return Err(Error::Shape(format!(
            "need one scale per torus factor ({rank}), got {}",
            scales.len()
        )));
    }
    let mut vars = vec![("t0".to_string(), CharPoly::constant(Rat::one()))];
    // Per variable: the divisor direction it scales, if any.
    let mut directions: Vec<Option<(usize, Rat)>> = vec![None];
    for (i, scale) in scales.iter().enumerate() {
        if scale.is_zero() {
            continue;
        }
        let eta: Vec<BigInt> = (0..rank)
            .map(|k| {
                if k == i {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        vars.push((format!("t{}", i + 1), CharPoly::linear(eta, scale.clone())));
        directions.push(Some((i, scale.clone())));
    }
    let insertion = TInsertion { vars, order };
    let mut series = big_i(analysis, d_max, &insertion, window)?;
    series.flavor = Flavor::Givental;
    for term in &mut series.terms {
        // The scalar part of the exponent, exp(sum_i t_i scale_i beta_i),
        // rescales q^beta; report its per-variable coefficients.
        let shifts: Vec<Rat> = directions
            .iter()
            .map(|dir| match dir {
                None => Rat::zero(),
                Some((i, scale)) => scale * &term.class.components()[*i],
            })
            .collect();
        term.q_rescaling = Some(shifts);
    }
    Ok(series)
}

/// Mirror-map data extracted from the small I-function of a semi-positive
/// model.
#[derive(Clone, Debug)]
pub struct MirrorData {
    /// Per class: the scalar z^0 part. Forced to 1 at beta = 0 and 0
    /// elsewhere for semi-positive targets.
    pub j0: Vec<(CurveClass, Rat)>,
    /// Per nonzero class with nonzero z^{-1} part: the untwisted
    /// divisor-degree element it contributes to I_1(q).
    pub i1: Vec<(CurveClass, RingElement)>,
}

pub fn mirror_map(analysis: &Analysis, d_max: &Rat) -> Result<MirrorData> {
    let report = semipositivity_report(
        analysis.presentation(),
        &analysis.stability().fixed_subsets,
        d_max,
    )?;
    if let SemipositivityReport::Violation { beta, value } = report {
        return Err(Error::Precondition(format!(
            "not semi-positive: beta = {:?} has canonical pairing {}",
            beta.iter().map(format_rat).collect::<Vec<_>>(),
            format_rat(&value)
        )));
    }
    let series = small_i(analysis, d_max, ZWindow::Auto)?;
    let mut j0 = Vec::new();
    let mut i1 = Vec::new();
    for term in &series.terms {
        let z0 = term.laurent.coefficient(0);
        let scalar = match z0 {
            None => Rat::zero(),
            Some(el) => el.as_scalar().ok_or_else(|| {
                Error::Internal(format!(
                    "z^0 part at beta = {} is not a multiple of the fundamental class",
                    class_label(&term.class)
                ))
            })?,
        };
        let expected = if term.class.is_zero() {
            Rat::one()
        } else {
            Rat::zero()
        };
        if scalar != expected {
            return Err(Error::Internal(format!(
                "semi-positive z^0 structure violated at beta = {}: got {}",
                class_label(&term.class),
                format_rat(&scalar)
            )));
        }
        j0.push((term.class.clone(), scalar));

        if let Some(zm1) = term.laurent.coefficient(-1) {
            if !term.sector.is_untwisted() {
                // Happens only when the canonical pairing is fractional;
                // the untwisted mirror map of the semi-positive theory does
                // not cover such corrections.
                return Err(Error::Check(format!(
                    "twisted z^{{-1}} contribution at beta = {}: the untwisted mirror-map \
                     extraction does not apply to this model",
                    class_label(&term.class)
                )));
            }
            if zm1.degrees().any(|k| k > 1) {
                return Err(Error::Internal(format!(
                    "z^{{-1}} part at beta = {} leaves H^{{<=2}}",
                    class_label(&term.class)
                )));
            }
            if !zm1.is_zero() {
                i1.push((term.class.clone(), zm1.clone()));
            }
        }
    }
    Ok(MirrorData { j0, i1 })
}

/// Structural facts about the small I-function of a semi-positive target:
/// no positive z-powers, the z^0 part is exactly the fundamental class at
/// beta = 0, and every z^{-1} contribution has age-shifted complex degree
/// at most 1. Callers are responsible for checking semi-positivity first.
///
/// When every canonical pairing is an integer the z^{-1} part is moreover
/// untwisted of divisor degree; classes with fractional canonical pairing
/// can legitimately contribute twisted units at z^{-1} (their age makes up
/// the missing weight), so only the age-shifted bound is asserted here.
pub fn semipositive_structure_check(series: &ISeries) -> Result<()> {
    for term in &series.terms {
        if let Some((_, hi)) = term.laurent.support_range() {
            if hi > 0 {
                return Err(Error::Check(format!(
                    "positive z power {hi} at beta = {}",
                    class_label(&term.class)
                )));
            }
        }
        if let Some(z0) = term.laurent.coefficient(0) {
            let scalar = z0.as_scalar();
            let expected = if term.class.is_zero() {
                Some(Rat::one())
            } else {
                None
            };
            if scalar != expected {
                return Err(Error::Check(format!(
                    "z^0 part at beta = {} is not the expected multiple of the unit",
                    class_label(&term.class)
                )));
            }
        } else if term.class.is_zero() {
            return Err(Error::Check("the beta = 0 term lost its unit".into()));
        }
        if let Some(zm1) = term.laurent.coefficient(-1) {
            let age = term.sector.age();
            for degree in zm1.degrees() {
                let shifted = Rat::from_integer(BigInt::from(degree as i64)) + &age;
                if shifted > Rat::one() {
                    return Err(Error::Check(format!(
                        "z^{{-1}} part at beta = {} has age-shifted degree above 1",
                        class_label(&term.class)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// One grading failure: a populated (z-power, cohomological degree) slot
/// whose total weight is nonzero.
#[derive(Clone, Debug)]
pub struct GradingViolation {
    pub beta: Vec<Rat>,
    pub z_power: i64,
    pub degree: usize,
    pub total: Rat,
}

/// Audits the degree-zero grading of a small I-function: for every term,
/// `beta(det T) + z-power + (complex degree + age) = 0`.
pub fn grading_check(series: &ISeries) -> Vec<GradingViolation> {
    let mut violations = Vec::new();
    for term in &series.terms {
        let canonical = term.class.canonical_pairing();
        let age = term.sector.age();
        for (power, coeff) in term.laurent.iter() {
            for degree in coeff.degrees() {
                let total = &canonical
                    + Rat::from_integer(BigInt::from(power))
                    + Rat::from_integer(BigInt::from(degree as i64))
                    + &age;
                if !total.is_zero() {
                    violations.push(GradingViolation {
                        beta: term.class.components().to_vec(),
                        z_power: power,
                        degree,
                        total,
                    });
                }
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{rat, rat_int};
    use crate::model::GitPresentation;
    use crate::testutil::model;

    fn analysis(name: &str, charges: &[Vec<i64>], theta: &[i64]) -> Analysis {
        Analysis::new(model(name, charges, theta), None).unwrap()
    }

    fn term_at<'s>(series: &'s ISeries, components: &[Rat]) -> &'s SeriesTerm {
        series
            .terms
            .iter()
            .find(|t| t.class.components() == components)
            .expect("term missing")
    }

    fn scalar_coeff(term: &SeriesTerm, power: i64) -> Rat {
        term.laurent
            .coefficient(power)
            .and_then(|el| el.as_scalar())
            .unwrap_or_else(Rat::zero)
    }

    #[test]
    fn p1_small_terms() {
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let series = small_i(&a, &rat_int(2), ZWindow::Auto).unwrap();
        assert_eq!(series.terms.len(), 3);
        assert!(series.warnings.is_empty());

        let zero = term_at(&series, &[rat_int(0)]);
        assert_eq!(scalar_coeff(zero, 0), rat_int(1));

        // beta = 1: (xi + z)^{-2} = z^{-2} - 2 xi z^{-3}
        let one = term_at(&series, &[rat_int(1)]);
        assert_eq!(scalar_coeff(one, -2), rat_int(1));
        let ring = one.laurent.ring();
        let xi = RingElement::xi(ring, 0);
        assert_eq!(
            one.laurent.coefficient(-3).unwrap(),
            &xi.scale(&rat_int(-2))
        );
        assert!(one.laurent.coefficient(-1).is_none());
        assert!(one.laurent.coefficient(0).is_none());
    }

    #[test]
    fn wp12_half_integer_term() {
        let a = analysis("wp12", &[vec![1, 2]], &[1]);
        let series = small_i(&a, &rat_int(1), ZWindow::Auto).unwrap();
        let half = term_at(&series, &[rat(1, 2)]);
        assert_eq!(half.sector.action(), &[rat(1, 2), rat_int(0)]);
        assert_eq!(scalar_coeff(half, -2), rat_int(2));
        assert_eq!(half.laurent.iter().count(), 1);
    }

    #[test]
    fn local_p2_degree_one_term() {
        let a = analysis("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let series = small_i(&a, &rat_int(1), ZWindow::Auto).unwrap();
        let one = term_at(&series, &[rat_int(1)]);
        let ring = one.laurent.ring();
        let xi = RingElement::xi(ring, 0);
        // -6 xi z^{-1} - 9 xi^2 z^{-2}
        assert_eq!(
            one.laurent.coefficient(-1).unwrap(),
            &xi.scale(&rat_int(-6))
        );
        assert_eq!(
            one.laurent.coefficient(-2).unwrap(),
            &xi.mul(&xi).scale(&rat_int(-9))
        );
        assert_eq!(one.laurent.iter().count(), 2);
    }

    #[test]
    fn conifold_terms_vanish() {
        // Each nonzero class carries (-xi)^2 = 0 from the two negative rays.
        let a = analysis("conifold", &[vec![1, 1, -1, -1]], &[1]);
        let series = small_i(&a, &rat_int(3), ZWindow::Auto).unwrap();
        for term in &series.terms {
            if !term.class.is_zero() {
                assert!(
                    term.laurent.is_zero(),
                    "beta = {:?}",
                    term.class.components()
                );
            }
        }
    }

    #[test]
    fn explicit_window_warns_on_drops() {
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let series = small_i(
            &a,
            &rat_int(2),
            ZWindow::Explicit {
                z_min: -3,
                z_max: 0,
            },
        )
        .unwrap();
        assert!(!series.warnings.is_empty());
        let two = term_at(&series, &[rat_int(2)]);
        assert!(two.laurent.coefficient(-5).is_none());
    }

    #[test]
    fn two_path_on_corpus() {
        for p in crate::testutil::corpus() {
            let a = Analysis::new(p, None).unwrap();
            for beta in a.effective_classes(&rat_int(2)).unwrap() {
                residue_two_path_check(&a, &beta).unwrap();
            }
        }
    }

    #[test]
    fn two_path_detects_corrupted_range() {
        // Dropping the bare divisor factor of the normal-bundle route (the
        // integer-negative contribution) must break the equality whenever
        // that divisor is nonzero in the sector ring.
        let a = analysis("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let beta = CurveClass::new(a.presentation(), vec![rat_int(1)]);
        let sector = sector_of_class(a.presentation(), &beta);
        let ring = a.ring(&sector).unwrap();
        let divisors = restricted_divisors(ring, 4);
        let direct = residue_coefficient(&divisors, &beta, ring).unwrap();
        let mut corrupted = denominator_product(&divisors, &beta, ring).unwrap();
        for nu in normal_bundle_range(beta.ray_pairing(3)) {
            let c = beta.ray_pairing(3) - Rat::from_integer(nu);
            corrupted = corrupted.mul(&ZLaurent::linear(divisors[3].clone(), &c));
        }
        assert_ne!(direct, corrupted);
    }

    #[test]
    fn grading_holds_on_corpus() {
        for p in crate::testutil::corpus() {
            let a = Analysis::new(p, None).unwrap();
            let series = small_i(&a, &rat_int(2), ZWindow::Auto).unwrap();
            let violations = grading_check(&series);
            assert!(violations.is_empty(), "violations: {violations:?}");
        }
    }

    #[test]
    fn big_at_order_zero_is_small() {
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let small = small_i(&a, &rat_int(2), ZWindow::Auto).unwrap();
        let insertion = TInsertion {
            vars: vec![(
                "t1".into(),
                CharPoly::linear(vec![BigInt::one()], rat_int(1)),
            )],
            order: 0,
        };
        let big = big_i(&a, &rat_int(2), &insertion, ZWindow::Auto).unwrap();
        for (s, b) in small.terms.iter().zip(&big.terms) {
            assert_eq!(s.class, b.class);
            assert_eq!(b.t_terms.len(), 1);
            assert_eq!(b.t_terms[0].0, vec![0]);
            assert_eq!(b.t_terms[0].1, s.laurent);
        }
    }

    #[test]
    fn big_divisor_insertion_on_p1() {
        // Order-1 dressing by t1 * H at beta = 1:
        // (1/z)(xi + z) * (z^{-2} - 2 xi z^{-3}) = z^{-2} - xi z^{-3}.
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let insertion = TInsertion {
            vars: vec![(
                "t1".into(),
                CharPoly::linear(vec![BigInt::one()], rat_int(1)),
            )],
            order: 1,
        };
        let big = big_i(&a, &rat_int(1), &insertion, ZWindow::Auto).unwrap();
        let term = big
            .terms
            .iter()
            .find(|t| t.class.components() == [rat_int(1)])
            .unwrap();
        let (_, linear_part) = term
            .t_terms
            .iter()
            .find(|(m, _)| m == &vec![1])
            .expect("t-linear part missing");
        let ring = linear_part.ring();
        let xi = RingElement::xi(ring, 0);
        assert_eq!(
            linear_part.coefficient(-2).unwrap(),
            &RingElement::one(ring)
        );
        assert_eq!(linear_part.coefficient(-3).unwrap(), &xi.neg());
        assert!(linear_part.coefficient(-4).is_none());
    }

    #[test]
    fn big_degree_two_insertion_on_p2() {
        // p = H^2 at beta = 0, order 1: the t-linear part is xi^2 / z.
        let a = analysis("p2", &[vec![1, 1, 1]], &[1]);
        let insertion = TInsertion {
            vars: vec![(
                "t1".into(),
                CharPoly {
                    characters: vec![vec![BigInt::one()]],
                    terms: vec![(rat_int(1), vec![2])],
                },
            )],
            order: 1,
        };
        let big = big_i(&a, &rat_int(0), &insertion, ZWindow::Auto).unwrap();
        let term = &big.terms[0];
        let (_, linear_part) = term.t_terms.iter().find(|(m, _)| m == &vec![1]).unwrap();
        let ring = linear_part.ring();
        let xi = RingElement::xi(ring, 0);
        assert_eq!(linear_part.coefficient(-1).unwrap(), &xi.mul(&xi));
        assert_eq!(linear_part.iter().count(), 1);
    }

    #[test]
    fn givental_string_factor() {
        // t0 only, order 1: every term is multiplied by (1 + t0/z).
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let scales = vec![rat_int(0)];
        let giv = givental_small_i(&a, &rat_int(1), 1, Some(&scales), ZWindow::Auto).unwrap();
        assert_eq!(giv.var_names, vec!["t0"]);
        let small = small_i(&a, &rat_int(1), ZWindow::Auto).unwrap();
        for (g, s) in giv.terms.iter().zip(&small.terms) {
            let ring = s.laurent.ring();
            let constant = g.t_terms.iter().find(|(m, _)| m == &vec![0]).unwrap();
            assert_eq!(constant.1, s.laurent);
            let linear = g.t_terms.iter().find(|(m, _)| m == &vec![1]);
            let expected = s
                .laurent
                .mul(&ZLaurent::monomial(-1, RingElement::one(ring)));
            if let Some((_, l)) = linear {
                assert_eq!(*l, expected);
            } else {
                assert!(expected.is_zero());
            }
        }
    }

    #[test]
    fn givental_divisor_direction_and_rescaling() {
        // t1 xi at beta = 1 on P^1: the t1-linear factor is (xi + z)/z.
        let a = analysis("p1", &[vec![1, 1]], &[1]);
        let giv = givental_small_i(&a, &rat_int(1), 1, None, ZWindow::Auto).unwrap();
        assert_eq!(giv.var_names, vec!["t0", "t1"]);
        let term = giv
            .terms
            .iter()
            .find(|t| t.class.components() == [rat_int(1)])
            .unwrap();
        assert_eq!(term.q_rescaling, Some(vec![rat_int(0), rat_int(1)]));
        let (_, linear) = term.t_terms.iter().find(|(m, _)| m == &vec![0, 1]).unwrap();
        let ring = linear.ring();
        let xi = RingElement::xi(ring, 0);
        // (1/z)(xi + 1*z) * (z^{-2} - 2 xi z^{-3}) = z^{-2} - xi z^{-3}
        assert_eq!(linear.coefficient(-2).unwrap(), &RingElement::one(ring));
        assert_eq!(linear.coefficient(-3).unwrap(), &xi.neg());
    }

    #[test]
    fn twisted_examples() {
        // Empty twist is the small series.
        let a = analysis("p2", &[vec![1, 1, 1]], &[1]);
        let empty = TwistData { characters: vec![] };
        let twisted = twisted_small_i(&a, &empty, &rat_int(1), ZWindow::Auto).unwrap();
        let small = small_i(&a, &rat_int(1), ZWindow::Auto).unwrap();
        for (t, s) in twisted.terms.iter().zip(&small.terms) {
            assert_eq!(t.laurent, s.laurent);
        }

        // Line twist on P^1 at beta = 1: extra factor (xi)(xi + z).
        let p1 = analysis("p1", &[vec![1, 1]], &[1]);
        let twist = TwistData {
            characters: vec![vec![BigInt::one()]],
        };
        let twisted = twisted_small_i(&p1, &twist, &rat_int(1), ZWindow::Auto).unwrap();
        let small = small_i(&p1, &rat_int(1), ZWindow::Auto).unwrap();
        let t1 = &twisted.terms[1];
        let s1 = &small.terms[1];
        let ring = s1.laurent.ring();
        let xi = RingElement::xi(ring, 0);
        let factor = ZLaurent::monomial(0, xi.clone()).mul(&ZLaurent::linear(xi, &rat_int(1)));
        assert_eq!(t1.laurent, s1.laurent.mul(&factor));
    }

    #[test]
    fn twist_convexity_proxy_rejected() {
        // A negative character cannot be convex.
        let p1 = analysis("p1", &[vec![1, 1]], &[1]);
        let twist = TwistData {
            characters: vec![vec![BigInt::from(-1)]],
        };
        let err = twisted_small_i(&p1, &twist, &rat_int(1), ZWindow::Auto);
        assert!(matches!(err, Err(Error::Precondition(_))));

        // A fractional pairing is rejected as well.
        let wp = analysis("wp12", &[vec![1, 2]], &[1]);
        let twist = TwistData {
            characters: vec![vec![BigInt::one()]],
        };
        let err = twisted_small_i(&wp, &twist, &rat_int(1), ZWindow::Auto);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn mirror_map_examples() {
        // Strictly positive: J0 = 1, I1 = 0.
        for n in 1..=3usize {
            let a = analysis("pn", &[vec![1; n + 1]], &[1]);
            let data = mirror_map(&a, &rat_int(3)).unwrap();
            assert!(data.i1.is_empty());
            for (beta, c) in &data.j0 {
                assert_eq!(*c == rat_int(1), beta.is_zero());
            }
        }

        // Local P^2: the q^1 coefficient of I_1 is -6 xi.
        let a = analysis("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let data = mirror_map(&a, &rat_int(2)).unwrap();
        let (beta, el) = &data.i1[0];
        assert_eq!(beta.components(), &[rat_int(1)]);
        let ring = el.ring();
        assert_eq!(el, &RingElement::xi(ring, 0).scale(&rat_int(-6)));

        // Conifold: every correction vanishes.
        let a = analysis("conifold", &[vec![1, 1, -1, -1]], &[1]);
        let data = mirror_map(&a, &rat_int(3)).unwrap();
        assert!(data.i1.is_empty());
    }

    #[test]
    fn local_p2_mirror_series_matches_its_closed_form() {
        // The full z^{-1} series of local P^2 is the classical
        // sum_d 3 (3d-1)! / (d!)^3 (-1)^d q^d H.
        let a = analysis("local_p2", &[vec![1, 1, 1, -3]], &[1]);
        let data = mirror_map(&a, &rat_int(4)).unwrap();
        assert_eq!(data.i1.len(), 4);
        let fact =
            |n: u64| -> BigInt { (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)) };
        for (beta, el) in &data.i1 {
            let d = u64::try_from(beta.components()[0].numer()).unwrap();
            let d_fact = fact(d);
            let sign = if d % 2 == 1 { -1i64 } else { 1 };
            let expected = Rat::from_integer(BigInt::from(3 * sign) * fact(3 * d - 1))
                / Rat::from_integer(&d_fact * &d_fact * &d_fact);
            let ring = el.ring();
            assert_eq!(
                el,
                &RingElement::xi(ring, 0).scale(&expected),
                "mismatch at degree {d}"
            );
        }
    }

    #[test]
    fn mirror_map_rejects_non_semipositive() {
        let p = model("neg", &[vec![1, 1, -3]], &[1]);
        let a = Analysis::new(p, None).unwrap();
        assert!(matches!(
            mirror_map(&a, &rat_int(2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fractional_canonical_degree_gives_twisted_z_inverse_units() {
        // A semi-positive stack can carry twisted z^{-1} units when the
        // canonical pairing is fractional: beta = (-1/2, 1/2) here has
        // pairings (-1/2, 0, 1), an empty numerator range and one inverted
        // factor whose divisor dies in the mu_2 sector ring, leaving
        // exactly z^{-1} on the twisted unit. The structure check accepts
        // it (age 1/2 + degree 0 <= 1) while the untwisted mirror-map
        // extraction refuses the model.
        let a = analysis("stacky_rank2", &[vec![1, 1, 0], vec![0, 1, 2]], &[1, 2]);
        let series = small_i(&a, &rat_int(1), ZWindow::Auto).unwrap();
        semipositive_structure_check(&series).unwrap();
        let term = term_at(&series, &[rat(-1, 2), rat(1, 2)]);
        assert_eq!(term.class.canonical_pairing(), rat(1, 2));
        assert!(!term.sector.is_untwisted());
        assert_eq!(term.sector.age(), rat(1, 2));
        assert_eq!(scalar_coeff(term, -1), rat_int(1));
        assert_eq!(term.laurent.iter().count(), 1);
        assert!(matches!(mirror_map(&a, &rat_int(1)), Err(Error::Check(_))));
    }

    #[test]
    fn grading_example_values() {
        fn check_one(p: GitPresentation, components: Vec<Rat>, power: i64, degree: usize) {
            let a = Analysis::new(p, None).unwrap();
            let beta = CurveClass::new(a.presentation(), components);
            let sector = sector_of_class(a.presentation(), &beta);
            let total = beta.canonical_pairing()
                + Rat::from_integer(BigInt::from(power))
                + Rat::from_integer(BigInt::from(degree as i64))
                + sector.age();
            assert!(total.is_zero());
        }
        check_one(model("p1", &[vec![1, 1]], &[1]), vec![rat_int(1)], -2, 0);
        check_one(model("wp12", &[vec![1, 2]], &[1]), vec![rat(1, 2)], -2, 0);
        check_one(
            model("local_p2", &[vec![1, 1, 1, -3]], &[1]),
            vec![rat_int(1)],
            -1,
            1,
        );
    }
}
