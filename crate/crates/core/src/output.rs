//! Machine-readable documents for the CLI surface, plus the pretty text
//! renderers. Rationals serialize as exact `p/q` strings, never floats;
//! map keys are inserted in a fixed order so JSON output is
//! byte-deterministic for a fixed configuration.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::Analysis;
use crate::classes::{loop_space_dims, CurveClass, SemipositivityReport};
use crate::cohomology::{monomial_name, RingElement};
use crate::error::Result;
use crate::exactmath::rational::format_rat;
use crate::exactmath::Rat;
use crate::model::{GitPresentation, StabilityReport};
use crate::sectors::SectorLabel;
use crate::series::{BigISeries, ISeries};
use crate::zlaurent::ZLaurent;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SectorDoc {
    pub c: Vec<String>,
    pub support: Vec<usize>,
    pub age: String,
    pub dim: i64,
}

pub fn sector_doc(p: &GitPresentation, s: &SectorLabel) -> SectorDoc {
    SectorDoc {
        c: s.action().iter().map(format_rat).collect(),
        support: s.support(),
        age: format_rat(&s.age()),
        dim: s.dim(p),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FixedSubsetDoc {
    pub sigma: Vec<usize>,
    pub coefficients: Vec<String>,
    pub stab_order: String,
    pub stab_exponent: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SemipositivityDoc {
    pub status: String,
    pub d_max: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_beta: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

pub fn semipositivity_doc(report: &SemipositivityReport) -> SemipositivityDoc {
    match report {
        SemipositivityReport::Pass { d_max, strict } => SemipositivityDoc {
            status: "pass".into(),
            d_max: format_rat(d_max),
            strict: Some(*strict),
            violating_beta: None,
            value: None,
        },
        SemipositivityReport::Violation { beta, value } => SemipositivityDoc {
            status: "violation".into(),
            d_max: String::new(),
            strict: None,
            violating_beta: Some(beta.iter().map(format_rat).collect()),
            value: Some(format_rat(value)),
        },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SectorReportDoc {
    #[serde(flatten)]
    pub sector: SectorDoc,
    pub betti: Vec<usize>,
    pub sr_generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalyzeDoc {
    pub model: String,
    pub n_rays: usize,
    pub rank: usize,
    pub ss_equals_s: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub fixed_subsets: Vec<FixedSubsetDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_e: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sectors: Option<Vec<SectorReportDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semipositivity: Option<SemipositivityDoc>,
}

fn fixed_subset_docs(report: &StabilityReport) -> Vec<FixedSubsetDoc> {
    report
        .fixed_subsets
        .iter()
        .map(|f| FixedSubsetDoc {
            sigma: f.sigma.clone(),
            coefficients: f.coefficients.iter().map(format_rat).collect(),
            stab_order: f.stab_order.to_string(),
            stab_exponent: f.stab_exponent.to_string(),
        })
        .collect()
}

/// The full analyze report for a stable model.
pub fn analyze_doc(analysis: &Analysis, d_max: &Rat) -> Result<AnalyzeDoc> {
    let p = analysis.presentation();
    let report = analysis.stability();
    let sectors = analysis
        .sectors()
        .iter()
        .map(|s| -> Result<SectorReportDoc> {
            let ring = analysis.ring(s)?;
            Ok(SectorReportDoc {
                sector: sector_doc(p, s),
                betti: ring.betti_dims(),
                sr_generators: ring.sr_sets().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let semipositivity = crate::classes::semipositivity_report(p, &report.fixed_subsets, d_max)?;
    Ok(AnalyzeDoc {
        model: p.name().to_string(),
        n_rays: p.n_rays(),
        rank: p.rank(),
        ss_equals_s: true,
        witness: None,
        fixed_subsets: fixed_subset_docs(report),
        exponent_e: Some(report.exponent_e.to_string()),
        proper: Some(analysis.proper()),
        sectors: Some(sectors),
        semipositivity: Some(semipositivity_doc(&semipositivity)),
    })
}

/// The short analyze report when semistable differs from stable.
pub fn analyze_failure_doc(p: &GitPresentation, report: &StabilityReport) -> AnalyzeDoc {
    AnalyzeDoc {
        model: p.name().to_string(),
        n_rays: p.n_rays(),
        rank: p.rank(),
        ss_equals_s: false,
        witness: report.witness.clone(),
        fixed_subsets: fixed_subset_docs(report),
        exponent_e: None,
        proper: None,
        sectors: None,
        semipositivity: None,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DimsDoc {
    pub dim_w_beta: i64,
    pub dim_stack: i64,
    pub obstruction_dim: i64,
    pub virtual_dim: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassDoc {
    pub beta: Vec<String>,
    pub b: Vec<String>,
    pub degree: String,
    pub a: u64,
    pub dims: DimsDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassesDoc {
    pub model: String,
    pub d_max: String,
    pub classes: Vec<ClassDoc>,
}

pub fn classes_doc(analysis: &Analysis, d_max: &Rat) -> Result<ClassesDoc> {
    let p = analysis.presentation();
    let classes = analysis
        .effective_classes(d_max)?
        .iter()
        .map(|beta| -> Result<ClassDoc> {
            let dims = loop_space_dims(p, beta)?;
            Ok(ClassDoc {
                beta: beta.components().iter().map(format_rat).collect(),
                b: beta.ray_pairings().iter().map(format_rat).collect(),
                degree: format_rat(beta.degree()),
                a: u64::try_from(&dims.a).map_err(|_| {
                    crate::error::Error::Internal("domain weight a exceeds u64".into())
                })?,
                dims: DimsDoc {
                    dim_w_beta: dims.dim_w_beta,
                    dim_stack: dims.dim_stack,
                    obstruction_dim: dims.obstruction_dim,
                    virtual_dim: dims.virtual_dim,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassesDoc {
        model: p.name().to_string(),
        d_max: format_rat(d_max),
        classes,
    })
}

/// Element as an object `monomial -> coefficient`, terms ordered by degree
/// then by the ring's monomial order.
pub fn element_object(el: &RingElement) -> Map<String, Value> {
    let mut map = Map::new();
    for (_, mono, coeff) in el.terms() {
        map.insert(monomial_name(&mono), Value::String(format_rat(&coeff)));
    }
    map
}

/// Laurent data as an object `z^power -> element object`, powers
/// descending.
pub fn laurent_object(laurent: &ZLaurent) -> Map<String, Value> {
    let mut map = Map::new();
    let entries: Vec<(i64, &RingElement)> = laurent.iter().collect();
    for (power, coeff) in entries.into_iter().rev() {
        map.insert(format!("z^{power}"), Value::Object(element_object(coeff)));
    }
    map
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDoc {
    pub beta: Vec<String>,
    pub degree: String,
    pub sector: SectorDoc,
    pub coefficients: Map<String, Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerificationCheckDoc {
    pub status: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerificationDoc {
    pub grading: VerificationCheckDoc,
    pub two_path: VerificationCheckDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semipositive_structure: Option<VerificationCheckDoc>,
}

impl VerificationDoc {
    pub fn all_passed(&self) -> bool {
        let ok = |c: &VerificationCheckDoc| c.status == "pass";
        ok(&self.grading)
            && ok(&self.two_path)
            && self.semipositive_structure.as_ref().is_none_or(ok)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesDoc {
    pub model: String,
    pub flavor: String,
    pub d_max: String,
    pub z_window: (i64, i64),
    pub proper: bool,
    pub warnings: Vec<String>,
    pub terms: Vec<TermDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationDoc>,
}

fn term_doc(
    p: &GitPresentation,
    class: &CurveClass,
    sector: &SectorLabel,
    laurent: &ZLaurent,
) -> TermDoc {
    TermDoc {
        beta: class.components().iter().map(format_rat).collect(),
        degree: format_rat(class.degree()),
        sector: sector_doc(p, sector),
        coefficients: laurent_object(laurent),
    }
}

pub fn series_doc(analysis: &Analysis, series: &ISeries) -> SeriesDoc {
    let p = analysis.presentation();
    SeriesDoc {
        model: p.name().to_string(),
        flavor: series.flavor.as_str().to_string(),
        d_max: format_rat(&series.d_max),
        z_window: series.z_window,
        proper: analysis.proper(),
        warnings: series.warnings.clone(),
        terms: series
            .terms
            .iter()
            .map(|t| term_doc(p, &t.class, &t.sector, &t.laurent))
            .collect(),
        verification: None,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BigTermDoc {
    pub beta: Vec<String>,
    pub degree: String,
    pub sector: SectorDoc,
    /// t-monomial name -> laurent object.
    pub t_coefficients: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_rescaling: Option<Map<String, Value>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BigSeriesDoc {
    pub model: String,
    pub flavor: String,
    pub d_max: String,
    pub t_order: usize,
    pub t_vars: Vec<String>,
    pub z_window: (i64, i64),
    pub proper: bool,
    pub warnings: Vec<String>,
    pub terms: Vec<BigTermDoc>,
}

fn t_monomial_name(vars: &[String], exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in vars.iter().zip(exps) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn big_series_doc(analysis: &Analysis, series: &BigISeries) -> BigSeriesDoc {
    let p = analysis.presentation();
    let terms = series
        .terms
        .iter()
        .map(|t| {
            let mut t_coefficients = Map::new();
            for (exps, laurent) in &t.t_terms {
                t_coefficients.insert(
                    t_monomial_name(&series.var_names, exps),
                    Value::Object(laurent_object(laurent)),
                );
            }
            let q_rescaling = t.q_rescaling.as_ref().map(|shifts| {
                let mut map = Map::new();
                for (v, s) in series.var_names.iter().zip(shifts) {
                    map.insert(v.clone(), Value::String(format_rat(s)));
                }
                map
            });
            BigTermDoc {
                beta: t.class.components().iter().map(format_rat).collect(),
                degree: format_rat(t.class.degree()),
                sector: sector_doc(p, &t.sector),
                t_coefficients,
                q_rescaling,
            }
        })
        .collect();
    BigSeriesDoc {
        model: p.name().to_string(),
        flavor: series.flavor.as_str().to_string(),
        d_max: format_rat(&series.d_max),
        t_order: series.t_order,
        t_vars: series.var_names.clone(),
        z_window: series.z_window,
        proper: analysis.proper(),
        warnings: series.warnings.clone(),
        terms,
    }
}

// ---------------------------------------------------------------------
// Pretty renderers
// ---------------------------------------------------------------------

fn render_element_object(obj: &Map<String, Value>) -> String {
    if obj.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (mono, coeff) in obj {
        let c = coeff.as_str().unwrap_or("?");
        if mono == "1" {
            parts.push(c.to_string());
        } else if c == "1" {
            parts.push(mono.clone());
        } else if c == "-1" {
            parts.push(format!("-{mono}"));
        } else {
            parts.push(format!("{c}*{mono}"));
        }
    }
    parts.join(" + ")
}

fn render_coefficients(obj: &Map<String, Value>, indent: &str, out: &mut String) {
    for (zkey, element) in obj {
        let rendered = match element {
            Value::Object(el) => render_element_object(el),
            _ => "?".into(),
        };
        out.push_str(&format!("{indent}{zkey}: {rendered}\n"));
    }
}

pub fn pretty_series(doc: &SeriesDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "I[{}] flavor={} d_max={} z_window=[{}, {}] proper={}\n",
        doc.model, doc.flavor, doc.d_max, doc.z_window.0, doc.z_window.1, doc.proper
    ));
    for w in &doc.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for term in &doc.terms {
        out.push_str(&format!(
            "q^({}) degree={} sector=({}) age={}\n",
            term.beta.join(", "),
            term.degree,
            term.sector.c.join(", "),
            term.sector.age
        ));
        render_coefficients(&term.coefficients, "  ", &mut out);
    }
    if let Some(v) = &doc.verification {
        out.push_str(&format!(
            "check grading: {} ({})\n",
            v.grading.status, v.grading.detail
        ));
        out.push_str(&format!(
            "check two_path: {} ({})\n",
            v.two_path.status, v.two_path.detail
        ));
        if let Some(s) = &v.semipositive_structure {
            out.push_str(&format!(
                "check semipositive_structure: {} ({})\n",
                s.status, s.detail
            ));
        }
    }
    out
}

pub fn pretty_big_series(doc: &BigSeriesDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "I[{}] flavor={} d_max={} t_order={} t_vars=({}) z_window=[{}, {}] proper={}\n",
        doc.model,
        doc.flavor,
        doc.d_max,
        doc.t_order,
        doc.t_vars.join(", "),
        doc.z_window.0,
        doc.z_window.1,
        doc.proper
    ));
    for w in &doc.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for term in &doc.terms {
        out.push_str(&format!(
            "q^({}) degree={} sector=({}) age={}\n",
            term.beta.join(", "),
            term.degree,
            term.sector.c.join(", "),
            term.sector.age
        ));
        if let Some(resc) = &term.q_rescaling {
            let parts: Vec<String> = resc
                .iter()
                .map(|(v, s)| format!("{v}: {}", s.as_str().unwrap_or("?")))
                .collect();
            out.push_str(&format!(
                "  q-rescaling exponent: {{{}}}\n",
                parts.join(", ")
            ));
        }
        for (tname, coeffs) in &term.t_coefficients {
            out.push_str(&format!("  t-term {tname}:\n"));
            if let Value::Object(obj) = coeffs {
                render_coefficients(obj, "    ", &mut out);
            }
        }
    }
    out
}

pub fn pretty_analyze(doc: &AnalyzeDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "model {} (rays={}, rank={})\n",
        doc.model, doc.n_rays, doc.rank
    ));
    out.push_str(&format!("semistable = stable: {}\n", doc.ss_equals_s));
    if let Some(w) = &doc.witness {
        out.push_str(&format!("  witness rays: {w:?}\n"));
    }
    for f in &doc.fixed_subsets {
        out.push_str(&format!(
            "fixed point sigma={:?} c=({}) order={} exponent={}\n",
            f.sigma,
            f.coefficients.join(", "),
            f.stab_order,
            f.stab_exponent
        ));
    }
    if let Some(e) = &doc.exponent_e {
        out.push_str(&format!("exponent e = {e}\n"));
    }
    if let Some(proper) = doc.proper {
        out.push_str(&format!("coarse space proper: {proper}\n"));
    }
    if let Some(sectors) = &doc.sectors {
        for s in sectors {
            out.push_str(&format!(
                "sector c=({}) support={:?} age={} dim={} betti={:?} sr={:?}\n",
                s.sector.c.join(", "),
                s.sector.support,
                s.sector.age,
                s.sector.dim,
                s.betti,
                s.sr_generators
            ));
        }
    }
    if let Some(sp) = &doc.semipositivity {
        out.push_str(&format!("semipositivity: {}", sp.status));
        if let Some(strict) = sp.strict {
            out.push_str(&format!(" (strict: {strict})"));
        }
        if let Some(beta) = &sp.violating_beta {
            out.push_str(&format!(" at beta = ({})", beta.join(", ")));
        }
        out.push('\n');
    }
    out
}

pub fn pretty_classes(doc: &ClassesDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("classes[{}] d_max={}\n", doc.model, doc.d_max));
    for c in &doc.classes {
        out.push_str(&format!(
            "beta=({}) b=({}) degree={} a={} dims: W={} stack={} obs={} virtual={}\n",
            c.beta.join(", "),
            c.b.join(", "),
            c.degree,
            c.a,
            c.dims.dim_w_beta,
            c.dims.dim_stack,
            c.dims.obstruction_dim,
            c.dims.virtual_dim
        ));
    }
    out
}
