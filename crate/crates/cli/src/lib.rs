//! Batch entry points: identity verification, operator derivation and
//! pretty-printing, and displacement recovery.
//!
//! Exit-code contract: 0 = all checks pass, 1 = an identity or tolerance
//! failed, 2 = bad configuration or malformed input.

pub mod recover;
pub mod suites;

use nullhom::bgg::{self, OpExpr};
use nullhom::elasticity::{ElasticityOps, ResolvedSigns, Sign};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Configuration of the `verify` command.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub dim: usize,
    pub max_degree: i64,
    pub seed: u64,
    pub report_path: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            dim: 3,
            max_degree: 6,
            seed: 42,
            report_path: PathBuf::from("conformance-report.json"),
            jobs: None,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.dim != 2 && self.dim != 3 {
            return Err(format!("dim must be 2 or 3, got {}", self.dim));
        }
        if self.max_degree < 0 {
            return Err(format!("max-degree must be >= 0, got {}", self.max_degree));
        }
        if self.jobs == Some(0) {
            return Err("jobs must be >= 1".into());
        }
        Ok(())
    }
}

/// One verified identity in the conformance report. A failing entry always
/// carries the first failing probe.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub status: &'static str,
    pub probes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    pub elapsed_ms: u128,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// The fixed convention set, embedded verbatim so resolved signs are
/// interpretable across builds.
pub fn convention_set() -> Vec<&'static str> {
    vec![
        "permutation tensor: eps(1,2,3) = +1; (u∧v)_i = eps_iab u_a v_b",
        "(grad u)_ij = d_j u_i; (curl v)_i = eps_iab d_a v_b",
        "(curl M)_ij = eps_iab d_a M_bj (columns curled); (M curl)_ij = eps_jab d_a M_ib (rows curled)",
        "(div M)_i = d_j M_ij (row-wise)",
        "u∧M crosses u with the columns of M; M∧u crosses the rows of M with u",
        "Skw(w) is the skew matrix with Skw(w)·a = w∧a; vec is its inverse",
        "2D: x_perp = (x2, -x1); chi = [[0,-1],[1,0]]; scalar-skew identification u <-> u*chi",
        "2D scalar curl: f -> (d2 f, -d1 f); 1-form proxy orientation a dx1 + b dx2 -> (b, -a)",
        "radial evaluation F(tx): derivatives are taken first, then evaluated at tx",
        "W-pair projection at top position: (W, u) -> u - (1/2) div W (the connecting operator emits the unnormalized skew part M - M^T)",
    ]
}

/// The full conformance report written by `verify`.
#[derive(Clone, Debug, Serialize)]
pub struct ConformanceReport {
    pub schema_version: u32,
    pub dim: usize,
    pub max_degree: u32,
    pub seed: u64,
    pub convention_set: Vec<&'static str>,
    pub sign_report: serde_json::Value,
    pub identities: Vec<IdentityResult>,
    pub all_passed: bool,
    pub timing: serde_json::Value,
}

/// Run all identity suites for the configured dimension and write the report.
/// Returns the process exit code together with the report.
pub fn cmd_verify(cfg: &VerifyConfig) -> Result<(i32, ConformanceReport), String> {
    cfg.validate()?;
    if let Some(jobs) = cfg.jobs {
        // best effort: the global pool can only be initialized once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let start = Instant::now();
    let max_degree = cfg.max_degree as u32;

    let derived = bgg::derive_elasticity_poincare(cfg.dim, max_degree.min(3))
        .map_err(|e| format!("derivation failed: {e}"))?;
    let sign_report = bgg::resolve_signs(&derived, max_degree.min(4));

    let identities = suites::run_all(cfg.dim, max_degree, cfg.seed, &derived, &sign_report);
    let all_passed =
        identities.iter().all(|i| i.passed()) && sign_report.status == bgg::SignStatus::Unique;

    let report = ConformanceReport {
        schema_version: 1,
        dim: cfg.dim,
        max_degree,
        seed: cfg.seed,
        convention_set: convention_set(),
        sign_report: serde_json::to_value(&sign_report).map_err(|e| e.to_string())?,
        identities,
        all_passed,
        timing: json!({ "total_ms": start.elapsed().as_millis() as u64 }),
    };

    let body = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    std::fs::write(&cfg.report_path, body)
        .map_err(|e| format!("cannot write report {}: {e}", cfg.report_path.display()))?;

    Ok((
        if report.all_passed {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
        report,
    ))
}

/// A derivation target of the `derive` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeriveTarget {
    P1,
    P2,
    P3,
    P1_2D,
    P2_2D,
}

impl DeriveTarget {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Some(DeriveTarget::P1),
            "P2" => Some(DeriveTarget::P2),
            "P3" => Some(DeriveTarget::P3),
            "P1_2D" => Some(DeriveTarget::P1_2D),
            "P2_2D" => Some(DeriveTarget::P2_2D),
            _ => None,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            DeriveTarget::P1 | DeriveTarget::P2 | DeriveTarget::P3 => 3,
            _ => 2,
        }
    }

    fn index(self) -> usize {
        match self {
            DeriveTarget::P1 | DeriveTarget::P1_2D => 0,
            DeriveTarget::P2 | DeriveTarget::P2_2D => 1,
            DeriveTarget::P3 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DeriveTarget::P1 => "P1",
            DeriveTarget::P2 => "P2",
            DeriveTarget::P3 => "P3",
            DeriveTarget::P1_2D => "P1_2D",
            DeriveTarget::P2_2D => "P2_2D",
        }
    }
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

/// Closed-form rendering with the resolved signs substituted.
pub fn closed_form_text(target: DeriveTarget, signs: ResolvedSigns) -> String {
    match (target, signs) {
        (DeriveTarget::P1, ResolvedSigns::ThreeD { p1_frank, .. }) => format!(
            "P1(E) = ∫₀¹ E(tx)·x dt {} ∫₀¹ (1-t)·[x∧(∇×E)(tx)]·x dt",
            sign_str(p1_frank)
        ),
        (DeriveTarget::P2, ResolvedSigns::ThreeD { p2_overall, .. }) => format!(
            "P2(V) = {} x∧( ∫₀¹ t(1-t)·V(tx) dt )∧x",
            sign_str(p2_overall)
        ),
        (DeriveTarget::P3, ResolvedSigns::ThreeD { p3_correction, .. }) => format!(
            "P3(v) = sym( ∫₀¹ t²·x⊗v(tx) dt {} ( ∫₀¹ t²(1-t)·x⊗v(tx)∧x dt )×∇ )",
            sign_str(p3_correction)
        ),
        (DeriveTarget::P1_2D, _) => "P1(V) = ∫₀¹ (1-t)·x⊥·V(tx)·x⊥ dt".to_string(),
        (DeriveTarget::P2_2D, ResolvedSigns::TwoD { p2_correction }) => format!(
            "P2(u) = sym( ∫₀¹ t·u(tx)⊗x dt {} ( ∫₀¹ t(t-1)·(x⊥·u(tx))·x dt )×∇ )",
            sign_str(p2_correction)
        ),
        _ => unreachable!("target/sign dimension mismatch"),
    }
}

fn signs_json(signs: ResolvedSigns) -> serde_json::Value {
    match signs {
        ResolvedSigns::ThreeD {
            p1_frank,
            p2_overall,
            p3_correction,
        } => json!({
            "p1_frank": p1_frank.as_i8(),
            "p2_overall": p2_overall.as_i8(),
            "p3_correction": p3_correction.as_i8(),
        }),
        ResolvedSigns::TwoD { p2_correction } => json!({
            "p2_2d_correction": p2_correction.as_i8(),
        }),
    }
}

/// Render the derived operator for `target`: the expression tree from the
/// construction plus the sign-resolved closed form.
pub fn cmd_derive(target: DeriveTarget, format: &str) -> Result<(i32, String), String> {
    let dim = target.dim();
    let ops = if dim == 3 {
        ElasticityOps::resolved_3d()
    } else {
        ElasticityOps::resolved_2d()
    }
    .map_err(|e| e.to_string())?;
    let derived =
        bgg::derive_elasticity_poincare(dim, 2).map_err(|e| format!("derivation failed: {e}"))?;
    let expr: &OpExpr = &derived.operators[target.index()];
    let closed = closed_form_text(target, ops.signs());

    let out = match format {
        "text" => format!(
            "target: {} (dim {})\nresolved signs: {}\nclosed form: {}\nderived expression: {}\n",
            target.name(),
            dim,
            signs_json(ops.signs()),
            closed,
            expr
        ),
        "json" => serde_json::to_string_pretty(&json!({
            "target": target.name(),
            "dim": dim,
            "resolved_signs": signs_json(ops.signs()),
            "closed_form": closed,
            "derived_expression": expr.to_json(),
        }))
        .map_err(|e| e.to_string())?,
        other => return Err(format!("unknown format {other:?} (use text or json)")),
    };
    Ok((EXIT_OK, out))
}
