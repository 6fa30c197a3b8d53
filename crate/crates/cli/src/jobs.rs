//! Typed jobs, their execution, and report documents.
//!
//! Every run produces a JSON document `{"schema": 1, "command": ...,
//! "inputs": <the job>, ...results}`; complex numbers serialize as
//! `[re, im]` pairs. CSV output carries the same job as a leading `#`
//! comment line, so any report can be re-executed and compared by
//! `recheck`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use whittaker_core::lfactors::{lfactor_flat_closed, lfactor_flat_numeric, lfactor_spectral};
use whittaker_core::schur::{
    schur_bialternant, schur_jacobi_trudi, schur_tableau_oracle, LatticeIndex, SpectralParams,
};
use whittaker_core::transform::{
    forward_transform, inverse_transform_exact, inverse_transform_quadrature, stade_rhs,
    whittaker_pairing, CompactFunction, RegularizedPairingParams, SpectralFunction,
};
use whittaker_core::verify::{
    cauchy_suite, inversion_suite, lfactor_suite, plancherel_suite, stade_suite, VerifyReport,
};
use whittaker_core::whittaker::{whittaker_eval, PrimeContext, ValuationVector};
use whittaker_core::{LaurentPoly, Result, WhittakerError};

pub const SCHEMA_VERSION: u64 = 1;

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_from(entry: &[f64; 2]) -> Complex64 {
    Complex64::new(entry[0], entry[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTerm {
    pub e: Vec<i32>,
    pub c: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportEntry {
    pub v: Vec<u32>,
    pub c: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SpectralInput {
    Poly { terms: Vec<PolyTerm> },
    Lfactor { d: u32, s: [f64; 2] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
pub enum VerifyJob {
    Cauchy {
        seed: u64,
        trials: u32,
        m_max: u32,
    },
    Stade {
        seed: u64,
        trials: u32,
    },
    Inversion {
        seed: u64,
        trials: u32,
    },
    Plancherel {
        seed: u64,
        trials: u32,
        n: Option<usize>,
        p: u64,
        cube: u32,
        tol: f64,
    },
    Lfactor {
        seed: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Schur {
        n: usize,
        m: Vec<u32>,
        alpha: Vec<[f64; 2]>,
        method: String,
    },
    Whittaker {
        p: u64,
        n: usize,
        v: Vec<i64>,
        alpha: Vec<[f64; 2]>,
    },
    Forward {
        p: u64,
        n: usize,
        alpha: Vec<[f64; 2]>,
        support: Vec<SupportEntry>,
    },
    Inverse {
        p: u64,
        n: usize,
        v: Vec<i64>,
        spectral: SpectralInput,
        nodes: Option<usize>,
    },
    Pairing {
        p: u64,
        n: usize,
        alpha: Vec<[f64; 2]>,
        beta: Vec<[f64; 2]>,
        epsilon: f64,
        truncation: u32,
    },
    Verify(VerifyJob),
    LfactorTable {
        d: u32,
        p: u64,
        s: [f64; 2],
        lambda_max: u32,
        nodes: usize,
    },
}

impl Job {
    pub fn command_name(&self) -> &'static str {
        match self {
            Job::Schur { .. } => "schur",
            Job::Whittaker { .. } => "whittaker",
            Job::Forward { .. } => "forward",
            Job::Inverse { .. } => "inverse",
            Job::Pairing { .. } => "pairing",
            Job::Verify(_) => "verify",
            Job::LfactorTable { .. } => "lfactor-table",
        }
    }
}

/// A finished run: the output document plus whether every embedded check
/// passed (only `verify` can report failures without erroring).
pub struct Outcome {
    pub document: Value,
    pub all_checks_passed: bool,
}

fn invalid(msg: impl Into<String>) -> WhittakerError {
    WhittakerError::InvalidParameter(msg.into())
}

fn spectral_params(entries: &[[f64; 2]], n: usize) -> Result<SpectralParams> {
    if entries.len() != n {
        return Err(invalid(format!(
            "expected {n} spectral parameters, got {}",
            entries.len()
        )));
    }
    SpectralParams::new(entries.iter().map(complex_from).collect())
}

fn lattice_index(m: &[u32], n: usize) -> Result<LatticeIndex> {
    if m.len() != n - 1 {
        return Err(invalid(format!(
            "lattice index needs {} entries for rank {n}, got {}",
            n - 1,
            m.len()
        )));
    }
    Ok(LatticeIndex::new(m.to_vec()))
}

fn valuation(v: &[i64], n: usize) -> Result<ValuationVector> {
    if v.len() != n - 1 {
        return Err(invalid(format!(
            "valuation vector needs {} entries for rank {n}, got {}",
            n - 1,
            v.len()
        )));
    }
    Ok(ValuationVector::new(v.to_vec()))
}

fn document(job: &Job, results: Map<String, Value>) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(job.command_name()));
    doc.insert(
        "inputs".into(),
        serde_json::to_value(job).expect("jobs always serialize"),
    );
    for (k, v) in results {
        doc.insert(k, v);
    }
    Value::Object(doc)
}

pub fn execute(job: &Job) -> Result<Outcome> {
    let mut results = Map::new();
    let mut all_checks_passed = true;

    match job {
        Job::Schur {
            n,
            m,
            alpha,
            method,
        } => {
            let params = spectral_params(alpha, *n)?;
            let index = lattice_index(m, *n)?;
            let mut values = Map::new();
            let run_all = method == "all";
            let mut record =
                |name: &str, value: std::result::Result<Complex64, WhittakerError>| match value {
                    Ok(z) => {
                        values.insert(name.into(), pair(z));
                        Ok(())
                    }
                    Err(e) if run_all => {
                        values.insert(name.into(), json!({ "error": e.to_string() }));
                        Ok(())
                    }
                    Err(e) => Err(e),
                };
            match method.as_str() {
                "all" => {
                    record("bialternant", schur_bialternant(&index, &params))?;
                    record("jacobi-trudi", Ok(schur_jacobi_trudi(&index, &params)))?;
                    record("tableau", schur_tableau_oracle(&index, &params))?;
                }
                "bialternant" => record("bialternant", schur_bialternant(&index, &params))?,
                "jacobi-trudi" => record("jacobi-trudi", Ok(schur_jacobi_trudi(&index, &params)))?,
                "tableau" => record("tableau", schur_tableau_oracle(&index, &params))?,
                other => return Err(invalid(format!("unknown method `{other}`"))),
            }
            results.insert("values".into(), Value::Object(values));
            results.insert(
                "partition".into(),
                json!(index.to_partition().parts().to_vec()),
            );
        }

        Job::Whittaker { p, n, v, alpha } => {
            let ctx = PrimeContext::new(*p, *n)?;
            let params = spectral_params(alpha, *n)?;
            let v = valuation(v, *n)?;
            results.insert("value".into(), pair(whittaker_eval(&params, &v, &ctx)));
        }

        Job::Forward {
            p,
            n,
            alpha,
            support,
        } => {
            let ctx = PrimeContext::new(*p, *n)?;
            let params = spectral_params(alpha, *n)?;
            let mut h = CompactFunction::new(ctx);
            for entry in support {
                h.set(lattice_index(&entry.v, *n)?, complex_from(&entry.c));
            }
            results.insert("value".into(), pair(forward_transform(&h, &params)));
        }

        Job::Inverse {
            p,
            n,
            v,
            spectral,
            nodes,
        } => {
            let ctx = PrimeContext::new(*p, *n)?;
            let v = valuation(v, *n)?;
            let (value, method) = match spectral {
                SpectralInput::Poly { terms } => {
                    let poly = LaurentPoly::from_terms(
                        *n,
                        terms.iter().map(|t| {
                            (
                                whittaker_core::Exponent::new(t.e.clone()),
                                complex_from(&t.c),
                            )
                        }),
                    );
                    let spec = SpectralFunction::exact(poly, ctx)?;
                    match nodes {
                        Some(nodes) => (
                            inverse_transform_quadrature(&spec, &v, *nodes)?,
                            "quadrature",
                        ),
                        None => (inverse_transform_exact(&spec, &v)?, "exact"),
                    }
                }
                SpectralInput::Lfactor { d, s } => {
                    if *n != 2 {
                        return Err(invalid("the L-factor evaluator is a rank-2 object"));
                    }
                    let nodes = nodes
                        .ok_or_else(|| invalid("--nodes is required for the evaluator path"))?;
                    let spec = lfactor_spectral(*d, complex_from(s), *p)?;
                    (
                        inverse_transform_quadrature(&spec, &v, nodes)?,
                        "quadrature",
                    )
                }
            };
            results.insert("value".into(), pair(value));
            results.insert("method".into(), json!(method));
        }

        Job::Pairing {
            p,
            n,
            alpha,
            beta,
            epsilon,
            truncation,
        } => {
            let ctx = PrimeContext::new(*p, *n)?;
            let a = spectral_params(alpha, *n)?;
            let b = spectral_params(beta, *n)?;
            let params = RegularizedPairingParams::new(*epsilon, *truncation)?;
            let sum = whittaker_pairing(&a, &b, &params, &ctx)?;
            results.insert("value".into(), pair(sum.value));
            results.insert("tail_bound".into(), json!(sum.tail_bound));
            results.insert("roundoff_bound".into(), json!(sum.roundoff_bound));
            match stade_rhs(&a, &b, *epsilon, &ctx) {
                Ok(closed) => {
                    let diff = (sum.value - closed).norm();
                    results.insert("closed_form".into(), pair(closed));
                    results.insert("difference".into(), json!(diff));
                    results.insert("within_bound".into(), json!(diff <= sum.error_bound()));
                }
                Err(e) => {
                    results.insert("closed_form".into(), json!({ "error": e.to_string() }));
                }
            }
        }

        Job::Verify(verify) => {
            let report = run_verify(verify)?;
            results.insert("suite".into(), json!(report.suite));
            results.insert("seed".into(), json!(report.seed));
            results.insert("passed".into(), json!(report.passed()));
            results.insert(
                "checks".into(),
                Value::Array(
                    report
                        .checks
                        .iter()
                        .map(|c| {
                            json!({
                                "name": c.name,
                                "passed": c.passed,
                                "detail": c.detail,
                            })
                        })
                        .collect(),
                ),
            );
            all_checks_passed = report.passed();
        }

        Job::LfactorTable {
            d,
            p,
            s,
            lambda_max,
            nodes,
        } => {
            let s = complex_from(s);
            let rows: Result<Vec<Value>> = (0..=*lambda_max)
                .into_par_iter()
                .map(|lambda| {
                    let numeric = lfactor_flat_numeric(*d, lambda, *p, s, *nodes)?;
                    let closed = if *d <= 4 {
                        Some(lfactor_flat_closed(*d, lambda, *p, s)?)
                    } else {
                        None
                    };
                    Ok(json!({
                        "lambda": lambda,
                        "closed": closed.map(pair),
                        "numeric": pair(numeric),
                        "abs_diff": closed.map(|c| (c - numeric).norm()),
                    }))
                })
                .collect();
            let rows = rows?;
            let max_abs_diff = rows
                .iter()
                .filter_map(|row| row["abs_diff"].as_f64())
                .fold(0.0f64, f64::max);
            results.insert("rows".into(), Value::Array(rows));
            results.insert("max_abs_diff".into(), json!(max_abs_diff));
            if *d > 4 {
                results.insert("no_closed_form_cross_check".into(), json!(true));
            }
        }
    }

    Ok(Outcome {
        document: document(job, results),
        all_checks_passed,
    })
}

fn run_verify(job: &VerifyJob) -> Result<VerifyReport> {
    match job {
        VerifyJob::Cauchy {
            seed,
            trials,
            m_max,
        } => cauchy_suite(*seed, *trials, *m_max),
        VerifyJob::Stade { seed, trials } => stade_suite(*seed, *trials),
        VerifyJob::Inversion { seed, trials } => inversion_suite(*seed, *trials),
        VerifyJob::Plancherel {
            seed,
            trials,
            n,
            p,
            cube,
            tol,
        } => {
            let ranks: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => vec![2, 3],
            };
            plancherel_suite(*seed, *trials, &ranks, *p, *cube, *tol)
        }
        VerifyJob::Lfactor { seed } => lfactor_suite(*seed),
    }
}

fn csv_number(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Number(x) => x.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flatten a document to CSV: a `#` comment carrying the job, then rows
/// with complex values split into `_re` / `_im` columns.
pub fn render_csv(doc: &Value) -> Result<String> {
    let job: Job = serde_json::from_value(doc["inputs"].clone())
        .map_err(|e| invalid(format!("document has no valid inputs: {e}")))?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let push_err = |e: csv::Error| invalid(format!("csv rendering failed: {e}"));

    match &job {
        Job::LfactorTable { .. } => {
            wtr.write_record([
                "lambda",
                "closed_re",
                "closed_im",
                "numeric_re",
                "numeric_im",
                "abs_diff",
            ])
            .map_err(push_err)?;
            for row in doc["rows"].as_array().into_iter().flatten() {
                let closed = row["closed"].as_array();
                wtr.write_record([
                    csv_number(&row["lambda"]),
                    closed.map_or(String::new(), |c| csv_number(&c[0])),
                    closed.map_or(String::new(), |c| csv_number(&c[1])),
                    csv_number(&row["numeric"][0]),
                    csv_number(&row["numeric"][1]),
                    csv_number(&row["abs_diff"]),
                ])
                .map_err(push_err)?;
            }
        }
        Job::Verify(_) => {
            wtr.write_record(["check", "passed", "detail"])
                .map_err(push_err)?;
            for check in doc["checks"].as_array().into_iter().flatten() {
                wtr.write_record([
                    csv_number(&check["name"]),
                    csv_number(&check["passed"]),
                    csv_number(&check["detail"]),
                ])
                .map_err(push_err)?;
            }
        }
        Job::Schur { .. } => {
            wtr.write_record(["method", "value_re", "value_im", "error"])
                .map_err(push_err)?;
            if let Some(values) = doc["values"].as_object() {
                for (name, value) in values {
                    match value.as_array() {
                        Some(z) => wtr
                            .write_record([
                                name.clone(),
                                csv_number(&z[0]),
                                csv_number(&z[1]),
                                String::new(),
                            ])
                            .map_err(push_err)?,
                        None => wtr
                            .write_record([
                                name.clone(),
                                String::new(),
                                String::new(),
                                csv_number(&value["error"]),
                            ])
                            .map_err(push_err)?,
                    }
                }
            }
        }
        Job::Pairing { .. } => {
            wtr.write_record([
                "value_re",
                "value_im",
                "tail_bound",
                "roundoff_bound",
                "closed_re",
                "closed_im",
                "difference",
            ])
            .map_err(push_err)?;
            let closed = doc["closed_form"].as_array();
            wtr.write_record([
                csv_number(&doc["value"][0]),
                csv_number(&doc["value"][1]),
                csv_number(&doc["tail_bound"]),
                csv_number(&doc["roundoff_bound"]),
                closed.map_or(String::new(), |c| csv_number(&c[0])),
                closed.map_or(String::new(), |c| csv_number(&c[1])),
                csv_number(&doc["difference"]),
            ])
            .map_err(push_err)?;
        }
        Job::Whittaker { .. } | Job::Forward { .. } | Job::Inverse { .. } => {
            wtr.write_record(["value_re", "value_im"])
                .map_err(push_err)?;
            wtr.write_record([csv_number(&doc["value"][0]), csv_number(&doc["value"][1])])
                .map_err(push_err)?;
        }
    }

    let body = String::from_utf8(wtr.into_inner().map_err(|e| invalid(e.to_string()))?)
        .map_err(|e| invalid(e.to_string()))?;
    let comment = serde_json::to_string(&job).expect("jobs always serialize");
    Ok(format!("# {comment}\n{body}"))
}

/// First path at which two documents disagree, if any.
fn first_difference(path: String, stored: &Value, fresh: &Value) -> Option<String> {
    match (stored, fresh) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, va) in a {
                match b.get(k) {
                    Some(vb) => {
                        if let Some(diff) = first_difference(format!("{path}.{k}"), va, vb) {
                            return Some(diff);
                        }
                    }
                    None => return Some(format!("{path}.{k} missing on re-run")),
                }
            }
            b.keys()
                .find(|k| !a.contains_key(*k))
                .map(|k| format!("{path}.{k} new on re-run"))
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Some(format!("{path}: length {} vs {}", a.len(), b.len()));
            }
            a.iter()
                .zip(b)
                .enumerate()
                .find_map(|(i, (va, vb))| first_difference(format!("{path}[{i}]"), va, vb))
        }
        _ => (stored != fresh).then(|| format!("{path}: {stored} vs {fresh}")),
    }
}

/// Load a previous report (JSON document or commented CSV), re-run its job,
/// and compare the regenerated report with the stored one.
pub fn recheck(path: &std::path::Path) -> Result<Outcome> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = content.trim_start();

    enum Stored {
        Csv(String),
        Json(Value),
    }

    let (job, stored) = if trimmed.starts_with('#') {
        let comment = trimmed
            .lines()
            .next()
            .and_then(|line| line.strip_prefix('#'))
            .map(str::trim)
            .ok_or_else(|| invalid("empty csv report"))?;
        let job: Job = serde_json::from_str(comment)
            .map_err(|e| invalid(format!("csv comment is not a job: {e}")))?;
        (job, Stored::Csv(content.clone()))
    } else {
        let doc: Value = serde_json::from_str(&content)
            .map_err(|e| invalid(format!("not a report document: {e}")))?;
        let job: Job = serde_json::from_value(doc["inputs"].clone())
            .map_err(|e| invalid(format!("document has no valid inputs: {e}")))?;
        (job, Stored::Json(doc))
    };

    let fresh = execute(&job)?;
    let (reproduced, difference) = match &stored {
        Stored::Csv(text) => {
            let regenerated = render_csv(&fresh.document)?;
            let matches = regenerated.trim_end() == text.trim_end();
            (matches, (!matches).then(|| "csv body differs".to_string()))
        }
        Stored::Json(doc) => {
            let difference = first_difference("$".into(), doc, &fresh.document);
            (difference.is_none(), difference)
        }
    };

    let document = json!({
        "schema": SCHEMA_VERSION,
        "command": "recheck",
        "file": path.display().to_string(),
        "original_command": job.command_name(),
        "reproduced": reproduced,
        "first_difference": difference,
    });
    Ok(Outcome {
        document,
        all_checks_passed: reproduced,
    })
}

/// Stable slug for the structured error object.
pub fn error_kind(error: &WhittakerError) -> &'static str {
    match error {
        WhittakerError::RankMismatch { .. } => "rank-mismatch",
        WhittakerError::ZeroCoordinate => "zero-coordinate",
        WhittakerError::NotPrime(_) => "not-prime",
        WhittakerError::InvalidRank(_) => "invalid-rank",
        WhittakerError::ZeroSpectralParam => "zero-spectral-param",
        WhittakerError::NotUnitDeterminant(_) => "not-unit-determinant",
        WhittakerError::IllConditioned(_) => "ill-conditioned",
        WhittakerError::OracleTooLarge { .. } => "oracle-too-large",
        WhittakerError::SupportGuardExceeded(_) => "support-guard-exceeded",
        WhittakerError::DivergentDomain(_) => "divergent-domain",
        WhittakerError::Pole => "pole",
        WhittakerError::NegativeValuation => "negative-valuation",
        WhittakerError::NotSymmetric(_) => "not-symmetric",
        WhittakerError::ExactRequired => "exact-required",
        WhittakerError::DecayContract(_) => "decay-contract",
        WhittakerError::UnsupportedDegree(_) => "unsupported-degree",
        WhittakerError::NearContourPole(_) => "near-contour-pole",
        WhittakerError::InvalidParameter(_) => "invalid-parameter",
    }
}

/// Exit status: 2 for precondition violations, 3 for divergence reports.
pub fn error_exit_code(error: &WhittakerError) -> u8 {
    match error {
        WhittakerError::DivergentDomain(_) => 3,
        _ => 2,
    }
}

pub fn error_document(error: &WhittakerError) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "error": {
            "kind": error_kind(error),
            "message": error.to_string(),
        }
    })
}
