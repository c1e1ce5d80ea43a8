//! File formats: JSON matrices and ensembles, leakage results, and the CSV
//! tables behind the convergence, sweep and audit outputs.
//!
//! Matrices are written as `{"dim": d, "re": [[..]], "im": [[..]]}`, row
//! major, each entry with 17 significant digits so values round-trip exactly.
//! CSV floats carry 9 significant digits.

use std::io::Write;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::encoder::{OptimizationRun, SweepPoint};
use crate::error::{Error, Result};
use crate::inference::AuditRow;
use crate::leakage::LeakageResult;
use crate::operator::{CMatrix, DensityOperator, Ensemble, Hermitian};

fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0.0000000000000000e0"
        return "0.0".into();
    }
    format!("{x:.16e}")
}

/// JSON text of a square complex matrix.
pub fn matrix_to_json(m: &CMatrix) -> String {
    let part = |f: fn(&num_complex::Complex64) -> f64| {
        let rows: Vec<String> = (0..m.nrows())
            .map(|i| {
                let cells: Vec<String> = (0..m.ncols()).map(|j| fmt17(f(&m[(i, j)]))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    };
    format!(r#"{{"dim":{},"re":{},"im":{}}}"#, m.nrows(), part(|z| z.re), part(|z| z.im))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixRepr {
    fn into_matrix(self) -> std::result::Result<CMatrix, String> {
        let d = self.dim;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !square(&self.re) || !square(&self.im) {
            return Err(format!("matrix entries do not match dim {d}"));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| num_complex::Complex64::new(self.re[i][j], self.im[i][j])))
    }
}

/// Serde adapter for the matrix JSON format.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixJson(pub CMatrix);

impl Serialize for MatrixJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(matrix_to_json(&self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixRepr::deserialize(d)?.into_matrix().map(MatrixJson).map_err(D::Error::custom)
    }
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    Ok(serde_json::from_str::<MatrixJson>(text)?.0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    alphabet: Vec<serde_json::Value>,
    dim: usize,
    states: Vec<MatrixJson>,
}

fn label_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parse `{"alphabet": [...], "dim": d, "states": [matrix, ...]}`.
pub fn ensemble_from_json(text: &str) -> Result<Ensemble> {
    let file: EnsembleFile = serde_json::from_str(text)?;
    if file.alphabet.len() != file.states.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} states",
            file.alphabet.len(),
            file.states.len()
        )));
    }
    let states = file
        .states
        .into_iter()
        .map(|MatrixJson(m)| {
            if m.nrows() != file.dim {
                return Err(Error::DimensionMismatch { expected: file.dim, found: m.nrows() });
            }
            Ok(DensityOperator::new(Hermitian::new(m)?)?.detect_pure())
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(file.alphabet.iter().map(label_text).collect(), states)
}

pub fn ensemble_to_json(ens: &Ensemble) -> Result<String> {
    let file = EnsembleFile {
        alphabet: ens.labels().iter().cloned().map(serde_json::Value::String).collect(),
        dim: ens.dim(),
        states: ens.states().iter().map(|s| MatrixJson(s.matrix().clone())).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

#[derive(Serialize)]
struct LeakageJson<'a> {
    leakage_bits: f64,
    dual_upper_bound_bits: f64,
    iterations: usize,
    converged: bool,
    objective_trace: &'a [f64],
    povm: Vec<MatrixJson>,
    assignment: &'a [usize],
}

pub fn leakage_result_to_json(res: &LeakageResult) -> Result<String> {
    let out = LeakageJson {
        leakage_bits: res.leakage_bits,
        dual_upper_bound_bits: res.dual_upper_bound_bits,
        iterations: res.iterations,
        converged: res.converged,
        objective_trace: &res.objective_trace,
        povm: res.povm.elements().iter().map(|f| MatrixJson(f.matrix().clone())).collect(),
        assignment: &res.assignment,
    };
    Ok(serde_json::to_string_pretty(&out)?)
}

/// Float with 9 significant digits, printed in its shortest plain form.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// `iteration,objective,leakage_bits` for one solver run.
pub fn write_objective_trace_csv<W: Write>(res: &LeakageResult, w: W) -> Result<()> {
    write_rows(
        w,
        &["iteration", "objective", "leakage_bits"],
        res.objective_trace
            .iter()
            .enumerate()
            .map(|(k, &o)| vec![k.to_string(), fmt_sig9(o), fmt_sig9(o.max(1.0).log2())]),
    )
}

/// `run_id,iteration,leakage_bits`, runs in order.
pub fn write_runs_csv<W: Write>(run: &OptimizationRun, w: W) -> Result<()> {
    write_rows(
        w,
        &["run_id", "iteration", "leakage_bits"],
        run.traces
            .iter()
            .enumerate()
            .flat_map(|(r, t)| t.iter().enumerate().map(move |(k, &q)| vec![r.to_string(), k.to_string(), fmt_sig9(q)])),
    )
}

/// `iteration,median_bits,min_bits,max_bits`.
pub fn write_summary_csv<W: Write>(run: &OptimizationRun, w: W) -> Result<()> {
    write_rows(
        w,
        &["iteration", "median_bits", "min_bits", "max_bits"],
        run.summary
            .iter()
            .map(|s| vec![s.iteration.to_string(), fmt_sig9(s.median), fmt_sig9(s.min), fmt_sig9(s.max)]),
    )
}

/// `qubits,leakage_bits`.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], w: W) -> Result<()> {
    write_rows(
        w,
        &["qubits", "leakage_bits"],
        points.iter().map(|p| vec![p.qubits.to_string(), fmt_sig9(p.leakage_bits)]),
    )
}

pub const AUDIT_HEADER: [&str; 11] = [
    "case_id",
    "seed",
    "dim",
    "alphabet_in",
    "alphabet_out",
    "accuracy",
    "leakage_bits",
    "corrected_bound",
    "literal_bound",
    "corrected_holds",
    "literal_holds",
];

pub fn write_audit_csv<W: Write>(rows: &[AuditRow], w: W) -> Result<()> {
    write_rows(
        w,
        &AUDIT_HEADER,
        rows.iter().map(|r| {
            vec![
                r.case_id.to_string(),
                r.seed.to_string(),
                r.dim.to_string(),
                r.alphabet_in.to_string(),
                r.alphabet_out.to_string(),
                fmt_sig9(r.report.accuracy),
                fmt_sig9(r.report.leakage_bits),
                fmt_sig9(r.report.corrected_bound),
                fmt_sig9(r.report.literal_bound),
                r.report.corrected_holds.to_string(),
                r.report.literal_holds.to_string(),
            ]
        }),
    )
}
